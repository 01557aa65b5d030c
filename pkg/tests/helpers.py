"""Seeds and angles shared by several test modules."""

from sympindex.angles import Angle
from sympindex.forms import make_seed


def surd(turn):
    """Algebraic angle with the given turn expression, ``theta = 2 pi turn``."""
    return Angle.from_expr(f"2*pi*({turn})")


def surd_r3_seed(i1=-2):
    """n = 4 seed N1(1,1) + three rotations with turns sqrt2-1, sqrt3-1, 4-sqrt2-sqrt3."""
    thetas = tuple(surd(e) for e in ("sqrt(2)-1", "sqrt(3)-1", "4-sqrt(2)-sqrt(3)"))
    return make_seed(4, i1, p_minus=1, r=3, theta_list=thetas, label="surd-r3")


def constant_seed():
    """n = 4 seed N1(1,1) + D(2)^3 with i1 = -1."""
    return make_seed(4, -1, p_minus=1, s=3, label="constant")


INTEGER_FIELDS = ("p_minus", "p_zero", "p_plus", "q_minus", "q_zero", "q_plus", "r", "r_star", "r_zero", "s")


def _turns(angles, fold=False):
    xs = [float(a.turn) for a in angles]
    # N2(alpha) and N2(2 pi - alpha) are conjugate, so N2 angles compare in (0, pi)
    return sorted(min(x, 1 - x) for x in xs) if fold else sorted(xs)


def counts_close(got, want, atol=1e-6):
    """Integers equal, angles (as turns) within ``atol``, tails equal when s > 0."""
    if any(getattr(got, f) != getattr(want, f) for f in INTEGER_FIELDS):
        return False
    if want.s and got.hyperbolic_tail != want.hyperbolic_tail:
        return False
    for name, fold in (("theta_list", False), ("alpha_list", True), ("beta_list", True)):
        a, b = _turns(getattr(got, name), fold), _turns(getattr(want, name), fold)
        if any(abs(x - y) > atol for x, y in zip(a, b)):
            return False
    return True


# (criterion, passed, seconds, detail) rows collected by the acceptance suite
ACCEPTANCE: list = []


def record(name: str, passed: bool, seconds: float, detail: str = "") -> str:
    line = f"{'PASS' if passed else 'FAIL'}  {name}  [{seconds:.2f} s]  {detail}".rstrip()
    ACCEPTANCE.append(line)
    print(line)
    return line
