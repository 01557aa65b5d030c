"""Symplectic matrices, Long's basic normal forms and the diamond sum."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .angles import Angle
from .errors import DimensionError, DomainError, InconsistencyError

EPS_SYM_BLOCKS = 1e-9
EPS_SYM_USER = 1e-6


def standard_j(n: int) -> np.ndarray:
    """``J = [[0, -I_n], [I_n, 0]]``."""
    j = np.zeros((2 * n, 2 * n))
    j[:n, n:] = -np.eye(n)
    j[n:, :n] = np.eye(n)
    return j


def _half_dim(a: np.ndarray) -> int:
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {a.shape}")
    if a.shape[0] % 2:
        raise DimensionError(f"expected an even dimension, got {a.shape[0]}")
    return a.shape[0] // 2


def symplectic_defect(m) -> float:
    """``max |M^T J M - J|``."""
    a = np.asarray(m.entries if isinstance(m, SymplecticMatrix) else m, dtype=float)
    n = _half_dim(a)
    j = standard_j(n)
    return float(np.max(np.abs(a.T @ j @ a - j))) if n else 0.0


def is_symplectic(m, tol: float = EPS_SYM_BLOCKS) -> bool:
    return symplectic_defect(m) <= tol


@dataclass(frozen=True, eq=False)
class SymplecticMatrix:
    """A ``2n x 2n`` real matrix with ``M^T J M = J`` up to ``tol``."""

    entries: np.ndarray
    tol: float = EPS_SYM_USER

    def __post_init__(self):
        a = np.array(self.entries, dtype=float)
        _half_dim(a)
        if not np.all(np.isfinite(a)):
            raise DomainError("matrix has non-finite entries")
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)
        defect = symplectic_defect(a)
        if defect > self.tol:
            raise DomainError(f"matrix is not symplectic: max|M^T J M - J| = {defect:.3g} > {self.tol:g}")
        # det M = 1 follows from the defect bound; checked independently
        det = float(np.linalg.det(a))
        scale = max(1.0, float(np.linalg.norm(a, 2))) ** a.shape[0]
        if abs(det - 1.0) > 1e-6 * scale:
            raise DomainError(f"matrix determinant {det} is not 1")

    @property
    def n(self) -> int:
        return self.entries.shape[0] // 2

    dim_half = n

    def __matmul__(self, other: "SymplecticMatrix") -> "SymplecticMatrix":
        return SymplecticMatrix(self.entries @ other.entries, tol=max(self.tol, other.tol))

    def __eq__(self, other):
        return isinstance(other, SymplecticMatrix) and np.array_equal(self.entries, other.entries)

    def __hash__(self):
        return hash(self.entries.tobytes())

    def to_json(self) -> dict:
        return {"n": self.n, "rows": self.entries.tolist()}

    @classmethod
    def from_json(cls, obj: dict, tol: float = EPS_SYM_USER) -> "SymplecticMatrix":
        if not isinstance(obj, dict):
            raise DomainError("matrix JSON must be an object with 'n' and 'rows'")
        for key in ("n", "rows"):
            if key not in obj:
                raise DomainError(f"matrix JSON is missing field {key!r}")
        rows = obj["rows"]
        n = int(obj["n"])
        if not isinstance(rows, list) or len(rows) != 2 * n:
            raise DimensionError(f"field 'rows' must hold {2 * n} rows for n={n}")
        for k, row in enumerate(rows):
            if not isinstance(row, list) or len(row) != 2 * n:
                raise DimensionError(f"field 'rows'[{k}] must hold {2 * n} numbers")
        return cls(np.array(rows, dtype=float), tol=tol)


def diamond_sum(a, b) -> np.ndarray:
    """Symplectic direct sum of a ``2i x 2i`` and a ``2j x 2j`` matrix.

    The four ``i x i`` / ``j x j`` quarter blocks of each factor are placed
    so that the result is again written in (q, p) ordering.
    """
    a = np.asarray(a.entries if isinstance(a, SymplecticMatrix) else a, dtype=float)
    b = np.asarray(b.entries if isinstance(b, SymplecticMatrix) else b, dtype=float)
    i, j = _half_dim(a), _half_dim(b)
    k = i + j
    out = np.zeros((2 * k, 2 * k))
    qa, pa = slice(0, i), slice(k, k + i)
    qb, pb = slice(i, k), slice(k + i, 2 * k)
    out[qa, qa] = a[:i, :i]
    out[qa, pa] = a[:i, i:]
    out[pa, qa] = a[i:, :i]
    out[pa, pa] = a[i:, i:]
    out[qb, qb] = b[:j, :j]
    out[qb, pb] = b[:j, j:]
    out[pb, qb] = b[j:, :j]
    out[pb, pb] = b[j:, j:]
    return out


def diamond_all(mats: Sequence) -> np.ndarray:
    """Left-to-right diamond sum of a sequence of even square matrices."""
    if not mats:
        return np.zeros((0, 0))
    out = np.asarray(mats[0], dtype=float)
    for m in mats[1:]:
        out = diamond_sum(out, m)
    return out


def diamond_positions(half_dims: Sequence[int]) -> list[np.ndarray]:
    """Row/column indices each factor occupies in a diamond sum.

    Factor ``k`` of half-dimension ``h`` occupies its q-coordinates followed
    by its p-coordinates; returned arrays have length ``2h``.
    """
    n = sum(half_dims)
    out, start = [], 0
    for h in half_dims:
        q = np.arange(start, start + h)
        out.append(np.concatenate([q, q + n]))
        start += h
    return out


# ---------------------------------------------------------------------------
# basic normal forms

def rotation(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


class Block:
    """Common interface of the basic normal forms."""

    dim_half: int = 1
    # parity class of i(gamma, 1) for a path ending at this single block
    parity: str = "odd"

    def matrix(self) -> np.ndarray:
        raise NotImplementedError

    def realize(self) -> SymplecticMatrix:
        return SymplecticMatrix(self.matrix(), tol=EPS_SYM_BLOCKS)


@dataclass(frozen=True)
class N1(Block):
    """``N1(lam, b) = [[lam, b], [0, lam]]`` with ``lam = +-1``.

    ``b = 0`` gives ``+-I_2``.
    """

    lam: int
    b: float

    def __post_init__(self):
        if self.lam not in (1, -1):
            raise DomainError(f"N1 needs lam = +1 or -1, got {self.lam}")
        if not math.isfinite(self.b):
            raise DomainError("N1 off-diagonal entry must be finite")

    @property
    def parity(self) -> str:
        # N1(1, b) with b < 0 is the only even single 2x2 degenerate block
        return "even" if self.lam == 1 and self.b < 0 else "odd"

    def matrix(self) -> np.ndarray:
        return np.array([[self.lam, self.b], [0.0, self.lam]], dtype=float)


@dataclass(frozen=True)
class D(Block):
    """``D(lam) = diag(lam, 1/lam)`` with ``|lam| not in {0, 1}``."""

    lam: float
    parity = "free"

    def __post_init__(self):
        if not math.isfinite(self.lam) or self.lam == 0 or abs(self.lam) == 1:
            raise DomainError(f"D(lam) needs real lam outside {{0, 1, -1}}, got {self.lam}")

    def matrix(self) -> np.ndarray:
        return np.array([[self.lam, 0.0], [0.0, 1.0 / self.lam]])


def _check_elliptic(angle: Angle):
    if angle.is_pi():
        raise DomainError("angle pi is excluded from R and N2 blocks")
    if angle.kind == "float" and abs(angle.value - math.pi) < 1e-12:
        raise DomainError("angle pi is excluded from R and N2 blocks")


@dataclass(frozen=True)
class R(Block):
    """Rotation ``R(theta)``, ``theta in (0, pi) u (pi, 2 pi)``."""

    angle: Angle

    def __post_init__(self):
        _check_elliptic(self.angle)

    def matrix(self) -> np.ndarray:
        return rotation(self.angle.value)


def triviality_sign(b: np.ndarray, angle: Angle) -> str:
    """``'trivial'`` iff ``(b2 - b3) sin(theta) > 0``, ``'nontrivial'`` iff ``< 0``."""
    b = np.asarray(b, dtype=float)
    if b.shape != (2, 2):
        raise DimensionError("B must be 2x2")
    b2, b3 = b[0, 1], b[1, 0]
    if b2 == b3:
        raise DomainError("N2 needs b2 != b3")
    s = math.sin(angle.value)
    if s == 0:
        raise DomainError("sin(theta) = 0 is excluded")
    return "trivial" if (b2 - b3) * s > 0 else "nontrivial"


@dataclass(frozen=True)
class N2(Block):
    """``N2(e^{i theta}, B) = [[R(theta), B], [0, R(theta)]]`` (4x4).

    ``B = [[b1, b2], [b3, b4]]`` needs ``b2 != b3``; the matrix is symplectic
    only when ``B^T R(theta)`` is symmetric, i.e.
    ``(b3 - b2) cos(theta) = (b1 + b4) sin(theta)``.
    """

    angle: Angle
    b: tuple
    trivial: bool
    dim_half = 2
    parity = "even"

    def __post_init__(self):
        _check_elliptic(self.angle)
        bm = np.array(self.b, dtype=float).reshape(2, 2)
        object.__setattr__(self, "b", tuple(float(x) for x in bm.ravel()))
        kind = triviality_sign(bm, self.angle)
        if (kind == "trivial") != bool(self.trivial):
            flag = "trivial" if self.trivial else "nontrivial"
            raise DomainError(f"N2 flagged {flag} but (b2-b3) sin(theta) says {kind}")
        c, s = math.cos(self.angle.value), math.sin(self.angle.value)
        b1, b2, b3, b4 = self.b
        lhs, rhs = (b3 - b2) * c, (b1 + b4) * s
        if abs(lhs - rhs) > 1e-12 * max(1.0, abs(lhs), abs(rhs)):
            raise DomainError(
                "N2 block is not symplectic: need (b3-b2) cos(theta) = (b1+b4) sin(theta); "
                "use N2.canonical or N2.from_entries"
            )

    @classmethod
    def from_entries(cls, angle: Angle, b1: float, b2: float, b3: float) -> "N2":
        """Solve the symplecticity constraint for ``b4``."""
        c, s = math.cos(angle.value), math.sin(angle.value)
        b4 = (b3 - b2) * c / s - b1
        kind = triviality_sign(np.array([[b1, b2], [b3, b4]]), angle)
        return cls(angle, (b1, b2, b3, b4), kind == "trivial")

    @classmethod
    def canonical(cls, angle: Angle, trivial: bool) -> "N2":
        """The representative with ``b1 = 0`` and ``b2 = -b3 = +-1/2``."""
        sgn = 1.0 if math.sin(angle.value) > 0 else -1.0
        sigma = sgn if trivial else -sgn
        return cls.from_entries(angle, 0.0, 0.5 * sigma, -0.5 * sigma)

    @property
    def b_matrix(self) -> np.ndarray:
        return np.array(self.b).reshape(2, 2)

    def matrix(self) -> np.ndarray:
        r = rotation(self.angle.value)
        out = np.zeros((4, 4))
        out[:2, :2] = r
        out[2:, 2:] = r
        out[:2, 2:] = self.b_matrix
        return out


def realize(block: Block) -> SymplecticMatrix:
    return block.realize()


# ---------------------------------------------------------------------------
# normal-form bookkeeping

TAILS = ("D2", "D-2")

_COUNT_FIELDS = ("p_minus", "p_zero", "p_plus", "q_minus", "q_zero", "q_plus", "r", "r_star", "r_zero", "s")


@dataclass(frozen=True)
class NormalFormCounts:
    p_minus: int = 0
    p_zero: int = 0
    p_plus: int = 0
    q_minus: int = 0
    q_zero: int = 0
    q_plus: int = 0
    r: int = 0
    r_star: int = 0
    r_zero: int = 0
    s: int = 0
    hyperbolic_tail: str = "D2"
    theta_list: tuple = ()
    alpha_list: tuple = ()
    beta_list: tuple = ()

    def __post_init__(self):
        for name in _COUNT_FIELDS:
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, (int, np.integer)) or v < 0:
                raise InconsistencyError(f"{name} must be a non-negative integer, got {v!r}")
            object.__setattr__(self, name, int(v))
        if self.hyperbolic_tail not in TAILS:
            raise InconsistencyError(f"hyperbolic_tail must be one of {TAILS}")
        if self.hyperbolic_tail == "D-2" and self.s < 1:
            raise InconsistencyError("the D(-2) tail needs s >= 1")
        for lst, cnt in (("theta_list", "r"), ("alpha_list", "r_star"), ("beta_list", "r_zero")):
            vals = tuple(getattr(self, lst))
            if len(vals) != getattr(self, cnt):
                raise InconsistencyError(f"{lst} has {len(vals)} angles but {cnt} = {getattr(self, cnt)}")
            for a in vals:
                if not isinstance(a, Angle):
                    raise InconsistencyError(f"{lst} must hold Angle values")
                _check_elliptic(a)
            object.__setattr__(self, lst, vals)

    @property
    def total(self) -> int:
        """Left side of the dimension budget: ``p- + p0 + p+ + q- + q0 + q+ + r + 2 r* + 2 r0 + s``."""
        return (
            self.p_minus + self.p_zero + self.p_plus + self.q_minus + self.q_zero + self.q_plus
            + self.r + 2 * self.r_star + 2 * self.r_zero + self.s
        )

    @property
    def nullity_one(self) -> int:
        """``nu(gamma, 1) = p- + 2 p0 + p+``."""
        return self.p_minus + 2 * self.p_zero + self.p_plus

    def blocks(self) -> list[Block]:
        """Blocks in canonical display order."""
        out: list[Block] = []
        out += [N1(1, 1.0)] * self.p_minus
        out += [N1(1, 0.0)] * self.p_zero
        out += [N1(1, -1.0)] * self.p_plus
        out += [N1(-1, 1.0)] * self.q_minus
        out += [N1(-1, 0.0)] * self.q_zero
        out += [N1(-1, -1.0)] * self.q_plus
        out += [R(a) for a in self.theta_list]
        out += [N2.canonical(a, trivial=False) for a in self.alpha_list]
        out += [N2.canonical(a, trivial=True) for a in self.beta_list]
        if self.s:
            first = -2.0 if self.hyperbolic_tail == "D-2" else 2.0
            out += [D(first)] + [D(2.0)] * (self.s - 1)
        return out

    def counts_dict(self) -> dict:
        return {name: getattr(self, name) for name in _COUNT_FIELDS}

    def to_json(self) -> dict:
        out = self.counts_dict()
        out["hyperbolic_tail"] = self.hyperbolic_tail
        out["theta_list"] = [a.to_json() for a in self.theta_list]
        out["alpha_list"] = [a.to_json() for a in self.alpha_list]
        out["beta_list"] = [a.to_json() for a in self.beta_list]
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "NormalFormCounts":
        if not isinstance(obj, dict):
            raise InconsistencyError("counts JSON must be an object")
        kwargs = {}
        for name in _COUNT_FIELDS:
            v = obj.get(name, 0)
            if isinstance(v, bool) or not isinstance(v, int):
                raise InconsistencyError(f"field {name!r} must be an integer, got {v!r}")
            kwargs[name] = v
        kwargs["hyperbolic_tail"] = obj.get("hyperbolic_tail", "D2")
        for lst in ("theta_list", "alpha_list", "beta_list"):
            raw = obj.get(lst, [])
            if not isinstance(raw, list):
                raise InconsistencyError(f"field {lst!r} must be a list")
            kwargs[lst] = tuple(Angle.from_json(a) for a in raw)
        return cls(**kwargs)


def parity_class(counts: NormalFormCounts) -> str:
    """``'odd'``, ``'even'`` or ``'unconstrained'`` for ``i(gamma, 1)``.

    Each of ``N1(1,1)``, ``I2``, ``N1(-1,+-1)``, ``-I2``, ``R`` contributes an
    odd amount, ``N1(1,-1)`` and ``N2`` an even one; the contributions add
    over the diamond sum.  A hyperbolic tail leaves the parity open.
    """
    if counts.s >= 1:
        return "unconstrained"
    odd = counts.p_minus + counts.p_zero + counts.q_minus + counts.q_zero + counts.q_plus + counts.r
    return "odd" if odd % 2 else "even"


@dataclass(frozen=True)
class IndexSeed:
    """Everything the iteration formulae need: ``n``, ``i(gamma, 1)`` and the counts."""

    n: int
    i1: int
    counts: NormalFormCounts
    label: str = field(default="", compare=False)

    def __post_init__(self):
        if isinstance(self.n, bool) or not isinstance(self.n, (int, np.integer)) or self.n < 1:
            raise InconsistencyError(f"n must be a positive integer, got {self.n!r}")
        if isinstance(self.i1, bool) or not isinstance(self.i1, (int, np.integer)):
            raise InconsistencyError(f"i1 must be an integer, got {self.i1!r}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "i1", int(self.i1))
        if self.counts.total != self.n:
            raise InconsistencyError(
                f"block budget p-+p0+p++q-+q0+q++r+2r*+2r0+s = {self.counts.total} but n = {self.n}"
            )
        par = parity_class(self.counts)
        if par != "unconstrained" and (self.i1 % 2 == 1) != (par == "odd"):
            raise InconsistencyError(f"i1 = {self.i1} contradicts the block parity ({par})")

    @property
    def nullity_one(self) -> int:
        return self.counts.nullity_one

    def to_json(self) -> dict:
        out = {"n": self.n, "i1": self.i1}
        if self.label:
            out["label"] = self.label
        out.update(self.counts.to_json())
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "IndexSeed":
        if not isinstance(obj, dict):
            raise InconsistencyError("seed JSON must be an object")
        for key in ("n", "i1"):
            if key not in obj:
                raise InconsistencyError(f"seed JSON is missing field {key!r}")
        counts = NormalFormCounts.from_json(obj)
        return cls(int(obj["n"]), int(obj["i1"]), counts, label=str(obj.get("label", "")))


def block_parity(seed: IndexSeed) -> str:
    return parity_class(seed.counts)


def realize_seed(seed: IndexSeed) -> SymplecticMatrix:
    """Diamond sum of the seed's blocks in canonical order."""
    blocks = seed.counts.blocks()
    m = diamond_all([b.matrix() for b in blocks])
    if m.shape[0] != 2 * seed.n:
        raise InconsistencyError("assembled dimension does not match n")
    return SymplecticMatrix(m, tol=EPS_SYM_BLOCKS)


def make_seed(n: int, i1: int, label: str = "", **counts) -> IndexSeed:
    """Convenience constructor; angle lists may be given as ``Angle`` sequences."""
    return IndexSeed(n, i1, NormalFormCounts(**counts), label=label)


__all__ = [
    "Angle",
    "Block",
    "D",
    "EPS_SYM_BLOCKS",
    "EPS_SYM_USER",
    "IndexSeed",
    "N1",
    "N2",
    "NormalFormCounts",
    "R",
    "SymplecticMatrix",
    "block_parity",
    "diamond_all",
    "diamond_positions",
    "diamond_sum",
    "is_symplectic",
    "make_seed",
    "parity_class",
    "realize",
    "realize_seed",
    "rotation",
    "standard_j",
    "symplectic_defect",
    "triviality_sign",
]
