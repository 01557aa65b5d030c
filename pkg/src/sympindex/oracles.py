"""Independent checks of the iteration formulae.

* ``nullity_oracle`` measures ``dim ker(M^k - I)`` from the matrix alone.
* ``build_path`` / ``crossing_index`` construct an explicit symplectic path
  ending at a seed's normal form and count its crossings with the
  eigenvalue-1 stratum, with no reference to the closed-form index.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np

from .angles import Angle, SurdSum
from .errors import DegeneracyError, ParityError, PrecisionWarning
from .forms import (
    D,
    N1,
    N2,
    R,
    Block,
    IndexSeed,
    NormalFormCounts,
    SymplecticMatrix,
    diamond_positions,
    realize_seed,
    standard_j,
)
from .iteration import iterate_index

RANK_TOL = 1e-8
# rate of the e^{-eps J t} push-off that selects the lower-semicontinuous index
PUSH_OFF = 1e-7
# largest allowed ||W(b) - W(a)|| between consecutive samples
_STEP_CAP = 0.3
_MAX_REFINE = 20


# ---------------------------------------------------------------------------
# nullity

def _kernel_dim(a: np.ndarray, rel_tol: float) -> tuple[int, bool]:
    sv = np.linalg.svd(a, compute_uv=False)
    thresh = rel_tol * max(1.0, float(sv[0]) if sv.size else 1.0)
    dim = int(np.sum(sv <= thresh))
    borderline = bool(np.any((sv > thresh / 10) & (sv < thresh * 10)))
    return dim, borderline


def nullity_oracle(m, power: int, rel_tol: float = RANK_TOL) -> int:
    """``dim_C ker(M^power - I)``.

    ``x^k - 1`` has simple roots, so the kernel splits as the direct sum of
    ``ker(M - w I)`` over the k-th roots of unity ``w``.  Each summand is
    ranked by SVD of a matrix of moderate norm, which avoids forming
    ``M^k`` (hyperbolic blocks make ``M^k`` overflow any relative threshold).
    """
    a = np.asarray(m.entries if isinstance(m, SymplecticMatrix) else m, dtype=float)
    if power < 1:
        raise ValueError("power must be positive")
    eye = np.eye(a.shape[0])
    total, borderline = 0, False
    for k in range(power):
        w = complex(math.cos(2 * math.pi * k / power), math.sin(2 * math.pi * k / power))
        if k == 0:
            dim, flag = _kernel_dim(a - eye, rel_tol)
        elif 2 * k == power:
            dim, flag = _kernel_dim(a + eye, rel_tol)
        else:
            dim, flag = _kernel_dim(a - w * eye, rel_tol)
        total += dim
        borderline |= flag
    if borderline:
        warnings.warn(
            f"a singular value of M - wI lies within a factor 10 of the rank threshold (power {power})",
            PrecisionWarning,
            stacklevel=2,
        )
    return total


def nullity_table(m, m_max: int, rel_tol: float = RANK_TOL) -> np.ndarray:
    """``nullity_oracle(m, k)`` for ``k = 1..m_max``, sharing work across k.

    ``ker(M - w I)`` is computed once per distinct root of unity ``w``.
    """
    a = np.asarray(m.entries if isinstance(m, SymplecticMatrix) else m, dtype=float)
    eye = np.eye(a.shape[0])
    dims: dict[tuple[int, int], int] = {}
    fracs = sorted({(k // math.gcd(k, q), q // math.gcd(k, q)) for q in range(1, m_max + 1) for k in range(q)})
    mats = []
    for p, q in fracs:
        w = complex(math.cos(2 * math.pi * p / q), math.sin(2 * math.pi * p / q))
        if q == 1:
            w = 1.0
        elif q == 2:
            w = -1.0
        mats.append(a - w * eye)
    sv = np.linalg.svd(np.array(mats, dtype=complex), compute_uv=False)
    thresh = rel_tol * np.maximum(1.0, sv[:, 0])
    kdim = np.sum(sv <= thresh[:, None], axis=1)
    if np.any((sv > thresh[:, None] / 10) & (sv < thresh[:, None] * 10)):
        warnings.warn("a rank decision lies within a factor 10 of the threshold", PrecisionWarning, stacklevel=2)
    for (p, q), d in zip(fracs, kdim):
        dims[(p, q)] = int(d)
    out = np.zeros(m_max, dtype=np.int64)
    for power in range(1, m_max + 1):
        tot = 0
        for k in range(power):
            g = math.gcd(k, power)
            tot += dims[(k // g, power // g)]
        out[power - 1] = tot
    return out


# ---------------------------------------------------------------------------
# explicit block paths

def _rot(phi: np.ndarray) -> np.ndarray:
    c, s = np.cos(phi), np.sin(phi)
    out = np.empty(phi.shape + (2, 2))
    out[..., 0, 0] = c
    out[..., 0, 1] = -s
    out[..., 1, 0] = s
    out[..., 1, 1] = c
    return out


def _shear(b: np.ndarray) -> np.ndarray:
    out = np.zeros(b.shape + (2, 2))
    out[..., 0, 0] = 1.0
    out[..., 1, 1] = 1.0
    out[..., 0, 1] = b
    return out


def _diag(x: np.ndarray) -> np.ndarray:
    out = np.zeros(x.shape + (2, 2))
    out[..., 0, 0] = x
    out[..., 1, 1] = 1.0 / x
    return out


def _block_generator(block: Block) -> tuple[Callable[[np.ndarray], np.ndarray], int, str]:
    """``(g, nominal_index, description)`` with ``g(0) = I`` and ``g(1) = block``.

    ``nominal_index`` is the Maslov-type index of ``g`` on ``[0, 1]`` worked
    out by hand from its crossing structure; the oracle never reads it.
    """
    if isinstance(block, N1):
        b = block.b
        if block.lam == 1:
            if b == 0:
                return (lambda s: _rot(2 * math.pi * s)), 1, "R(2 pi s)"
            return (lambda s: _shear(b * s)), (-1 if b > 0 else 0), f"shear({b} s)"
        if b == 0:
            return (lambda s: _rot(math.pi * s)), 1, "R(pi s)"
        return (lambda s: _rot(math.pi * s) @ _shear(-b * s)), 1, f"R(pi s) shear({-b} s)"
    if isinstance(block, R):
        th = block.angle.value
        return (lambda s: _rot(th * s)), 1, f"R({th!r} s)"
    if isinstance(block, D):
        lam = block.lam
        if lam > 0:
            return (lambda s: _diag(lam ** s)), 0, f"D({lam}^s)"
        return (lambda s: _rot(math.pi * s) @ _diag(abs(lam) ** s)), 1, f"R(pi s) D({abs(lam)}^s)"
    if isinstance(block, N2):
        th = block.angle.value
        r1 = np.array([[math.cos(th), -math.sin(th)], [math.sin(th), math.cos(th)]])
        c = r1.T @ block.b_matrix
        c = 0.5 * (c + c.T)

        def g(s, th=th, c=c):
            rot = _rot(th * s)
            out = np.zeros(s.shape + (4, 4))
            out[..., :2, :2] = rot
            out[..., 2:, 2:] = rot
            out[..., :2, 2:] = s[..., None, None] * (rot @ c)
            return out

        return g, 0, f"R^(theta s) [[I, s C], [0, I]] theta={th!r}"
    raise TypeError(f"no path generator for {block!r}")


def _wind(g: Callable, h: int, w: int) -> Callable:
    """Left-multiply by ``w`` full turns in the first (q, p) plane of the block."""
    if w == 0:
        return g

    def wound(s):
        base = g(s)
        loop = np.broadcast_to(np.eye(2 * h), s.shape + (2 * h, 2 * h)).copy()
        r = _rot(2 * math.pi * w * s)
        idx = np.array([0, h])
        loop[..., idx[:, None], idx[None, :]] = r
        return loop @ base

    return wound


@dataclass
class SampledPath:
    """A symplectic path ``gamma`` on ``[0, tau]`` and its iterate on ``[0, periods*tau]``.

    ``times``/``matrices`` hold the stored samples; :meth:`at` evaluates the
    iterate anywhere via ``gamma^m(t) = gamma(t - j tau) gamma(tau)^j``.
    """

    n: int
    tau: float
    periods: int
    times: np.ndarray
    matrices: np.ndarray
    generator: dict
    _one_period: Callable = field(repr=False, default=None)
    _powers: np.ndarray = field(repr=False, default=None)

    def base(self, s: np.ndarray) -> np.ndarray:
        """``gamma`` at unit-period parameters ``s`` (any real ``s``)."""
        return self._one_period(np.asarray(s, dtype=float))

    def at(self, t) -> np.ndarray:
        t = np.atleast_1d(np.asarray(t, dtype=float))
        u = t / self.tau
        j = np.clip(np.floor(u).astype(np.int64), 0, self.periods - 1)
        g = self.base(u - j)
        return g @ self._powers[j]

    def endpoint(self, periods: int | None = None) -> np.ndarray:
        k = self.periods if periods is None else periods
        return np.linalg.matrix_power(self._powers[1], k) if k else np.eye(2 * self.n)


def build_path(
    seed: IndexSeed,
    samples_per_period: int = 64,
    periods: int = 1,
    tau: float = 1.0,
    winding_block: int = 0,
) -> SampledPath:
    """Explicit path whose endpoint is ``realize_seed(seed)``.

    Each block gets a one-parameter path (rotations at constant speed,
    shears and hyperbolic factors along one-parameter subgroups); whole
    turns are added to one block until the nominal index equals ``seed.i1``.
    """
    blocks = seed.counts.blocks()
    gens, nominal, desc = [], 0, []
    for b in blocks:
        g, k, d = _block_generator(b)
        gens.append(g)
        nominal += k
        desc.append(d)
    diff = seed.i1 - nominal
    if diff % 2:
        raise ParityError(
            f"i1 = {seed.i1} has the wrong parity for this normal form "
            f"(path family reaches indices congruent to {nominal % 2} mod 2)"
        )
    w = diff // 2
    halves = [b.dim_half for b in blocks]
    gens[winding_block] = _wind(gens[winding_block], halves[winding_block], w)
    pos = diamond_positions(halves)
    dim = 2 * seed.n

    def one_period(s: np.ndarray) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        out = np.zeros(s.shape + (dim, dim))
        for g, idx in zip(gens, pos):
            out[..., idx[:, None], idx[None, :]] = g(s)
        return out

    end = one_period(np.array(1.0))
    powers = np.empty((periods + 1, dim, dim))
    powers[0] = np.eye(dim)
    for j in range(1, periods + 1):
        powers[j] = powers[j - 1] @ end
    path = SampledPath(
        n=seed.n,
        tau=float(tau),
        periods=int(periods),
        times=np.empty(0),
        matrices=np.empty((0, dim, dim)),
        generator={"blocks": desc, "winding": {"block": winding_block, "turns": w}, "nominal_index": nominal},
        _one_period=one_period,
        _powers=powers,
    )
    times = np.linspace(0.0, periods * tau, periods * samples_per_period + 1)
    path.times = times
    path.matrices = path.at(times)
    return path


# ---------------------------------------------------------------------------
# crossing count

def _souriau(g: np.ndarray) -> np.ndarray:
    """Unitary image of ``Graph(g)`` in ``(R^2n x R^2n, -omega + omega)``.

    The graph frame ``(v, g v)`` is written in coordinates where the form is
    standard, ``x = (q(v), q(gv))``, ``y = (p(v), -p(gv))``; the image is
    ``(X + iY)(X - iY)^{-1}``, symmetric and unitary.
    """
    n2 = g.shape[-1]
    n = n2 // 2
    eye = np.broadcast_to(np.eye(n2), g.shape)
    x = np.concatenate([eye[..., :n, :], g[..., :n, :]], axis=-2)
    y = np.concatenate([eye[..., n:, :], -g[..., n:, :]], axis=-2)
    scale = np.sqrt(np.sum(x * x + y * y, axis=-2, keepdims=True))
    a = (x + 1j * y) / scale
    b = (x - 1j * y) / scale
    # U = A B^{-1}  <=>  B^T U^T = A^T
    ut = np.linalg.solve(np.swapaxes(b, -1, -2), np.swapaxes(a, -1, -2))
    return np.swapaxes(ut, -1, -2)


def _push_off(u: np.ndarray, n: int) -> np.ndarray:
    """``exp(-PUSH_OFF * J * u)`` for parameters ``u``."""
    j = standard_j(n)
    c = np.cos(PUSH_OFF * u)[..., None, None]
    s = np.sin(PUSH_OFF * u)[..., None, None]
    return c * np.eye(2 * n) - s * j


def _flow_matrices(path: SampledPath, u: np.ndarray, w_delta_inv: np.ndarray) -> np.ndarray:
    g = path.at(u * path.tau) @ _push_off(u, path.n)
    return w_delta_inv @ _souriau(g)


def _start_contribution(path: SampledPath) -> int:
    """Half the signature of the crossing form at ``t = 0``."""
    h = 1e-6
    n = path.n
    u = np.array([-h, h])
    g = path.base(u) @ _push_off(u, n)
    deriv = (g[1] - g[0]) / (2 * h)
    sform = -standard_j(n) @ deriv
    sform = 0.5 * (sform + sform.T)
    ev = np.linalg.eigvalsh(sform)
    if np.min(np.abs(ev)) < 1e-2 * PUSH_OFF:
        raise DegeneracyError("crossing form at t = 0 is degenerate")
    pos, neg = int(np.sum(ev > 0)), int(np.sum(ev < 0))
    return (pos - neg) // 2


def _wrapped_phase_sum(w: np.ndarray) -> np.ndarray:
    ev = np.linalg.eigvals(w)
    return np.sum(np.mod(np.angle(ev), 2 * math.pi), axis=-1), ev


def raw_crossing_counts(path: SampledPath, samples_per_period: int = 64, max_refine: int = _MAX_REFINE) -> np.ndarray:
    """Uncalibrated index of the iterate restricted to ``[0, k tau]``, ``k = 1..periods``.

    The path is pushed off the eigenvalue-1 stratum by ``exp(-eps J t)``.
    Crossings are eigenvalues of the unitary graph image passing through 1;
    the continuous change of ``arg det`` minus the change of the sum of
    eigen-phases wrapped to ``[0, 2 pi)`` is ``2 pi`` times the net number of
    counter-clockwise passages on each step.  Those enter with a minus sign
    (a positive-definite crossing form turns the phases clockwise here).
    """
    n = path.n
    w_delta_inv = np.linalg.inv(_souriau(np.eye(2 * n)[None])[0])
    start = _start_contribution(path)
    t1 = 1e-6
    grid = np.concatenate([[t1], np.linspace(0.0, path.periods, path.periods * samples_per_period + 1)[1:]])
    w = _flow_matrices(path, grid, w_delta_inv)
    for _ in range(max_refine + 1):
        jump = np.linalg.norm(w[1:] - w[:-1], ord=2, axis=(-2, -1))
        bad = np.nonzero(jump > _STEP_CAP)[0]
        if bad.size == 0:
            break
        mids = 0.5 * (grid[bad] + grid[bad + 1])
        w_mid = _flow_matrices(path, mids, w_delta_inv)
        grid = np.insert(grid, bad + 1, mids)
        w = np.insert(w, bad + 1, w_mid, axis=0)
    else:
        raise DegeneracyError("crossing refinement exceeded its subdivision cap")
    if grid.size > path.periods * samples_per_period * (1 << max_refine):
        raise DegeneracyError("crossing refinement exceeded its subdivision cap")

    step = np.einsum("kji,kjl->kil", w[:-1].conj(), w[1:])
    d_arg = np.sum(np.angle(np.linalg.eigvals(step)), axis=-1)
    wrapped, ev = _wrapped_phase_sum(w)
    d_wrapped = np.diff(wrapped)
    counts = (d_arg - d_wrapped) / (2 * math.pi)
    rounded = np.rint(counts)
    if np.max(np.abs(counts - rounded), initial=0.0) > 1e-6:
        raise DegeneracyError("non-integer crossing count; sampling too coarse")
    cum = np.concatenate([[0], np.cumsum(rounded.astype(np.int64))])
    out = np.empty(path.periods, dtype=np.int64)
    for k in range(1, path.periods + 1):
        idx = int(np.argmin(np.abs(grid - k)))
        if abs(grid[idx] - k) > 1e-12:
            raise RuntimeError("period boundary missing from the sample grid")
        gap = float(np.min(np.abs(ev[idx] - 1.0)))
        if gap < 1e-9:
            raise DegeneracyError(f"iterate {k} ends on the eigenvalue-1 stratum even after push-off")
        out[k - 1] = start - cum[idx]
    return out


@lru_cache(maxsize=None)
def _reference_seed() -> IndexSeed:
    theta = Angle.surd(SurdSum.sqrt(2) - 1)
    return IndexSeed(1, 1, NormalFormCounts(r=1, theta_list=(theta,)), label="reference R(2 pi (sqrt2 - 1))")


class CrossingOracle:
    """Crossing counter with one additive normalization constant.

    The constant is fixed by matching ``iterate_index(reference, 1)`` once
    and then reused for every seed and every iterate.
    """

    def __init__(self, reference: IndexSeed | None = None, samples_per_period: int = 64):
        self.reference = reference or _reference_seed()
        self.samples_per_period = samples_per_period
        ref_path = build_path(self.reference, samples_per_period, periods=1)
        raw = int(raw_crossing_counts(ref_path, samples_per_period)[0])
        self.offset = iterate_index(self.reference, 1) - raw

    def indices(self, path: SampledPath) -> np.ndarray:
        """Calibrated index of the iterate on ``[0, k tau]`` for ``k = 1..periods``."""
        return raw_crossing_counts(path, self.samples_per_period) + self.offset

    def __call__(self, path: SampledPath) -> int:
        return int(self.indices(path)[-1])


@lru_cache(maxsize=1)
def default_oracle() -> CrossingOracle:
    return CrossingOracle()


def crossing_index(path: SampledPath, oracle: CrossingOracle | None = None) -> int:
    """Maslov-type index of the full sampled iterate, via crossing counts."""
    return (oracle or default_oracle())(path)


def mean_index_limit(seed: IndexSeed, m_max: int) -> float:
    """``i(gamma, m_max) / m_max``."""
    if m_max < 1000:
        raise ValueError("mean_index_limit needs m_max >= 1000")
    return iterate_index(seed, m_max) / m_max


def endpoint_matches(seed: IndexSeed, path: SampledPath, tol: float = 1e-9) -> bool:
    return bool(np.max(np.abs(path.endpoint(1) - realize_seed(seed).entries)) <= tol)


__all__ = [
    "CrossingOracle",
    "SampledPath",
    "build_path",
    "crossing_index",
    "default_oracle",
    "endpoint_matches",
    "mean_index_limit",
    "nullity_oracle",
    "nullity_table",
    "raw_crossing_counts",
]
