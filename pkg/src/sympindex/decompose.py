"""Recover normal-form invariants from a numerically given symplectic matrix."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import schur

from .angles import Angle
from .errors import AmbiguityError, DimensionError, InconsistencyError, NotACharacteristicError
from .forms import (
    EPS_SYM_USER,
    NormalFormCounts,
    SymplecticMatrix,
    standard_j,
    triviality_sign,
)

CLUSTER_TOL = 1e-4
RANK_TOL = 1e-8
FORM_TOL = 1e-10
# a singular value this many times the rank threshold counts as clearly non-zero
_RANK_GAP = 10.0

LOCATIONS = ("one", "minus_one", "elliptic", "hyperbolic_real", "hyperbolic_quadruple")


@dataclass(frozen=True)
class EigenCluster:
    value: complex
    multiplicity: int
    location: str
    # distance from ``value`` that captures every member, plus the tolerance
    radius: float = field(default=0.0, compare=False)

    def to_json(self) -> dict:
        return {
            "re": float(self.value.real),
            "im": float(self.value.imag),
            "multiplicity": self.multiplicity,
            "location": self.location,
        }


@dataclass(frozen=True)
class SpectralClassification:
    """Eigenvalue clusters of a symplectic matrix and its Floquet type.

    ``floquet_type`` describes the multipliers other than the forced double
    multiplier 1: ``elliptic`` when all lie on the unit circle, ``hyperbolic``
    when none does, ``mixed`` otherwise.  ``non_degenerate`` records whether
    1 has algebraic multiplicity exactly 2.
    """

    clusters: tuple
    floquet_type: str
    non_degenerate: bool
    eigenvalues: np.ndarray = field(repr=False, compare=False)

    def multiplicity_at(self, location: str) -> int:
        return sum(c.multiplicity for c in self.clusters if c.location == location)

    def to_json(self) -> dict:
        return {
            "clusters": [c.to_json() for c in self.clusters],
            "floquet_type": self.floquet_type,
            "non_degenerate": self.non_degenerate,
        }


def _as_array(m) -> np.ndarray:
    if isinstance(m, SymplecticMatrix):
        return np.asarray(m.entries, dtype=float)
    a = np.asarray(m, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] % 2:
        raise DimensionError(f"expected a 2n x 2n matrix, got shape {a.shape}")
    SymplecticMatrix(a, tol=EPS_SYM_USER)
    return a


def _single_linkage(vals: np.ndarray, tol: float) -> list[np.ndarray]:
    """Index groups of ``vals`` connected by chains of steps ``<= tol``."""
    k = vals.size
    parent = list(range(k))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    dist = np.abs(vals[:, None] - vals[None, :])
    for i, j in zip(*np.nonzero(np.triu(dist <= tol, 1))):
        parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in range(k):
        groups.setdefault(find(i), []).append(i)
    return [np.array(g) for g in groups.values()]


def _locate(z: complex, tol: float) -> str:
    if abs(z - 1) <= tol:
        return "one"
    if abs(z + 1) <= tol:
        return "minus_one"
    if abs(abs(z) - 1) <= tol:
        return "elliptic"
    if abs(z.imag) <= tol:
        return "hyperbolic_real"
    return "hyperbolic_quadruple"


def classify_spectrum(m, tol: float = CLUSTER_TOL) -> SpectralClassification:
    """Cluster the eigenvalues and assign each cluster a location."""
    a = _as_array(m)
    ev = np.linalg.eigvals(a)
    groups = _single_linkage(ev, tol)
    # clusters closer than 2 tol but not linked are a judgement call
    for i, gi in enumerate(groups):
        for gj in groups[i + 1:]:
            gap = float(np.min(np.abs(ev[gi][:, None] - ev[gj][None, :])))
            if gap <= 2 * tol:
                raise AmbiguityError(
                    f"eigenvalue clusters {ev[gi].mean():.6g} and {ev[gj].mean():.6g} are {gap:.2e} apart",
                    candidates=["merged", "separate"],
                )
    clusters = []
    for g in groups:
        z = complex(ev[g].mean())
        loc = _locate(z, tol)
        if loc == "one":
            z = 1 + 0j
        elif loc == "minus_one":
            z = -1 + 0j
        elif loc == "hyperbolic_real":
            z = complex(z.real, 0.0)
        radius = float(np.max(np.abs(ev[g] - z))) + tol
        clusters.append(EigenCluster(z, int(g.size), loc, radius))
    clusters.sort(key=lambda c: (LOCATIONS.index(c.location), -c.value.real, c.value.imag))
    _check_symmetry(clusters, tol)
    one = sum(c.multiplicity for c in clusters if c.location == "one")
    rest = [c for c in clusters if c.location != "one"]
    on_circle = sum(c.multiplicity for c in rest if c.location in ("minus_one", "elliptic"))
    off_circle = sum(c.multiplicity for c in rest) - on_circle
    if one > 2:
        # the surplus multiplier-1 pairs sit on the circle as well
        on_circle += one - 2
    if off_circle == 0:
        ftype = "elliptic"
    elif on_circle == 0:
        ftype = "hyperbolic"
    else:
        ftype = "mixed"
    return SpectralClassification(tuple(clusters), ftype, one == 2, ev)


def _check_symmetry(clusters, tol):
    for c in clusters:
        z = c.value
        for partner in (z.conjugate(), 1 / z):
            mult = sum(d.multiplicity for d in clusters if abs(d.value - partner) <= 10 * tol)
            if mult != c.multiplicity:
                raise AmbiguityError(
                    f"spectrum not symmetric at {z:.6g}; multiplicity {c.multiplicity} vs {mult} at {partner:.6g}"
                )


# ---------------------------------------------------------------------------
# Jordan structure

def _form_floor(a: np.ndarray) -> float:
    # sign forms are quadratic in the matrix entries; rounding noise is ~eps ||M||^2
    return FORM_TOL * max(1.0, float(np.linalg.norm(a, 2))) ** 2


def _gen_space(a: np.ndarray, lam: complex, radius: float, mult: int, what: str):
    """``(N, G, dim ker N)`` with ``N = a - lam I`` and ``G`` an orthonormal
    basis of the invariant subspace for the eigenvalues within ``radius``.

    ``G`` comes from an ordered complex Schur form; the kernel dimension is
    the rank deficiency of the ``mult x mult`` restricted block.
    """
    t, z, sdim = schur(a.astype(complex), output="complex", sort=lambda w: abs(w - lam) <= radius)
    if sdim != mult:
        raise AmbiguityError(f"{what}: Schur reordering picked {sdim} eigenvalues, expected {mult}")
    gen = z[:, :mult]
    local = t[:mult, :mult] - lam * np.eye(mult)
    sv = np.linalg.svd(local, compute_uv=False)
    thresh = RANK_TOL * max(1.0, float(np.linalg.norm(a, 2)))
    close = (sv > thresh / _RANK_GAP) & (sv <= thresh * _RANK_GAP)
    if np.any(close):
        raise AmbiguityError(f"rank of {what} undecidable (singular value {sv[close][0]:.2e}, threshold {thresh:.2e})")
    return a - lam * np.eye(a.shape[0]), gen, int(np.sum(sv <= thresh))


def _unipotent_counts(a: np.ndarray, mult: int, radius: float, what: str) -> tuple[int, int, int]:
    """``(b>0 count, b=0 count, b<0 count)`` of the ``N1(1, b)`` blocks of ``a``."""
    if mult % 2:
        raise AmbiguityError(f"{what}: odd multiplicity {mult}")
    nmat, gen, dk = _gen_space(a, 1.0, radius, mult, what)
    zero = dk - mult // 2
    chains = mult - dk
    if zero < 0 or chains < 0:
        raise AmbiguityError(f"{what}: kernel dimension {dk} inconsistent with multiplicity {mult}")
    n = a.shape[0] // 2
    form = (nmat @ gen).conj().T @ standard_j(n) @ gen
    form = 0.5 * (form + form.conj().T)
    ev = np.linalg.eigvalsh(form)
    big = np.sort(np.abs(ev))[::-1][:chains]
    if chains and big[-1] <= _form_floor(a):
        raise AmbiguityError(f"{what}: sign form is degenerate")
    order = np.argsort(-np.abs(ev))[:chains]
    # omega(A w, w) = -b for N1(1, b)
    pos_b = int(np.sum(ev[order] < 0))
    return pos_b, zero, chains - pos_b


def _elliptic_blocks(a: np.ndarray, cl: EigenCluster, conj_cluster: EigenCluster | None):
    """``(theta turns, alpha turns, beta turns)`` from one cluster in the upper half plane."""
    lam = cl.value
    phi = math.atan2(lam.imag, lam.real)
    if conj_cluster is not None:
        phi = 0.5 * (phi - math.atan2(conj_cluster.value.imag, conj_cluster.value.real))
    lam = complex(math.cos(phi), math.sin(phi))
    what = f"eigenvalue exp({phi:.6g} i)"
    nmat, gen, dk = _gen_space(a, lam, cl.radius, cl.multiplicity, what)
    n = a.shape[0] // 2
    j = standard_j(n)
    k = cl.multiplicity
    if dk == k:
        krein = -1j * gen.conj().T @ j @ gen
        krein = 0.5 * (krein + krein.conj().T)
        ev = np.linalg.eigvalsh(krein)
        if np.min(np.abs(ev)) <= 1e-9:
            raise AmbiguityError(f"{what}: Krein form is degenerate")
        pos = int(np.sum(ev > 0))
        return [phi] * pos + [2 * math.pi - phi] * (k - pos), [], []
    if 2 * dk == k:
        form = gen.conj().T @ (np.conj(lam) * j @ nmat) @ gen
        form = 0.5 * (form + form.conj().T)
        ev = np.linalg.eigvalsh(form)
        order = np.argsort(-np.abs(ev))[:dk]
        if np.min(np.abs(ev[order])) <= _form_floor(a):
            raise AmbiguityError(f"{what}: N2 sign form is degenerate")
        trivial = int(np.sum(ev[order] < 0))
        # N2(alpha) and N2(2 pi - alpha) are conjugate; report alpha in (0, pi)
        return [], [phi] * (dk - trivial), [phi] * trivial
    raise AmbiguityError(
        f"{what}: mixed Jordan structure (kernel {dk}, multiplicity {k})",
        candidates=["R blocks", "N2 blocks"],
    )


@dataclass(frozen=True)
class Decomposition:
    counts: NormalFormCounts
    spectrum: SpectralClassification

    def to_json(self) -> dict:
        out = {"n": self.counts.total}
        out.update(self.counts.to_json())
        out["spectrum"] = self.spectrum.to_json()
        return out


def decompose(m, tol: float = CLUSTER_TOL, require_characteristic: bool = True) -> Decomposition:
    """Normal-form counts and spectral data of ``m``.

    With ``require_characteristic`` the eigenvalue-1 part must be a single
    ``N1(1, 1)`` block (multiplicity 2, one-dimensional kernel).
    """
    a = _as_array(m)
    spec = classify_spectrum(a, tol)
    n = a.shape[0] // 2
    radius = {c.location: c.radius for c in spec.clusters if c.location in ("one", "minus_one")}
    one = spec.multiplicity_at("one")
    if one == 0:
        pm = pz = pp = 0
    else:
        pm, pz, pp = _unipotent_counts(a, one, radius["one"], "eigenvalue 1")
    if require_characteristic and (pm, pz, pp) != (1, 0, 0):
        raise NotACharacteristicError(
            f"eigenvalue-1 part is N1(1,1)^{pm} + I2^{pz} + N1(1,-1)^{pp}, not a single N1(1,1)"
        )
    minus = spec.multiplicity_at("minus_one")
    if minus:
        # N1(-1, b) becomes N1(1, -b) under M -> -M
        qp, qz, qm = _unipotent_counts(-a, minus, radius["minus_one"], "eigenvalue -1")
    else:
        qm = qz = qp = 0
    thetas, alphas, betas = [], [], []
    upper = [c for c in spec.clusters if c.location == "elliptic" and c.value.imag > 0]
    lower = [c for c in spec.clusters if c.location == "elliptic" and c.value.imag < 0]
    for cl in upper:
        partner = min(lower, key=lambda d: abs(d.value - cl.value.conjugate()), default=None)
        t, al, be = _elliptic_blocks(a, cl, partner)
        thetas += t
        alphas += al
        betas += be
    s, neg = 0, 0
    for cl in spec.clusters:
        if cl.location == "hyperbolic_real" and abs(cl.value) > 1:
            s += cl.multiplicity
            if cl.value.real < 0:
                neg += cl.multiplicity
        elif cl.location == "hyperbolic_quadruple" and abs(cl.value) > 1 and cl.value.imag > 0:
            s += 2 * cl.multiplicity
    counts = NormalFormCounts(
        p_minus=pm,
        p_zero=pz,
        p_plus=pp,
        q_minus=qm,
        q_zero=qz,
        q_plus=qp,
        r=len(thetas),
        r_star=len(alphas),
        r_zero=len(betas),
        s=s,
        hyperbolic_tail="D-2" if neg % 2 else "D2",
        theta_list=tuple(Angle.from_float(t) for t in sorted(thetas)),
        alpha_list=tuple(Angle.from_float(t) for t in sorted(alphas)),
        beta_list=tuple(Angle.from_float(t) for t in sorted(betas)),
    )
    if counts.total != n:
        raise InconsistencyError(f"recovered block budget {counts.total} does not match n = {n}")
    return Decomposition(counts, spec)


def extract_counts(m, tol: float = CLUSTER_TOL, require_characteristic: bool = True) -> NormalFormCounts:
    return decompose(m, tol, require_characteristic).counts


# ---------------------------------------------------------------------------
# random symplectic conjugators

def _sym(rng: np.random.Generator, n: int, scale: float) -> np.ndarray:
    s = rng.normal(scale=scale, size=(n, n))
    return 0.5 * (s + s.T)


def random_symplectic(rng: np.random.Generator, n: int, max_cond: float = 1e3, factors: int = 4) -> np.ndarray:
    """Random symplectic matrix with 2-norm condition number at most ``max_cond``.

    Product of upper/lower shears ``[[I, S], [0, I]]``, unitary rotations
    ``[[Re U, -Im U], [Im U, Re U]]`` and stretches ``diag(A, A^{-T})``;
    every factor is symplectic in exact arithmetic.
    """
    eye, zero = np.eye(n), np.zeros((n, n))
    while True:
        p = np.eye(2 * n)
        for _ in range(factors):
            kind = rng.integers(4)
            if kind == 0:
                f = np.block([[eye, _sym(rng, n, 0.7)], [zero, eye]])
            elif kind == 1:
                f = np.block([[eye, zero], [_sym(rng, n, 0.7), eye]])
            elif kind == 2:
                z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
                u, _ = np.linalg.qr(z)
                f = np.block([[u.real, -u.imag], [u.imag, u.real]])
            else:
                a = eye + rng.normal(scale=0.3, size=(n, n))
                if abs(np.linalg.det(a)) < 0.1:
                    continue
                f = np.block([[a, zero], [zero, np.linalg.inv(a).T]])
            p = p @ f
        if np.linalg.cond(p) <= max_cond:
            return p


def conjugate(m, p: np.ndarray) -> np.ndarray:
    """``P^{-1} M P``."""
    a = np.asarray(m.entries if isinstance(m, SymplecticMatrix) else m, dtype=float)
    return np.linalg.solve(p, a @ p)


__all__ = [
    "Decomposition",
    "EigenCluster",
    "SpectralClassification",
    "classify_spectrum",
    "conjugate",
    "decompose",
    "extract_counts",
    "random_symplectic",
    "triviality_sign",
]
