"""Random seeds for property tests, oracle cross-checks and the CLI."""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from .angles import Angle, SurdSum
from .forms import IndexSeed, NormalFormCounts

SQUAREFREE = (2, 3, 5, 6, 7, 10, 11, 13, 14, 15, 17, 19)
BLOCK_KINDS = ("p_minus", "p_zero", "p_plus", "q_minus", "q_zero", "q_plus", "r", "r_star", "r_zero", "s")
_WIDTH = {"r_star": 2, "r_zero": 2}


def _far_from_resonance(x: float, m_guard: int, gap: float, edge: float) -> bool:
    # edge keeps the angle away from 0 and pi, where N2 blocks are ill-conditioned
    if min(x, abs(x - 0.5), 1 - x) < edge:
        return False
    ms = np.arange(1, m_guard + 1)
    y = ms * x
    return bool(np.min(np.abs(y - np.rint(y))) >= gap)


def random_angle(
    rng: np.random.Generator,
    kind: str = "surd",
    m_guard: int = 60,
    gap: float = 1e-3,
    max_den: int = 12,
    edge: float = 0.02,
) -> Angle:
    """A random angle in ``(0, 2 pi)`` other than ``pi``.

    ``surd`` angles are ``2 pi frac(a sqrt(d))`` with small rational ``a``;
    ``surd`` and ``float`` angles keep ``m x`` at least ``gap`` away from
    the integers for ``m <= m_guard`` and the turn at least ``edge`` from
    ``0``, ``1/2`` and ``1``.  ``rational`` angles use ``q <= max_den``.
    """
    if kind == "rational":
        while True:
            q = int(rng.integers(3, max_den + 1))
            p = int(rng.integers(1, q))
            if math.gcd(p, q) == 1:
                return Angle.rational(p, q)
    while True:
        if kind == "surd":
            a = Fraction(int(rng.integers(1, 40)), int(rng.integers(1, 12)))
            d = int(rng.choice(SQUAREFREE))
            raw = SurdSum.sqrt(d) * a
            turn = raw - raw.floor()
            if _far_from_resonance(float(turn), m_guard, gap, edge):
                return Angle.surd(turn)
        elif kind == "float":
            x = float(rng.uniform(0.01, 0.99))
            if _far_from_resonance(x, m_guard, gap, edge):
                return Angle.from_float(2 * math.pi * x)
        else:
            raise ValueError(f"unknown angle kind {kind!r}")


def random_counts(
    rng: np.random.Generator,
    n: int,
    characteristic: bool = False,
    kinds: tuple = BLOCK_KINDS,
    angle_kinds: tuple = ("surd", "rational", "float"),
    m_guard: int = 60,
    separation: float = 0.005,
    jordan_gap: float = 0.01,
) -> NormalFormCounts:
    """Random block multiset with budget ``n``.

    With ``characteristic`` the eigenvalue-1 part is exactly one ``N1(1,1)``.
    Angles of different blocks keep their eigenvalues ``separation`` turns
    apart (conjugates included), so no two blocks share a multiplier.
    Irrational ``N2`` angles use the wider resonance gap ``jordan_gap``: for
    a Jordan pair the smallest singular value of ``M^m - I`` shrinks with the
    square of the distance to resonance.
    """
    vals = dict.fromkeys(BLOCK_KINDS, 0)
    left = n
    if characteristic:
        vals["p_minus"] = 1
        left -= 1
        kinds = tuple(k for k in kinds if not k.startswith("p_"))
    while left > 0:
        options = [k for k in kinds if _WIDTH.get(k, 1) <= left]
        k = options[int(rng.integers(len(options)))]
        vals[k] += 1
        left -= _WIDTH.get(k, 1)

    used: list[float] = []

    def fresh(gap: float = 1e-3) -> Angle:
        while True:
            a = random_angle(rng, angle_kinds[int(rng.integers(len(angle_kinds)))], m_guard=m_guard, gap=gap)
            x = float(a.turn)
            if all(min(abs(x - y), abs(x + y - 1)) >= separation for y in used):
                used.append(x)
                return a

    def angles(count, gap=1e-3):
        return tuple(fresh(gap) for _ in range(count))

    return NormalFormCounts(
        **vals,
        hyperbolic_tail="D-2" if vals["s"] and rng.integers(2) else "D2",
        theta_list=angles(vals["r"]),
        alpha_list=angles(vals["r_star"], jordan_gap),
        beta_list=angles(vals["r_zero"], jordan_gap),
    )


def odd_block_count(counts: NormalFormCounts) -> int:
    """Number of blocks whose one-block paths have odd index, including a ``D(-2)`` tail."""
    c = counts
    odd = c.p_minus + c.p_zero + c.q_minus + c.q_zero + c.q_plus + c.r
    return odd + (1 if c.s and c.hyperbolic_tail == "D-2" else 0)


def random_seed(
    rng: np.random.Generator,
    n: int | None = None,
    n_range: tuple = (1, 5),
    i_range: tuple = (-8, 8),
    characteristic: bool = False,
    angle_kinds: tuple = ("surd", "rational", "float"),
    m_guard: int = 60,
    label: str = "",
) -> IndexSeed:
    """Random seed whose ``i1`` is reachable by the explicit block paths.

    ``i1`` is drawn from ``i_range`` with the parity fixed by the blocks
    (the hyperbolic tail included), so every seed can be realized as a path.
    """
    if n is None:
        n = int(rng.integers(n_range[0], n_range[1] + 1))
    counts = random_counts(rng, n, characteristic=characteristic, angle_kinds=angle_kinds, m_guard=m_guard)
    parity = odd_block_count(counts) % 2
    lo, hi = i_range
    i1 = int(rng.integers(lo, hi + 1))
    if (i1 - parity) % 2:
        i1 += 1 if i1 < hi else -1
    return IndexSeed(n, i1, counts, label=label)


__all__ = ["BLOCK_KINDS", "odd_block_count", "random_angle", "random_counts", "random_seed"]
