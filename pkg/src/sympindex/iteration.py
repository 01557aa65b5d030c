"""Long's index iteration formulae and the Viterbo/Maslov dictionary."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .angles import Angle, SurdSum, int_parts
from .errors import DomainError, InconsistencyError
from .forms import IndexSeed, block_parity

__all__ = [
    "CharacteristicRecord",
    "IterationResult",
    "block_parity",
    "grading_offset",
    "int_parts",
    "is_good_iterate",
    "iterate_index",
    "iterate_index_array",
    "iterate_nullity",
    "iterate_nullity_array",
    "iteration_table",
    "maslov_from_viterbo",
    "mean_index",
    "mean_index_exact",
    "viterbo_from_maslov",
]


def _even(m: int) -> int:
    """``(1 + (-1)^m) / 2``."""
    return 1 if m % 2 == 0 else 0


def _check_m(m) -> int:
    if isinstance(m, bool) or not isinstance(m, (int, np.integer)) or m < 1:
        raise DomainError(f"iterate number must be a positive integer, got {m!r}")
    return int(m)


def iterate_index(seed: IndexSeed, m: int) -> int:
    """Maslov-type index ``i(gamma, m)`` of the m-th iterate.

    i(gamma, m) = m (i1 + p- + p0 - r) + 2 sum_j E(m theta_j / 2pi) - r - p- - p0
                  - (1 + (-1)^m)/2 (q0 + q+) + 2 (sum_j phi(m alpha_j / 2pi) - r*)
    """
    m = _check_m(m)
    c = seed.counts
    total = m * (seed.i1 + c.p_minus + c.p_zero - c.r) - c.r - c.p_minus - c.p_zero
    total += 2 * sum(a.parts(m)[2] for a in c.theta_list)
    total -= _even(m) * (c.q_zero + c.q_plus)
    total += 2 * (sum(a.parts(m)[3] for a in c.alpha_list) - c.r_star)
    return total


def iterate_nullity(seed: IndexSeed, m: int) -> int:
    """Nullity ``nu(gamma, m)``."""
    m = _check_m(m)
    c = seed.counts
    phis = sum(a.parts(m)[3] for a in (*c.theta_list, *c.alpha_list, *c.beta_list))
    return (
        c.nullity_one
        + _even(m) * (c.q_minus + 2 * c.q_zero + c.q_plus)
        + 2 * (c.r + c.r_star + c.r_zero)
        - 2 * phis
    )


def _ceil_array(angle: Angle, m_max: int) -> np.ndarray:
    floors = angle.floor_multiples(m_max)
    return floors + (~angle.resonance_multiples(m_max)).astype(np.int64)


def _phi_array(angle: Angle, m_max: int) -> np.ndarray:
    return (~angle.resonance_multiples(m_max)).astype(np.int64)


def iterate_index_array(seed: IndexSeed, m_max: int) -> np.ndarray:
    """``i(gamma, m)`` for ``m = 1..m_max`` (vectorized, same formula)."""
    c = seed.counts
    ms = np.arange(1, m_max + 1, dtype=np.int64)
    out = ms * (seed.i1 + c.p_minus + c.p_zero - c.r) - c.r - c.p_minus - c.p_zero
    for a in c.theta_list:
        out += 2 * _ceil_array(a, m_max)
    out -= ((ms + 1) % 2) * (c.q_zero + c.q_plus)
    for a in c.alpha_list:
        out += 2 * (_phi_array(a, m_max) - 1)
    return out


def iterate_nullity_array(seed: IndexSeed, m_max: int) -> np.ndarray:
    c = seed.counts
    ms = np.arange(1, m_max + 1, dtype=np.int64)
    out = np.full(m_max, c.nullity_one + 2 * (c.r + c.r_star + c.r_zero), dtype=np.int64)
    out += ((ms + 1) % 2) * (c.q_minus + 2 * c.q_zero + c.q_plus)
    for a in (*c.theta_list, *c.alpha_list, *c.beta_list):
        out -= 2 * _phi_array(a, m_max)
    return out


def mean_index_exact(seed: IndexSeed):
    """``i1 + p- + p0 - r + sum_j theta_j / pi`` as an exact number.

    Returns a ``SurdSum`` when all rotation angles are exact, else a float.
    """
    c = seed.counts
    base = seed.i1 + c.p_minus + c.p_zero - c.r
    if all(a.is_exact() for a in c.theta_list):
        total = SurdSum.rational(base)
        for a in c.theta_list:
            # theta / pi = 2 * turn
            total = total + (a.turn * 2 if isinstance(a.turn, SurdSum) else SurdSum.rational(2 * a.turn))
        return total
    return base + sum(2 * float(a.turn) for a in c.theta_list)


def mean_index(seed: IndexSeed) -> float:
    """Mean index, as a float."""
    return float(mean_index_exact(seed))


def viterbo_from_maslov(i_maslov: int, n: int) -> int:
    """``i(y^m) = i(y, m) - n``."""
    return int(i_maslov) - int(n)


def maslov_from_viterbo(i_viterbo: int, n: int) -> int:
    return int(i_viterbo) + int(n)


def is_good_iterate(seed: IndexSeed, m: int) -> bool:
    """An iterate is good when its Maslov-type index has the parity of ``i1``."""
    return (iterate_index(seed, m) - seed.i1) % 2 == 0


def grading_offset(K: float, T: float, n: int) -> int:
    """``d(K) = 2n([KT / 2 pi] + 1)``; ``KT`` must avoid ``2 pi Z``."""
    if T <= 0:
        raise DomainError("T must be positive")
    x = float(K) * float(T) / (2 * math.pi)
    if abs(x - round(x)) <= 1e-12 * max(1.0, abs(x)):
        raise DomainError(f"KT = {float(K) * float(T)} lies on 2 pi Z")
    return 2 * int(n) * (math.floor(x) + 1)


def grading_offset_turns(kt_over_2pi, n: int) -> int:
    """``d(K)`` given the exact ratio ``KT / 2 pi``."""
    floor, _, _, phi = int_parts(kt_over_2pi)
    if phi == 0:
        raise DomainError(f"KT/2pi = {kt_over_2pi} is an integer")
    return 2 * int(n) * (floor + 1)


@dataclass(frozen=True)
class IterationResult:
    m: int
    maslov_index: int
    nullity: int
    viterbo_index: int
    good: bool

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "i_maslov": self.maslov_index,
            "nullity": self.nullity,
            "i_viterbo": self.viterbo_index,
            "good": self.good,
        }


def iteration_table(seed: IndexSeed, m_max: int) -> list[IterationResult]:
    rows = []
    for m in range(1, m_max + 1):
        i = iterate_index(seed, m)
        rows.append(
            IterationResult(
                m=m,
                maslov_index=i,
                nullity=iterate_nullity(seed, m),
                viterbo_index=viterbo_from_maslov(i, seed.n),
                good=(i - seed.i1) % 2 == 0,
            )
        )
    return rows


@dataclass(frozen=True)
class CharacteristicRecord:
    """A prime closed characteristic: period and index data of its return map."""

    label: str
    tau: float
    seed: IndexSeed
    mean_index: float = field(init=False)

    def __post_init__(self):
        if not (self.tau > 0 and math.isfinite(self.tau)):
            raise DomainError(f"period tau must be positive, got {self.tau}")
        if self.seed.counts.p_minus < 1:
            raise InconsistencyError("a closed characteristic's normal form contains N1(1,1)")
        object.__setattr__(self, "mean_index", mean_index(self.seed))

    @property
    def i_viterbo(self) -> int:
        return viterbo_from_maslov(self.seed.i1, self.seed.n)

    def iterations(self, m_max: int) -> list[IterationResult]:
        return iteration_table(self.seed, m_max)

    def good_iterates(self, m_max: int) -> list[int]:
        return [row.m for row in self.iterations(m_max) if row.good]
