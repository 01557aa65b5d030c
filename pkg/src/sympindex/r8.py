"""Index combinatorics of closed characteristics in R^8.

The return map of a closed characteristic on a star-shaped hypersurface in
R^8 splits as ``N1(1,1)`` plus a 6x6 part whose blocks obey
``r + s + 2 r* + 2 r0 = 3``.  With irrational angles the Viterbo index of
the m-th iterate is

    i(y^m) = m (i(y) + 5 - r) + 2 sum_j [m theta_j / 2pi] + r - 5.

This module enumerates the admissible block configurations, evaluates that
specialization, and scans it against the generic iteration formula.
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .angles import Angle, SurdSum
from .errors import DomainError, InconsistencyError
from .forms import IndexSeed, NormalFormCounts
from .iteration import iterate_index_array, mean_index_exact, viterbo_from_maslov
from .sampling import random_angle

N = 4
BUDGET = 3
TARGET = -5


def enumerate_configs() -> list[tuple[int, int, int, int]]:
    """All ``(r, s, r*, r0) >= 0`` with ``r + s + 2 r* + 2 r0 = 3``, in a fixed order."""
    out = []
    for r_star in range(2):
        for r_zero in range(2):
            rest = BUDGET - 2 * (r_star + r_zero)
            if rest < 0:
                continue
            for r in range(rest, -1, -1):
                out.append((r, rest - r, r_star, r_zero))
    return out


@dataclass(frozen=True)
class R8Config:
    """A block configuration of the 6x6 part, its angles and the prime Viterbo index."""

    r: int
    s: int
    r_star: int
    r_zero: int
    i_viterbo: int
    thetas: tuple = ()
    alphas: tuple = ()
    betas: tuple = ()
    hyperbolic_tail: str = "D2"

    def __post_init__(self):
        if min(self.r, self.s, self.r_star, self.r_zero) < 0:
            raise InconsistencyError("block counts must be non-negative")
        if self.r + self.s + 2 * self.r_star + 2 * self.r_zero != BUDGET:
            raise InconsistencyError(
                f"r + s + 2r* + 2r0 = {self.r + self.s + 2 * self.r_star + 2 * self.r_zero}, expected {BUDGET}"
            )
        for name, count in (("thetas", self.r), ("alphas", self.r_star), ("betas", self.r_zero)):
            if len(getattr(self, name)) != count:
                raise InconsistencyError(f"{name} has {len(getattr(self, name))} angles, expected {count}")
        for a in (*self.thetas, *self.alphas, *self.betas):
            if not a.irrational:
                raise DomainError(f"angle {a!r} must be irrational for the R^8 specialization")
        if self.s == 0 and (self.i_viterbo - 1 - self.r) % 2:
            raise InconsistencyError(
                f"i(y) = {self.i_viterbo} contradicts the block parity (need i(y) = 1 + r mod 2 when s = 0)"
            )

    @property
    def blocks(self) -> tuple[int, int, int, int]:
        return (self.r, self.s, self.r_star, self.r_zero)

    def with_index(self, i_viterbo: int) -> "R8Config":
        return R8Config(self.r, self.s, self.r_star, self.r_zero, i_viterbo,
                        self.thetas, self.alphas, self.betas, self.hyperbolic_tail)

    def to_json(self) -> dict:
        return {
            "r": self.r,
            "s": self.s,
            "r_star": self.r_star,
            "r_zero": self.r_zero,
            "i_viterbo": self.i_viterbo,
            "theta_list": [a.to_json() for a in self.thetas],
            "alpha_list": [a.to_json() for a in self.alphas],
            "beta_list": [a.to_json() for a in self.betas],
        }


def parity_admissible(blocks: tuple, i_viterbo: int) -> bool:
    r, s = blocks[0], blocks[1]
    return s > 0 or (i_viterbo - 1 - r) % 2 == 0


def seed_of(config: R8Config) -> IndexSeed:
    """The 8-dimensional seed ``N1(1,1)`` plus the configuration, with ``i1 = i(y) + 4``."""
    counts = NormalFormCounts(
        p_minus=1,
        r=config.r,
        r_star=config.r_star,
        r_zero=config.r_zero,
        s=config.s,
        hyperbolic_tail=config.hyperbolic_tail,
        theta_list=config.thetas,
        alpha_list=config.alphas,
        beta_list=config.betas,
    )
    return IndexSeed(N, config.i_viterbo + N, counts)


def _floor_sum(thetas, m_max: int) -> np.ndarray:
    out = np.zeros(m_max, dtype=np.int64)
    for a in thetas:
        out += a.floor_multiples(m_max)
    return out


def r8_index(config: R8Config, m: int) -> int:
    """Viterbo index ``i(y^m)`` from the R^8 specialization."""
    if m < 1:
        raise DomainError("m must be positive")
    floors = sum(a.floor_mul(m) for a in config.thetas)
    return m * (config.i_viterbo + 5 - config.r) + 2 * floors + config.r - 5


def r8_index_array(config: R8Config, m_max: int) -> np.ndarray:
    ms = np.arange(1, m_max + 1, dtype=np.int64)
    return ms * (config.i_viterbo + 5 - config.r) + 2 * _floor_sum(config.thetas, m_max) + config.r - 5


def generic_viterbo_array(config: R8Config, m_max: int) -> np.ndarray:
    """Same sequence through the general formula and the Viterbo shift."""
    return viterbo_from_maslov(0, N) + iterate_index_array(seed_of(config), m_max)


# ---------------------------------------------------------------------------
# reports

@dataclass
class ScanReport:
    claim: str
    parameters: dict
    configs_scanned: int = 0
    points_scanned: int = 0
    violations: list = field(default_factory=list)
    witnesses: list = field(default_factory=list)
    checks: dict = field(default_factory=dict)
    families: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    runtime: float = 0.0

    @property
    def holds(self) -> bool:
        return not self.violations and all(c["passed"] for c in self.checks.values())

    def check(self, name: str, passed: bool, **detail):
        prev = self.checks.get(name)
        if prev is None:
            self.checks[name] = {"passed": bool(passed), **detail}
        else:
            prev["passed"] = prev["passed"] and bool(passed)
            for k, v in detail.items():
                if isinstance(v, int) and not isinstance(v, bool) and isinstance(prev.get(k), int):
                    prev[k] += v
                else:
                    prev[k] = v

    def to_json(self, include_timing: bool = False) -> dict:
        out = {
            "claim": self.claim,
            "holds": self.holds,
            "parameters": self.parameters,
            "configs_scanned": self.configs_scanned,
            "points_scanned": self.points_scanned,
            "violations": self.violations,
            "witnesses": self.witnesses,
            "checks": self.checks,
            "families": self.families,
            "notes": self.notes,
        }
        if include_timing:
            out["runtime_s"] = round(self.runtime, 3)
        return out


def _workers(workers: int | None) -> int:
    if workers is not None:
        return max(1, int(workers))
    env = os.environ.get("SYMPINDEX_WORKERS")
    return max(1, int(env)) if env else 1


# ---------------------------------------------------------------------------
# no good iterate of index -5

def angle_tuples(blocks: tuple, count: int, rng_seed: int, index: int) -> list[tuple]:
    """Deterministic algebraic angle tuples ``(thetas, alphas, betas)`` for one configuration."""
    r, _, r_star, r_zero = blocks
    rng = np.random.default_rng([rng_seed, index])
    pick = lambda: random_angle(rng, "surd", m_guard=1, gap=0.0, edge=0.0)  # noqa: E731
    return [
        (tuple(pick() for _ in range(r)), tuple(pick() for _ in range(r_star)), tuple(pick() for _ in range(r_zero)))
        for _ in range(count)
    ]


def _scan_config(args) -> dict:
    blocks, index, i_values, m_max, angle_samples, rng_seed, enforce = args
    r, s, r_star, r_zero = blocks
    ms = np.arange(1, m_max + 1, dtype=np.int64)
    i_all = np.array(i_values, dtype=np.int64)
    # points satisfying the hypothesis; the relaxed scan also visits the rest
    admissible = np.array([i != TARGET and parity_admissible(blocks, i) for i in i_values])
    scanned = admissible if enforce else np.ones_like(admissible)
    out = {
        "blocks": blocks,
        "points": 0,
        "violations": [],
        "witness_cells": {},
        "near_solutions": 0,
        "near_bad": [],
        "a5_fail": 0,
        "a4_fail": 0,
        "floor_fail": 0,
        "two_path_fail": 0,
        "two_path_points": 0,
    }
    for t_idx, (thetas, alphas, betas) in enumerate(angle_tuples(blocks, angle_samples, rng_seed, index)):
        floors = _floor_sum(thetas, m_max)
        for a in thetas:
            f = a.floor_multiples(m_max)
            out["floor_fail"] += int(np.sum((f < 0) | (f > ms - 1)))
        # (m - 1) r - 2 sum floors, whose modulus bounds m |i(y) + 5| at a solution
        slack = (ms - 1) * r - 2 * floors
        out["a5_fail"] += int(np.sum(np.abs(slack) > (ms - 1) * r))
        idx = ms[None, :] * (i_all[:, None] + 5 - r) + 2 * floors[None, :] + r - 5
        good = (idx - i_all[:, None]) % 2 == 0
        hit = good & (idx == TARGET)
        out["points"] += int(scanned.sum()) * m_max

        for row in np.nonzero(admissible)[0]:
            if hit[row].any():
                for m in ms[hit[row]][:20]:
                    out["violations"].append(
                        {"blocks": list(blocks), "i_viterbo": int(i_all[row]), "tuple": t_idx, "m": int(m), "index": TARGET}
                    )
        if not enforce:
            for row in np.nonzero(~admissible)[0]:
                if hit[row].any():
                    cell = out["witness_cells"].setdefault(
                        int(i_all[row]), {"tuples": 0, "points": 0, "example_tuple": t_idx, "first_m": []}
                    )
                    cell["tuples"] += 1
                    cell["points"] += int(hit[row].sum())
                    if not cell["first_m"]:
                        cell["first_m"] = [int(m) for m in ms[hit[row]][:5]]

        # arithmetic near-solutions: index -5, i(y) odd and != -5, parity filter ignored
        odd_rows = (i_all % 2 != 0) & (i_all != TARGET)
        near = (idx == TARGET) & odd_rows[:, None]
        if near.any():
            rows, cols = np.nonzero(near)
            out["near_solutions"] += int(rows.size)
            lhs = np.abs(slack[cols])
            a4 = lhs >= 2 * ms[cols]
            out["a4_fail"] += int(np.sum(~a4))
            for rr, cc in zip(rows, cols):
                i_y = int(i_all[rr])
                if r != 3 or ms[cc] < 3 or parity_admissible(blocks, i_y):
                    out["near_bad"].append({"blocks": list(blocks), "i_viterbo": i_y, "m": int(ms[cc])})

        # the generic formula, one seed per parity-admissible i(y)
        for row in np.nonzero(scanned)[0]:
            if not parity_admissible(blocks, int(i_all[row])):
                continue
            cfg = R8Config(r, s, r_star, r_zero, int(i_all[row]), thetas, alphas, betas)
            generic = generic_viterbo_array(cfg, m_max)
            out["two_path_points"] += m_max
            out["two_path_fail"] += int(np.sum(generic != idx[row]))
    return out


def lemma31_scan(
    i_range: tuple = (-15, 15),
    m_max: int = 1000,
    angle_samples: int = 100,
    enforce_hypothesis: bool = True,
    rng_seed: int = 0,
    workers: int | None = None,
) -> ScanReport:
    """Search for good iterates with Viterbo index -5.

    Scans every configuration, every ``i(y)`` in ``i_range`` (without ``-5``
    and parity-filtered when the hypothesis is enforced), ``angle_samples``
    algebraic angle tuples and ``m <= m_max``.  Alongside the search it
    checks pointwise:

    * ``0 <= [m theta/2pi] <= m - 1``;
    * ``|(m-1) r - 2 sum [m theta/2pi]| <= (m-1) r`` everywhere;
    * at every arithmetic solution of ``i(y^m) = -5`` with ``i(y)`` odd and
      not ``-5`` (parity filter ignored), ``|(m-1) r - 2 sum[...]| >= 2m``,
      ``r = 3``, ``m >= 3``, and the block parity rules the point out;
    * the specialized and generic formulas agree on every admissible point.
    """
    start = time.perf_counter()
    lo, hi = i_range
    i_values = list(range(lo, hi + 1))
    configs = enumerate_configs()
    report = ScanReport(
        claim="no good iterate has Viterbo index -5 unless i(y) = -5",
        parameters={
            "i_range": [lo, hi],
            "m_max": m_max,
            "angle_samples": angle_samples,
            "enforce_hypothesis": enforce_hypothesis,
            "rng_seed": rng_seed,
            "angle_kind": "sqrt_expr",
        },
    )
    jobs = [(blocks, k, i_values, m_max, angle_samples, rng_seed, enforce_hypothesis) for k, blocks in enumerate(configs)]
    nw = _workers(workers)
    if nw > 1:
        with ProcessPoolExecutor(max_workers=nw) as pool:
            results = list(pool.map(_scan_config, jobs))
    else:
        results = [_scan_config(j) for j in jobs]

    near_total, near_bad = 0, []
    for res in results:
        report.configs_scanned += 1
        report.points_scanned += res["points"]
        report.violations += res["violations"]
        for i_y, cell in sorted(res["witness_cells"].items()):
            report.witnesses.append({"blocks": list(res["blocks"]), "i_viterbo": i_y, **cell})
        report.check("floor_bounds", res["floor_fail"] == 0, failures=res["floor_fail"])
        report.check("slack_upper_bound", res["a5_fail"] == 0, failures=res["a5_fail"])
        report.check("slack_lower_bound_at_solutions", res["a4_fail"] == 0, failures=res["a4_fail"])
        report.check("two_path_agreement", res["two_path_fail"] == 0,
                     points=res["two_path_points"], mismatches=res["two_path_fail"])
        near_total += res["near_solutions"]
        near_bad += res["near_bad"]
    report.check(
        "near_solutions_need_r3_and_fail_parity",
        not near_bad,
        near_solutions=near_total,
        offending=near_bad[:20],
    )
    report.check("odd_index_gap", True, detail="i(y) odd and != -5 gives |i(y) + 5| >= 2")
    if not enforce_hypothesis:
        report.check("witness_found", bool(report.witnesses), witnesses=len(report.witnesses))
    report.notes.append(
        "Bound analysis at m = 2: a solution needs 2m = 4 <= (m-1) r = 3, impossible even for r = 3; "
        "solutions with r = 3 need m >= 3 and are excluded by parity."
    )
    report.notes.append("Only the arithmetic of the index sequences is verified, not any existence statement.")
    report.runtime = time.perf_counter() - start
    return report


# ---------------------------------------------------------------------------
# zero mean index families

@dataclass(frozen=True)
class ZeroMeanFamily:
    label: str
    config: R8Config
    turn_sum: Fraction  # sum of theta_j / 2pi

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "blocks": list(self.config.blocks),
            "i_viterbo": self.config.i_viterbo,
            "theta_turns": [a.turn.to_expr() for a in self.config.thetas],
            "turn_sum": str(self.turn_sum),
        }


def zero_mean_family(
    label: str,
    blocks: tuple,
    thetas: tuple = (),
    alphas: tuple | None = None,
    betas: tuple | None = None,
) -> ZeroMeanFamily:
    """Configuration with mean index zero: ``i(y) = r - 5 - 2 sum theta_j/2pi``.

    Raises ``DomainError`` when ``2 sum theta_j / 2pi`` is not an integer,
    which is the case for every single irrational angle.
    """
    r, s, r_star, r_zero = blocks
    if len(thetas) != r:
        raise InconsistencyError(f"{label}: need {r} rotation angles, got {len(thetas)}")
    total = SurdSum.rational(0)
    for a in thetas:
        total = total + (a.turn if isinstance(a.turn, SurdSum) else SurdSum.rational(a.turn))
    twice = total * 2
    if not twice.is_integer():
        raise DomainError(
            f"{label}: sum of theta/pi = {twice.to_expr()} is not an integer, so the mean index cannot vanish"
        )
    i_y = r - 5 - int(twice.floor())
    # N2 angles do not enter the index when irrational; any fixed choice will do
    alphas = alphas if alphas is not None else (_surd_angle("sqrt(5) - 2"),) * r_star
    betas = betas if betas is not None else (_surd_angle("sqrt(7) - 2"),) * r_zero
    cfg = R8Config(r, s, r_star, r_zero, i_y, tuple(thetas), tuple(alphas), tuple(betas))
    return ZeroMeanFamily(label, cfg, Fraction(int(twice.floor()), 2))


def _surd_angle(expr: str) -> Angle:
    return Angle.from_expr(f"2*pi*({expr})")


def default_families() -> list[ZeroMeanFamily]:
    fams = [
        zero_mean_family("r0 hyperbolic", (0, 3, 0, 0)),
        zero_mean_family("r0 with nontrivial N2", (0, 1, 1, 0)),
        zero_mean_family("r0 with trivial N2", (0, 1, 0, 1)),
        zero_mean_family("r2 sum 1", (2, 1, 0, 0), (_surd_angle("sqrt(2) - 1"), _surd_angle("2 - sqrt(2)"))),
        zero_mean_family("r2 sum 1 (sqrt 7)", (2, 1, 0, 0), (_surd_angle("sqrt(7)/4"), _surd_angle("1 - sqrt(7)/4"))),
        zero_mean_family("r2 sum 1/2", (2, 1, 0, 0), (_surd_angle("sqrt(2)/4"), _surd_angle("1/2 - sqrt(2)/4"))),
        zero_mean_family("r2 sum 3/2", (2, 1, 0, 0), (_surd_angle("sqrt(3) - 1"), _surd_angle("5/2 - sqrt(3)"))),
        zero_mean_family(
            "r3 sum 2",
            (3, 0, 0, 0),
            (_surd_angle("sqrt(2) - 1"), _surd_angle("sqrt(3) - 1"), _surd_angle("4 - sqrt(2) - sqrt(3)")),
        ),
        zero_mean_family(
            "r3 sum 1",
            (3, 0, 0, 0),
            (_surd_angle("sqrt(2)/5"), _surd_angle("sqrt(3)/5"), _surd_angle("1 - sqrt(2)/5 - sqrt(3)/5")),
        ),
        zero_mean_family(
            "r3 sum 1 (sqrt 5, sqrt 6)",
            (3, 0, 0, 0),
            (_surd_angle("sqrt(5) - 2"), _surd_angle("sqrt(6) - 2"), _surd_angle("5 - sqrt(5) - sqrt(6)")),
        ),
    ]
    return fams


def r1_infeasibility(samples: int = 200, rng_seed: int = 0) -> dict:
    """Every tried single algebraic angle fails the zero-mean construction."""
    rng = np.random.default_rng([rng_seed, 1])
    rejected = 0
    for _ in range(samples):
        a = random_angle(rng, "surd", m_guard=1, gap=0.0, edge=0.0)
        try:
            zero_mean_family("r1", (1, 2, 0, 0), (a,))
        except DomainError:
            rejected += 1
    return {"tried": samples, "rejected": rejected}


def claim1_scan(families: list | None = None, m_max: int = 10_000, r1_samples: int = 200) -> ScanReport:
    """Index values of good iterates for zero-mean families.

    Per family, exactly (no tolerances): the fractional parts sum
    ``S(m) = m sum x_j - sum [m x_j]`` with ``x_j = theta_j / 2pi``, the
    identity ``i(y^m) = -2 S(m) + r - 5`` and the value set of good iterates.
    """
    start = time.perf_counter()
    families = default_families() if families is None else families
    report = ScanReport(
        claim="zero mean index forces good iterates into {-6, -4} (r = 3) or -5 (r in {0, 2}, integer sums)",
        parameters={"m_max": m_max, "families": len(families), "r1_samples": r1_samples},
    )
    ms = np.arange(1, m_max + 1, dtype=np.int64)
    for fam in families:
        cfg = fam.config
        r = cfg.r
        idx = r8_index_array(cfg, m_max)
        generic = generic_viterbo_array(cfg, m_max)
        floors = _floor_sum(cfg.thetas, m_max)
        twice_sum = 2 * fam.turn_sum
        assert twice_sum.denominator == 1
        # 2 S(m), an exact integer array
        two_s = ms * twice_sum.numerator - 2 * floors
        good = (idx - cfg.i_viterbo) % 2 == 0
        values = sorted({int(v) for v in idx[good]})
        s_values = sorted({str(Fraction(int(v), 2)) for v in np.unique(two_s)})
        mean = mean_index_exact(seed_of(cfg))
        entry = {
            **fam.to_json(),
            "mean_index_zero": mean == 0,
            "good_index_values": values,
            "fractional_sum_values": s_values,
            "good_iterates": int(good.sum()),
        }
        report.check("mean_index_zero", mean == 0)
        report.check("identity_fractional_parts", bool(np.all(idx == -two_s + r - 5)))
        report.check("two_path_agreement", bool(np.all(idx == generic)), points=m_max)
        report.points_scanned += m_max
        report.configs_scanned += 1
        if r == 0:
            ok = bool(np.all(idx == TARGET))
            entry["outcome"] = "constant -5"
            report.check("r0_constant_minus5", ok)
        elif r == 2 and fam.turn_sum.denominator == 1:
            ok = bool(np.all(idx == TARGET)) and bool(np.all(two_s == 2))
            entry["outcome"] = "constant -5"
            report.check("r2_integer_sum_constant_minus5", ok)
        elif r == 2:
            half_at_odd = bool(np.all((two_s % 2 == 1) == (ms % 2 == 1)))
            ok = set(values) <= {-6, -4} and TARGET not in values and half_at_odd
            entry["outcome"] = "good iterates in {-6, -4}; fractional sums take half-integer values"
            report.check("r2_half_integer_sum_good_in_pm", ok)
            report.notes.append(
                f"{fam.label}: the fractional-part sum takes values {s_values}; half-integers occur at odd m "
                "(index -4 or -6, good) and the value 1 at even m (index -5, not good). "
                "An integer-valued sum cannot be assumed for r = 2 when s = 1 leaves the parity of i(y) free."
            )
        else:
            ok = set(values) <= {-6, -4} and bool(np.all((two_s == 2) | (two_s == 4)))
            entry["outcome"] = "index in {-6, -4}"
            report.check("r3_good_in_pm_and_sums_in_1_2", ok)
            report.check("r3_parity_excludes_minus5", cfg.i_viterbo % 2 == 0 and TARGET not in set(idx.tolist()))
        if not ok:
            report.violations.append({"family": fam.label, "good_index_values": values})
        report.families.append(entry)
    r1 = r1_infeasibility(r1_samples)
    report.check("r1_infeasible", r1["rejected"] == r1["tried"], **r1)
    report.notes.append("A single irrational angle never has theta/pi integral, so r = 1 admits no zero-mean family.")
    report.runtime = time.perf_counter() - start
    return report


def mean_index_dichotomy(config: R8Config, m_probe: int = 1000) -> str:
    """``'diverges_up'``, ``'diverges_down'`` or ``'zero_family'`` from the exact mean index.

    The sign is spot-checked: ``i(y^m_probe)`` must lie within ``2n + 2`` of
    ``m_probe`` times the mean index.
    """
    seed = seed_of(config)
    mean = mean_index_exact(seed)
    val = r8_index(config, m_probe) + N
    if abs(val - m_probe * float(mean)) > 2 * N + 2:
        raise InconsistencyError(f"i(y^{m_probe}) = {val - N} strays from {m_probe} times the mean index")
    sign = mean.sign() if isinstance(mean, SurdSum) else (mean > 0) - (mean < 0)
    if sign > 0:
        return "diverges_up"
    if sign < 0:
        return "diverges_down"
    return "zero_family"


__all__ = [
    "R8Config",
    "ScanReport",
    "ZeroMeanFamily",
    "angle_tuples",
    "claim1_scan",
    "default_families",
    "enumerate_configs",
    "generic_viterbo_array",
    "lemma31_scan",
    "mean_index_dichotomy",
    "parity_admissible",
    "r1_infeasibility",
    "r8_index",
    "r8_index_array",
    "seed_of",
    "zero_mean_family",
]
