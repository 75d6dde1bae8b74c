"""
Pairwise minimum spacing between a leading and a trailing arrival.

For a leader on path k (class i) and a trailer on path l (class j), the
initial spacing time t0 is the delay between the two aircraft passing
MP_kl, the start of their common path. The smallest t0 that keeps the pair
at least S apart along the common path, and at least S_thr apart when the
leader crosses the threshold, fixes the threshold-crossing time difference
ΔT used by the capacity model.

Time origin: the leader passes MP_kl at t = 0 and lands at
t = lead t_com1 + lead t_com2. Positions are measured along the common
path from MP_kl.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Iterator, List, Optional, Tuple

import numpy as np

from ..config import SolverOptions
from ..scenario.models import (
    AirspaceScenario,
    ArrivalPath,
    PairGeometry,
    SeparationPolicy,
    SpeedProfile,
)
from .kinematics import segment_accel, speed_at_offset, time_to_cover, upstream_extrapolated_speed


logger = logging.getLogger(__name__)

PairKey = Tuple[str, str, str, str]

_EPS = 1e-12
_BOUNDARY_SLACK = 1e-9


class Binding(str, Enum):
    """Which constraint fixes the minimum initial spacing."""
    IN_PATH = "in-path"
    THRESHOLD = "threshold"


class InfeasibleSpacingError(ValueError):
    """Raised when t0 breaks an ordering bound (the trailer would not stay behind)."""


class SpacingSolverError(Exception):
    """Raised when the minimum-spacing search fails for a combination."""

    def __init__(self, message: str, combination: Optional[PairKey], reason: str):
        self.combination = combination
        self.reason = reason
        super().__init__(message)


@dataclass(frozen=True)
class PairCombination:
    """A leading (path, class) followed by a trailing (path, class)."""
    lead_path: ArrivalPath
    lead_class: str
    trail_path: ArrivalPath
    trail_class: str
    geometry: PairGeometry
    lead_profile: SpeedProfile
    trail_profile: SpeedProfile

    @property
    def key(self) -> PairKey:
        return (self.lead_path.entry_point, self.lead_class,
                self.trail_path.entry_point, self.trail_class)

    @classmethod
    def from_scenario(cls, scenario: AirspaceScenario, lead_path: str, lead_class: str,
                      trail_path: str, trail_class: str) -> "PairCombination":
        lead = scenario.path(lead_path)
        trail = scenario.path(trail_path)
        return cls(
            lead_path=lead,
            lead_class=lead_class,
            trail_path=trail,
            trail_class=trail_class,
            geometry=scenario.geometry_for(lead_path, trail_path),
            lead_profile=lead.profile_for(lead_class),
            trail_profile=trail.profile_for(trail_class),
        )


@dataclass(frozen=True)
class CommonTimes:
    """Flight times (min) of both aircraft along common subpaths 1 and 2."""
    lead_com1: float
    lead_com2: float
    trail_com1: float
    trail_com2: float

    @property
    def lead_total(self) -> float:
        return self.lead_com1 + self.lead_com2

    @property
    def trail_total(self) -> float:
        return self.trail_com1 + self.trail_com2


@dataclass(frozen=True)
class Subinterval:
    """
    A stretch of the leader's common-path window over which both aircraft
    hold a constant acceleration, so the gap is quadratic in t.
    """
    index: int
    t_start: float
    t_end: float
    s_n: float
    lead_accel: float
    trail_accel: float
    lead_v_start: float
    trail_v_start: float

    @property
    def duration(self) -> float:
        return self.t_end - self.t_start


@dataclass(frozen=True)
class SpacingSolution:
    """Minimal initial spacing for one leading/trailing combination."""
    key: PairKey
    t0_star: float
    binding: Binding
    delta_t: float
    com_times: CommonTimes
    t0_in_path: float
    t0_threshold: float
    s_tma: float
    s_thr: float
    min_gap: float
    final_gap: float
    n_subintervals: int
    method: str = "analytic"


@dataclass(frozen=True)
class CommonPathMotion:
    """
    Kinematic state of both aircraft on their common path.

    Accelerations are signed (<= 0). The trailer keeps its entry-segment
    deceleration everywhere upstream of MP_iap, including upstream of its
    own entry fix.
    """
    d_common1: float
    d_common2: float
    lead_v_mpkl: float
    lead_v_mpiap: float
    lead_a1: float
    lead_a2: float
    trail_v_mpkl: float
    trail_v_mpiap: float
    trail_a1: float
    trail_a2: float
    times: CommonTimes

    @classmethod
    def from_combination(cls, combo: PairCombination) -> "CommonPathMotion":
        geom = combo.geometry
        lead, trail = combo.lead_profile, combo.trail_profile
        lead_v_mpkl = speed_at_offset(combo.lead_path, lead, geom.d_entry_to_mpkl_k)
        trail_v_mpkl = speed_at_offset(combo.trail_path, trail, geom.d_entry_to_mpkl_l)
        return cls(
            d_common1=geom.d_common1,
            d_common2=geom.d_common2,
            lead_v_mpkl=lead_v_mpkl,
            lead_v_mpiap=lead.v_mpiap,
            lead_a1=segment_accel(combo.lead_path.d_entry_to_mpiap, lead.v_entry, lead.v_mpiap),
            lead_a2=segment_accel(combo.lead_path.d_mpiap_to_thr, lead.v_mpiap, lead.v_thr),
            trail_v_mpkl=trail_v_mpkl,
            trail_v_mpiap=trail.v_mpiap,
            trail_a1=segment_accel(combo.trail_path.d_entry_to_mpiap, trail.v_entry, trail.v_mpiap),
            trail_a2=segment_accel(combo.trail_path.d_mpiap_to_thr, trail.v_mpiap, trail.v_thr),
            times=common_subpath_times(combo),
        )

    @property
    def window(self) -> float:
        """Leader's common-path flight time: the constraint window [0, window]."""
        return self.times.lead_total

    @property
    def feasibility_bound(self) -> float:
        """t0 must exceed this so the trailer passes MP_kl, MP_iap and the threshold after the leader."""
        return max(0.0,
                   self.times.lead_com1 - self.times.trail_com1,
                   self.times.lead_total - self.times.trail_total)

    def lead_position(self, t):
        """Leader's distance past MP_kl at time t (scalar or array)."""
        t = np.asarray(t, dtype=float)
        t1 = self.times.lead_com1
        before = self.lead_v_mpkl * t + 0.5 * self.lead_a1 * t ** 2
        after_t = t - t1
        after = self.d_common1 + self.lead_v_mpiap * after_t + 0.5 * self.lead_a2 * after_t ** 2
        return np.where(t < t1, before, after)

    def trail_position(self, t, t0: float):
        """Trailer's distance past MP_kl at time t; negative while still upstream."""
        tau = np.asarray(t, dtype=float) - t0
        t1 = self.times.trail_com1
        before = self.trail_v_mpkl * tau + 0.5 * self.trail_a1 * tau ** 2
        after_t = tau - t1
        after = self.d_common1 + self.trail_v_mpiap * after_t + 0.5 * self.trail_a2 * after_t ** 2
        return np.where(tau < t1, before, after)

    def trail_time_to(self, position: float) -> float:
        """Time after passing MP_kl at which the trailer reaches `position` (negative upstream)."""
        if position < 0:
            return -time_to_cover(self.trail_v_mpkl, -self.trail_a1, -position)
        if position <= self.d_common1:
            return time_to_cover(self.trail_v_mpkl, self.trail_a1, position)
        return self.times.trail_com1 + time_to_cover(
            self.trail_v_mpiap, self.trail_a2, position - self.d_common1)


def common_subpath_times(combo: PairCombination) -> CommonTimes:
    """
    Flight times of leader and trailer along common subpaths 1 and 2.

    Each time is the subpath length over the mean of its end speeds; a
    merge at MP_iap leaves subpath 1 empty and both t_com1 at zero.
    """
    geom = combo.geometry
    lead, trail = combo.lead_profile, combo.trail_profile

    def com1(path: ArrivalPath, profile: SpeedProfile, d_entry_to_mpkl: float) -> float:
        if geom.d_common1 <= 0:
            return 0.0
        v_mpkl = speed_at_offset(path, profile, d_entry_to_mpkl)
        return geom.d_common1 / ((v_mpkl + profile.v_mpiap) / 2.0)

    def com2(profile: SpeedProfile) -> float:
        return geom.d_common2 / ((profile.v_mpiap + profile.v_thr) / 2.0)

    return CommonTimes(
        lead_com1=com1(combo.lead_path, lead, geom.d_entry_to_mpkl_k),
        lead_com2=com2(lead),
        trail_com1=com1(combo.trail_path, trail, geom.d_entry_to_mpkl_l),
        trail_com2=com2(trail),
    )


def _trail_speed_before_mpkl(combo: PairCombination, motion: CommonPathMotion, distance: float) -> float:
    """Trailer's speed `distance` NM before MP_kl, extrapolated past its entry fix when needed."""
    d_entry = combo.geometry.d_entry_to_mpkl_l
    if distance > d_entry:
        return upstream_extrapolated_speed(combo.trail_profile, motion.trail_a1, distance - d_entry)
    return speed_at_offset(combo.trail_path, combo.trail_profile, d_entry - distance)


def build_subintervals(combo: PairCombination, t0: float,
                       motion: Optional[CommonPathMotion] = None) -> List[Subinterval]:
    """
    Partition the leader's window at the two MP_iap passage instants.

    The leader passes MP_iap at lead t_com1 and the trailer at
    t0 + trail t_com1; whichever fall strictly inside the window become
    breakpoints, giving one to three subintervals.

    Raises:
        InfeasibleSpacingError: If t0 does not exceed the ordering bounds
    """
    motion = motion or CommonPathMotion.from_combination(combo)
    bound = motion.feasibility_bound
    if not t0 > bound:
        raise InfeasibleSpacingError(
            f"t0 = {t0:.9g} min does not exceed the ordering bound {bound:.9g} min for {combo.key}"
        )

    window = motion.window
    lead_cross = motion.times.lead_com1
    trail_cross = t0 + motion.times.trail_com1

    cuts = [0.0]
    for cut in sorted((lead_cross, trail_cross)):
        if cut - cuts[-1] > _EPS and window - cut > _EPS:
            cuts.append(cut)
    cuts.append(window)

    subintervals: List[Subinterval] = []
    s_n = (motion.trail_v_mpkl - 0.5 * motion.trail_a1 * t0) * t0
    lead_v = motion.lead_v_mpkl
    trail_v = _trail_speed_before_mpkl(combo, motion, s_n)
    for index, (start, end) in enumerate(zip(cuts, cuts[1:]), start=1):
        middle = 0.5 * (start + end)
        lead_a = motion.lead_a1 if middle < lead_cross else motion.lead_a2
        trail_a = motion.trail_a1 if middle < trail_cross else motion.trail_a2
        sub = Subinterval(index, start, end, s_n, lead_a, trail_a, lead_v, trail_v)
        subintervals.append(sub)
        s_n = gap_at(sub, end)
        lead_v += lead_a * sub.duration
        trail_v += trail_a * sub.duration
    return subintervals


def gap_at(subinterval: Subinterval, t: float) -> float:
    """Along-path distance between leader and trailer at time t within the subinterval."""
    if t < subinterval.t_start - _BOUNDARY_SLACK or t > subinterval.t_end + _BOUNDARY_SLACK:
        raise ValueError(
            f"t = {t} is outside subinterval {subinterval.index} "
            f"[{subinterval.t_start}, {subinterval.t_end}]"
        )
    tau = t - subinterval.t_start
    relative_speed = subinterval.lead_v_start - subinterval.trail_v_start
    curvature = abs(subinterval.lead_accel) - abs(subinterval.trail_accel)
    if abs(curvature) < _EPS:
        curvature = 0.0
    return subinterval.s_n + relative_speed * tau - 0.5 * curvature * tau ** 2


def min_gap(subinterval: Subinterval) -> Tuple[float, float]:
    """
    Smallest gap over the subinterval.

    Returns:
        (t*, D*) where D* is the minimum and t* the earliest time it occurs
    """
    candidates = [subinterval.t_start, subinterval.t_end]
    curvature = abs(subinterval.lead_accel) - abs(subinterval.trail_accel)
    # opens upward only when the trailer decelerates harder
    if curvature < -_EPS:
        relative_speed = subinterval.lead_v_start - subinterval.trail_v_start
        vertex = subinterval.t_start + relative_speed / curvature
        if subinterval.t_start < vertex < subinterval.t_end:
            candidates.append(vertex)
    best_t, best_gap = candidates[0], gap_at(subinterval, candidates[0])
    for t in candidates[1:]:
        value = gap_at(subinterval, t)
        if value < best_gap:
            best_t, best_gap = t, value
    return best_t, best_gap


def threshold_t0(motion: CommonPathMotion, s_thr: float) -> float:
    """Initial spacing that puts the trailer exactly S_thr behind when the leader lands."""
    target = motion.d_common1 + motion.d_common2 - s_thr
    return motion.window - motion.trail_time_to(target)


def replay_gaps(motion: CommonPathMotion, t0: float, step: float = 1e-3) -> Tuple[np.ndarray, np.ndarray]:
    """
    Dense replay of both aircraft along the common path.

    Positions come straight from the constant-deceleration motion of each
    aircraft, not from the subinterval decomposition.

    Returns:
        (times, gaps) sampled over [0, window], endpoints included
    """
    window = motion.window
    samples = max(2, int(math.ceil(window / step)) + 1)
    times = np.linspace(0.0, window, samples)
    gaps = motion.lead_position(times) - motion.trail_position(times, t0)
    return times, gaps


def _replay_feasible(motion: CommonPathMotion, t0: float, s_tma: float, s_thr: float,
                     step: float, slack: float = 0.0) -> bool:
    _, gaps = replay_gaps(motion, t0, step)
    return bool(gaps.min() >= s_tma - slack and gaps[-1] >= s_thr - slack)


def brute_force_min_t0(motion: CommonPathMotion, s_tma: float, s_thr: float,
                       grid_step: float = 1e-4, coarse_step: float = 0.05,
                       replay_step: float = 1e-3, max_coarse_steps: int = 100_000) -> float:
    """
    Smallest t0 on a grid anchored at the ordering bound whose dense replay
    meets both separations.

    Scans the grid coarsely to bracket the first feasible point, then
    narrows the bracket down to `grid_step`.
    """
    base = motion.feasibility_bound
    fine_per_coarse = max(1, int(round(coarse_step / grid_step)))

    k = 1
    while not _replay_feasible(motion, base + k * fine_per_coarse * grid_step, s_tma, s_thr, replay_step):
        k += 1
        if k > max_coarse_steps:
            raise SpacingSolverError(
                "Grid scan found no feasible initial spacing", None, "grid exhausted"
            )

    lo_index = (k - 1) * fine_per_coarse
    hi_index = k * fine_per_coarse
    while hi_index - lo_index > 1:
        mid = (lo_index + hi_index) // 2
        if mid > 0 and _replay_feasible(motion, base + mid * grid_step, s_tma, s_thr, replay_step):
            hi_index = mid
        else:
            lo_index = mid
    return base + hi_index * grid_step


def _in_path_margin(combo: PairCombination, motion: CommonPathMotion, t0: float, s_tma: float) -> float:
    return min(min_gap(sub)[1] for sub in build_subintervals(combo, t0, motion)) - s_tma


def _solve_in_path_t0(combo: PairCombination, motion: CommonPathMotion, s_tma: float,
                      s_thr: float, options: SolverOptions) -> float:
    """Bisection for the smallest t0 whose closed-form minimum gap reaches S."""
    lo = motion.feasibility_bound
    v_thr_min = min(combo.lead_profile.v_thr, combo.trail_profile.v_thr)
    hi = (s_thr + motion.d_common1 + motion.d_common2) / v_thr_min
    if hi <= lo:
        hi = lo + 1.0

    doublings = 0
    while _in_path_margin(combo, motion, hi, s_tma) < 0:
        hi *= 2.0
        doublings += 1
        if doublings > options.max_doublings:
            raise SpacingSolverError(
                f"No feasible upper bound for t0 on {combo.key} after {doublings} doublings (last {hi:.6g} min)",
                combo.key, "upper bracket not found",
            )

    iterations = 0
    while hi - lo > options.tolerance:
        iterations += 1
        if iterations > options.max_iterations:
            raise SpacingSolverError(
                f"Bisection on {combo.key} did not converge in {options.max_iterations} iterations "
                f"(bracket [{lo:.9g}, {hi:.9g}] min)",
                combo.key, "bisection did not converge",
            )
        middle = 0.5 * (lo + hi)
        if _in_path_margin(combo, motion, middle, s_tma) >= 0:
            hi = middle
        else:
            lo = middle
    return hi


def solve_min_t0(combo: PairCombination, policy: SeparationPolicy,
                 options: Optional[SolverOptions] = None) -> SpacingSolution:
    """
    Minimum initial spacing time for one combination.

    t0^S (in-path constraint alone) is found by bisection over closed-form
    subinterval minima; t0^{S_thr} (threshold constraint alone) is exact.
    Both constraints only loosen as t0 grows, so the larger of the two is
    the minimum that satisfies both.

    Args:
        combo: Leading/trailing combination
        policy: Separations to enforce
        options: Solver tunables

    Returns:
        The SpacingSolution, including ΔT

    Raises:
        SpacingSolverError: If the search does not converge
    """
    options = options or SolverOptions()
    s_tma = policy.s_tma_for(combo.lead_class, combo.trail_class)
    s_thr = policy.s_thr
    motion = CommonPathMotion.from_combination(combo)

    t0_in_path = _solve_in_path_t0(combo, motion, s_tma, s_thr, options)
    t0_threshold = threshold_t0(motion, s_thr)
    t0_star = max(t0_in_path, t0_threshold)
    binding = Binding.THRESHOLD if t0_threshold >= t0_in_path - options.tolerance else Binding.IN_PATH
    method = "analytic"

    if options.verify and not _replay_feasible(
            motion, t0_star, s_tma, s_thr, options.replay_step, options.replay_tolerance):
        logger.warning("Replay check failed for %s at t0 = %.6f min; falling back to grid scan",
                       combo.key, t0_star)
        t0_star = brute_force_min_t0(motion, s_tma, s_thr, replay_step=options.replay_step)
        _, gaps = replay_gaps(motion, t0_star, options.replay_step)
        binding = Binding.THRESHOLD if gaps[-1] - s_thr <= gaps.min() - s_tma else Binding.IN_PATH
        method = "grid-fallback"

    subintervals = build_subintervals(combo, t0_star, motion)
    final = subintervals[-1]
    times = motion.times
    delta_t = (times.trail_com1 + times.trail_com2 + t0_star) - (times.lead_com1 + times.lead_com2)

    logger.debug("%s: t0*=%.6f (S %.6f, S_thr %.6f) binding=%s ΔT=%.6f N=%d",
                 combo.key, t0_star, t0_in_path, t0_threshold, binding.value, delta_t, len(subintervals))
    return SpacingSolution(
        key=combo.key,
        t0_star=t0_star,
        binding=binding,
        delta_t=delta_t,
        com_times=times,
        t0_in_path=t0_in_path,
        t0_threshold=t0_threshold,
        s_tma=s_tma,
        s_thr=s_thr,
        min_gap=min(min_gap(sub)[1] for sub in subintervals),
        final_gap=gap_at(final, final.t_end),
        n_subintervals=len(subintervals),
        method=method,
    )


@dataclass(frozen=True)
class PairEntry:
    probability: float
    solution: SpacingSolution


class PairTable:
    """Spacing solutions keyed by (lead_path, lead_class, trail_path, trail_class)."""

    def __init__(self, runway_id: str, entries: Dict[PairKey, PairEntry]):
        self.runway_id = runway_id
        self.entries = dict(sorted(entries.items()))

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, key) -> bool:
        return key in self.entries

    def __getitem__(self, key: PairKey) -> PairEntry:
        return self.entries[key]

    def __iter__(self) -> Iterator[PairKey]:
        return iter(self.entries)

    def delta_t(self, key: PairKey) -> float:
        return self.entries[key].solution.delta_t

    @property
    def total_probability(self) -> float:
        return math.fsum(entry.probability for entry in self.entries.values())

    @property
    def min_delta_t(self) -> float:
        return min(entry.solution.delta_t for entry in self.entries.values())

    def to_rows(self) -> List[Dict[str, object]]:
        return [
            {
                "lead_path": key[0],
                "lead_class": key[1],
                "trail_path": key[2],
                "trail_class": key[3],
                "probability": entry.probability,
                "t0_min": entry.solution.t0_star,
                "delta_t_min": entry.solution.delta_t,
                "binding": entry.solution.binding.value,
            }
            for key, entry in self.entries.items()
        ]


def iter_combinations(scenario: AirspaceScenario) -> Iterator[Tuple[PairCombination, float]]:
    """Every leading/trailing combination with nonzero probability, with that probability."""
    path_classes = list(scenario.iter_path_classes())
    for lead_path, lead_mix in path_classes:
        for trail_path, trail_mix in path_classes:
            probability = (lead_path.traffic_proportion * trail_path.traffic_proportion
                           * lead_mix.proportion * trail_mix.proportion)
            if probability <= 0:
                continue
            combo = PairCombination(
                lead_path=lead_path,
                lead_class=lead_mix.aircraft_class,
                trail_path=trail_path,
                trail_class=trail_mix.aircraft_class,
                geometry=scenario.geometry_for(lead_path.entry_point, trail_path.entry_point),
                lead_profile=lead_mix.profile,
                trail_profile=trail_mix.profile,
            )
            yield combo, probability


def solve_all_pairs(scenario: AirspaceScenario, options: Optional[SolverOptions] = None) -> PairTable:
    """
    Solve every nonzero-probability combination of a scenario.

    Raises:
        SpacingSolverError: For the first combination that fails, with its key attached
    """
    options = options or SolverOptions()
    entries: Dict[PairKey, PairEntry] = {}
    for combo, probability in iter_combinations(scenario):
        try:
            solution = solve_min_t0(combo, scenario.separation, options)
        except SpacingSolverError as e:
            if e.combination is None:
                raise SpacingSolverError(f"{combo.key}: {e}", combo.key, e.reason) from e
            raise
        except InfeasibleSpacingError as e:
            raise SpacingSolverError(str(e), combo.key, "infeasible spacing") from e
        entries[combo.key] = PairEntry(probability, solution)
    logger.info("Solved %d leading/trailing combinations for %s", len(entries), scenario.runway_id)
    return PairTable(scenario.runway_id, entries)
