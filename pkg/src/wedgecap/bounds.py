"""Lower bounds on the angular width of constant-height fans at the corner.

A bounded solution whose radial limits exist splits the sector into at most
two wall fans (where the limit is constant) and a strictly monotone middle,
possibly with an interior plateau.  For each case and wall, one of two
trigonometric inequalities in a transversal inclination lambda must hold for
every lambda; the smallest wall-fan width beta for which it does is found by
an ascending scan.  With the adhesion value frozen to m*b the scan reduces to
arccos(m) (or its supplement), which serves as a cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable

import numpy as np

from .functionals import (
    KIND_LOWER,
    KIND_UPPER,
    exact_A_example1,
    exact_A_log_periodic,
)
from .profiles import ContactProfile

#: a refined condition minimum at or above this counts as "holds"
FEASIBLE_TOL = -1e-12
#: the lambda grid keeps this margin away from beta and pi
LAMBDA_MARGIN = 1e-4
#: minimum number of lambda grid points
LAMBDA_POINTS = 512

INCREASING = "increasing"
DECREASING = "decreasing"

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


class FanCase(Enum):
    """Shape of the radial-limit function across the sector."""

    I = "I"  # increasing middle
    D = "D"  # decreasing middle
    ID = "ID"  # increasing, interior plateau of width pi, decreasing
    DI = "DI"  # decreasing, interior plateau of width pi, increasing


class InfeasibleScanError(RuntimeError):
    """No admissible fan width was found below pi."""

    tag = "infeasible_scan"


@dataclass(frozen=True)
class AdhesionFunction:
    """Window-parametrized adhesion evaluator b -> A(b) with a kind tag.

    ``kind`` "I" marks a lower (liminf) functional, "S" an upper one.  The
    evaluator must accept numpy arrays; every returned value is clipped to
    the hard bound |A(b)| <= b after a sanity check.
    """

    kind: str
    fn: Callable[[np.ndarray], np.ndarray]
    method: str = "custom"

    def __post_init__(self) -> None:
        if self.kind not in (KIND_LOWER, KIND_UPPER):
            raise ValueError(f"kind must be 'I' or 'S', got {self.kind!r}")

    def __call__(self, b):
        b_arr = np.asarray(b, dtype=float)
        out = np.asarray(self.fn(b_arr), dtype=float)
        if np.any(np.abs(out) > b_arr * (1.0 + 1e-9)):
            raise ValueError("adhesion evaluator broke the |A(b)| <= b bound")
        out = np.clip(out, -b_arr, b_arr)
        return float(out) if np.isscalar(b) or out.ndim == 0 else out

    @classmethod
    def constant_angle(cls, gamma: float, kind: str) -> "AdhesionFunction":
        if not (0.0 <= gamma <= math.pi):
            raise ValueError(f"angle must lie in [0, pi], got {gamma}")
        return cls.linear(math.cos(gamma), kind, method="constant_angle")

    @classmethod
    def linear(cls, m: float, kind: str, method: str = "linear") -> "AdhesionFunction":
        if not (-1.0 <= m <= 1.0):
            raise ValueError(f"slope must lie in [-1, 1], got {m}")
        return cls(kind=kind, fn=lambda b: m * b, method=method)

    @classmethod
    def from_example1(cls, g1: float, g2: float, kind: str) -> "AdhesionFunction":
        lower, upper = exact_A_example1(g1, g2, 1.0)
        m = lower.value if kind == KIND_LOWER else upper.value
        return cls.linear(m, kind, method=lower.method)

    @classmethod
    def from_log_periodic(
        cls, profile: ContactProfile, ratio: float, kind: str
    ) -> "AdhesionFunction":
        # scale-averages are degree-1 homogeneous in b, so one exact value fixes the slope
        lower, upper = exact_A_log_periodic(profile, 1.0, ratio)
        m = lower.value if kind == KIND_LOWER else upper.value
        return cls.linear(m, kind, method=lower.method)

    @classmethod
    def from_sweep_table(
        cls,
        profile: ContactProfile,
        kind: str,
        eps_lo: float = 1e-10,
        points_per_decade: int = 64,
        x_floor: float = 1e-14,
    ) -> "AdhesionFunction":
        """Sweep-backed evaluator with precomputed envelope tables.

        A(b) over the grid eps in [eps_lo, s_max/b] equals b * (envelope of
        F(x)/x over x in [b*eps_lo, s_max]), so one table of F(x)/x on a
        geometric x-grid plus running envelopes answers every b by bisection.
        """
        p = points_per_decade
        n = math.floor(p * math.log10(profile.s_max / x_floor) + 1e-9)
        xs = profile.s_max * 10.0 ** (-(np.arange(n + 1) / p))
        g = profile.integral_many(xs) / xs
        # xs descends; envelope over x >= b*eps_lo is a prefix along this order
        run_min = np.minimum.accumulate(g)
        run_max = np.maximum.accumulate(g)
        asc = xs[::-1]
        env = (run_min if kind == KIND_LOWER else run_max)[::-1]

        def fn(b: np.ndarray) -> np.ndarray:
            cut = np.searchsorted(asc, np.asarray(b, dtype=float) * eps_lo, side="left")
            cut = np.clip(cut, 0, len(asc) - 1)
            return b * env[cut]

        return cls(kind=kind, fn=fn, method="sweep")


@dataclass(frozen=True)
class FanBoundResult:
    """Outcome of one admissible-fan scan."""

    side: str | None
    case: FanCase | None
    beta_min: float
    method: str
    worst_lambda: float | None
    monotone_flag: bool
    beta_step: float | None = None

    def __post_init__(self) -> None:
        if not (0.0 <= self.beta_min < math.pi):
            raise ValueError(f"beta_min must lie in [0, pi), got {self.beta_min}")


def _check_angles(beta, lam):
    beta = np.asarray(beta, dtype=float)
    lam = np.asarray(lam, dtype=float)
    if np.any(beta < 0.0) or np.any(beta >= lam) or np.any(lam >= math.pi):
        raise ValueError("need 0 <= beta < lambda < pi")
    return beta, lam


def condition_increasing(A: AdhesionFunction, beta, lam):
    """A(sin(lambda-beta)/sin(lambda)) + sin(beta)/sin(lambda) - 1.

    Nonnegative for every lambda in (beta, pi) exactly when a fan of width
    beta is admissible against an increasing middle on that wall.
    """
    beta, lam = _check_angles(beta, lam)
    sl = np.sin(lam)
    b = np.sin(lam - beta) / sl
    out = A(b) + np.sin(beta) / sl - 1.0
    return float(out) if out.ndim == 0 else out


def condition_decreasing(A: AdhesionFunction, beta, lam):
    """sin(beta)/sin(lambda) - 1 - A(sin(lambda-beta)/sin(lambda)).

    Nonnegative for every lambda in (beta, pi) exactly when a fan of width
    beta is admissible against a decreasing middle on that wall.
    """
    beta, lam = _check_angles(beta, lam)
    sl = np.sin(lam)
    b = np.sin(lam - beta) / sl
    out = np.sin(beta) / sl - 1.0 - A(b)
    return float(out) if out.ndim == 0 else out


def default_lambda_grid(beta: float, n: int = LAMBDA_POINTS) -> np.ndarray:
    lo = beta + LAMBDA_MARGIN
    hi = math.pi - LAMBDA_MARGIN
    if lo >= hi:
        raise ValueError(f"no room for a lambda grid above beta={beta}")
    return np.linspace(lo, hi, n)


def _golden_min(f, lo: float, hi: float, tol: float = 1e-12) -> tuple[float, float]:
    a, b = lo, hi
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = f(d)
    return (c, fc) if fc <= fd else (d, fd)


def holds_for_all_lambda(
    cond: Callable[[np.ndarray], np.ndarray],
    beta: float,
    lambda_grid: np.ndarray | None = None,
) -> tuple[bool, float]:
    """Whether ``cond(lambda) >= -1e-12`` across (beta, pi).

    The condition is evaluated on the grid, then golden-section refined around
    the grid minimizer; returns (verdict, refined worst lambda).
    """
    if lambda_grid is None:
        lambda_grid = default_lambda_grid(beta)
    lambda_grid = np.asarray(lambda_grid, dtype=float)
    if lambda_grid.size < 3:
        raise ValueError("lambda grid needs at least 3 points")
    vals = np.asarray(cond(lambda_grid), dtype=float)
    i = int(np.argmin(vals))
    lam_best, v_best = float(lambda_grid[i]), float(vals[i])
    lo = float(lambda_grid[max(i - 1, 0)])
    hi = float(lambda_grid[min(i + 1, lambda_grid.size - 1)])
    if hi > lo:
        lam_ref, v_ref = _golden_min(lambda x: float(cond(x)), lo, hi)
        if v_ref < v_best:
            lam_best, v_best = lam_ref, v_ref
    return v_best >= FEASIBLE_TOL, lam_best


def _batch_golden_min(f2, lo: np.ndarray, hi: np.ndarray, iters: int = 64):
    """Vectorized golden-section minimum of f2(lam_array) per bracket."""
    a, b = lo.copy(), hi.copy()
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = f2(c), f2(d)
    for _ in range(iters):
        left = fc <= fd
        b = np.where(left, d, b)
        a = np.where(left, a, c)
        c = b - _GOLDEN * (b - a)
        d = a + _GOLDEN * (b - a)
        # both probes re-evaluated each step: wasteful but branch-free
        fc = f2(c)
        fd = f2(d)
    lam = np.where(fc <= fd, c, d)
    val = np.minimum(fc, fd)
    return lam, val


def _condition_for(kind: str):
    if kind == INCREASING:
        return condition_increasing
    if kind == DECREASING:
        return condition_decreasing
    raise ValueError(f"unknown condition kind {kind!r}")


def required_functional_kind(condition_kind: str) -> str:
    """Which adhesion flavour a condition consumes: lower for increasing."""
    return KIND_LOWER if condition_kind == INCREASING else KIND_UPPER


def min_admissible_fan(
    A: AdhesionFunction,
    condition_kind: str,
    beta_step: float = 1e-3,
    *,
    side: str | None = None,
    case: FanCase | None = None,
    lambda_points: int = LAMBDA_POINTS,
) -> FanBoundResult:
    """Smallest fan width passing the chosen condition for all lambda.

    Scans beta ascending from 0 in steps of ``beta_step`` over [0, pi).  The
    whole range is scanned so the result also reports whether feasibility was
    monotone in beta (observed, never assumed).  Raises InfeasibleScanError
    when no width passes.
    """
    if not (0.0 < beta_step <= 1e-3):
        raise ValueError("beta_step must lie in (0, 1e-3]")
    cond = _condition_for(condition_kind)
    if A.kind != required_functional_kind(condition_kind):
        raise ValueError(
            f"{condition_kind} condition needs a kind-"
            f"{required_functional_kind(condition_kind)} functional, got {A.kind}"
        )
    betas = np.arange(0.0, math.pi - 2.0 * LAMBDA_MARGIN - beta_step, beta_step)
    lo = betas[:, None] + LAMBDA_MARGIN
    hi = math.pi - LAMBDA_MARGIN
    u = np.linspace(0.0, 1.0, lambda_points)[None, :]
    lam2d = lo + (hi - lo) * u
    vals2d = cond(A, betas[:, None], lam2d)
    idx = np.argmin(vals2d, axis=1)
    rows = np.arange(len(betas))
    grid_min = vals2d[rows, idx]

    # refinement can only push the minimum lower, so rows already below the
    # tolerance are infeasible without it
    cand = grid_min >= FEASIBLE_TOL
    feasible = np.zeros(len(betas), dtype=bool)
    worst = lam2d[rows, idx].copy()
    if np.any(cand):
        li = np.clip(idx[cand] - 1, 0, lambda_points - 1)
        hi_i = np.clip(idx[cand] + 1, 0, lambda_points - 1)
        blo = lam2d[rows[cand], li]
        bhi = lam2d[rows[cand], hi_i]
        bet = betas[cand]
        lam_ref, val_ref = _batch_golden_min(
            lambda lam: cond(A, bet, lam), blo, bhi
        )
        better = val_ref < grid_min[cand]
        worst[cand] = np.where(better, lam_ref, worst[cand])
        refined_min = np.minimum(val_ref, grid_min[cand])
        feasible[cand] = refined_min >= FEASIBLE_TOL

    if not np.any(feasible):
        raise InfeasibleScanError(
            f"no admissible fan width below pi for the {condition_kind} condition"
        )
    first = int(np.argmax(feasible))
    monotone = bool(np.all(np.diff(feasible.astype(int)) >= 0))
    return FanBoundResult(
        side=side,
        case=case,
        beta_min=float(betas[first]),
        method="theorem2_scan",
        worst_lambda=float(worst[first]),
        monotone_flag=monotone,
        beta_step=beta_step,
    )


def corollary1_bound(m: float, variant: str) -> float:
    """Closed-form fan bound when the adhesion value is frozen to m*b.

    Variants "a"/"b" (lower functional below m*b) give arccos(m); variants
    "c"/"d" (upper functional above m*b) give pi - arccos(m).
    """
    if not (-1.0 <= m <= 1.0):
        raise ValueError(f"cosine bound must lie in [-1, 1], got {m}")
    if variant not in ("a", "b", "c", "d"):
        raise ValueError(f"variant must be one of a, b, c, d, got {variant!r}")
    sigma = math.acos(m)
    return sigma if variant in ("a", "b") else math.pi - sigma


def effective_angle(
    A: AdhesionFunction, b_grid: np.ndarray | None = None
) -> tuple[float, float]:
    """Extremal cosine slope of A over a window grid and its arccos.

    Lower functionals report min A(b)/b, upper ones max A(b)/b; the returned
    angle is the effective constant contact angle matching that slope.
    """
    if b_grid is None:
        b_grid = np.linspace(1.0 / 33.0, 32.0 / 33.0, 32)
    b_grid = np.asarray(b_grid, dtype=float)
    if b_grid.size < 32 or np.any(b_grid <= 0.0) or np.any(b_grid >= 1.0):
        raise ValueError("b grid must have >= 32 points inside (0, 1)")
    ratios = A(b_grid) / b_grid
    m = float(np.min(ratios) if A.kind == KIND_LOWER else np.max(ratios))
    return m, math.acos(min(1.0, max(-1.0, m)))


def case_condition_map(case: FanCase) -> tuple[tuple[str, str], ...]:
    """The (side, condition kind) pairs a case must satisfy."""
    table = {
        FanCase.I: (("+", INCREASING), ("-", DECREASING)),
        FanCase.D: (("-", INCREASING), ("+", DECREASING)),
        FanCase.DI: (("+", INCREASING), ("-", INCREASING)),
        FanCase.ID: (("-", DECREASING), ("+", DECREASING)),
    }
    return table[FanCase(case)]


def adhesion_from_profile(
    profile: ContactProfile,
    kind: str,
    *,
    ratio: float = 4.0,
    eps_lo: float = 1e-10,
    points_per_decade: int = 64,
) -> AdhesionFunction:
    """Best available evaluator for a profile: exact when structure allows."""
    if profile.generator == "constant" or profile.n_segments == 1:
        return AdhesionFunction.constant_angle(float(profile.values[0]), kind)
    if profile.generator == "example1":
        g1, g2 = profile.recurrent_values
        return AdhesionFunction.from_example1(g1, g2, kind)
    try:
        return AdhesionFunction.from_log_periodic(profile, ratio, kind)
    except ValueError:
        return AdhesionFunction.from_sweep_table(
            profile, kind, eps_lo=eps_lo, points_per_decade=points_per_decade
        )
