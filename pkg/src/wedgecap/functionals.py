"""Lower and upper adhesion scale-averages of a wall profile.

For a window factor b > 0 the quantities of interest are the liminf and
limsup, as eps -> 0+, of (1/eps) * integral of cos(gamma) over (0, b*eps].
Sweeps bracket them on a geometric grid of scales; for profiles with special
structure (constant, dyadic super-blocks, log-periodic) the limits have
closed forms evaluated exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .profiles import ContactProfile, averaged_cos_many, cos_integral

KIND_LOWER = "I"  # liminf flavour
KIND_UPPER = "S"  # limsup flavour

METHOD_SWEEP = "sweep"
METHOD_LOG_PERIODIC = "log_periodic_exact"
METHOD_SEQUENCE = "sequence_exact"

#: admitted relative overshoot of |value| past b before we call it a bug
_VALUE_SLACK = 1e-9


@dataclass(frozen=True)
class SweepConfig:
    """Geometric scale grid running from ``eps_hi`` down to ``eps_lo``.

    Grid points are eps_hi * 10^(-k / points_per_decade); doubling the density
    or halving the floor refines the grid to a superset of the old one, so
    sweep minima are monotone under refinement.
    """

    eps_hi: float
    eps_lo: float = 1e-10
    points_per_decade: int = 64

    def __post_init__(self) -> None:
        if not (0.0 < self.eps_lo < self.eps_hi):
            raise ValueError("need 0 < eps_lo < eps_hi")
        if self.points_per_decade < 8:
            raise ValueError("points_per_decade must be at least 8")

    @classmethod
    def for_profile(cls, profile: ContactProfile, b: float, **kw) -> "SweepConfig":
        """Default sweep: start where the window fills the wall, descend to 1e-10."""
        return cls(eps_hi=profile.s_max / b, **kw)

    def grid(self) -> np.ndarray:
        p = self.points_per_decade
        n_steps = math.floor(p * math.log10(self.eps_hi / self.eps_lo) + 1e-9)
        k = np.arange(n_steps + 1)
        return self.eps_hi * 10.0 ** (-(k / p))

    @property
    def relative_spacing(self) -> float:
        return 10.0 ** (1.0 / self.points_per_decade) - 1.0


@dataclass(frozen=True)
class AdhesionEstimate:
    """One estimated or exact adhesion value at window factor ``b``.

    ``kind`` is "I" for the lower (liminf) value, "S" for the upper (limsup)
    one.  ``uncertainty`` is zero exactly for the closed-form methods.
    """

    b: float
    kind: str
    value: float
    method: str
    uncertainty: float

    def __post_init__(self) -> None:
        if self.kind not in (KIND_LOWER, KIND_UPPER):
            raise ValueError(f"kind must be 'I' or 'S', got {self.kind!r}")
        if self.method not in (METHOD_SWEEP, METHOD_LOG_PERIODIC, METHOD_SEQUENCE):
            raise ValueError(f"unknown method {self.method!r}")
        if self.uncertainty < 0.0:
            raise ValueError("uncertainty must be nonnegative")
        if abs(self.value) > self.b * (1.0 + _VALUE_SLACK):
            raise ValueError(
                f"value {self.value} outside [-b, b] for b={self.b}"
            )
        exact = self.method in (METHOD_LOG_PERIODIC, METHOD_SEQUENCE)
        if exact != (self.uncertainty == 0.0):
            raise ValueError("uncertainty must be zero iff the method is exact")


def _sweep_values(profile, b, sweep):
    if sweep is None:
        sweep = SweepConfig.for_profile(profile, b)
    if sweep.eps_hi > profile.s_max / b * (1.0 + 1e-12):
        raise ValueError("sweep eps_hi pushes the window past the wall")
    return averaged_cos_many(profile, sweep.grid(), b), sweep


def estimate_AI(
    profile: ContactProfile, b: float, sweep: SweepConfig | None = None
) -> AdhesionEstimate:
    """Grid lower envelope of the scale-averages (liminf bracket)."""
    vals, sweep = _sweep_values(profile, b, sweep)
    return AdhesionEstimate(
        b=b,
        kind=KIND_LOWER,
        value=float(np.min(vals)),
        method=METHOD_SWEEP,
        uncertainty=b * sweep.relative_spacing,
    )


def estimate_AS(
    profile: ContactProfile, b: float, sweep: SweepConfig | None = None
) -> AdhesionEstimate:
    """Grid upper envelope of the scale-averages (limsup bracket)."""
    vals, sweep = _sweep_values(profile, b, sweep)
    return AdhesionEstimate(
        b=b,
        kind=KIND_UPPER,
        value=float(np.max(vals)),
        method=METHOD_SWEEP,
        uncertainty=b * sweep.relative_spacing,
    )


def sweep_table(
    profile: ContactProfile, b: float, sweep: SweepConfig | None = None
) -> tuple[np.ndarray, np.ndarray]:
    """(eps, averaged value) pairs of the sweep, for inspection or export."""
    vals, sweep = _sweep_values(profile, b, sweep)
    return sweep.grid(), vals


def verify_log_periodic(profile: ContactProfile, ratio: float) -> None:
    """Check gamma(s/ratio) == gamma(s) on the covered scales, else raise.

    The comparison is structural: segment values are probed at midpoints of
    the partition induced by the breakpoints and their images under the scale
    map, over every covered scale above the truncation tail.  A single
    segment is trivially periodic; otherwise at least one full period of
    pattern must be present below the top one.
    """
    if ratio <= 1.0:
        raise ValueError(f"scale ratio must exceed 1, got {ratio}")
    if profile.n_segments == 1:
        return
    s0 = profile.s_max
    tail_end = float(profile.bounds[1])
    if tail_end * ratio**2 > s0 * (1.0 + 1e-9):
        raise ValueError(
            "profile too shallow to verify one full period at the claimed ratio"
        )
    lo = tail_end * ratio
    inner = profile.breaks[(profile.breaks > tail_end) & (profile.breaks < s0 / ratio)]
    pts = np.concatenate(
        (
            [lo, s0],
            profile.breaks[(profile.breaks > lo) & (profile.breaks < s0)],
            inner * ratio,
        )
    )
    pts = np.unique(pts)
    mids = 0.5 * (pts[:-1] + pts[1:])
    for s in mids:
        if profile.value_at(s) != profile.value_at(s / ratio):
            raise ValueError(
                f"profile is not self-similar at ratio {ratio}: mismatch near s={s}"
            )


def exact_A_log_periodic(
    profile: ContactProfile, b: float, ratio: float
) -> tuple[AdhesionEstimate, AdhesionEstimate]:
    """Closed-form (lower, upper) adhesion values of a log-periodic profile.

    Once self-similarity at ``ratio`` is verified, the integral of cos(gamma)
    below the top period is reconstructed from one period's worth of data
    (geometric series), which makes the result independent of where the
    generated profile was truncated.  The scale-average restricted to one
    period is piecewise of the form c1 + c2/eps, monotone between breakpoints,
    so its extrema sit at segment endpoints and are evaluated exactly.
    """
    if b <= 0.0:
        raise ValueError(f"window factor must be positive, got {b}")
    verify_log_periodic(profile, ratio)
    s0 = profile.s_max
    lo = s0 / ratio
    f_lo_trunc = cos_integral(profile, lo)
    period = cos_integral(profile, s0) - f_lo_trunc
    f_lo = period / (ratio - 1.0)  # exact tail sum of the scaled copies
    inner = profile.breaks[(profile.breaks > lo) & (profile.breaks < s0)]
    xs = np.concatenate(([lo], inner, [s0]))
    f_vals = f_lo + (profile.integral_many(xs) - f_lo_trunc)
    avgs = b * f_vals / xs
    vmin = float(np.min(avgs))
    vmax = float(np.max(avgs))
    bcap = b * (1.0 + _VALUE_SLACK)
    vmin = min(max(vmin, -bcap), bcap)
    vmax = min(max(vmax, -bcap), bcap)
    return (
        AdhesionEstimate(b, KIND_LOWER, vmin, METHOD_LOG_PERIODIC, 0.0),
        AdhesionEstimate(b, KIND_UPPER, vmax, METHOD_LOG_PERIODIC, 0.0),
    )


def exact_A_example1(
    g1: float, g2: float, b: float
) -> tuple[AdhesionEstimate, AdhesionEstimate]:
    """Closed-form (lower, upper) adhesion values of the dyadic super-blocks.

    The block length ratios degenerate, so along suitable scale sequences one
    angle dominates the whole window: the lower value is b*cos of the larger
    angle and the upper value is b*cos of the smaller one.
    """
    for name, g in (("g1", g1), ("g2", g2)):
        if not (0.0 <= g <= math.pi):
            raise ValueError(f"{name} must lie in [0, pi], got {g}")
    if b <= 0.0:
        raise ValueError(f"window factor must be positive, got {b}")
    return (
        AdhesionEstimate(b, KIND_LOWER, b * math.cos(max(g1, g2)), METHOD_SEQUENCE, 0.0),
        AdhesionEstimate(b, KIND_UPPER, b * math.cos(min(g1, g2)), METHOD_SEQUENCE, 0.0),
    )


def best_estimates(
    profile: ContactProfile,
    b: float,
    eps_lo: float = 1e-10,
    points_per_decade: int = 64,
    ratio: float = 4.0,
) -> tuple[AdhesionEstimate, AdhesionEstimate]:
    """(lower, upper) adhesion values via the tightest applicable route.

    Profiles with recognized structure (constant, the two generated families,
    anything self-similar at ``ratio``) get exact values; everything else
    falls back to a sweep between ``eps_lo`` and the wall.
    """
    if profile.generator == "example1" and profile.recurrent_values is not None:
        g1, g2 = profile.recurrent_values
        return exact_A_example1(g1, g2, b)
    if profile.n_segments == 1:
        value = b * float(math.cos(profile.values[0]))
        return (
            AdhesionEstimate(b, KIND_LOWER, value, METHOD_SEQUENCE, 0.0),
            AdhesionEstimate(b, KIND_UPPER, value, METHOD_SEQUENCE, 0.0),
        )
    try:
        return exact_A_log_periodic(profile, b, ratio)
    except ValueError:
        pass
    sweep = SweepConfig(
        eps_hi=profile.s_max / b, eps_lo=eps_lo, points_per_decade=points_per_decade
    )
    return estimate_AI(profile, b, sweep), estimate_AS(profile, b, sweep)
