"""Finite-volume solver for the capillary problem on a truncated sector.

The corner is cut off at ``r_min > 0`` and the annular sector is meshed with
geometrically graded radii and uniform angles.  Unknowns live at vertices;
each control volume balances the slope fluxes grad f / sqrt(1 + |grad f|^2)
through its faces against the prescribed right-hand side.  Wall faces carry
the contact flux cos(gamma(r)) integrated exactly along the face, the two
circular arcs default to a no-flux closure, and a damped Newton iteration
with a colored finite-difference Jacobian drives the residual down.  Radial
limits at the corner are then read off by geometric-sequence extrapolation
and classified into wall fans.
"""

from __future__ import annotations

import math
import warnings
from collections import deque
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Callable

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .profiles import (
    FAILS,
    ContactProfile,
    WedgeGeometry,
    hypothesis_from_profiles,
    theorem1_applicability,
)

#: cell counts below this are fine for plumbing but not for solve accuracy
RECOMMENDED_MIN_CELLS = 16
_PIN_NOTE = "pure Neumann nullspace (mean pinned to 0)"
# unknown (i,j) can influence residuals up to 2 nodes away (one-sided
# boundary stencils), so a 5x5 index tiling gives independent FD columns
_COLOR_STRIDE = 5


# ---------------------------------------------------------------------------
# mesh


@dataclass(frozen=True, eq=False)
class SectorMesh:
    """Vertex grid on the truncated sector: graded radii, uniform angles."""

    geometry: WedgeGeometry
    radii: np.ndarray  # strictly decreasing, radii[0] = r_max, radii[-1] = r_min
    thetas: np.ndarray  # uniform, thetas[0] = -alpha, thetas[-1] = +alpha

    def __post_init__(self) -> None:
        r = np.asarray(self.radii, dtype=float)
        t = np.asarray(self.thetas, dtype=float)
        if r.ndim != 1 or r.size < 2 or t.ndim != 1 or t.size < 2:
            raise ValueError("mesh needs at least 2 radii and 2 angles")
        if not (r[-1] > 0.0) or np.any(np.diff(r) >= 0.0):
            raise ValueError("radii must decrease strictly toward r_min > 0")
        ratios = r[1:] / r[:-1]
        if np.ptp(ratios) > 1e-12:
            raise ValueError("radial grading ratio must be constant to 1e-12")
        a = self.geometry.alpha
        if abs(t[0] + a) > 1e-12 or abs(t[-1] - a) > 1e-12:
            raise ValueError("angular grid must span [-alpha, alpha]")
        if np.ptp(np.diff(t)) > 1e-12:
            raise ValueError("angular grid must be uniform")
        object.__setattr__(self, "radii", r)
        object.__setattr__(self, "thetas", t)

    @property
    def m(self) -> int:
        return self.radii.size - 1

    @property
    def n_theta(self) -> int:
        return self.thetas.size - 1

    @property
    def r_min(self) -> float:
        return float(self.radii[-1])

    @property
    def r_max(self) -> float:
        return float(self.radii[0])

    @property
    def dtheta(self) -> float:
        return float((self.thetas[-1] - self.thetas[0]) / self.n_theta)

    @property
    def grading_ratio(self) -> float:
        return float(self.radii[1] / self.radii[0])


def build_sector_mesh(
    geometry: WedgeGeometry, r_min: float, r_max: float, m: int, n_theta: int
) -> SectorMesh:
    """Geometric radial grading with ratio (r_min/r_max)^(1/m), uniform angles.

    m and n_theta are cell counts; counts below 16 are accepted (the small
    closed-form examples use them) but solve-accuracy contracts assume >= 16.
    """
    if not (0.0 < r_min < r_max):
        raise ValueError(f"need 0 < r_min < r_max, got ({r_min}, {r_max})")
    if m < 1 or n_theta < 1:
        raise ValueError("cell counts must be positive")
    radii = np.exp(np.linspace(math.log(r_max), math.log(r_min), m + 1))
    radii[0], radii[-1] = r_max, r_min
    thetas = np.linspace(-geometry.alpha, geometry.alpha, n_theta + 1)
    return SectorMesh(geometry=geometry, radii=radii, thetas=thetas)


# ---------------------------------------------------------------------------
# solution container


@dataclass(frozen=True, eq=False)
class SolutionField:
    """Nodal solution with convergence metadata.

    ``rhs_values`` holds the right-hand side evaluated at the solution
    (kappa*f + lambda, or 2H(x,y,f) for the prescribed-curvature variant), so
    magnitude bounds read off the same field either way.  ``kappa``/``lam``
    are None for the prescribed-curvature variant.
    """

    mesh: SectorMesh
    values: np.ndarray  # shape (m+1, n_theta+1)
    kappa: float | None
    lam: float | None
    converged: bool
    residual_norm: float
    newton_iterations: int
    tol: float
    rhs_values: np.ndarray
    residual_history: tuple = ()
    diagnostics: dict = dc_field(default_factory=dict)

    def __post_init__(self) -> None:
        shape = (self.mesh.m + 1, self.mesh.n_theta + 1)
        if self.values.shape != shape or self.rhs_values.shape != shape:
            raise ValueError(f"field arrays must have shape {shape}")
        if self.kappa is not None and self.kappa < 0.0:
            raise ValueError("kappa must be nonnegative")
        if self.converged and not (self.residual_norm <= self.tol):
            raise ValueError("converged field must meet its tolerance")


def bounds_estimate(field: SolutionField) -> tuple[float, float]:
    """(M1, M2): max nodal |f| and max nodal |right-hand side|."""
    if field.values.size == 0:
        raise ValueError("empty field")
    return float(np.max(np.abs(field.values))), float(
        np.max(np.abs(field.rhs_values))
    )


def torus_minor_radius(m2: float) -> float:
    """Minor radius of the comparison torus with major radius 2.

    Evaluates 1/m2 + 1 - sqrt((1/m2)^2 + 1), which lies in (0, 1]; rational
    inputs whose surd is exact are computed in exact arithmetic so values
    like 2/3 come out as the nearest float of the true value.
    """
    if m2 < 0.0:
        raise ValueError(f"curvature bound must be nonnegative, got {m2}")
    if m2 == 0.0:
        return 1.0
    x = 1 / Fraction(m2)
    s2 = x * x + 1
    ra, rb = math.isqrt(s2.numerator), math.isqrt(s2.denominator)
    if ra * ra == s2.numerator and rb * rb == s2.denominator:
        return float(x + 1 - Fraction(ra, rb))
    xf = float(x)
    # stable form of x + 1 - sqrt(x^2 + 1): avoids cancellation for large x
    return 1.0 - 1.0 / (math.sqrt(xf * xf + 1.0) + xf)


# ---------------------------------------------------------------------------
# discretization helpers


def _deriv_stencils(xs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per-node 3-point first-derivative stencils (indices, weights).

    Interior nodes get the nonuniform central stencil, the two ends get
    one-sided ones; all are exact for quadratics.
    """
    n = xs.size
    if n < 3:
        raise ValueError("derivative stencils need at least 3 nodes")
    idx = np.empty((n, 3), dtype=int)
    idx[:, 0] = np.clip(np.arange(n) - 1, 0, n - 3)
    idx[:, 1] = idx[:, 0] + 1
    idx[:, 2] = idx[:, 0] + 2
    a, b, c = xs[idx[:, 0]], xs[idx[:, 1]], xs[idx[:, 2]]
    p = xs
    w = np.empty((n, 3))
    w[:, 0] = (2.0 * p - b - c) / ((a - b) * (a - c))
    w[:, 1] = (2.0 * p - a - c) / ((b - a) * (b - c))
    w[:, 2] = (2.0 * p - a - b) / ((c - a) * (c - b))
    return idx, w


def _gauss2(fn: Callable[[np.ndarray], np.ndarray], lo: np.ndarray, hi: np.ndarray):
    """Two-point Gauss integral of fn over each [lo, hi]."""
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    off = half / math.sqrt(3.0)
    return half * (fn(mid - off) + fn(mid + off))


@dataclass(frozen=True)
class SolverConfig:
    """Newton iteration knobs."""

    tol: float = 1e-10
    max_iter: int = 200
    balance_tol: float = 1e-8
    initial: float | None = None  # starting constant; None picks the default

    def __post_init__(self) -> None:
        if not (self.tol > 0.0 and self.balance_tol > 0.0):
            raise ValueError("tolerances must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be positive")


class _Discretization:
    """Precomputed geometry factors and the residual map for one problem."""

    def __init__(
        self,
        mesh: SectorMesh,
        rhs_fn,  # (r, theta, t) -> value, vectorized
        wall_minus,  # per-row exact wall-flux integrals, theta = -alpha
        wall_plus,  # theta = +alpha
        arc_outer,  # per-column flux integrals through r = r_max
        arc_inner,  # through r = r_min
        source_fn=None,  # extra right-hand side g(r, theta), for manufactured runs
    ):
        if mesh.m < 2 or mesh.n_theta < 2:
            raise ValueError("solver needs at least 3 nodes per direction")
        self.mesh = mesh
        self.rhs_fn = rhs_fn
        r, t = mesh.radii, mesh.thetas
        self.r_col = r[:, None]
        self.t_row = t[None, :]
        # control-volume radial extents (half cells at the two arcs)
        s_face = 0.5 * (r[:-1] + r[1:])  # radial faces, between rows i and i+1
        self.s_face = s_face
        self.b_out = np.concatenate([[r[0]], s_face])  # per row
        self.b_in = np.concatenate([s_face, [r[-1]]])
        # angular spans of the control volumes (half cells at the walls)
        dth = mesh.dtheta
        w = np.full(mesh.n_theta + 1, dth)
        w[0] = w[-1] = 0.5 * dth
        self.w_th = w
        self.dth = dth
        # nodal derivative stencils
        self.ridx, self.rw = _deriv_stencils(r)
        self.tidx, self.tw = _deriv_stencils(t)
        # conductance of angular faces: exact integral of dr/r across the row
        self.cond = np.log(self.b_out / self.b_in)
        # interpolation weights moving the arc rows' flux density to the
        # log-mean radius of their half spans
        rstar0 = (self.b_out[0] - self.b_in[0]) / self.cond[0]
        rstarm = (self.b_out[-1] - self.b_in[-1]) / self.cond[-1]
        self.arc_interp = (
            (r[0] - rstar0) / (r[0] - r[1]),
            (rstarm - r[-1]) / (r[-2] - r[-1]),
        )
        self.area = 0.5 * (self.b_out**2 - self.b_in**2)[:, None] * w[None, :]
        # boundary face integrals are solution-independent
        self.wall_minus = wall_minus
        self.wall_plus = wall_plus
        self.arc_outer = arc_outer
        self.arc_inner = arc_inner
        self.source = (
            None
            if source_fn is None
            else np.asarray(
                source_fn(np.broadcast_to(self.r_col, self.shape),
                          np.broadcast_to(self.t_row, self.shape)),
                dtype=float,
            )
            * self.area
        )

    @property
    def shape(self) -> tuple[int, int]:
        return self.mesh.m + 1, self.mesh.n_theta + 1

    def _nodal_dr(self, f: np.ndarray) -> np.ndarray:
        return np.einsum("ik,ikj->ij", self.rw, f[self.ridx, :])

    def _nodal_dt(self, f: np.ndarray) -> np.ndarray:
        return np.einsum("jk,ijk->ij", self.tw, f[:, self.tidx])

    def residual(self, f: np.ndarray) -> np.ndarray:
        mesh = self.mesh
        r = mesh.radii
        fr = self._nodal_dr(f)
        ft = self._nodal_dt(f)

        # radial faces: slope flux through arcs between consecutive rows
        dr = (r[:-1] - r[1:])[:, None]
        fr_face = (f[:-1, :] - f[1:, :]) / dr
        ft_face = 0.5 * (ft[:-1, :] + ft[1:, :])
        s = self.s_face[:, None]
        w_face = np.sqrt(1.0 + fr_face**2 + (ft_face / s) ** 2)
        dens = (fr_face / w_face) * s
        q_rad = dens * self.dth
        # wall half-faces: integrate the linear density reconstruction so the
        # off-center quadrature point does not cost an order at the boundary
        q_rad[:, 0] = self.dth * (3.0 * dens[:, 0] + dens[:, 1]) / 8.0
        q_rad[:, -1] = self.dth * (3.0 * dens[:, -1] + dens[:, -2]) / 8.0

        # angular faces: flux through radial segments between columns
        ft_ang = (f[:, 1:] - f[:, :-1]) / self.dth
        fr_ang = 0.5 * (fr[:, 1:] + fr[:, :-1])
        w_ang = np.sqrt(1.0 + fr_ang**2 + (ft_ang / self.r_col) ** 2)
        p = ft_ang / w_ang
        q_ang = p * self.cond[:, None]
        # arc rows: the face spans only half a cell, so shift the density to
        # the span's log-mean radius by interpolating toward the next row
        t0, tm = self.arc_interp
        q_ang[0, :] = ((1.0 - t0) * p[0, :] + t0 * p[1, :]) * self.cond[0]
        q_ang[-1, :] = ((1.0 - tm) * p[-1, :] + tm * p[-2, :]) * self.cond[-1]

        out = np.zeros(self.shape)
        out[1:, :] += q_rad  # outer face of every row but the first
        out[:-1, :] -= q_rad  # inner face of every row but the last
        out[0, :] += self.arc_outer
        out[-1, :] += self.arc_inner
        out[:, 1:] -= q_ang  # west face of every column but the first
        out[:, :-1] += q_ang  # east face of every column but the last
        out[:, 0] += self.wall_minus
        out[:, -1] += self.wall_plus

        rhs = np.asarray(self.rhs_fn(self.r_col, self.t_row, f), dtype=float)
        out -= rhs * self.area
        if self.source is not None:
            out -= self.source
        return out

    def rhs_at(self, f: np.ndarray) -> np.ndarray:
        return np.asarray(
            self.rhs_fn(self.r_col, self.t_row, f), dtype=float
        ) * np.ones(self.shape)

    def jacobian(self, f: np.ndarray, base: np.ndarray) -> sp.csr_matrix:
        """Forward-difference Jacobian assembled color by color."""
        ni, nj = self.shape
        n = ni * nj
        step = math.sqrt(np.finfo(float).eps) * np.maximum(1.0, np.abs(f))
        rows: list[np.ndarray] = []
        cols: list[np.ndarray] = []
        vals: list[np.ndarray] = []
        ii, jj = np.meshgrid(np.arange(ni), np.arange(nj), indexing="ij")
        color = (ii % _COLOR_STRIDE) * _COLOR_STRIDE + jj % _COLOR_STRIDE
        reach = _COLOR_STRIDE // 2
        for c in range(_COLOR_STRIDE * _COLOR_STRIDE):
            mask = color == c
            if not np.any(mask):
                continue
            fp = f + np.where(mask, step, 0.0)
            dr = (self.residual(fp) - base).ravel()
            for i0, j0 in zip(ii[mask], jj[mask]):
                di = np.arange(max(i0 - reach, 0), min(i0 + reach, ni - 1) + 1)
                dj = np.arange(max(j0 - reach, 0), min(j0 + reach, nj - 1) + 1)
                rid = (di[:, None] * nj + dj[None, :]).ravel()
                rows.append(rid)
                cols.append(np.full(rid.size, i0 * nj + j0))
                vals.append(dr[rid] / step[i0, j0])
        mat = sp.coo_matrix(
            (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
            shape=(n, n),
        )
        return mat.tocsr()


def _newton_solve(disc: _Discretization, f0: np.ndarray, config: SolverConfig, pin: bool):
    """Damped Newton loop; returns (f, converged, history, iterations)."""
    f = f0.copy()
    n = f.size
    weights = (disc.area / disc.area.sum()).ravel() if pin else None
    res = disc.residual(f)
    norm = float(np.max(np.abs(res)))
    history = [norm]
    iterations = 0
    for _ in range(config.max_iter):
        if norm <= config.tol:
            break
        jac = disc.jacobian(f, res)
        if pin:
            w = sp.csr_matrix(weights[:, None])
            k = sp.bmat([[jac, w], [w.T, None]], format="csc")
            rhs = np.concatenate([-res.ravel(), [-(weights @ f.ravel())]])
            delta = spla.spsolve(k, rhs)[:n].reshape(f.shape)
        else:
            delta = spla.spsolve(jac.tocsc(), -res.ravel()).reshape(f.shape)
        if not np.all(np.isfinite(delta)):
            break
        t = 1.0
        while t >= 2.0**-30:
            trial = f + t * delta
            res_t = disc.residual(trial)
            norm_t = float(np.max(np.abs(res_t)))
            if norm_t <= (1.0 - 1e-4 * t) * norm or norm_t <= config.tol:
                break
            t *= 0.5
        else:
            break  # line search stalled
        f, res, norm = trial, res_t, norm_t
        iterations += 1
        history.append(norm)
    return f, norm <= config.tol, history, iterations


def _wall_integrals(
    disc_spans: tuple[np.ndarray, np.ndarray],
    profile: ContactProfile | None,
    override: Callable[[np.ndarray], np.ndarray] | None,
    r_max: float,
    side: str,
) -> np.ndarray:
    """Per-row wall-flux integrals: exact for profiles, Gauss for callables."""
    b_in, b_out = disc_spans
    if override is not None:
        return _gauss2(override, b_in, b_out)
    if profile is None:
        raise ValueError(f"side {side}: need a contact profile or a flux override")
    if profile.side != side:
        raise ValueError(f"profile tagged {profile.side!r} used on wall {side!r}")
    if profile.s_max < r_max * (1.0 - 1e-12):
        raise ValueError(
            f"profile on side {side} covers arclength {profile.s_max}, "
            f"mesh needs {r_max}"
        )
    hi = np.minimum(b_out, profile.s_max)
    return profile.integral_many(hi) - profile.integral_many(b_in)


def _arc_integrals(
    mesh: SectorMesh, fn: Callable[[np.ndarray], np.ndarray] | None, radius: float
) -> np.ndarray:
    """Per-column flux integrals through one circular arc (0 when closed)."""
    if fn is None:
        return np.zeros(mesh.n_theta + 1)
    t = mesh.thetas
    mids = 0.5 * (t[:-1] + t[1:])
    out = np.zeros(t.size)
    # each node owns the halves of its adjacent angular cells
    left = _gauss2(lambda x: np.asarray(fn(x), dtype=float), t[:-1], mids) * radius
    right = _gauss2(lambda x: np.asarray(fn(x), dtype=float), mids, t[1:]) * radius
    out[:-1] += left
    out[1:] += right
    return out


def _build_disc(
    mesh: SectorMesh,
    rhs_fn,
    profile_plus,
    profile_minus,
    *,
    source=None,
    wall_flux_plus=None,
    wall_flux_minus=None,
    arc_flux_inner=None,
    arc_flux_outer=None,
) -> _Discretization:
    r = mesh.radii
    s_face = 0.5 * (r[:-1] + r[1:])
    b_out = np.concatenate([[r[0]], s_face])
    b_in = np.concatenate([s_face, [r[-1]]])
    wall_m = _wall_integrals((b_in, b_out), profile_minus, wall_flux_minus, mesh.r_max, "-")
    wall_p = _wall_integrals((b_in, b_out), profile_plus, wall_flux_plus, mesh.r_max, "+")
    arc_o = _arc_integrals(mesh, arc_flux_outer, mesh.r_max)
    arc_i = _arc_integrals(mesh, arc_flux_inner, mesh.r_min)
    return _Discretization(mesh, rhs_fn, wall_m, wall_p, arc_o, arc_i, source)


def _check_balance(disc: _Discretization, lam_total: float, config: SolverConfig):
    """Flux/source compatibility for the rank-deficient (pinned) problem."""
    influx = float(
        disc.wall_minus.sum()
        + disc.wall_plus.sum()
        + disc.arc_outer.sum()
        + disc.arc_inner.sum()
    )
    src = lam_total + (0.0 if disc.source is None else float(disc.source.sum()))
    mismatch = influx - src
    scale = 1.0 + abs(influx) + abs(src)
    if abs(mismatch) > config.balance_tol * scale:
        raise ValueError(
            f"solvability balance violated: net boundary flux {influx} vs "
            f"source integral {src}"
        )
    return mismatch


def _applicability_note(mesh, profile_plus, profile_minus, diagnostics):
    if profile_plus is None or profile_minus is None:
        return
    tag = theorem1_applicability(
        mesh.geometry, hypothesis_from_profiles(profile_plus, profile_minus)
    )
    diagnostics["applicability"] = tag
    if tag == FAILS:
        warnings.warn(
            "contact-angle data violate the corner hypothesis; radial limits "
            "may not exist",
            RuntimeWarning,
            stacklevel=3,
        )


def solve_capillary(
    mesh: SectorMesh,
    kappa: float,
    lam: float,
    profile_plus: ContactProfile | None,
    profile_minus: ContactProfile | None,
    config: SolverConfig | None = None,
    *,
    source=None,
    wall_flux_plus=None,
    wall_flux_minus=None,
    arc_flux_inner=None,
    arc_flux_outer=None,
) -> SolutionField:
    """Solve div(Tf) = kappa*f + lam with contact-flux walls.

    Wall fluxes come from the profiles (exact per-face integrals of
    cos(gamma)) unless explicit flux callables override them; the circular
    arcs are closed (no flux) unless arc callables are given.  ``source``
    adds a solution-independent g(r, theta) to the right-hand side, which is
    how manufactured-solution runs inject their forcing.
    """
    if kappa < 0.0:
        raise ValueError(f"kappa must be nonnegative, got {kappa}")
    config = config or SolverConfig()
    rhs_fn = lambda r, t, z: kappa * z + lam
    disc = _build_disc(
        mesh,
        rhs_fn,
        profile_plus,
        profile_minus,
        source=source,
        wall_flux_plus=wall_flux_plus,
        wall_flux_minus=wall_flux_minus,
        arc_flux_inner=arc_flux_inner,
        arc_flux_outer=arc_flux_outer,
    )
    diagnostics: dict = {"problem": "capillary"}
    _applicability_note(mesh, profile_plus, profile_minus, diagnostics)
    pin = kappa == 0.0
    if pin:
        diagnostics["nullspace"] = _PIN_NOTE
        diagnostics["balance_mismatch"] = _check_balance(
            disc, lam * float(disc.area.sum()), config
        )
    if config.initial is not None:
        start = config.initial
    else:
        start = -lam / kappa if kappa > 0.0 else 0.0
    f0 = np.full(disc.shape, float(start))
    f, ok, history, iters = _newton_solve(disc, f0, config, pin)
    return SolutionField(
        mesh=mesh,
        values=f,
        kappa=kappa,
        lam=lam,
        converged=ok,
        residual_norm=history[-1],
        newton_iterations=iters,
        tol=config.tol,
        rhs_values=disc.rhs_at(f),
        residual_history=tuple(history),
        diagnostics=diagnostics,
    )


def solve_pmc(
    mesh: SectorMesh,
    curvature: Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray],
    profile_plus: ContactProfile | None,
    profile_minus: ContactProfile | None,
    config: SolverConfig | None = None,
    *,
    source=None,
    wall_flux_plus=None,
    wall_flux_minus=None,
    arc_flux_inner=None,
    arc_flux_outer=None,
) -> SolutionField:
    """Solve div(Tf) = 2 * curvature(x, y, f); curvature weakly increasing in f.

    Reduces exactly to solve_capillary when curvature(x,y,t) = (kappa*t+lam)/2
    and the same config (including ``initial``) is used.  Monotonicity is the
    caller's assertion; a sampled check over the solution range lands in
    diagnostics["monotone_ok"].
    """
    config = config or SolverConfig()

    def rhs_fn(r, t, z):
        return 2.0 * curvature(r * np.cos(t), r * np.sin(t), z)

    disc = _build_disc(
        mesh,
        rhs_fn,
        profile_plus,
        profile_minus,
        source=source,
        wall_flux_plus=wall_flux_plus,
        wall_flux_minus=wall_flux_minus,
        arc_flux_inner=arc_flux_inner,
        arc_flux_outer=arc_flux_outer,
    )
    diagnostics: dict = {"problem": "pmc"}
    _applicability_note(mesh, profile_plus, profile_minus, diagnostics)
    start = config.initial if config.initial is not None else 0.0
    f0 = np.full(disc.shape, float(start))
    # flat sampled curvature slope means a pure Neumann problem: pin the mean
    probe = 1e-6
    slope = np.abs(
        np.asarray(rhs_fn(disc.r_col, disc.t_row, f0 + probe), dtype=float)
        - np.asarray(rhs_fn(disc.r_col, disc.t_row, f0), dtype=float)
    ) / probe
    pin = float(np.max(slope)) < 1e-13
    if pin:
        diagnostics["nullspace"] = _PIN_NOTE
        rhs0 = np.asarray(rhs_fn(disc.r_col, disc.t_row, f0), dtype=float)
        diagnostics["balance_mismatch"] = _check_balance(
            disc, float((rhs0 * disc.area).sum()), config
        )
    f, ok, history, iters = _newton_solve(disc, f0, config, pin)
    rhs_final = disc.rhs_at(f)
    lo, hi = float(np.min(f)), float(np.max(f))
    ts = np.linspace(lo, hi, 5) if hi > lo else np.array([lo, lo + 1.0])
    samples = [
        np.asarray(rhs_fn(disc.r_col, disc.t_row, np.full(disc.shape, tv)), dtype=float)
        for tv in ts
    ]
    mono = all(
        np.all(b >= a - 1e-12 * (1.0 + np.abs(a)))
        for a, b in zip(samples, samples[1:])
    )
    diagnostics["monotone_ok"] = bool(mono)
    if not mono:
        warnings.warn(
            "sampled curvature decreases in the height argument on the "
            "solution range",
            RuntimeWarning,
            stacklevel=2,
        )
    return SolutionField(
        mesh=mesh,
        values=f,
        kappa=None,
        lam=None,
        converged=ok,
        residual_norm=history[-1],
        newton_iterations=iters,
        tol=config.tol,
        rhs_values=rhs_final,
        residual_history=tuple(history),
        diagnostics=diagnostics,
    )


def synthetic_field(
    mesh: SectorMesh,
    fn: Callable[[np.ndarray, np.ndarray], np.ndarray],
    kappa: float = 0.0,
    lam: float = 0.0,
) -> SolutionField:
    """Field with prescribed nodal values, marked converged; for trace tests."""
    r = mesh.radii[:, None]
    t = mesh.thetas[None, :]
    vals = np.asarray(fn(r, t), dtype=float) * np.ones((mesh.m + 1, mesh.n_theta + 1))
    return SolutionField(
        mesh=mesh,
        values=vals,
        kappa=kappa,
        lam=lam,
        converged=True,
        residual_norm=0.0,
        newton_iterations=0,
        tol=1e-10,
        rhs_values=kappa * vals + lam,
        diagnostics={"problem": "synthetic"},
    )


# ---------------------------------------------------------------------------
# radial limits


@dataclass(frozen=True, eq=False)
class RadialTrace:
    """Solution values on the innermost radii plus extrapolated corner limits."""

    radii: np.ndarray  # strictly decreasing subset used for extrapolation
    thetas: np.ndarray
    values: np.ndarray  # shape (len(radii), len(thetas))
    rf: np.ndarray  # extrapolated limit per theta
    residual: np.ndarray  # per-theta extrapolation residual

    def __post_init__(self) -> None:
        if np.any(np.diff(self.radii) >= 0.0):
            raise ValueError("trace radii must be strictly decreasing")
        if self.values.shape != (self.radii.size, self.thetas.size):
            raise ValueError("trace value shape mismatch")
        if self.rf.shape != self.thetas.shape or self.residual.shape != self.thetas.shape:
            raise ValueError("per-theta arrays must match the theta grid")


def radial_trace(
    field: SolutionField, n_radii: int, allow_unconverged: bool = False
) -> RadialTrace:
    """Extrapolate f(r, theta) -> r = 0 from the n_radii smallest radii.

    The mesh radii form a geometric sequence, so repeated Richardson steps
    with the known ratio remove integer powers of r one at a time; the
    reported residual per theta is the magnitude of the last correction.
    """
    if not field.converged and not allow_unconverged:
        raise RuntimeError("radial_trace requires a converged field")
    mesh = field.mesh
    if not (2 <= n_radii <= mesh.m):
        raise ValueError(f"n_radii must lie in [2, m={mesh.m}], got {n_radii}")
    radii_desc = mesh.radii[-n_radii:]
    vals_desc = field.values[-n_radii:, :]
    xs = radii_desc[::-1]  # ascending from the smallest radius
    tableau = vals_desc[::-1, :].copy()
    q = float(xs[1] / xs[0])
    top_prev = tableau[0].copy()
    top = tableau[0].copy()
    for level in range(1, n_radii):
        factor = q**level - 1.0
        # difference form keeps exact constants exact
        tableau = tableau[:-1] + (tableau[:-1] - tableau[1:]) / factor
        top_prev = top
        top = tableau[0].copy()
    residual = np.abs(top - top_prev)
    return RadialTrace(
        radii=radii_desc.copy(),
        thetas=mesh.thetas.copy(),
        values=vals_desc.copy(),
        rf=top,
        residual=residual,
    )


# ---------------------------------------------------------------------------
# fan classification


CASE_CONSTANT = "constant"
CASE_UNCLASSIFIED = "unclassified"


@dataclass(frozen=True, eq=False)
class FanMeasurement:
    """Wall-fan decomposition of a radial-limit trace.

    ``alpha1``/``alpha2`` bound the non-constant middle; the wall fans are
    beta_minus = alpha1 + alpha and beta_plus = alpha - alpha2.  For the
    plateau cases the interior plateau [alpha_l, alpha_r] must span pi.  The
    constant case reports alpha1 = alpha and alpha2 = -alpha so the fan
    widths still partition the opening.
    """

    case: str
    alpha: float
    alpha1: float
    alpha2: float
    alpha_l: float | None
    alpha_r: float | None
    tolerance: float
    diagnostics: dict = dc_field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.case not in (CASE_CONSTANT, CASE_UNCLASSIFIED, "I", "D", "ID", "DI"):
            raise ValueError(f"unknown case tag {self.case!r}")
        a = self.alpha
        if self.case not in (CASE_CONSTANT, CASE_UNCLASSIFIED):
            if not (-a <= self.alpha1 < self.alpha2 <= a):
                raise ValueError("need -alpha <= alpha1 < alpha2 <= alpha")
        if self.case in ("ID", "DI"):
            if self.alpha_l is None or self.alpha_r is None:
                raise ValueError("plateau cases need alpha_l and alpha_r")
            # the plateau edges live on the grid, so allow one spacing of slack
            slack = self.tolerance + self.diagnostics.get("grid_spacing", 0.0)
            if abs((self.alpha_r - self.alpha_l) - math.pi) > slack:
                raise ValueError("interior plateau must span pi within tolerance")

    @property
    def beta_minus(self) -> float:
        return self.alpha1 + self.alpha

    @property
    def beta_plus(self) -> float:
        return self.alpha - self.alpha2


def _longest_flat_window(vals: np.ndarray, tol: float) -> tuple[int, int]:
    """Indices [a, b] of the widest window with value range <= tol."""
    best = (0, 0)
    lo = 0
    mins: deque = deque()
    maxs: deque = deque()
    for hi, v in enumerate(vals):
        while mins and vals[mins[-1]] >= v:
            mins.pop()
        mins.append(hi)
        while maxs and vals[maxs[-1]] <= v:
            maxs.pop()
        maxs.append(hi)
        while vals[maxs[0]] - vals[mins[0]] > tol:
            lo += 1
            if mins[0] < lo:
                mins.popleft()
            if maxs[0] < lo:
                maxs.popleft()
        if hi - lo > best[1] - best[0]:
            best = (lo, hi)
    return best


def measure_fans(rf: np.ndarray, thetas: np.ndarray, tol: float) -> FanMeasurement:
    """Classify a radial-limit trace into wall fans and a monotone middle.

    Plateaus are maximal runs whose value range stays within ``tol``.  The
    interior-plateau cases additionally require the opening to exceed pi and
    the plateau to span pi within one grid spacing plus ``tol``.
    """
    rf = np.asarray(rf, dtype=float)
    thetas = np.asarray(thetas, dtype=float)
    if rf.shape != thetas.shape or rf.ndim != 1 or rf.size < 3:
        raise ValueError("need matching 1-d rf/theta arrays with >= 3 samples")
    if tol <= 0.0:
        raise ValueError("tolerance must be positive")
    alpha = float(thetas[-1])
    dth = float(thetas[1] - thetas[0])
    diag: dict = {
        "total_variation": float(np.max(rf) - np.min(rf)),
        "grid_spacing": dth,
    }

    def constant_case() -> FanMeasurement:
        return FanMeasurement(
            case=CASE_CONSTANT,
            alpha=alpha,
            alpha1=alpha,
            alpha2=-alpha,
            alpha_l=None,
            alpha_r=None,
            tolerance=tol,
            diagnostics=diag,
        )

    if diag["total_variation"] <= tol:
        return constant_case()

    # maximal wall plateaus: cumulative range from each end
    cum_max = np.maximum.accumulate(rf)
    cum_min = np.minimum.accumulate(rf)
    left_ok = (cum_max - cum_min) <= tol
    k_left = int(np.max(np.nonzero(left_ok)[0])) if left_ok[0] else 0
    rcum_max = np.maximum.accumulate(rf[::-1])
    rcum_min = np.minimum.accumulate(rf[::-1])
    right_ok = (rcum_max - rcum_min) <= tol
    k_right = (
        rf.size - 1 - int(np.max(np.nonzero(right_ok)[0])) if right_ok[0] else rf.size - 1
    )
    if k_left >= k_right:
        return constant_case()

    mid = rf[k_left : k_right + 1]
    diffs = np.diff(mid)
    net = float(mid[-1] - mid[0])
    diag.update(k_left=k_left, k_right=k_right, net_change=net)
    a1, a2 = float(thetas[k_left]), float(thetas[k_right])

    def classified(case: str, al=None, ar=None) -> FanMeasurement:
        return FanMeasurement(
            case=case,
            alpha=alpha,
            alpha1=a1,
            alpha2=a2,
            alpha_l=al,
            alpha_r=ar,
            tolerance=tol,
            diagnostics=diag,
        )

    if np.all(diffs >= -tol) and net > tol:
        return classified("I")
    if np.all(diffs <= tol) and net < -tol:
        return classified("D")

    # non-monotone middle: look for an interior plateau spanning pi
    a, b = _longest_flat_window(mid, tol)
    a += k_left
    b += k_left
    width = float(thetas[b] - thetas[a])
    diag.update(plateau=(int(a), int(b)), plateau_width=width)
    width_tol = dth + tol
    gate = 2.0 * alpha > math.pi
    left_net = float(rf[a] - rf[k_left])
    right_net = float(rf[k_right] - rf[b])
    left_mono_up = np.all(np.diff(rf[k_left : a + 1]) >= -tol) and left_net > tol
    left_mono_dn = np.all(np.diff(rf[k_left : a + 1]) <= tol) and left_net < -tol
    right_mono_up = np.all(np.diff(rf[b : k_right + 1]) >= -tol) and right_net > tol
    right_mono_dn = np.all(np.diff(rf[b : k_right + 1]) <= tol) and right_net < -tol
    if gate and abs(width - math.pi) <= width_tol and a > k_left and b < k_right:
        if left_mono_up and right_mono_dn:
            return classified("ID", al=float(thetas[a]), ar=float(thetas[b]))
        if left_mono_dn and right_mono_up:
            return classified("DI", al=float(thetas[a]), ar=float(thetas[b]))
    diag["gate_2alpha_gt_pi"] = gate
    return FanMeasurement(
        case=CASE_UNCLASSIFIED,
        alpha=alpha,
        alpha1=a1,
        alpha2=a2,
        alpha_l=None,
        alpha_r=None,
        tolerance=tol,
        diagnostics=diag,
    )


def fans_from_trace(trace: RadialTrace, tol: float | None = None) -> FanMeasurement:
    """Fan classification with the noise-aware default tolerance.

    When ``tol`` is omitted it defaults to 10x the median extrapolation
    residual (floored at 1e-12) so plateaus must clear extrapolation noise.
    """
    if tol is None:
        tol = max(10.0 * float(np.median(trace.residual)), 1e-12)
    return measure_fans(trace.rf, trace.thetas, tol)


# ---------------------------------------------------------------------------
# manufactured verification case


@dataclass(frozen=True)
class ManufacturedCase:
    """Forcing and boundary data that make r^2 cos(theta) the exact solution."""

    alpha: float
    kappa: float
    lam: float

    def exact(self, r, theta):
        return r**2 * np.cos(theta)

    def _w(self, r, theta):
        return np.sqrt(1.0 + r**2 * (1.0 + 3.0 * np.cos(theta) ** 2))

    def source(self, r, theta):
        # divergence of the normalized slope field of r^2 cos(theta), minus
        # the capillary right-hand side at the exact solution
        w = self._w(r, theta)
        div = 3.0 * np.cos(theta) / w - r**2 * np.cos(theta) * (
            5.0 + 3.0 * np.cos(theta) ** 2
        ) / w**3
        return div - self.kappa * self.exact(r, theta) - self.lam

    def wall_flux(self, r):
        # outward slope flux on either wall; symmetric because cos is even
        return -r * math.sin(self.alpha) / self._w(r, self.alpha)

    def arc_flux_outer(self, r_max: float):
        return lambda theta: 2.0 * r_max * np.cos(theta) / self._w(r_max, theta)

    def arc_flux_inner(self, r_min: float):
        return lambda theta: -2.0 * r_min * np.cos(theta) / self._w(r_min, theta)


def manufactured_case(alpha: float = 1.0, kappa: float = 1.0, lam: float = 0.3):
    return ManufacturedCase(alpha=alpha, kappa=kappa, lam=lam)


def manufactured_solve(
    case: ManufacturedCase,
    m: int,
    n_theta: int,
    r_min: float = 0.1,
    r_max: float = 1.0,
    config: SolverConfig | None = None,
) -> tuple[SolutionField, float]:
    """Solve one manufactured run; returns (field, max nodal error)."""
    mesh = build_sector_mesh(WedgeGeometry(case.alpha), r_min, r_max, m, n_theta)
    field = solve_capillary(
        mesh,
        case.kappa,
        case.lam,
        None,
        None,
        config or SolverConfig(initial=0.0),
        source=case.source,
        wall_flux_plus=case.wall_flux,
        wall_flux_minus=case.wall_flux,
        arc_flux_inner=case.arc_flux_inner(r_min),
        arc_flux_outer=case.arc_flux_outer(r_max),
    )
    exact = case.exact(mesh.radii[:, None], mesh.thetas[None, :])
    err = float(np.max(np.abs(field.values - exact)))
    return field, err


def manufactured_convergence(
    sizes: tuple[int, ...] = (32, 64, 128),
    case: ManufacturedCase | None = None,
    r_min: float = 0.1,
    r_max: float = 1.0,
) -> dict:
    """Max-norm errors across refinements and the observed order per doubling."""
    case = case or manufactured_case()
    errors = []
    for s in sizes:
        _, err = manufactured_solve(case, s, s, r_min=r_min, r_max=r_max)
        errors.append(err)
    rates = [
        math.log(errors[i] / errors[i + 1])
        / math.log(sizes[i + 1] / sizes[i])
        for i in range(len(sizes) - 1)
    ]
    return {"sizes": list(sizes), "errors": errors, "rates": rates}
