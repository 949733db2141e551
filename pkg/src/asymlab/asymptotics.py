"""Profile extraction and the boundary-integral route to the log coefficient.

A potential with quadratic asymptotics satisfies
u ~ x'Ax/2 + b'x + c + Gamma, Gamma = (d/2) log(x'Lx), where the kernel L
depends on the equation (I + A^2 for SLE, A for MA, A^2 for IHH) and d is
also a boundary integral over any curve enclosing the hole.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import AsymptoticProfile, EquationSpec, PotentialFn, SymMat
from .errors import (BadParams, IllConditioned, NoDecay, NonPositiveValue,
                     WrongDimension)

EXACT_FLOOR = 1e-12
EXACT_SLOPE = -math.inf
DEFAULT_QUAD_ORDER = 512


@dataclass(frozen=True)
class ShellSpec:
    radii: tuple
    points_per_shell: int = 64

    def __post_init__(self):
        r = tuple(float(v) for v in self.radii)
        object.__setattr__(self, "radii", r)
        if len(r) < 2 or any(b <= a for a, b in zip(r, r[1:])):
            raise BadParams("radii must be strictly increasing, >= 2 of them")
        if self.points_per_shell < 32:
            raise BadParams("points_per_shell must be >= 32")


def shell_points(radius: float, n: int, dim: int, seed: int | None = None) -> np.ndarray:
    """Deterministic sample points on a sphere of given radius.

    2D: equiangular; 3D: Fibonacci spiral.  A seed rotates the pattern so
    repeated sweeps decorrelate, without losing determinism.
    """
    if dim == 2:
        offset = 0.0
        if seed is not None:
            offset = (seed % 997) * (2 * math.pi / 997)
        th = np.arange(n) * (2 * math.pi / n) + offset
        return radius * np.stack([np.cos(th), np.sin(th)], axis=1)
    golden = math.pi * (3.0 - math.sqrt(5.0))
    k = np.arange(n)
    zc = 1.0 - (2.0 * k + 1.0) / n
    rc = np.sqrt(np.clip(1.0 - zc * zc, 0.0, None))
    phi = k * golden + (0.0 if seed is None else (seed % 997) * 0.01)
    return radius * np.stack([rc * np.cos(phi), rc * np.sin(phi), zc], axis=1)


def hessian_limit(P: PotentialFn, shells: ShellSpec) -> tuple[SymMat, float]:
    """Far-field Hessian A (outermost-shell mean) and the decay slope of
    the per-shell max of ||D^2 P - A||.

    Raises NoDecay when the outermost residual exceeds the innermost one:
    the Hessian is not settling (e.g. critical-phase counterexamples).
    """
    hessians = []
    for r in shells.radii:
        pts = shell_points(r, shells.points_per_shell, P.dim)
        hessians.append(np.array([P.hess(x).m for x in pts]))
    A = hessians[-1].mean(axis=0)
    A = 0.5 * (A + A.T)
    res = np.array([np.max(np.linalg.norm(h - A, axis=(1, 2))) for h in hessians])
    scale = 1.0 + np.abs(A).max()
    if res[-1] <= EXACT_FLOOR * scale:
        return SymMat(A), EXACT_SLOPE
    if res[-1] > res[0]:
        raise NoDecay(
            f"Hessian residual grows with radius ({res[0]:.3g} -> {res[-1]:.3g})")
    slope = _log_slope(np.asarray(shells.radii), res)
    return SymMat(A), slope


def _log_slope(r: np.ndarray, v: np.ndarray) -> float:
    mask = v > 0
    if mask.sum() < 2:
        return EXACT_SLOPE
    return float(np.polyfit(np.log(r[mask]), np.log(v[mask]), 1)[0])


def decay_exponent(samples) -> float:
    """Least-squares slope of log(value) against log(r)."""
    r = np.array([float(a) for a, _ in samples])
    v = np.array([float(b) for _, b in samples])
    if len(r) < 3 or len(np.unique(r)) < 3:
        raise BadParams("need >= 3 distinct radii")
    if np.any(v <= 0):
        raise NonPositiveValue("decay_exponent needs positive values")
    return float(np.polyfit(np.log(r), np.log(v), 1)[0])


def log_kernel(spec: EquationSpec, A: SymMat) -> SymMat:
    """The matrix L of the log term, per equation."""
    a = A.m
    if spec.kind == "SLE":
        L = np.eye(A.dim) + a @ a
    elif spec.kind == "MA":
        L = a.copy()
    elif spec.kind == "IHH":
        L = a @ a
    else:
        raise BadParams(f"no 2D log kernel for {spec.kind}")
    return SymMat(0.5 * (L + L.T))


def fit_profile(P: PotentialFn, spec: EquationSpec, shells: ShellSpec,
                seed: int | None = None) -> AsymptoticProfile:
    """Two-stage fit: A from the Hessian limit, then linear least squares for
    (b, c, d) against {x1, x2, 1, log(x'Lx)/2} over all shell samples.
    The log column is dropped for dim 3 (no log term in the expansion)."""
    A, _ = hessian_limit(P, shells)
    with_log = P.dim == 2
    L = log_kernel(spec, A) if with_log else SymMat.identity(P.dim)

    rows, rhs, radii_of = [], [], []
    for r in shells.radii:
        for x in shell_points(r, shells.points_per_shell, P.dim, seed=seed):
            basis = list(x) + [1.0]
            if with_log:
                basis.append(0.5 * math.log(x @ L.m @ x))
            rows.append(basis)
            rhs.append(P.value(x) - 0.5 * x @ A.m @ x)
            radii_of.append(r)
    D = np.array(rows)
    y = np.array(rhs)
    if np.linalg.cond(D) > 1e12:
        raise IllConditioned("normal equations condition number exceeds 1e12")
    coef, *_ = np.linalg.lstsq(D, y, rcond=None)
    b = coef[:P.dim]
    c = float(coef[P.dim])
    d = float(coef[P.dim + 1]) if with_log else 0.0

    resid = np.abs(D @ coef - y)
    radii_of = np.array(radii_of)
    per_shell = np.array([resid[radii_of == r].max() for r in shells.radii])
    scale = 1.0 + np.abs(y).max()
    if per_shell[-1] <= EXACT_FLOOR * scale:
        slope = EXACT_SLOPE
    else:
        slope = _log_slope(np.asarray(shells.radii), per_shell)
    return AsymptoticProfile(A, b, c, d, L, slope)


# ---------------------------------------------------------------------------
# boundary integrals
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BoundaryCurve:
    """Smooth, simple, positively oriented closed curve t in [0, 2pi)."""

    gamma: Callable[[float], np.ndarray]
    dgamma: Callable[[float], np.ndarray]
    order: int = DEFAULT_QUAD_ORDER

    @staticmethod
    def circle(radius: float, center=(0.0, 0.0), order: int = DEFAULT_QUAD_ORDER):
        cx, cy = center
        return BoundaryCurve(
            lambda t: np.array([cx + radius * math.cos(t), cy + radius * math.sin(t)]),
            lambda t: np.array([-radius * math.sin(t), radius * math.cos(t)]),
            order)

    @staticmethod
    def ellipse_of_kernel(L: SymMat, R: float, order: int = DEFAULT_QUAD_ORDER):
        """The level curve {x : x'Lx = R^2} for positive definite L."""
        w, V = np.linalg.eigh(L.m)
        if w[0] <= 0:
            raise BadParams("kernel must be positive definite")
        S = V @ np.diag(1.0 / np.sqrt(w)) @ V.T
        return BoundaryCurve(
            lambda t: R * (S @ np.array([math.cos(t), math.sin(t)])),
            lambda t: R * (S @ np.array([-math.sin(t), math.cos(t)])),
            order)

    def quad_nodes(self):
        t = np.arange(self.order) * (2 * math.pi / self.order)
        return t, 2 * math.pi / self.order

    def enclosed_area(self) -> float:
        t, h = self.quad_nodes()
        acc = 0.0
        for ti in t:
            g, dg = self.gamma(ti), self.dgamma(ti)
            acc += 0.5 * (g[0] * dg[1] - g[1] * dg[0])
        return acc * h


def _curve_integral(curve: BoundaryCurve, integrand) -> float:
    """Composite trapezoid of integrand(x, nu) * |gamma'| over the closed
    curve; spectrally accurate for smooth periodic data."""
    t, h = curve.quad_nodes()
    acc = 0.0
    for ti in t:
        g, dg = curve.gamma(ti), curve.dgamma(ti)
        speed = math.hypot(dg[0], dg[1])
        nu = np.array([dg[1], -dg[0]]) / speed
        acc += integrand(g, nu) * speed
    return acc * h


def _div_form(spec: EquationSpec):
    """Weights (laplace_w, cross_w, area_w) of the divergence identity
    integrand: laplace_w * u_nu + cross_w * u_1 (u_22, -u_12).nu, whose bulk
    counterpart integrates laplace_w * tr + cross_w * det minus area_w."""
    if spec.kind == "SLE":
        return math.cos(spec.theta), math.sin(spec.theta), math.sin(spec.theta)
    if spec.kind == "MA":
        return 0.0, 1.0, 1.0
    if spec.kind == "IHH":
        return -1.0, 1.0, 0.0
    raise BadParams(f"no boundary formula for {spec.kind}")


def boundary_d(spec: EquationSpec, P: PotentialFn, curve: BoundaryCurve) -> float:
    """The log coefficient as a boundary integral over a curve enclosing the
    hole, d = (integral - area term) / 2pi."""
    if spec.dim != 2 or P.dim != 2:
        raise WrongDimension("boundary_d is 2D only")
    lw, cw, aw = _div_form(spec)

    def integrand(x, nu):
        g = P.grad(x)
        H = P.hess(x).m
        flux = lw * (g @ nu)
        flux += cw * g[0] * (H[1, 1] * nu[0] - H[0, 1] * nu[1])
        return flux

    total = _curve_integral(curve, integrand)
    return (total - aw * curve.enclosed_area()) / (2 * math.pi)


def flux_identity(spec: EquationSpec, A: SymMat, d: float, R: float,
                  b=None, order: int = DEFAULT_QUAD_ORDER) -> float:
    """Flux of the linearized log term through the kernel ellipse of radius R.

    Integrates the cross terms of the equation's algebraic form between
    Q = x'Ax/2 + b'x and Gamma = (d/2) log(x'Lx); the result is 2*pi*d
    independently of R, by the distributional identity concentrating the
    bulk integrand at the origin.
    """
    if A.dim != 2:
        raise WrongDimension("flux identity is 2D only")
    L = log_kernel(spec, A)
    lw, cw, _ = _div_form(spec)
    b = np.zeros(2) if b is None else np.asarray(b, dtype=float)
    Am = A.m
    Lm = L.m
    curve = BoundaryCurve.ellipse_of_kernel(L, R, order)

    def integrand(x, nu):
        q = x @ Lm @ x
        Lx = Lm @ x
        dGamma = d * Lx / q
        HGamma = d * (Lm / q - 2.0 * np.outer(Lx, Lx) / q ** 2)
        Q1 = Am[0] @ x + b[0]
        flux = lw * (dGamma @ nu)
        flux += cw * (Q1 * (HGamma[1, 1] * nu[0] - HGamma[0, 1] * nu[1])
                      + dGamma[0] * (Am[1, 1] * nu[0] - Am[0, 1] * nu[1]))
        return flux

    return _curve_integral(curve, integrand)
