"""Changes of variables: U(n) rotation of the gradient graph, Legendre
transform, and the shifted (Legendre-Lewy) transform for sigma_2 solutions.

The rotation by angle vartheta sends (x, Du) to
(c x + s Du, -s x + c Du) with (c, s) = (cos vartheta, sin vartheta);
every Hessian eigen-angle arctan(lambda_i) drops by vartheta.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import EquationSpec, PotentialFn, SymMat, eig_sym
from .errors import (BadParams, InverseMapDiverged, NotAdmissible, NotConvex,
                     SingularRotation, StripViolation)

NEWTON_TOL = 1e-12
NEWTON_MAX_ITER = 100


@dataclass(frozen=True)
class RotationParams:
    vartheta: float

    def __post_init__(self):
        if not 0 < self.vartheta < math.pi / 2:
            raise BadParams(f"vartheta must be in (0, pi/2), got {self.vartheta}")

    @property
    def c(self) -> float:
        return math.cos(self.vartheta)

    @property
    def s(self) -> float:
        return math.sin(self.vartheta)

    @staticmethod
    def from_spec(spec: EquationSpec) -> "RotationParams":
        """vartheta = (Theta - (n-2)pi/2)/n, so the rotated phase is critical."""
        if spec.kind != "SLE" or not spec.supercritical:
            raise BadParams("rotation parameters need a supercritical SLE spec")
        if spec.theta <= (spec.dim - 2) * math.pi / 2:
            raise BadParams("rotation device assumes Theta > (n-2)pi/2; "
                            "apply the symmetry u -> -u first")
        return RotationParams((spec.theta - (spec.dim - 2) * math.pi / 2) / spec.dim)


def rotate_hessian(M: SymMat, vartheta: float) -> SymMat:
    """Eigenvalue map lambda_i -> tan(arctan(lambda_i) - vartheta),
    eigenvectors unchanged."""
    c, s = math.cos(vartheta), math.sin(vartheta)
    w, V = eig_sym(M)
    if np.min(np.abs(c + s * w)) < 1e-12:
        raise SingularRotation("cos I + sin M is numerically singular")
    wt = np.tan(np.arctan(w) - vartheta)
    return SymMat(V @ np.diag(wt) @ V.T)


def unrotate_hessian(Mt: SymMat, vartheta: float) -> SymMat:
    """Inverse of rotate_hessian; requires lambda_max(Mt) < cot(vartheta)."""
    c, s = math.cos(vartheta), math.sin(vartheta)
    w, V = eig_sym(Mt)
    if np.max(w) >= c / s - 1e-12:
        raise StripViolation(
            f"lambda_max = {np.max(w):.6g} >= cot(vartheta) = {c / s:.6g}")
    wt = (s + c * w) / (c - s * w)
    return SymMat(V @ np.diag(wt) @ V.T)


def forward_point(x, gradient, vartheta: float):
    """(x, y) -> (c x + s y, -s x + c y) on one point of the gradient graph."""
    c, s = math.cos(vartheta), math.sin(vartheta)
    x = np.asarray(x, dtype=float)
    y = np.asarray(gradient, dtype=float)
    return c * x + s * y, -s * x + c * y


def _newton_invert(target, guess, fun, jac, what: str):
    """Damped Newton for fun(p) = target with step-halving on the residual."""
    p = np.array(guess, dtype=float)
    g = fun(p) - target
    for _ in range(NEWTON_MAX_ITER):
        nrm = np.linalg.norm(g)
        if nrm <= NEWTON_TOL * (1.0 + np.linalg.norm(target)):
            return p
        step = np.linalg.solve(jac(p), g)
        t = 1.0
        while t > 2.0 ** -30:
            p_new = p - t * step
            g_new = fun(p_new) - target
            if np.linalg.norm(g_new) < nrm:
                p, g = p_new, g_new
                break
            t *= 0.5
        else:
            raise InverseMapDiverged(f"{what}: line search stalled at |g|={nrm:.3g}")
    raise InverseMapDiverged(f"{what}: no convergence in {NEWTON_MAX_ITER} iterations")


def _check_hessian_bound(P: PotentialFn, lower: float, n_samples: int = 64):
    """Sample eigenvalue lower bound on a few shells of P's domain."""
    rng = np.random.default_rng(7)
    radii = P.rho * np.array([1.05, 2.0, 8.0]) if P.rho > 0 else np.array([1.0, 4.0, 16.0])
    for r in radii:
        for _ in range(n_samples // len(radii)):
            d = rng.normal(size=P.dim)
            x = r * d / np.linalg.norm(d)
            w = np.linalg.eigvalsh(P.hess(x).m)
            if w[0] <= lower:
                raise NotAdmissible(
                    f"sampled Hessian eigenvalue {w[0]:.6g} <= required bound {lower:.6g}")


def rotate_potential(P: PotentialFn, vartheta: float, *,
                     hessian_hint: SymMat | None = None,
                     check: bool = True) -> PotentialFn:
    """New potential of the rotated gradient graph.

    Evaluation at a rotated point xt inverts xt = c x + s DP(x) by damped
    Newton; the map is the gradient of the convex c|x|^2/2 + s P under the
    precondition D^2 P > (1 - cot vartheta) I.
    """
    c, s = math.cos(vartheta), math.sin(vartheta)
    if check:
        _check_hessian_bound(P, 1.0 - c / s)

    predictor = None
    if hessian_hint is not None:
        predictor = np.linalg.inv(c * np.eye(P.dim) + s * hessian_hint.m)

    def invert(xt):
        guess = predictor @ xt if predictor is not None else xt
        return _newton_invert(
            xt, guess,
            lambda p: c * p + s * P.grad(p),
            lambda p: c * np.eye(P.dim) + s * P.hess(p).m,
            "rotate_potential point inversion")

    def value(xt):
        x = invert(xt)
        g = P.grad(x)
        return (0.5 * c * s * (g @ g - x @ x) - s * s * (g @ x) + P.value(x))

    def grad(xt):
        x = invert(xt)
        return -s * x + c * P.grad(x)

    def hess(xt):
        x = invert(xt)
        return rotate_hessian(P.hess(x), vartheta)

    return PotentialFn(P.dim, _rotated_rho(P.rho, vartheta), value, grad, hess)


def unrotate_potential(Pt: PotentialFn, vartheta: float, *,
                       hessian_hint: SymMat | None = None,
                       check: bool = True) -> PotentialFn:
    """Rotation by -vartheta: recover u from the rotated potential.

    Requires lambda_max(D^2 Pt) < cot(vartheta) on the evaluation set (the
    strip bound); the additive constant is fixed by the defining formula.
    """
    c, s = math.cos(vartheta), math.sin(vartheta)
    if check:
        _check_strip(Pt, vartheta)

    predictor = None
    if hessian_hint is not None:
        jac = c * np.eye(Pt.dim) - s * hessian_hint.m
        if np.min(np.linalg.eigvalsh(0.5 * (jac + jac.T))) <= 0:
            raise StripViolation("far-field Hessian hint violates the strip bound")
        predictor = np.linalg.inv(jac)

    def invert(x):
        guess = predictor @ x if predictor is not None else x
        return _newton_invert(
            x, guess,
            lambda p: c * p - s * Pt.grad(p),
            lambda p: c * np.eye(Pt.dim) - s * Pt.hess(p).m,
            "unrotate_potential point inversion")

    def value(x):
        xt = invert(x)
        g = Pt.grad(xt)
        return (-0.5 * c * s * (g @ g - xt @ xt) - s * s * (g @ xt) + Pt.value(xt))

    def grad(x):
        xt = invert(x)
        return s * xt + c * Pt.grad(xt)

    def hess(x):
        xt = invert(x)
        return unrotate_hessian(Pt.hess(xt), vartheta)

    return PotentialFn(Pt.dim, _rotated_rho(Pt.rho, vartheta), value, grad, hess)


def _rotated_rho(rho: float, vartheta: float) -> float:
    # distance-increase gives |xt1 - xt2| >= sin(vartheta) |x1 - x2|; the
    # image of {|x| > rho} contains an exterior set of comparable radius.
    return rho * math.sin(vartheta)


def _check_strip(Pt: PotentialFn, vartheta: float, n_samples: int = 64):
    cot = math.cos(vartheta) / math.sin(vartheta)
    rng = np.random.default_rng(11)
    radii = Pt.rho * np.array([1.05, 2.0, 8.0]) if Pt.rho > 0 else np.array([1.0, 4.0, 16.0])
    for r in radii:
        for _ in range(n_samples // len(radii)):
            d = rng.normal(size=Pt.dim)
            x = r * d / np.linalg.norm(d)
            lam = np.linalg.eigvalsh(Pt.hess(x).m)[-1]
            if lam >= cot - 1e-12:
                raise StripViolation(
                    f"sampled lambda_max = {lam:.6g} >= cot(vartheta) = {cot:.6g}")


def legendre(P: PotentialFn, *, mu: float | None = None,
             check: bool = True) -> PotentialFn:
    """Convex conjugate: ubar(y) = x.y - u(x) at x = (Du)^-1(y)."""
    if check:
        try:
            _check_hessian_bound(P, mu if mu is not None else 0.0)
        except NotAdmissible as e:
            raise NotConvex(str(e)) from e

    def invert(y):
        return _newton_invert(
            y, y,
            lambda p: P.grad(p),
            lambda p: P.hess(p).m,
            "legendre point inversion")

    def value(y):
        x = invert(y)
        return x @ y - P.value(x)

    def grad(y):
        return invert(y)

    def hess(y):
        x = invert(y)
        return SymMat(np.linalg.inv(P.hess(x).m))

    return PotentialFn(P.dim, 0.0, value, grad, hess)


def legendre_lewy(P: PotentialFn, spec: EquationSpec, *,
                  check: bool = True) -> PotentialFn:
    """Shifted Legendre transform for sigma_2 solutions.

    With K = sqrt(2/(n(n-1))) and w = u + K|x|^2/2, returns -legendre(w);
    the output Hessian is -(D^2 u + K I)^-1, pinched in (-I/delta, 0).
    """
    from .equations import sigma2_margin

    if spec.kind != "SIGMA2":
        raise BadParams("legendre_lewy applies to SIGMA2 specs")
    K = sigma2_margin(spec.dim)
    if check:
        try:
            _check_hessian_bound(P, spec.delta - K)
        except NotAdmissible as e:
            raise NotAdmissible(
                f"D^2 u > (delta - K) I fails on samples: {e}") from e

    def invert(y):
        # y = Dw(x) = Du(x) + K x, with D^2 w > delta I
        return _newton_invert(
            y, y / (1.0 + K),
            lambda p: P.grad(p) + K * p,
            lambda p: P.hess(p).m + K * np.eye(P.dim),
            "legendre_lewy point inversion")

    def value(y):
        x = invert(y)
        w = P.value(x) + 0.5 * K * (x @ x)
        return w - x @ y

    def grad(y):
        return -invert(y)

    def hess(y):
        x = invert(y)
        return SymMat(-np.linalg.inv(P.hess(x).m + K * np.eye(P.dim)))

    return PotentialFn(P.dim, 0.0, value, grad, hess)
