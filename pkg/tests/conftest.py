import math

import numpy as np
import pytest

from asymlab import EquationSpec, SymMat

RNG_SEED = 20240817


@pytest.fixture
def rng():
    return np.random.default_rng(RNG_SEED)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    try:
        import test_acceptance
    except ImportError:
        return
    if test_acceptance.LINES:
        terminalreporter.section("acceptance criteria")
        for line in test_acceptance.LINES:
            terminalreporter.write_line(line)


def random_symmetric(rng, dim, scale=1.0):
    B = rng.normal(size=(dim, dim)) * scale
    return SymMat(0.5 * (B + B.T))


def random_admissible(rng, spec: EquationSpec) -> SymMat:
    """Draw a symmetric matrix inside the equation's admissible cone."""
    n = spec.dim
    if spec.kind == "SLE":
        # any symmetric matrix has a phase; bias towards the supercritical
        # branch so residuals stay away from the arctan saturation.
        return random_symmetric(rng, n, scale=2.0)
    if spec.kind == "MA":
        B = rng.normal(size=(n, n))
        return SymMat(B @ B.T + 0.2 * np.eye(n))
    if spec.kind == "SIGMA2":
        from asymlab.equations import sigma2_margin

        # draw inside the Garding cone (sigma_1, sigma_2 > 0) normalized to
        # sigma_2 = 1, then keep lambda_min > delta - K; this is the set the
        # equation's solutions actually live in (mere lambda_min > delta - K
        # does not put tr(M)I - M on the elliptic side).
        K = sigma2_margin(n)
        while True:
            vals = rng.uniform(-0.3, 3.0, size=n)
            s1 = vals.sum()
            s2 = (s1 * s1 - (vals * vals).sum()) / 2.0
            if s1 < 0.05 or s2 < 0.05:
                continue
            vals = vals / math.sqrt(s2)
            if vals.min() > (spec.delta - K) + 0.02:
                return _with_spectrum(rng, vals)
    if spec.kind == "IHH":
        vals = 1.05 + np.abs(rng.normal(size=spec.dim)) * 2.0
        return _with_spectrum(rng, vals)
    raise AssertionError(spec.kind)


def _with_spectrum(rng, vals):
    n = len(vals)
    Q, _ = np.linalg.qr(rng.normal(size=(n, n)))
    return SymMat(Q @ np.diag(vals) @ Q.T)


def exterior_points(rng, rho, n, dim=2, r_max_factor=50.0):
    r = rho * np.exp(rng.uniform(0.05, math.log(r_max_factor), size=n))
    if dim == 2:
        th = rng.uniform(0, 2 * math.pi, size=n)
        return np.stack([r * np.cos(th), r * np.sin(th)], axis=1)
    v = rng.normal(size=(n, dim))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    return v * r[:, None]
