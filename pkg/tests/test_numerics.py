import math

import pytest

from pnmcore.errors import QuadratureFailure
from pnmcore.numerics import adaptive_simpson, bisect_boundary, bisect_root


def test_simpson_polynomial_exact():
    # Simpson is exact for cubics
    assert abs(adaptive_simpson(lambda x: x**3, 0.0, 2.0) - 4.0) < 1e-12


def test_simpson_exponential():
    val = adaptive_simpson(math.exp, 0.0, 1.0)
    assert abs(val - (math.e - 1.0)) < 1e-9


def test_simpson_oscillatory_bounded():
    # bounded oscillation with a removable endpoint singularity
    f = lambda x: math.sin(1.0 / x) * math.tanh(x) if x > 0 else 0.0
    val = adaptive_simpson(f, 0.0, 1.0)
    assert math.isfinite(val)
    assert abs(val) < 1.0


def test_simpson_rejects_nonfinite():
    with pytest.raises(QuadratureFailure):
        adaptive_simpson(lambda x: 1.0 / x if x > 0 else math.inf, 0.0, 1.0)


def test_bisect_root():
    r = bisect_root(lambda x: x**2 - 2.0, 0.0, 2.0, xtol=1e-10)
    assert abs(r - math.sqrt(2.0)) < 1e-9


def test_bisect_boundary():
    # predicate true below 1.3, false above
    b = bisect_boundary(lambda x: x < 1.3, 0.0, 2.0, xtol=1e-6)
    assert abs(b - 1.3) < 1e-5
