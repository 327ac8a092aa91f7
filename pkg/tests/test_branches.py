"""Branch evaluation tests: reference points, certification, symmetry."""

import cmath
import math
import random

import pytest

from branchlab.branches import (
    DEFAULT_CONFIG,
    INV_E,
    BranchCase,
    EvalReport,
    PrecisionConfig,
    annulus_check,
    asymptotic_w,
    branch_exists,
    lambert_w,
    smallest_annulus_k,
    w0_series,
    w_derivative,
)
from branchlab.errors import ConvergenceError, DomainError

# five printed decimals per component
REFERENCE_VALUES = [
    (0, 1.0, 0.56714 + 0.0j),
    (1, 1.0, -1.53391 + 4.37518j),
    (-1, 1.0, -1.53391 - 4.37518j),
    (-2, 1.0, -2.40158 - 10.77629j),
    (0, -1.0, -0.31813 + 1.33723j),
    (-1, -1.0, -0.31813 - 1.33723j),
    (1, -1.0, -2.06227 + 7.58863j),
    (-2, -1.0, -2.06227 - 7.58863j),
    (0, -0.1, -0.11183 + 0.0j),
    (-1, -0.1, -3.57715 + 0.0j),
    (1, -0.1, -4.44909 + 7.30706j),
    (-2, -0.1, -4.44909 - 7.30706j),
]


def _assert_certified(report: EvalReport, x, tol=None):
    tol = tol if tol is not None else DEFAULT_CONFIG.tol
    assert report.residual <= tol
    assert report.ek_residual <= tol * (1 + abs(report.value))


def test_reference_table():
    for k, x, want in REFERENCE_VALUES:
        r = lambert_w(k, x)
        assert abs(r.value.real - want.real) < 1e-5, (k, x)
        assert abs(r.value.imag - want.imag) < 1e-5, (k, x)
        _assert_certified(r, x)


def test_branch_point_value():
    for k in (0, -1):
        r = lambert_w(k, -INV_E)
        assert r.value == -1
        assert r.steps == 0
        assert r.residual < 1e-12


def test_branch_point_neighborhood_separates():
    x = -INV_E + 1e-6
    w0 = lambert_w(0, x).value
    wm1 = lambert_w(-1, x).value
    assert w0.imag == 0 and wm1.imag == 0
    assert wm1.real < -1 < w0.real
    # both within the sqrt-sized window of -1
    gap = math.sqrt(2 * math.e * 1e-6)
    assert abs(w0.real + 1) < 2 * gap
    assert abs(wm1.real + 1) < 2 * gap


def test_real_pair_regime():
    for x in (-0.05, -0.1, -0.2, -0.3, -0.36):
        r0 = lambert_w(0, x)
        rm = lambert_w(-1, x)
        assert r0.value.imag == 0 and rm.value.imag == 0
        assert rm.value.real <= -1 <= r0.value.real
        _assert_certified(r0, x)
        _assert_certified(rm, x)


def test_branch_exists_cases():
    assert branch_exists(2, 1) == BranchCase(True, "unique-Ek", "unique-Ek")
    assert branch_exists(-1, -0.1) == BranchCase(
        False, "nonexistent-Ek", "real-pair-on-E0"
    )
    assert branch_exists(0, -0.1) == BranchCase(
        True, "real-pair-on-E0", "real-pair-on-E0"
    )
    # below the branch point the pair regime ends
    assert branch_exists(0, -1) == BranchCase(True, "unique-Ek", "unique-Ek")
    assert branch_exists(-1, -1).exists
    with pytest.raises(DomainError):
        branch_exists(0, 0)


def test_x_zero_rejected():
    with pytest.raises(DomainError):
        lambert_w(0, 0)
    with pytest.raises(DomainError):
        w_derivative(0, 0)


def test_conjugate_symmetry_off_cut():
    points = [1.0, 2 + 1j, -0.1 + 0.2j, 0.5 - 2j]
    for k in (0, 1, 2, 5):
        for x in points:
            a = lambert_w(-k, x).value
            b = lambert_w(k, x.conjugate() if isinstance(x, complex) else x).value
            assert abs(a - b.conjugate()) <= 2e-13 * (1 + abs(a))


def test_conjugate_symmetry_on_cut():
    # on the far negative axis the pairing shifts by one index
    for x in (-1.0, -5.0, -0.5):
        for k in (1, 2, 3):
            a = lambert_w(-k, x).value
            b = lambert_w(k - 1, x).value
            assert abs(a - b.conjugate()) <= 2e-13 * (1 + abs(a))


def test_random_certification_sweep():
    rng = random.Random(20260822)
    cfg = PrecisionConfig(tol=1e-12)
    n = 0
    while n < 500:
        k = rng.randint(-20, 20)
        x = complex(rng.uniform(-100, 100), rng.uniform(-100, 100))
        if not (0.01 <= abs(x) <= 100):
            continue
        if k in (0, -1) and abs(x.imag) < 1e-6 and x.real < 0:
            continue
        r = lambert_w(k, x, cfg)
        _assert_certified(r, x, tol=1e-12)
        n += 1


def test_large_magnitude_argument():
    r = lambert_w(0, 1e300)
    _assert_certified(r, 1e300)
    assert r.value.real > 600


def test_nonconvergence_reports():
    cfg = PrecisionConfig(tol=1e-17, max_iter=5)
    with pytest.raises(ConvergenceError) as exc:
        lambert_w(2, 0.7 + 0.3j, cfg)
    assert exc.value.report is not None
    assert exc.value.report.residual > 0


def test_precision_config_validation():
    with pytest.raises(DomainError):
        PrecisionConfig(tol=0)
    with pytest.raises(DomainError):
        PrecisionConfig(max_iter=0)


# ---------------------------------------------------------------------------
# power series of the principal branch


def test_w0_series_trivial():
    r = w0_series(0)
    assert r.value == 0
    assert r.steps == 0
    assert r.method == "series_w0"


def test_w0_series_matches_iteration():
    r = w0_series(0.1, N=30)
    w = lambert_w(0, 0.1).value
    assert abs(r.value - w) < 1e-13


def test_w0_series_reference_point():
    r = w0_series(-0.1)
    assert abs(r.value.real + 0.11183) < 1e-5
    assert r.value.imag == 0


def test_w0_series_refusal():
    with pytest.raises(DomainError):
        w0_series(0.35)
    with pytest.raises(DomainError):
        w0_series(0.3 + 0.2j)  # |z| = 0.36...
    with pytest.raises(DomainError):
        w0_series(0.1, N=0)


def test_w0_series_underpowered_raises():
    with pytest.raises(ConvergenceError) as exc:
        w0_series(0.3, N=5)
    assert exc.value.report is not None
    assert exc.value.report.steps == 5


def test_w0_series_grid_agreement():
    rng = random.Random(11)
    for _ in range(100):
        r = 0.3 * math.sqrt(rng.random())
        th = rng.uniform(-math.pi, math.pi)
        z = complex(r * math.cos(th), r * math.sin(th))
        a = w0_series(z).value
        b = lambert_w(0, z).value if z != 0 else 0j
        assert abs(a - b) <= 5e-13 * (1 + abs(a))


# ---------------------------------------------------------------------------
# derivative


def test_derivative_reference():
    d = w_derivative(0, 1)
    assert abs(d - 0.5671432904 / (1 + 0.5671432904)) < 1e-9


def test_derivative_small_x_limit():
    assert abs(w_derivative(0, 1e-8) - 1) < 1e-6


def test_derivative_branch_point_singular():
    with pytest.raises(DomainError):
        w_derivative(0, -INV_E)


def test_derivative_matches_finite_differences():
    for k, x in [(0, 1.0), (1, 1.0), (-2, 1.0), (0, 2 + 1j), (1, 2 + 1j), (-2, 2 + 1j)]:
        d = w_derivative(k, x)
        for h in (1e-4, 1e-5):
            fd = (lambert_w(k, x + h).value - lambert_w(k, x - h).value) / (2 * h)
            assert abs(d - fd) <= 10 * h * h + 1e-10, (k, x, h)


# ---------------------------------------------------------------------------
# asymptotic form and annuli


def test_asymptotic_rejects_k0():
    with pytest.raises(DomainError):
        asymptotic_w(0, 1)


def test_asymptotic_error_scaling():
    # error = O(log^2 k / k^2) with a modest constant; the looser tol
    # reflects the representation floor eps*|W_k| at large |k|
    cfg = PrecisionConfig(tol=1e-12)
    for k in (50, 100, 200, 400):
        err = abs(asymptotic_w(k, 1) - lambert_w(k, 1, cfg).value)
        bound = (math.log(k) ** 2) / (k * k)
        assert err < bound, (k, err, bound)


def test_asymptotic_conjugate_symmetry():
    for k in (1, 3, 10):
        for x in (1.0, 2 + 1j):
            a = asymptotic_w(-k, complex(x).conjugate())
            b = asymptotic_w(k, x)
            assert abs(a - b.conjugate()) < 1e-12


def test_asymptotic_finite_at_k1():
    v = asymptotic_w(1, 1)
    assert cmath.isfinite(v)


def test_annulus_ranges():
    assert annulus_check(2, 50, 1)
    assert annulus_check(2, 50, 10)
    assert annulus_check(1, 1, 1)  # |W_1(1)| ~ 4.636 sits inside ]pi, 3pi[
    with pytest.raises(DomainError):
        annulus_check(0, 5, 1)
    with pytest.raises(DomainError):
        annulus_check(5, 2, 1)


def test_smallest_annulus_k_measured():
    assert smallest_annulus_k(1) == 1
    assert smallest_annulus_k(10) == 1
