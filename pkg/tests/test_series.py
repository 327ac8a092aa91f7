"""Frame construction, the convergence predicate, and every expansion
against the certified iterative evaluator."""

import cmath
import math
import statistics

import pytest

from branchlab.branches import lambert_w
from branchlab.errors import DomainError
from branchlab.series import (
    AUX_KINDS,
    SeriesFrame,
    VARIANTS,
    aux_series,
    log_w_series,
    make_frame,
    series_converges,
    sufficient_bound,
    term_magnitudes,
    w_series,
    w_series_shifted,
)

GRID_K = (-3, -1, 1, 2, 5)
GRID_X = (1, 10, -2, 2 + 1j)


def _trivial_frame():
    # M = 0 exactly: x chosen so that Log x + 0 = K + Log K
    x = 2.0 * math.exp(2.0)
    return SeriesFrame(0, complex(x), "general", complex(2.0), complex(0.0), 0)


def _grid_frames():
    out = []
    for k in GRID_K:
        for x in GRID_X:
            for variant in ("two_k_pi_i", "two_k_pi_i_plus_logx"):
                out.append(make_frame(k, x, variant))
    return out


# --- frame construction ---------------------------------------------------

def test_make_frame_two_k_pi_i():
    f = make_frame(3, 1, "two_k_pi_i")
    assert f.K == 6j * math.pi
    assert abs(f.M - (math.log(6 * math.pi) + 0.5j * math.pi)) < 1e-15
    assert f.ek == 3


def test_make_frame_plus_logx():
    f = make_frame(1, 1, "two_k_pi_i_plus_logx")
    assert f.K == 2j * math.pi
    assert abs(f.M - cmath.log(2j * math.pi)) < 1e-15


def test_make_frame_k_minus1_real():
    f = make_frame(-1, -0.1, "k_minus1_real")
    assert abs(f.K - math.log(0.1)) < 1e-15
    assert abs(f.M - math.log(-math.log(0.1))) < 1e-15
    assert f.ek == 0 and f.K.imag == 0.0 and f.M.imag == 0.0


def test_make_frame_shifted_alias():
    a = make_frame(2, 3 + 1j, "shifted_K1")
    b = make_frame(2, 3 + 1j, "two_k_pi_i_plus_logx")
    assert a.K == b.K and a.M == b.M and a.ek == b.ek


def test_frame_invariant_on_grid():
    frames = _grid_frames()
    frames.append(make_frame(-1, -0.1, "k_minus1_real"))
    frames.append(make_frame(-1, -0.3, "k_minus1_real"))
    frames.append(make_frame(0, 5, "general", K=4 + 1j))
    frames.append(make_frame(2, -7 + 2j, "general", K=1j))
    for f in frames:
        res = f.K + cmath.log(f.K) - cmath.log(f.x) - 2j * math.pi * f.ek
        assert abs(f.M - res) <= 8e-16 * max(1.0, abs(f.K), abs(f.M))


def test_make_frame_rejections():
    with pytest.raises(DomainError):
        make_frame(0, 1, "two_k_pi_i")
    with pytest.raises(DomainError):
        make_frame(0, 1, "two_k_pi_i_plus_logx")  # K = 0
    with pytest.raises(DomainError):
        make_frame(-1, -0.5, "k_minus1_real")  # below -1/e
    with pytest.raises(DomainError):
        make_frame(-1, 0.1, "k_minus1_real")
    with pytest.raises(DomainError):
        make_frame(-2, -0.1, "k_minus1_real")
    with pytest.raises(DomainError):
        make_frame(1, 0, "two_k_pi_i")
    with pytest.raises(DomainError):
        make_frame(0, 2, "general")  # K missing
    with pytest.raises(DomainError):
        make_frame(0, 2, "general", K=0)
    with pytest.raises(DomainError):
        make_frame(1, 1, "no_such_variant")


# --- convergence predicate --------------------------------------------------

def test_predicate_examples():
    assert series_converges(make_frame(-1, -0.1, "k_minus1_real"))
    assert series_converges(make_frame(1, 1, "two_k_pi_i_plus_logx"))


def test_predicate_m_zero_reduces_to_logk():
    f = _trivial_frame()
    assert series_converges(f)  # |K| = 2 > 1
    small = SeriesFrame(0, complex(0.5 * math.exp(0.5)), "general",
                        complex(0.5), complex(0.0), 0)
    assert not series_converges(small)  # |K| = 1/2 < 1


def test_predicate_divergent_frame():
    f = make_frame(0, 1e-6, "general", K=0.9)
    assert f.M.real > 10
    assert not series_converges(f)
    with pytest.raises(DomainError):
        w_series(f)
    res = w_series(f, N=10, override=True)
    assert not res.converged_flag


def test_sufficient_bound_implies_predicate():
    hits = 0
    for f in _grid_frames():
        if sufficient_bound(f):
            hits += 1
            assert series_converges(f)
    assert hits > 0


# --- main expansion ---------------------------------------------------------

def test_w_series_grid_oracle():
    # convergent frames whose tail has resolved at N=120 must hit 1e-10;
    # marginal frames (convergence ratio near 1) cannot, and the honest
    # signal is a large reported last-term magnitude bounding the error
    resolved = 0
    for f in _grid_frames():
        if not series_converges(f):
            continue
        want = lambert_w(f.k, f.x).value
        res = w_series(f, N=120)
        err = abs(res.value - want)
        if res.last_term_magnitude <= 1e-11:
            resolved += 1
            assert err <= 1e-10, (f.k, f.x, f.variant, err)
        else:
            assert err <= 20.0 * res.last_term_magnitude, (f.k, f.x, f.variant)
    assert resolved >= 30


def test_w_series_known_hard_point():
    f = make_frame(1, 1, "two_k_pi_i_plus_logx")
    res = w_series(f, N=110)
    assert abs(res.value - lambert_w(1, 1).value) <= 1e-12
    assert res.converged_flag


def test_w_series_far_branch():
    f = make_frame(5, 2 + 1j, "two_k_pi_i")
    assert abs(w_series(f, N=60).value - lambert_w(5, 2 + 1j).value) <= 1e-12


def test_w_series_trivial_m_zero_exact():
    res = w_series(_trivial_frame())
    assert res.value == 2.0 + 0j
    assert res.converged_flag and res.last_term_magnitude == 0.0


def test_w_series_real_pair_frame():
    f = make_frame(-1, -0.1, "k_minus1_real")
    res = w_series(f, N=120)
    assert res.value.imag == 0.0
    assert abs(res.value - lambert_w(-1, -0.1).value) <= 1e-12


# --- logarithmic expansion --------------------------------------------------

def test_log_w_series_trivial():
    assert log_w_series(_trivial_frame()).value == cmath.log(2.0)


def test_log_w_series_ek_bookkeeping():
    f = make_frame(3, 1, "two_k_pi_i")
    total = w_series(f, N=40).value + log_w_series(f, N=40).value
    assert abs(total - 6j * math.pi) <= 1e-12


def test_log_w_series_principal_when_in_band():
    f = make_frame(1, 1, "two_k_pi_i_plus_logx")
    got = log_w_series(f, N=110).value
    assert abs(got - cmath.log(lambert_w(1, 1).value)) <= 1e-11


# --- auxiliary expansions ---------------------------------------------------

def test_aux_inv_one_plus_w():
    f = make_frame(1, 1, "two_k_pi_i_plus_logx")
    w = lambert_w(1, 1).value
    got = aux_series(f, "inv_one_plus_w", N=110).value
    assert abs(got - 1.0 / (1.0 + w)) <= 1e-12


def test_aux_inv_one_plus_w_m_zero():
    # W = K = 2, so the target is exactly 1/3
    got = aux_series(_trivial_frame(), "inv_one_plus_w").value
    assert abs(got - 1.0 / 3.0) <= 1e-12


def test_aux_power_square():
    f = make_frame(4, 1, "two_k_pi_i")
    w = lambert_w(4, 1).value
    got = aux_series(f, "power_j", N=50, j=2).value
    assert abs(got - (w - f.K) ** 2) <= 1e-11


def test_aux_power_one_matches_w_series():
    f = make_frame(2, 3, "two_k_pi_i_plus_logx")
    a = aux_series(f, "power_j", N=80, j=1)
    w = w_series(f, N=80)
    assert f.K + a.value == w.value


def test_aux_power_inverse():
    f = make_frame(2, 1, "two_k_pi_i_plus_logx")
    w = lambert_w(2, 1).value
    got = aux_series(f, "power_j", N=110, j=-1).value
    assert abs(got - 1.0 / (w - f.K)) <= 1e-11


def test_aux_reciprocal_shift():
    f = make_frame(1, 1, "two_k_pi_i_plus_logx")
    w = lambert_w(1, 1).value
    got = aux_series(f, "reciprocal_shift", N=110).value
    assert abs(got - (-f.M / (w - f.K))) <= 1e-12


def test_aux_log_ratio():
    f = make_frame(1, 1, "two_k_pi_i_plus_logx")
    w = lambert_w(1, 1).value
    got = aux_series(f, "log_ratio", N=110).value
    assert abs(got - cmath.log((w - f.K) / (-f.M))) <= 1e-11


def test_aux_rejections():
    f = make_frame(1, 1, "two_k_pi_i_plus_logx")
    triv = _trivial_frame()
    with pytest.raises(DomainError):
        aux_series(f, "power_j")  # j missing
    with pytest.raises(DomainError):
        aux_series(f, "power_j", j=0)
    with pytest.raises(DomainError):
        aux_series(triv, "power_j", j=-1)
    with pytest.raises(DomainError):
        aux_series(triv, "reciprocal_shift")
    with pytest.raises(DomainError):
        aux_series(triv, "log_ratio")
    with pytest.raises(DomainError):
        aux_series(f, "no_such_series")


# --- shifted expansion ------------------------------------------------------

def test_shifted_trivial():
    assert w_series_shifted(_trivial_frame()).value == 2.0 + 0j


def test_shifted_oracle():
    f = make_frame(1, 1, "shifted_K1")
    assert abs(w_series_shifted(f, N=110).value - lambert_w(1, 1).value) <= 1e-12
    g = make_frame(2, 10, "two_k_pi_i_plus_logx")
    assert abs(w_series_shifted(g, N=80).value - lambert_w(2, 10).value) <= 1e-12


def test_shifted_k1_zero_rejected():
    f = make_frame(0, 1, "general", K=-1.0)
    with pytest.raises(DomainError):
        w_series_shifted(f)


# --- term decay --------------------------------------------------------------

def test_terms_decay_geometrically_when_certified():
    checked = 0
    for f in _grid_frames():
        if not series_converges(f):
            continue
        mags = term_magnitudes(f, N=120)
        pts = [(n, math.log(m)) for n, m in enumerate(mags)
               if 60 <= n <= 120 and m > 0.0]
        if len(pts) < 10:
            continue
        slope, _ = statistics.linear_regression([p[0] for p in pts],
                                                [p[1] for p in pts])
        assert slope < 0.0, (f.k, f.x, f.variant)
        checked += 1
    assert checked >= 10


def test_exports_tuples():
    assert "general" in VARIANTS and len(VARIANTS) == 5
    assert set(AUX_KINDS) == {"power_j", "reciprocal_shift",
                              "inv_one_plus_w", "log_ratio"}
