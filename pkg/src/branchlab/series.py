"""Convergent branch expansions built on the Lambert polynomial families.

Every expansion lives in a frame (k, x, K, M) with M = K + Log K - Log x -
2 pi i k_eff, so the bookkeeping identity W + log W = Log x + 2 pi i k_eff
holds term by term.  Frames are certified by an exact convergence predicate
before a partial sum is trusted; divergent frames can still be summed with
an explicit override, in which case the result is flagged.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .branches import DEFAULT_CONFIG, PrecisionConfig, lambert_w
from .errors import DomainError
from .polycore import StirlingTable, lambert_L, lambert_L_power, shifted_P

VARIANTS = (
    "general",
    "two_k_pi_i",
    "two_k_pi_i_plus_logx",
    "k_minus1_real",
    "shifted_K1",
)

AUX_KINDS = ("power_j", "reciprocal_shift", "inv_one_plus_w", "log_ratio")

_INV_E = math.exp(-1.0)


@dataclass(frozen=True)
class SeriesFrame:
    """Expansion frame: M = K + Log K - Log x - 2 pi i ek by construction.

    ek is the index of the membership equation the expansion tracks: k for
    every variant except k_minus1_real, whose real pair lives on E_0.
    """

    k: int
    x: complex
    variant: str
    K: complex
    M: complex
    ek: int


@dataclass(frozen=True)
class SeriesResult:
    value: complex
    terms_used: int
    last_term_magnitude: float
    converged_flag: bool


def make_frame(
    k: int, x: complex, variant: str = "two_k_pi_i_plus_logx", K=None
) -> SeriesFrame:
    """Build a validated expansion frame for W_k(x)."""
    x = complex(x)
    if x == 0:
        raise DomainError("x must be nonzero")
    if variant not in VARIANTS:
        raise DomainError(f"unknown variant {variant!r}")

    if variant == "general":
        if K is None:
            raise DomainError("general variant requires an explicit K")
        K = complex(K)
        if K == 0:
            raise DomainError("K must be nonzero")
        M = K + cmath.log(K) - cmath.log(x) - 2j * math.pi * k
        return SeriesFrame(k, x, variant, K, M, k)

    if variant == "two_k_pi_i":
        if k == 0:
            raise DomainError("two_k_pi_i requires k != 0")
        K = 2j * math.pi * k
        M = cmath.log(K) - cmath.log(x)
        return SeriesFrame(k, x, variant, K, M, k)

    if variant in ("two_k_pi_i_plus_logx", "shifted_K1"):
        K = cmath.log(x) + 2j * math.pi * k
        if K == 0:
            raise DomainError("K = 0 at k = 0, x = 1; no expansion frame there")
        return SeriesFrame(k, x, variant, K, cmath.log(K), k)

    # k_minus1_real
    if k != -1:
        raise DomainError("k_minus1_real requires k = -1")
    if x.imag != 0.0 or not (-_INV_E <= x.real < 0.0):
        raise DomainError("k_minus1_real requires real x in [-1/e, 0[")
    K = complex(math.log(-x.real))
    if K == 0:
        # would need x = -1, which the interval already excludes
        raise DomainError("K = 0 is not a valid frame")
    M = complex(math.log(-K.real))
    return SeriesFrame(-1, x, variant, K, M, 0)


# ---------------------------------------------------------------------------
# convergence certification

_CONV_CACHE: dict = {}


def series_converges(
    frame: SeriesFrame, config: Optional[PrecisionConfig] = None
) -> bool:
    """Exact criterion: log|K| + 1 - Re M + min_m Re W_m(-e^{M-1}) > 0.

    The minimum runs over the two branches m in {-q-1, -q} with
    q = floor(-Im M / 2 pi), after M is conjugated into the closed lower
    half-plane (the coefficient polynomials are real, so conjugate frames
    have equal radii).  Via log|W_m| = Re M - 1 - Re W_m this is just
    |K| > max_m |W_m(-e^{M-1})|, the nearest active singularity of the
    coefficient generating function.
    """
    got = _CONV_CACHE.get(frame)
    if got is not None:
        return got
    K, M = frame.K, frame.M
    if M.imag > 0.0:
        M = M.conjugate()
    q = math.floor(-M.imag / math.tau)
    logk = math.log(abs(K))
    # when -e^{M-1} over/underflows, W_m(-e^{M-1}) ~ (M - 1) + 2 pi i m
    asym = math.hypot(M.real - 1.0, M.imag - math.tau * (q + 1))
    if M.real > 709.0:
        ok = logk > math.log(asym)
    else:
        z = -cmath.exp(M - 1.0)
        if z.imag == 0.0:
            # on-axis points take the upper-side cut values
            z = complex(z.real, 0.0)
        if z == 0:
            ok = logk > math.log(asym)
        else:
            inner = min(
                lambert_w(m, z, config).value.real for m in (-q - 1, -q)
            )
            ok = logk + 1.0 - M.real + inner > 0.0
    _CONV_CACHE[frame] = ok
    return ok


def sufficient_bound(frame: SeriesFrame) -> bool:
    """Cheap sufficient condition 2 (1 + |M|) < |K|; implies convergence."""
    return 2.0 * (1.0 + abs(frame.M)) < abs(frame.K)


# ---------------------------------------------------------------------------
# coefficient evaluation
#
# The coefficient polynomials have entries of wildly mixed sign; the float
# Horner value decays while the condition sum grows, so for marginal frames
# the binary64 evaluation drowns past n ~ 80.  Every evaluation therefore
# carries a running noise bound, and terms whose bound threatens the target
# are recomputed once in exact rational arithmetic and cached.

_FAMILIES = {
    "L": lambda n, table: lambert_L(n, table),
    "Lp": lambda n, table: lambert_L(n, table).derivative(),
    "Lpp": lambda n, table: lambert_L(n, table).nth_derivative(2),
    "P": lambda n, table: shifted_P(n),
}

_FLOAT_CACHE: dict = {}
_EXACT_CACHE: dict = {}


def _family_floats(family, n: int, table, j=None):
    key = (family, n) if j is None else (family, n, j)
    got = _FLOAT_CACHE.get(key)
    if got is None:
        poly = (
            lambert_L_power(n, j, table)
            if family == "Lj"
            else _FAMILIES[family](n, table)
        )
        coeffs = tuple(float(c) for c in poly.coeffs)
        got = (poly.variable, coeffs, tuple(abs(c) for c in coeffs))
        _FLOAT_CACHE[key] = got
    return got


def _eval_exact(family, n: int, m: complex, table, j=None) -> complex:
    key = (family, n, j, m)
    got = _EXACT_CACHE.get(key)
    if got is not None:
        return got
    poly = (
        lambert_L_power(n, j, table)
        if family == "Lj"
        else _FAMILIES[family](n, table)
    )
    zr, zi = Fraction(m.real), Fraction(m.imag)
    if poly.variable == "Y":
        d = zr * zr + zi * zi
        zr, zi = zr / d, -zi / d
    ar, ai = Fraction(0), Fraction(0)
    for c in reversed(poly.coeffs):
        ar, ai = ar * zr - ai * zi + c, ar * zi + ai * zr
    got = complex(float(ar), float(ai))
    _EXACT_CACHE[key] = got
    return got


def _coeff_value(family, n: int, m: complex, cap: float, table, j=None) -> complex:
    """Coefficient value at m with absolute error below cap."""
    variable, coeffs, abscoeffs = _family_floats(family, n, table, j)
    if not coeffs:
        return 0j
    z = 1.0 / m if variable == "Y" else m
    az = abs(z)
    acc = 0j
    cond = 0.0
    for c, a in zip(reversed(coeffs), reversed(abscoeffs)):
        acc = acc * z + c
        cond = cond * az + a
    # ~2n unit roundoffs against the positive-coefficient sum
    if 2.5e-16 * len(coeffs) * cond > cap:
        return _eval_exact(family, n, m, table, j)
    return acc


# ---------------------------------------------------------------------------
# summation core

def _sum_terms(term_fn, n0: int, N: int, K: complex, tol: float):
    """Sum term_fn(n, cap)/K^n for n0 <= n <= N, stopping after five straight
    terms below tol relative to the running partial; cap is the absolute
    coefficient accuracy the term must meet."""
    total = 0j
    kinv = 1.0 / K
    kpow = kinv**n0
    akinv = abs(kinv)
    akpow = abs(kpow)
    small = 0
    last = 0.0
    n_stop = n0
    for n in range(n0, N + 1):
        cap = 0.02 * tol * max(1.0, abs(total)) / max(akpow, 1e-300)
        t = term_fn(n, cap) * kpow
        total += t
        kpow *= kinv
        akpow *= akinv
        last = abs(t)
        n_stop = n
        if last <= tol * max(1.0, abs(total)):
            small += 1
            if small >= 5:
                break
        else:
            small = 0
    return total, n_stop - n0 + 1, last, small >= 5


def _gate(frame, override, config):
    conv = series_converges(frame, config)
    if not conv and not override:
        raise DomainError(
            "frame fails the convergence criterion; pass override=True to sum anyway"
        )
    return conv


def w_series(
    frame: SeriesFrame,
    N: int = 120,
    table: Optional[StirlingTable] = None,
    config: Optional[PrecisionConfig] = None,
    override: bool = False,
) -> SeriesResult:
    """W = K + sum_{n>=0} L_n(M)/K^n on the frame."""
    cfg = config or DEFAULT_CONFIG
    conv = _gate(frame, override, config)
    total, used, last, tail = _sum_terms(
        lambda n, cap: _coeff_value("L", n, frame.M, cap, table),
        0, N, frame.K, cfg.tol,
    )
    return SeriesResult(frame.K + total, used, last, conv and tail)


def log_w_series(
    frame: SeriesFrame,
    N: int = 120,
    table: Optional[StirlingTable] = None,
    config: Optional[PrecisionConfig] = None,
    override: bool = False,
) -> SeriesResult:
    """log W = Log K - sum_{n>=1} L_n(M)/K^n; the branch of log is the one
    forced by the frame bookkeeping, so value + w_series value is exactly
    Log x + 2 pi i ek."""
    cfg = config or DEFAULT_CONFIG
    conv = _gate(frame, override, config)
    total, used, last, tail = _sum_terms(
        lambda n, cap: _coeff_value("L", n, frame.M, cap, table),
        1, N, frame.K, cfg.tol,
    )
    return SeriesResult(cmath.log(frame.K) - total, used, last, conv and tail)


def aux_series(
    frame: SeriesFrame,
    which: str,
    N: int = 120,
    table: Optional[StirlingTable] = None,
    config: Optional[PrecisionConfig] = None,
    override: bool = False,
    j: Optional[int] = None,
) -> SeriesResult:
    """Auxiliary expansions on the same frame.

    power_j: (W - K)^j, j a nonzero integer (j < 0 needs M != 0).
    reciprocal_shift: -M/(W - K) = 1 + 1/K + sum_{n>=2} M L''_n(M)/(n(n-1) K^n).
    inv_one_plus_w: 1/(1 + W) = sum_{n>=1} L'_n(M)/K^n.
    log_ratio: log((W - K)/(-M)) = -sum_{n>=1} L'_n(M)/(n K^n).
    """
    cfg = config or DEFAULT_CONFIG
    if which not in AUX_KINDS:
        raise DomainError(f"unknown auxiliary series {which!r}")
    conv = _gate(frame, override, config)
    K, M = frame.K, frame.M

    if which == "power_j":
        if j is None or j == 0:
            raise DomainError("power_j requires a nonzero integer j")
        if j < 0 and M == 0:
            raise DomainError("power_j with j < 0 requires M != 0")
        total, used, last, tail = _sum_terms(
            lambda n, cap: _coeff_value("Lj", n, M, cap, table, j=j),
            0, N, K, cfg.tol,
        )
        return SeriesResult(total, used, last, conv and tail)

    if which == "reciprocal_shift":
        if M == 0:
            raise DomainError("reciprocal_shift requires M != 0")
        am = abs(M)
        total, used, last, tail = _sum_terms(
            lambda n, cap: M
            * _coeff_value("Lpp", n, M, cap * n * (n - 1) / am, table)
            / (n * (n - 1)),
            2, N, K, cfg.tol,
        )
        return SeriesResult(1.0 + 1.0 / K + total, used + 2, last, conv and tail)

    if which == "inv_one_plus_w":
        total, used, last, tail = _sum_terms(
            lambda n, cap: _coeff_value("Lp", n, M, cap, table),
            1, N, K, cfg.tol,
        )
        return SeriesResult(total, used, last, conv and tail)

    # log_ratio
    if M == 0:
        raise DomainError("log_ratio requires M != 0")
    total, used, last, tail = _sum_terms(
        lambda n, cap: _coeff_value("Lp", n, M, cap * n, table) / n,
        1, N, K, cfg.tol,
    )
    return SeriesResult(-total, used, last, conv and tail)


def w_series_shifted(
    frame: SeriesFrame,
    N: int = 120,
    table: Optional[StirlingTable] = None,
    config: Optional[PrecisionConfig] = None,
    override: bool = False,
) -> SeriesResult:
    """W = K1 - 1 + sum_{n>=0} P_n(M)/K1^n with K1 = K + 1."""
    cfg = config or DEFAULT_CONFIG
    K1 = frame.K + 1.0
    if K1 == 0:
        raise DomainError("shifted expansion is undefined at K = -1")
    conv = _gate(frame, override, config)
    total, used, last, tail = _sum_terms(
        lambda n, cap: _coeff_value("P", n, frame.M, cap, table),
        0, N, K1, cfg.tol,
    )
    return SeriesResult(K1 - 1.0 + total, used, last, conv and tail)


def term_magnitudes(
    frame: SeriesFrame, N: int = 120, table: Optional[StirlingTable] = None
) -> list:
    """|L_n(M)/K^n| for n = 0..N, for decay diagnostics; no gating.

    Each magnitude is accurate to about 1%, falling back to exact
    coefficient evaluation where the float path loses the value."""
    out = []
    akinv = 1.0 / abs(frame.K)
    akpow = 1.0
    for n in range(N + 1):
        v = _coeff_value("L", n, frame.M, math.inf, table)
        v = _coeff_value("L", n, frame.M, 0.01 * abs(v), table)
        out.append(abs(v) * akpow)
        akpow *= akinv
    return out
