"""Certified evaluation of W_k(x) for every integer branch index k.

A branch value is accepted only when it passes two residual checks: the
defining equation |w e^w - x| <= tol * max(1, |x|) and membership of the
right branch via |w + Log w - Log x - 2 pi i k| <= tol * (1 + |w|) with the
principal logarithm.  For real x in [-1/e, 0[ the k = 0 and k = -1 values
are the two real solutions of the k = 0 membership equation, ordered
W_{-1} <= -1 <= W_0, and the certification uses effective index 0.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Optional

from .errors import ConvergenceError, DomainError

INV_E = math.exp(-1.0)
_TWO_PI = 2.0 * math.pi
# stop iterating once steps are at the rounding floor
_STEP_FLOOR = 1e-16
# exp() overflows past this; switch to the log-form iteration
_EXP_CAP = 680.0


@dataclass(frozen=True)
class PrecisionConfig:
    tol: float = 1e-13
    max_iter: int = 60

    def __post_init__(self):
        if self.tol <= 0:
            raise DomainError("tol must be positive")
        if self.max_iter < 1:
            raise DomainError("max_iter must be at least 1")


DEFAULT_CONFIG = PrecisionConfig()


@dataclass(frozen=True)
class EvalReport:
    """Outcome of one branch evaluation.

    residual is |w e^w - x| / max(1, |x|); ek_residual is the branch
    membership defect |w + Log w - Log x - 2 pi i k_eff| where k_eff is the
    index of the membership equation actually satisfied (k, except 0 for
    the real-pair regime).  method is one of halley, series_w0,
    series_asymptotic, integral.
    """

    value: complex
    residual: float
    ek_residual: float
    method: str
    steps: int


@dataclass(frozen=True)
class BranchCase:
    """Existence/uniqueness classification of (k, x).

    ek_case says whether the membership equation E_k itself has a solution;
    value_case says how the conventional branch value is defined there.
    Tags: unique-Ek, real-pair-on-E0, nonexistent-Ek.
    """

    exists: bool
    ek_case: str
    value_case: str


def _is_real_pair(k: int, x: complex) -> bool:
    return k in (0, -1) and x.imag == 0.0 and -INV_E <= x.real < 0.0


def branch_exists(k: int, x: complex) -> BranchCase:
    """Classify (k, x): does E_k have a solution, and what defines W_k?"""
    x = complex(x)
    if x == 0:
        raise DomainError("x must be nonzero")
    if _is_real_pair(k, x):
        if k == -1:
            return BranchCase(False, "nonexistent-Ek", "real-pair-on-E0")
        return BranchCase(True, "real-pair-on-E0", "real-pair-on-E0")
    return BranchCase(True, "unique-Ek", "unique-Ek")


def _residuals(w: complex, x: complex, k_eff: int):
    g = w * cmath.exp(w) - x
    residual = abs(g) / max(1.0, abs(x))
    ek = abs(w + cmath.log(w) - cmath.log(x) - 2j * math.pi * k_eff)
    return residual, ek


def _series_seed_4(K: complex) -> complex:
    # four-term large-K expansion, M = Log K
    M = cmath.log(K)
    return (
        K
        - M
        + M / K
        + (M * M / 2 - M) / (K * K)
        + (M**3 / 3 - 1.5 * M * M + M) / (K**3)
    )


def _log_fixed_point(target: complex, w: complex, iters: int = 40) -> complex:
    # w <- target - Log w contracts whenever the orbit keeps |w| > 1;
    # harmless otherwise since the result is only a seed
    for _ in range(iters):
        if w == 0:
            w = 1.0 + 0j
        w = target - cmath.log(w)
    return w


def _exp_fixed_point(x: complex, w: complex, iters: int = 40) -> complex:
    # w <- x e^{-w} contracts where |W_0| < 1
    for _ in range(iters):
        if w.real < -_EXP_CAP:
            w = complex(-_EXP_CAP, w.imag)
        w = x * cmath.exp(-w)
    return w


def _seed_candidates(k: int, x: complex) -> list:
    """Primary seed per region, then cheap certified-retry fallbacks."""
    out = []
    if k in (0, -1) and abs(x + INV_E) <= 0.2:
        p = cmath.sqrt(2.0 * (math.e * x + 1.0))
        if k == -1:
            p = -p
        out.append(-1.0 + p - p * p / 3.0 + 11.0 * p**3 / 72.0)
    if k == 0:
        if abs(x) <= 0.34:
            out.append(x * (1.0 - x + 1.5 * x * x))
        lx = cmath.log(x)
        if abs(x) > 0.34:
            if abs(lx.real) >= 1.0:
                out.append(_series_seed_4(lx))
            elif x != -1:
                out.append(cmath.log(1.0 + x))
        # fallbacks covering |W_0| > 1 and |W_0| < 1 respectively
        out.append(_log_fixed_point(lx, lx + 1.0))
        out.append(_exp_fixed_point(x, 0.5 + 0.5j))
    else:
        target = cmath.log(x) + 2j * math.pi * k
        out.append(_series_seed_4(target))
        out.append(_log_fixed_point(target, target))
    return out


def _newton_ek_step(w: complex, target: complex) -> complex:
    # Newton on w + Log w = target; immune to exp overflow
    f = w + cmath.log(w) - target
    return f * w / (w + 1.0)


def _halley_from(seed: complex, target: complex, x: complex, cfg: PrecisionConfig):
    w = seed
    steps = 0
    for _ in range(cfg.max_iter):
        steps += 1
        w1 = w + 1.0
        if abs(w1) < 1e-12:
            w += 1e-8 * (1.0 + 1.0j)
            continue
        if w.real > _EXP_CAP:
            dw = _newton_ek_step(w, target)
        else:
            ew = cmath.exp(w)
            g = w * ew - x
            denom = ew * w1 - (w + 2.0) * g / (2.0 * w1)
            if denom == 0:
                w += 1e-8 * (1.0 + 1.0j)
                continue
            dw = g / denom
        w -= dw
        if abs(dw) <= _STEP_FLOOR * (2.0 + abs(w)):
            break
    return w, steps


def _unwind(w: complex, target: complex) -> complex:
    # a wrong-branch landing satisfies w + Log w = target + 2 pi i m; shifting
    # by -2 pi i m moves the point next to the wanted solution
    m = round((w + cmath.log(w) - target).imag / _TWO_PI)
    if m:
        return w - 2j * math.pi * m
    return w


def _newton_ek(w: complex, k_eff: int, x: complex, cfg: PrecisionConfig):
    target = cmath.log(x) + 2j * math.pi * k_eff
    steps = 0
    for _ in range(cfg.max_iter):
        steps += 1
        if abs(w + 1.0) < 1e-12:
            w += 1e-8 * (1.0 + 1.0j)
            continue
        dw = _newton_ek_step(w, target)
        w -= dw
        if abs(dw) <= _STEP_FLOOR * (2.0 + abs(w)):
            break
    return w, steps


def _real_pair_solve(k: int, xr: float, cfg: PrecisionConfig):
    """Bracketed Halley for the two real solutions at x in [-1/e, 0[."""
    p = math.sqrt(max(0.0, 2.0 * (math.e * xr + 1.0)))
    if k == 0:
        # increasing g on [-1, 0]
        lo, hi = -1.0, 0.0
        if abs(xr) <= 0.3:
            w = xr * (1.0 - xr + 1.5 * xr * xr)
        else:
            w = -1.0 + p - p * p / 3.0 + 11.0 * p**3 / 72.0
        w = min(max(w, lo), hi)
        increasing = True
    else:
        # decreasing g on (-inf, -1]
        hi = -1.0
        L = math.log(-xr)
        if xr > -0.27:
            w = L - math.log(-L)
        else:
            w = -1.0 - p - p * p / 3.0 - 11.0 * p**3 / 72.0
        lo = min(w - 1.0, -2.0)
        for _ in range(200):
            if lo * math.exp(lo) - xr > 0.0:
                break
            lo *= 2.0
        else:
            raise ConvergenceError("could not bracket the lower real solution")
        w = min(max(w, lo), hi)
        increasing = False

    steps = 0
    for _ in range(cfg.max_iter):
        steps += 1
        ew = math.exp(w)
        g = w * ew - xr
        if g == 0.0:
            break
        below = g < 0.0 if increasing else g > 0.0
        if below:
            lo = w
        else:
            hi = w
        w1 = w + 1.0
        cand = None
        if abs(w1) > 1e-12:
            denom = ew * w1 - (w + 2.0) * g / (2.0 * w1)
            if denom != 0.0:
                cand = w - g / denom
        if cand is None or not (lo <= cand <= hi):
            cand = 0.5 * (lo + hi)
        if abs(cand - w) <= _STEP_FLOOR * (2.0 + abs(cand)):
            w = cand
            break
        w = cand
    return w, steps


def lambert_w(
    k: int, x: complex, config: Optional[PrecisionConfig] = None
) -> EvalReport:
    """Evaluate the branch W_k(x) with residual-certified Halley iteration."""
    cfg = config or DEFAULT_CONFIG
    x = complex(x)
    if x == 0:
        raise DomainError("x must be nonzero")
    case = branch_exists(k, x)

    # the branch point: the pair collides, -1 is the documented value
    if k in (0, -1) and abs(x + INV_E) < 1e-12:
        w = complex(-1.0)
        residual, ek = _residuals(w, x, 0)
        return EvalReport(w, residual, ek, "halley", 0)

    if case.value_case == "real-pair-on-E0":
        k_eff = 0
        wr, steps = _real_pair_solve(k, x.real, cfg)
        w = complex(wr)
        residual, ek = _residuals(w, x, 0)
        if residual <= cfg.tol and ek <= cfg.tol * (1.0 + abs(w)):
            return EvalReport(w, residual, ek, "halley", steps)
        best = EvalReport(w, residual, ek, "halley", steps)
    else:
        k_eff = k
        target = cmath.log(x) + 2j * math.pi * k
        steps = 0
        best = None
        for seed in _seed_candidates(k, x):
            w, s = _halley_from(seed, target, x, cfg)
            steps += s
            residual, ek = _residuals(w, x, k_eff)
            if residual <= cfg.tol and ek <= cfg.tol * (1.0 + abs(w)):
                return EvalReport(w, residual, ek, "halley", steps)
            if best is None or residual + ek < best.residual + best.ek_residual:
                best = EvalReport(w, residual, ek, "halley", steps)

    # every seed landed short or on a neighboring branch: unwind any full
    # 2 pi i defect and polish on E_k itself
    target = cmath.log(x) + 2j * math.pi * k_eff
    w2, steps2 = _newton_ek(_unwind(best.value, target), k_eff, x, cfg)
    residual2, ek2 = _residuals(w2, x, k_eff)
    if residual2 <= cfg.tol and ek2 <= cfg.tol * (1.0 + abs(w2)):
        return EvalReport(w2, residual2, ek2, "halley", steps + steps2)

    if residual2 + ek2 < best.residual + best.ek_residual:
        best = EvalReport(w2, residual2, ek2, "halley", steps + steps2)
    raise ConvergenceError(
        f"lambert_w(k={k}, x={x!r}) failed to certify within {cfg.max_iter} iterations",
        report=best,
    )


def w0_series(
    z: complex, N: int = 500, config: Optional[PrecisionConfig] = None
) -> EvalReport:
    """Principal branch by its power series sum_{n>=1} (-1)^(n-1) n^(n-1)/n! z^n.

    Refuses |z| > 0.34: the series converges on |z| <= 1/e but the geometric
    rate e|z| makes the tail useless in doubles close to the boundary;
    lambert_w covers those points.
    """
    cfg = config or DEFAULT_CONFIG
    z = complex(z)
    if N < 1:
        raise DomainError("N must be at least 1")
    if abs(z) > 0.34:
        raise DomainError(
            "w0_series is restricted to |z| <= 0.34; use lambert_w(0, z)"
        )
    if z == 0:
        return EvalReport(complex(0.0), 0.0, 0.0, "series_w0", 0)

    term = z  # n = 1
    total = z
    steps = 1
    for n in range(1, N):
        term *= z * (-((1.0 + 1.0 / n) ** (n - 1)))
        total += term
        steps += 1
        if abs(term) <= 0.1 * cfg.tol * (1.0 + abs(total)):
            break
    residual, ek = _residuals(total, z, 0)
    report = EvalReport(total, residual, ek, "series_w0", steps)
    if residual <= cfg.tol and ek <= cfg.tol * (1.0 + abs(total)):
        return report
    raise ConvergenceError(
        f"w0_series(z={z!r}, N={N}) residual {residual:.3e} above tolerance",
        report=report,
    )


def w_derivative(
    k: int, x: complex, config: Optional[PrecisionConfig] = None
) -> complex:
    """dW_k/dx = W_k / (x (1 + W_k)); singular at the branch point."""
    x = complex(x)
    if x == 0:
        raise DomainError("x must be nonzero")
    w = lambert_w(k, x, config).value
    if abs(1.0 + w) < 1e-6:
        raise DomainError("derivative is singular at the branch point W = -1")
    return w / (x * (1.0 + w))


def asymptotic_w(k: int, x: complex) -> complex:
    """Three-term large-|k| approximation of W_k(x).

    W_k ~ A - Log A + Log x + (Log A - Log x)/A with A = 2 k pi i; the
    error is O(log^2 |k| / k^2).
    """
    if k == 0:
        raise DomainError("asymptotic form requires k != 0")
    x = complex(x)
    if x == 0:
        raise DomainError("x must be nonzero")
    a = 2j * math.pi * k
    la = cmath.log(a)
    lx = cmath.log(x)
    return a - la + lx + (la - lx) / a


def annulus_check(
    k_min: int, k_max: int, x: complex, config: Optional[PrecisionConfig] = None
) -> bool:
    """Is (2k-1) pi < |W_k(x)| < (2k+1) pi for every k in [k_min, k_max]?"""
    if k_min < 1 or k_max < k_min:
        raise DomainError("need 1 <= k_min <= k_max")
    for k in range(k_min, k_max + 1):
        r = abs(lambert_w(k, x, config).value)
        if not ((2 * k - 1) * math.pi < r < (2 * k + 1) * math.pi):
            return False
    return True


def smallest_annulus_k(
    x: complex, k_max: int = 50, config: Optional[PrecisionConfig] = None
) -> int:
    """Smallest k >= 1 whose annulus bound holds; the threshold is measured,
    never assumed."""
    for k in range(1, k_max + 1):
        if annulus_check(k, k, x, config):
            return k
    raise DomainError(f"annulus bound did not hold for any k <= {k_max}")
