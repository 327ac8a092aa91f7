"""Symmetric sums and products over the full branch family.

Every quantity here is a truncation over the window |k| <= K, accumulated
in conjugate pairs so the tails cancel the way the limits require.  Each
report carries the closed form it is converging to, the absolute error,
and the error at a few checkpoint truncations so the trend is visible.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Optional

from .branches import DEFAULT_CONFIG, PrecisionConfig, lambert_w
from .errors import DomainError

SUM_NAMES = (
    "INV_SHIFT",
    "PINELIS",
    "INV1",
    "INV2",
    "INV3",
    "PAIR_SHIFT",
    "SQ_SHIFT",
    "PINELIS2",
    "PAIR_SHIFT2",
    "PINELIS3",
    "DERIV_SHIFT",
    "DERIV_RATIO",
    "QUAD",
    "QUAD_W",
)

PRODUCT_NAMES = ("PROD_FUND", "PROD_HADAMARD", "CONST_SUM", "PROD_LIMIT")

ALL_NAMES = SUM_NAMES + PRODUCT_NAMES

_POLE_TOL = 1e-8

# the defining-equation residual floor grows like |k| * eps along a sweep,
# so certification inside sweeps is looser than the point-eval default;
# the values themselves are still machine precision
_SWEEP_CONFIG = PrecisionConfig(tol=1e-11)

_BRANCH_CACHE: dict = {}


@dataclass(frozen=True)
class IdentityId:
    name: str

    def __post_init__(self):
        if self.name not in ALL_NAMES:
            raise DomainError("unknown identity %r" % (self.name,))

    def closed(self, x, t=0.0) -> complex:
        return closed_form(self.name, x, t)


@dataclass(frozen=True)
class SumReport:
    identity: str
    x: complex
    t: complex
    K: int
    partial: complex
    closed_form: complex
    abs_err: float
    err_trend: tuple
    rel_err: Optional[float] = None
    accelerated: bool = False

    def to_json(self) -> dict:
        blob = {
            "identity": self.identity,
            "x": [self.x.real, self.x.imag],
            "t": [self.t.real, self.t.imag],
            "K": self.K,
            "partial": [self.partial.real, self.partial.imag],
            "closed_form": [self.closed_form.real, self.closed_form.imag],
            "abs_err": self.abs_err,
            "trend": [[k, e] for k, e in self.err_trend],
        }
        if self.rel_err is not None:
            blob["rel_err"] = self.rel_err
        if self.accelerated:
            blob["accelerated"] = True
        return blob


def branch_values(x, K: int, config: Optional[PrecisionConfig] = None) -> dict:
    """All W_k(x) for |k| <= K, cached per (x, tolerance) and grown on demand."""
    cfg = config if config is not None else _SWEEP_CONFIG
    key = (complex(x), cfg.tol)
    store = _BRANCH_CACHE.setdefault(key, {})
    for k in range(-K, K + 1):
        if k not in store:
            store[k] = lambert_w(k, x, cfg).value
    return store


# ---------------------------------------------------------------------------
# closed forms


def _shift_den(x: complex, t: complex) -> complex:
    d = x * cmath.exp(-t) - t
    if abs(d) < _POLE_TOL:
        raise DomainError("t is too close to a pole of the closed form")
    return d


def _quad_den(x: complex, t: complex) -> complex:
    d = x * x + 2.0 * x * t * cmath.sin(t) + t * t
    if abs(d) < _POLE_TOL:
        raise DomainError("t is too close to a pole of the closed form")
    return d


def closed_form(name: str, x, t=0.0) -> complex:
    x = complex(x)
    t = complex(t)
    if x == 0:
        raise DomainError("x must be nonzero")
    if name == "INV_SHIFT":
        return 0.5 + (1.0 + t) / _shift_den(x, t)
    if name == "PINELIS":
        return complex(0.5)
    if name == "INV1":
        return 0.5 + 1.0 / x
    if name == "INV2":
        return (2.0 * x + 1.0) / (x * x)
    if name == "INV3":
        return (3.0 * x * x + 6.0 * x + 2.0) / (2.0 * x**3)
    if name == "PAIR_SHIFT":
        return 1.0 / _shift_den(x, t)
    if name == "SQ_SHIFT":
        d = _shift_den(x, t)
        return (x * cmath.exp(-t) * (2.0 + t) + 1.0) / (d * d)
    if name in ("PINELIS2", "PINELIS3"):
        d = x * math.e + 1.0
        if abs(d) < _POLE_TOL:
            raise DomainError("x e + 1 vanishes; closed form has a pole")
        return 1.0 / d
    if name == "PAIR_SHIFT2":
        d = _shift_den(x, t)
        return (x * cmath.exp(-t) + 1.0) / (d * d)
    if name == "DERIV_SHIFT":
        return (0.5 + t / _shift_den(x, t)) / x
    if name == "DERIV_RATIO":
        return 1.0 / (2.0 * x)
    if name == "QUAD":
        sinc = 1.0 + 0.0j if t == 0 else cmath.sin(t) / t
        return (x * (cmath.cos(t) + sinc) + 1.0) / _quad_den(x, t)
    if name == "QUAD_W":
        num = x * (cmath.cos(t) - t * cmath.sin(t)) - t * t
        return 0.5 + num / _quad_den(x, t)
    if name == "PROD_FUND":
        return cmath.exp(-t / 2.0) - (t / x) * cmath.exp(t / 2.0)
    if name == "PROD_HADAMARD":
        return cmath.exp(t / x) * (1.0 - (t / x) * cmath.exp(t))
    if name == "CONST_SUM":
        return complex(math.log(2.0) / 2.0)
    if name == "PROD_LIMIT":
        return cmath.sqrt(x / 2.0) * (
            cmath.exp(-t / 2.0) - (t / x) * cmath.exp(t / 2.0)
        )
    raise DomainError("unknown identity %r" % (name,))


# ---------------------------------------------------------------------------
# term registry: per name, (term(w, t, x), denominators(w, t) to guard)

_TERMS = {
    "INV_SHIFT": (
        lambda w, t, x: 1.0 / (w - t),
        lambda w, t: (w - t,),
    ),
    "PINELIS": (
        lambda w, t, x: 1.0 / (w + 1.0),
        lambda w, t: (w + 1.0,),
    ),
    "INV1": (lambda w, t, x: 1.0 / w, lambda w, t: (w,)),
    "INV2": (lambda w, t, x: 1.0 / (w * w), lambda w, t: (w,)),
    "INV3": (lambda w, t, x: 1.0 / (w * w * w), lambda w, t: (w,)),
    "PAIR_SHIFT": (
        lambda w, t, x: 1.0 / ((w + 1.0) * (w - t)),
        lambda w, t: (w + 1.0, w - t),
    ),
    "SQ_SHIFT": (
        lambda w, t, x: 1.0 / ((w - t) * (w - t)),
        lambda w, t: (w - t,),
    ),
    "PINELIS2": (
        lambda w, t, x: 1.0 / ((w + 1.0) * (w + 1.0)),
        lambda w, t: (w + 1.0,),
    ),
    "PAIR_SHIFT2": (
        lambda w, t, x: 1.0 / ((w + 1.0) * (w - t) * (w - t)),
        lambda w, t: (w + 1.0, w - t),
    ),
    "PINELIS3": (
        lambda w, t, x: 1.0 / (w + 1.0) ** 3,
        lambda w, t: (w + 1.0,),
    ),
    # W' = W / (x (1 + W)), so both derivative sums reduce to rational terms
    "DERIV_SHIFT": (
        lambda w, t, x: w / (x * (1.0 + w) * (w - t)),
        lambda w, t: (w + 1.0, w - t),
    ),
    "DERIV_RATIO": (
        lambda w, t, x: 1.0 / (x * (1.0 + w)),
        lambda w, t: (w + 1.0,),
    ),
    "QUAD": (
        lambda w, t, x: 1.0 / (w * w + t * t),
        lambda w, t: (w * w + t * t,),
    ),
    "QUAD_W": (
        lambda w, t, x: w / (w * w + t * t),
        lambda w, t: (w * w + t * t,),
    ),
}


def _checkpoints(K: int) -> list:
    return sorted({c for c in (10, 100, 1000) if c <= K} | {K})


def _sum_to(name: str, x: complex, t: complex, K: int, vals: dict, closed):
    term, dens = _TERMS[name]

    def guarded(w):
        for d in dens(w, t):
            if abs(d) < _POLE_TOL:
                raise DomainError("t collides with a branch value")
        return term(w, t, x)

    marks = set(_checkpoints(K))
    trend = []
    acc = guarded(vals[0])
    for k in range(1, K + 1):
        acc += guarded(vals[k]) + guarded(vals[-k])
        if k in marks:
            trend.append((k, abs(acc - closed)))
    return acc, tuple(trend)


def symmetric_sum(
    identity,
    x,
    t=0.0,
    K: int = 1000,
    config: Optional[PrecisionConfig] = None,
    accelerate: bool = False,
) -> SumReport:
    """Truncated symmetric sum of one registered identity over |k| <= K."""
    name = identity.name if isinstance(identity, IdentityId) else str(identity)
    if name in PRODUCT_NAMES:
        raise DomainError(
            "%s is a product/limit; use its dedicated operation" % name
        )
    if name not in _TERMS:
        raise DomainError("unknown identity %r" % (name,))
    x = complex(x)
    t = complex(t)
    closed = closed_form(name, x, t)
    if accelerate:
        # two truncations fit the empirical log K / K tail model
        vals = branch_values(x, 2 * K, config)
        p1, trend = _sum_to(name, x, t, K, vals, closed)
        p2, _ = _sum_to(name, x, t, 2 * K, vals, closed)
        e1 = math.log(K) / K
        e2 = math.log(2 * K) / (2 * K)
        partial = (p2 * e1 - p1 * e2) / (e1 - e2)
        trend = trend + ((2 * K, abs(p2 - closed)),)
        return SumReport(
            name, x, t, K, partial, closed, abs(partial - closed), trend,
            accelerated=True,
        )
    vals = branch_values(x, K, config)
    partial, trend = _sum_to(name, x, t, K, vals, closed)
    return SumReport(name, x, t, K, partial, closed, abs(partial - closed), trend)


# ---------------------------------------------------------------------------
# products


def _product_report(name, x, t, K, partial, closed, trend) -> SumReport:
    abs_err = abs(partial - closed)
    rel = abs_err / abs(closed) if abs(closed) > 0 else None
    return SumReport(name, x, t, K, partial, closed, abs_err, trend, rel_err=rel)


def fundamental_product(
    x, t, K: int = 1000, config: Optional[PrecisionConfig] = None
) -> SumReport:
    """Partial product of (1 - t/W_k) over |k| <= K against its entire form."""
    x = complex(x)
    t = complex(t)
    closed = closed_form("PROD_FUND", x, t)
    if abs(closed) < _POLE_TOL:
        raise DomainError("closed form vanishes; t sits on a branch value")
    vals = branch_values(x, K, config)

    def factor(w):
        if abs(w - t) < _POLE_TOL:
            raise DomainError("t collides with a branch value")
        return 1.0 - t / w

    marks = set(_checkpoints(K))
    trend = []
    acc = factor(vals[0])
    for k in range(1, K + 1):
        acc *= factor(vals[k]) * factor(vals[-k])
        if k in marks:
            trend.append((k, abs(acc - closed)))
    return _product_report("PROD_FUND", x, t, K, acc, closed, tuple(trend))


def hadamard_product(
    x, t, K: int = 1000, config: Optional[PrecisionConfig] = None
) -> SumReport:
    """Partial product of (1 - t/W_k) e^{t/W_k}; converges to the closed form
    and relates to the plain product by exp(t * sum 1/W_k) at every K."""
    x = complex(x)
    t = complex(t)
    closed = closed_form("PROD_HADAMARD", x, t)
    if abs(closed) < _POLE_TOL:
        raise DomainError("closed form vanishes; t sits on a branch value")
    vals = branch_values(x, K, config)

    def factor(w):
        if abs(w - t) < _POLE_TOL:
            raise DomainError("t collides with a branch value")
        return (1.0 - t / w) * cmath.exp(t / w)

    marks = set(_checkpoints(K))
    trend = []
    acc = factor(vals[0])
    for k in range(1, K + 1):
        acc *= factor(vals[k]) * factor(vals[-k])
        if k in marks:
            trend.append((k, abs(acc - closed)))
    return _product_report("PROD_HADAMARD", x, t, K, acc, closed, tuple(trend))


def constant_sum(
    x, K: int = 2000, config: Optional[PrecisionConfig] = None
) -> SumReport:
    """Sum of all branches plus the factorial counterterm, in log space.

    The combination sum W_k + log(pi^{2K} (2K)!) - (2K + 1/2) log x tends to
    log(2)/2 independently of x; the factorial never materializes, only its
    logarithm accumulates.
    """
    if K < 10:
        raise DomainError("K must be at least 10")
    x = complex(x)
    closed = closed_form("CONST_SUM", x, 0.0)
    lx = cmath.log(x)
    vals = branch_values(x, K, config)
    log_pi = math.log(math.pi)

    marks = set(_checkpoints(K))
    trend = []
    acc = vals[0]
    logfact = 0.0
    res, ims, logs = [vals[0].real], [vals[0].imag], []
    for k in range(1, K + 1):
        pair = vals[k] + vals[-k]
        acc += pair
        res.append(pair.real)
        ims.append(pair.imag)
        logs.append(math.log(2 * k - 1))
        logs.append(math.log(2 * k))
        logfact += math.log(2 * k - 1) + math.log(2 * k)
        if k in marks:
            p = acc + 2 * k * log_pi + logfact - (2 * k + 0.5) * lx
            trend.append((k, abs(p - closed)))
    partial = (
        complex(math.fsum(res), math.fsum(ims))
        + 2 * K * log_pi
        + math.fsum(logs)
        - (2 * K + 0.5) * lx
    )
    return SumReport(
        "CONST_SUM", x, complex(0.0), K, partial, closed,
        abs(partial - closed), tuple(trend),
    )


def product_limit(
    x, t=0.0, K: int = 2000, config: Optional[PrecisionConfig] = None
) -> SumReport:
    """Normalized product of (W_k - t) against sqrt(x/2) times the entire form.

    pi^{2K} (2K)! factors exactly into per-pair normalizers pi^2 (2k)(2k-1),
    so the running product stays O(1) and never overflows.
    """
    x = complex(x)
    t = complex(t)
    closed = closed_form("PROD_LIMIT", x, t)
    vals = branch_values(x, K, config)

    marks = set(_checkpoints(K))
    trend = []
    acc = vals[0] - t
    pi2 = math.pi * math.pi
    for k in range(1, K + 1):
        a = vals[k] - t
        b = vals[-k] - t
        if abs(a) < _POLE_TOL or abs(b) < _POLE_TOL:
            raise DomainError("t collides with a branch value")
        acc *= a * b / (pi2 * (2 * k) * (2 * k - 1))
        if k in marks:
            trend.append((k, abs(acc - closed)))
    return _product_report("PROD_LIMIT", x, t, K, acc, closed, tuple(trend))
