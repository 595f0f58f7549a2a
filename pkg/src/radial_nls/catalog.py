"""Registry of closed-form radial solutions u(t, r).

Each family is a builder that checks its parameter constraints and returns
an evaluator together with a domain predicate.  The predicate rejects
non-positive radicands, vanishing denominators, kinks of inverse
trigonometric phases, and (for odd or fractional p) non-positive real
amplitudes, since |A|^p A = A^(p+1) only holds for A > 0 there.
"""

from __future__ import annotations

import cmath
import hashlib
import math
from dataclasses import dataclass, field, fields
from functools import lru_cache
from importlib import resources
from typing import Callable, Iterable

from .core import (ConstraintError, Grid, Parameters, RadialNLSError, Solution,
                   SpacetimePoint, parse_real)
from .symmetry import arctan_inv
from .specfun import (BesselKind, WhittakerAntiderivative, WhittakerParams, bessel,
                      whittaker_m)

BEHAVIOURS = ("standing_wave", "monopole", "bright_soliton", "dark_soliton", "other")

# 1 - |X| must exceed this for arcsin/arccosh phases; their closed forms have
# a kink where the argument touches +-1.
KINK_MARGIN = 1e-4
WHITTAKER_TOL = 1e-13
REL = 1e-12


class EmptyDomain(RadialNLSError):
    kind = "empty_domain"


CONSTANT_NAMES = ("c1", "c2", "c3", "c4", "nu", "mu", "kappa")


@dataclass(frozen=True)
class FamilyConstants:
    c1: float | None = None
    c2: float | None = None
    c3: float | None = None
    c4: float | None = None
    nu: float | None = None
    mu: float | None = None
    kappa: float | None = None
    sign_choices: tuple = ()

    @classmethod
    def from_mapping(cls, values: dict, signs: Iterable[int] = ()) -> "FamilyConstants":
        bad = set(values) - set(CONSTANT_NAMES)
        if bad:
            raise ConstraintError(f"unknown constants: {sorted(bad)}")
        return cls(**{k: float(v) for k, v in values.items()},
                   sign_choices=tuple(int(s) for s in signs))

    def given(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)
                if f.name != "sign_choices" and getattr(self, f.name) is not None}


class _Consts:
    """Attribute view of the constants handed to a builder."""

    def __init__(self, fc: FamilyConstants, declared: tuple):
        for name in declared:
            setattr(self, name, getattr(fc, name))
        self.c1 = fc.c1 if fc.c1 is not None else 0.0
        self.sign = fc.sign_choices


def _need(cond: bool, reason: str) -> None:
    if not cond:
        raise ConstraintError(reason)


def _eq(a: float, b: float) -> bool:
    return abs(a - b) <= REL * max(1.0, abs(b))


@dataclass(frozen=True)
class FamilyDescriptor:
    id: str
    theorem_anchor: str
    formula: str
    constants: tuple
    n_signs: int
    behaviour_tag: str
    builder: Callable = field(repr=False, compare=False)
    subgroup: str | None = None  # optimal subgroup the family is invariant under
    vacuous_over_reals: bool = False
    note: str = ""

    def build(self, params: Parameters, fc: FamilyConstants):
        given = fc.given()
        extra = set(given) - set(self.constants) - {"c1"}
        if extra:
            raise ConstraintError(f"{self.id}: undeclared constants {sorted(extra)}")
        missing = [c for c in self.constants if c not in given]
        if missing:
            raise ConstraintError(f"{self.id}: missing constants {missing}")
        if len(fc.sign_choices) != self.n_signs:
            raise ConstraintError(f"{self.id}: expects {self.n_signs} sign choice(s)")
        if any(s not in (1, -1) for s in fc.sign_choices):
            raise ConstraintError(f"{self.id}: sign choices must be +1 or -1")
        return self.builder(params, _Consts(fc, self.constants))

    def constraint(self, params: Parameters, fc: FamilyConstants) -> bool:
        return self.constraint_reason(params, fc) is None

    def constraint_reason(self, params: Parameters, fc: FamilyConstants) -> str | None:
        try:
            self.build(params, fc)
        except ConstraintError as e:
            return str(e)
        return None

    def checksum(self) -> str:
        return hashlib.sha256(f"{self.id}|{self.formula}".encode()).hexdigest()[:16]


_REGISTRY: dict[str, FamilyDescriptor] = {}


def _family(fid: str, anchor: str, formula: str, constants=(), signs: int = 0,
            tag: str = "other", subgroup: str | None = "trans", **kw):
    def deco(fn):
        _REGISTRY[fid] = FamilyDescriptor(fid, anchor, formula, tuple(constants), signs,
                                          tag, fn, subgroup, **kw)
        return fn
    return deco


def _static(amp: Callable[[float], float], phase: Callable[[float], float] | None,
            c1: float, positive: bool):
    """u = amp(r) exp(i(c1 + phase(r))) with the usual domain guards."""

    def ev(t, r):
        ph = c1 if phase is None else c1 + phase(r)
        return amp(r) * cmath.exp(1j * ph)

    def dom(t, r):
        a = amp(r)
        if not math.isfinite(a) or a == 0 or (positive and a < 0):
            return False
        if phase is not None and not math.isfinite(phase(r)):
            return False
        return True

    return ev, dom


def _needs_positive(p: float) -> bool:
    # |A|^p A = A^(p+1) for every real A only when p is an even integer
    return not (float(p).is_integer() and int(p) % 2 == 0)


def _rp(x: float, e: float) -> float:
    """x**e for x > 0; nan otherwise so the domain predicate rejects it."""
    return x ** e if x > 0 else math.nan


def _asin(x: float) -> float:
    return math.asin(x) if abs(x) <= 1 - KINK_MARGIN else math.nan


def _acosh(x: float) -> float:
    return math.acosh(x) if x >= 1 + KINK_MARGIN else math.nan


def _p_is(P: Parameters, p: float, text: str) -> None:
    _need(_eq(P.p, p), f"requires {text}")


def _n_is(P: Parameters, n: float, text: str) -> None:
    _need(_eq(P.n, n), f"requires {text}")


# time-translation invariant (static) families --------------------------------

TRANS = "time-translation invariant solutions"


@_family("T01", TRANS, "(2(p(n-2)-2)/(k p^2))^(1/p) r^(-2/p) e^(i c1)", tag="monopole")
def _t01(P, c):
    d = P.p * (P.n - 2) - 2
    _need(d != 0, "requires p != 2/(n-2)")
    _need(P.k / d > 0, "requires k/(p(n-2)-2) > 0")
    a = (2 * d / (P.k * P.p ** 2)) ** (1 / P.p)
    return _static(lambda r: a * r ** (-2 / P.p), None, c.c1, False)


@_family("T02", TRANS, "(s 8(p+2)/(k p^2))^(1/p) (c2 r^2 + s/c2)^(-2/p) e^(i c1); p=4/(n-2)",
         ("c2",), 1, "bright_soliton")
def _t02(P, c):
    s = c.sign[0]
    _need(P.n != 2, "requires n != 2")
    _p_is(P, 4 / (P.n - 2), "p = 4/(n-2)")
    _need(s * P.k * (1 - 2 / P.n) > 0, "requires (sign)*k*(1-2/n) > 0")
    _need(c.c2 != 0, "requires c2 != 0")
    p = P.p
    a = (s * 8 * (p + 2) / (P.k * p * p)) ** (1 / p)
    return _static(lambda r: a * _rp(c.c2 * r * r + s / c.c2, -2 / p), None, c.c1,
                   _needs_positive(p))


@_family("T03", TRANS, "(-k p^2 (p+2)/8)^(-1/p) (r + c2 r^(3-n))^(-2/p) e^(i c1); p=2(n-3)/(2-n)",
         ("c2",), 0, "monopole")
def _t03(P, c):
    n, p = P.n, P.p
    _need(n not in (2, 3), "requires n != 2, 3")
    _p_is(P, 2 * (n - 3) / (2 - n), "p = 2(n-3)/(2-n)")
    _need(P.k / (n - 2) < 0, "requires k/(n-2) < 0")
    a = (-P.k * p * p * (p + 2) / 8) ** (-1 / p)
    return _static(lambda r: a * _rp(r + c.c2 * r ** (3 - n), -2 / p), None, c.c1,
                   _needs_positive(p))


@_family("T04", TRANS, "(-(k/(2n)) r^2 + c3 r^(2-n) + c2) e^(i c1); p=-1", ("c2", "c3"))
def _t04(P, c):
    _p_is(P, -1, "p = -1")
    _need(P.n not in (0, 2), "requires n != 0, 2")
    n = P.n
    return _static(lambda r: -0.5 * (P.k / n) * r * r + c.c3 * r ** (2 - n) + c.c2,
                   None, c.c1, True)


@_family("T05", TRANS, "(-(k/4) r^2 + c3 ln r + c2) e^(i c1); p=-1, n=2", ("c2", "c3"))
def _t05(P, c):
    _p_is(P, -1, "p = -1")
    _n_is(P, 2, "n = 2")
    return _static(lambda r: -0.25 * P.k * r * r + c.c3 * math.log(r) + c.c2,
                   None, c.c1, True)


@_family("T06", TRANS, "(96/k)(r^2 + c2)(2r^2 + c2)^(-2) e^(i c1); p=1, n=16", ("c2",))
def _t06(P, c):
    _p_is(P, 1, "p = 1")
    _n_is(P, 16, "n = 16")

    def amp(r):
        d = 2 * r * r + c.c2
        return (96 / P.k) * (r * r + c.c2) / (d * d) if d != 0 else math.nan

    return _static(amp, None, c.c1, True)


@_family("T07", TRANS, "(-(k/2) r^2 ln r + c3 r^2 + c2) e^(i c1); p=-1, n=0", ("c2", "c3"))
def _t07(P, c):
    _p_is(P, -1, "p = -1")
    _n_is(P, 0, "n = 0")
    return _static(lambda r: -0.5 * P.k * r * r * math.log(r) + c.c3 * r * r + c.c2,
                   None, c.c1, True)


@_family("T08", TRANS, "(4k/3)^(1/4) r^2 (r^-2 - c2/k)^(3/4) "
         "e^(i c1 - i sqrt(3)/2 ((k/c2) r^-2 - 1)^(-1/2)); p=-4, n=0", ("c2",))
def _t08(P, c):
    _p_is(P, -4, "p = -4")
    _n_is(P, 0, "n = 0")
    _need(P.k > 0, "requires k > 0")
    _need(c.c2 != 0, "requires c2 != 0")
    a = (4 * P.k / 3) ** 0.25
    return _static(lambda r: a * r * r * _rp(r ** -2 - c.c2 / P.k, 0.75),
                   lambda r: -math.sqrt(3) / 2 * _rp((P.k / c.c2) / (r * r) - 1, -0.5),
                   c.c1, False)


@_family("T09", TRANS, "(12k)^(1/4) (r^(2/3) - c2/k)^(3/4) "
         "e^(i c1 + i sqrt(3)/2 ((k/c2) r^(2/3) - 1)^(-1/2)); p=-4, n=4/3", ("c2",),
         note="sign-corrected: amplitude (12k)^(1/4)(r^(2/3)-c2/k)^(3/4) with k > 0")
def _t09(P, c):
    _p_is(P, -4, "p = -4")
    _n_is(P, 4 / 3, "n = 4/3")
    _need(P.k > 0, "requires k > 0")
    _need(c.c2 > 0, "requires c2 > 0")
    a = (12 * P.k) ** 0.25
    return _static(lambda r: a * _rp(r ** (2 / 3) - c.c2 / P.k, 0.75),
                   lambda r: math.sqrt(3) / 2 * _rp((P.k / c.c2) * r ** (2 / 3) - 1, -0.5),
                   c.c1, False)


@_family("T10", TRANS, "((3k/c3^2) r^(4/3) - 4 c3^2 (r^(1/3) + c2 r^(2/3))^2)^(1/4) "
         "e^(i c1 + i/2 arcsin((1 - (4/3)(c3^4/k)(r^(-1/3) + c2)^2)^(1/2))); p=-8, n=5/3",
         ("c2", "c3"))
def _t10(P, c):
    _p_is(P, -8, "p = -8")
    _n_is(P, 5 / 3, "n = 5/3")
    _need(P.k > 0, "requires k > 0")
    _need(c.c3 != 0, "requires c3 != 0")
    k, c2, c3 = P.k, c.c2, c.c3

    def amp(r):
        q = r ** (1 / 3) + c2 * r ** (2 / 3)
        return _rp((3 * k / c3 ** 2) * r ** (4 / 3) - 4 * c3 ** 2 * q * q, 0.25)

    def phase(r):
        s = 1 - (4 / 3) * (c3 ** 4 / k) * (r ** (-1 / 3) + c2) ** 2
        return 0.5 * _asin(_rp(s, 0.5))

    return _static(amp, phase, c.c1, False)


@_family("T11", TRANS, "(2/k) r^-2 (2 c2 r^(1/3) + 3)(c2 r^(1/3) + 3)^-2 e^(i c1); p=1, n=13/3",
         ("c2",), 0, "monopole")
def _t11(P, c):
    _p_is(P, 1, "p = 1")
    _n_is(P, 13 / 3, "n = 13/3")

    def amp(r):
        q = c.c2 * r ** (1 / 3)
        d = q + 3
        return (2 / P.k) / (r * r) * (2 * q + 3) / (d * d) if d != 0 else math.nan

    return _static(amp, None, c.c1, True)


def _n1p4(P):
    _p_is(P, -4, "p = -4")
    _n_is(P, 1, "n = 1")


@_family("T12", TRANS, "(-2 c3 r + (s(k - c3^2))^(1/2)(c2 r^2 - s/c2))^(1/2) e^(i c1); p=-4, n=1",
         ("c2", "c3"), 1)
def _t12(P, c):
    _n1p4(P)
    s = c.sign[0]
    _need(c.c3 ** 2 != P.k, "requires c3^2 != k")
    _need(s * (P.k - c.c3 ** 2) > 0, "requires (sign)*(k - c3^2) > 0")
    _need(c.c2 != 0, "requires c2 != 0")
    w = math.sqrt(s * (P.k - c.c3 ** 2))
    return _static(lambda r: _rp(-2 * c.c3 * r + w * (c.c2 * r * r - s / c.c2), 0.5),
                   None, c.c1, False)


@_family("T13", TRANS, "Q^(1/2) e^(i c1 - i/2 (k/c3^2 - 1)^(-1/2) arcsinh((2 w r + c4 q)/Q)), "
         "w = (k - c3^2 - c4^2)^(1/2), q = c2 r^2 - 1/c2, Q = -2 c4 r + w q; p=-4, n=1",
         ("c2", "c3", "c4"))
def _t13(P, c):
    _n1p4(P)
    k, c2, c3, c4 = P.k, c.c2, c.c3, c.c4
    _need(c3 != 0 and c2 != 0, "requires c2, c3 != 0")
    _need(c3 ** 2 + c4 ** 2 < k, "requires c3^2 + c4^2 < k")
    w = math.sqrt(k - c3 ** 2 - c4 ** 2)
    g = (k / c3 ** 2 - 1) ** -0.5

    def Q(r):
        return -2 * c4 * r + w * (c2 * r * r - 1 / c2)

    def phase(r):
        q = Q(r)
        return -0.5 * g * math.asinh((2 * w * r + c4 * (c2 * r * r - 1 / c2)) / q) \
            if q > 0 else math.nan

    return _static(lambda r: _rp(Q(r), 0.5), phase, c.c1, False)


def _t1415(P, c, inverse: str):
    _n1p4(P)
    k, c2, c3, c4 = P.k, c.c2, c.c3, c.c4
    _need(c3 != 0 and c2 != 0, "requires c2, c3 != 0")
    w = math.sqrt(c3 ** 2 + c4 ** 2 - k)

    def Q(r):
        return -2 * c4 * r + w * (c2 * r * r + 1 / c2)

    def X(r):
        return (2 * w * r - c4 * (c2 * r * r + 1 / c2)) / Q(r)

    if inverse == "acosh":
        g = (k / c3 ** 2 - 1) ** -0.5

        def phase(r):
            return -0.5 * g * _acosh(-X(r)) if Q(r) > 0 else math.nan
    else:
        g = (1 - k / c3 ** 2) ** -0.5

        # X touches -1 or +1 tangentially at r = 1/c2; past that point the
        # smooth branch is sign*pi - asin X, not the principal value
        turn = 1 / c2
        flip = math.copysign(math.pi, X(turn)) if c2 > 0 and Q(turn) > 0 else 0.0

        def phase(r):
            if not Q(r) > 0:
                return math.nan
            a = _asin(X(r))
            return -0.5 * g * (flip - a if flip and r > turn else a)

    return _static(lambda r: _rp(Q(r), 0.5), phase, c.c1, False)


@_family("T14", TRANS, "Q^(1/2) e^(i c1 - i/2 (k/c3^2 - 1)^(-1/2) arccosh((2 w r - c4 q)/(2 c4 r - w q))), "
         "w = (c3^2 + c4^2 - k)^(1/2), q = c2 r^2 + 1/c2, Q = -2 c4 r + w q; p=-4, n=1",
         ("c2", "c3", "c4"))
def _t14(P, c):
    _need(c.c3 ** 2 < P.k < c.c3 ** 2 + c.c4 ** 2, "requires c3^2 < k < c3^2 + c4^2")
    return _t1415(P, c, "acosh")


@_family("T15", TRANS, "Q^(1/2) e^(i c1 - i/2 (1 - k/c3^2)^(-1/2) arcsin((2 w r - c4 q)/Q)), "
         "w = (c3^2 + c4^2 - k)^(1/2), q = c2 r^2 + 1/c2, Q = -2 c4 r + w q; p=-4, n=1",
         ("c2", "c3", "c4"))
def _t15(P, c):
    _need(c.c3 ** 2 > P.k, "requires c3^2 > k")
    return _t1415(P, c, "asin")


@_family("T16", TRANS, "(-2 c3 r + c2 r^2)^(1/2) e^(i c1 + s i/2 (k/c3^2 - 1)^(1/2) ln|c2 - 2 c3/r|); "
         "p=-4, n=1", ("c2", "c3"), 1)
def _t16(P, c):
    _n1p4(P)
    _need(c.c3 != 0, "requires c3 != 0")
    _need(P.k > c.c3 ** 2, "requires k/c3^2 > 1")
    g = c.sign[0] * 0.5 * math.sqrt(P.k / c.c3 ** 2 - 1)

    def phase(r):
        d = abs(c.c2 - 2 * c.c3 / r)
        return g * math.log(d) if d > 0 else math.nan

    return _static(lambda r: _rp(-2 * c.c3 * r + c.c2 * r * r, 0.5), phase, c.c1, False)


@_family("T17", TRANS, "(-2 c3 r + c2)^(1/2) e^(i c1 + s i/2 (k/c3^2 - 1)^(1/2) ln|c2 - 2 c3 r|); "
         "p=-4, n=1", ("c2", "c3"), 1)
def _t17(P, c):
    _n1p4(P)
    _need(c.c3 != 0, "requires c3 != 0")
    _need(P.k > c.c3 ** 2, "requires k/c3^2 > 1")
    g = c.sign[0] * 0.5 * math.sqrt(P.k / c.c3 ** 2 - 1)

    def phase(r):
        d = abs(c.c2 - 2 * c.c3 * r)
        return g * math.log(d) if d > 0 else math.nan

    return _static(lambda r: _rp(-2 * c.c3 * r + c.c2, 0.5), phase, c.c1, False)


@_family("T18", TRANS, "(c3/c2)^(1/2) (c2 r - 1) e^(i c1 - i/2 (k^(1/2)/c3)(c2 r + 1)/(c2 r - 1)); "
         "p=-4, n=1", ("c2", "c3"))
def _t18(P, c):
    _n1p4(P)
    _need(P.k > 0, "requires k > 0")
    _need(c.c2 != 0 and c.c3 / c.c2 > 0, "requires c3/c2 > 0")
    a = math.sqrt(c.c3 / c.c2)
    g = 0.5 * math.sqrt(P.k) / c.c3

    def phase(r):
        d = c.c2 * r - 1
        return -g * (c.c2 * r + 1) / d if d != 0 else math.nan

    return _static(lambda r: a * (c.c2 * r - 1), phase, c.c1, False)


@_family("T19", TRANS, "c2 r e^(i c1 - i (k^(1/2)/c2^2) r^-1); p=-4, n=1", ("c2",))
def _t19(P, c):
    _n1p4(P)
    _need(P.k > 0, "requires k > 0")
    _need(c.c2 != 0, "requires c2 != 0")
    g = math.sqrt(P.k) / c.c2 ** 2
    return _static(lambda r: c.c2 * r, lambda r: -g / r, c.c1, False)


@_family("T20", TRANS, "c2 e^(i c1 - i (k^(1/2)/c2^2) r); p=-4, n=1", ("c2",))
def _t20(P, c):
    _n1p4(P)
    _need(P.k > 0, "requires k > 0")
    _need(c.c2 != 0, "requires c2 != 0")
    g = math.sqrt(P.k) / c.c2 ** 2
    return _static(lambda r: c.c2, lambda r: -g * r, c.c1, False)


def _t2123(P, c, which: str):
    _n1p4(P)
    k, c2, c3, c4 = P.k, c.c2, c.c3, c.c4

    def amp(r):
        return _rp(((c3 ** 2 - k) / c4) * r * r + c4 * (1 + c2 * r) ** 2, 0.5)

    if which == "asinh":
        g = -c3 * (k - c3 ** 2) ** -0.5
        a = c4 ** 2 / (k - c3 ** 2)

        def phase(r):
            return g * math.asinh(_rp(-1 + a * (1 / r + c2) ** 2, -0.5))
    elif which == "asin":
        g = -c3 * (c3 ** 2 - k) ** -0.5
        a = c4 ** 2 / (c3 ** 2 - k)

        def phase(r):
            return g * _asin((1 + a * (1 / r + c2) ** 2) ** -0.5)
    else:
        g = -c3 * (k - c3 ** 2) ** -0.5
        a = c4 ** 2 / (c3 ** 2 - k)

        def phase(r):
            return g * _acosh(_rp(1 + a * (1 / r + c2) ** 2, -0.5))

    return _static(amp, phase, c.c1, False)


@_family("T21", TRANS, "(((c3^2 - k)/c4) r^2 + c4(1 + c2 r)^2)^(1/2) e^(i c1 - i c3 (k - c3^2)^(-1/2) "
         "arcsinh((-1 + (c4^2/(k - c3^2))(r^-1 + c2)^2)^(-1/2))); p=-4, n=1",
         ("c2", "c3", "c4"))
def _t21(P, c):
    _need(c.c3 ** 2 < P.k and c.c4 > 0, "requires c3^2 < k and c4 > 0")
    return _t2123(P, c, "asinh")


@_family("T22", TRANS, "(((c3^2 - k)/c4) r^2 + c4(1 + c2 r)^2)^(1/2) e^(i c1 - i c3 (c3^2 - k)^(-1/2) "
         "arcsin((1 + (c4^2/(c3^2 - k))(r^-1 + c2)^2)^(-1/2))); p=-4, n=1",
         ("c2", "c3", "c4"))
def _t22(P, c):
    _need(c.c3 ** 2 > P.k and c.c4 > 0, "requires c3^2 > k and c4 > 0")
    return _t2123(P, c, "asin")


@_family("T23", TRANS, "(((c3^2 - k)/c4) r^2 + c4(1 + c2 r)^2)^(1/2) e^(i c1 - i c3 (k - c3^2)^(-1/2) "
         "arccosh((1 + (c4^2/(c3^2 - k))(r^-1 + c2)^2)^(-1/2))); p=-4, n=1",
         ("c2", "c3", "c4"))
def _t23(P, c):
    _need(c.c3 ** 2 < P.k and c.c4 < 0, "requires c3^2 < k and c4 < 0")
    return _t2123(P, c, "acosh")


@_family("T24", TRANS, "(4(k - c3^2))^(1/4) (c2 r^2 + s r)^(1/2) "
         "e^(i c1 + i/2 c3 (k - c3^2)^(-1/2) ln|c2 + s/r|); p=-4, n=1", ("c2", "c3"), 1)
def _t24(P, c):
    _n1p4(P)
    _need(c.c3 ** 2 < P.k, "requires c3^2 < k")
    s = c.sign[0]
    a = (4 * (P.k - c.c3 ** 2)) ** 0.25
    g = 0.5 * c.c3 * (P.k - c.c3 ** 2) ** -0.5

    def phase(r):
        d = abs(c.c2 + s / r)
        return g * math.log(d) if d > 0 else math.nan

    return _static(lambda r: a * _rp(c.c2 * r * r + s * r, 0.5), phase, c.c1, False)


@_family("T25", TRANS, "c3 (1 + c2 r) e^(i c1 - s i (k^(1/2)/c3^2)(r^-1 + c2)^-1); p=-4, n=1",
         ("c2", "c3"), 1)
def _t25(P, c):
    _n1p4(P)
    _need(P.k > 0, "requires k > 0")
    _need(c.c3 != 0, "requires c3 != 0")
    g = c.sign[0] * math.sqrt(P.k) / c.c3 ** 2

    def phase(r):
        d = 1 / r + c.c2
        return -g / d if d != 0 else math.nan

    return _static(lambda r: c.c3 * (1 + c.c2 * r), phase, c.c1, False)


# standing waves ---------------------------------------------------------------

WAVE = "time translation combined with phase rotation invariant solutions"


def _standing(P, c, kinds):
    _p_is(P, -1, "p = -1")
    order = abs(P.n - 2) / 2
    k, nu, n = P.k, c.nu, P.n
    q = math.sqrt(abs(nu))

    def amp(r):
        x = q * r
        b = c.c2 * bessel(kinds[0], order, x)
        if c.c3 != 0:
            b += c.c3 * bessel(kinds[1], order, x)
        return r ** (1 - n / 2) * b - k / nu

    def ev(t, r):
        return amp(r) * cmath.exp(1j * (c.c1 + nu * t))

    def dom(t, r):
        return amp(r) > 0

    return ev, dom


@_family("S01", WAVE, "(r^(1-n/2)(c2 J_o(nu^(1/2) r) + c3 Y_o(nu^(1/2) r)) - k/nu) "
         "e^(i c1 + i nu t), o = |n-2|/2; p=-1", ("c2", "c3", "nu"), 0, "standing_wave",
         subgroup="trans_phase")
def _s01(P, c):
    _need(c.nu > 0, "requires nu > 0")
    return _standing(P, c, (BesselKind.J, BesselKind.Y))


@_family("S02", WAVE, "(r^(1-n/2)(c2 I_o((-nu)^(1/2) r) + c3 K_o((-nu)^(1/2) r)) - k/nu) "
         "e^(i c1 + i nu t), o = |n-2|/2; p=-1", ("c2", "c3", "nu"), 0, "standing_wave",
         subgroup="trans_phase")
def _s02(P, c):
    _need(c.nu < 0, "requires nu < 0")
    return _standing(P, c, (BesselKind.I, BesselKind.K))


# Whittaker families -------------------------------------------------------------

def _whittaker_amplitude(k: float, regular: WhittakerParams, terminating: WhittakerParams,
                         arg: Callable, pref: complex, c2: float, c3: float, swap: bool):
    """xi -> pref (M_a(z) int_c2^xi M_b - M_b(z) int_c3^xi M_a), z = arg(xi).

    For the scaling family (M_a, M_b) = (M_-, M_+); the pseudo-conformal one
    uses the opposite order, selected by ``swap``.
    """
    first, second = (regular, terminating) if swap else (terminating, regular)
    int1 = WhittakerAntiderivative(second, arg, c2, tol=WHITTAKER_TOL)
    int2 = WhittakerAntiderivative(first, arg, c3, tol=WHITTAKER_TOL)

    @lru_cache(maxsize=8192)
    def amp(xi: float) -> complex:
        z = arg(xi)
        return pref * (whittaker_m(first, z) * int1(xi) - whittaker_m(second, z) * int2(xi))

    return amp


def _scal_amp(P, c):
    _p_is(P, -1, "p = -1")
    _n_is(P, -4, "n = -4")
    _need(c.mu == 0, "requires mu = 0 (the M_{kappa,-3/2} series must terminate)")
    _need(c.c2 > 0 and c.c3 > 0, "requires c2, c3 > 0")
    _need(c.c2 == c.c3, "requires c2 = c3 for a real amplitude")
    kap = -0.5j * c.mu
    return _whittaker_amplitude(P.k, WhittakerParams(kap, 1.5), WhittakerParams(kap, -1.5),
                                lambda x: 0.25j / x, 1j * P.k / 3, c.c2, c.c3, False)


def _conf_amp(P, c):
    _p_is(P, -1, "p = -1")
    _n_is(P, -4, "n = -4")
    _need(c.kappa in (-2.0, 0.0, 2.0),
          "requires kappa in {-2, 0, 2} (the M_{kappa/2,-3/2} series must terminate)")
    _need(c.c2 > 0 and c.c3 > 0, "requires c2, c3 > 0")
    kap = c.kappa / 2
    return _whittaker_amplitude(P.k, WhittakerParams(kap, 1.5), WhittakerParams(kap, -1.5),
                                lambda x: 0.5 / x, P.k / 6, c.c2, c.c3, True)


def _whittaker_ok(amp, xi: float, lo: float, c_lo: float) -> bool:
    # keep every Whittaker argument inside the series regime |z| <= 60
    if not min(xi, c_lo) >= lo:
        return False
    a = amp(xi)
    return a.real > 0 and abs(a.imag) <= 1e-8 * abs(a)


def _whittaker_solution(amp, c_lo: float, z_lo: float, xi_of, phase_of, extra_dom):
    def ev(t, r):
        return r * r * amp(xi_of(t, r)).real * cmath.exp(1j * phase_of(t, r))

    def dom(t, r):
        return extra_dom(t, r) and _whittaker_ok(amp, xi_of(t, r), z_lo, c_lo)

    return ev, dom


SCAL = "scaling combined with phase rotation invariant solutions"
CONF = "time translation and inversion combined with phase rotation invariant solutions"


@_family("G01", SCAL, "(i k/3) r^2 (M[-i mu/2,-3/2](i r^2/(4t)) int_c2^(t/r^2) M[-i mu/2,3/2](i/(4x)) dx"
         " - M[-i mu/2,3/2](i r^2/(4t)) int_c3^(t/r^2) M[-i mu/2,-3/2](i/(4x)) dx)"
         " e^(i c1 - i r^2/(8t) + i mu/2 ln t); p=-1, n=-4", ("c2", "c3", "mu"),
         subgroup="scal_phase")
def _g01(P, c):
    amp = _scal_amp(P, c)
    return _whittaker_solution(
        amp, min(c.c2, c.c3), 1 / 240, lambda t, r: t / (r * r),
        lambda t, r: c.c1 - r * r / (8 * t) + 0.5 * c.mu * math.log(t),
        lambda t, r: t > 0)


@_family("P01", CONF, "(k/6) r^2 (M[kappa/2,3/2](r^2/(2(1+t^2))) int_c2^((1+t^2)/r^2) M[kappa/2,-3/2](1/(2x)) dx"
         " - M[kappa/2,-3/2](r^2/(2(1+t^2))) int_c3^((1+t^2)/r^2) M[kappa/2,3/2](1/(2x)) dx)"
         " e^(i c1 - i kappa arctan(1/t) - i r^2 t/(4(1+t^2))); p=-1, n=-4",
         ("c2", "c3", "kappa"), subgroup="conf_phase")
def _p01(P, c):
    amp = _conf_amp(P, c)
    return _whittaker_solution(
        amp, min(c.c2, c.c3), 1 / 120, lambda t, r: (1 + t * t) / (r * r),
        lambda t, r: c.c1 - c.kappa * arctan_inv(t) - r * r * t / (4 * (1 + t * t)),
        lambda t, r: t > 0 or c.kappa == 0)


# inversion-boosted families (p = 4/n) ---------------------------------------------

INV = "additional solutions at the pseudo-conformal power"


def _pc(P):
    _need(P.is_pseudo_conformal, "requires p = 4/n")


@_family("I01", INV, "(n(n-4)/(4k))^(n/4) r^(-n/2) e^(i c1 - i c2 r^2/(4(1 + c2 t))); p=4/n",
         ("c2",), 0, "monopole", subgroup=None)
def _i01(P, c):
    _pc(P)
    n, k = P.n, P.k
    _need(n != 4, "requires n != 4")
    _need(k / (n * (n - 4)) > 0, "requires k/(n(n-4)) > 0")
    a = (n * (n - 4) / (4 * k)) ** (n / 4)

    def ev(t, r):
        return a * r ** (-n / 2) * cmath.exp(1j * (c.c1 - c.c2 * r * r / (4 * (1 + c.c2 * t))))

    return ev, lambda t, r: 1 + c.c2 * t > 0


@_family("I02", INV, "(-n^3/(2k(2n+4)))^(n/4) r^(-n/2) (1 + c2 (r/(1 + c3 t))^(2-4/p))^(-2/p) "
         "e^(i c1 - i c3 r^2/(4(1 + c3 t))); n^2 - n + 4 = 0", ("c2", "c3"), 0, "monopole",
         subgroup=None, vacuous_over_reals=True)
def _i02(P, c):
    _pc(P)
    n = P.n
    _need(n * n - n + 4 == 0, "requires n^2 - n + 4 = 0, which has no real root")
    raise ConstraintError("unreachable")  # pragma: no cover


def _boost(c4: float, t: float) -> float:
    return 1 + c4 * t


@_family("I03", INV, "(k r^2/8 + c3 r^6 (1 + c4 t)^-4 + c2 (1 + c4 t)^2) "
         "e^(i c1 - i c4 r^2/(4(1 + c4 t))); p=-1, n=-4", ("c2", "c3", "c4"), subgroup=None,
         note="phase corrected to c4 r^2/(4(1+c4 t))")
def _i03(P, c):
    _p_is(P, -1, "p = -1")
    _n_is(P, -4, "n = -4")

    def amp(t, r):
        g = _boost(c.c4, t)
        return P.k * r * r / 8 + c.c3 * r ** 6 / g ** 4 + c.c2 * g * g

    def ev(t, r):
        g = _boost(c.c4, t)
        return amp(t, r) * cmath.exp(1j * (c.c1 - c.c4 * r * r / (4 * g)))

    return ev, lambda t, r: _boost(c.c4, t) > 0 and amp(t, r) > 0


def _boosted_bessel(P, c, kinds):
    _p_is(P, -1, "p = -1")
    _n_is(P, -4, "n = -4")
    k, nu = P.k, c.nu
    q = math.sqrt(abs(nu))

    def amp(t, r):
        g = _boost(c.c4, t)
        x = q * r / g
        b = c.c2 * bessel(kinds[0], 3, x)
        if c.c3 != 0:
            b += c.c3 * bessel(kinds[1], 3, x)
        return r ** 3 / g * b - (k / nu) * g * g

    def ev(t, r):
        g = _boost(c.c4, t)
        return amp(t, r) * cmath.exp(1j * (c.c1 + nu * t / g - c.c4 * r * r / (4 * g)))

    return ev, lambda t, r: _boost(c.c4, t) > 0 and amp(t, r) > 0


@_family("I04", INV, "(r^3 (1 + c4 t)^-1 (c2 J_3(nu^(1/2) r/(1 + c4 t)) + c3 Y_3(nu^(1/2) r/(1 + c4 t)))"
         " - (k/nu)(1 + c4 t)^2) e^(i c1 + i nu t/(1 + c4 t) - i c4 r^2/(4(1 + c4 t))); p=-1, n=-4",
         ("c2", "c3", "c4", "nu"), subgroup=None)
def _i04(P, c):
    _need(c.nu > 0, "requires nu > 0")
    return _boosted_bessel(P, c, (BesselKind.J, BesselKind.Y))


@_family("I05", INV, "(r^3 (1 + c4 t)^-1 (c2 I_3((-nu)^(1/2) r/(1 + c4 t)) + c3 K_3((-nu)^(1/2) r/(1 + c4 t)))"
         " - (k/nu)(1 + c4 t)^2) e^(i c1 + i nu t/(1 + c4 t) - i c4 r^2/(4(1 + c4 t))); p=-1, n=-4",
         ("c2", "c3", "c4", "nu"), 0, "dark_soliton", subgroup=None)
def _i05(P, c):
    _need(c.nu < 0, "requires nu < 0")
    return _boosted_bessel(P, c, (BesselKind.I, BesselKind.K))


@_family("I06", INV, "(i k/3) r^2 (M[-i mu/2,-3/2](z) int_c2^xi M[-i mu/2,3/2](i/(4x)) dx"
         " - M[-i mu/2,3/2](z) int_c3^xi M[-i mu/2,-3/2](i/(4x)) dx)"
         " e^(i c1 - i mu/2 ln(c4 + 1/t) - i r^2 (1 + 2 c4 t)/(8 t (1 + c4 t))),"
         " xi = t(1 + c4 t)/r^2, z = i/(4 xi); p=-1, n=-4", ("c2", "c3", "c4", "mu"),
         subgroup=None)
def _i06(P, c):
    amp = _scal_amp(P, c)
    c4 = c.c4
    return _whittaker_solution(
        amp, min(c.c2, c.c3), 1 / 240, lambda t, r: t * (1 + c4 * t) / (r * r),
        lambda t, r: (c.c1 - 0.5 * c.mu * math.log(c4 + 1 / t)
                      - r * r * (1 + 2 * c4 * t) / (8 * t * (1 + c4 * t))),
        lambda t, r: t > 0 and 1 + c4 * t > 0)


@_family("I07", INV, "(k/6) r^2 (M[kappa/2,3/2](z) int_c2^xi M[kappa/2,-3/2](1/(2x)) dx"
         " - M[kappa/2,-3/2](z) int_c3^xi M[kappa/2,3/2](1/(2x)) dx)"
         " e^(i c1 - i kappa arctan(c4 + 1/t) - i r^2 (c4 + t + c4^2 t)/(t^2 + (1 + c4 t)^2)/4),"
         " xi = (t^2 + (1 + c4 t)^2)/r^2, z = 1/(2 xi); p=-1, n=-4", ("c2", "c3", "c4", "kappa"),
         subgroup=None)
def _i07(P, c):
    amp = _conf_amp(P, c)
    c4 = c.c4

    def den(t):
        return t * t + (1 + c4 * t) ** 2

    def phase(t, r):
        at = math.pi / 2 if t == 0 else math.atan(c4 + 1 / t)
        return c.c1 - c.kappa * at - r * r * (c4 + t + c4 * c4 * t) / (4 * den(t))

    return _whittaker_solution(
        amp, min(c.c2, c.c3), 1 / 120, lambda t, r: den(t) / (r * r), phase,
        lambda t, r: t > 0 or c.kappa == 0)


# public API -----------------------------------------------------------------------

def list_families(filter: Callable[[FamilyDescriptor], bool] | None = None) -> list:
    fams = list(_REGISTRY.values())
    return [f for f in fams if filter is None or filter(f)]


def get_family(fid: str) -> FamilyDescriptor:
    try:
        return _REGISTRY[fid]
    except KeyError:
        raise ConstraintError(f"unknown family {fid!r}", kind="unknown_family")


def instantiate(fd: FamilyDescriptor | str, params: Parameters, fc: FamilyConstants) -> Solution:
    if isinstance(fd, str):
        fd = get_family(fd)
    ev, dom = fd.build(params, fc)
    return Solution(ev, dom, fd.id, {"family": fd.id, "params": params, "constants": fc})


def domain_sample(fd, params: Parameters, fc: FamilyConstants, grid: Grid) -> list:
    s = instantiate(fd, params, fc)
    pts = [pt for pt in grid if s.contains(pt.t, pt.r)]
    if not pts:
        raise EmptyDomain(f"{s.label}: no grid point inside the domain")
    return pts


def transcription_checksums() -> dict:
    return {f.id: f.checksum() for f in list_families()}


# witness fixtures -----------------------------------------------------------------

@dataclass(frozen=True)
class Witness:
    family: str
    params: Parameters
    constants: FamilyConstants
    grid: Grid
    tolerance: float

    def solution(self) -> Solution:
        return instantiate(self.family, self.params, self.constants)

    def points(self) -> list:
        return domain_sample(get_family(self.family), self.params, self.constants, self.grid)


def parse_witness_line(line: str) -> Witness | None:
    """`family n p k key=value ... tolerance`; `sign=+1,-1` and `grid=t0,t1,nt,r0,r1,nr`."""
    from .core import validate_params
    line = line.split("#", 1)[0].strip()
    if not line:
        return None
    tok = line.split()
    if len(tok) < 5:
        raise ConstraintError(f"malformed witness line: {line!r}", kind="config")
    fid, n, p, k = tok[0], *(parse_real(x) for x in tok[1:4])
    tol = float(tok[-1])
    consts: dict = {}
    signs: list = []
    grid = Grid(0.0, 1.0, 4, 0.5, 2.0, 8)
    for item in tok[4:-1]:
        key, _, val = item.partition("=")
        if key == "sign":
            signs = [int(s) for s in val.split(",")]
        elif key == "grid":
            grid = Grid.parse(val)
        else:
            consts[key] = parse_real(val)
    return Witness(fid, validate_params(n, p, k), FamilyConstants.from_mapping(consts, signs),
                   grid, tol)


def load_witnesses(path=None) -> list:
    if path is None:
        text = resources.files("radial_nls").joinpath("data/witnesses.txt").read_text()
    else:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    out = []
    for line in text.splitlines():
        w = parse_witness_line(line)
        if w is not None:
            out.append(w)
    return out
