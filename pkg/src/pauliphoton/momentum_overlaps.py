"""Momentum profiles f(x - center) and the overlap integrals L and M.

For two profiles ``f1`` (center k) and ``f2`` (center k') the direct and
exchange overlaps are

    L = (int |f1|^2) (int |f2|^2)
    M = |int conj(f1) f2|^2

Closed forms exist for the lorentzian and gaussian families; everything
else (and any explicit ``method="quad"`` request) goes through adaptive
QUADPACK quadrature on the infinite line.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np
from scipy import integrate
from scipy.interpolate import CubicSpline

__all__ = [
    "FAMILIES",
    "MomentumProfile",
    "OverlapQuad",
    "QuadratureError",
    "ProfileRangeError",
    "profile_eval",
    "self_overlap",
    "cross_overlap",
    "compute_L",
    "compute_M",
    "closed_form_L",
    "closed_form_M",
    "overlap_quad",
    "parse_profile",
    "load_table",
]

FAMILIES = ("lorentzian", "gaussian", "tabulated")

EPSABS = 1e-10
EPSREL = 1e-8
QUAD_LIMIT = 400


class QuadratureError(ArithmeticError):
    """Adaptive quadrature did not reach the requested tolerance."""

    def __init__(self, message, estimate=None):
        super().__init__(message)
        self.estimate = estimate


class ProfileRangeError(ValueError):
    """A tabulated profile was evaluated outside its sampled range."""


@dataclass(frozen=True)
class MomentumProfile:
    """Unit-mass momentum distribution centered at ``center``.

    ``width`` is the lorentzian half width (delta) or the gaussian standard
    deviation. Tabulated profiles store samples of f(u) at offsets
    u = x - center in ``table`` (shape (n, 2)); their ``width`` is unused.
    """

    family: str
    width: float = 1.0
    center: float = 0.0
    table: Optional[np.ndarray] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown profile family {self.family!r}")
        if not (self.width > 0 and math.isfinite(self.width)):
            raise ValueError(f"profile width must be > 0, got {self.width}")
        if self.family == "tabulated":
            if self.table is None:
                raise ValueError("tabulated profile needs a table")
            tab = np.asarray(self.table, dtype=float)
            if tab.ndim != 2 or tab.shape[1] != 2 or tab.shape[0] < 4:
                raise ValueError("table must have shape (n >= 4, 2)")
            if np.any(np.diff(tab[:, 0]) <= 0):
                raise ValueError("table abscissae must be strictly increasing")
            object.__setattr__(self, "table", tab)
            object.__setattr__(self, "_spline", CubicSpline(tab[:, 0], tab[:, 1]))

    @classmethod
    def lorentzian(cls, delta, center=0.0):
        return cls("lorentzian", float(delta), float(center))

    @classmethod
    def gaussian(cls, sigma, center=0.0):
        return cls("gaussian", float(sigma), float(center))

    @classmethod
    def tabulated(cls, table, center=0.0):
        return cls("tabulated", 1.0, float(center), np.asarray(table, dtype=float))

    def shifted(self, center):
        """Same shape, new center."""
        return MomentumProfile(self.family, self.width, float(center), self.table)

    def mirrored(self):
        """Profile centered at -center, as used for the hole of a pair."""
        if self.family == "tabulated":
            tab = self.table[::-1] * np.array([-1.0, 1.0])
            return MomentumProfile.tabulated(tab, -self.center)
        return self.shifted(-self.center)

    @property
    def support(self):
        """Interval outside which the profile is undefined (tabulated) or infinite."""
        if self.family == "tabulated":
            return (self.center + self.table[0, 0], self.center + self.table[-1, 0])
        return (-math.inf, math.inf)

    def __call__(self, x):
        return profile_eval(self, x)


def profile_eval(p, x):
    """Evaluate f(x - center) for scalar or array ``x``."""
    u = np.asarray(x, dtype=float) - p.center
    if p.family == "lorentzian":
        out = p.width / (math.pi * (u * u + p.width * p.width))
    elif p.family == "gaussian":
        out = np.exp(-0.5 * (u / p.width) ** 2) / (p.width * math.sqrt(2 * math.pi))
    else:
        lo, hi = p.table[0, 0], p.table[-1, 0]
        if np.any(u < lo) or np.any(u > hi):
            raise ProfileRangeError(
                f"x outside tabulated range [{lo + p.center}, {hi + p.center}]"
            )
        out = p._spline(u)
    if np.ndim(out) == 0:
        return float(out)
    return out


def _integrate(func, lo, hi, breakpoints):
    """Adaptive quadrature of a real integrand, split at ``breakpoints``."""
    pts = sorted({b for b in breakpoints if lo < b < hi})
    edges = [lo, *pts, hi]
    total, err = 0.0, 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        val, e = integrate.quad(func, a, b, epsabs=EPSABS, epsrel=EPSREL, limit=QUAD_LIMIT)
        total += val
        err += e
    if err > max(EPSABS, EPSREL * abs(total)) * 10:
        raise QuadratureError(
            f"quadrature error estimate {err:.3e} exceeds tolerance", estimate=err
        )
    return total


def _common_support(p1, p2):
    a1, b1 = p1.support
    a2, b2 = p2.support
    return max(a1, a2), min(b1, b2)


def self_overlap(p, method="auto"):
    """int |f|^2 over the real line."""
    if method == "auto" and p.family != "tabulated":
        return _closed_self(p)
    lo, hi = p.support
    return _integrate(lambda x: profile_eval(p, x) ** 2, lo, hi, [p.center])


def cross_overlap(p1, p2, method="auto"):
    """g = int f1(x) f2(x) dx (profiles are real)."""
    if method == "auto" and p1.family == p2.family and p1.family != "tabulated":
        return _closed_cross(p1, p2)
    lo, hi = _common_support(p1, p2)
    if lo >= hi:
        return 0.0
    return _integrate(
        lambda x: profile_eval(p1, x) * profile_eval(p2, x), lo, hi, [p1.center, p2.center]
    )


def _closed_self(p):
    if p.family == "lorentzian":
        return 1.0 / (2 * math.pi * p.width)
    if p.family == "gaussian":
        return 1.0 / (2 * p.width * math.sqrt(math.pi))
    raise ValueError("no closed form for tabulated profiles")


def _closed_cross(p1, p2):
    if p1.family != p2.family:
        raise ValueError("closed form needs a common family")
    d = p1.center - p2.center
    if p1.family == "lorentzian":
        # convolution of two lorentzians is a lorentzian of summed width
        w = p1.width + p2.width
        return w / (math.pi * (d * d + w * w))
    if p1.family == "gaussian":
        var = p1.width**2 + p2.width**2
        return math.exp(-0.5 * d * d / var) / math.sqrt(2 * math.pi * var)
    raise ValueError("no closed form for tabulated profiles")


def closed_form_L(p1, p2):
    return _closed_self(p1) * _closed_self(p2)


def closed_form_M(p1, p2):
    return _closed_cross(p1, p2) ** 2


def compute_L(p1, p2, method="auto"):
    """Direct overlap L = (int |f1|^2)(int |f2|^2).

    ``method`` is ``"auto"`` (closed form when the family has one) or
    ``"quad"`` (always integrate numerically).
    """
    _check_method(method)
    return self_overlap(p1, method) * self_overlap(p2, method)


def compute_M(p1, p2, method="auto"):
    """Exchange overlap M = |int f1 f2|^2; equals L when the centers coincide."""
    _check_method(method)
    return cross_overlap(p1, p2, method) ** 2


def _check_method(method):
    if method not in ("auto", "quad"):
        raise ValueError(f"method must be 'auto' or 'quad', got {method!r}")


@dataclass(frozen=True)
class OverlapQuad:
    """Direct/exchange overlaps for the electron pair (L, M) and hole pair."""

    L: float
    M: float
    Ltilde: float
    Mtilde: float

    def validate(self, tol=1e-12):
        for name in ("L", "M", "Ltilde", "Mtilde"):
            v = getattr(self, name)
            if not math.isfinite(v) or v < -tol:
                raise ValueError(f"{name} must be finite and >= 0, got {v}")
        if self.M > self.L * (1 + tol) + tol or self.Mtilde > self.Ltilde * (1 + tol) + tol:
            raise ValueError(f"overlaps violate M <= L: {self}")
        return self

    @property
    def ratios(self):
        return self.M / self.L, self.Mtilde / self.Ltilde


def overlap_quad(pk, pkp, hole_k=None, hole_kp=None, method="auto"):
    """Bundle L, M for the electrons and the holes.

    Hole profiles default to the electron profiles mirrored to -k and -k'.
    """
    hole_k = pk.mirrored() if hole_k is None else hole_k
    hole_kp = pkp.mirrored() if hole_kp is None else hole_kp
    L = compute_L(pk, pkp, method)
    M = compute_M(pk, pkp, method)
    Lt = compute_L(hole_k, hole_kp, method)
    Mt = compute_M(hole_k, hole_kp, method)
    return OverlapQuad(L, M, Lt, Mt)


def load_table(path):
    """Read a two-column (x, f) text table."""
    tab = np.loadtxt(Path(path), dtype=float, ndmin=2)
    if tab.shape[1] != 2:
        raise ValueError(f"{path}: expected two columns, got {tab.shape[1]}")
    return tab


def parse_profile(text, width=None, center=0.0):
    """Parse ``lorentzian:delta=2``, ``gaussian:sigma=1`` or ``table:path=f.txt``.

    A bare family name is accepted when ``width`` is given separately.
    """
    family, _, rest = text.strip().partition(":")
    params = {}
    for item in filter(None, rest.split(",")):
        key, eq, val = item.partition("=")
        if not eq:
            raise ValueError(f"bad profile parameter {item!r} in {text!r}")
        params[key.strip()] = val.strip()
    family = family.strip().lower()
    if family == "lorentzian":
        w = params.get("delta", width)
        if w is None:
            raise ValueError("lorentzian profile needs delta")
        return MomentumProfile.lorentzian(float(w), center)
    if family == "gaussian":
        w = params.get("sigma", width)
        if w is None:
            raise ValueError("gaussian profile needs sigma")
        return MomentumProfile.gaussian(float(w), center)
    if family in ("table", "tabulated"):
        if "path" not in params:
            raise ValueError("table profile needs path=<file>")
        return MomentumProfile.tabulated(load_table(params["path"]), center)
    raise ValueError(f"unknown profile family {family!r}")
