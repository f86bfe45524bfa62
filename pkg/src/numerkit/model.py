"""Problem statement types: asset dynamics, covariance, payoffs, product specs.

Everything downstream (reduction, closed forms, PDE and Monte Carlo engines)
consumes the types defined here.  Product specs are plain frozen dataclasses
with a canonical JSON form: a "type" discriminator plus flat numeric fields,
the Vasicek block nested under "vasicek".
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .errors import DimensionError
from .ratecurve import VasicekModel

SYMMETRY_RTOL = 1e-12
PSD_EIG_FLOOR = 1e-10  # scaled by trace


@dataclass(frozen=True)
class AssetDynamics:
    """One lognormal asset: spot and its loadings on the common drivers."""

    spot: float
    loadings: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "loadings", tuple(float(v) for v in self.loadings))
        if not (self.spot > 0.0) or not math.isfinite(self.spot):
            raise ValueError("asset spot must be positive and finite")
        if len(self.loadings) < 1:
            raise DimensionError("asset needs at least one driver loading")
        if not all(math.isfinite(v) for v in self.loadings):
            raise ValueError("asset loadings must be finite")


class CovarianceMatrix:
    """Symmetric positive semidefinite covariance of log-returns (per year).

    Validation happens here once so downstream code can assume a clean matrix:
    symmetry within 1e-12 relative, smallest eigenvalue >= -1e-10 * trace.
    """

    def __init__(self, values):
        a = np.asarray(values, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise DimensionError(f"covariance must be square, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise ValueError("covariance entries must be finite")
        scale = max(1.0, float(np.max(np.abs(a))))
        if np.max(np.abs(a - a.T)) > SYMMETRY_RTOL * scale:
            raise ValueError("covariance must be symmetric to 1e-12 relative")
        a = 0.5 * (a + a.T)
        eig_min = float(np.linalg.eigvalsh(a)[0])
        if eig_min < -PSD_EIG_FLOOR * max(float(np.trace(a)), 0.0) - 0.0:
            raise ValueError(f"covariance is not positive semidefinite (min eig {eig_min:g})")
        a.flags.writeable = False
        self._a = a

    @property
    def dim(self) -> int:
        return self._a.shape[0]

    def as_array(self) -> np.ndarray:
        return self._a

    def __getitem__(self, idx):
        return self._a[idx]

    def __repr__(self):
        return f"CovarianceMatrix({self._a.tolist()!r})"


@dataclass(frozen=True)
class HomogeneousPayoff:
    """Terminal payoff P(S0, ..., Sn) expected to be homogeneous of degree one.

    ``evaluate`` maps a length-(n+1) vector of asset prices to a real payoff.
    Homogeneity is certified separately by numeraire.check_homogeneity.
    """

    evaluate: Callable[[np.ndarray], float]
    name: str = ""

    def __call__(self, prices) -> float:
        return float(self.evaluate(np.asarray(prices, dtype=float)))


@dataclass(frozen=True)
class MultiAssetProblem:
    """A terminal-payoff pricing problem on n+1 jointly lognormal assets."""

    assets: tuple[AssetDynamics, ...]
    covariance: CovarianceMatrix
    payoff: HomogeneousPayoff
    maturity: float
    short_rate: Callable[[float], float] = lambda t: 0.0

    def __post_init__(self):
        object.__setattr__(self, "assets", tuple(self.assets))
        if len(self.assets) < 2:
            raise DimensionError("need at least two assets (numeraire plus one)")
        if self.covariance.dim != len(self.assets):
            raise DimensionError("covariance dimension must match the asset count")
        if not (self.maturity > 0.0):
            raise ValueError("maturity must be positive")

    @property
    def spots(self) -> np.ndarray:
        return np.array([a.spot for a in self.assets])


def covariance_from_loadings(assets: Sequence[AssetDynamics]) -> CovarianceMatrix:
    """Assemble the covariance a_ij = sum_k L_ik L_jk from asset loadings."""
    if not assets:
        raise DimensionError("no assets given")
    width = len(assets[0].loadings)
    if any(len(a.loadings) != width for a in assets):
        raise DimensionError("asset loading rows must all have the same length")
    L = np.array([a.loadings for a in assets], dtype=float)
    return CovarianceMatrix(L @ L.T)


# ---------------------------------------------------------------------------
# Product specs


@dataclass(frozen=True)
class Esop:
    """Employee stock option plan with one strike reset at t_reset."""

    beta: float
    t_reset: float
    maturity: float
    sigma: float
    rate: float
    spot: float


@dataclass(frozen=True)
class FxStrike:
    """Call on a foreign stock struck in domestic currency at S(0)X(0)."""

    sigma_s: float
    sigma_x: float
    rho: float
    r_d: float
    r_p: float
    spot: float
    fx: float
    maturity: float


@dataclass(frozen=True)
class Savings:
    """Deposit paying the better of a domestic indexed leg and a foreign leg."""

    sigma_x: float
    sigma_i: float
    rho: float
    r_d: float
    r_f: float
    fx: float          # Y(0), foreign units per domestic unit
    price_level: float  # I(0)
    maturity: float


@dataclass(frozen=True)
class Convertible:
    """Bond convertible into one share at conv_date, bond matures later."""

    sigma_s: float
    rho: float
    conv_date: float
    bond_maturity: float
    spot: float
    vasicek: VasicekModel


@dataclass(frozen=True)
class Corporate:
    """Convertible corporate debt: n bonds convertible into alpha shares each."""

    shares: int
    bonds: int
    conv_rate: float
    face: float
    sigma_v: float
    rho: float
    maturity: float
    firm_value: float
    vasicek: VasicekModel

    @property
    def dilution(self) -> float:
        """Post-conversion ownership fraction alpha/(m + n*alpha) per bond."""
        return self.conv_rate / (self.shares + self.bonds * self.conv_rate)


ProductSpec = Union[Esop, FxStrike, Savings, Convertible, Corporate]

_TYPE_TAGS = {
    Esop: "esop",
    FxStrike: "fx_strike",
    Savings: "savings",
    Convertible: "convertible",
    Corporate: "corporate",
}
_TAG_TYPES = {v: k for k, v in _TYPE_TAGS.items()}


@dataclass(frozen=True)
class PriceQuote:
    """One price from one method; std_error only for Monte Carlo quotes."""

    value: float
    method: str
    std_error: Optional[float] = None
    seed: Optional[int] = None


# ---------------------------------------------------------------------------
# Validation


def _finite(name, value, out):
    if not math.isfinite(value):
        out.append(f"{name} must be finite")
        return False
    return True


def _positive(name, value, out):
    if _finite(name, value, out) and not value > 0.0:
        out.append(f"{name} must be positive")


def _open_rho(name, value, out):
    if _finite(name, value, out) and not (-1.0 < value < 1.0):
        out.append(f"{name} must lie in the open interval (-1, 1)")


def _vasicek_violations(v: VasicekModel, out):
    _positive("vasicek.theta", v.theta, out)
    _finite("vasicek.mu_r", v.mu_r, out)
    if _finite("vasicek.sigma_r", v.sigma_r, out) and v.sigma_r < 0.0:
        out.append("vasicek.sigma_r must be nonnegative")
    _finite("vasicek.lambda", v.lam, out)
    _finite("vasicek.r0", v.r0, out)


def validate(spec: ProductSpec) -> list[str]:
    """Return all constraint violations for a product spec (empty if valid)."""
    out: list[str] = []
    if isinstance(spec, Esop):
        if _finite("beta", spec.beta, out) and not (0.0 <= spec.beta <= 1.0):
            out.append("beta must lie in [0, 1]")
        _positive("t_reset", spec.t_reset, out)
        _positive("maturity", spec.maturity, out)
        if spec.t_reset >= spec.maturity:
            out.append("t_reset must precede maturity")
        _positive("sigma", spec.sigma, out)
        _finite("rate", spec.rate, out)
        _positive("spot", spec.spot, out)
    elif isinstance(spec, FxStrike):
        _positive("sigma_s", spec.sigma_s, out)
        _positive("sigma_x", spec.sigma_x, out)
        _open_rho("rho", spec.rho, out)
        _finite("r_d", spec.r_d, out)
        _finite("r_p", spec.r_p, out)
        _positive("spot", spec.spot, out)
        _positive("fx", spec.fx, out)
        _positive("maturity", spec.maturity, out)
    elif isinstance(spec, Savings):
        _positive("sigma_x", spec.sigma_x, out)
        _positive("sigma_i", spec.sigma_i, out)
        _open_rho("rho", spec.rho, out)
        _finite("r_d", spec.r_d, out)
        _finite("r_f", spec.r_f, out)
        _positive("fx", spec.fx, out)
        _positive("price_level", spec.price_level, out)
        _positive("maturity", spec.maturity, out)
    elif isinstance(spec, Convertible):
        _positive("sigma_s", spec.sigma_s, out)
        _open_rho("rho", spec.rho, out)
        _positive("conv_date", spec.conv_date, out)
        _positive("bond_maturity", spec.bond_maturity, out)
        if spec.conv_date >= spec.bond_maturity:
            out.append("conv_date must precede bond_maturity")
        _positive("spot", spec.spot, out)
        _vasicek_violations(spec.vasicek, out)
    elif isinstance(spec, Corporate):
        if spec.shares != int(spec.shares) or spec.shares < 1:
            out.append("shares must be a positive integer")
        if spec.bonds != int(spec.bonds) or spec.bonds < 0:
            out.append("bonds must be a nonnegative integer")
        _positive("conv_rate", spec.conv_rate, out)
        if _finite("face", spec.face, out) and spec.face < 0.0:
            out.append("face must be nonnegative")
        _positive("sigma_v", spec.sigma_v, out)
        _open_rho("rho", spec.rho, out)
        _positive("maturity", spec.maturity, out)
        _positive("firm_value", spec.firm_value, out)
        _vasicek_violations(spec.vasicek, out)
    else:
        raise TypeError(f"not a product spec: {type(spec).__name__}")
    return out


# ---------------------------------------------------------------------------
# JSON encode / decode


def product_to_dict(spec: ProductSpec) -> dict:
    """Canonical dict form: type tag first, fields in declaration order."""
    tag = _TYPE_TAGS.get(type(spec))
    if tag is None:
        raise TypeError(f"not a product spec: {type(spec).__name__}")
    out = {"type": tag}
    for f in fields(spec):
        v = getattr(spec, f.name)
        if isinstance(v, VasicekModel):
            out[f.name] = {
                "theta": v.theta,
                "mu_r": v.mu_r,
                "sigma_r": v.sigma_r,
                "lambda": v.lam,
                "r0": v.r0,
            }
        else:
            out[f.name] = v
    return out


def product_from_dict(data: dict) -> ProductSpec:
    """Inverse of product_to_dict; raises KeyError/TypeError on bad shapes."""
    d = dict(data)
    tag = d.pop("type", None)
    cls = _TAG_TYPES.get(tag)
    if cls is None:
        raise ValueError(f"unknown product type: {tag!r}")
    if "vasicek" in d:
        vd = dict(d["vasicek"])
        d["vasicek"] = VasicekModel(
            theta=float(vd["theta"]),
            mu_r=float(vd["mu_r"]),
            sigma_r=float(vd["sigma_r"]),
            lam=float(vd.get("lambda", 0.0)),
            r0=float(vd["r0"]),
        )
    kwargs = {}
    for f in fields(cls):
        if f.name not in d:
            raise ValueError(f"missing field {f.name!r} for product {tag!r}")
        v = d.pop(f.name)
        if f.name in ("shares", "bonds"):
            kwargs[f.name] = int(v)
        elif f.name == "vasicek":
            kwargs[f.name] = v
        else:
            kwargs[f.name] = float(v)
    if d:
        raise ValueError(f"unexpected fields for product {tag!r}: {sorted(d)}")
    return cls(**kwargs)


def quote_to_dict(quote: PriceQuote) -> dict:
    out = {"value": quote.value, "method": quote.method}
    if quote.std_error is not None:
        out["std_error"] = quote.std_error
    if quote.seed is not None:
        out["seed"] = quote.seed
    return out
