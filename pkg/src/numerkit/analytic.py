"""Closed-form prices for the shipped product family.

Every formula here is the one-dimensional Black-Scholes-type expression the
corresponding two-factor problem collapses to once prices are quoted in the
natural numeraire (the employer stock at the reset date, the foreign bank
account, the zero-coupon bond, the diluted firm value).  The finite-difference
and Monte Carlo engines exist to verify these against the full dynamics.
"""

from __future__ import annotations

import math

from . import ratecurve
from .errors import TimeDomainError
from .model import Convertible, Corporate, Esop, FxStrike, Savings

_EPS_VOL = 1e-12


def norm_cdf(x: float) -> float:
    """Standard normal CDF via erfc, symmetric under x -> -x to rounding."""
    if x >= 0.0:
        return 1.0 - 0.5 * math.erfc(x / math.sqrt(2.0))
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


def bs_call(spot: float, strike: float, rate: float, carry: float,
            vol: float, tau: float) -> float:
    """European call, cost-of-carry form.

    Forward = spot * exp(carry * tau), discounting at ``rate``.  Handles the
    strike = 0 and vol * sqrt(tau) = 0 limits explicitly.
    """
    if spot <= 0.0:
        raise ValueError("spot must be positive")
    if strike < 0.0:
        raise ValueError("strike must be non-negative")
    if vol < 0.0 or tau < 0.0:
        raise ValueError("vol and tau must be non-negative")
    growth = math.exp((carry - rate) * tau)
    if strike == 0.0:
        return spot * growth
    disc = math.exp(-rate * tau)
    sv = vol * math.sqrt(tau)
    if sv < _EPS_VOL:
        return max(spot * growth - strike * disc, 0.0)
    d1 = (math.log(spot / strike) + (carry + 0.5 * vol * vol) * tau) / sv
    d2 = d1 - sv
    return spot * growth * norm_cdf(d1) - strike * disc * norm_cdf(d2)


# ---------------------------------------------------------------------------
# employee stock option plan with strike reset


def esop_price(spec: Esop, t: float = 0.0) -> float:
    """Plan value before the reset date (0 <= t <= t_reset).

    Before the reset the plan is worth a fixed fraction of the stock plus a
    calendar-spread option struck at the reset-date price; the spot drops out
    of the moneyness, so the price is proportional to the current stock.
    """
    if not 0.0 <= t <= spec.t_reset:
        raise TimeDomainError(
            f"t={t} outside the pre-reset window [0, {spec.t_reset}]")
    gap = spec.maturity - spec.t_reset
    s = spec.sigma * math.sqrt(gap)
    if s < _EPS_VOL:
        intrinsic = max(-math.expm1(-spec.rate * gap), 0.0)
        return spec.spot * (1.0 - spec.beta + spec.beta * intrinsic)
    d1 = spec.rate / spec.sigma * math.sqrt(gap) + 0.5 * s
    d2 = d1 - s
    factor = (1.0 - spec.beta + spec.beta * norm_cdf(d1)
              - spec.beta * math.exp(-spec.rate * gap) * norm_cdf(d2))
    return spec.spot * factor


def esop_price_after_reset(spec: Esop, s_reset: float, s: float, t: float) -> float:
    """Plan value after the strike has been fixed at the reset-date stock price."""
    if not spec.t_reset <= t <= spec.maturity:
        raise TimeDomainError(
            f"t={t} outside the post-reset window [{spec.t_reset}, {spec.maturity}]")
    if s_reset <= 0.0 or s <= 0.0:
        raise ValueError("stock prices must be positive")
    tau = spec.maturity - t
    call = bs_call(s, s_reset, spec.rate, spec.rate, spec.sigma, tau)
    return (1.0 - spec.beta) * s + spec.beta * call


def esop_price_generalized(spec: Esop, s: float, s0: float, t: float) -> float:
    """Pre-reset value off the diagonal s != s0 of the two-price problem.

    ``s0`` is the coordinate that becomes the reset price; on the diagonal
    s0 = s this agrees with ``esop_price``.
    """
    if not 0.0 <= t <= spec.t_reset:
        raise TimeDomainError(
            f"t={t} outside the pre-reset window [0, {spec.t_reset}]")
    if s <= 0.0 or s0 <= 0.0:
        raise ValueError("stock prices must be positive")
    gap = spec.maturity - spec.t_reset
    strike = s0 * math.exp(-spec.rate * gap)
    sv = spec.sigma * math.sqrt(gap)
    if sv < _EPS_VOL:
        return (1.0 - spec.beta) * s + spec.beta * max(s - strike, 0.0)
    d1 = (math.log(s / strike) + 0.5 * sv * sv) / sv
    d2 = d1 - sv
    return (1.0 - spec.beta) * s + spec.beta * (
        s * norm_cdf(d1) - strike * norm_cdf(d2))


# ---------------------------------------------------------------------------
# equity option with a currency-translated strike


def fx_option_usd(spec: FxStrike, s: float, x: float, t: float = 0.0) -> float:
    """Dollar value of the call on the dollar-translated stock, strike S0*X0.

    ``s`` is the stock in pounds, ``x`` the dollar price of one pound.
    """
    if not 0.0 <= t <= spec.maturity:
        raise TimeDomainError(f"t={t} outside [0, {spec.maturity}]")
    if s <= 0.0 or x <= 0.0:
        raise ValueError("stock and exchange rate must be positive")
    tau = spec.maturity - t
    strike = spec.spot * spec.fx
    var_rate = (spec.sigma_s ** 2 + 2.0 * spec.rho * spec.sigma_s * spec.sigma_x
                + spec.sigma_x ** 2)
    sv = math.sqrt(var_rate * tau)
    disc = math.exp(-spec.r_d * tau)
    if sv < _EPS_VOL:
        return max(s * x - strike * disc, 0.0)
    d1 = (math.log(s * x / strike) + (spec.r_d + 0.5 * var_rate) * tau) / sv
    d2 = d1 - sv
    return s * x * norm_cdf(d1) - strike * disc * norm_cdf(d2)


def fx_option_gbp(spec: FxStrike, s: float, y: float, t: float = 0.0) -> float:
    """Pound value of the same claim; ``y`` is the pound price of one dollar.

    Satisfies x * fx_option_gbp(s, 1/x) = fx_option_usd(s, x) identically.
    """
    if not 0.0 <= t <= spec.maturity:
        raise TimeDomainError(f"t={t} outside [0, {spec.maturity}]")
    if s <= 0.0 or y <= 0.0:
        raise ValueError("stock and exchange rate must be positive")
    tau = spec.maturity - t
    strike = spec.spot * spec.fx
    var_rate = (spec.sigma_s ** 2 + 2.0 * spec.rho * spec.sigma_s * spec.sigma_x
                + spec.sigma_x ** 2)
    sv = math.sqrt(var_rate * tau)
    disc = math.exp(-spec.r_d * tau)
    if sv < _EPS_VOL:
        return max(s - strike * y * disc, 0.0)
    d1 = (math.log(s / (y * strike)) + (spec.r_d + 0.5 * var_rate) * tau) / sv
    d2 = d1 - sv
    return s * norm_cdf(d1) - strike * y * disc * norm_cdf(d2)


# ---------------------------------------------------------------------------
# currency-protected savings plan


def savings_domestic(spec: Savings, x: float, i: float, t: float = 0.0) -> float:
    """Dollar value of the guarantee; ``x`` dollars per unit foreign, ``i`` the
    domestic price level.

    Terminal claim: the better of the domestically compounded deposit and the
    foreign-compounded deposit translated at maturity.
    """
    if not 0.0 <= t <= spec.maturity:
        raise TimeDomainError(f"t={t} outside [0, {spec.maturity}]")
    if x <= 0.0 or i <= 0.0:
        raise ValueError("exchange rate and price level must be positive")
    y0 = spec.fx
    lead_i = i * math.exp(spec.r_d * t)
    lead_x = x * y0 * math.exp(spec.r_f * t)
    var_rate = (spec.sigma_x ** 2 + 2.0 * spec.rho * spec.sigma_x * spec.sigma_i
                + spec.sigma_i ** 2)
    sv = math.sqrt(var_rate * (spec.maturity - t))
    if sv < _EPS_VOL:
        return max(lead_i, lead_x)
    d1 = (math.log(lead_i / lead_x) + 0.5 * sv * sv) / sv
    d2 = d1 - sv
    return lead_i * norm_cdf(d1) + lead_x * norm_cdf(-d2)


def savings_foreign(spec: Savings, y: float, i: float, t: float = 0.0) -> float:
    """Foreign-currency value of the same guarantee; ``y`` = 1/x.

    Satisfies savings_foreign(y, i) = y * savings_domestic(1/y, i) identically.
    """
    if y <= 0.0:
        raise ValueError("exchange rate must be positive")
    return y * savings_domestic(spec, 1.0 / y, i, t)


# ---------------------------------------------------------------------------
# convertible bonds under stochastic interest rates


def convertible_price(spec: Convertible, s: float, r_short: float,
                      t: float = 0.0) -> float:
    """Bond convertible into one share at ``conv_date``; mean-reverting rates.

    The holder receives max(stock, bond) at the conversion date, so the value
    is the bond plus an exchange option, priced with the variance of the
    stock/bond ratio integrated over the remaining life.
    """
    if not 0.0 <= t <= spec.conv_date:
        raise TimeDomainError(
            f"t={t} outside the pre-conversion window [0, {spec.conv_date}]")
    if s <= 0.0:
        raise ValueError("stock price must be positive")
    p = ratecurve.bond_price(spec.vasicek, r_short, t, spec.bond_maturity)
    var = ratecurve.integrated_variance(
        spec.vasicek, spec.sigma_s, spec.rho, t, spec.conv_date, spec.bond_maturity)
    sv = math.sqrt(max(var, 0.0))
    if sv < _EPS_VOL:
        return p + max(s - p, 0.0)
    d1 = (math.log(s / p) + 0.5 * sv * sv) / sv
    d2 = d1 - sv
    return p + s * norm_cdf(d1) - p * norm_cdf(d2)


def corporate_convertible_price(spec: Corporate, v: float, r_short: float,
                                t: float = 0.0) -> float:
    """Convertible corporate debt on the whole firm value ``v``.

    Each of the n bonds converts into ``conv_rate`` new shares at maturity;
    bondholders take the better of the face amount and the diluted share of
    the firm.  ``spec.dilution`` is conv_rate / (shares + bonds * conv_rate).
    """
    if not 0.0 <= t <= spec.maturity:
        raise TimeDomainError(f"t={t} outside [0, {spec.maturity}]")
    if v <= 0.0:
        raise ValueError("firm value must be positive")
    c = spec.dilution
    if spec.face == 0.0:
        return c * v
    p = ratecurve.bond_price(spec.vasicek, r_short, t, spec.maturity)
    var = ratecurve.integrated_variance(
        spec.vasicek, spec.sigma_v, spec.rho, t, spec.maturity, spec.maturity)
    sv = math.sqrt(max(var, 0.0))
    strike = spec.face * p
    if sv < _EPS_VOL:
        return strike + max(c * v - strike, 0.0)
    d1 = (math.log(c * v / strike) + 0.5 * sv * sv) / sv
    d2 = d1 - sv
    return strike + c * v * norm_cdf(d1) - strike * norm_cdf(d2)
