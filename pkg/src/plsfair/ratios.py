"""Closed-form c-fair ratio allocation for profit-and-loss sharing contracts.

A contract between d partners is c-fair when the rated expected payoffs
c_l * Pay_l agree across all partners. For every supported structure the
resulting profit-sharing ratio decomposes the same way:

    gamma_l = weight_l * (1 - rho) + kappa_l * rho

a labour reward proportional to the investment opportunity (1 - rho) plus a
funding reward proportional to the investment risk rho. The weights are the
normalized products of all ratings except the partner's own, so a smaller
rating buys a larger share of the expected investment profit.

All operations are pure functions; anything accepting a risk argument takes
either a :class:`~plsfair.contracts.RiskProfile` or a bare ``rho`` (which
fixes the ratios but leaves payoffs in units of the expected profit).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterator, Sequence, Union

from .contracts import (
    SIMPLEX_TOL,
    Allocation,
    CapitalShares,
    ContractError,
    ContractSpec,
    NonViableError,
    RatingVector,
    RiskProfile,
    Variant,
    WakalahTerms,
)

RiskLike = Union[RiskProfile, float]
Ratings = Union[RatingVector, Sequence[float]]
Capital = Union[CapitalShares, Sequence[float]]

# Beyond this many partners the rating products are computed in log space;
# below it, direct products keep the textbook examples bit-exact.
_DIRECT_PRODUCT_MAX = 16


@dataclass(frozen=True)
class WeightVector:
    """Normalized profit-sharing weights; positive and summing to 1."""

    values: tuple[float, ...]

    def __post_init__(self) -> None:
        values = tuple(float(v) for v in self.values)
        object.__setattr__(self, "values", values)
        for i, v in enumerate(values):
            if not math.isfinite(v) or v <= 0.0:
                raise ContractError(f"weight {i + 1} must be positive, got {v}")
        total = math.fsum(values)
        if abs(total - 1.0) > SIMPLEX_TOL:
            raise ContractError(f"weights must sum to 1, got {total!r}")

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self) -> Iterator[float]:
        return iter(self.values)

    def __getitem__(self, index: int) -> float:
        return self.values[index]


class DominanceRegime(str, Enum):
    ALWAYS_GE = "always_ge"
    ALWAYS_LE = "always_le"
    CROSSES_AT = "crosses_at"


@dataclass(frozen=True)
class DominanceReport:
    """How the ratio gap between two partners behaves as the risk varies."""

    pair: tuple[int, int]
    regime: DominanceRegime
    crossing_rho: float | None = None
    note: str | None = None


def _as_ratings(ratings: Ratings) -> RatingVector:
    if isinstance(ratings, RatingVector):
        return ratings
    return RatingVector(tuple(ratings))


def _as_capital(capital: Capital) -> CapitalShares:
    if isinstance(capital, CapitalShares):
        return capital
    return CapitalShares(tuple(capital))


def _as_profile(risk: RiskLike) -> RiskProfile:
    profile = risk if isinstance(risk, RiskProfile) else RiskProfile.from_rho(risk)
    if not profile.viable():
        raise NonViableError(
            f"investment risk {profile.rho} exceeds 1: expected loss beats expected profit"
        )
    return profile


def sharing_weights(ratings: Ratings) -> WeightVector:
    """Weights with which the partners split the expected investment profit.

    Weight l is the product of every rating except partner l's, normalized
    across partners. The map is homogeneous of degree 0 in the ratings and
    order-reversing: the smaller a partner's rating, the larger their
    weight.
    """
    c = _as_ratings(ratings).values
    d = len(c)
    if d <= _DIRECT_PRODUCT_MAX:
        prods = []
        for leave_out in range(d):
            p = 1.0
            for i, ci in enumerate(c):
                if i != leave_out:
                    p *= ci
            prods.append(p)
    else:
        logs = [math.log(ci) for ci in c]
        total = math.fsum(logs)
        shifted = [total - li for li in logs]
        peak = max(shifted)
        prods = [math.exp(s - peak) for s in shifted]
    norm = math.fsum(prods)
    return WeightVector(tuple(p / norm for p in prods))


def _rated_payoff_residual(
    c: Sequence[float],
    kappa: Sequence[float],
    gammas: Sequence[float],
    profile: RiskProfile,
) -> float:
    """Max spread of the rated payoffs c_l * Pay_l on re-substitution."""
    rated = [
        ci * (g * profile.e_profit - ki * profile.e_loss)
        for ci, ki, g in zip(c, kappa, gammas)
    ]
    return max(rated) - min(rated)


def fair_mudharabah(risk: RiskLike) -> tuple[float, float]:
    """Ratios equalizing the funder's and the worker's expected payoffs.

    Returns (gamma_funder, gamma_worker) = ((1 + rho)/2, (1 - rho)/2). At
    rho = 1 the whole profit share goes to the funder and the worker works
    for an expected payoff of zero.
    """
    rho = _as_profile(risk).rho
    return 0.5 * (1.0 + rho), 0.5 * (1.0 - rho)


def cfair_mudharabah(ratings: Ratings, risk: RiskLike) -> Allocation:
    """Two-party allocation where the funder brings all capital.

    The funder (partner 1) absorbs losses, so their ratio carries the full
    funding reward: gamma_1 = w_1 (1 - rho) + rho, gamma_2 = w_2 (1 - rho)
    with weights (w_1, w_2) = (c_2, c_1) / (c_1 + c_2). The partners split
    the expected investment profit as (w_1, w_2).
    """
    c = _as_ratings(ratings)
    if len(c) != 2:
        raise ContractError(f"mudharabah has exactly 2 partners, got {len(c)} ratings")
    profile = _as_profile(risk)
    rho = profile.rho
    w = sharing_weights(c)
    gammas = (w[0] * (1.0 - rho) + rho, w[1] * (1.0 - rho))
    payoffs = (w[0] * profile.delta, w[1] * profile.delta)
    residual = _rated_payoff_residual(c.values, (1.0, 0.0), gammas, profile)
    return Allocation(gammas=gammas, payoffs=payoffs, residual=residual)


def cfair_musharakah(ratings: Ratings, capital: Capital, risk: RiskLike) -> Allocation:
    """Self-managed d-partner allocation: everyone funds, everyone manages."""
    c = _as_ratings(ratings)
    kappa = _as_capital(capital)
    if len(kappa) != len(c):
        raise ContractError(
            f"need one capital share per partner: got {len(kappa)} shares for {len(c)} ratings"
        )
    profile = _as_profile(risk)
    rho = profile.rho
    w = sharing_weights(c)
    gammas = tuple(wi * (1.0 - rho) + ki * rho for wi, ki in zip(w, kappa))
    payoffs = tuple(wi * profile.delta for wi in w)
    residual = _rated_payoff_residual(c.values, kappa.values, gammas, profile)
    return Allocation(gammas=gammas, payoffs=payoffs, residual=residual)


def cfair_musharakah_external_mudharib(
    ratings: Ratings, capital: Capital, risk: RiskLike
) -> Allocation:
    """Allocation when the d-1 funders hire a manager paid by profit share.

    Equivalent to the self-managed contract with the manager's capital share
    pinned at zero: the manager (rated last) earns gamma_d = w_d (1 - rho)
    and shares the expected profit like everyone else.
    """
    c = _as_ratings(ratings)
    kappa = _as_capital(capital)
    if len(kappa) != len(c) - 1:
        raise ContractError(
            f"capital covers the {len(c) - 1} funding partners, got {len(kappa)} shares"
        )
    return cfair_musharakah(c, CapitalShares(kappa.values + (0.0,)), risk)


def annuity_pv(terms: WakalahTerms) -> float:
    """Present value of k unit payments at times T/k, 2T/k, ..., T.

    Equals k when there is no discounting and (1+r)^-T for a single payment
    at maturity. The manager's total expected payoff is this factor times
    the periodic payment.
    """
    if terms.r == 0.0:
        return float(terms.k)
    log_growth = math.log1p(terms.r)
    return -math.expm1(-terms.T * log_growth) / math.expm1(terms.T / terms.k * log_growth)


def payment_factor(terms: WakalahTerms) -> float:
    """Factor turning the manager's profit share into the periodic payment.

    periodic_payment = payment_factor(terms) * weight_manager * delta. For
    r > 0 it is ((1+r)^(T/k) - 1) / ((1+r)^T - 1); at r = 0 the expression
    is 0/0 and the limit 1/k is returned, so the k undiscounted payments
    add up to exactly the manager's share of the expected profit. The
    identity annuity_pv = (1+r)^-T / payment_factor holds for r > 0.
    """
    if terms.r == 0.0:
        return 1.0 / terms.k
    log_growth = math.log1p(terms.r)
    return math.expm1(terms.T / terms.k * log_growth) / math.expm1(terms.T * log_growth)


def cfair_musharakah_wakalah(
    ratings: Ratings,
    capital: Capital,
    risk: RiskLike,
    terms: WakalahTerms,
) -> Allocation:
    """Allocation when the d-1 funders hire an agency manager for a fixed fee.

    The manager (rated last) receives a payment p, k times up to maturity,
    instead of a profit ratio; the funding partners' ratios absorb the
    manager's labour weight equally:

        gamma_l = (w_d / (d-1) + w_l) (1 - rho) + kappa_l * rho

    independent of r and k. Payoffs, the manager's included, are present
    values at time 0: weight_l * (1+r)^-T * delta, which reduces to the
    undiscounted profit split at r = 0.
    """
    c = _as_ratings(ratings)
    kappa = _as_capital(capital)
    d = len(c)
    if len(kappa) != d - 1:
        raise ContractError(
            f"capital covers the {d - 1} funding partners, got {len(kappa)} shares"
        )
    if not isinstance(terms, WakalahTerms):
        raise ContractError(f"expected WakalahTerms, got {terms!r}")
    profile = _as_profile(risk)
    rho = profile.rho
    w = sharing_weights(c)
    manager_weight = w[d - 1]
    gammas = tuple(
        (manager_weight / (d - 1) + w[i]) * (1.0 - rho) + kappa[i] * rho
        for i in range(d - 1)
    )
    p = payment_factor(terms) * manager_weight * profile.delta
    discount = (1.0 + terms.r) ** (-terms.T)
    payoffs = tuple(wi * discount * profile.delta for wi in w)
    residual = _wakalah_residual(c.values, kappa.values, gammas, p, profile, terms)
    return Allocation(
        gammas=gammas,
        payoffs=payoffs,
        residual=residual,
        periodic_payment=p,
        valuation="present_value",
    )


def _wakalah_residual(
    c: Sequence[float],
    kappa: Sequence[float],
    gammas: Sequence[float],
    p: float,
    profile: RiskProfile,
    terms: WakalahTerms,
) -> float:
    """Rated-payoff spread for the wakalah combination, discounted payoffs."""
    d = len(c)
    pv = annuity_pv(terms)
    discount = (1.0 + terms.r) ** (-terms.T)
    manager_pay = pv * p
    pays = [
        discount * (g * profile.e_profit - k * profile.e_loss) - manager_pay / (d - 1)
        for g, k in zip(gammas, kappa)
    ]
    pays.append(manager_pay)
    rated = [ci * pi for ci, pi in zip(c, pays)]
    return max(rated) - min(rated)


def two_point_fair_ratio(beta: float, r_plus: float, r_minus: float, L: float) -> float:
    """Funder's fair ratio under a two-outcome revenue model.

    The project returns ``r_plus`` with probability ``beta`` and ``r_minus``
    otherwise; the funder's equal-payoff ratio is

        gamma_1 = (1 + (1 - beta)/beta * (L - r_minus)/(r_plus - L)) / 2

    which coincides with ``fair_mudharabah`` evaluated at the two-point
    scenario's investment risk.
    """
    beta = float(beta)
    if not 0.0 < beta <= 1.0:
        raise ContractError(f"success probability must lie in (0, 1], got {beta}")
    if not r_plus > L:
        raise ContractError(f"success revenue {r_plus} must exceed the capital {L}")
    if not r_minus <= L:
        raise ContractError(f"failure revenue {r_minus} cannot exceed the capital {L}")
    return 0.5 * (1.0 + (1.0 - beta) / beta * (L - r_minus) / (r_plus - L))


def dominance_threshold(
    weight_a: float,
    weight_b: float,
    kappa_a: float,
    kappa_b: float,
    pair: tuple[int, int] = (0, 1),
) -> DominanceReport:
    """Classify how gamma_a - gamma_b behaves over the whole risk range.

    The gap is affine in rho: (weight_a - weight_b)(1 - rho) +
    (kappa_a - kappa_b) rho. When the weight and capital gaps share a sign
    the ordering never flips; with opposite signs the ratios cross at

        rho* = gap_w / (gap_w - gap_k)  in (0, 1)

    and partner a leads for rho below rho* iff a out-weights b.
    """
    for name, v in (("weight_a", weight_a), ("weight_b", weight_b),
                    ("kappa_a", kappa_a), ("kappa_b", kappa_b)):
        if not math.isfinite(v) or v < 0.0 or v > 1.0:
            raise ContractError(f"{name} must lie in [0, 1], got {v}")
    gap_w = weight_a - weight_b
    gap_k = kappa_a - kappa_b
    if gap_w == 0.0 and gap_k == 0.0:
        return DominanceReport(pair, DominanceRegime.ALWAYS_GE, note="ratios identical")
    if gap_w >= 0.0 and gap_k >= 0.0:
        return DominanceReport(pair, DominanceRegime.ALWAYS_GE)
    if gap_w <= 0.0 and gap_k <= 0.0:
        return DominanceReport(pair, DominanceRegime.ALWAYS_LE)
    crossing = gap_w / (gap_w - gap_k)
    # Subnormal gaps can round the quotient onto a boundary; the crossing is
    # strictly interior in exact arithmetic, so pin it inside the unit
    # interval at float resolution.
    crossing = min(max(crossing, math.nextafter(0.0, 1.0)), math.nextafter(1.0, 0.0))
    return DominanceReport(pair, DominanceRegime.CROSSES_AT, crossing_rho=crossing)


def allocate(spec: ContractSpec, risk: RiskLike) -> Allocation:
    """Run the closed form matching the contract's variant."""
    if spec.variant in (Variant.FAIR_MUDHARABAH, Variant.CFAIR_MUDHARABAH):
        return cfair_mudharabah(spec.ratings, risk)
    if spec.variant is Variant.MUSHARAKAH_SELF_MANAGED:
        return cfair_musharakah(spec.ratings, spec.capital, risk)
    if spec.variant is Variant.MUSHARAKAH_EXTERNAL_MUDHARIB:
        return cfair_musharakah_external_mudharib(spec.ratings, spec.capital, risk)
    if spec.variant is Variant.MUSHARAKAH_WAKALAH:
        return cfair_musharakah_wakalah(spec.ratings, spec.capital, risk, spec.wakalah)
    raise ContractError(f"unsupported variant {spec.variant!r}")
