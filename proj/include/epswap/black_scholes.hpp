#pragma once

#include <cmath>
#include <numbers>

#include "epswap/errors.hpp"
#include "epswap/instrument.hpp"

namespace epswap {

// Black-Scholes market parameters.  Negative rates are allowed; volatility
// and maturity must be positive.
struct BsParams {
    double rate = 0.0;            // continuously compounded, per year
    double dividend_yield = 0.0;  // continuous, per year
    double volatility = 0.2;      // per sqrt(year)
    double maturity_years = 1.0;

    bool operator==(const BsParams&) const = default;
};

inline void validate(const BsParams& p) {
    if (!(p.volatility > 0.0)) throw ValidationError("volatility must be positive");
    if (!(p.maturity_years > 0.0)) throw ValidationError("maturity must be positive");
    if (!std::isfinite(p.rate) || !std::isfinite(p.dividend_yield))
        throw ValidationError("rate and dividend yield must be finite");
}

// Standard normal CDF via the complementary error function.  std::erfc is
// accurate to a few ulp, well inside a 1e-15 absolute error budget.
inline double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

inline double bs_call(double spot, double strike, const BsParams& p) {
    if (!(spot > 0.0)) throw DomainError("spot must be positive");
    if (!(strike > 0.0)) throw DomainError("strike must be positive");
    validate(p);
    const double vol_sqrt_t = p.volatility * std::sqrt(p.maturity_years);
    const double d_plus = (std::log(spot / strike) +
                           (p.rate - p.dividend_yield + 0.5 * p.volatility * p.volatility) * p.maturity_years) /
                          vol_sqrt_t;
    const double d_minus = d_plus - vol_sqrt_t;
    return std::exp(-p.dividend_yield * p.maturity_years) * spot * norm_cdf(d_plus) -
           std::exp(-p.rate * p.maturity_years) * strike * norm_cdf(d_minus);
}

inline double bs_put(double spot, double strike, const BsParams& p) {
    if (!(spot > 0.0)) throw DomainError("spot must be positive");
    if (!(strike > 0.0)) throw DomainError("strike must be positive");
    validate(p);
    const double vol_sqrt_t = p.volatility * std::sqrt(p.maturity_years);
    const double d_plus = (std::log(spot / strike) +
                           (p.rate - p.dividend_yield + 0.5 * p.volatility * p.volatility) * p.maturity_years) /
                          vol_sqrt_t;
    const double d_minus = d_plus - vol_sqrt_t;
    return std::exp(-p.rate * p.maturity_years) * strike * norm_cdf(-d_minus) -
           std::exp(-p.dividend_yield * p.maturity_years) * spot * norm_cdf(-d_plus);
}

namespace detail {

// Unit-notional options written on the gross return S_T/S_0 and struck at
// 1 + x; these are bs_put/bs_call at spot 1, which is what makes the
// premium independent of the index level.
inline double unit_put_value(double threshold, const BsParams& p) {
    const double vol_sqrt_t = p.volatility * std::sqrt(p.maturity_years);
    const double log_term = -std::log1p(threshold);
    const double drift = (p.rate - p.dividend_yield) * p.maturity_years;
    const double half_var = 0.5 * p.volatility * p.volatility * p.maturity_years;
    const double h_plus = (log_term + drift + half_var) / vol_sqrt_t;
    const double h_minus = (log_term + drift - half_var) / vol_sqrt_t;
    return std::exp(-p.rate * p.maturity_years) * (1.0 + threshold) * norm_cdf(-h_minus) -
           std::exp(-p.dividend_yield * p.maturity_years) * norm_cdf(-h_plus);
}

inline double unit_call_value(double threshold, const BsParams& p) {
    const double vol_sqrt_t = p.volatility * std::sqrt(p.maturity_years);
    const double log_term = -std::log1p(threshold);
    const double drift = (p.rate - p.dividend_yield) * p.maturity_years;
    const double half_var = 0.5 * p.volatility * p.volatility * p.maturity_years;
    const double h_plus = (log_term + drift + half_var) / vol_sqrt_t;
    const double h_minus = (log_term + drift - half_var) / vol_sqrt_t;
    return std::exp(-p.dividend_yield * p.maturity_years) * norm_cdf(h_plus) -
           std::exp(-p.rate * p.maturity_years) * (1.0 + threshold) * norm_cdf(h_minus);
}

}  // namespace detail

// Closed-form fair premium per unit notional: the value of the static hedge
// expressed directly in terms of the thresholds, so no spot input appears.
inline double eps_premium_closed_form(const EpsSpec& spec, const BsParams& p) {
    validate(spec);
    validate(p);
    if (std::abs(spec.maturity_years - p.maturity_years) > 1e-12)
        throw ValidationError("spec maturity and pricing maturity differ");
    double premium = 0.0;
    double prev = 0.0;
    for (std::size_t i = 0; i < spec.protection_rates.size(); ++i) {
        const double threshold = i == 0 ? 0.0 : spec.loss_thresholds[i - 1];
        premium += (spec.protection_rates[i] - prev) * detail::unit_put_value(threshold, p);
        prev = spec.protection_rates[i];
    }
    prev = 0.0;
    for (std::size_t j = 0; j < spec.fee_rates.size(); ++j) {
        const double threshold = j == 0 ? 0.0 : spec.gain_thresholds[j - 1];
        premium -= (spec.fee_rates[j] - prev) * detail::unit_call_value(threshold, p);
        prev = spec.fee_rates[j];
    }
    return premium;
}

}  // namespace epswap
