#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>

#include "epswap/black_scholes.hpp"
#include "epswap/hedge.hpp"

namespace epswap {

struct FeeSolution {
    double fee_rate = 0.0;
    double premium_residual = 0.0;  // premium re-priced at the solved rate
    bool above_one = false;         // solved rate exceeds 1; reported, never clamped
    std::size_t fee_index = 0;
};

namespace detail {

// The premium is affine in any single fee rate because hedge quantities are
// adjacent rate differences, so two evaluations pin the line c(x) = a - b x
// and the root is a/b.
template <typename PremiumFn>
FeeSolution solve_affine_fee(std::size_t fee_index, PremiumFn&& premium_at) {
    const double at_zero = premium_at(0.0);
    const double at_one = premium_at(1.0);
    const double coefficient = at_zero - at_one;
    if (!(coefficient > 0.0))
        throw NoSolutionError("designated fee rate is backed by a worthless option");
    FeeSolution sol;
    sol.fee_index = fee_index;
    sol.fee_rate = at_zero / coefficient;
    if (sol.fee_rate >= 0.0) {
        // One Newton step on the re-priced premium removes the conditioning
        // loss when the backing option is deep out of the money (tiny b).
        const double polished = sol.fee_rate + premium_at(sol.fee_rate) / coefficient;
        if (polished >= 0.0) sol.fee_rate = polished;
        sol.premium_residual = premium_at(sol.fee_rate);
    } else {
        // A negative root (premium already negative at zero fee) is reported
        // raw; the contract itself cannot carry a negative rate, so the
        // residual is the affine one.
        sol.premium_residual = at_zero - coefficient * sol.fee_rate;
    }
    sol.above_one = sol.fee_rate > 1.0;
    return sol;
}

}  // namespace detail

inline EpsSpec with_fee_rate(EpsSpec spec, std::size_t fee_index, double rate) {
    if (fee_index >= spec.fee_rates.size()) throw ValidationError("fee index out of range");
    spec.fee_rates[fee_index] = rate;
    return spec;
}

// Fee rate nulling the closed-form premium.  The designated rate defaults to
// the last fee rate (f_{m+1}, the top gain segment).
inline FeeSolution solve_fee_bs(const EpsSpec& spec, const BsParams& p,
                                std::optional<std::size_t> fee_index = {}) {
    validate(spec);
    const std::size_t idx = fee_index.value_or(spec.fee_rates.size() - 1);
    if (idx >= spec.fee_rates.size()) throw ValidationError("fee index out of range");
    return detail::solve_affine_fee(idx, [&](double x) {
        return eps_premium_closed_form(with_fee_rate(spec, idx, x), p);
    });
}

// Fee rate nulling the premium priced off a quote board.
inline FeeSolution solve_fee_market(const EpsSpec& spec, const QuoteBoard& board, PriceSide side,
                                    std::optional<std::size_t> fee_index = {},
                                    double moneyness_tolerance = 0.02) {
    validate(spec);
    const std::size_t idx = fee_index.value_or(spec.fee_rates.size() - 1);
    if (idx >= spec.fee_rates.size()) throw ValidationError("fee index out of range");
    return detail::solve_affine_fee(idx, [&](double x) {
        return premium_from_quotes(with_fee_rate(spec, idx, x), board, side, moneyness_tolerance).premium;
    });
}

// Proportional-legs special case: (f - p) Call_0(1, T) + p (1 - e^{-rT}) = 0
// gives f directly from the ATM call quoted per unit spot.  Equivalently
// f Call = p Put by parity; a positive rate makes the ATM call worth more
// than the put, so the fair fee rate lands below the protection rate, and
// the two coincide exactly when the rate is zero.
inline double basic_eps_fee(double protection_rate, double rate, double maturity_years,
                            double atm_call_unit_price) {
    if (!(atm_call_unit_price > 0.0)) throw DomainError("ATM call price must be positive");
    if (!(protection_rate >= 0.0)) throw DomainError("protection rate must be nonnegative");
    if (!(maturity_years > 0.0)) throw DomainError("maturity must be positive");
    return protection_rate -
           protection_rate * (1.0 - std::exp(-rate * maturity_years)) / atm_call_unit_price;
}

// Plain bisection, retained as an independent cross-check on the affine
// solve.
inline double bisect(const std::function<double(double)>& f, double lo, double hi,
                     double tol = 1e-12, int max_iter = 200) {
    double f_lo = f(lo);
    double f_hi = f(hi);
    if (f_lo == 0.0) return lo;
    if (f_hi == 0.0) return hi;
    if ((f_lo > 0.0) == (f_hi > 0.0))
        throw NoSolutionError("bisection bracket does not straddle a root");
    for (int iter = 0; iter < max_iter && hi - lo > tol; ++iter) {
        const double mid = 0.5 * (lo + hi);
        const double f_mid = f(mid);
        if (f_mid == 0.0) return mid;
        if ((f_mid > 0.0) == (f_lo > 0.0)) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace epswap
