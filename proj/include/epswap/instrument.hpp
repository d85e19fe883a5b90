#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <json.hpp>

#include "epswap/errors.hpp"

namespace epswap {

// Term sheet of an equity protection swap.
//
// The adjusted-return profile psi is piecewise linear, continuous and
// nondecreasing with psi(0) = 0.  Loss thresholds l_1 > l_2 > ... > l_n
// partition [-1, 0) with implicit endpoints l_0 = 0 and l_{n+1} = -1;
// protection_rates[i] is the slope of psi on (l_{i+1}, l_i).  Gain
// thresholds g_1 < ... < g_m partition (0, inf) the same way, with
// fee_rates[j] the slope on (g_j, g_{j+1}).  psi(R) is the provider's
// cash flow per unit notional: negative below zero (protection payout),
// positive above (fee income).
struct EpsSpec {
    std::vector<double> loss_thresholds;   // l_1..l_n, strictly decreasing, in (-1, 0)
    std::vector<double> gain_thresholds;   // g_1..g_m, strictly increasing, > 0
    std::vector<double> protection_rates;  // p_1..p_{n+1}, each in [0, 1]
    std::vector<double> fee_rates;         // f_1..f_{m+1}, each >= 0
    double maturity_years = 1.0;
    double notional = 1.0;

    bool operator==(const EpsSpec&) const = default;
};

inline void validate(const EpsSpec& spec) {
    if (!(spec.maturity_years > 0.0)) throw ValidationError("maturity must be positive");
    if (!(spec.notional > 0.0)) throw ValidationError("notional must be positive");
    for (double l : spec.loss_thresholds) {
        if (!(l < 0.0)) throw ValidationError("loss threshold must be negative");
        if (!(l > -1.0)) throw ValidationError("loss threshold must exceed -1");
    }
    for (std::size_t i = 1; i < spec.loss_thresholds.size(); ++i)
        if (!(spec.loss_thresholds[i] < spec.loss_thresholds[i - 1]))
            throw ValidationError("loss thresholds must be strictly decreasing");
    for (double g : spec.gain_thresholds)
        if (!(g > 0.0)) throw ValidationError("gain threshold must be positive");
    for (std::size_t j = 1; j < spec.gain_thresholds.size(); ++j)
        if (!(spec.gain_thresholds[j] > spec.gain_thresholds[j - 1]))
            throw ValidationError("gain thresholds must be strictly increasing");
    if (spec.protection_rates.size() != spec.loss_thresholds.size() + 1)
        throw ValidationError("protection rate count must equal loss threshold count + 1");
    if (spec.fee_rates.size() != spec.gain_thresholds.size() + 1)
        throw ValidationError("fee rate count must equal gain threshold count + 1");
    for (double p : spec.protection_rates) {
        if (!(p >= 0.0)) throw ValidationError("protection rate must be nonnegative");
        if (p > 1.0) throw ValidationError("protection rate exceeds 1");
    }
    for (double f : spec.fee_rates)
        if (!(f >= 0.0)) throw ValidationError("fee rate must be nonnegative");
}

// Fee rates above 1 are accepted (a provider may take more than the
// incremental gain) but are unusual enough to surface programmatically.
enum class SpecWarningCode { fee_rate_above_one };

struct SpecWarning {
    SpecWarningCode code;
    std::string message;
};

inline std::vector<SpecWarning> structure_warnings(const EpsSpec& spec) {
    std::vector<SpecWarning> warnings;
    for (std::size_t j = 0; j < spec.fee_rates.size(); ++j) {
        if (spec.fee_rates[j] > 1.0) {
            warnings.push_back({SpecWarningCode::fee_rate_above_one,
                                "fee rate f_" + std::to_string(j + 1) + " exceeds 1"});
        }
    }
    return warnings;
}

// Buffer contract: no cash flow for returns in [l1, g1]; protection at rate
// p2 below l1, fee at rate f2 above g1.
inline EpsSpec build_buffer(double l1, double g1, double p2, double f2,
                            double maturity_years = 1.0, double notional = 1.0) {
    if (!(p2 > 0.0)) throw ValidationError("protection rate must be positive");
    if (!(f2 > 0.0)) throw ValidationError("fee rate must be positive");
    EpsSpec spec;
    spec.loss_thresholds = {l1};
    spec.gain_thresholds = {g1};
    spec.protection_rates = {0.0, p2};
    spec.fee_rates = {0.0, f2};
    spec.maturity_years = maturity_years;
    spec.notional = notional;
    validate(spec);
    return spec;
}

// Floor contract: protection at rate p1 on all losses down to l1, capped at
// p1*l1 beyond it; fee leg identical to the buffer's.
inline EpsSpec build_floor(double l1, double g1, double p1, double f2,
                           double maturity_years = 1.0, double notional = 1.0) {
    if (!(p1 > 0.0)) throw ValidationError("protection rate must be positive");
    if (!(f2 > 0.0)) throw ValidationError("fee rate must be positive");
    EpsSpec spec;
    spec.loss_thresholds = {l1};
    spec.gain_thresholds = {g1};
    spec.protection_rates = {p1, 0.0};
    spec.fee_rates = {0.0, f2};
    spec.maturity_years = maturity_years;
    spec.notional = notional;
    validate(spec);
    return spec;
}

inline EpsSpec build_generic(std::vector<double> loss_thresholds, std::vector<double> gain_thresholds,
                             std::vector<double> protection_rates, std::vector<double> fee_rates,
                             double maturity_years = 1.0, double notional = 1.0) {
    EpsSpec spec;
    spec.loss_thresholds = std::move(loss_thresholds);
    spec.gain_thresholds = std::move(gain_thresholds);
    spec.protection_rates = std::move(protection_rates);
    spec.fee_rates = std::move(fee_rates);
    spec.maturity_years = maturity_years;
    spec.notional = notional;
    validate(spec);
    return spec;
}

// Adjusted return psi(R), evaluated through cumulative closed-form segment
// sums.  At a breakpoint the two adjacent expressions agree by continuity,
// so the value there is unambiguous.
inline double adjusted_return(const EpsSpec& spec, double realized_return) {
    if (!(realized_return >= -1.0)) throw DomainError("realized return must be at least -1");
    if (realized_return < 0.0) {
        double value = 0.0;
        double upper = 0.0;  // l_i of the segment currently accumulated
        std::size_t i = 0;
        for (; i < spec.loss_thresholds.size() && realized_return < spec.loss_thresholds[i]; ++i) {
            value += spec.protection_rates[i] * (spec.loss_thresholds[i] - upper);
            upper = spec.loss_thresholds[i];
        }
        return value + spec.protection_rates[i] * (realized_return - upper);
    }
    if (realized_return > 0.0) {
        double value = 0.0;
        double lower = 0.0;
        std::size_t j = 0;
        for (; j < spec.gain_thresholds.size() && realized_return > spec.gain_thresholds[j]; ++j) {
            value += spec.fee_rates[j] * (spec.gain_thresholds[j] - lower);
            lower = spec.gain_thresholds[j];
        }
        return value + spec.fee_rates[j] * (realized_return - lower);
    }
    return 0.0;
}

// psi split into its nonpositive and nonnegative parts.  For any single
// return at most one of the two is nonzero and they sum to psi exactly.
struct LegValues {
    double protection = 0.0;  // <= 0: provider's payout when R < 0
    double fee = 0.0;         // >= 0: provider's income when R > 0
};

inline LegValues leg_values(const EpsSpec& spec, double realized_return) {
    const double psi = adjusted_return(spec, realized_return);
    if (realized_return < 0.0) return {psi, 0.0};
    if (realized_return > 0.0) return {0.0, psi};
    return {0.0, 0.0};
}

// Holder's return after the swap settles: R - psi(R).
inline double net_return(const EpsSpec& spec, double realized_return) {
    return realized_return - adjusted_return(spec, realized_return);
}

// Terminal exchange in currency units; positive means the holder pays the
// provider.
inline double settlement_cashflow(const EpsSpec& spec, double realized_return) {
    return spec.notional * adjusted_return(spec, realized_return);
}

inline void to_json(nlohmann::json& j, const EpsSpec& spec) {
    j = nlohmann::json{{"loss_thresholds", spec.loss_thresholds},
                       {"gain_thresholds", spec.gain_thresholds},
                       {"protection_rates", spec.protection_rates},
                       {"fee_rates", spec.fee_rates},
                       {"maturity_years", spec.maturity_years},
                       {"notional", spec.notional}};
}

inline void from_json(const nlohmann::json& j, EpsSpec& spec) {
    j.at("loss_thresholds").get_to(spec.loss_thresholds);
    j.at("gain_thresholds").get_to(spec.gain_thresholds);
    j.at("protection_rates").get_to(spec.protection_rates);
    j.at("fee_rates").get_to(spec.fee_rates);
    spec.maturity_years = j.value("maturity_years", 1.0);
    spec.notional = j.value("notional", 1.0);
}

}  // namespace epswap
