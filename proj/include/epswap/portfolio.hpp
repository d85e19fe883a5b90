#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "epswap/date.hpp"
#include "epswap/errors.hpp"

namespace epswap {

struct PricePoint {
    Date date;
    double close = 0.0;
};

// Dated daily closes; dates strictly increasing, closes positive.
struct PriceSeries {
    std::vector<PricePoint> points;

    std::size_t size() const { return points.size(); }
    bool empty() const { return points.empty(); }
};

inline void validate(const PriceSeries& series) {
    for (std::size_t i = 0; i < series.points.size(); ++i) {
        if (!(series.points[i].close > 0.0)) throw ValidationError("nonpositive close");
        if (i > 0 && !(series.points[i - 1].date < series.points[i].date))
            throw ValidationError("dates must be strictly increasing");
    }
}

inline double simple_return(double s0, double sT) {
    if (!(s0 > 0.0)) throw DomainError("initial price must be positive");
    if (!(sT >= 0.0)) throw DomainError("terminal price must be nonnegative");
    return (sT - s0) / s0;
}

struct TrailingReturn {
    Date start;
    Date end;
    double value = 0.0;
};

// Rolling window returns close_t / close_{t-window} - 1.  The window is a
// row lag, not a calendar span: a daily close file already has holidays
// removed, so 252 rows stand in for one year.
inline std::vector<TrailingReturn> trailing_returns(const PriceSeries& series, std::size_t window) {
    if (window == 0) throw ValidationError("window must be positive");
    if (series.size() <= window) throw ValidationError("price series shorter than trailing window");
    validate(series);
    std::vector<TrailingReturn> out;
    out.reserve(series.size() - window);
    for (std::size_t t = window; t < series.size(); ++t) {
        const PricePoint& start = series.points[t - window];
        const PricePoint& end = series.points[t];
        out.push_back({start.date, end.date, simple_return(start.close, end.close)});
    }
    return out;
}

enum class Market { domestic, foreign };

struct PortfolioComponent {
    double weight = 0.0;  // fraction of notional at inception
    Market market = Market::domestic;
    std::string series_id;
};

struct PortfolioSpec {
    std::vector<PortfolioComponent> components;
    std::string fx_series_id;  // exchange-rate series backing foreign legs
};

inline void validate(const PortfolioSpec& spec) {
    if (spec.components.empty()) throw ValidationError("portfolio has no components");
    double total = 0.0;
    for (const auto& c : spec.components) {
        if (!(c.weight > 0.0)) throw ValidationError("portfolio weight must be positive");
        total += c.weight;
    }
    if (std::abs(total - 1.0) > 1e-12) throw ValidationError("portfolio weights must sum to 1");
}

// Weighted sum of component returns; the bespoke portfolio's realized
// return per unit notional.
inline double bespoke_return(const PortfolioSpec& spec, std::span<const double> component_returns) {
    validate(spec);
    if (component_returns.size() != spec.components.size())
        throw ValidationError("one return per portfolio component required");
    double total = 0.0;
    for (std::size_t i = 0; i < spec.components.size(); ++i)
        total += spec.components[i].weight * component_returns[i];
    return total;
}

// Return on a foreign asset translated into domestic currency.
inline double cross_currency_return(double q0, double qT, double s0, double sT) {
    if (!(q0 > 0.0)) throw DomainError("initial exchange rate must be positive");
    if (!(s0 > 0.0)) throw DomainError("initial price must be positive");
    if (!(qT >= 0.0)) throw DomainError("terminal exchange rate must be nonnegative");
    if (!(sT >= 0.0)) throw DomainError("terminal price must be nonnegative");
    return (qT * sT - q0 * s0) / (q0 * s0);
}

enum class LegSide { loss, gain };

// Super-replicating bound for one basket option leg: the weighted sum of
// single-name option payoffs at the same moneyness dominates the basket
// payoff, with equality when all components land on the same side of the
// level in the same order.  Basket options themselves are not priced here.
inline double basket_leg_bound(const PortfolioSpec& spec, double level, LegSide side,
                               std::span<const double> component_returns) {
    validate(spec);
    if (component_returns.size() != spec.components.size())
        throw ValidationError("one return per portfolio component required");
    if (side == LegSide::loss && !(level <= 0.0))
        throw ValidationError("loss-side level must be nonpositive");
    if (side == LegSide::gain && !(level >= 0.0))
        throw ValidationError("gain-side level must be nonnegative");
    double bound = 0.0;
    for (std::size_t i = 0; i < spec.components.size(); ++i) {
        const double intrinsic = side == LegSide::loss ? level - component_returns[i]
                                                       : component_returns[i] - level;
        bound += spec.components[i].weight * std::max(intrinsic, 0.0);
    }
    return bound;
}

// Exact payoff of the basket option leg, for comparison with the bound.
inline double basket_leg_exact(const PortfolioSpec& spec, double level, LegSide side,
                               std::span<const double> component_returns) {
    const double basket = bespoke_return(spec, component_returns);
    if (side == LegSide::loss && !(level <= 0.0))
        throw ValidationError("loss-side level must be nonpositive");
    if (side == LegSide::gain && !(level >= 0.0))
        throw ValidationError("gain-side level must be nonnegative");
    return side == LegSide::loss ? std::max(level - basket, 0.0) : std::max(basket - level, 0.0);
}

}  // namespace epswap
