#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "epswap/date.hpp"
#include "epswap/errors.hpp"
#include "epswap/instrument.hpp"

namespace epswap {

enum class OptionKind { call, put };

inline const char* to_string(OptionKind kind) { return kind == OptionKind::call ? "call" : "put"; }

struct OptionPosition {
    OptionKind kind = OptionKind::call;
    double strike = 0.0;
    double quantity = 0.0;  // positive = long

    bool operator==(const OptionPosition&) const = default;
};

// Buy-and-hold option portfolio whose terminal payoff is -psi(R_T): long
// puts back the protection leg, short calls fund it from the fee leg.
struct HedgePortfolio {
    double spot_at_inception = 0.0;
    double maturity_years = 0.0;
    std::vector<OptionPosition> positions;
};

inline void validate(const HedgePortfolio& hedge) {
    if (!(hedge.spot_at_inception > 0.0)) throw ValidationError("hedge spot must be positive");
    if (!(hedge.maturity_years > 0.0)) throw ValidationError("hedge maturity must be positive");
    for (std::size_t i = 0; i < hedge.positions.size(); ++i) {
        const OptionPosition& pos = hedge.positions[i];
        if (!(pos.strike > 0.0)) throw ValidationError("position strike must be positive");
        if (!std::isfinite(pos.quantity) || pos.quantity == 0.0)
            throw ValidationError("position quantity must be finite and nonzero");
        if (pos.kind == OptionKind::put && pos.strike > hedge.spot_at_inception)
            throw ValidationError("hedge puts sit at or below the spot");
        if (pos.kind == OptionKind::call && pos.strike < hedge.spot_at_inception)
            throw ValidationError("hedge calls sit at or above the spot");
        for (std::size_t k = i + 1; k < hedge.positions.size(); ++k)
            if (hedge.positions[k].kind == pos.kind && hedge.positions[k].strike == pos.strike)
                throw ValidationError("duplicate strike within one option kind");
    }
}

// Put quantities are adjacent protection-rate differences over the spot,
// struck at s0(1+l_i); call quantities mirror with fee rates at s0(1+g_j).
// Rate differences of zero produce no position.
inline HedgePortfolio synthesize_hedge(const EpsSpec& spec, double s0) {
    validate(spec);
    if (!(s0 > 0.0)) throw DomainError("spot must be positive");
    HedgePortfolio hedge{s0, spec.maturity_years, {}};
    double prev = 0.0;
    for (std::size_t i = 0; i < spec.protection_rates.size(); ++i) {
        const double threshold = i == 0 ? 0.0 : spec.loss_thresholds[i - 1];
        const double quantity = (spec.protection_rates[i] - prev) / s0;
        if (quantity != 0.0) hedge.positions.push_back({OptionKind::put, s0 * (1.0 + threshold), quantity});
        prev = spec.protection_rates[i];
    }
    prev = 0.0;
    for (std::size_t j = 0; j < spec.fee_rates.size(); ++j) {
        const double threshold = j == 0 ? 0.0 : spec.gain_thresholds[j - 1];
        const double quantity = -(spec.fee_rates[j] - prev) / s0;
        if (quantity != 0.0) hedge.positions.push_back({OptionKind::call, s0 * (1.0 + threshold), quantity});
        prev = spec.fee_rates[j];
    }
    return hedge;
}

inline double vanilla_payoff(OptionKind kind, double strike, double terminal_price) {
    return kind == OptionKind::call ? std::max(terminal_price - strike, 0.0)
                                    : std::max(strike - terminal_price, 0.0);
}

inline double hedge_payoff(const HedgePortfolio& hedge, double terminal_price) {
    if (!(terminal_price >= 0.0)) throw DomainError("terminal price must be nonnegative");
    double total = 0.0;
    for (const OptionPosition& pos : hedge.positions)
        total += pos.quantity * vanilla_payoff(pos.kind, pos.strike, terminal_price);
    return total;
}

// Fair premium per unit notional under any option pricer.  A pricer failure
// is rethrown with the offending leg attached.
template <typename Pricer>
double premium_from_pricer(const HedgePortfolio& hedge, Pricer&& pricer) {
    double total = 0.0;
    for (const OptionPosition& pos : hedge.positions) {
        double price;
        try {
            price = pricer(pos.kind, pos.strike);
        } catch (const Error& e) {
            std::ostringstream msg;
            msg << "pricer failed for " << to_string(pos.kind) << " at strike " << pos.strike << ": " << e.what();
            throw Error(e.kind(), msg.str());
        } catch (const std::exception& e) {
            std::ostringstream msg;
            msg << "pricer failed for " << to_string(pos.kind) << " at strike " << pos.strike << ": " << e.what();
            throw DataError(msg.str());
        }
        total += pos.quantity * price;
    }
    return total;
}

struct OptionQuote {
    Date quote_date;
    Date expiration;
    double strike = 0.0;
    OptionKind kind = OptionKind::call;
    double bid = 0.0;
    double ask = 0.0;
    double spot = 0.0;

    double mid() const { return 0.5 * (bid + ask); }
    double moneyness() const { return strike / spot; }
};

// One day's option chain for a single expiry.
struct QuoteBoard {
    std::vector<OptionQuote> quotes;

    double spot() const { return quotes.front().spot; }
};

inline void validate(const QuoteBoard& board) {
    if (board.quotes.empty()) throw ValidationError("quote board is empty");
    const OptionQuote& first = board.quotes.front();
    for (const OptionQuote& q : board.quotes) {
        if (!(q.strike > 0.0)) throw ValidationError("quote strike must be positive");
        if (!(q.spot > 0.0)) throw ValidationError("quote spot must be positive");
        if (!(q.bid >= 0.0) || !(q.ask >= 0.0)) throw ValidationError("quote prices must be nonnegative");
        if (q.bid > q.ask) throw ValidationError("quote bid exceeds ask");
        if (q.spot != first.spot) throw ValidationError("quote board spot is inconsistent");
        if (q.quote_date != first.quote_date || q.expiration != first.expiration)
            throw ValidationError("quote board mixes quote or expiration dates");
    }
}

enum class PriceSide { bid, mid, ask };

inline const char* to_string(PriceSide side) {
    switch (side) {
        case PriceSide::bid: return "bid";
        case PriceSide::mid: return "mid";
        case PriceSide::ask: return "ask";
    }
    return "mid";
}

// Per-leg record of how a theoretical strike was mapped onto the board.
struct LegSnap {
    OptionKind kind = OptionKind::call;
    double quantity = 0.0;
    double theoretical_strike = 0.0;
    double target_moneyness = 0.0;
    double quoted_strike = 0.0;
    double quoted_moneyness = 0.0;
    double price_used = 0.0;
};

struct MarketPremium {
    double premium = 0.0;
    std::vector<LegSnap> legs;
};

// Model-free premium: synthesize the hedge at the board spot and price each
// leg off the quote of matching kind with nearest moneyness (ties go to the
// lower strike).  Quoted boards rarely carry the exact theoretical strike,
// hence the snapping tolerance on |strike/spot - (1 + threshold)|.
inline MarketPremium premium_from_quotes(const EpsSpec& spec, const QuoteBoard& board, PriceSide side,
                                         double moneyness_tolerance = 0.02) {
    validate(board);
    const double spot = board.spot();
    const HedgePortfolio hedge = synthesize_hedge(spec, spot);
    MarketPremium out;
    for (const OptionPosition& pos : hedge.positions) {
        const double target = pos.strike / spot;
        const OptionQuote* best = nullptr;
        double best_gap = std::numeric_limits<double>::infinity();
        for (const OptionQuote& q : board.quotes) {
            if (q.kind != pos.kind) continue;
            const double gap = std::abs(q.moneyness() - target);
            if (gap < best_gap || (gap == best_gap && best && q.strike < best->strike)) {
                best = &q;
                best_gap = gap;
            }
        }
        if (best == nullptr || best_gap > moneyness_tolerance) {
            std::ostringstream msg;
            msg << "no " << to_string(pos.kind) << " quote within " << moneyness_tolerance
                << " of moneyness " << target;
            throw CoverageError(msg.str());
        }
        const double price = side == PriceSide::bid ? best->bid
                           : side == PriceSide::ask ? best->ask
                                                    : best->mid();
        out.premium += pos.quantity * price;
        out.legs.push_back({pos.kind, pos.quantity, pos.strike, target, best->strike, best->moneyness(), price});
    }
    return out;
}

inline void to_json(nlohmann::json& j, const OptionPosition& pos) {
    j = nlohmann::json{{"kind", to_string(pos.kind)}, {"strike", pos.strike}, {"quantity", pos.quantity}};
}

inline void to_json(nlohmann::json& j, const HedgePortfolio& hedge) {
    j = nlohmann::json{{"spot_at_inception", hedge.spot_at_inception},
                       {"maturity_years", hedge.maturity_years},
                       {"positions", hedge.positions}};
}

inline void to_json(nlohmann::json& j, const LegSnap& leg) {
    j = nlohmann::json{{"kind", to_string(leg.kind)},
                       {"quantity", leg.quantity},
                       {"theoretical_strike", leg.theoretical_strike},
                       {"target_moneyness", leg.target_moneyness},
                       {"quoted_strike", leg.quoted_strike},
                       {"quoted_moneyness", leg.quoted_moneyness},
                       {"price_used", leg.price_used}};
}

}  // namespace epswap
