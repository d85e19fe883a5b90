#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "epswap/gbm.hpp"
#include "epswap/instrument.hpp"

namespace epswap {

// How multi-year performance is accumulated.  Additive sums yearly simple
// returns; compounded chains (1 + R) factors.
enum class Aggregation { additive, compounded };

inline const char* to_string(Aggregation a) {
    return a == Aggregation::additive ? "additive" : "compounded";
}

struct SimConfig {
    int n_paths = 200;
    int years = 5;
    int steps_per_year = 52;
    std::uint64_t seed = 42;
    std::vector<JumpEvent> jumps;  // global step indices over the whole horizon
    Aggregation aggregation = Aggregation::additive;
    int histogram_bins = 30;
};

struct SeriesStats {
    double mean = 0.0;
    double stddev = 0.0;  // sample standard deviation, n - 1
    double min = 0.0;
    double max = 0.0;
};

struct HistBin {
    double left = 0.0;
    double right = 0.0;
    int count = 0;
};

inline SeriesStats summarize(std::span<const double> xs) {
    SeriesStats s;
    if (xs.empty()) return s;
    double sum = 0.0;
    s.min = xs[0];
    s.max = xs[0];
    for (double x : xs) {
        sum += x;
        s.min = std::min(s.min, x);
        s.max = std::max(s.max, x);
    }
    s.mean = sum / static_cast<double>(xs.size());
    if (xs.size() > 1) {
        double ss = 0.0;
        for (double x : xs) ss += (x - s.mean) * (x - s.mean);
        s.stddev = std::sqrt(ss / static_cast<double>(xs.size() - 1));
    }
    return s;
}

inline std::vector<HistBin> fixed_bins(std::span<const double> xs, int bins) {
    std::vector<HistBin> out;
    if (xs.empty() || bins < 1) return out;
    double lo = xs[0], hi = xs[0];
    for (double x : xs) {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
    if (!(hi > lo)) {
        out.push_back({lo, hi, static_cast<int>(xs.size())});
        return out;
    }
    out.resize(static_cast<std::size_t>(bins));
    const double width = (hi - lo) / bins;
    for (int b = 0; b < bins; ++b) out[b] = {lo + b * width, lo + (b + 1) * width, 0};
    for (double x : xs) {
        int b = static_cast<int>((x - lo) / width);
        b = std::clamp(b, 0, bins - 1);
        ++out[static_cast<std::size_t>(b)].count;
    }
    return out;
}

struct YearSummary {
    int year = 0;
    SeriesStats original_annual;       // year-on-year returns
    SeriesStats net_annual;
    SeriesStats original_cumulative;   // aggregated since inception
    SeriesStats net_cumulative;
    std::vector<HistBin> original_bins;  // of the cumulative values
    std::vector<HistBin> net_bins;
};

struct SimulationResult {
    SimConfig config;
    // [year - 1][path]
    std::vector<std::vector<double>> original_annual;
    std::vector<std::vector<double>> net_annual;
    std::vector<std::vector<double>> original_cumulative;
    std::vector<std::vector<double>> net_cumulative;
    std::vector<YearSummary> years;
};

// Rolls back-to-back one-year contracts over simulated paths: each year's
// original return comes from the year-boundary closes and the net return is
// original - psi(original).
inline SimulationResult run_forward_simulation(const EpsSpec& spec, const SimConfig& cfg,
                                               const BsParams& market) {
    validate(spec);
    if (std::abs(spec.maturity_years - 1.0) > 1e-12)
        throw ValidationError("forward simulation rolls annual contracts; spec maturity must be 1 year");
    if (cfg.n_paths < 1 || cfg.years < 1 || cfg.steps_per_year < 1)
        throw ValidationError("simulation counts must be positive");

    BsParams horizon = market;
    horizon.maturity_years = static_cast<double>(cfg.years);
    const int total_steps = cfg.years * cfg.steps_per_year;
    // Only returns matter, so the paths start at 1.
    const PathGrid grid = gbm_paths(1.0, horizon, total_steps, cfg.n_paths, cfg.seed, cfg.jumps);

    SimulationResult result;
    result.config = cfg;
    result.original_annual.assign(cfg.years, std::vector<double>(cfg.n_paths, 0.0));
    result.net_annual = result.original_annual;
    result.original_cumulative = result.original_annual;
    result.net_cumulative = result.original_annual;

    for (int path = 0; path < cfg.n_paths; ++path) {
        double cum_original = cfg.aggregation == Aggregation::additive ? 0.0 : 1.0;
        double cum_net = cum_original;
        for (int year = 1; year <= cfg.years; ++year) {
            const double start = grid.at((year - 1) * cfg.steps_per_year, path);
            const double end = grid.at(year * cfg.steps_per_year, path);
            const double original = end / start - 1.0;
            const double net = original - adjusted_return(spec, original);
            result.original_annual[year - 1][path] = original;
            result.net_annual[year - 1][path] = net;
            if (cfg.aggregation == Aggregation::additive) {
                cum_original += original;
                cum_net += net;
                result.original_cumulative[year - 1][path] = cum_original;
                result.net_cumulative[year - 1][path] = cum_net;
            } else {
                cum_original *= 1.0 + original;
                cum_net *= 1.0 + net;
                result.original_cumulative[year - 1][path] = cum_original - 1.0;
                result.net_cumulative[year - 1][path] = cum_net - 1.0;
            }
        }
    }

    result.years.reserve(static_cast<std::size_t>(cfg.years));
    for (int year = 1; year <= cfg.years; ++year) {
        YearSummary ys;
        ys.year = year;
        ys.original_annual = summarize(result.original_annual[year - 1]);
        ys.net_annual = summarize(result.net_annual[year - 1]);
        ys.original_cumulative = summarize(result.original_cumulative[year - 1]);
        ys.net_cumulative = summarize(result.net_cumulative[year - 1]);
        ys.original_bins = fixed_bins(result.original_cumulative[year - 1], cfg.histogram_bins);
        ys.net_bins = fixed_bins(result.net_cumulative[year - 1], cfg.histogram_bins);
        result.years.push_back(std::move(ys));
    }
    return result;
}

inline void to_json(nlohmann::json& j, const SeriesStats& s) {
    j = nlohmann::json{{"mean", s.mean}, {"stddev", s.stddev}, {"min", s.min}, {"max", s.max}};
}

inline void to_json(nlohmann::json& j, const YearSummary& y) {
    j = nlohmann::json{{"year", y.year},
                       {"original_annual", y.original_annual},
                       {"net_annual", y.net_annual},
                       {"original_cumulative", y.original_cumulative},
                       {"net_cumulative", y.net_cumulative}};
}

inline nlohmann::json summary_json(const SimulationResult& result) {
    return nlohmann::json{{"n_paths", result.config.n_paths},
                          {"years", result.config.years},
                          {"steps_per_year", result.config.steps_per_year},
                          {"seed", result.config.seed},
                          {"aggregation", to_string(result.config.aggregation)},
                          {"per_year", result.years}};
}

// Histogram CSV of the cumulative distributions, one row per bin and series.
inline void write_density_csv(std::ostream& os, const SimulationResult& result) {
    os << "year,bin_left,bin_right,count,series\n";
    for (const YearSummary& ys : result.years) {
        for (const HistBin& b : ys.original_bins)
            os << ys.year << ',' << b.left << ',' << b.right << ',' << b.count << ",original\n";
        for (const HistBin& b : ys.net_bins)
            os << ys.year << ',' << b.left << ',' << b.right << ',' << b.count << ",net\n";
    }
}

}  // namespace epswap
