#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "epswap/instrument.hpp"
#include "epswap/portfolio.hpp"

namespace epswap {

// Named contracts evaluated side by side in a backtest.
struct ProductSet {
    std::vector<std::pair<std::string, EpsSpec>> products;

    // The six reference buffer/floor contracts with fee rates calibrated to
    // one option-chain snapshot.
    static ProductSet defaults();
};

inline ProductSet ProductSet::defaults() {
    ProductSet set;
    set.products = {
        {"Buffer1", build_buffer(-0.05, 0.05, 0.5, 0.63)},
        {"Buffer2", build_buffer(-0.05, 0.10, 0.7, 1.51)},
        {"Buffer3", build_buffer(-0.10, 0.10, 0.7, 1.21)},
        {"Floor1", build_floor(-0.10, 0.10, 0.5, 0.52)},
        {"Floor2", build_floor(-0.10, 0.10, 0.7, 0.73)},
        {"Floor3", build_floor(-0.15, 0.10, 0.7, 0.98)},
    };
    return set;
}

inline void validate(const ProductSet& set) {
    for (std::size_t i = 0; i < set.products.size(); ++i) {
        if (set.products[i].first.empty()) throw ValidationError("product name must be non-empty");
        for (std::size_t k = i + 1; k < set.products.size(); ++k)
            if (set.products[i].first == set.products[k].first)
                throw ValidationError("duplicate product name '" + set.products[i].first + "'");
        validate(set.products[i].second);
    }
}

// Order-statistic quantile with linear interpolation at h = (n - 1) p (the
// common "type 7"); q(0) is the sample minimum, q(1) the maximum.
inline std::vector<double> empirical_quantiles(std::span<const double> sample,
                                               std::span<const double> probs) {
    if (sample.empty()) throw DomainError("quantiles of an empty sample");
    std::vector<double> sorted(sample.begin(), sample.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> out;
    out.reserve(probs.size());
    for (double p : probs) {
        if (!(p >= 0.0 && p <= 1.0)) throw DomainError("quantile probability outside [0, 1]");
        const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
        const std::size_t lo = static_cast<std::size_t>(h);
        const double frac = h - static_cast<double>(lo);
        if (frac == 0.0 || lo + 1 >= sorted.size()) {
            out.push_back(sorted[lo]);
        } else {
            out.push_back(sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]));
        }
    }
    return out;
}

// Element-wise net returns for every product.
inline std::vector<std::pair<std::string, std::vector<double>>> apply_product_set(
    std::span<const double> returns, const ProductSet& set) {
    validate(set);
    for (std::size_t i = 0; i < returns.size(); ++i) {
        if (!(returns[i] >= -1.0))
            throw DomainError("return at index " + std::to_string(i) + " is below -1");
    }
    std::vector<std::pair<std::string, std::vector<double>>> out;
    out.reserve(set.products.size());
    for (const auto& [name, spec] : set.products) {
        std::vector<double> net;
        net.reserve(returns.size());
        for (double r : returns) net.push_back(net_return(spec, r));
        out.emplace_back(name, std::move(net));
    }
    return out;
}

inline std::string quantile_label(double p) {
    if (p == 0.0) return "Min";
    if (p == 1.0) return "Max";
    std::ostringstream os;
    os << p * 100.0 << '%';
    return os.str();
}

struct QuantileReport {
    std::vector<double> probs;
    std::vector<std::string> cases;          // "Original" first, then product names
    std::vector<std::vector<double>> rows;   // [case][prob]

    std::string to_csv() const {
        std::ostringstream os;
        os << "Case";
        for (double p : probs) os << ',' << quantile_label(p);
        os << '\n';
        os.precision(10);
        for (std::size_t r = 0; r < cases.size(); ++r) {
            os << cases[r];
            for (double v : rows[r]) os << ',' << v;
            os << '\n';
        }
        return os.str();
    }
};

inline void to_json(nlohmann::json& j, const QuantileReport& report) {
    nlohmann::json rows = nlohmann::json::object();
    for (std::size_t r = 0; r < report.cases.size(); ++r) rows[report.cases[r]] = report.rows[r];
    nlohmann::json labels = nlohmann::json::array();
    for (double p : report.probs) labels.push_back(quantile_label(p));
    j = nlohmann::json{{"probs", report.probs}, {"labels", labels}, {"rows", rows}};
}

enum class DensityKind { kde, histogram };

struct BacktestConfig {
    std::size_t window = 252;          // trading-day lag of the trailing return
    std::optional<Date> start_from;    // filter on the window START date
    std::optional<Date> start_to;
    std::vector<double> probs = {0.0, 0.05, 0.10, 0.25, 0.50, 0.75, 0.90, 1.0};
    DensityKind density = DensityKind::kde;
    int density_points = 201;          // KDE evaluation grid
    int histogram_bins = 30;
};

struct DensityPoint {
    std::string series;
    double x = 0.0;
    double density = 0.0;
};

// Gaussian kernel density on an even grid with Silverman's bandwidth
// 0.9 min(sd, iqr/1.34) n^{-1/5}.  Degenerate samples fall back to a narrow
// fixed bandwidth so the output stays finite.
inline std::vector<std::pair<double, double>> kde_density(std::span<const double> sample,
                                                          int grid_points = 201) {
    if (sample.empty()) throw DomainError("density of an empty sample");
    if (grid_points < 2) throw ValidationError("density grid needs at least 2 points");
    const double n = static_cast<double>(sample.size());
    double mean = 0.0;
    for (double x : sample) mean += x;
    mean /= n;
    double ss = 0.0;
    for (double x : sample) ss += (x - mean) * (x - mean);
    const double sd = sample.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    const std::vector<double> iqr_probs = {0.25, 0.75};
    const std::vector<double> q = empirical_quantiles(sample, iqr_probs);
    const double iqr = q[1] - q[0];
    double spread = sd;
    if (iqr > 0.0) spread = std::min(spread > 0.0 ? spread : iqr, iqr / 1.34);
    double bandwidth = 0.9 * spread * std::pow(n, -0.2);
    if (!(bandwidth > 0.0)) bandwidth = 1e-6;

    double lo = sample[0], hi = sample[0];
    for (double x : sample) {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
    lo -= 3.0 * bandwidth;
    hi += 3.0 * bandwidth;
    const double step = (hi - lo) / (grid_points - 1);
    const double norm = 1.0 / (n * bandwidth * std::sqrt(2.0 * std::numbers::pi));

    std::vector<std::pair<double, double>> out;
    out.reserve(static_cast<std::size_t>(grid_points));
    for (int g = 0; g < grid_points; ++g) {
        const double x = lo + g * step;
        double density = 0.0;
        for (double xi : sample) {
            const double z = (x - xi) / bandwidth;
            density += std::exp(-0.5 * z * z);
        }
        out.emplace_back(x, density * norm);
    }
    return out;
}

struct BacktestResult {
    std::size_t n_returns = 0;                 // trailing returns after the subset filter
    std::vector<std::pair<std::string, std::vector<double>>> samples;  // Original first
    QuantileReport report;
    std::vector<DensityPoint> densities;
};

// Full pipeline: trailing returns, optional start-date subset, product
// transforms, quantile rows, and figure-ready densities.
inline BacktestResult build_report(const PriceSeries& series, const BacktestConfig& cfg,
                                   const ProductSet& set) {
    validate(set);
    const std::vector<TrailingReturn> trailing = trailing_returns(series, cfg.window);
    std::vector<double> original;
    original.reserve(trailing.size());
    for (const TrailingReturn& tr : trailing) {
        if (cfg.start_from && tr.start < *cfg.start_from) continue;
        if (cfg.start_to && *cfg.start_to < tr.start) continue;
        original.push_back(tr.value);
    }
    if (original.empty()) {
        std::ostringstream msg;
        msg << "no trailing returns with window start in ["
            << (cfg.start_from ? cfg.start_from->iso() : "-inf") << ", "
            << (cfg.start_to ? cfg.start_to->iso() : "+inf") << "]";
        throw DataError(msg.str());
    }

    BacktestResult result;
    result.n_returns = original.size();
    result.samples.emplace_back("Original", original);
    for (auto& [name, net] : apply_product_set(original, set))
        result.samples.emplace_back(name, std::move(net));

    result.report.probs = cfg.probs;
    for (const auto& [name, sample] : result.samples) {
        result.report.cases.push_back(name);
        result.report.rows.push_back(empirical_quantiles(sample, cfg.probs));
    }

    for (const auto& [name, sample] : result.samples) {
        if (cfg.density == DensityKind::kde) {
            for (const auto& [x, d] : kde_density(sample, cfg.density_points))
                result.densities.push_back({name, x, d});
        } else {
            // histogram normalized to a density
            double lo = sample[0], hi = sample[0];
            for (double x : sample) {
                lo = std::min(lo, x);
                hi = std::max(hi, x);
            }
            const int bins = std::max(cfg.histogram_bins, 1);
            if (!(hi > lo)) {
                result.densities.push_back({name, lo, 1.0});
                continue;
            }
            const double width = (hi - lo) / bins;
            std::vector<int> counts(static_cast<std::size_t>(bins), 0);
            for (double x : sample) {
                int b = static_cast<int>((x - lo) / width);
                b = std::clamp(b, 0, bins - 1);
                ++counts[static_cast<std::size_t>(b)];
            }
            for (int b = 0; b < bins; ++b) {
                const double center = lo + (b + 0.5) * width;
                const double density = counts[static_cast<std::size_t>(b)] /
                                       (static_cast<double>(sample.size()) * width);
                result.densities.push_back({name, center, density});
            }
        }
    }
    return result;
}

inline void write_density_csv(std::ostream& os, const std::vector<DensityPoint>& densities) {
    os << "series,x,density\n";
    os.precision(10);
    for (const DensityPoint& p : densities) os << p.series << ',' << p.x << ',' << p.density << '\n';
}

}  // namespace epswap
