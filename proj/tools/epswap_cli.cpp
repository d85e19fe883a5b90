// Command-line front door for the equity protection swap toolkit.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "epswap/epswap.hpp"

namespace {

using nlohmann::json;

// ---------------------------------------------------------------------------
// small helpers

// Fractions may be written as decimals ("0.05", "-0.05") or percents
// ("5%", "-5%"); files always store decimals.
double parse_fraction(const std::string& text) {
    std::string t = epswap::detail::trim(text);
    bool percent = false;
    if (!t.empty() && t.back() == '%') {
        percent = true;
        t.pop_back();
        t = epswap::detail::trim(t);
    }
    try {
        std::size_t used = 0;
        double value = std::stod(t, &used);
        if (used != t.size()) throw std::invalid_argument(t);
        return percent ? value / 100.0 : value;
    } catch (const std::exception&) {
        throw epswap::ValidationError("cannot parse fraction '" + text + "'");
    }
}

epswap::PriceSide parse_side(const std::string& side) {
    if (side == "bid") return epswap::PriceSide::bid;
    if (side == "ask") return epswap::PriceSide::ask;
    if (side == "mid") return epswap::PriceSide::mid;
    throw epswap::ValidationError("price side must be bid, mid or ask");
}

int exit_code_for(epswap::Error::Kind kind) {
    using Kind = epswap::Error::Kind;
    switch (kind) {
        case Kind::validation: return 2;
        case Kind::domain: return 3;
        case Kind::data: return 4;
        case Kind::coverage: return 5;
        case Kind::no_solution: return 6;
    }
    return 70;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw epswap::DataError("cannot write file '" + path.string() + "'");
    out << text;
    if (!out) throw epswap::DataError("write failed for '" + path.string() + "'");
}

struct OutputOptions {
    std::string out;
    std::string format = "json";
};

void emit_artifact(const OutputOptions& output, const json& doc, const std::string& csv) {
    if (output.out.empty()) return;
    if (output.format == "csv") {
        write_text(output.out, csv);
    } else {
        write_text(output.out, doc.dump(2) + "\n");
    }
}

// JSON flavor of a CLI11 config file: top-level keys are global options,
// nested objects address subcommands.
class JsonConfig : public CLI::Config {
public:
    std::string to_config(const CLI::App*, bool, bool, std::string) const override { return "{}\n"; }

    std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
        json j;
        try {
            input >> j;
        } catch (const json::exception& e) {
            throw CLI::FileError(std::string("config is not valid JSON: ") + e.what());
        }
        std::vector<CLI::ConfigItem> items;
        flatten({}, j, items);
        return items;
    }

private:
    static std::string scalar(const json& value) {
        return value.is_string() ? value.get<std::string>() : value.dump();
    }

    static void flatten(std::vector<std::string> parents, const json& j,
                        std::vector<CLI::ConfigItem>& items) {
        for (const auto& [key, value] : j.items()) {
            if (value.is_object()) {
                auto nested = parents;
                nested.push_back(key);
                flatten(nested, value, items);
            } else {
                CLI::ConfigItem item;
                item.parents = parents;
                item.name = key;
                if (value.is_array()) {
                    for (const auto& element : value) item.inputs.push_back(scalar(element));
                } else {
                    item.inputs.push_back(scalar(value));
                }
                items.push_back(item);
            }
        }
    }
};

// ---------------------------------------------------------------------------
// spec input: either --spec file.json or inline builder flags

struct SpecOptions {
    std::string spec_path;
    bool buffer = false;
    bool floor = false;
    std::string l1, g1, p, f;
    std::string notional = "1";
};

void add_spec_options(CLI::App* sub, SpecOptions& opts) {
    sub->add_option("--spec", opts.spec_path, "contract spec JSON file");
    sub->add_flag("--buffer", opts.buffer, "inline buffer contract");
    sub->add_flag("--floor", opts.floor, "inline floor contract");
    sub->add_option("--l1", opts.l1, "loss threshold, e.g. -0.05 or -5%");
    sub->add_option("--g1", opts.g1, "gain threshold, e.g. 0.10 or 10%");
    sub->add_option("--p", opts.p, "protection rate");
    sub->add_option("--f", opts.f, "fee rate (may be omitted when solving for it)");
    sub->add_option("--notional", opts.notional, "notional, default 1");
}

epswap::EpsSpec spec_from_options(const SpecOptions& opts, double maturity_years) {
    if (!opts.spec_path.empty()) return epswap::load_spec_json(opts.spec_path);
    if (opts.buffer == opts.floor)
        throw epswap::ValidationError("give either --spec or exactly one of --buffer/--floor");
    if (opts.l1.empty() || opts.g1.empty() || opts.p.empty())
        throw epswap::ValidationError("inline contracts need --l1, --g1 and --p");
    const double l1 = parse_fraction(opts.l1);
    const double g1 = parse_fraction(opts.g1);
    const double p = parse_fraction(opts.p);
    const double f = opts.f.empty() ? 0.0 : parse_fraction(opts.f);
    const double notional = parse_fraction(opts.notional);
    if (opts.buffer)
        return epswap::build_generic({l1}, {g1}, {0.0, p}, {0.0, f}, maturity_years, notional);
    return epswap::build_generic({l1}, {g1}, {p, 0.0}, {0.0, f}, maturity_years, notional);
}

struct MarketParamOptions {
    double r = 0.0;
    double kappa = 0.0;
    double sigma = 0.0;
    double maturity = 0.0;
    CLI::Option* r_opt = nullptr;
    CLI::Option* sigma_opt = nullptr;
    CLI::Option* maturity_opt = nullptr;
};

void add_market_params(CLI::App* sub, MarketParamOptions& opts) {
    opts.r_opt = sub->add_option("--r", opts.r, "risk-free rate, continuous compounding");
    sub->add_option("--kappa", opts.kappa, "dividend yield, default 0");
    opts.sigma_opt = sub->add_option("--sigma", opts.sigma, "volatility");
    opts.maturity_opt = sub->add_option("--T", opts.maturity, "maturity in years");
}

epswap::BsParams bs_params_from(const MarketParamOptions& opts, double spec_maturity) {
    if (!opts.r_opt->count() || !opts.sigma_opt->count())
        throw epswap::ValidationError("model pricing needs --r and --sigma");
    epswap::BsParams p;
    p.rate = opts.r;
    p.dividend_yield = opts.kappa;
    p.volatility = opts.sigma;
    p.maturity_years = opts.maturity_opt->count() ? opts.maturity : spec_maturity;
    return p;
}

epswap::ProductSet products_from(const std::string& arg) {
    if (arg.empty() || arg == "default") return epswap::ProductSet::defaults();
    std::ifstream in(arg);
    if (!in) throw epswap::DataError("cannot open file '" + arg + "'");
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw epswap::DataError("cannot parse '" + arg + "': " + e.what());
    }
    epswap::ProductSet set;
    try {
        for (const auto& entry : doc) {
            set.products.emplace_back(entry.at("name").get<std::string>(),
                                      entry.at("spec").get<epswap::EpsSpec>());
        }
    } catch (const json::exception& e) {
        throw epswap::DataError("bad product set document: " + std::string(e.what()));
    }
    epswap::validate(set);
    return set;
}

std::vector<epswap::JumpEvent> parse_jumps(const std::vector<std::string>& args) {
    std::vector<epswap::JumpEvent> jumps;
    for (const std::string& arg : args) {
        const auto colon = arg.find(':');
        if (colon == std::string::npos)
            throw epswap::ValidationError("jump must be step:factor, got '" + arg + "'");
        try {
            jumps.push_back({std::stoi(arg.substr(0, colon)), std::stod(arg.substr(colon + 1))});
        } catch (const std::exception&) {
            throw epswap::ValidationError("jump must be step:factor, got '" + arg + "'");
        }
    }
    return jumps;
}

// ---------------------------------------------------------------------------
// subcommand bodies

int run_price_bs(const SpecOptions& spec_opts, const MarketParamOptions& market,
                 const OutputOptions& output) {
    const epswap::EpsSpec spec =
        spec_from_options(spec_opts, market.maturity_opt->count() ? market.maturity : 1.0);
    const epswap::BsParams params = bs_params_from(market, spec.maturity_years);
    const double premium = epswap::eps_premium_closed_form(spec, params);
    std::printf("%.6f\n", premium);
    json doc = {{"command", "price-bs"},
                {"premium", premium},
                {"spec", spec},
                {"params",
                 {{"r", params.rate},
                  {"kappa", params.dividend_yield},
                  {"sigma", params.volatility},
                  {"T", params.maturity_years}}}};
    std::ostringstream csv;
    csv.precision(12);
    csv << "metric,value\npremium," << premium << '\n';
    emit_artifact(output, doc, csv.str());
    return 0;
}

int run_solve_fee(const SpecOptions& spec_opts, const MarketParamOptions& market,
                  const std::string& quotes_path, const std::string& side, double tolerance,
                  std::optional<std::size_t> fee_index, const OutputOptions& output) {
    const epswap::EpsSpec spec =
        spec_from_options(spec_opts, market.maturity_opt->count() ? market.maturity : 1.0);
    epswap::FeeSolution sol;
    if (!quotes_path.empty()) {
        const epswap::QuoteBoard board = epswap::load_quote_csv(quotes_path);
        sol = epswap::solve_fee_market(spec, board, parse_side(side), fee_index, tolerance);
    } else {
        const epswap::BsParams params = bs_params_from(market, spec.maturity_years);
        sol = epswap::solve_fee_bs(spec, params, fee_index);
    }
    std::printf("%.6f\n", sol.fee_rate);
    if (sol.above_one) std::fprintf(stderr, "warning: solved fee rate exceeds 1\n");
    json doc = {{"command", "solve-fee"},
                {"fee_rate", sol.fee_rate},
                {"fee_index", sol.fee_index},
                {"premium_residual", sol.premium_residual},
                {"above_one", sol.above_one}};
    if (sol.fee_rate >= 0.0)
        doc["spec"] = epswap::with_fee_rate(spec, sol.fee_index, sol.fee_rate);
    std::ostringstream csv;
    csv.precision(12);
    csv << "metric,value\nfee_rate," << sol.fee_rate << "\npremium_residual,"
        << sol.premium_residual << "\nabove_one," << (sol.above_one ? 1 : 0) << '\n';
    emit_artifact(output, doc, csv.str());
    return 0;
}

int run_hedge(const SpecOptions& spec_opts, double s0, const OutputOptions& output) {
    const epswap::EpsSpec spec = spec_from_options(spec_opts, 1.0);
    const epswap::HedgePortfolio hedge = epswap::synthesize_hedge(spec, s0);
    std::printf("%zu positions at spot %.6f\n", hedge.positions.size(), s0);
    const json doc = hedge.positions;  // ticket list
    std::ostringstream csv;
    csv.precision(12);
    csv << "kind,strike,quantity\n";
    for (const auto& pos : hedge.positions)
        csv << epswap::to_string(pos.kind) << ',' << pos.strike << ',' << pos.quantity << '\n';
    emit_artifact(output, doc, csv.str());
    return 0;
}

int run_premium_market(const SpecOptions& spec_opts, const std::string& quotes_path,
                       const std::string& side, double tolerance, const OutputOptions& output) {
    const epswap::EpsSpec spec = spec_from_options(spec_opts, 1.0);
    const epswap::QuoteBoard board = epswap::load_quote_csv(quotes_path);
    const epswap::MarketPremium result =
        epswap::premium_from_quotes(spec, board, parse_side(side), tolerance);
    std::printf("%.6f\n", result.premium);
    for (const epswap::LegSnap& leg : result.legs) {
        std::printf("%s qty %.8f strike %.2f -> quoted %.2f (moneyness %.4f -> %.4f) price %.4f\n",
                    epswap::to_string(leg.kind), leg.quantity, leg.theoretical_strike,
                    leg.quoted_strike, leg.target_moneyness, leg.quoted_moneyness, leg.price_used);
    }
    json doc = {{"command", "premium-market"},
                {"premium", result.premium},
                {"side", side},
                {"legs", result.legs}};
    std::ostringstream csv;
    csv.precision(12);
    csv << "kind,quantity,theoretical_strike,quoted_strike,price_used\n";
    for (const epswap::LegSnap& leg : result.legs)
        csv << epswap::to_string(leg.kind) << ',' << leg.quantity << ',' << leg.theoretical_strike
            << ',' << leg.quoted_strike << ',' << leg.price_used << '\n';
    emit_artifact(output, doc, csv.str());
    return 0;
}

int run_simulate(const SpecOptions& spec_opts, const MarketParamOptions& market,
                 const epswap::SimConfig& cfg, const std::string& density_out,
                 const std::string& paths_out, const OutputOptions& output) {
    const epswap::EpsSpec spec = spec_from_options(spec_opts, 1.0);
    epswap::BsParams params = bs_params_from(market, 1.0);
    const epswap::SimulationResult result = epswap::run_forward_simulation(spec, cfg, params);
    const epswap::YearSummary& last = result.years.back();
    std::printf("%d years x %d paths: final-year mean original %.6f net %.6f\n", cfg.years,
                cfg.n_paths, last.original_cumulative.mean, last.net_cumulative.mean);

    json doc = epswap::summary_json(result);
    std::ostringstream csv;
    csv.precision(12);
    csv << "year,series,mean,stddev,min,max\n";
    for (const epswap::YearSummary& y : result.years) {
        csv << y.year << ",original," << y.original_cumulative.mean << ','
            << y.original_cumulative.stddev << ',' << y.original_cumulative.min << ','
            << y.original_cumulative.max << '\n';
        csv << y.year << ",net," << y.net_cumulative.mean << ',' << y.net_cumulative.stddev << ','
            << y.net_cumulative.min << ',' << y.net_cumulative.max << '\n';
    }
    emit_artifact(output, doc, csv.str());
    if (!density_out.empty()) {
        std::ostringstream os;
        epswap::write_density_csv(os, result);
        write_text(density_out, os.str());
    }
    if (!paths_out.empty()) {
        epswap::BsParams horizon = params;
        horizon.maturity_years = cfg.years;
        const epswap::PathGrid grid = epswap::gbm_paths(
            1.0, horizon, cfg.years * cfg.steps_per_year, cfg.n_paths, cfg.seed, cfg.jumps);
        std::ostringstream os;
        epswap::write_paths_csv(os, grid);
        write_text(paths_out, os.str());
    }
    return 0;
}

int run_backtest(const std::string& prices_path, const epswap::BacktestConfig& cfg,
                 const std::string& products_arg, const std::string& density_out,
                 const OutputOptions& output) {
    const epswap::PriceSeries series = epswap::load_price_csv(prices_path);
    const epswap::ProductSet products = products_from(products_arg);
    const epswap::BacktestResult result = epswap::build_report(series, cfg, products);
    std::printf("%zu trailing returns, %zu cases\n", result.n_returns, result.report.cases.size());

    const json doc = {{"command", "backtest"},
                      {"n_returns", result.n_returns},
                      {"report", result.report}};
    emit_artifact(output, doc, result.report.to_csv());
    if (!density_out.empty()) {
        std::ostringstream os;
        epswap::write_density_csv(os, result.densities);
        write_text(density_out, os.str());
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"equity protection swaps: pricing, hedging, simulation, backtesting"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may appear after the subcommand
    app.config_formatter(std::make_shared<JsonConfig>());
    app.set_config("--config", "", "JSON config file mirroring the flags");

    OutputOptions output;
    app.add_option("--out", output.out, "artifact output path")->capture_default_str();
    app.add_option("--format", output.format, "artifact format: json or csv")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();
    std::uint64_t seed = 42;
    app.add_option("--seed", seed, "random seed for simulation commands");
    int threads = 1;
    app.add_option("--threads", threads,
                   "reserved; outputs are deterministic and single-threaded today");

    // price-bs
    auto* price_cmd = app.add_subcommand("price-bs", "closed-form fair premium per unit notional");
    SpecOptions price_spec;
    MarketParamOptions price_market;
    add_spec_options(price_cmd, price_spec);
    add_market_params(price_cmd, price_market);

    // solve-fee
    auto* solve_cmd = app.add_subcommand("solve-fee", "fee rate that makes the premium zero");
    SpecOptions solve_spec;
    MarketParamOptions solve_market;
    add_spec_options(solve_cmd, solve_spec);
    add_market_params(solve_cmd, solve_market);
    std::string solve_quotes;
    std::string solve_side = "mid";
    double solve_tolerance = 0.02;
    long long solve_fee_index = -1;
    solve_cmd->add_option("--quotes", solve_quotes, "option chain CSV (market mode)");
    solve_cmd->add_option("--side", solve_side, "bid, mid or ask")->capture_default_str();
    solve_cmd->add_option("--tolerance", solve_tolerance, "moneyness snapping tolerance")
        ->capture_default_str();
    solve_cmd->add_option("--fee-index", solve_fee_index,
                          "0-based index of the unknown fee rate; default: last");

    // hedge
    auto* hedge_cmd = app.add_subcommand("hedge", "synthesize the static option hedge");
    SpecOptions hedge_spec;
    add_spec_options(hedge_cmd, hedge_spec);
    double hedge_s0 = 0.0;
    hedge_cmd->add_option("--s0", hedge_s0, "inception spot")->required();

    // premium-market
    auto* market_cmd = app.add_subcommand("premium-market", "premium priced off an option chain");
    SpecOptions market_spec;
    add_spec_options(market_cmd, market_spec);
    std::string market_quotes;
    std::string market_side = "mid";
    double market_tolerance = 0.02;
    market_cmd->add_option("--quotes", market_quotes, "option chain CSV")->required();
    market_cmd->add_option("--side", market_side, "bid, mid or ask")->capture_default_str();
    market_cmd->add_option("--tolerance", market_tolerance, "moneyness snapping tolerance")
        ->capture_default_str();

    // simulate
    auto* sim_cmd = app.add_subcommand("simulate", "roll annual contracts over simulated paths");
    SpecOptions sim_spec;
    MarketParamOptions sim_market;
    add_spec_options(sim_cmd, sim_spec);
    add_market_params(sim_cmd, sim_market);
    epswap::SimConfig sim_cfg;
    std::vector<std::string> sim_jumps;
    std::string sim_aggregation = "additive";
    std::string sim_density_out, sim_paths_out;
    sim_cmd->add_option("--paths", sim_cfg.n_paths, "number of paths")->capture_default_str();
    sim_cmd->add_option("--years", sim_cfg.years, "years simulated")->capture_default_str();
    sim_cmd->add_option("--steps-per-year", sim_cfg.steps_per_year, "steps per year")
        ->capture_default_str();
    sim_cmd->add_option("--jump", sim_jumps, "down-tick as step:factor, repeatable");
    sim_cmd->add_option("--aggregation", sim_aggregation, "additive or compounded")
        ->check(CLI::IsMember({"additive", "compounded"}))
        ->capture_default_str();
    sim_cmd->add_option("--bins", sim_cfg.histogram_bins, "histogram bins")->capture_default_str();
    sim_cmd->add_option("--density-out", sim_density_out, "density CSV output path");
    sim_cmd->add_option("--paths-out", sim_paths_out, "simulated path grid CSV output path");

    // backtest
    auto* back_cmd = app.add_subcommand("backtest", "historical trailing-return evaluation");
    std::string back_prices, back_products = "default", back_density_out;
    std::string back_start_from, back_start_to, back_density_kind = "kde";
    epswap::BacktestConfig back_cfg;
    back_cmd->add_option("--prices", back_prices, "index close CSV (date,close)")->required();
    back_cmd->add_option("--window", back_cfg.window, "trailing window in trading days")
        ->capture_default_str();
    back_cmd->add_option("--subset-start", back_start_from,
                         "keep windows starting on or after this date");
    back_cmd->add_option("--subset-end", back_start_to,
                         "keep windows starting on or before this date");
    back_cmd->add_option("--products", back_products, "'default' or a product set JSON file")
        ->capture_default_str();
    back_cmd->add_option("--density", back_density_kind, "kde or histogram")
        ->check(CLI::IsMember({"kde", "histogram"}))
        ->capture_default_str();
    back_cmd->add_option("--density-out", back_density_out, "density CSV output path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (*price_cmd) return run_price_bs(price_spec, price_market, output);
        if (*solve_cmd) {
            std::optional<std::size_t> fee_index;
            if (solve_fee_index >= 0) fee_index = static_cast<std::size_t>(solve_fee_index);
            return run_solve_fee(solve_spec, solve_market, solve_quotes, solve_side,
                                 solve_tolerance, fee_index, output);
        }
        if (*hedge_cmd) return run_hedge(hedge_spec, hedge_s0, output);
        if (*market_cmd)
            return run_premium_market(market_spec, market_quotes, market_side, market_tolerance,
                                      output);
        if (*sim_cmd) {
            sim_cfg.seed = seed;
            sim_cfg.jumps = parse_jumps(sim_jumps);
            sim_cfg.aggregation = sim_aggregation == "compounded" ? epswap::Aggregation::compounded
                                                                  : epswap::Aggregation::additive;
            return run_simulate(sim_spec, sim_market, sim_cfg, sim_density_out, sim_paths_out,
                                output);
        }
        if (*back_cmd) {
            if (!back_start_from.empty()) back_cfg.start_from = epswap::Date::parse(back_start_from);
            if (!back_start_to.empty()) back_cfg.start_to = epswap::Date::parse(back_start_to);
            back_cfg.density = back_density_kind == "histogram" ? epswap::DensityKind::histogram
                                                                : epswap::DensityKind::kde;
            return run_backtest(back_prices, back_cfg, back_products, back_density_out, output);
        }
    } catch (const epswap::Error& e) {
        std::fprintf(stderr, "error[%s]: %s\n", e.kind_name(), e.what());
        return exit_code_for(e.kind());
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error[internal]: %s\n", e.what());
        return 70;
    }
    return 0;
}
