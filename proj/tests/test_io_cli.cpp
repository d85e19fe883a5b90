#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "epswap/fair_fee.hpp"
#include "epswap/io.hpp"

using namespace epswap;
using Catch::Matchers::WithinAbs;

namespace {

namespace fs = std::filesystem;

fs::path data_file(const std::string& name) { return fs::path(EPSWAP_TEST_DATA_DIR) / name; }

fs::path temp_file(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "epswap_tests";
    fs::create_directories(dir);
    return dir / name;
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
}

struct CliResult {
    int exit_code = -1;
    std::string output;
};

CliResult run_cli(const std::string& args) {
    const std::string cmd = std::string(EPSWAP_CLI_PATH) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    CliResult result;
    char buf[512];
    while (std::fgets(buf, sizeof buf, pipe) != nullptr) result.output += buf;
    const int status = pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

std::string buffer9_spec_path() {
    const fs::path p = temp_file("buffer9.json");
    write_file(p, nlohmann::json(build_buffer(-0.05, 0.10, 0.8, 0.8)).dump());
    return p.string();
}

}  // namespace

TEST_CASE("dates parse in both supported shapes") {
    CHECK(Date::parse("2022-02-02") == Date{2022, 2, 2});
    CHECK(Date::parse("2023/02/17") == Date{2023, 2, 17});
    CHECK(Date::parse("2022-02-02").iso() == "2022-02-02");
    CHECK(Date{2021, 5, 3} < Date{2021, 12, 23});
    CHECK_THROWS_AS(Date::parse("02-02-2022x"), DataError);
    CHECK_THROWS_AS(Date::parse("2022-13-01"), DataError);
    CHECK_THROWS_AS(Date::parse("20220202"), DataError);
}

TEST_CASE("price csv loads and validates") {
    const PriceSeries series = load_price_csv(data_file("closes_small.csv"));
    REQUIRE(series.size() == 10);
    CHECK(series.points.front().date == Date{2020, 1, 2});
    CHECK_THAT(series.points.front().close, WithinAbs(3257.85, 1e-9));

    const fs::path one = temp_file("one_row.csv");
    write_file(one, "date,close\n2020-01-02,3257.85\n");
    CHECK(load_price_csv(one).size() == 1);

    const fs::path descending = temp_file("descending.csv");
    write_file(descending, "date,close\n2020-01-03,100\n2020-01-02,101\n");
    CHECK_THROWS_MATCHES(load_price_csv(descending), DataError,
                         Catch::Matchers::MessageMatches(
                             Catch::Matchers::ContainsSubstring("strictly increasing")));

    const fs::path zero_close = temp_file("zero_close.csv");
    write_file(zero_close, "date,close\n2020-01-02,0\n");
    CHECK_THROWS_MATCHES(load_price_csv(zero_close), DataError,
                         Catch::Matchers::MessageMatches(
                             Catch::Matchers::ContainsSubstring("nonpositive close")));

    const fs::path ragged = temp_file("ragged.csv");
    write_file(ragged, "date,close\n2020-01-02,1,2\n");
    CHECK_THROWS_MATCHES(load_price_csv(ragged), DataError,
                         Catch::Matchers::MessageMatches(
                             Catch::Matchers::ContainsSubstring("line 2")));

    const fs::path bad_header = temp_file("bad_header.csv");
    write_file(bad_header, "day,price\n2020-01-02,1\n");
    CHECK_THROWS_AS(load_price_csv(bad_header), DataError);
}

TEST_CASE("quote csv loads the option-chain fixture") {
    const QuoteBoard board = load_quote_csv(data_file("spx_chain_2022-02-02.csv"));
    REQUIRE(board.quotes.size() == 7);
    CHECK(board.spot() == 4576.8);
    CHECK(board.quotes[0].kind == OptionKind::put);
    CHECK(board.quotes[0].strike == 3900.0);
    CHECK_THAT(board.quotes[0].mid(), WithinAbs(186.2, 1e-12));
    CHECK(board.quotes[6].kind == OptionKind::call);
    CHECK(board.quotes[0].quote_date == Date{2022, 2, 2});
    CHECK(board.quotes[0].expiration == Date{2023, 2, 17});

    const fs::path straddle = temp_file("straddle.csv");
    write_file(straddle,
               "quote_date,expiration,strike,type,bid,ask,spot\n"
               "2022/02/02,2023/02/17,4575,Straddle,1,2,4576.8\n");
    CHECK_THROWS_MATCHES(load_quote_csv(straddle), DataError,
                         Catch::Matchers::MessageMatches(
                             Catch::Matchers::ContainsSubstring("Straddle")));

    const fs::path empty = temp_file("empty.csv");
    write_file(empty, "");
    CHECK_THROWS_AS(load_quote_csv(empty), DataError);

    const fs::path crossed = temp_file("crossed.csv");
    write_file(crossed,
               "quote_date,expiration,strike,type,bid,ask,spot\n"
               "2022/02/02,2023/02/17,4575,Put,3,2,4576.8\n");
    CHECK_THROWS_MATCHES(load_quote_csv(crossed), DataError,
                         Catch::Matchers::MessageMatches(
                             Catch::Matchers::ContainsSubstring("bid exceeds ask")));

    const fs::path mixed = temp_file("mixed_expiry.csv");
    write_file(mixed,
               "quote_date,expiration,strike,type,bid,ask,spot\n"
               "2022/02/02,2023/02/17,4575,Put,1,2,4576.8\n"
               "2022/02/02,2023/03/17,4600,Put,1,2,4576.8\n");
    CHECK_THROWS_MATCHES(load_quote_csv(mixed), DataError,
                         Catch::Matchers::MessageMatches(
                             Catch::Matchers::ContainsSubstring("mixed expirations")));
}

TEST_CASE("cli prices the reference buffer contract") {
    const CliResult r = run_cli("price-bs --spec " + buffer9_spec_path() +
                                " --r 0.015 --sigma 0.2 --kappa 0 --T 1");
    CHECK(r.exit_code == 0);
    CHECK(r.output.rfind("0.001168\n", 0) == 0);
}

TEST_CASE("cli accepts inline contracts with percent sugar") {
    const CliResult r = run_cli(
        "price-bs --buffer --l1 -5% --g1 10% --p 0.8 --f 0.8 --r 0.015 --sigma 0.2 --T 1");
    CHECK(r.exit_code == 0);
    CHECK(r.output.rfind("0.001168\n", 0) == 0);
}

TEST_CASE("cli solves the analytic fair fee") {
    const fs::path open_fee = temp_file("buffer_open_fee.json");
    write_file(open_fee, nlohmann::json(build_generic({-0.05}, {0.10}, {0.0, 0.8}, {0.0, 0.0})).dump());
    const CliResult r =
        run_cli("solve-fee --spec " + open_fee.string() + " --r 0.015 --sigma 0.2");
    CHECK(r.exit_code == 0);
    CHECK(r.output.rfind("0.824464\n", 0) == 0);
}

TEST_CASE("cli solve-fee exports a reloadable spec") {
    const fs::path out = temp_file("solved.json");
    const CliResult r = run_cli("--out " + out.string() + " solve-fee --buffer --l1 -5% --g1 10%" +
                                " --p 0.8 --r 0.015 --sigma 0.2");
    REQUIRE(r.exit_code == 0);
    std::ifstream in(out);
    REQUIRE(in.good());
    nlohmann::json doc;
    in >> doc;
    const EpsSpec solved = doc.at("spec").get<EpsSpec>();
    CHECK(solved.fee_rates[1] == doc.at("fee_rate").get<double>());
    const EpsSpec expected =
        with_fee_rate(build_generic({-0.05}, {0.10}, {0.0, 0.8}, {0.0, 0.0}), 1,
                      doc.at("fee_rate").get<double>());
    CHECK(solved == expected);
}

TEST_CASE("cli solves market fees off the fixture board") {
    const CliResult r = run_cli("solve-fee --buffer --l1 -5% --g1 5% --p 0.5 --quotes " +
                                data_file("spx_chain_2022-02-02.csv").string() + " --side mid");
    CHECK(r.exit_code == 0);
    CHECK(r.output.rfind("0.622927\n", 0) == 0);

    // above-one warning goes to stderr
    const CliResult warn = run_cli("solve-fee --buffer --l1 -5% --g1 10% --p 0.7 --quotes " +
                                   data_file("spx_chain_2022-02-02.csv").string());
    CHECK(warn.exit_code == 0);
    CHECK(warn.output.find("1.492903") != std::string::npos);
    CHECK(warn.output.find("exceeds 1") != std::string::npos);
}

TEST_CASE("cli writes hedge tickets") {
    const fs::path out = temp_file("tickets.json");
    const CliResult r =
        run_cli("--out " + out.string() + " hedge --spec " + buffer9_spec_path() + " --s0 100");
    REQUIRE(r.exit_code == 0);
    CHECK(r.output.find("2 positions") != std::string::npos);
    std::ifstream in(out);
    nlohmann::json doc;
    in >> doc;
    REQUIRE(doc.is_array());
    REQUIRE(doc.size() == 2);
    CHECK(doc[0]["kind"] == "put");
    CHECK(doc[0]["strike"] == 95.0);
}

TEST_CASE("cli prices a calibrated floor near zero on the snapshot board") {
    const fs::path floor1 = temp_file("floor1.json");
    write_file(floor1, nlohmann::json(build_floor(-0.10, 0.10, 0.5, 0.52)).dump());
    const CliResult r = run_cli("premium-market --spec " + floor1.string() + " --quotes " +
                                data_file("spx_chain_2022-02-02.csv").string() + " --side mid");
    REQUIRE(r.exit_code == 0);
    CHECK(r.output.rfind("-0.000747\n", 0) == 0);
    // three snap diagnostics follow the premium line
    CHECK(r.output.find("put qty") != std::string::npos);
    CHECK(r.output.find("call qty") != std::string::npos);
    CHECK(r.output.find("4575") != std::string::npos);
    CHECK(r.output.find("5025") != std::string::npos);
}

TEST_CASE("cli simulate writes summary and density artifacts") {
    const fs::path out = temp_file("sim.json");
    const fs::path density = temp_file("sim_density.csv");
    const CliResult r = run_cli(
        "--seed 7 --out " + out.string() + " simulate --buffer --l1 -10% --g1 10% --p 0.8" +
        " --f 0.53 --r 0.015 --sigma 0.2 --paths 20 --years 2 --jump 30:0.9 --density-out " +
        density.string());
    REQUIRE(r.exit_code == 0);
    std::ifstream in(out);
    nlohmann::json doc;
    in >> doc;
    CHECK(doc["per_year"].size() == 2);
    CHECK(doc["seed"] == 7);
    std::ifstream din(density);
    std::string header;
    std::getline(din, header);
    CHECK(header == "year,bin_left,bin_right,count,series");
}

TEST_CASE("cli backtest writes the quantile report") {
    const fs::path prices = temp_file("flat_prices.csv");
    std::string text = "date,close\n";
    for (int i = 0; i < 30; ++i) {
        char row[64];
        std::snprintf(row, sizeof row, "2021-%02d-%02d,100\n", 1 + i / 28, 1 + i % 28);
        text += row;
    }
    write_file(prices, text);
    const fs::path out = temp_file("report.csv");
    const CliResult r = run_cli("--format csv --out " + out.string() + " backtest --prices " +
                                prices.string() + " --window 10");
    REQUIRE(r.exit_code == 0);
    CHECK(r.output.find("20 trailing returns") != std::string::npos);
    std::ifstream in(out);
    std::string header;
    std::getline(in, header);
    CHECK(header == "Case,Min,5%,10%,25%,50%,75%,90%,Max");
    std::string row;
    std::getline(in, row);
    CHECK(row.rfind("Original,0,0", 0) == 0);
}

TEST_CASE("cli maps error categories to distinct exit codes") {
    // validation: inline spec with a positive loss threshold
    const CliResult validation =
        run_cli("price-bs --buffer --l1 5% --g1 10% --p 0.8 --f 0.8 --r 0.015 --sigma 0.2");
    CHECK(validation.exit_code == 2);
    CHECK(validation.output.find("error[validation]") != std::string::npos);

    // data: malformed csv
    const fs::path bad = temp_file("bad_prices.csv");
    write_file(bad, "date,close\n2020-01-02,-5\n");
    const CliResult data = run_cli("backtest --prices " + bad.string());
    CHECK(data.exit_code == 4);
    CHECK(data.output.find("error[data]") != std::string::npos);

    // coverage: thin board cannot cover a 90% put within tolerance
    const fs::path thin = temp_file("thin_board.csv");
    write_file(thin,
               "quote_date,expiration,strike,type,bid,ask,spot\n"
               "2022/02/02,2023/02/17,3900,Put,184.6,187.8,4576.8\n"
               "2022/02/02,2023/02/17,5025,Call,139.0,142.8,4576.8\n");
    const CliResult coverage = run_cli("premium-market --buffer --l1 -10% --g1 10% --p 0.7" +
                                       std::string(" --f 1.21 --quotes ") + thin.string());
    CHECK(coverage.exit_code == 5);
    CHECK(coverage.output.find("error[coverage]") != std::string::npos);

    // no solution: the call leg quotes at zero
    const fs::path worthless = temp_file("worthless_call.csv");
    write_file(worthless,
               "quote_date,expiration,strike,type,bid,ask,spot\n"
               "2022/02/02,2023/02/17,4350,Put,298.3,302.7,4576.8\n"
               "2022/02/02,2023/02/17,4800,Call,0,0,4576.8\n");
    const CliResult nosol = run_cli("solve-fee --buffer --l1 -5% --g1 5% --p 0.5 --quotes " +
                                    worthless.string());
    CHECK(nosol.exit_code == 6);
    CHECK(nosol.output.find("error[no-solution]") != std::string::npos);

    // usage errors come from the parser with their own nonzero code
    const CliResult usage = run_cli("hedge --s0 100 --no-such-flag");
    CHECK(usage.exit_code != 0);
}

TEST_CASE("cli reads defaults from a json config file") {
    const fs::path config = temp_file("config.json");
    write_file(config, R"({"price-bs": {"buffer": true, "l1": "-5%", "g1": "10%",
                           "p": "0.8", "f": "0.8", "r": 0.015, "sigma": 0.2, "T": 1}})");
    const CliResult r = run_cli("--config " + config.string() + " price-bs");
    CHECK(r.exit_code == 0);
    CHECK(r.output.rfind("0.001168\n", 0) == 0);
}

TEST_CASE("identical cli invocations write identical artifacts") {
    const fs::path out1 = temp_file("det1.json");
    const fs::path out2 = temp_file("det2.json");
    // run twice with the same seed and flags
    const CliResult a = run_cli("--seed 11 --out " + out1.string() +
                                " simulate --buffer --l1 -10% --g1 10% --p 0.8 --f 0.53 --r 0.015"
                                " --sigma 0.2 --paths 10 --years 2");
    const CliResult b = run_cli("--seed 11 --out " + out2.string() +
                                " simulate --buffer --l1 -10% --g1 10% --p 0.8 --f 0.53 --r 0.015"
                                " --sigma 0.2 --paths 10 --years 2");
    REQUIRE(a.exit_code == 0);
    REQUIRE(b.exit_code == 0);
    std::ifstream f1(out1), f2(out2);
    std::stringstream s1, s2;
    s1 << f1.rdbuf();
    s2 << f2.rdbuf();
    CHECK(s1.str() == s2.str());
    CHECK_FALSE(s1.str().empty());
}
