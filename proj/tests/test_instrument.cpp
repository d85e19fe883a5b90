#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "epswap/instrument.hpp"
#include "testutil.hpp"

using namespace epswap;
using Catch::Approx;
using Catch::Matchers::WithinAbs;

TEST_CASE("buffer builder accepts the reference contracts") {
    const EpsSpec a = build_buffer(-0.05, 0.10, 0.8, 0.8, 1.0, 1e6);
    CHECK(a.loss_thresholds == std::vector<double>{-0.05});
    CHECK(a.gain_thresholds == std::vector<double>{0.10});
    CHECK(a.protection_rates == std::vector<double>{0.0, 0.8});
    CHECK(a.fee_rates == std::vector<double>{0.0, 0.8});
    CHECK(a.notional == 1e6);

    const EpsSpec b = build_buffer(-0.05, 0.05, 0.5, 0.5);
    CHECK(b.maturity_years == 1.0);
    CHECK(b.notional == 1.0);
}

TEST_CASE("buffer builder rejects bad thresholds") {
    CHECK_THROWS_MATCHES(build_buffer(0.05, 0.10, 0.8, 0.8), ValidationError,
                         Catch::Matchers::MessageMatches(
                             Catch::Matchers::ContainsSubstring("loss threshold must be negative")));
    CHECK_THROWS_AS(build_buffer(-1.0, 0.10, 0.8, 0.8), ValidationError);
    CHECK_THROWS_AS(build_buffer(-0.05, -0.10, 0.8, 0.8), ValidationError);
    CHECK_THROWS_AS(build_buffer(-0.05, 0.10, 0.0, 0.8), ValidationError);
}

TEST_CASE("floor builder accepts and rejects per preconditions") {
    const EpsSpec a = build_floor(-0.15, 0.10, 0.8, 0.8, 1.0, 1e6);
    CHECK(a.protection_rates == std::vector<double>{0.8, 0.0});
    const EpsSpec b = build_floor(-0.10, 0.10, 0.5, 0.52);
    CHECK(b.fee_rates == std::vector<double>{0.0, 0.52});

    CHECK_THROWS_MATCHES(build_floor(-0.15, 0.10, 1.2, 0.8), ValidationError,
                         Catch::Matchers::MessageMatches(
                             Catch::Matchers::ContainsSubstring("protection rate exceeds 1")));
}

TEST_CASE("generic builder covers multi-segment and degenerate structures") {
    // buffer-floor protection with buffer-cap fee
    const EpsSpec bf = build_generic({-0.05, -0.15}, {0.10, 0.25}, {0.0, 0.7, 0.0}, {0.0, 0.7, 0.0});
    CHECK(bf.protection_rates.size() == 3);
    CHECK(adjusted_return(bf, -0.30) == Approx(0.7 * (-0.15 + 0.05)).margin(1e-15));

    // proportional legs: no interior thresholds at all
    const EpsSpec prop = build_generic({}, {}, {0.5}, {0.5});
    CHECK(adjusted_return(prop, -0.4) == Approx(-0.2).margin(1e-15));
    CHECK(adjusted_return(prop, 0.4) == Approx(0.2).margin(1e-15));

    // psi identically zero
    const EpsSpec zero = build_generic({}, {}, {0.0}, {0.0});
    for (double r : {-1.0, -0.3, 0.0, 0.7, 5.0}) CHECK(adjusted_return(zero, r) == 0.0);

    CHECK_THROWS_AS(build_generic({-0.15, -0.05}, {}, {0, 0.5, 0}, {0.1}), ValidationError);
    CHECK_THROWS_AS(build_generic({}, {0.25, 0.10}, {0.1}, {0, 0.5, 0}), ValidationError);
    CHECK_THROWS_AS(build_generic({-0.05}, {}, {0, -0.1}, {0.1}), ValidationError);
    CHECK_THROWS_AS(build_generic({-0.05}, {0.1}, {0, 0.5}, {0, -0.2}), ValidationError);
}

TEST_CASE("adjusted return matches the worked settlement examples") {
    const EpsSpec buffer = build_buffer(-0.05, 0.10, 0.8, 0.8);
    CHECK_THAT(adjusted_return(buffer, -0.08), WithinAbs(-0.024, 1e-12));
    const EpsSpec floor = build_floor(-0.15, 0.10, 0.8, 0.8);
    CHECK_THAT(adjusted_return(floor, -0.20), WithinAbs(-0.12, 1e-12));
    CHECK(adjusted_return(buffer, 0.0) == 0.0);
    CHECK(adjusted_return(floor, 0.0) == 0.0);

    CHECK_THROWS_AS(adjusted_return(buffer, -1.0000001), DomainError);
    CHECK_THROWS_AS(adjusted_return(buffer, std::nan("")), DomainError);
}

TEST_CASE("leg values split psi by sign") {
    const EpsSpec buffer = build_buffer(-0.05, 0.10, 0.8, 0.8);
    const LegValues gain = leg_values(buffer, 0.12);
    CHECK(gain.protection == 0.0);
    CHECK_THAT(gain.fee, WithinAbs(0.016, 1e-12));

    const EpsSpec floor = build_floor(-0.15, 0.10, 0.8, 0.8);
    const LegValues loss = leg_values(floor, -0.08);
    CHECK_THAT(loss.protection, WithinAbs(-0.064, 1e-12));
    CHECK(loss.fee == 0.0);

    const LegValues flat = leg_values(buffer, 0.0);
    CHECK(flat.protection == 0.0);
    CHECK(flat.fee == 0.0);
}

TEST_CASE("net return reproduces the backtest extremes") {
    const EpsSpec buffer1 = build_buffer(-0.05, 0.05, 0.5, 0.63);
    CHECK_THAT(net_return(buffer1, -0.2027), WithinAbs(-0.12635, 1e-12));
    const EpsSpec floor1 = build_floor(-0.10, 0.10, 0.5, 0.52);
    CHECK_THAT(net_return(floor1, -0.2027), WithinAbs(-0.1527, 1e-12));
    const EpsSpec buffer2 = build_buffer(-0.05, 0.10, 0.7, 1.51);
    CHECK_THAT(net_return(buffer2, 0.7382), WithinAbs(-0.225482, 1e-12));
}

TEST_CASE("settlement cash flow scales by notional") {
    const EpsSpec buffer = build_buffer(-0.05, 0.10, 0.8, 0.8, 1.0, 1e6);
    CHECK_THAT(settlement_cashflow(buffer, 0.12), WithinAbs(16000.0, 1e-6));
    const EpsSpec floor = build_floor(-0.15, 0.10, 0.8, 0.8, 1.0, 1e6);
    CHECK_THAT(settlement_cashflow(floor, -0.20), WithinAbs(-120000.0, 1e-6));
    CHECK(settlement_cashflow(buffer, 0.03) == 0.0);
}

TEST_CASE("fee rates above one are accepted with a structure warning") {
    const EpsSpec buffer2 = build_buffer(-0.05, 0.10, 0.7, 1.51);
    const auto warnings = structure_warnings(buffer2);
    REQUIRE(warnings.size() == 1);
    CHECK(warnings[0].code == SpecWarningCode::fee_rate_above_one);

    CHECK(structure_warnings(build_buffer(-0.05, 0.10, 0.7, 0.9)).empty());
}

TEST_CASE("psi agrees with the slope-integral oracle on random specs") {
    testutil::SpecGen gen(20240521);
    for (int trial = 0; trial < 300; ++trial) {
        const EpsSpec spec = gen.random_spec();
        for (int k = 0; k < 40; ++k) {
            const double r = gen.uniform(-1.0, 2.0);
            const double via_sums = adjusted_return(spec, r);
            const double via_integral = testutil::psi_slope_integral(spec, r);
            CHECK_THAT(via_sums, WithinAbs(via_integral, 1e-12));
        }
    }
}

TEST_CASE("psi is nondecreasing with the expected sign split") {
    testutil::SpecGen gen(7);
    for (int trial = 0; trial < 120; ++trial) {
        const EpsSpec spec = gen.random_spec();
        double prev = adjusted_return(spec, -1.0);
        for (int k = 1; k <= 240; ++k) {
            const double r = -1.0 + 3.0 * k / 240.0;
            const double psi = adjusted_return(spec, r);
            CHECK(psi >= prev - 1e-12);
            if (r <= 0.0) CHECK(psi <= 1e-15);
            if (r >= 0.0) CHECK(psi >= -1e-15);
            prev = psi;
        }
    }
}

TEST_CASE("psi is continuous across breakpoints") {
    testutil::SpecGen gen(99);
    const double eps = 1e-9;
    for (int trial = 0; trial < 120; ++trial) {
        const EpsSpec spec = gen.random_spec();
        double max_rate = 0.0;
        for (double p : spec.protection_rates) max_rate = std::max(max_rate, p);
        for (double f : spec.fee_rates) max_rate = std::max(max_rate, f);
        std::vector<double> breakpoints = spec.loss_thresholds;
        breakpoints.insert(breakpoints.end(), spec.gain_thresholds.begin(), spec.gain_thresholds.end());
        breakpoints.push_back(0.0);
        for (double b : breakpoints) {
            const double at = adjusted_return(spec, b);
            CHECK(std::abs(adjusted_return(spec, b + eps) - at) <= max_rate * eps + 1e-15);
            CHECK(std::abs(adjusted_return(spec, b - eps) - at) <= max_rate * eps + 1e-15);
        }
    }
}

TEST_CASE("leg additivity is exact") {
    testutil::SpecGen gen(1234);
    for (int trial = 0; trial < 200; ++trial) {
        const EpsSpec spec = gen.random_spec();
        const double r = gen.uniform(-1.0, 2.0);
        const LegValues legs = leg_values(spec, r);
        CHECK(legs.protection + legs.fee == adjusted_return(spec, r));
        CHECK(legs.protection <= 0.0);
        CHECK(legs.fee >= 0.0);
    }
}

TEST_CASE("net return is monotone exactly when all rates stay at or below 1") {
    // rates <= 1: nondecreasing and 1-Lipschitz
    testutil::SpecGen gen(555);
    for (int trial = 0; trial < 80; ++trial) {
        const EpsSpec spec = gen.random_spec(/*rates_at_most_one=*/true);
        double x = gen.uniform(-1.0, 2.0);
        double y = gen.uniform(-1.0, 2.0);
        if (x > y) std::swap(x, y);
        const double nx = net_return(spec, x);
        const double ny = net_return(spec, y);
        CHECK(ny >= nx - 1e-12);
        CHECK(std::abs(ny - nx) <= (y - x) + 1e-12);
    }

    // counterexample: a 1.51 fee slope makes net decreasing above g1
    const EpsSpec buffer2 = build_buffer(-0.05, 0.10, 0.7, 1.51);
    CHECK(net_return(buffer2, 0.7382) < net_return(buffer2, 0.2));
}

TEST_CASE("spec json round trip is lossless") {
    testutil::SpecGen gen(31415);
    for (int trial = 0; trial < 50; ++trial) {
        const EpsSpec spec = gen.random_spec();
        const nlohmann::json j = spec;
        const EpsSpec back = j.get<EpsSpec>();
        CHECK(back == spec);
        // via text as the CLI round-trips it
        const EpsSpec back2 = nlohmann::json::parse(j.dump()).get<EpsSpec>();
        CHECK(back2 == spec);
    }

    const nlohmann::json doc = {{"loss_thresholds", {-0.05}},
                                {"gain_thresholds", {0.10}},
                                {"protection_rates", {0.0, 0.8}},
                                {"fee_rates", {0.0, 0.82}},
                                {"maturity_years", 1.0},
                                {"notional", 1.0}};
    const EpsSpec spec = doc.get<EpsSpec>();
    CHECK(spec.loss_thresholds == std::vector<double>{-0.05});
    CHECK(spec.fee_rates == std::vector<double>{0.0, 0.82});
}
