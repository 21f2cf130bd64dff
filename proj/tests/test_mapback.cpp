#include <cmath>

#include <doctest.h>

#include "helpers.hpp"
#include "oscfit/dynamics.hpp"
#include "oscfit/mapback.hpp"

using namespace oscfit;

TEST_CASE("capitalization_mass: reference is exactly 1, others scale by ratio") {
    const std::map<std::string, double> caps = {
        {"NYSE", 13046.0}, {"Nasdaq", 2904.0}, {"Tokyo", 3509.0}};
    const auto masses = capitalization_mass(caps, "NYSE");
    CHECK(masses.masses.at("NYSE") == 1.0);
    CHECK(masses.masses.at("Nasdaq") == doctest::Approx(2904.0 / 13046.0).epsilon(1e-12));
    CHECK(masses.masses.at("Tokyo") == doctest::Approx(3509.0 / 13046.0).epsilon(1e-12));
    CHECK_THROWS_AS(capitalization_mass(caps, "LSE"), ParseError);
    CHECK_THROWS_AS(capitalization_mass({{"NYSE", 0.0}}, "NYSE"), ParseError);
}

TEST_CASE("load_capitalization_table: bundled 2008 snapshot") {
    const auto caps =
        load_capitalization_table(testutil::fixture_path("capitalization_2008.txt"));
    REQUIRE(caps.count("NYSE") == 1);
    REQUIRE(caps.count("Nasdaq") == 1);
    const auto masses = capitalization_mass(caps, "NYSE");
    CHECK(masses.masses.at("Nasdaq") == doctest::Approx(0.2226).epsilon(1e-3));
}

TEST_CASE("inverse_volatility_mass: self is 1, double volatility halves the mass") {
    ReturnSeries ref, doubled;
    ref.label = "NYSE";
    doubled.label = "Jumpy";
    for (int i = 0; i < 100; ++i) {
        char date[32];
        std::snprintf(date, sizeof date, "2008-%02d-%02d", 1 + i / 28, 1 + i % 28);
        const double v = (i % 2 ? 0.01 : -0.01);
        ref.dates.push_back(date);
        ref.values.push_back(v);
        doubled.dates.push_back(date);
        doubled.values.push_back(2.0 * v);
    }
    const auto masses = inverse_volatility_mass({ref, doubled}, "NYSE");
    CHECK(masses.masses.at("NYSE") == 1.0);
    CHECK(masses.masses.at("Jumpy") == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("map_back: zero oscillation decay gives an undamped spring") {
    ShockFitParams fit{1.0, 0.5, 0.3, 0.1, 0.0, 1.2, 0.4};
    const auto mapped = map_back(fit, 1.0, 1.4, /*check_c1=*/false);
    CHECK(mapped.gamma == doctest::Approx(0.0));
    CHECK(mapped.k == doctest::Approx(1.2 * 1.2).epsilon(1e-14));
}

TEST_CASE("map_back: Dow 1987-window fit, hand-checked coefficients at unit mass") {
    ShockFitParams fit{0.0, 0.0, 0.0, 0.0, 0.1822, 1.3149, 0.0};
    const auto mapped = map_back(fit, 1.0, 1.0, /*check_c1=*/false);
    CHECK(mapped.gamma == doctest::Approx(0.3644).epsilon(1e-12));
    CHECK(mapped.k ==
          doctest::Approx(0.3644 * 0.3644 / 4.0 + 1.3149 * 1.3149).epsilon(1e-12));
    CHECK(mapped.k == doctest::Approx(1.762).epsilon(1e-3));
}

TEST_CASE("map_back then classify_solution round-trips the fitted beta and w") {
    ShockFitParams fit{0.97, 0.59, 0.70, 0.16, 0.18, 1.31, 3.04};
    for (double mass : {1.0, 0.22, 3.7}) {
        const auto mapped = map_back(fit, mass, 1.2, /*check_c1=*/false);
        OscillatorCoeffs c;
        c.m = mass;
        c.gamma = mapped.gamma;
        c.k = mapped.k;
        const auto kind = classify_solution(c);
        REQUIRE(kind.regime == SolutionKind::Regime::Underdamped);
        CHECK(kind.beta == doctest::Approx(fit.beta).epsilon(1e-12));
        CHECK(kind.w == doctest::Approx(fit.w).epsilon(1e-12));
    }
}

TEST_CASE("map_back: forcing coefficient is consistent with the shock response") {
    ShockFitParams fit{0.97, 0.59, 0.70, 0.16, 0.18, 1.31, 3.04};
    const auto mapped = map_back(fit, 1.0, 1.2, /*check_c1=*/false);
    OscillatorCoeffs c;
    c.m = 1.0;
    c.gamma = mapped.gamma;
    c.k = mapped.k;
    c.delta = mapped.delta;
    c.shock_alpha = fit.alpha;
    CHECK(shock_response_b(c) == doctest::Approx(fit.B).epsilon(1e-12));
}

TEST_CASE("map_back: degenerate phase raises only when the check is requested") {
    ShockFitParams fit{1.0, 0.5, 0.3, 0.1, 0.1, 1.2, 1.5707963267948966};  // cos(-phi)=0
    CHECK_THROWS_AS(map_back(fit, 1.0, 1.2, /*check_c1=*/true), NumericalError);
    CHECK_NOTHROW(map_back(fit, 1.0, 1.2, /*check_c1=*/false));
    CHECK_THROWS_AS(map_back(fit, 0.0, 1.2, false), std::invalid_argument);
}

TEST_CASE("map_back: c1 residual vanishes for a self-consistent parameter set") {
    // choose P0 so that (Pstar - P0 - b) / cos(-phi) equals C exactly
    ShockFitParams fit{0.95, 0.8, 0.5, 0.12, 0.1, 1.4, 0.6};
    const double P0 = fit.A - fit.B - fit.C * std::cos(-fit.phi);
    const auto mapped = map_back(fit, 1.0, P0, /*check_c1=*/true);
    REQUIRE(mapped.c1_residual.has_value());
    CHECK(*mapped.c1_residual == doctest::Approx(0.0).epsilon(1e-12));
}
