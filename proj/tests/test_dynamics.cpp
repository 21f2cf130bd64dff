#include <cmath>
#include <random>

#include <doctest.h>

#include "oscfit/dynamics.hpp"
#include "oscfit/errors.hpp"

using namespace oscfit;

TEST_CASE("derive_coefficients: unit case") {
    MarketDynamicsParams p;
    p.lambda = 1.0;
    p.alpha3 = 1.0;          // a3+b3 = 1
    p.alpha2 = 0.0;          // a2+b2 = 0
    p.alpha1 = 1.0;          // a1+b1 = 1
    p.alpha0 = 2.0;
    p.beta0 = 1.0;
    const auto c = derive_coefficients(p, 0.0, 0.0);
    CHECK(c.m == doctest::Approx(1.0));
    CHECK(c.gamma == doctest::Approx(1.0));
    CHECK(c.k == doctest::Approx(1.0));
    CHECK(c.Pstar == doctest::Approx(1.0));
}

TEST_CASE("derive_coefficients: undamped boundary and a hand-checked case") {
    MarketDynamicsParams p;
    p.lambda = 1.0;
    p.alpha3 = 1.0;
    p.alpha2 = 1.0;  // gamma = 1 - 1*1 = 0
    p.alpha1 = 1.0;
    const auto c0 = derive_coefficients(p, 0.0, 0.0);
    CHECK(c0.gamma == doctest::Approx(0.0));

    MarketDynamicsParams q;
    q.lambda = 0.5;
    q.alpha3 = 2.0;
    q.alpha2 = 0.4;
    q.alpha1 = 3.0;
    q.alpha0 = 6.0;
    const auto c1 = derive_coefficients(q, 0.0, 0.0);
    CHECK(c1.m == doctest::Approx(1.0));
    CHECK(c1.gamma == doctest::Approx(0.8));
    CHECK(c1.k == doctest::Approx(1.5));
    CHECK(c1.Pstar == doctest::Approx(2.0));
}

TEST_CASE("derive_coefficients: degenerate input throws") {
    MarketDynamicsParams p;
    p.lambda = 0.0;
    CHECK_THROWS_AS(derive_coefficients(p, 0.0, 0.0), std::invalid_argument);
    p.lambda = 1.0;
    p.alpha3 = 1.0;
    p.alpha1 = 0.0;  // a1+b1 <= 0: no equilibrium
    CHECK_THROWS_AS(derive_coefficients(p, 0.0, 0.0), std::invalid_argument);
    p.alpha1 = 1.0;
    p.alpha3 = 0.0;  // a3+b3 <= 0: no inertial term
    CHECK_THROWS_AS(derive_coefficients(p, 0.0, 0.0), std::invalid_argument);
}

TEST_CASE("classify_solution: the three regimes") {
    OscillatorCoeffs c;
    c.m = 1.0;
    c.k = 1.0;

    c.gamma = 0.0;
    auto kind = classify_solution(c);
    CHECK(kind.regime == SolutionKind::Regime::Underdamped);
    CHECK(kind.discriminant == doctest::Approx(-4.0));
    CHECK(kind.beta == doctest::Approx(0.0));
    CHECK(kind.w == doctest::Approx(1.0));

    c.gamma = 2.0;
    kind = classify_solution(c);
    CHECK(kind.regime == SolutionKind::Regime::Critical);
    CHECK(kind.discriminant == doctest::Approx(0.0));
    CHECK(kind.r1 == doctest::Approx(1.0));

    c.gamma = 3.0;
    kind = classify_solution(c);
    CHECK(kind.regime == SolutionKind::Regime::Overdamped);
    CHECK(kind.discriminant == doctest::Approx(5.0));
    CHECK(kind.r1 == doctest::Approx((3.0 + std::sqrt(5.0)) / 2.0));
    CHECK(kind.r2 == doctest::Approx((3.0 - std::sqrt(5.0)) / 2.0));
}

TEST_CASE("shock_response_b: values and resonance") {
    OscillatorCoeffs c;
    c.m = 1.0;
    c.gamma = 0.0;
    c.k = 1.0;
    c.delta = 1.0;
    c.shock_alpha = 0.0;
    CHECK(shock_response_b(c) == doctest::Approx(1.0));

    c.gamma = 1.0;
    c.delta = 2.0;
    c.shock_alpha = 2.0;
    CHECK(shock_response_b(c) == doctest::Approx(2.0 / 3.0));

    c.gamma = 2.0;
    c.delta = 1.0;
    c.shock_alpha = 1.0;  // m a^2 - gamma a + k = 1 - 2 + 1 = 0
    CHECK_THROWS_AS(shock_response_b(c), NumericalError);
}

TEST_CASE("closed_form_solution: equilibrium start is constant") {
    OscillatorCoeffs c;
    c.m = 1.0;
    c.gamma = 0.7;
    c.k = 2.0;
    c.Pstar = 1.3;
    const auto f = closed_form_solution(c, 1.3, 0.0);
    for (double t = 0.0; t <= 30.0; t += 1.7)
        CHECK(f(t) == doctest::Approx(1.3).epsilon(1e-12));
}

TEST_CASE("closed_form_solution: undamped cosine") {
    OscillatorCoeffs c;
    c.m = 1.0;
    c.gamma = 0.0;
    c.k = 1.0;
    c.Pstar = 2.0;
    const auto f = closed_form_solution(c, 3.0, 0.0);
    for (double t = 0.0; t <= 20.0; t += 0.31)
        CHECK(f(t) == doctest::Approx(2.0 + std::cos(t)).epsilon(1e-10));
}

TEST_CASE("integrate_ode: shape and known undamped solution") {
    OscillatorCoeffs c;
    c.m = 1.0;
    c.gamma = 0.0;
    c.k = 1.0;
    c.Pstar = 0.5;
    const auto samples = integrate_ode(c, 1.5, 0.0, 1e-3, 5000);
    REQUIRE(samples.size() == 5001);
    CHECK(samples.front().t == doctest::Approx(0.0));
    CHECK(samples.front().P == doctest::Approx(1.5));
    for (std::size_t i = 0; i < samples.size(); i += 500) {
        const auto& s = samples[i];
        CHECK(s.P == doctest::Approx(0.5 + std::cos(s.t)).epsilon(1e-9));
    }
}

TEST_CASE("closed form matches RK4 for a generic forced underdamped system") {
    OscillatorCoeffs c;
    c.m = 1.2;
    c.gamma = 0.5;
    c.k = 2.3;
    c.Pstar = 0.9;
    c.delta = 1.7;
    c.shock_alpha = 0.45;
    const auto f = closed_form_solution(c, 1.4, -0.3);
    const auto samples = integrate_ode(c, 1.4, -0.3, 1e-3, 30000);
    double sup = 0.0;
    for (const auto& s : samples) sup = std::max(sup, std::abs(s.P - f(s.t)));
    CHECK(sup < 1e-6);
}

TEST_CASE("unforced damped motion dissipates energy") {
    OscillatorCoeffs c;
    c.m = 1.0;
    c.gamma = 0.4;
    c.k = 1.5;
    const auto samples = integrate_ode(c, 1.0, 0.0, 1e-3, 30000);
    auto energy = [&](const OdeSample& s) {
        return 0.5 * c.m * s.Pdot * s.Pdot + 0.5 * c.k * s.P * s.P;
    };
    double prev = energy(samples.front());
    for (std::size_t i = 1000; i < samples.size(); i += 1000) {
        const double e = energy(samples[i]);
        CHECK(e <= prev + 1e-12);
        prev = e;
    }
}

TEST_CASE("regime boundary: solutions vary continuously across critical damping") {
    OscillatorCoeffs c;
    c.m = 1.0;
    c.k = 1.0;
    c.gamma = 2.0 - 1e-7;  // just underdamped
    const auto under = closed_form_solution(c, 1.0, 0.0);
    c.gamma = 2.0;  // critical
    const auto critical = closed_form_solution(c, 1.0, 0.0);
    c.gamma = 2.0 + 1e-7;  // just overdamped
    const auto over = closed_form_solution(c, 1.0, 0.0);
    for (double t = 0.0; t <= 10.0; t += 0.5) {
        CHECK(under(t) == doctest::Approx(critical(t)).epsilon(1e-4));
        CHECK(over(t) == doctest::Approx(critical(t)).epsilon(1e-4));
    }
}
