#include "oscfit/dynamics.hpp"

#include <cmath>

namespace oscfit {

OscillatorCoeffs derive_coefficients(const MarketDynamicsParams& p,
                                     double delta, double shock_alpha) {
    if (p.lambda <= 0.0)
        throw std::invalid_argument("derive_coefficients: lambda must be positive");
    const double a1b1 = p.alpha1 + p.beta1;
    const double a3b3 = p.alpha3 + p.beta3;
    if (a1b1 <= 0.0)
        throw std::invalid_argument("derive_coefficients: alpha1+beta1 must be positive");
    if (a3b3 <= 0.0)
        throw std::invalid_argument("derive_coefficients: alpha3+beta3 must be positive");
    OscillatorCoeffs c;
    c.m = p.lambda * a3b3;
    c.gamma = 1.0 - p.lambda * (p.alpha2 + p.beta2);
    c.k = p.lambda * a1b1;
    c.Pstar = (p.alpha0 - p.beta0) / a1b1;
    c.delta = delta;
    c.shock_alpha = shock_alpha;
    return c;
}

SolutionKind classify_solution(const OscillatorCoeffs& c, double tol) {
    SolutionKind s;
    const double disc = c.gamma * c.gamma - 4.0 * c.m * c.k;
    s.discriminant = disc;
    // Scale-relative tolerance so well-conditioned inputs near the boundary
    // are not misclassified.
    const double scale = std::max(c.gamma * c.gamma, 4.0 * c.m * c.k);
    if (std::abs(disc) <= tol * scale) {
        s.regime = SolutionKind::Regime::Critical;
        s.r1 = s.r2 = c.gamma / (2.0 * c.m);
    } else if (disc > 0.0) {
        s.regime = SolutionKind::Regime::Overdamped;
        const double root = std::sqrt(disc);
        s.r1 = (c.gamma + root) / (2.0 * c.m);
        s.r2 = (c.gamma - root) / (2.0 * c.m);
    } else {
        s.regime = SolutionKind::Regime::Underdamped;
        s.beta = c.gamma / (2.0 * c.m);
        s.w = std::sqrt(-disc) / (2.0 * c.m);
    }
    return s;
}

double shock_response_b(const OscillatorCoeffs& c) {
    const double a = c.shock_alpha;
    const double den = c.m * a * a - c.gamma * a + c.k;
    if (std::abs(den) <= 1e-12 * c.k)
        throw NumericalError("shock_response_b: resonant shock (denominator ~ 0)");
    return c.delta / den;
}

std::function<double(double)> closed_form_solution(const OscillatorCoeffs& c,
                                                   double P0, double Pdot0) {
    const SolutionKind kind = classify_solution(c);
    const double b = c.delta == 0.0 ? 0.0 : shock_response_b(c);
    const double a = c.shock_alpha;
    const double Pstar = c.Pstar;
    // Homogeneous part must satisfy h(0) = P0 - Pstar - b, h'(0) = Pdot0 + a b.
    const double h0 = P0 - Pstar - b;
    const double hd0 = Pdot0 + a * b;

    switch (kind.regime) {
        case SolutionKind::Regime::Underdamped: {
            const double be = kind.beta, w = kind.w;
            const double c1 = h0;
            const double c2 = (hd0 + be * c1) / w;
            return [=](double t) {
                return Pstar + b * std::exp(-a * t) +
                       std::exp(-be * t) * (c1 * std::cos(w * t) + c2 * std::sin(w * t));
            };
        }
        case SolutionKind::Regime::Overdamped: {
            const double r1 = kind.r1, r2 = kind.r2;
            const double c1 = -(hd0 + r2 * h0) / (r1 - r2);
            const double c2 = h0 - c1;
            return [=](double t) {
                return Pstar + b * std::exp(-a * t) + c1 * std::exp(-r1 * t) +
                       c2 * std::exp(-r2 * t);
            };
        }
        case SolutionKind::Regime::Critical: {
            const double r = kind.r1;
            const double c1 = h0;
            const double c2 = hd0 + r * c1;
            return [=](double t) {
                return Pstar + b * std::exp(-a * t) + (c1 + c2 * t) * std::exp(-r * t);
            };
        }
    }
    throw NumericalError("closed_form_solution: unreachable regime");
}

std::vector<OdeSample> integrate_ode(const OscillatorCoeffs& c, double P0,
                                     double Pdot0, double dt, int n) {
    if (dt <= 0.0 || n < 1)
        throw std::invalid_argument("integrate_ode: dt must be > 0 and n >= 1");
    const double inv_m = 1.0 / c.m;
    auto accel = [&](double t, double P, double V) {
        return (c.k * (c.Pstar - P) - c.gamma * V + c.delta * std::exp(-c.shock_alpha * t)) *
               inv_m;
    };
    std::vector<OdeSample> out;
    out.reserve(static_cast<size_t>(n) + 1);
    double t = 0.0, P = P0, V = Pdot0;
    out.push_back({t, P, V});
    for (int i = 0; i < n; ++i) {
        const double k1p = V;
        const double k1v = accel(t, P, V);
        const double k2p = V + 0.5 * dt * k1v;
        const double k2v = accel(t + 0.5 * dt, P + 0.5 * dt * k1p, V + 0.5 * dt * k1v);
        const double k3p = V + 0.5 * dt * k2v;
        const double k3v = accel(t + 0.5 * dt, P + 0.5 * dt * k2p, V + 0.5 * dt * k2v);
        const double k4p = V + dt * k3v;
        const double k4v = accel(t + dt, P + dt * k3p, V + dt * k3v);
        P += dt / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
        V += dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        t = dt * (i + 1);
        out.push_back({t, P, V});
    }
    return out;
}

}  // namespace oscfit
