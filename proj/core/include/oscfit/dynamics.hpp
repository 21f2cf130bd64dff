// Price-adjustment market dynamics and the corresponding forced damped
// oscillator: coefficient derivation, regime classification, closed-form
// solutions, and a fixed-step RK4 integrator used as an independent oracle.
#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

#include "oscfit/errors.hpp"

namespace oscfit {

// Demand/supply model: Qd = a0 - a1 P + a2 Pdot + a3 Pddot,
// Qs = b0 + b1 P + b2 Pdot + b3 Pddot, with price adjustment speed lambda.
struct MarketDynamicsParams {
    double lambda = 1.0;
    double alpha0 = 0.0, alpha1 = 0.0, alpha2 = 0.0, alpha3 = 0.0;
    double beta0 = 0.0, beta1 = 0.0, beta2 = 0.0, beta3 = 0.0;
};

// m Pddot + gamma Pdot + k P = k Pstar + delta e^{-shock_alpha t}
struct OscillatorCoeffs {
    double m = 1.0;
    double gamma = 0.0;
    double k = 1.0;
    double Pstar = 0.0;
    double delta = 0.0;        // shock strength
    double shock_alpha = 0.0;  // shock decay rate (1/day)
};

// Discriminant convention: Delta = gamma^2 - 4 m k (negative => oscillatory).
struct SolutionKind {
    enum class Regime { Overdamped, Critical, Underdamped };
    Regime regime = Regime::Underdamped;
    double discriminant = 0.0;
    // Overdamped: decay rates r1 >= r2; Critical: r1 == r2 == gamma/2m;
    // Underdamped: beta = gamma/2m, w = sqrt(4mk - gamma^2)/2m.
    double r1 = 0.0, r2 = 0.0;
    double beta = 0.0, w = 0.0;
};

// m = lambda(a3+b3), gamma = 1 - lambda(a2+b2), k = lambda(a1+b1),
// Pstar = (a0-b0)/(a1+b1). Throws std::invalid_argument on degenerate input.
OscillatorCoeffs derive_coefficients(const MarketDynamicsParams& p,
                                     double delta, double shock_alpha);

SolutionKind classify_solution(const OscillatorCoeffs& c, double tol = 1e-9);

// b = delta / (m a^2 - gamma a + k); throws NumericalError at resonance.
double shock_response_b(const OscillatorCoeffs& c);

// Closed-form P(t) for the regime of c with P(0)=P0, Pdot(0)=Pdot0.
std::function<double(double)> closed_form_solution(const OscillatorCoeffs& c,
                                                   double P0, double Pdot0);

struct OdeSample {
    double t;
    double P;
    double Pdot;
};

// Classic fixed-step RK4 on the forced oscillator ODE; n steps of size dt,
// returning n+1 samples including the initial condition.
std::vector<OdeSample> integrate_ode(const OscillatorCoeffs& c, double P0,
                                     double Pdot0, double dt, int n);

}  // namespace oscfit
