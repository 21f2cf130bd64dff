// Closed-form evaluation of the damped-oscillator shock models:
// single shock, double shock (Heaviside second impulse), two-mode
// superposition, and the log-periodic form.
#pragma once

#include <array>
#include <stdexcept>

namespace oscfit {

// P(t) = A + B e^{-alpha t} + C e^{-beta t} cos(w t - phi)
struct ShockFitParams {
    double A = 0.0;      // asymptote level
    double B = 0.0;      // shock amplitude
    double alpha = 0.0;  // shock decay rate (1/day)
    double C = 0.0;      // oscillation amplitude
    double beta = 0.0;   // oscillation decay rate (1/day)
    double w = 0.0;      // angular frequency (rad/day)
    double phi = 0.0;    // phase (rad), not wrapped to any canonical range

    std::array<double, 7> as_array() const { return {A, B, alpha, C, beta, w, phi}; }
    static ShockFitParams from_array(const std::array<double, 7>& a) {
        return {a[0], a[1], a[2], a[3], a[4], a[5], a[6]};
    }
};

// Base curve plus, for t >= t0, a second impulse
//   D e^{-zeta (t-t0)} + Eamp e^{-beta (t-t0)} cos(w (t-t0) - eta)
// where beta and w are shared with the base curve. The step is closed on
// the left: evaluation exactly at t = t0 includes the second impulse.
struct DoubleShockParams {
    ShockFitParams base;
    double D = 0.0;     // second-shock amplitude
    double zeta = 0.0;  // second-shock decay rate (1/day)
    double Eamp = 0.0;  // second oscillation amplitude
    double eta = 0.0;   // second phase (rad)
    double t0 = 0.0;    // onset time of the second shock (days)
};

// A + B e^{-alpha t} + sum_k C_k e^{-beta_k t} cos(w_k t - phi_k), k = 1..2
struct TwoModeParams {
    struct Mode {
        double C = 0.0;
        double beta = 0.0;
        double w = 0.0;
        double phi = 0.0;
    };
    double A = 0.0;
    double B = 0.0;
    double alpha = 0.0;
    std::array<Mode, 2> modes{};
};

enum class LogPeriodicSide { PreCrash, PostCrash };

// PreCrash:  A + B (tc-t)^beta + C (tc-t)^beta cos(w ln(tc-t) - phi), t < tc
// PostCrash: same with (t-tc), t > tc
struct LogPeriodicParams {
    double A = 0.0;
    double B = 0.0;
    double C = 0.0;
    double beta = 0.0;  // power-law exponent
    double w = 0.0;     // log-frequency
    double phi = 0.0;
    double tc = 0.0;    // critical time (days)
    LogPeriodicSide side = LogPeriodicSide::PreCrash;
};

double eval_single_shock(const ShockFitParams& p, double t);
double eval_double_shock(const DoubleShockParams& p, double t);
double eval_two_mode(const TwoModeParams& p, double t);

// Throws std::domain_error when t is on the wrong side of tc (or t == tc).
double eval_log_periodic(const LogPeriodicParams& p, double t);

// tau = ln(tc - t); throws std::domain_error for t >= tc.
double log_periodic_time_map(double tc, double t);

}  // namespace oscfit
