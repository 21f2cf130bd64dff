#include "oscfit/model.hpp"

#include <cmath>

namespace oscfit {

double eval_single_shock(const ShockFitParams& p, double t) {
    return p.A + p.B * std::exp(-p.alpha * t) +
           p.C * std::exp(-p.beta * t) * std::cos(p.w * t - p.phi);
}

double eval_double_shock(const DoubleShockParams& p, double t) {
    double v = eval_single_shock(p.base, t);
    if (t >= p.t0) {  // H(0) = 1: the onset instant includes the impulse
        const double tau = t - p.t0;
        v += p.D * std::exp(-p.zeta * tau) +
             p.Eamp * std::exp(-p.base.beta * tau) * std::cos(p.base.w * tau - p.eta);
    }
    return v;
}

double eval_two_mode(const TwoModeParams& p, double t) {
    double v = p.A + p.B * std::exp(-p.alpha * t);
    for (const auto& m : p.modes)
        v += m.C * std::exp(-m.beta * t) * std::cos(m.w * t - m.phi);
    return v;
}

double eval_log_periodic(const LogPeriodicParams& p, double t) {
    const double dt = p.side == LogPeriodicSide::PreCrash ? p.tc - t : t - p.tc;
    if (dt <= 0.0)
        throw std::domain_error("eval_log_periodic: t is not on the valid side of tc");
    const double pw = std::pow(dt, p.beta);
    return p.A + p.B * pw + p.C * pw * std::cos(p.w * std::log(dt) - p.phi);
}

double log_periodic_time_map(double tc, double t) {
    if (t >= tc)
        throw std::domain_error("log_periodic_time_map: requires t < tc");
    return std::log(tc - t);
}

}  // namespace oscfit
