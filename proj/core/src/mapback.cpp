#include "oscfit/mapback.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace oscfit {

MassAssignment capitalization_mass(const std::map<std::string, double>& caps,
                                   const std::string& reference) {
    const auto ref = caps.find(reference);
    if (ref == caps.end())
        throw ParseError("capitalization_mass: reference '" + reference + "' not present");
    for (const auto& [label, cap] : caps)
        if (!(cap > 0.0))
            throw ParseError("capitalization_mass: non-positive capitalization for '" +
                             label + "'");
    MassAssignment out;
    out.method = MassMethod::Capitalization;
    out.reference = reference;
    for (const auto& [label, cap] : caps) out.masses[label] = cap / ref->second;
    out.masses[reference] = 1.0;  // exact, independent of rounding
    return out;
}

MassAssignment inverse_volatility_mass(const std::vector<ReturnSeries>& markets,
                                       const std::string& reference) {
    std::map<std::string, double> vols;
    for (const auto& m : markets) {
        const double v = volatility(m);
        if (!(v > 0.0))
            throw NumericalError("inverse_volatility_mass: zero volatility for '" +
                                 m.label + "'");
        vols[m.label] = v;
    }
    const auto ref = vols.find(reference);
    if (ref == vols.end())
        throw ParseError("inverse_volatility_mass: reference '" + reference +
                         "' not present");
    MassAssignment out;
    out.method = MassMethod::InverseVolatility;
    out.reference = reference;
    for (const auto& [label, v] : vols) out.masses[label] = ref->second / v;
    out.masses[reference] = 1.0;
    return out;
}

std::map<std::string, double> load_capitalization_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open file: " + path);
    std::map<std::string, double> caps;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream row(line);
        std::string label;
        if (!(row >> label) || label[0] == '#') continue;
        double cap = 0.0;
        if (!(row >> cap))
            throw ParseError(path + ":" + std::to_string(lineno) +
                             ": expected 'label value'");
        caps[label] = cap;
    }
    return caps;
}

MappedCoefficients map_back(const ShockFitParams& fit, double mass, double P0,
                            bool check_c1) {
    if (!(mass > 0.0)) throw std::invalid_argument("map_back: mass must be positive");
    MappedCoefficients out;
    out.Pstar = fit.A;
    out.c1 = fit.C;
    out.gamma = 2.0 * mass * fit.beta;
    out.k = out.gamma * out.gamma / (4.0 * mass) + mass * fit.w * fit.w;
    out.delta = fit.B * (mass * fit.alpha * fit.alpha - out.gamma * fit.alpha + out.k);
    out.b = fit.B;
    out.P0 = P0;
    if (check_c1) {
        const double cphi = std::cos(-fit.phi);
        if (std::abs(cphi) < 1e-9)
            throw NumericalError("map_back: cos(-phi) ~ 0, c1 relation is degenerate");
        out.c1_residual = fit.C - (out.Pstar - P0 - out.b) / cphi;
    }
    return out;
}

}  // namespace oscfit
