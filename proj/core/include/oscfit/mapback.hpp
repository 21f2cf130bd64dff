// Inverse mapping from fitted curve parameters to physical oscillator
// coefficients under a chosen market-mass definition.
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "oscfit/analytics.hpp"
#include "oscfit/errors.hpp"
#include "oscfit/model.hpp"

namespace oscfit {

enum class MassMethod { Capitalization, InverseVolatility };

struct MassAssignment {
    MassMethod method = MassMethod::Capitalization;
    std::string reference;  // the unit-mass market
    std::map<std::string, double> masses;
};

struct MappedCoefficients {
    double Pstar = 0.0;  // = A
    double c1 = 0.0;     // = C (fitted amplitude)
    double gamma = 0.0;  // = 2 m beta
    double k = 0.0;      // = gamma^2 / 4m + m w^2
    double delta = 0.0;  // = B (m alpha^2 - gamma alpha + k)
    double b = 0.0;      // = B by construction
    double P0 = 0.0;
    // C minus the phase-relation implied amplitude (Pstar - P0 - b)/cos(-phi);
    // absent when the check is skipped.
    std::optional<double> c1_residual;
};

// m_i = cap_i / cap_reference.
MassAssignment capitalization_mass(const std::map<std::string, double>& caps,
                                   const std::string& reference);

// m_i = volatility(reference) / volatility(market_i).
MassAssignment inverse_volatility_mass(const std::vector<ReturnSeries>& markets,
                                       const std::string& reference);

// Reads a two-column text file (label, billions USD); '#' lines are comments.
std::map<std::string, double> load_capitalization_table(const std::string& path);

// Throws NumericalError on the degenerate phase cos(-phi) ~ 0 when the c1
// consistency check is requested.
MappedCoefficients map_back(const ShockFitParams& fit, double mass, double P0,
                            bool check_c1 = true);

}  // namespace oscfit
