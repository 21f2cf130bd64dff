// Staged calibration of the shock models: sum-of-squares error, stagewise
// initialization, coordinate-descent plus damped Gauss-Newton refinement,
// frequency-grid multi-start, landscape profiling, and the double-shock /
// two-mode variants.
#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "oscfit/errors.hpp"
#include "oscfit/model.hpp"
#include "oscfit/series.hpp"

namespace oscfit {

struct FitConfig {
    // Frequency seeds for multi-start; each seeds one independent fit.
    std::vector<double> w_grid;
    bool enforce_nonneg_beta = true;
    bool enforce_nonneg_alpha = true;
    // When set, only the first fit_horizon samples enter the error function.
    std::optional<int> fit_horizon;
    // Cap on coordinate-descent cycles per seed.
    int max_iterations = 400;
    // Relative SSE improvement per cycle below which a fit is converged.
    double convergence_tol = 1e-6;
    // Seed for any stochastic restart jitter (the default pipeline is
    // fully deterministic and does not consume it).
    std::uint64_t seed = 0;

    // Coarse multi-start preset: stops each seed early enough to keep
    // distinct basins separated before ranking them.
    static FitConfig scan_defaults();
    // Full local convergence for a single seeded fit.
    static FitConfig refine_defaults();
};

struct FitResult {
    ShockFitParams params;
    double sse = 0.0;
    int n_points = 0;
    int iterations = 0;
    bool converged = false;
    double seed_w = 0.0;
};

struct DoubleShockFitResult {
    DoubleShockParams params;
    double sse = 0.0;
    int n_points = 0;
};

struct TwoModeFitResult {
    TwoModeParams params;
    double sse = 0.0;
    int n_points = 0;
};

enum class FitVariant { SingleShock, DoubleShock, TwoMode };

using VariantFitResult = std::variant<FitResult, DoubleShockFitResult, TwoModeFitResult>;

// Sum of squared residuals over the first `horizon` (or all) samples of the
// series, evaluating the curve at the series' own t values.
double sse(const std::function<double(double)>& curve, const NormalizedSeries& series,
           std::optional<int> horizon = std::nullopt);
double sse(const ShockFitParams& p, const NormalizedSeries& series,
           std::optional<int> horizon = std::nullopt);

// Analytic gradient of sse(p, series, horizon) in the parameter order
// (A, B, alpha, C, beta, w, phi).
std::array<double, 7> sse_gradient(const ShockFitParams& p, const NormalizedSeries& series,
                                   std::optional<int> horizon = std::nullopt);

// Three sequential least-squares stages: A from the mean level, (B, alpha)
// on the A-residual via an alpha grid with closed-form B, then
// (C, beta, w, phi) on the remaining residual via a (w, beta) grid with a
// linear solve on the cos/sin basis.
ShockFitParams initialize_stagewise(const NormalizedSeries& series);

// Local minimization from `init`: cyclic per-parameter line searches with w
// adjusted last each cycle, then a damped Gauss-Newton polish with analytic
// Jacobian. The polish is kept only when it lowers the SSE without leaving
// the frequency basin. Non-convergence is reported via converged=false.
FitResult refine_joint(const ShockFitParams& init, const NormalizedSeries& series,
                       const FitConfig& cfg);

// Multi-start over cfg.w_grid: per seed, stagewise init re-anchored at the
// seed frequency, then refine_joint. Results are sorted ascending by SSE
// and duplicate basins (|dw| < 0.05 with SSE within 1%) are merged keeping
// the lower SSE. Throws std::invalid_argument on an empty grid.
std::vector<FitResult> scan_w(const NormalizedSeries& series, const FitConfig& cfg);

// SSE sampled along one parameter with the others frozen. `which` is one of
// A, B, alpha, C, beta, w, phi.
std::vector<std::pair<double, double>> landscape_profile(
    const ShockFitParams& params, const NormalizedSeries& series, const std::string& which,
    double lo, double hi, int steps, std::optional<int> horizon = std::nullopt);

// Best single-shock fit: scan_w winner.
FitResult fit_single(const NormalizedSeries& series, const FitConfig& cfg);

// Second mode fitted on the residual of the best single-shock fit via a
// (w2, beta2) grid with a linear solve, then a joint 11-parameter polish.
TwoModeFitResult fit_two_mode(const NormalizedSeries& series, const FitConfig& cfg);

// Grid search over t0: second-shock terms (D, zeta, Eamp, eta) fitted on
// the frozen single-shock residual for t >= t0, then all parameters but t0
// released jointly; the best t0 by SSE wins.
DoubleShockFitResult fit_double_shock(const NormalizedSeries& series, const FitConfig& cfg,
                                      const std::vector<double>& t0_grid);

// Default t0 grid for fit_double_shock: interior of the series in steps of
// 0.5 days, leaving at least 5 samples on each side.
std::vector<double> default_t0_grid(const NormalizedSeries& series);

VariantFitResult fit_variant(const NormalizedSeries& series, FitVariant variant,
                             const FitConfig& cfg);

}  // namespace oscfit
