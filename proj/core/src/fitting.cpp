#include "oscfit/fitting.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

namespace oscfit {

namespace {

// Working copy of the (possibly horizon-limited) samples.
struct Samples {
    std::vector<double> t;
    std::vector<double> v;
    double range = 0.0;

    static Samples from(const NormalizedSeries& s, std::optional<int> horizon) {
        if (s.values.empty()) throw ParseError("sse: empty series");
        std::size_t n = s.values.size();
        if (horizon) {
            if (*horizon < 1 || static_cast<std::size_t>(*horizon) > n)
                throw std::invalid_argument("fit horizon out of range");
            n = static_cast<std::size_t>(*horizon);
        }
        Samples out;
        out.t.assign(s.t.begin(), s.t.begin() + static_cast<std::ptrdiff_t>(n));
        out.v.assign(s.values.begin(), s.values.begin() + static_cast<std::ptrdiff_t>(n));
        const auto [lo, hi] = std::minmax_element(out.v.begin(), out.v.end());
        out.range = *hi - *lo;
        return out;
    }

    std::size_t n() const { return t.size(); }
};

using P7 = std::array<double, 7>;

double eval7(const P7& p, double t) {
    return p[0] + p[1] * std::exp(-p[2] * t) +
           p[3] * std::exp(-p[4] * t) * std::cos(p[5] * t - p[6]);
}

double sse7(const P7& p, const Samples& s) {
    double acc = 0.0;
    for (std::size_t i = 0; i < s.n(); ++i) {
        const double r = eval7(p, s.t[i]) - s.v[i];
        acc += r * r;
    }
    return acc;
}

// d model / d (A, B, alpha, C, beta, w, phi) at one sample.
P7 jac_row(const P7& p, double t) {
    const double ea = std::exp(-p[2] * t);
    const double eb = std::exp(-p[4] * t);
    const double co = std::cos(p[5] * t - p[6]);
    const double si = std::sin(p[5] * t - p[6]);
    return {1.0,          ea,  -p[1] * t * ea, eb * co, -p[3] * t * eb * co,
            -p[3] * t * eb * si, p[3] * eb * si};
}

struct Bound {
    double lo, hi, radius;
};

// Trust regions for the per-parameter line searches; order fixed with the
// frequency adjusted last so its variations stay separate from the rest.
constexpr int kOrder[7] = {0, 1, 2, 3, 4, 6, 5};

Bound bound_for(int idx, const FitConfig& cfg) {
    switch (idx) {
        case 0: return {-10.0, 10.0, 2.0};                                   // A
        case 1: return {-50.0, 50.0, 5.0};                                   // B
        case 2: return {cfg.enforce_nonneg_alpha ? 0.0 : -10.0, 10.0, 0.5};  // alpha
        case 3: return {-2.0, 2.0, 0.5};                                     // C
        case 4: return {cfg.enforce_nonneg_beta ? 0.0 : -5.0, 5.0, 0.3};     // beta
        case 5: return {1e-3, 4.0, 0.3};                                     // w
        default: return {-20.0, 20.0, 1.5};                                  // phi
    }
}

// Nearest local minimum along one coordinate: walk a uniform grid downhill
// from the current value, then tighten with golden-section steps.
double line_min(P7 p, int idx, const Samples& s, const Bound& b) {
    constexpr int kSteps = 41;
    constexpr int kGolden = 36;
    const double x0 = p[idx];
    double a = std::max(b.lo, x0 - b.radius);
    double c = std::min(b.hi, x0 + b.radius);
    if (!(c > a)) return std::clamp(x0, b.lo, b.hi);
    std::array<double, kSteps> xs, ss;
    for (int i = 0; i < kSteps; ++i) {
        xs[i] = a + (c - a) * i / (kSteps - 1);
        p[idx] = xs[i];
        ss[i] = sse7(p, s);
    }
    int i = 0;
    for (int j = 1; j < kSteps; ++j)
        if (std::abs(xs[j] - x0) < std::abs(xs[i] - x0)) i = j;
    while (i > 0 && ss[i - 1] < ss[i]) --i;
    while (i < kSteps - 1 && ss[i + 1] < ss[i]) ++i;
    double a2 = xs[std::max(i - 1, 0)];
    double b2 = xs[std::min(i + 1, kSteps - 1)];
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b2 - gr * (b2 - a2);
    double x2 = a2 + gr * (b2 - a2);
    p[idx] = x1;
    double f1 = sse7(p, s);
    p[idx] = x2;
    double f2 = sse7(p, s);
    for (int it = 0; it < kGolden; ++it) {
        if (f1 < f2) {
            b2 = x2;
            x2 = x1;
            f2 = f1;
            x1 = b2 - gr * (b2 - a2);
            p[idx] = x1;
            f1 = sse7(p, s);
        } else {
            a2 = x1;
            x1 = x2;
            f1 = f2;
            x2 = a2 + gr * (b2 - a2);
            p[idx] = x2;
            f2 = sse7(p, s);
        }
    }
    return 0.5 * (a2 + b2);
}

struct CoordResult {
    P7 p;
    double sse;
    int cycles;
    bool converged;
};

CoordResult coordinate_descent(P7 p, const Samples& s, const FitConfig& cfg) {
    double cur = sse7(p, s);
    int cyc = 0;
    bool converged = false;
    for (; cyc < cfg.max_iterations; ++cyc) {
        double inner = cur;
        for (int idx : kOrder) {
            const double old = p[idx];
            p[idx] = line_min(p, idx, s, bound_for(idx, cfg));
            // keep only strict improvements so a converged point cannot
            // drift by line-search round-off
            const double moved = sse7(p, s);
            if (moved < inner)
                inner = moved;
            else
                p[idx] = old;
        }
        const double next = inner;
        const double gain = (cur - next) / std::max(cur, 1e-300);
        cur = next;
        if (gain < cfg.convergence_tol) {
            converged = true;
            ++cyc;
            break;
        }
    }
    return {p, cur, cyc, converged};
}

struct PolishResult {
    P7 p;
    double sse;
    int iterations;
};

// Damped Gauss-Newton (Levenberg-style diagonal damping) with analytic
// Jacobian and box projections.
PolishResult gauss_newton(P7 p, const Samples& s, const FitConfig& cfg, double tol,
                          int max_iter) {
    const double cap_c = 1.5 * s.range;
    double lam = 1e-3;
    double cur = sse7(p, s);
    int it = 0;
    for (; it < max_iter; ++it) {
        Eigen::MatrixXd J(static_cast<Eigen::Index>(s.n()), 7);
        Eigen::VectorXd r(static_cast<Eigen::Index>(s.n()));
        for (std::size_t i = 0; i < s.n(); ++i) {
            const P7 row = jac_row(p, s.t[i]);
            for (int j = 0; j < 7; ++j) J(static_cast<Eigen::Index>(i), j) = row[j];
            r(static_cast<Eigen::Index>(i)) = eval7(p, s.t[i]) - s.v[i];
        }
        const Eigen::VectorXd g = J.transpose() * r;
        const Eigen::MatrixXd H = J.transpose() * J;
        bool accepted = false;
        double rel = 0.0;
        for (int tries = 0; tries < 30; ++tries) {
            Eigen::MatrixXd damped = H;
            for (int j = 0; j < 7; ++j)
                damped(j, j) += lam * std::max(H(j, j), 1e-12);
            const Eigen::VectorXd step = damped.ldlt().solve(-g);
            if (!step.allFinite()) {
                lam *= 10.0;
                continue;
            }
            P7 pn = p;
            for (int j = 0; j < 7; ++j) pn[j] += step(j);
            if (cfg.enforce_nonneg_alpha) pn[2] = std::max(pn[2], 0.0);
            pn[4] = std::clamp(pn[4], cfg.enforce_nonneg_beta ? 0.0 : -5.0, 5.0);
            pn[5] = std::clamp(pn[5], 1e-3, 4.0);
            if (cap_c > 0.0) pn[3] = std::clamp(pn[3], -cap_c, cap_c);
            const double next = sse7(pn, s);
            if (next < cur) {
                rel = (cur - next) / std::max(cur, 1e-300);
                p = pn;
                cur = next;
                lam = std::max(lam / 3.0, 1e-12);
                accepted = true;
                break;
            }
            lam *= 4.0;
        }
        if (!accepted) break;
        if (rel < tol) {
            ++it;
            break;
        }
    }
    return {p, cur, it};
}

// Linear least squares of residual on [e^{-beta t} cos(w t), e^{-beta t} sin(w t)];
// returns (amplitude, phase, sse).
struct CosFit {
    double C, phi, sse;
};

CosFit fit_cos_basis(const std::vector<double>& t, const std::vector<double>& resid,
                     double beta, double w) {
    double s11 = 0.0, s12 = 0.0, s22 = 0.0, b1 = 0.0, b2 = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double e = std::exp(-beta * t[i]);
        const double x1 = e * std::cos(w * t[i]);
        const double x2 = e * std::sin(w * t[i]);
        s11 += x1 * x1;
        s12 += x1 * x2;
        s22 += x2 * x2;
        b1 += x1 * resid[i];
        b2 += x2 * resid[i];
    }
    const double det = s11 * s22 - s12 * s12;
    double a = 0.0, b = 0.0;
    if (std::abs(det) > 1e-300) {
        a = (b1 * s22 - b2 * s12) / det;
        b = (b2 * s11 - b1 * s12) / det;
    }
    double rss = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double e = std::exp(-beta * t[i]);
        const double fit = a * e * std::cos(w * t[i]) + b * e * std::sin(w * t[i]);
        const double r = resid[i] - fit;
        rss += r * r;
    }
    return {std::hypot(a, b), std::atan2(b, a), rss};
}

P7 stagewise(const Samples& s) {
    const std::size_t n = s.n();
    double mean = 0.0;
    for (double v : s.v) mean += v;
    mean /= static_cast<double>(n);

    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = s.v[i] - mean;

    // Stage 2: alpha grid with the closed-form least-squares B.
    double best_sse = std::numeric_limits<double>::infinity();
    double B = 0.0, alpha = 0.0;
    for (double al = 0.02; al <= 3.0 + 1e-12; al += 0.02) {
        double de = 0.0, ee = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double e = std::exp(-al * s.t[i]);
            de += d[i] * e;
            ee += e * e;
        }
        const double Bc = ee > 0.0 ? de / ee : 0.0;
        double rss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double r = d[i] - Bc * std::exp(-al * s.t[i]);
            rss += r * r;
        }
        if (rss < best_sse) {
            best_sse = rss;
            B = Bc;
            alpha = al;
        }
    }

    std::vector<double> d2(n);
    for (std::size_t i = 0; i < n; ++i) d2[i] = d[i] - B * std::exp(-alpha * s.t[i]);

    // Stage 3: (w, beta) grid with a linear solve on the cos/sin basis.
    best_sse = std::numeric_limits<double>::infinity();
    double C = 0.0, beta = 0.0, w = 0.2, phi = 0.0;
    for (double wc = 0.2; wc <= 4.0 + 1e-12; wc += 0.04) {
        for (double be = 0.0; be <= 1.0 + 1e-12; be += 0.02) {
            const CosFit f = fit_cos_basis(s.t, d2, be, wc);
            if (f.sse < best_sse) {
                best_sse = f.sse;
                C = f.C;
                beta = be;
                w = wc;
                phi = f.phi;
            }
        }
    }
    return {mean, B, alpha, C, beta, w, phi};
}

FitResult run_seed(const Samples& s, double w0, const FitConfig& cfg) {
    P7 p = stagewise(s);
    p[5] = w0;
    // Re-anchor the oscillatory stage at the seed frequency.
    std::vector<double> d2(s.n());
    for (std::size_t i = 0; i < s.n(); ++i)
        d2[i] = s.v[i] - p[0] - p[1] * std::exp(-p[2] * s.t[i]);
    const CosFit f = fit_cos_basis(s.t, d2, p[4], w0);
    p[3] = f.C;
    p[6] = f.phi;

    const CoordResult cd = coordinate_descent(p, s, cfg);
    const PolishResult gn = gauss_newton(cd.p, s, cfg, 1e-12, 200);

    FitResult out;
    out.seed_w = w0;
    out.n_points = static_cast<int>(s.n());
    out.iterations = cd.cycles + gn.iterations;
    out.converged = cd.converged;
    // Keep the polish only when it improves the error without drifting to a
    // different frequency basin.
    if (gn.sse < cd.sse && std::abs(gn.p[5] - cd.p[5]) <= 0.05) {
        out.params = ShockFitParams::from_array(gn.p);
        out.sse = gn.sse;
    } else {
        out.params = ShockFitParams::from_array(cd.p);
        out.sse = cd.sse;
    }
    return out;
}

void merge_basins(std::vector<FitResult>& ranked) {
    std::vector<FitResult> merged;
    for (const FitResult& r : ranked) {
        bool dup = false;
        for (const FitResult& m : merged) {
            const double ds = std::abs(r.sse - m.sse);
            // the absolute floor merges numerically-zero duplicates whose
            // relative difference is meaningless
            if (std::abs(r.params.w - m.params.w) < 0.05 &&
                ds <= 0.01 * std::max(r.sse, m.sse) + 1e-12) {
                dup = true;
                break;
            }
        }
        if (!dup) merged.push_back(r);
    }
    ranked = std::move(merged);
}

// A seed that ends pinned to the frequency bounds is pushing against the box
// constraint, not sitting in a stationary point; such results are kept only
// when nothing interior was found.
void drop_bound_pinned(std::vector<FitResult>& ranked) {
    std::vector<FitResult> interior;
    for (const FitResult& r : ranked)
        if (r.params.w > 1e-3 + 1e-9 && r.params.w < 4.0 - 1e-9) interior.push_back(r);
    if (!interior.empty()) ranked = std::move(interior);
}

// Flat, curved valleys stall the coordinate-descent stage far from any
// stationary point. To decide whether such a straggler belongs to an
// already-found basin, chase it downhill with an unrestricted Gauss-Newton
// run; if it lands inside a better basin we merge it, otherwise the original
// (conservative) result is kept unchanged. The chase never creates or
// improves basins, so genuine distinct minima are unaffected.
void consolidate_stragglers(std::vector<FitResult>& ranked, const Samples& s,
                            const FitConfig& cfg) {
    if (ranked.size() < 2) return;
    std::vector<FitResult> kept;
    kept.push_back(ranked.front());
    for (std::size_t i = 1; i < ranked.size(); ++i) {
        const FitResult& r = ranked[i];
        const PolishResult chased = gauss_newton(r.params.as_array(), s, cfg, 1e-12, 200);
        bool absorbed = false;
        for (const FitResult& better : kept) {
            if (chased.sse <= better.sse * (1.0 + 0.01) + 1e-12 &&
                std::abs(chased.p[5] - better.params.w) < 0.05) {
                absorbed = true;
                break;
            }
        }
        if (!absorbed) kept.push_back(r);
    }
    ranked = std::move(kept);
}

}  // namespace

FitConfig FitConfig::scan_defaults() {
    FitConfig cfg;
    for (double w = 0.2; w <= 4.0 + 1e-9; w += 0.2) cfg.w_grid.push_back(w);
    cfg.convergence_tol = 1e-3;
    return cfg;
}

FitConfig FitConfig::refine_defaults() {
    FitConfig cfg;
    for (double w = 0.2; w <= 4.0 + 1e-9; w += 0.2) cfg.w_grid.push_back(w);
    cfg.convergence_tol = 1e-6;
    return cfg;
}

double sse(const std::function<double(double)>& curve, const NormalizedSeries& series,
           std::optional<int> horizon) {
    const Samples s = Samples::from(series, horizon);
    double acc = 0.0;
    for (std::size_t i = 0; i < s.n(); ++i) {
        const double r = curve(s.t[i]) - s.v[i];
        acc += r * r;
    }
    return acc;
}

double sse(const ShockFitParams& p, const NormalizedSeries& series,
           std::optional<int> horizon) {
    return sse7(p.as_array(), Samples::from(series, horizon));
}

std::array<double, 7> sse_gradient(const ShockFitParams& p, const NormalizedSeries& series,
                                   std::optional<int> horizon) {
    const Samples s = Samples::from(series, horizon);
    const P7 a = p.as_array();
    P7 g{};
    for (std::size_t i = 0; i < s.n(); ++i) {
        const double r = eval7(a, s.t[i]) - s.v[i];
        const P7 row = jac_row(a, s.t[i]);
        for (int j = 0; j < 7; ++j) g[j] += 2.0 * r * row[j];
    }
    return g;
}

ShockFitParams initialize_stagewise(const NormalizedSeries& series) {
    const Samples s = Samples::from(series, std::nullopt);
    if (s.n() < 8)
        throw ParseError("initialize_stagewise: need at least 8 samples");
    return ShockFitParams::from_array(stagewise(s));
}

FitResult refine_joint(const ShockFitParams& init, const NormalizedSeries& series,
                       const FitConfig& cfg) {
    const Samples s = Samples::from(series, cfg.fit_horizon);
    const CoordResult cd = coordinate_descent(init.as_array(), s, cfg);
    const PolishResult gn = gauss_newton(cd.p, s, cfg, 1e-12, 200);
    FitResult out;
    out.seed_w = init.w;
    out.n_points = static_cast<int>(s.n());
    out.iterations = cd.cycles + gn.iterations;
    out.converged = cd.converged;
    if (gn.sse < cd.sse && std::abs(gn.p[5] - cd.p[5]) <= 0.05) {
        out.params = ShockFitParams::from_array(gn.p);
        out.sse = gn.sse;
    } else {
        out.params = ShockFitParams::from_array(cd.p);
        out.sse = cd.sse;
    }
    return out;
}

std::vector<FitResult> scan_w(const NormalizedSeries& series, const FitConfig& cfg) {
    if (cfg.w_grid.empty()) throw std::invalid_argument("scan_w: empty w grid");
    const Samples s = Samples::from(series, cfg.fit_horizon);
    if (s.n() < 8) throw ParseError("scan_w: need at least 8 samples");
    std::vector<FitResult> results;
    results.reserve(cfg.w_grid.size());
    for (double w0 : cfg.w_grid) {
        if (!(w0 > 0.0)) throw std::invalid_argument("scan_w: grid values must be > 0");
        results.push_back(run_seed(s, w0, cfg));
    }
    std::stable_sort(results.begin(), results.end(),
                     [](const FitResult& a, const FitResult& b) { return a.sse < b.sse; });
    drop_bound_pinned(results);
    merge_basins(results);
    consolidate_stragglers(results, s, cfg);
    return results;
}

std::vector<std::pair<double, double>> landscape_profile(
    const ShockFitParams& params, const NormalizedSeries& series, const std::string& which,
    double lo, double hi, int steps, std::optional<int> horizon) {
    if (steps < 2) throw std::invalid_argument("landscape_profile: steps must be >= 2");
    if (!(lo < hi)) throw std::invalid_argument("landscape_profile: lo must be < hi");
    static const std::array<std::string, 7> names = {"A", "B", "alpha", "C",
                                                     "beta", "w", "phi"};
    const auto it = std::find(names.begin(), names.end(), which);
    if (it == names.end())
        throw std::invalid_argument("landscape_profile: unknown parameter '" + which + "'");
    const int idx = static_cast<int>(it - names.begin());
    const Samples s = Samples::from(series, horizon);
    P7 p = params.as_array();
    std::vector<std::pair<double, double>> out;
    out.reserve(static_cast<std::size_t>(steps));
    for (int i = 0; i < steps; ++i) {
        const double x = lo + (hi - lo) * i / (steps - 1);
        p[idx] = x;
        out.emplace_back(x, sse7(p, s));
    }
    return out;
}

FitResult fit_single(const NormalizedSeries& series, const FitConfig& cfg) {
    return scan_w(series, cfg).front();
}

namespace {

using P11 = std::array<double, 11>;

// Shared 11-parameter damped Gauss-Newton used by both variants; the model
// evaluation and Jacobian are supplied per variant.
template <typename Eval, typename Jac>
std::pair<P11, double> polish11(P11 p, const Samples& s, Eval eval, Jac jac,
                                const std::function<void(P11&)>& project, int max_iter) {
    double lam = 1e-3;
    auto total = [&](const P11& q) {
        double acc = 0.0;
        for (std::size_t i = 0; i < s.n(); ++i) {
            const double r = eval(q, s.t[i]) - s.v[i];
            acc += r * r;
        }
        return acc;
    };
    double cur = total(p);
    for (int it = 0; it < max_iter; ++it) {
        Eigen::MatrixXd J(static_cast<Eigen::Index>(s.n()), 11);
        Eigen::VectorXd r(static_cast<Eigen::Index>(s.n()));
        for (std::size_t i = 0; i < s.n(); ++i) {
            const P11 row = jac(p, s.t[i]);
            for (int j = 0; j < 11; ++j) J(static_cast<Eigen::Index>(i), j) = row[j];
            r(static_cast<Eigen::Index>(i)) = eval(p, s.t[i]) - s.v[i];
        }
        const Eigen::VectorXd g = J.transpose() * r;
        const Eigen::MatrixXd H = J.transpose() * J;
        bool accepted = false;
        double rel = 0.0;
        for (int tries = 0; tries < 30; ++tries) {
            Eigen::MatrixXd damped = H;
            for (int j = 0; j < 11; ++j)
                damped(j, j) += lam * std::max(H(j, j), 1e-12);
            const Eigen::VectorXd step = damped.ldlt().solve(-g);
            if (!step.allFinite()) {
                lam *= 10.0;
                continue;
            }
            P11 pn = p;
            for (int j = 0; j < 11; ++j) pn[j] += step(j);
            project(pn);
            const double next = total(pn);
            if (next < cur) {
                rel = (cur - next) / std::max(cur, 1e-300);
                p = pn;
                cur = next;
                lam = std::max(lam / 3.0, 1e-12);
                accepted = true;
                break;
            }
            lam *= 4.0;
        }
        if (!accepted) break;
        if (rel < 1e-12) break;
    }
    return {p, cur};
}

}  // namespace

TwoModeFitResult fit_two_mode(const NormalizedSeries& series, const FitConfig& cfg) {
    if (series.size() < 11)
        throw ParseError("fit_two_mode: need at least 11 samples");
    const Samples s = Samples::from(series, cfg.fit_horizon);
    const FitResult single = fit_single(series, cfg);
    const P7 base = single.params.as_array();

    std::vector<double> resid(s.n());
    for (std::size_t i = 0; i < s.n(); ++i) resid[i] = s.v[i] - eval7(base, s.t[i]);

    double best_sse = std::numeric_limits<double>::infinity();
    double C2 = 0.0, b2 = 0.0, w2 = 0.2, p2 = 0.0;
    for (double wc = 0.2; wc <= 4.0 + 1e-12; wc += 0.04) {
        for (double be = 0.0; be <= 1.0 + 1e-12; be += 0.02) {
            const CosFit f = fit_cos_basis(s.t, resid, be, wc);
            if (f.sse < best_sse) {
                best_sse = f.sse;
                C2 = f.C;
                b2 = be;
                w2 = wc;
                p2 = f.phi;
            }
        }
    }

    // Params: A, B, alpha, C1, beta1, w1, phi1, C2, beta2, w2, phi2.
    P11 q = {base[0], base[1], base[2], base[3], base[4], base[5],
             base[6], C2,      b2,      w2,      p2};
    const double cap_c = 1.5 * s.range;
    auto eval = [](const P11& p, double t) {
        return p[0] + p[1] * std::exp(-p[2] * t) +
               p[3] * std::exp(-p[4] * t) * std::cos(p[5] * t - p[6]) +
               p[7] * std::exp(-p[8] * t) * std::cos(p[9] * t - p[10]);
    };
    auto jac = [](const P11& p, double t) {
        const double ea = std::exp(-p[2] * t);
        const double e1 = std::exp(-p[4] * t);
        const double c1 = std::cos(p[5] * t - p[6]);
        const double s1 = std::sin(p[5] * t - p[6]);
        const double e2 = std::exp(-p[8] * t);
        const double c2 = std::cos(p[9] * t - p[10]);
        const double s2 = std::sin(p[9] * t - p[10]);
        return P11{1.0,
                   ea,
                   -p[1] * t * ea,
                   e1 * c1,
                   -p[3] * t * e1 * c1,
                   -p[3] * t * e1 * s1,
                   p[3] * e1 * s1,
                   e2 * c2,
                   -p[7] * t * e2 * c2,
                   -p[7] * t * e2 * s2,
                   p[7] * e2 * s2};
    };
    const double w1_anchor = q[5], w2_anchor = q[9];
    std::function<void(P11&)> project = [&](P11& p) {
        if (cfg.enforce_nonneg_alpha) p[2] = std::max(p[2], 0.0);
        const double beta_lo = cfg.enforce_nonneg_beta ? 0.0 : -5.0;
        p[4] = std::clamp(p[4], beta_lo, 5.0);
        p[8] = std::clamp(p[8], beta_lo, 5.0);
        p[5] = std::clamp(p[5], 1e-3, 4.0);
        p[9] = std::clamp(p[9], 1e-3, 4.0);
        if (cap_c > 0.0) {
            p[3] = std::clamp(p[3], -cap_c, cap_c);
            p[7] = std::clamp(p[7], -cap_c, cap_c);
        }
    };
    double staged = 0.0;
    for (std::size_t i = 0; i < s.n(); ++i) {
        const double r = eval(q, s.t[i]) - s.v[i];
        staged += r * r;
    }
    auto [qp, sp] = polish11(q, s, eval, jac, project, 200);
    // Keep the joint polish only inside the staged frequency basins.
    if (sp < staged && std::abs(qp[5] - w1_anchor) <= 0.05 &&
        std::abs(qp[9] - w2_anchor) <= 0.05) {
        q = qp;
        staged = sp;
    }

    TwoModeFitResult out;
    out.params.A = q[0];
    out.params.B = q[1];
    out.params.alpha = q[2];
    out.params.modes[0] = {q[3], q[4], q[5], q[6]};
    out.params.modes[1] = {q[7], q[8], q[9], q[10]};
    out.sse = staged;
    out.n_points = static_cast<int>(s.n());
    return out;
}

std::vector<double> default_t0_grid(const NormalizedSeries& series) {
    std::vector<double> grid;
    if (series.t.size() < 11) return grid;
    const double lo = series.t[5];
    const double hi = series.t[series.t.size() - 6];
    for (double t0 = lo; t0 <= hi + 1e-9; t0 += 0.5) grid.push_back(t0);
    return grid;
}

DoubleShockFitResult fit_double_shock(const NormalizedSeries& series, const FitConfig& cfg,
                                      const std::vector<double>& t0_grid) {
    if (series.size() < 12)
        throw ParseError("fit_double_shock: need at least 12 samples");
    if (t0_grid.empty())
        throw std::invalid_argument("fit_double_shock: empty t0 grid");
    const Samples s = Samples::from(series, cfg.fit_horizon);
    const FitResult single = fit_single(series, cfg);
    const P7 base = single.params.as_array();
    const double cap_c = 1.5 * s.range;

    DoubleShockFitResult best;
    best.sse = std::numeric_limits<double>::infinity();
    best.n_points = static_cast<int>(s.n());

    for (double t0 : t0_grid) {
        // Stage: (D, zeta, Eamp, eta) on the frozen base residual, with a
        // zeta grid and a 3-column linear solve for the rest.
        double stage_best = std::numeric_limits<double>::infinity();
        double D = 0.0, zeta = 0.02, Eamp = 0.0, eta = 0.0;
        for (double z = 0.02; z <= 3.0 + 1e-12; z += 0.05) {
            Eigen::Matrix3d M = Eigen::Matrix3d::Zero();
            Eigen::Vector3d rhs = Eigen::Vector3d::Zero();
            for (std::size_t i = 0; i < s.n(); ++i) {
                const double tau = s.t[i] - t0;
                if (tau < 0.0) continue;
                const double resid = s.v[i] - eval7(base, s.t[i]);
                const Eigen::Vector3d x(std::exp(-z * tau),
                                        std::exp(-base[4] * tau) * std::cos(base[5] * tau),
                                        std::exp(-base[4] * tau) * std::sin(base[5] * tau));
                M += x * x.transpose();
                rhs += x * resid;
            }
            const Eigen::Vector3d coef =
                (M + 1e-12 * Eigen::Matrix3d::Identity()).ldlt().solve(rhs);
            double rss = 0.0;
            for (std::size_t i = 0; i < s.n(); ++i) {
                const double tau = s.t[i] - t0;
                if (tau < 0.0) continue;
                const double resid = s.v[i] - eval7(base, s.t[i]);
                const double fit =
                    coef(0) * std::exp(-z * tau) +
                    std::exp(-base[4] * tau) *
                        (coef(1) * std::cos(base[5] * tau) + coef(2) * std::sin(base[5] * tau));
                const double r = resid - fit;
                rss += r * r;
            }
            if (rss < stage_best) {
                stage_best = rss;
                D = coef(0);
                zeta = z;
                Eamp = std::hypot(coef(1), coef(2));
                eta = std::atan2(coef(2), coef(1));
            }
        }

        // Release everything but t0 jointly.
        // Params: A, B, alpha, C, beta, w, phi, D, zeta, Eamp, eta.
        P11 q = {base[0], base[1], base[2], base[3], base[4], base[5],
                 base[6], D,       zeta,    Eamp,    eta};
        auto eval = [t0](const P11& p, double t) {
            double v = p[0] + p[1] * std::exp(-p[2] * t) +
                       p[3] * std::exp(-p[4] * t) * std::cos(p[5] * t - p[6]);
            const double tau = t - t0;
            if (tau >= 0.0)
                v += p[7] * std::exp(-p[8] * tau) +
                     p[9] * std::exp(-p[4] * tau) * std::cos(p[5] * tau - p[10]);
            return v;
        };
        auto jac = [t0](const P11& p, double t) {
            const double ea = std::exp(-p[2] * t);
            const double eb = std::exp(-p[4] * t);
            const double co = std::cos(p[5] * t - p[6]);
            const double si = std::sin(p[5] * t - p[6]);
            P11 row = {1.0,
                       ea,
                       -p[1] * t * ea,
                       eb * co,
                       -p[3] * t * eb * co,
                       -p[3] * t * eb * si,
                       p[3] * eb * si,
                       0.0,
                       0.0,
                       0.0,
                       0.0};
            const double tau = t - t0;
            if (tau >= 0.0) {
                const double ez = std::exp(-p[8] * tau);
                const double e2 = std::exp(-p[4] * tau);
                const double c2 = std::cos(p[5] * tau - p[10]);
                const double s2 = std::sin(p[5] * tau - p[10]);
                row[4] += -p[9] * tau * e2 * c2;  // shared beta
                row[5] += -p[9] * tau * e2 * s2;  // shared w
                row[7] = ez;
                row[8] = -p[7] * tau * ez;
                row[9] = e2 * c2;
                row[10] = p[9] * e2 * s2;
            }
            return row;
        };
        std::function<void(P11&)> project = [&](P11& p) {
            if (cfg.enforce_nonneg_alpha) p[2] = std::max(p[2], 0.0);
            p[4] = std::clamp(p[4], cfg.enforce_nonneg_beta ? 0.0 : -5.0, 5.0);
            p[5] = std::clamp(p[5], 1e-3, 4.0);
            if (cap_c > 0.0) p[3] = std::clamp(p[3], -cap_c, cap_c);
            p[8] = std::clamp(p[8], 0.02, 3.0);
        };
        auto [qp, sp] = polish11(q, s, eval, jac, project, 200);
        if (sp < best.sse) {
            best.sse = sp;
            best.params.base = ShockFitParams::from_array(
                {qp[0], qp[1], qp[2], qp[3], qp[4], qp[5], qp[6]});
            best.params.D = qp[7];
            best.params.zeta = qp[8];
            best.params.Eamp = qp[9];
            best.params.eta = qp[10];
            best.params.t0 = t0;
        }
    }
    return best;
}

VariantFitResult fit_variant(const NormalizedSeries& series, FitVariant variant,
                             const FitConfig& cfg) {
    switch (variant) {
        case FitVariant::SingleShock: return fit_single(series, cfg);
        case FitVariant::DoubleShock:
            return fit_double_shock(series, cfg, default_t0_grid(series));
        case FitVariant::TwoMode: return fit_two_mode(series, cfg);
    }
    throw std::invalid_argument("fit_variant: unknown variant");
}

}  // namespace oscfit
