#include "oscfit/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace oscfit {

ReturnSeries log_returns(const PriceSeries& prices) {
    if (prices.rows.size() < 2)
        throw ParseError("log_returns: need at least 2 prices");
    ReturnSeries out;
    out.label = prices.label;
    out.dates.reserve(prices.rows.size() - 1);
    out.values.reserve(prices.rows.size() - 1);
    for (std::size_t i = 1; i < prices.rows.size(); ++i) {
        const double prev = prices.rows[i - 1].close;
        const double cur = prices.rows[i].close;
        if (!(prev > 0.0) || !(cur > 0.0))
            throw ParseError("log_returns: prices must be positive");
        out.dates.push_back(prices.rows[i].date);
        out.values.push_back(std::log(cur) - std::log(prev));
    }
    return out;
}

LogDensityHistogram log_density_histogram(const ReturnSeries& returns, double bin_width) {
    if (!(bin_width > 0.0))
        throw std::invalid_argument("log_density_histogram: bin_width must be > 0");
    std::map<long long, std::size_t> counts;
    for (double r : returns.values) {
        const long long idx = static_cast<long long>(std::floor(r / bin_width));
        ++counts[idx];
    }
    LogDensityHistogram out;
    out.bin_width = bin_width;
    out.bars.reserve(counts.size());
    for (const auto& [idx, count] : counts) {
        out.bars.push_back({static_cast<double>(idx) * bin_width, count,
                            std::log1p(static_cast<double>(count))});
    }
    return out;
}

double volatility(const ReturnSeries& returns) {
    const std::size_t n = returns.values.size();
    if (n < 2) throw ParseError("volatility: need at least 2 returns");
    double mean = 0.0;
    for (double v : returns.values) mean += v;
    mean /= static_cast<double>(n);
    double acc = 0.0;
    for (double v : returns.values) acc += (v - mean) * (v - mean);
    return std::sqrt(acc / static_cast<double>(n - 1));
}

CorrelationSummary correlation_matrix(const std::vector<ReturnSeries>& series) {
    const std::size_t n = series.size();
    if (n < 2) throw ParseError("correlation_matrix: need at least 2 series");

    // Inner join on dates: a day missing in any market drops that day.
    std::map<std::string, std::size_t> shared;
    for (std::size_t i = 0; i < series[0].dates.size(); ++i)
        shared.emplace(series[0].dates[i], 1);
    for (std::size_t k = 1; k < n; ++k) {
        std::set<std::string> have(series[k].dates.begin(), series[k].dates.end());
        for (auto it = shared.begin(); it != shared.end();)
            it = have.count(it->first) ? std::next(it) : shared.erase(it);
    }
    if (shared.size() < 3)
        throw ParseError("correlation_matrix: fewer than 3 shared dates");

    std::vector<std::vector<double>> aligned(n, std::vector<double>(shared.size()));
    for (std::size_t k = 0; k < n; ++k) {
        std::map<std::string, double> by_date;
        for (std::size_t i = 0; i < series[k].dates.size(); ++i)
            by_date[series[k].dates[i]] = series[k].values[i];
        std::size_t j = 0;
        for (const auto& [date, _] : shared) aligned[k][j++] = by_date[date];
    }

    const std::size_t m = shared.size();
    std::vector<double> mean(n, 0.0), sd(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        for (double v : aligned[k]) mean[k] += v;
        mean[k] /= static_cast<double>(m);
        for (double v : aligned[k]) sd[k] += (v - mean[k]) * (v - mean[k]);
        sd[k] = std::sqrt(sd[k]);
        if (!(sd[k] > 0.0))
            throw ParseError("correlation_matrix: constant series '" + series[k].label +
                             "' has undefined correlation");
    }

    CorrelationSummary out;
    out.labels.reserve(n);
    for (const auto& s : series) out.labels.push_back(s.label);
    out.matrix.assign(n, std::vector<double>(n, 1.0));
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = a + 1; b < n; ++b) {
            double dot = 0.0;
            for (std::size_t j = 0; j < m; ++j)
                dot += (aligned[a][j] - mean[a]) * (aligned[b][j] - mean[b]);
            const double c = dot / (sd[a] * sd[b]);
            out.matrix[a][b] = out.matrix[b][a] = c;
        }
    }
    out.avg_offdiag = average_correlation(out.matrix);
    out.lambda_max = largest_eigenvalue(out.matrix);
    return out;
}

double average_correlation(const std::vector<std::vector<double>>& matrix) {
    const std::size_t n = matrix.size();
    if (n < 2) throw std::invalid_argument("average_correlation: need n >= 2");
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j) acc += matrix[i][j];
    return acc / static_cast<double>(n * (n - 1));
}

double largest_eigenvalue(const std::vector<std::vector<double>>& matrix, double tol,
                          int max_iterations) {
    const std::size_t n = matrix.size();
    if (n == 0) throw std::invalid_argument("largest_eigenvalue: empty matrix");
    for (const auto& row : matrix)
        if (row.size() != n)
            throw std::invalid_argument("largest_eigenvalue: matrix must be square");

    // Deterministic start; the small index-dependent tilt breaks symmetric
    // ties without a random restart.
    std::vector<double> x(n), y(n);
    double norm0 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = 1.0 + 1e-6 * static_cast<double>(i + 1);
        norm0 += x[i] * x[i];
    }
    norm0 = std::sqrt(norm0);
    for (double& xi : x) xi /= norm0;

    double lambda = 0.0;
    for (int it = 0; it < max_iterations; ++it) {
        double norm = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < n; ++j) acc += matrix[i][j] * x[j];
            y[i] = acc;
            norm += acc * acc;
        }
        norm = std::sqrt(norm);
        if (!(norm > 0.0)) return 0.0;  // x in the null space: zero matrix case
        double rayleigh = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            rayleigh += x[i] * y[i];
            x[i] = y[i] / norm;
        }
        if (it > 0 && std::abs(rayleigh - lambda) < tol) return rayleigh;
        lambda = rayleigh;
    }
    throw NumericalError("largest_eigenvalue: power iteration did not converge");
}

}  // namespace oscfit
