// Return statistics and cross-market correlation: log-returns, the
// log-density histogram, volatility, Pearson correlation matrices, and the
// dominant eigenvalue (market mode) via power iteration.
#pragma once

#include <map>
#include <string>
#include <vector>

#include "oscfit/errors.hpp"
#include "oscfit/series.hpp"

namespace oscfit {

struct ReturnSeries {
    std::string label;
    std::vector<std::string> dates;  // date of each return (the later day)
    std::vector<double> values;      // ln(P_t) - ln(P_{t-1})
};

struct LogDensityBar {
    double left_edge = 0.0;
    std::size_t count = 0;
    double log_density = 0.0;  // ln(1 + count)
};

struct LogDensityHistogram {
    double bin_width = 0.0;
    std::vector<LogDensityBar> bars;  // occupied bins only, ascending edges
};

struct CorrelationSummary {
    std::vector<std::string> labels;
    std::vector<std::vector<double>> matrix;
    double avg_offdiag = 0.0;
    double lambda_max = 0.0;
};

ReturnSeries log_returns(const PriceSeries& prices);

// Bins aligned so one edge sits exactly at 0; empty bins are omitted.
LogDensityHistogram log_density_histogram(const ReturnSeries& returns, double bin_width);

// Sample standard deviation (divisor n-1).
double volatility(const ReturnSeries& returns);

// Pearson correlations of log-returns joined on shared dates (a day missing
// in any market drops that day for all markets).
CorrelationSummary correlation_matrix(const std::vector<ReturnSeries>& series);

double average_correlation(const std::vector<std::vector<double>>& matrix);

// Dominant eigenvalue by power iteration; |lambda_{k+1} - lambda_k| < tol
// stops it. Throws NumericalError if the cap is exhausted.
double largest_eigenvalue(const std::vector<std::vector<double>>& matrix,
                          double tol = 1e-12, int max_iterations = 100000);

}  // namespace oscfit
