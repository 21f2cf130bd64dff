// Price-series ingestion, crisis-window extraction, window-mean
// normalization, shock-onset detection, and synthetic series generation.
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "oscfit/errors.hpp"

namespace oscfit {

struct PriceRow {
    std::string date;  // ISO-8601 calendar day, e.g. "1987-10-19"
    double close = 0.0;
};

struct PriceSeries {
    std::string label;
    std::vector<PriceRow> rows;  // dates strictly increasing, closes > 0
};

struct CrisisWindow {
    std::string name;
    std::string start;  // inclusive ISO dates
    std::string end;
};

// Window prices divided by their mean; t holds the 1-based trading-day
// index of each sample (original indices are preserved when a view is
// trimmed, so t need not start at 1).
struct NormalizedSeries {
    std::string label;
    std::vector<double> t;
    std::vector<double> values;
    std::string window_start;
    std::string window_end;
    double mean_used = 0.0;
    // Index of the pre-crash peak: the sample from which the shock response
    // is fitted (see shock_onset_index).
    std::size_t onset = 0;

    std::size_t size() const { return values.size(); }

    // View from the shock onset, keeping the original t values.
    NormalizedSeries from_onset() const;
};

// Parses a `date,close` CSV (UTF-8, ISO-8601 dates, decimal point).
// Throws ParseError with the offending line number on malformed rows,
// non-increasing or duplicate dates, and non-positive closes.
PriceSeries load_csv(const std::string& path, const std::string& label = "");

// Selects rows with start <= date <= end, divides by their mean, attaches
// t = 1..n and the detected shock onset. Requires >= 8 rows in the window.
NormalizedSeries extract_window(const PriceSeries& series, const CrisisWindow& window);

// The four study periods, named "1987", "1998", "2001", "2008".
std::vector<CrisisWindow> builtin_windows();

// Index of the maximum value before the global minimum — the last pre-crash
// peak. Returns 0 when the series opens at its maximum (or is too short).
std::size_t shock_onset_index(const std::vector<double>& values);

// Model curve sampled at t = 1..n plus i.i.d. Gaussian noise; deterministic
// for a given seed.
NormalizedSeries synthesize(const std::function<double(double)>& curve, int n,
                            double noise_sigma, std::uint64_t seed,
                            const std::string& label = "synthetic");

}  // namespace oscfit
