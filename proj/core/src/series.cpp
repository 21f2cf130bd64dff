#include "oscfit/series.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

namespace oscfit {

namespace {

bool valid_iso_date(const std::string& s) {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
    for (std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u})
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    const int month = (s[5] - '0') * 10 + (s[6] - '0');
    const int day = (s[8] - '0') * 10 + (s[9] - '0');
    return month >= 1 && month <= 12 && day >= 1 && day <= 31;
}

std::string strip(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

}  // namespace

NormalizedSeries NormalizedSeries::from_onset() const {
    if (onset == 0) return *this;
    NormalizedSeries out = *this;
    out.t.assign(t.begin() + static_cast<std::ptrdiff_t>(onset), t.end());
    out.values.assign(values.begin() + static_cast<std::ptrdiff_t>(onset), values.end());
    out.onset = 0;
    return out;
}

PriceSeries load_csv(const std::string& path, const std::string& label) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open file: " + path);
    PriceSeries series;
    series.label = label.empty() ? path : label;
    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(in, line)) throw ParseError(path + ": empty file");
    ++lineno;
    if (strip(line) != "date,close")
        throw ParseError(path + ":1: expected header 'date,close'");
    while (std::getline(in, line)) {
        ++lineno;
        const std::string row = strip(line);
        if (row.empty()) continue;
        const std::size_t comma = row.find(',');
        const std::string where = path + ":" + std::to_string(lineno);
        if (comma == std::string::npos)
            throw ParseError(where + ": expected 'date,close' row");
        const std::string date = strip(row.substr(0, comma));
        const std::string num = strip(row.substr(comma + 1));
        if (!valid_iso_date(date))
            throw ParseError(where + ": invalid ISO-8601 date '" + date + "'");
        double close = 0.0;
        try {
            std::size_t used = 0;
            close = std::stod(num, &used);
            if (used != num.size()) throw std::invalid_argument(num);
        } catch (const std::exception&) {
            throw ParseError(where + ": invalid close '" + num + "'");
        }
        if (!(close > 0.0))
            throw ParseError(where + ": close must be positive, got " + num);
        if (!series.rows.empty() && date <= series.rows.back().date)
            throw ParseError(where + ": dates must be strictly increasing");
        series.rows.push_back({date, close});
    }
    return series;
}

NormalizedSeries extract_window(const PriceSeries& series, const CrisisWindow& window) {
    if (window.start >= window.end)
        throw ParseError("extract_window: window start must precede end");
    NormalizedSeries out;
    out.label = series.label;
    out.window_start = window.start;
    out.window_end = window.end;
    double sum = 0.0;
    for (const auto& row : series.rows) {
        if (row.date < window.start || row.date > window.end) continue;
        out.values.push_back(row.close);
        sum += row.close;
    }
    if (out.values.size() < 8)
        throw ParseError("extract_window: fewer than 8 trading days inside " +
                         window.start + ".." + window.end);
    out.mean_used = sum / static_cast<double>(out.values.size());
    out.t.resize(out.values.size());
    for (std::size_t i = 0; i < out.values.size(); ++i) {
        out.values[i] /= out.mean_used;
        out.t[i] = static_cast<double>(i + 1);
    }
    out.onset = shock_onset_index(out.values);
    return out;
}

std::vector<CrisisWindow> builtin_windows() {
    return {
        {"1987", "1987-10-13", "1987-11-08"},
        {"1998", "1998-08-25", "1998-10-14"},
        {"2001", "2001-09-10", "2001-10-22"},
        {"2008", "2008-09-12", "2008-10-27"},
    };
}

std::size_t shock_onset_index(const std::vector<double>& values) {
    if (values.size() < 2) return 0;
    const auto min_it = std::min_element(values.begin(), values.end());
    const std::size_t imin = static_cast<std::size_t>(min_it - values.begin());
    if (imin == 0) return 0;
    const auto max_it = std::max_element(values.begin(), values.begin() + imin);
    return static_cast<std::size_t>(max_it - values.begin());
}

NormalizedSeries synthesize(const std::function<double(double)>& curve, int n,
                            double noise_sigma, std::uint64_t seed,
                            const std::string& label) {
    if (n < 1) throw std::invalid_argument("synthesize: n must be >= 1");
    if (noise_sigma < 0.0)
        throw std::invalid_argument("synthesize: noise_sigma must be >= 0");
    NormalizedSeries out;
    out.label = label;
    out.t.resize(static_cast<std::size_t>(n));
    out.values.resize(static_cast<std::size_t>(n));
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int i = 0; i < n; ++i) {
        const double t = static_cast<double>(i + 1);
        double v = curve(t);
        if (noise_sigma > 0.0) v += noise_sigma * gauss(rng);
        out.t[static_cast<std::size_t>(i)] = t;
        out.values[static_cast<std::size_t>(i)] = v;
    }
    out.mean_used = 1.0;
    out.onset = shock_onset_index(out.values);
    return out;
}

}  // namespace oscfit
