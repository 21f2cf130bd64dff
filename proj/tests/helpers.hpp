// Shared test utilities: fixture paths and the two-column TSV loader used
// by the bundled crash-window series.
#pragma once

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "oscfit/series.hpp"

namespace testutil {

inline std::string fixture_path(const std::string& name) {
#ifdef OSCFIT_FIXTURE_DIR
    return std::string(OSCFIT_FIXTURE_DIR) + "/" + name;
#else
    return "tests/fixtures/" + name;
#endif
}

// Loads a "# comment\n# comment\nt\tvalue" fixture into a NormalizedSeries.
// The values are already window-mean normalized; onset is re-detected.
inline oscfit::NormalizedSeries load_series_fixture(const std::string& name) {
    const std::string path = fixture_path(name);
    std::ifstream in(path);
    if (!in) throw std::runtime_error("missing fixture: " + path);
    oscfit::NormalizedSeries out;
    out.label = name;
    out.mean_used = 1.0;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream row(line);
        double t = 0.0, v = 0.0;
        if (!(row >> t >> v))
            throw std::runtime_error("bad fixture row in " + path + ": " + line);
        out.t.push_back(t);
        out.values.push_back(v);
    }
    out.onset = oscfit::shock_onset_index(out.values);
    return out;
}

}  // namespace testutil
