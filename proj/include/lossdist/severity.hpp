#pragma once

#include <vector>

namespace lossdist {

// Exposure-size distribution on the integers {0..m}; pmf[j] = P{Z = j}.
struct Severity {
    std::vector<double> pmf;

    int max_value() const { return static_cast<int>(pmf.size()) - 1; }
    double mean() const;
    double second_moment() const;

    // Entries non-negative and summing to 1 within 1e-12; throws input_error.
    void validate() const;
};

} // namespace lossdist
