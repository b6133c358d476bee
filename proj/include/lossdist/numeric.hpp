#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace lossdist {

// Neumaier-compensated accumulator. Used wherever the spec of a quantity is a
// plain sum but the term count is large (power sums, quadrature mixing, batch
// merges), so that chunking of the work cannot leak into results.
class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

inline double compensated_total(const std::vector<double>& xs) {
    CompensatedSum s;
    for (double x : xs) s.add(x);
    return s.value();
}

} // namespace lossdist
