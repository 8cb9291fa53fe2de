#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace riskalloc::detail {

/// Compensated accumulator (Neumaier variant of Kahan summation).
/// Keeps long reductions deterministic and accurate regardless of term count.
class NeumaierSum {
public:
    void add(double x) {
        double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }

    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

inline double compensated_sum(std::span<const double> values) {
    NeumaierSum acc;
    for (double v : values) acc.add(v);
    return acc.value();
}

} // namespace riskalloc::detail
