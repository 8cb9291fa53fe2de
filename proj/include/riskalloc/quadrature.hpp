#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "riskalloc/detail/numeric.hpp"
#include "riskalloc/errors.hpp"

namespace riskalloc {

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    std::size_t intervals = 0;
};

namespace detail {

// 15-point Gauss-Kronrod pair (7-point Gauss embedded). Abscissae and
// weights from QUADPACK, evaluated to 80 decimal digits by L. W. Fullerton.
// All nodes are interior, so integrable endpoint singularities are never
// evaluated at the endpoints themselves.
inline constexpr double kGk15Nodes[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
};

inline constexpr double kGk15Weights[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
};

inline constexpr double kGauss7Weights[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
};

struct GkSegment {
    double a = 0.0;
    double b = 0.0;
    double value = 0.0;
    double error = 0.0;
    bool splittable = true;

    bool operator<(const GkSegment& other) const {
        // max-heap keyed on error; unsplittable segments sink
        if (splittable != other.splittable) return !splittable;
        return error < other.error;
    }
};

template <class F>
GkSegment gk15_apply(F& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);

    // Node arithmetic may round onto a segment endpoint; clamp to the open
    // interval so integrable endpoint singularities are never evaluated at
    // the singular point itself.
    const double lo = std::nextafter(a, b);
    const double hi = std::nextafter(b, a);
    auto eval = [&](double x) {
        x = std::clamp(x, lo, hi);
        double v = f(x);
        if (!std::isfinite(v)) {
            raise(errc::quadrature_non_convergence,
                  "integrand returned a non-finite value at x = " + std::to_string(x));
        }
        return v;
    };

    const double fc = eval(center);
    double result_gauss = fc * kGauss7Weights[3];
    double result_kronrod = fc * kGk15Weights[7];
    double result_abs = std::abs(result_kronrod);

    double fv_low[7], fv_high[7];
    for (int j = 0; j < 7; ++j) {
        const double offset = half * kGk15Nodes[j];
        const double f_low = eval(center - offset);
        const double f_high = eval(center + offset);
        fv_low[j] = f_low;
        fv_high[j] = f_high;
        const double pair_sum = f_low + f_high;
        result_kronrod += kGk15Weights[j] * pair_sum;
        result_abs += kGk15Weights[j] * (std::abs(f_low) + std::abs(f_high));
        if (j % 2 == 1) {
            result_gauss += kGauss7Weights[j / 2] * pair_sum;
        }
    }

    const double mean = result_kronrod * 0.5;
    double result_asc = kGk15Weights[7] * std::abs(fc - mean);
    for (int j = 0; j < 7; ++j) {
        result_asc +=
            kGk15Weights[j] * (std::abs(fv_low[j] - mean) + std::abs(fv_high[j] - mean));
    }
    result_asc *= std::abs(half);
    result_abs *= std::abs(half);

    double err = std::abs((result_kronrod - result_gauss) * half);
    if (result_asc != 0.0 && err != 0.0) {
        err = result_asc * std::min(1.0, std::pow(200.0 * err / result_asc, 1.5));
    }
    const double epsilon = std::numeric_limits<double>::epsilon();
    const double underflow = std::numeric_limits<double>::min();
    if (result_abs > underflow / (50.0 * epsilon)) {
        err = std::max(err, 50.0 * epsilon * result_abs);
    }

    GkSegment seg;
    seg.a = a;
    seg.b = b;
    seg.value = result_kronrod * half;
    seg.error = err;
    return seg;
}

} // namespace detail

/// Adaptive Gauss-Kronrod integration of f over [lo, hi] to absolute
/// tolerance abs_tol. Splits the worst segment until the summed error
/// estimate meets the tolerance; max_intervals turns pathological
/// integrands into an explicit error instead of an endless refinement.
template <class F>
QuadratureResult integrate_adaptive(F&& f, double lo, double hi, double abs_tol,
                                    std::size_t max_intervals = 1'000'000) {
    if (!(abs_tol > 0.0)) {
        raise(errc::quadrature_non_convergence, "tolerance must be positive");
    }
    if (!(hi > lo)) {
        raise(errc::quadrature_non_convergence, "empty integration interval");
    }

    std::vector<detail::GkSegment> heap;
    heap.push_back(detail::gk15_apply(f, lo, hi));

    auto exact_error = [&heap] {
        detail::NeumaierSum e;
        for (const auto& s : heap) e.add(s.error);
        return e.value();
    };

    // Running estimate of the summed error, resynced against an exact pass
    // whenever it claims convergence, so incremental drift can neither stop
    // refinement early nor keep it going forever.
    double err_sum = heap.front().error;
    bool refinable = true;
    while (refinable && heap.size() < max_intervals) {
        if (err_sum <= abs_tol) {
            err_sum = exact_error();
            if (err_sum <= abs_tol) break;
        }
        std::pop_heap(heap.begin(), heap.end());
        detail::GkSegment worst = heap.back();
        if (!worst.splittable) {
            // unsplittable segments rank last, so every segment is exhausted
            std::push_heap(heap.begin(), heap.end());
            refinable = false;
            break;
        }
        heap.pop_back();

        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b) {
            worst.splittable = false;
            heap.push_back(worst);
            std::push_heap(heap.begin(), heap.end());
            continue;
        }
        auto left = detail::gk15_apply(f, worst.a, mid);
        auto right = detail::gk15_apply(f, mid, worst.b);
        err_sum += (left.error + right.error) - worst.error;
        heap.push_back(left);
        std::push_heap(heap.begin(), heap.end());
        heap.push_back(right);
        std::push_heap(heap.begin(), heap.end());
    }

    QuadratureResult result;
    result.intervals = heap.size();
    result.error_estimate = exact_error();
    detail::NeumaierSum value;
    for (const auto& s : heap) value.add(s.value);
    result.value = value.value();

    if (result.error_estimate > abs_tol) {
        raise(errc::quadrature_non_convergence,
              "adaptive quadrature did not reach tolerance " + std::to_string(abs_tol) +
                  " (error estimate " + std::to_string(result.error_estimate) + " after " +
                  std::to_string(result.intervals) + " intervals)");
    }
    return result;
}

} // namespace riskalloc
