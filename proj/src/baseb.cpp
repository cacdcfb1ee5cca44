#include "ghzladder/baseb.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ghzladder {

namespace {

void check_base(int base) {
    if (base < 2) {
        throw std::invalid_argument("ladder base must be at least 2, got " +
                                    std::to_string(base));
    }
}

double log_c_for_shrink(int shrink) {
    const double s = std::sin(kPi / static_cast<double>(shrink));
    return s * s / 4.0;
}

}  // namespace

bool validity_check(int base, int shrink) {
    return base >= 2 && shrink >= 2 && shrink == base + 1;
}

double analytic_c_for_shrink(int shrink) {
    if (shrink < 2) {
        throw std::invalid_argument("interval divisor must be at least 2, got " +
                                    std::to_string(shrink));
    }
    return std::exp(log_c_for_shrink(shrink));
}

double gamma_for_base(int base) {
    check_base(base);
    return 3.0 * std::log(static_cast<double>(base)) / log_c_for_shrink(base + 1);
}

double base_prefactor(int base, double x_k) {
    check_base(base);
    if (!std::isfinite(x_k)) {
        throw std::invalid_argument("ramp offset must be finite");
    }
    const double b = static_cast<double>(base);
    const double a_const = 4.0;
    const double log_c = log_c_for_shrink(base + 1);
    const double gamma = 3.0 * std::log(b) / log_c;
    const double lead = 16.0 * kPi * kPi / ((b * b - 1.0) * (b * b - 1.0));
    // One power of (b-1) comes from the geometric step sum, two more from
    // the squared drift factor b/(b-1) in the per-step interval width.
    const double tail =
        std::pow(b, 7.0) * a_const / (std::pow(b - 1.0, 3.0) * std::exp(log_c * (x_k - 0.5)));
    const double probes = gamma / (b - 1.0) + x_k + 0.5;
    return lead * (b * b / 4.0 + tail) * probes * probes;
}

BaseStudyRow optimize_base(int base) {
    check_base(base);
    if (base > 10) {
        throw std::invalid_argument("offset scan is sized for bases up to 10, got " +
                                    std::to_string(base));
    }
    BaseStudyRow row;
    row.base = base;
    row.shrink = base + 1;
    row.c_analytic = analytic_c_for_shrink(row.shrink);
    row.gamma_b = gamma_for_base(base);
    // Real offsets on a fixed centi-step grid; the largest base in range
    // has its optimum near 457, so the window is comfortably interior.
    const int lo = 51;
    const int hi = 60000;
    int best = 0;
    double best_value = 0.0;
    for (int i = lo; i <= hi; ++i) {
        const double value = base_prefactor(base, static_cast<double>(i) / 100.0);
        if (best == 0 || value < best_value) {
            best = i;
            best_value = value;
        }
    }
    if (best == lo || best == hi) {
        throw std::runtime_error("prefactor minimum fell on the scan boundary");
    }
    row.x_k_opt = static_cast<double>(best) / 100.0;
    row.prefactor = best_value;
    return row;
}

std::vector<BaseStudyRow> base_study(int b_max) {
    if (b_max < 2 || b_max > 10) {
        throw std::invalid_argument("base sweep limit must be in [2, 10], got " +
                                    std::to_string(b_max));
    }
    std::vector<BaseStudyRow> rows;
    rows.reserve(static_cast<std::size_t>(b_max - 1));
    for (int b = 2; b <= b_max; ++b) {
        rows.push_back(optimize_base(b));
    }
    return rows;
}

}  // namespace ghzladder
