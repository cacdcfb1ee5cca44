#include "ghzladder/errorprob.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "ghzladder/measurement.hpp"
#include "ghzladder/rng.hpp"

namespace ghzladder {

namespace {

/// Binomial PMF row for nu trials at success probability p, via lgamma.
std::vector<double> binomial_row(std::int64_t nu, double p) {
    std::vector<double> row(static_cast<std::size_t>(nu) + 1, 0.0);
    if (p <= 0.0) {
        row[0] = 1.0;
        return row;
    }
    if (p >= 1.0) {
        row.back() = 1.0;
        return row;
    }
    const double lg_n = std::lgamma(static_cast<double>(nu) + 1.0);
    const double lp = std::log(p);
    const double lq = std::log1p(-p);
    for (std::int64_t k = 0; k <= nu; ++k) {
        double lg = lg_n - std::lgamma(static_cast<double>(k) + 1.0) -
                    std::lgamma(static_cast<double>(nu - k) + 1.0);
        row[static_cast<std::size_t>(k)] =
            std::exp(lg + static_cast<double>(k) * lp + static_cast<double>(nu - k) * lq);
    }
    return row;
}

/// Angles of every possible frequency pair for nu shots per quadrature.
/// Independent of theta, so calibrate builds each table once.
std::vector<double> estimate_table(std::int64_t nu) {
    const std::size_t side = static_cast<std::size_t>(nu) + 1;
    std::vector<double> table(side * side);
    for (std::int64_t a0 = 0; a0 <= nu; ++a0)
        for (std::int64_t ap = 0; ap <= nu; ++ap)
            table[static_cast<std::size_t>(a0) * side + static_cast<std::size_t>(ap)] =
                step_estimate({1, nu, a0, nu, ap}).value();
    return table;
}

double failure_mass(Angle theta, std::int64_t nu, double threshold,
                    const std::vector<double>& table) {
    const std::vector<double> w0 = binomial_row(nu, type0_probability(theta, 1));
    const std::vector<double> wp = binomial_row(nu, typeplus_probability(theta, 1));
    const std::size_t side = static_cast<std::size_t>(nu) + 1;
    NeumaierSum total;
    for (std::size_t a0 = 0; a0 < side; ++a0) {
        if (w0[a0] == 0.0) continue;
        for (std::size_t ap = 0; ap < side; ++ap) {
            if (circle_distance(Angle(table[a0 * side + ap]), theta) >= threshold)
                total.add(w0[a0] * wp[ap]);
        }
    }
    double p = total.value();
    if (p < 0.0) p = 0.0;
    if (p > 1.0) p = 1.0;
    return p;
}

}  // namespace

double exact_failure_probability(Angle theta, std::int64_t nu, double threshold) {
    if (nu < 1) throw std::invalid_argument("shot count must be positive");
    if (!(threshold > 0.0)) throw std::invalid_argument("threshold must be positive");
    return failure_mass(theta, nu, threshold, estimate_table(nu));
}

CalibrationResult calibrate(int nu_max, int angle_count, double threshold) {
    if (nu_max < 2) throw std::invalid_argument("calibration needs nu_max >= 2");
    if (angle_count < 1) throw std::invalid_argument("angle grid must be nonempty");

    CalibrationResult result;
    result.nu_max = nu_max;
    result.angle_count = angle_count;
    result.threshold = threshold;
    result.worst_probs.assign(static_cast<std::size_t>(nu_max), 0.0);

    for (std::int64_t nu = 1; nu <= nu_max; ++nu) {
        const std::vector<double> table = estimate_table(nu);
        double worst = 0.0;
        for (int i = 0; i < angle_count; ++i) {
            Angle theta(kTwoPi * i / angle_count);
            worst = std::max(worst, failure_mass(theta, nu, threshold, table));
        }
        result.worst_probs[static_cast<std::size_t>(nu - 1)] = worst;
    }

    // Largest C with A <= 1: feasibility of C is worst[nu] * C^nu <= 1 for
    // every fitted nu, so C* = min over nu of worst[nu]^(-1/nu).
    double c_best = std::numeric_limits<double>::infinity();
    for (int nu = 2; nu <= nu_max; ++nu) {
        double w = result.worst_probs[static_cast<std::size_t>(nu - 1)];
        if (w > 0.0) c_best = std::min(c_best, std::pow(w, -1.0 / static_cast<double>(nu)));
    }

    if (!std::isfinite(c_best)) {
        // Every fitted point is zero: A = 0 makes the envelope identically
        // zero, and the decay base carries no information, so keep the
        // analytic one to leave the constants well-formed.
        result.fitted = BoundConstants::from_base2(0.0, analytic_c(3), analytic_epsilon(3));
        return result;
    }

    double a_best = 0.0;
    for (int nu = 2; nu <= nu_max; ++nu) {
        double w = result.worst_probs[static_cast<std::size_t>(nu - 1)];
        a_best = std::max(a_best, w * std::pow(c_best, static_cast<double>(nu)));
    }
    result.fitted = BoundConstants::from_base2(a_best, c_best, analytic_epsilon(3));
    return result;
}

double hoeffding_bound(std::int64_t nu, double eps) {
    if (nu < 1) throw std::invalid_argument("shot count must be positive");
    if (!(eps > 0.0) || eps >= 1.0) throw std::invalid_argument("eps must be in (0, 1)");
    return 4.0 * std::exp(-2.0 * static_cast<double>(nu) * eps * eps);
}

bool verify_epsilon(double eps, double threshold, int grid) {
    if (!(eps > 0.0) || eps >= 1.0) throw std::invalid_argument("eps must be in (0, 1)");
    if (grid < 1) throw std::invalid_argument("grid must be positive");

    const double slack = 1e-9;
    for (int i = 0; i < grid; ++i) {
        Angle theta(kTwoPi * i / grid);
        const double x = std::cos(theta.value());
        const double y = std::sin(theta.value());
        // The frequency box maps to a square of half-side 2*eps around the
        // point on the unit circle.  If it swallows the origin the angle is
        // unconstrained; otherwise the polar angle is monotone along each
        // edge and corners carry the extremes.
        if (std::fabs(x) <= 2.0 * eps && std::fabs(y) <= 2.0 * eps) return false;
        for (int sx = -1; sx <= 1; sx += 2) {
            for (int sy = -1; sy <= 1; sy += 2) {
                Angle corner = canonicalize(std::atan2(y + 2.0 * eps * sy, x + 2.0 * eps * sx));
                if (circle_distance(corner, theta) > threshold + slack) return false;
            }
        }
    }
    return true;
}

double analytic_epsilon(int n) {
    if (n < 2) throw std::invalid_argument("window divisor must be at least 2");
    return std::sin(kPi / n) / (2.0 * std::sqrt(2.0));
}

double analytic_c(int n) {
    const double eps = analytic_epsilon(n);
    return std::exp(2.0 * eps * eps);
}

}  // namespace ghzladder
