#pragma once

#include <cstdint>
#include <vector>

#include "ghzladder/core.hpp"

namespace ghzladder {

/// Exact per-step failure probability P(distance(estimate, theta) >= threshold)
/// for nu shots on each quadrature at unit block size, by full enumeration of
/// the (nu+1)^2 outcome grid with log-space binomial weights.
double exact_failure_probability(Angle theta, std::int64_t nu, double threshold = kPi / 3.0);

struct CalibrationResult {
    int nu_max = 0;
    int angle_count = 0;
    double threshold = kPi / 3.0;
    std::vector<double> worst_probs;  // index nu-1: max over the angle grid
    BoundConstants fitted;
};

/// Scan the angle grid, record the worst exact failure probability for each
/// shot count, and fit the tightest geometric envelope A * C^-nu over
/// nu in [2, nu_max] subject to A <= 1.  The largest feasible C has the
/// closed form min over nu of worst^(-1/nu).
CalibrationResult calibrate(int nu_max = 80, int angle_count = 100, double threshold = kPi / 3.0);

/// Two-sided concentration bound 4 exp(-2 nu eps^2) on the failure
/// probability when both empirical frequencies sit within eps of their means.
double hoeffding_bound(std::int64_t nu, double eps);

/// Check the box geometry behind the concentration argument: if both
/// frequencies are within eps of their means, does the estimated angle stay
/// within threshold of the truth for every angle on the grid?  The angular
/// deviation over the frequency box is extremal at a corner, so corners are
/// sufficient.
bool verify_epsilon(double eps, double threshold = kPi / 3.0, int grid = 1000);

/// Largest half-width eps for which verify_epsilon holds at threshold pi/n:
/// the tangent construction gives sin(pi/n) / (2 sqrt(2)).
double analytic_epsilon(int n);

/// Decay base exp(sin^2(pi/n) / 4) implied by analytic_epsilon(n) through
/// the concentration bound; n = 3 gives exp(3/16).
double analytic_c(int n);

}  // namespace ghzladder
