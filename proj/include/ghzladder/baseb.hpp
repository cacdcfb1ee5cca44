#pragma once

#include <vector>

#include "ghzladder/core.hpp"

namespace ghzladder {

/// One line of the entanglement-base comparison: the ladder base, its
/// tiling divisor, the analytic failure constants, and the accuracy
/// prefactor at the numerically optimal ramp offset.
struct BaseStudyRow {
    int base = 2;
    int shrink = 3;
    double c_analytic = 0.0;
    double gamma_b = 0.0;
    double x_k_opt = 0.0;
    double prefactor = 0.0;
};

/// True when consecutive confidence intervals tile without ambiguity,
/// which pins the divisor to one more than the base.
bool validity_check(int base, int shrink);

/// Decay base of the per-step failure envelope for interval pi/shrink,
/// exp(sin^2(pi/shrink)/4).  The amplitude stays at 4 for every base.
double analytic_c_for_shrink(int shrink);

/// Ramp slope for a given ladder base: the shot surcharge per step that
/// keeps the failure envelope level, 3 ln(base) / ln C.
double gamma_for_base(int base);

/// Accuracy prefactor bound for a geometric ladder with the given base
/// at ramp offset x_k, using the analytic constants.
double base_prefactor(int base, double x_k);

/// Minimize base_prefactor over x_k on a 0.01 grid and report the row.
BaseStudyRow optimize_base(int base);

/// Rows for every base in [2, b_max], each at its own optimal offset.
std::vector<BaseStudyRow> base_study(int b_max);

}  // namespace ghzladder
