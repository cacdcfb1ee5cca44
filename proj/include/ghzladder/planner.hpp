#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "ghzladder/core.hpp"

namespace ghzladder {

/// Near-linear shot ramp x_j = gamma (K - j) + x_K over steps of size 2^(j-1).
struct RampParams {
    int k_steps = 1;
    double x_k = 1.0;
    BoundConstants constants = BoundConstants::analytic();
};

/// Round the ramp into an executable base-2 plan.  Rejects ramps whose
/// smallest entry would round to zero shots.
SchedulePlan ramp(const RampParams& params);

/// Closed-form probe totals (gamma + x_K -+ 1/2) 2^(K+1); `exact` is the
/// probe count of the rounded plan, surfaced because the closed forms drop
/// O(K) terms.
struct ResourceBounds {
    double lower = 0.0;
    double upper = 0.0;
    std::int64_t exact = 0;
};

ResourceBounds resource_bounds(const RampParams& params);

/// Exact MSE bound for an arbitrary base-2 plan: interval floor plus the
/// drift-weighted failure terms.  Handles unequal quadrature counts, where
/// the step failure bound is (A/2)(C^-nu0 + C^-nuplus).
double mse_bound_raw(const SchedulePlan& plan, const BoundConstants& constants);

/// Same bound for unrounded symmetric shot counts on the pure ladder
/// M_j = 2^(j-1); used when comparing closed forms at the continuous level.
double mse_bound_raw_counts(const std::vector<double>& nu, const BoundConstants& constants);

/// Closed form of the bound along the ramp: (2pi/3)^2 (1 + 128A / C^(x_K -
/// 1/2)) / 4^K.  Upper-bounds mse_bound_raw of the rounded plan.
double mse_bound_ramp(const RampParams& params);

/// Prefactor bound 4 (2pi/3)^2 (gamma + x_K + 1/2)^2 (1 + 128A/C^(x_K-1/2))
/// on MSE * N^2 when the ramp top is x_k.
double prefactor_bound(double x_k, const BoundConstants& constants);

struct PrefactorOptimum {
    int x_k = 0;
    double value = 0.0;
};

/// Exhaustive integer scan of prefactor_bound over x_K in [1, 200].
PrefactorOptimum optimize_prefactor(const BoundConstants& constants);

/// The bound parameterized by the probe budget instead of x_K:
/// (2pi/3)^2 (1 + 128A / C^(N/2^(K+1) - gamma - 1)) / 4^K.
/// Throws infeasible_error when the budget cannot feed K steps.
double mse_bound_vs_n(double n, int k_steps, const BoundConstants& constants);

/// Budget at which adding a (K+1)-th step starts to pay off, in units of
/// 2^(K+1) (K-independent), with the ramp tops on either side of the switch.
struct UpgradePoint {
    double n_units = 0.0;  // N* / 2^(K+1)
    double x_k = 0.0;      // ramp top just before the switch
    double x_k1 = 0.0;     // ramp top just after
};

UpgradePoint upgrade_point(const BoundConstants& constants);

/// Optimal assignment of spare probes (or a probe deficit) across steps.
/// Nonnegative even delta_n: the bits of delta_n/2, one extra shot pair per
/// set bit (high bit to the big step); at the top of the range, where one
/// pair is left over after every step got one, step 1 takes a second pair.
/// Odd: same on the even part, plus a lone probe on step 1's cosine
/// quadrature.  Negative: withdrawals of at most two shot pairs per step
/// below K, never touching step K.
struct Redistribution {
    std::int64_t delta_n = 0;
    std::vector<std::int64_t> delta_nu;  // per-step shot-pair adjustment
    std::vector<int> bits;               // |delta_nu|, kept for bookkeeping
    int extra_probe = 0;                 // -1, 0, +1 lone probe on step 1 Type-0
    int saturation = 0;                  // withdrawal layers fully consumed
};

Redistribution redistribute(std::int64_t delta_n, int k_steps);

/// Apply the adjustment to a concrete plan (throws if a count would go
/// negative).
SchedulePlan apply_redistribution(const SchedulePlan& plan, const Redistribution& r);

/// Closed form of the bound after optimally placing delta_n >= 0 spare
/// probes on the ramp: the ramp bound minus (2pi/3)^2 (1 - 1/C) 64A
/// delta_n / (2^(3K) C^(x_K - 1/2)).
double mse_bound_redistributed(const RampParams& params, std::int64_t delta_n);

/// The part of the bound the redistribution moves actually change, up to a
/// common positive factor: sum over steps of 2^j C^(-delta_nu_j).
double redistribution_objective(const std::vector<std::int64_t>& delta_nu,
                                const BoundConstants& constants);

/// The four local rewrites whose strict-descent property singles out the
/// binary pattern.  Each applies its rewrite at position j (0-based) if the
/// guard holds and returns whether it did.
bool move_fuse(std::vector<std::int64_t>& delta_nu, std::size_t j);
bool move_split(std::vector<std::int64_t>& delta_nu, std::size_t j);
/// Collapse a run 2 1 ... 1 0 (low step to high) into 0 0 ... 0 1.
bool move_carry(std::vector<std::int64_t>& delta_nu, std::size_t j);
/// Rewrite a run -1 0 ... 0 1 (low step to high) into 1 1 ... 1 0.
bool move_borrow(std::vector<std::int64_t>& delta_nu, std::size_t j);

/// Fisher information of a plan: each probe of size m contributes m^2.
double qfi(const SchedulePlan& plan);

/// Closed-form lower bound on N^2 / QFI along the ramp:
/// 36 (gamma + x_K - 1/2)^2 / (2 gamma + 6 x_K + 3).
double qfi_ratio_lower_bound(double x_k, const BoundConstants& constants);

/// Bracket on the post-redistribution QFI upper bound: ramp part
/// (2 gamma/3 + 2 x_K + 1) 4^K / 3 plus between delta_n^2/6 (all bits set)
/// and delta_n^2/2 (single bit).
std::pair<double, double> qfi_bounds_redistributed(const RampParams& params,
                                                   std::int64_t delta_n);

}  // namespace ghzladder
