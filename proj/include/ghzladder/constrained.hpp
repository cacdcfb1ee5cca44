#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ghzladder/core.hpp"

namespace ghzladder {

/// Independent per-probe retention: a state of size m survives a pass with
/// probability eta^m.
struct LossModel {
    double eta = 1.0;
};

/// Parameters for a ladder whose last step is an adaptive maximum-likelihood
/// refinement instead of another fold.  x_km1 is the shot ramp value of the
/// last localization step; `cap` bounds the largest state size (sizes then
/// follow ceil(cap / 2^(K-j))); `loss` thins the refinement step's shots.
struct HybridPlanParams {
    int k_steps = 2;
    double x_km1 = 1.0;
    BoundConstants constants = BoundConstants::analytic();
    std::optional<std::int64_t> cap;
    std::optional<LossModel> loss;
};

/// Closed-form shot count for the refinement step:
/// 3 C^(x_{K-1}/2) / (2 pi sqrt(256 A ln C)), thinned by eta^(R/4) under
/// loss, where R is the largest state size.
double hybrid_last_step(const HybridPlanParams& params);

/// Build the executable plan: ramped localization steps below, an
/// adaptive_mle step of size 2^(K-1) (or the capped ladder's top) on top.
SchedulePlan hybrid_plan(const HybridPlanParams& params);

/// Accuracy bound for the hybrid plan: the refinement step's likelihood
/// floor 1/(2 x_K 4^(K-1)) plus the localization failure tail
/// (2pi/3)^2 128A / (C^(x_{K-1}-1/2) 4^(K-1)); divided by kappa^2 when the
/// sizes are capped (kappa = R / 2^(K-1)).
double hybrid_mse_bound(const HybridPlanParams& params);

/// Shot ramp under loss.  `expected` holds the post-loss surviving counts
/// x_j = gamma (K-j) + x_K + (|ln eta|/ln C)(2^(K-1) - 2^(j-1)); `provisioned`
/// holds the pre-loss counts x'_j = x_j / eta^(2^(j-1)) that must be prepared
/// so the expected number survives.
struct LossyRamp {
    std::vector<double> expected;
    std::vector<double> provisioned;
};

LossyRamp lossy_ramp(int k_steps, double x_k, const LossModel& loss,
                     const BoundConstants& constants);

/// Executable plan from the lossy ramp: provision first, then round.
SchedulePlan lossy_plan(int k_steps, double x_k, const LossModel& loss,
                        const BoundConstants& constants);

/// Prepared-probe budget of a lossy ramp: 2 sum x'_j 2^(j-1).
double lossy_budget(const LossyRamp& ramp_counts);

/// Exact (unrounded) loss-free ramp top spending the same budget:
/// inverts n = 2 gamma (2^K - K - 1) + 2 x (2^K - 1).
double ideal_ramp_top_for_budget(double n, int k_steps, const BoundConstants& constants);

/// Fisher information of a single GHZ pass of n probes under loss:
/// eta^n n^2.
double lossy_ghz_qfi(std::int64_t n_size, const LossModel& loss);

/// Fisher information when the n probes are measured in bunches of size r:
/// eta^r r^2 (n/r) = eta^r r n.  Real-valued r so the optimum can be probed
/// off the integer grid.
double bunched_qfi(double n_size, double r_size, const LossModel& loss);

/// Bunch size maximizing bunched_qfi: -1/ln eta.
double optimal_cut(const LossModel& loss);

/// Fisher information of the loss-optimal input: n^2 / (1 + n(1-eta)/eta).
double lossy_optimal_qfi(double n_size, const LossModel& loss);

/// Large-budget ratio of the optimal input's information to the best
/// bunched-GHZ information: -e eta ln(eta) / (1 - eta), at most e.
double kappa_ratio(const LossModel& loss);

}  // namespace ghzladder
