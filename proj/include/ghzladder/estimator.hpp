#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ghzladder/core.hpp"
#include "ghzladder/measurement.hpp"

namespace ghzladder {

/// One completed ladder step, kept so a run can be audited afterwards.
struct StepRecord {
    std::int64_t m = 1;            // probe block size used at this step
    double mjtheta_hat = 0.0;      // raw circular estimate of m*theta, in [0, 2pi)
    std::int64_t shift = 0;        // whole periods added while folding down
    double theta_hat_after = 0.0;  // running estimate after the step, in [0, 2pi)
    std::optional<bool> success;   // per-step window check when ground truth is known
};

struct EstimationState {
    Angle theta_hat;               // current estimate
    int step_index = 0;            // number of completed steps
    double half_width = kPi;       // confidence half-width around theta_hat
    int base = 2;
    int shrink = 3;
    std::vector<StepRecord> history;
};

EstimationState initial_state(int base, int shrink);

/// fold_step plus the replica-overlap census used by property tests: how
/// many of the candidate phases (spaced one period apart, restricted to the
/// previous step's period around theta_hat) have confidence intervals that
/// intersect the previous interval.  With shrink = base + 1 this is exactly
/// one; looser shrink values can give zero.
struct FoldOutcome {
    EstimationState state;
    int overlap_count = 1;
};

FoldOutcome fold_step_detail(const EstimationState& state, Angle mjtheta_hat, std::int64_t m,
                             int base, int shrink);

/// Fold the raw estimate of m*theta into the running estimate.  The first
/// step is a passthrough (flat prior); afterwards the candidate within half
/// a period of the previous estimate is selected, which for shrink = base+1
/// coincides with picking the unique interval intersection.
EstimationState fold_step(const EstimationState& state, Angle mjtheta_hat, std::int64_t m,
                          int base, int shrink);

enum class Backend { collective, parity };

struct RunOptions {
    Backend backend = Backend::collective;
    double eta = 1.0;        // per-probe survival; 1 disables the loss channel
    bool noiseless = false;  // replace sampled frequencies by their expectations
    std::uint64_t seed = 0;
};

/// Run the full estimation ladder for one trial.
std::pair<Angle, EstimationState> run_estimation(Angle theta_true, const SchedulePlan& plan,
                                                 Backend backend, std::uint64_t seed);

std::pair<Angle, EstimationState> run_estimation_ex(Angle theta_true, const SchedulePlan& plan,
                                                    const RunOptions& options);

/// Confirm that the per-step window condition on m*theta and the folded
/// condition on theta agree at every step whose predecessors all succeeded.
bool check_equivalence(Angle theta_true, const EstimationState& state);

}  // namespace ghzladder
