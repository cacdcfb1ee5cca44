#include "ghzladder/estimator.hpp"

#include <cmath>
#include <utility>

#include "ghzladder/rng.hpp"

namespace ghzladder {

namespace {

constexpr double kWindowSlack = 1e-12;

bool step_window_ok(double mjtheta_hat, std::int64_t m, Angle theta_true, int shrink) {
    Angle target = canonicalize(static_cast<double>(m) * theta_true.value());
    return circle_distance(Angle(mjtheta_hat), target) <= kPi / shrink + kWindowSlack;
}

/// Record a step that produced no usable raw estimate (all probes lost, or
/// zero planned shots).  The running estimate is left where it was; the
/// stored raw value is the one the prior predicts, so audits stay coherent.
void push_noop_step(EstimationState& state, std::int64_t m, int shrink, Angle theta_true) {
    StepRecord rec;
    rec.m = m;
    rec.mjtheta_hat = canonicalize(static_cast<double>(m) * state.theta_hat.value()).value();
    rec.shift = 0;
    rec.theta_hat_after = state.theta_hat.value();
    rec.success = step_window_ok(rec.mjtheta_hat, m, theta_true, shrink);
    state.history.push_back(rec);
    state.step_index += 1;
    state.half_width = kPi / (static_cast<double>(shrink) * static_cast<double>(m));
}

}  // namespace

EstimationState initial_state(int base, int shrink) {
    EstimationState st;
    st.theta_hat = Angle(0.0);
    st.step_index = 0;
    st.half_width = kPi;  // flat prior over the full circle
    st.base = base;
    st.shrink = shrink;
    return st;
}

FoldOutcome fold_step_detail(const EstimationState& state, Angle mjtheta_hat, std::int64_t m,
                             int base, int shrink) {
    FoldOutcome out;
    out.state = state;
    out.state.base = base;
    out.state.shrink = shrink;

    StepRecord rec;
    rec.m = m;
    rec.mjtheta_hat = mjtheta_hat.value();

    double theta_new;
    if (state.step_index == 0 || state.history.empty()) {
        // Flat prior: the first raw estimate is taken as-is.
        theta_new = mjtheta_hat.value() / static_cast<double>(m);
        rec.shift = 0;
        out.overlap_count = 1;
    } else {
        const std::int64_t m_prev = state.history.back().m;
        const double period = kTwoPi / static_cast<double>(m);
        const double prior_period = kTwoPi / static_cast<double>(m_prev);
        const double w_prev = kPi / (static_cast<double>(shrink) * static_cast<double>(m_prev));
        const double w_new = kPi / (static_cast<double>(shrink) * static_cast<double>(m));
        const double reach = w_prev + w_new;  // center distance at which intervals touch

        const double th_prev = state.theta_hat.value();
        const double xi0 = mjtheta_hat.value() / static_cast<double>(m);

        // The replicas xi0 + k*period tile the line; exactly one lies within
        // half a period of the previous estimate.
        const double delta = (th_prev - xi0) / period;
        const std::int64_t k = static_cast<std::int64_t>(std::floor(delta + 0.5));
        theta_new = xi0 + static_cast<double>(k) * period;
        rec.shift = k;

        // Census of interval intersections among the replicas inside the
        // previous step's period around th_prev.
        out.overlap_count = 0;
        const std::int64_t span = (m + m_prev - 1) / m_prev + 2;
        for (std::int64_t kk = k - span; kk <= k + span; ++kk) {
            const double d = th_prev - (xi0 + static_cast<double>(kk) * period);
            if (d < -prior_period / 2 || d >= prior_period / 2) continue;
            if (d >= -reach && d < reach) ++out.overlap_count;
        }
    }

    Angle canonical(canonicalize(theta_new));
    rec.theta_hat_after = canonical.value();
    out.state.theta_hat = canonical;
    out.state.step_index = state.step_index + 1;
    out.state.half_width = kPi / (static_cast<double>(shrink) * static_cast<double>(m));
    out.state.history.push_back(rec);
    return out;
}

EstimationState fold_step(const EstimationState& state, Angle mjtheta_hat, std::int64_t m,
                          int base, int shrink) {
    return fold_step_detail(state, mjtheta_hat, m, base, shrink).state;
}

std::pair<Angle, EstimationState> run_estimation(Angle theta_true, const SchedulePlan& plan,
                                                 Backend backend, std::uint64_t seed) {
    RunOptions opt;
    opt.backend = backend;
    opt.seed = seed;
    return run_estimation_ex(theta_true, plan, opt);
}

std::pair<Angle, EstimationState> run_estimation_ex(Angle theta_true, const SchedulePlan& plan,
                                                    const RunOptions& options) {
    plan.validate();
    if (options.eta <= 0.0 || options.eta > 1.0)
        throw std::invalid_argument("survival probability must be in (0, 1]");

    EstimationState state = initial_state(plan.base, plan.shrink);
    const std::size_t k_steps = plan.steps.size();

    for (std::size_t idx = 0; idx < k_steps; ++idx) {
        const StepSpec& step = plan.steps[idx];
        const std::uint64_t step_seed = derive_key(options.seed, static_cast<std::uint64_t>(idx));
        const bool final_mle = plan.last_step_mode == LastStepMode::adaptive_mle &&
                               idx + 1 == k_steps && idx > 0 && !options.noiseless;

        if (options.noiseless) {
            const double x = 2.0 * type0_probability(theta_true, step.m) - 1.0;
            const double y = 2.0 * typeplus_probability(theta_true, step.m) - 1.0;
            Angle mj = canonicalize(std::atan2(y, x));
            state = fold_step(state, mj, step.m, plan.base, plan.shrink);
            state.history.back().success =
                step_window_ok(mj.value(), step.m, theta_true, plan.shrink);
            continue;
        }

        if (final_mle) {
            const double th_prev = state.theta_hat.value();
            const double w_prev = state.half_width;
            const std::size_t shots = static_cast<std::size_t>(step.nu0 + step.nuplus);
            if (shots == 0) {
                push_noop_step(state, step.m, plan.shrink, theta_true);
                continue;
            }
            // Park the working point on the slope of the fringe, where one
            // shot carries the most information about small offsets.
            const double phi = th_prev - kPi / (2.0 * static_cast<double>(step.m));
            std::vector<double> shifts(shots, phi);
            ShiftedBatch batch =
                options.eta < 1.0
                    ? sample_shifted_lossy(theta_true, step.m, shifts, options.eta, step_seed)
                    : sample_shifted(theta_true, step.m, shifts, step_seed);
            if (batch.outcomes.empty()) {
                push_noop_step(state, step.m, plan.shrink, theta_true);
                continue;
            }
            Angle est = mle_shifted(batch, th_prev - w_prev, th_prev + w_prev);

            StepRecord rec;
            rec.m = step.m;
            rec.mjtheta_hat =
                canonicalize(static_cast<double>(step.m) * est.value()).value();
            rec.shift = 0;
            rec.theta_hat_after = est.value();
            rec.success = circle_distance(est, theta_true) <=
                          kPi / (static_cast<double>(plan.shrink) *
                                 static_cast<double>(step.m)) +
                              kWindowSlack;
            state.history.push_back(rec);
            state.theta_hat = est;
            state.step_index += 1;
            state.half_width =
                kPi / (static_cast<double>(plan.shrink) * static_cast<double>(step.m));
            continue;
        }

        MeasurementBatch batch;
        if (options.eta < 1.0) {
            batch = sample_batch_lossy(theta_true, step, options.eta, step_seed,
                                       options.backend == Backend::parity);
        } else if (options.backend == Backend::parity) {
            batch = sample_batch_parity(theta_true, step, step_seed);
        } else {
            batch = sample_batch(theta_true, step, step_seed);
        }

        if (batch.nu0 == 0 || batch.nuplus == 0) {
            // Nothing survived on at least one quadrature; no usable point.
            push_noop_step(state, step.m, plan.shrink, theta_true);
            continue;
        }

        Angle mj = step_estimate(batch);
        state = fold_step(state, mj, step.m, plan.base, plan.shrink);
        state.history.back().success =
            step_window_ok(mj.value(), step.m, theta_true, plan.shrink);
    }

    return {state.theta_hat, state};
}

bool check_equivalence(Angle theta_true, const EstimationState& state) {
    const int n = state.shrink;
    bool prefix_ok = true;
    for (const StepRecord& rec : state.history) {
        const bool raw_ok = step_window_ok(rec.mjtheta_hat, rec.m, theta_true, n);
        const bool folded_ok =
            circle_distance(Angle(rec.theta_hat_after), theta_true) <=
            kPi / (static_cast<double>(n) * static_cast<double>(rec.m)) + kWindowSlack;
        if (prefix_ok && raw_ok != folded_ok) return false;
        prefix_ok = prefix_ok && raw_ok;
    }
    return true;
}

}  // namespace ghzladder
