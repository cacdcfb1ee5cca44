#include "ghzladder/constrained.hpp"

#include <cmath>
#include <stdexcept>

namespace ghzladder {

namespace {

void check_eta(double eta) {
    if (!(eta > 0.0) || eta > 1.0) {
        throw std::invalid_argument("retention probability must lie in (0, 1]");
    }
}

void check_hybrid_params(const HybridPlanParams& params) {
    if (params.k_steps < 2 || params.k_steps > 60) {
        throw std::invalid_argument("hybrid plan needs 2 <= k_steps <= 60");
    }
    if (!(params.x_km1 > 0.0) || !std::isfinite(params.x_km1)) {
        throw std::invalid_argument("localization ramp value must be positive");
    }
    if (!(params.constants.a_const > 0.0)) {
        throw std::invalid_argument("hybrid closed forms need A > 0");
    }
    if (params.loss.has_value()) {
        check_eta(params.loss->eta);
    }
    if (params.cap.has_value()) {
        const std::int64_t r = *params.cap;
        if (r < 2) {
            throw std::invalid_argument("size cap must be at least 2");
        }
        const std::int64_t top = std::int64_t{1} << (params.k_steps - 1);
        if (r > top || 2 * r <= top) {
            throw std::invalid_argument(
                "k_steps must be the smallest depth whose top size reaches the cap");
        }
    }
}

std::int64_t largest_size(const HybridPlanParams& params) {
    return params.cap.has_value() ? *params.cap
                                  : std::int64_t{1} << (params.k_steps - 1);
}

}  // namespace

double hybrid_last_step(const HybridPlanParams& params) {
    check_hybrid_params(params);
    const BoundConstants& c = params.constants;
    double x = 3.0 * std::pow(c.c_const, 0.5 * params.x_km1) /
               (2.0 * kPi * std::sqrt(256.0 * c.a_const * std::log(c.c_const)));
    if (params.loss.has_value()) {
        x *= std::pow(params.loss->eta, static_cast<double>(largest_size(params)) / 4.0);
    }
    return x;
}

SchedulePlan hybrid_plan(const HybridPlanParams& params) {
    check_hybrid_params(params);
    SchedulePlan plan;
    plan.base = 2;
    plan.shrink = 3;
    plan.cap = params.cap;
    plan.last_step_mode = LastStepMode::adaptive_mle;
    const int k = params.k_steps;
    for (int j = 1; j < k; ++j) {
        const double x = params.constants.gamma * static_cast<double>(k - 1 - j) + params.x_km1;
        if (x <= 0.5) {
            throw infeasible_error("localization ramp entry rounds to zero shots");
        }
        std::int64_t m;
        if (params.cap.has_value()) {
            const std::int64_t d = std::int64_t{1} << (k - j);
            m = (*params.cap + d - 1) / d;
        } else {
            m = std::int64_t{1} << (j - 1);
        }
        const std::int64_t nu = round_half_up(x);
        plan.steps.push_back(StepSpec{m, nu, nu});
    }
    const double x_last = hybrid_last_step(params);
    if (x_last <= 0.5) {
        throw infeasible_error("refinement step rounds to zero shots");
    }
    const std::int64_t nu_last = round_half_up(x_last);
    plan.steps.push_back(StepSpec{largest_size(params), nu_last, nu_last});
    plan.validate();
    return plan;
}

double hybrid_mse_bound(const HybridPlanParams& params) {
    check_hybrid_params(params);
    const BoundConstants& c = params.constants;
    const double quarter_pow = std::ldexp(1.0, 2 * (params.k_steps - 1));
    const double refinement = 1.0 / (2.0 * hybrid_last_step(params) * quarter_pow);
    const double coeff = std::pow(2.0 * kPi / 3.0, 2.0);
    const double tail = coeff * 128.0 * c.a_const *
                        std::pow(c.c_const, 0.5 - params.x_km1) / quarter_pow;
    double bound = refinement + tail;
    if (params.cap.has_value()) {
        const double kappa = static_cast<double>(*params.cap) /
                             std::ldexp(1.0, params.k_steps - 1);
        bound /= kappa * kappa;
    }
    return bound;
}

LossyRamp lossy_ramp(int k_steps, double x_k, const LossModel& loss,
                     const BoundConstants& constants) {
    if (k_steps < 1 || k_steps > 60) {
        throw std::invalid_argument("need 1 <= k_steps <= 60");
    }
    if (!(x_k > 0.0) || !std::isfinite(x_k)) {
        throw std::invalid_argument("ramp top must be positive");
    }
    check_eta(loss.eta);
    const double attrition = -std::log(loss.eta) / std::log(constants.c_const);
    const double top_size = std::ldexp(1.0, k_steps - 1);
    LossyRamp out;
    for (int j = 1; j <= k_steps; ++j) {
        const double size = std::ldexp(1.0, j - 1);
        const double expected = constants.gamma * static_cast<double>(k_steps - j) + x_k +
                                attrition * (top_size - size);
        out.expected.push_back(expected);
        out.provisioned.push_back(expected * std::pow(loss.eta, -size));
    }
    return out;
}

SchedulePlan lossy_plan(int k_steps, double x_k, const LossModel& loss,
                        const BoundConstants& constants) {
    const LossyRamp counts = lossy_ramp(k_steps, x_k, loss, constants);
    SchedulePlan plan;
    plan.base = 2;
    plan.shrink = 3;
    std::int64_t m = 1;
    for (double provisioned : counts.provisioned) {
        if (provisioned <= 0.5) {
            throw infeasible_error("provisioned ramp entry rounds to zero shots");
        }
        const std::int64_t nu = round_half_up(provisioned);
        plan.steps.push_back(StepSpec{m, nu, nu});
        m *= 2;
    }
    plan.validate();
    return plan;
}

double lossy_budget(const LossyRamp& ramp_counts) {
    double total = 0.0;
    double weight = 2.0;
    for (double provisioned : ramp_counts.provisioned) {
        total += provisioned * weight;
        weight *= 2.0;
    }
    return total;
}

double ideal_ramp_top_for_budget(double n, int k_steps, const BoundConstants& constants) {
    if (k_steps < 1 || k_steps > 60) {
        throw std::invalid_argument("need 1 <= k_steps <= 60");
    }
    const double top = std::ldexp(1.0, k_steps);
    const double fixed = 2.0 * constants.gamma * (top - static_cast<double>(k_steps) - 1.0);
    return (n - fixed) / (2.0 * (top - 1.0));
}

double lossy_ghz_qfi(std::int64_t n_size, const LossModel& loss) {
    if (n_size < 1) {
        throw std::invalid_argument("state size must be positive");
    }
    check_eta(loss.eta);
    const double n = static_cast<double>(n_size);
    return std::pow(loss.eta, n) * n * n;
}

double bunched_qfi(double n_size, double r_size, const LossModel& loss) {
    if (!(n_size > 0.0) || !(r_size > 0.0)) {
        throw std::invalid_argument("sizes must be positive");
    }
    check_eta(loss.eta);
    return std::pow(loss.eta, r_size) * r_size * n_size;
}

double optimal_cut(const LossModel& loss) {
    check_eta(loss.eta);
    if (loss.eta == 1.0) {
        throw std::invalid_argument("no finite optimal bunch without loss");
    }
    return -1.0 / std::log(loss.eta);
}

double lossy_optimal_qfi(double n_size, const LossModel& loss) {
    if (!(n_size > 0.0)) {
        throw std::invalid_argument("probe count must be positive");
    }
    check_eta(loss.eta);
    return n_size * n_size / (1.0 + n_size * (1.0 - loss.eta) / loss.eta);
}

double kappa_ratio(const LossModel& loss) {
    check_eta(loss.eta);
    if (loss.eta == 1.0) {
        throw std::invalid_argument("ratio is defined for eta < 1");
    }
    const double e = std::exp(1.0);
    return -e * loss.eta * std::log(loss.eta) / (1.0 - loss.eta);
}

}  // namespace ghzladder
