#include "ghzladder/planner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace ghzladder {

namespace {

void check_ramp_params(const RampParams& params) {
    if (params.k_steps < 1 || params.k_steps > 60) {
        throw std::invalid_argument("ramp needs 1 <= k_steps <= 60");
    }
    if (!std::isfinite(params.x_k)) {
        throw std::invalid_argument("ramp top must be finite");
    }
}

// The closed forms below assume the pure doubling ladder, so refuse plans
// whose sizes were capped or use another base.
void check_pure_ladder(const SchedulePlan& plan) {
    plan.validate();
    if (plan.base != 2) {
        throw std::invalid_argument("bound formulas assume base 2");
    }
    std::int64_t expected = 1;
    for (const StepSpec& step : plan.steps) {
        if (step.m != expected) {
            throw std::invalid_argument("bound formulas assume sizes 2^(j-1)");
        }
        expected *= 2;
    }
}

double ramp_entry(const RampParams& params, int j) {
    return params.constants.gamma * static_cast<double>(params.k_steps - j) + params.x_k;
}

double interval_floor_coeff() {
    const double c = 2.0 * kPi / 3.0;
    return c * c;
}

}  // namespace

SchedulePlan ramp(const RampParams& params) {
    check_ramp_params(params);
    SchedulePlan plan;
    plan.base = 2;
    plan.shrink = 3;
    std::int64_t m = 1;
    for (int j = 1; j <= params.k_steps; ++j) {
        const double x = ramp_entry(params, j);
        if (x <= 0.5) {
            throw infeasible_error("ramp entry rounds to zero shots");
        }
        const std::int64_t nu = round_half_up(x);
        plan.steps.push_back(StepSpec{m, nu, nu});
        m *= 2;
    }
    plan.validate();
    return plan;
}

ResourceBounds resource_bounds(const RampParams& params) {
    check_ramp_params(params);
    ResourceBounds out;
    const double scale = std::ldexp(1.0, params.k_steps + 1);
    out.lower = (params.constants.gamma + params.x_k - 0.5) * scale;
    out.upper = (params.constants.gamma + params.x_k + 0.5) * scale;
    out.exact = total_probes(ramp(params));
    return out;
}

double mse_bound_raw(const SchedulePlan& plan, const BoundConstants& constants) {
    check_pure_ladder(plan);
    const double coeff = interval_floor_coeff();
    const double mK = static_cast<double>(plan.steps.back().m);
    double bound = coeff / (4.0 * mK * mK);
    for (const StepSpec& step : plan.steps) {
        const double m = static_cast<double>(step.m);
        const double fail = 0.5 * constants.a_const *
                            (std::pow(constants.c_const, -static_cast<double>(step.nu0)) +
                             std::pow(constants.c_const, -static_cast<double>(step.nuplus)));
        bound += coeff * 16.0 * fail / (m * m);
    }
    return bound;
}

double mse_bound_raw_counts(const std::vector<double>& nu, const BoundConstants& constants) {
    if (nu.empty()) {
        throw std::invalid_argument("need at least one step");
    }
    const double coeff = interval_floor_coeff();
    double bound = coeff / std::ldexp(1.0, 2 * static_cast<int>(nu.size()));
    double msq = 1.0;
    for (double x : nu) {
        bound += coeff * 16.0 * constants.a_const * std::pow(constants.c_const, -x) / msq;
        msq *= 4.0;
    }
    return bound;
}

double mse_bound_ramp(const RampParams& params) {
    check_ramp_params(params);
    const double tail = 128.0 * params.constants.a_const *
                        std::pow(params.constants.c_const, 0.5 - params.x_k);
    return interval_floor_coeff() * (1.0 + tail) / std::ldexp(1.0, 2 * params.k_steps);
}

double prefactor_bound(double x_k, const BoundConstants& constants) {
    const double probes = constants.gamma + x_k + 0.5;
    const double tail = 128.0 * constants.a_const * std::pow(constants.c_const, 0.5 - x_k);
    return 4.0 * interval_floor_coeff() * probes * probes * (1.0 + tail);
}

PrefactorOptimum optimize_prefactor(const BoundConstants& constants) {
    PrefactorOptimum best{0, 0.0};
    for (int x = 1; x <= 200; ++x) {
        const double value = prefactor_bound(static_cast<double>(x), constants);
        if (best.x_k == 0 || value < best.value) {
            best = PrefactorOptimum{x, value};
        }
    }
    return best;
}

double mse_bound_vs_n(double n, int k_steps, const BoundConstants& constants) {
    if (k_steps < 1 || k_steps > 60) {
        throw std::invalid_argument("need 1 <= k_steps <= 60");
    }
    const double units = n / std::ldexp(1.0, k_steps + 1);
    const double exponent = units - constants.gamma - 1.0;
    if (exponent <= 0.0) {
        throw infeasible_error("budget too small to feed every step");
    }
    const double tail = 128.0 * constants.a_const * std::pow(constants.c_const, -exponent);
    return interval_floor_coeff() * (1.0 + tail) / std::ldexp(1.0, 2 * k_steps);
}

UpgradePoint upgrade_point(const BoundConstants& constants) {
    // Equating the K and K+1 curves in y = C^(-u/2) gives
    // 4 beta y^2 - beta y + 3 = 0 with beta = 128 A C^(gamma+1); the root
    // closer to zero is the large-budget crossing.
    const double beta = 128.0 * constants.a_const *
                        std::pow(constants.c_const, constants.gamma + 1.0);
    const double disc = beta * beta - 48.0 * beta;
    if (disc < 0.0) {
        throw infeasible_error("curves never cross for these constants");
    }
    const double y = (beta - std::sqrt(disc)) / (8.0 * beta);
    UpgradePoint out;
    out.n_units = -2.0 * std::log(y) / std::log(constants.c_const);
    out.x_k = out.n_units - constants.gamma - 0.5;
    out.x_k1 = 0.5 * out.n_units - constants.gamma - 0.5;
    return out;
}

Redistribution redistribute(std::int64_t delta_n, int k_steps) {
    if (k_steps < 1 || k_steps > 60) {
        throw std::invalid_argument("need 1 <= k_steps <= 60");
    }
    const std::int64_t top = std::int64_t{1} << k_steps;  // 2^K
    Redistribution out;
    out.delta_n = delta_n;
    out.delta_nu.assign(static_cast<std::size_t>(k_steps), 0);
    out.bits.assign(static_cast<std::size_t>(k_steps), 0);

    if (delta_n >= 0) {
        if (delta_n > 2 * top) {
            throw infeasible_error("surplus exceeds one extra shot pair per step");
        }
        out.extra_probe = static_cast<int>(delta_n % 2);
        const std::int64_t half = delta_n / 2;
        if (half == top) {
            // One pair past the largest K-bit value: every step takes one
            // pair and the cheapest step absorbs the overflow as a second.
            out.delta_nu.assign(static_cast<std::size_t>(k_steps), 1);
            out.delta_nu.front() = 2;
        } else {
            for (int j = 0; j < k_steps; ++j) {
                out.delta_nu[static_cast<std::size_t>(j)] = (half >> j) & 1;
            }
        }
        for (int j = 0; j < k_steps; ++j) {
            out.bits[static_cast<std::size_t>(j)] =
                static_cast<int>(out.delta_nu[static_cast<std::size_t>(j)]);
        }
        return out;
    }

    const std::int64_t magnitude = -delta_n;
    out.extra_probe = -static_cast<int>(magnitude % 2);
    const std::int64_t half = magnitude / 2;
    // Withdrawals never touch step K and take at most two pairs per step, so
    // the headroom is twice the sub-K ladder total.
    const std::int64_t layer = top / 2 - 1;
    if (half > 2 * layer) {
        throw infeasible_error("deficit exceeds withdrawal headroom");
    }
    std::int64_t remaining = half;
    if (remaining > layer) {
        out.saturation = 1;
        for (int j = 0; j + 1 < k_steps; ++j) {
            out.delta_nu[static_cast<std::size_t>(j)] = -1;
        }
        remaining -= layer;
    }
    for (int j = 0; j + 1 < k_steps; ++j) {
        const int bit = static_cast<int>((remaining >> j) & 1);
        out.delta_nu[static_cast<std::size_t>(j)] -= bit;
    }
    for (int j = 0; j < k_steps; ++j) {
        out.bits[static_cast<std::size_t>(j)] =
            static_cast<int>(std::llabs(out.delta_nu[static_cast<std::size_t>(j)]));
    }
    return out;
}

SchedulePlan apply_redistribution(const SchedulePlan& plan, const Redistribution& r) {
    plan.validate();
    if (r.delta_nu.size() != plan.steps.size()) {
        throw std::invalid_argument("adjustment length does not match the plan");
    }
    SchedulePlan out = plan;
    for (std::size_t j = 0; j < out.steps.size(); ++j) {
        out.steps[j].nu0 += r.delta_nu[j];
        out.steps[j].nuplus += r.delta_nu[j];
    }
    out.steps.front().nu0 += r.extra_probe;
    for (const StepSpec& step : out.steps) {
        if (step.nu0 < 0 || step.nuplus < 0) {
            throw infeasible_error("withdrawal would leave a negative shot count");
        }
    }
    out.validate();
    return out;
}

double mse_bound_redistributed(const RampParams& params, std::int64_t delta_n) {
    check_ramp_params(params);
    const std::int64_t top = std::int64_t{1} << params.k_steps;
    if (delta_n < 0 || delta_n > 2 * top) {
        throw std::invalid_argument("closed form covers 0 <= delta_n <= 2^(K+1)");
    }
    const BoundConstants& c = params.constants;
    const double gain = interval_floor_coeff() * (1.0 - 1.0 / c.c_const) * 64.0 * c.a_const *
                        static_cast<double>(delta_n) /
                        (std::ldexp(1.0, 3 * params.k_steps) *
                         std::pow(c.c_const, params.x_k - 0.5));
    return mse_bound_ramp(params) - gain;
}

double redistribution_objective(const std::vector<std::int64_t>& delta_nu,
                                const BoundConstants& constants) {
    double total = 0.0;
    double weight = 2.0;
    for (std::int64_t d : delta_nu) {
        total += weight * std::pow(constants.c_const, -static_cast<double>(d));
        weight *= 2.0;
    }
    return total;
}

bool move_fuse(std::vector<std::int64_t>& delta_nu, std::size_t j) {
    if (j + 1 >= delta_nu.size() || delta_nu[j] < delta_nu[j + 1] + 2) {
        return false;
    }
    delta_nu[j] -= 2;
    delta_nu[j + 1] += 1;
    return true;
}

bool move_split(std::vector<std::int64_t>& delta_nu, std::size_t j) {
    if (j + 1 >= delta_nu.size() || delta_nu[j + 1] < delta_nu[j] + 2) {
        return false;
    }
    delta_nu[j] += 2;
    delta_nu[j + 1] -= 1;
    return true;
}

bool move_carry(std::vector<std::int64_t>& delta_nu, std::size_t j) {
    if (j >= delta_nu.size() || delta_nu[j] != 2) {
        return false;
    }
    std::size_t end = j + 1;
    while (end < delta_nu.size() && delta_nu[end] == 1) {
        ++end;
    }
    if (end >= delta_nu.size() || delta_nu[end] != 0) {
        return false;
    }
    delta_nu[j] = 0;
    for (std::size_t l = j + 1; l < end; ++l) {
        delta_nu[l] = 0;
    }
    delta_nu[end] = 1;
    return true;
}

bool move_borrow(std::vector<std::int64_t>& delta_nu, std::size_t j) {
    if (j >= delta_nu.size() || delta_nu[j] != -1) {
        return false;
    }
    std::size_t end = j + 1;
    while (end < delta_nu.size() && delta_nu[end] == 0) {
        ++end;
    }
    if (end >= delta_nu.size() || delta_nu[end] != 1) {
        return false;
    }
    for (std::size_t l = j; l < end; ++l) {
        delta_nu[l] = 1;
    }
    delta_nu[end] = 0;
    return true;
}

double qfi(const SchedulePlan& plan) {
    plan.validate();
    double total = 0.0;
    for (const StepSpec& step : plan.steps) {
        const double m = static_cast<double>(step.m);
        total += static_cast<double>(step.nu0 + step.nuplus) * m * m;
    }
    return total;
}

double qfi_ratio_lower_bound(double x_k, const BoundConstants& constants) {
    const double low = constants.gamma + x_k - 0.5;
    return 36.0 * low * low / (2.0 * constants.gamma + 6.0 * x_k + 3.0);
}

std::pair<double, double> qfi_bounds_redistributed(const RampParams& params,
                                                   std::int64_t delta_n) {
    check_ramp_params(params);
    const double base = (2.0 * params.constants.gamma / 3.0 + 2.0 * params.x_k + 1.0) *
                        std::ldexp(1.0, 2 * params.k_steps) / 3.0;
    const double d = static_cast<double>(delta_n);
    return {base + d * d / 6.0, base + d * d / 2.0};
}

}  // namespace ghzladder
