#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "ghzladder/baseb.hpp"
#include "ghzladder/constrained.hpp"
#include "ghzladder/core.hpp"
#include "ghzladder/errorprob.hpp"
#include "ghzladder/estimator.hpp"
#include "ghzladder/harness.hpp"
#include "ghzladder/planner.hpp"

namespace {

using namespace ghzladder;

std::string fmt(double v) {
    if (std::isnan(v)) {
        return "nan";
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void emit(const DataTable& table, bool json) {
    if (json) {
        write_json(table, std::cout);
    } else {
        write_csv(table, std::cout);
    }
}

/// Shared step-table layout for every command that prints a plan.
DataTable plan_table(const SchedulePlan& plan) {
    DataTable table;
    table.columns = {"j", "m", "nu0", "nuplus"};
    for (std::size_t j = 0; j < plan.steps.size(); ++j) {
        const StepSpec& step = plan.steps[j];
        table.rows.push_back({static_cast<double>(j + 1), static_cast<double>(step.m),
                              static_cast<double>(step.nu0),
                              static_cast<double>(step.nuplus)});
    }
    return table;
}

Backend backend_from_string(const std::string& s) {
    if (s == "collective") {
        return Backend::collective;
    }
    if (s == "parity") {
        return Backend::parity;
    }
    throw std::invalid_argument("backend must be collective or parity, got " + s);
}

int run_calibrate(int nu_max, int angles, int div, bool json) {
    if (div < 2) {
        throw std::invalid_argument("threshold divisor must be at least 2");
    }
    const CalibrationResult r = calibrate(nu_max, angles, kPi / static_cast<double>(div));
    DataTable table;
    table.metadata.emplace_back("nu_max", std::to_string(nu_max));
    table.metadata.emplace_back("angles", std::to_string(angles));
    table.metadata.emplace_back("threshold_div", std::to_string(div));
    table.metadata.emplace_back("a_fit", fmt(r.fitted.a_const));
    table.metadata.emplace_back("c_fit", fmt(r.fitted.c_const));
    table.metadata.emplace_back("gamma_fit", fmt(r.fitted.gamma));
    table.columns = {"nu", "worst", "envelope"};
    for (int nu = 1; nu <= nu_max; ++nu) {
        const double worst = r.worst_probs[static_cast<std::size_t>(nu - 1)];
        const double envelope =
            r.fitted.a_const * std::pow(r.fitted.c_const, -static_cast<double>(nu));
        table.rows.push_back({static_cast<double>(nu), worst, envelope});
    }
    emit(table, json);
    return 0;
}

int run_plan(int k, double x_k, std::optional<std::int64_t> target_n, bool json) {
    const BoundConstants c = BoundConstants::calibrated_numeric();
    const RampParams params{k, x_k, c};
    SchedulePlan plan = ramp(params);
    std::int64_t delta = 0;
    if (target_n) {
        delta = *target_n - total_probes(plan);
        plan = apply_redistribution(plan, redistribute(delta, k));
    }
    if (json) {
        std::cout << plan_to_json(plan) << "\n";
        return 0;
    }
    DataTable table = plan_table(plan);
    table.metadata.emplace_back("k", std::to_string(k));
    table.metadata.emplace_back("x_k", fmt(x_k));
    table.metadata.emplace_back("delta_n", std::to_string(delta));
    table.metadata.emplace_back("n_total", std::to_string(total_probes(plan)));
    table.metadata.emplace_back("bound_raw", fmt(mse_bound_raw(plan, c)));
    const double top = std::ldexp(1.0, k);
    const bool closed_applies = delta >= 0 && static_cast<double>(delta) <= 2.0 * top;
    table.metadata.emplace_back(
        "bound_closed",
        fmt(closed_applies ? mse_bound_redistributed(params, delta) : std::nan("")));
    emit(table, false);
    return 0;
}

int run_bound(int k, double x_k, const std::string& vs_n, bool json) {
    const BoundConstants c = BoundConstants::calibrated_numeric();
    DataTable table;
    table.metadata.emplace_back("k", std::to_string(k));
    table.metadata.emplace_back("x_k", fmt(x_k));
    if (vs_n.empty()) {
        const RampParams params{k, x_k, c};
        const ResourceBounds n = resource_bounds(params);
        table.columns = {"bound_closed", "bound_raw", "prefactor",
                         "n_lower",      "n_upper",   "n_exact"};
        table.rows.push_back({mse_bound_ramp(params), mse_bound_raw(ramp(params), c),
                              prefactor_bound(x_k, c), n.lower, n.upper,
                              static_cast<double>(n.exact)});
        emit(table, json);
        return 0;
    }
    double n0 = 0.0;
    double n1 = 0.0;
    int steps = 0;
    if (std::sscanf(vs_n.c_str(), "%lf:%lf:%d", &n0, &n1, &steps) != 3 || n0 <= 0.0 ||
        n1 <= n0 || steps < 2) {
        throw std::invalid_argument("--vs-n wants N0:N1:steps with 0 < N0 < N1, steps >= 2");
    }
    table.metadata.emplace_back("n_lo", fmt(n0));
    table.metadata.emplace_back("n_hi", fmt(n1));
    table.metadata.emplace_back("points", std::to_string(steps));
    table.columns = {"n", "bound"};
    for (int i = 0; i < steps; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(steps - 1);
        const double n = n0 * std::pow(n1 / n0, t);
        double bound = std::nan("");
        try {
            bound = mse_bound_vs_n(n, k, c);
        } catch (const infeasible_error&) {
        }
        table.rows.push_back({n, bound});
    }
    emit(table, json);
    return 0;
}

int run_simulate(const std::string& plan_path, std::int64_t trials, std::uint64_t seed,
                 const std::string& backend, double eta, bool json) {
    std::ifstream in(plan_path);
    if (!in) {
        throw std::invalid_argument("cannot read plan file: " + plan_path);
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();

    CampaignSpec spec;
    spec.plan = plan_from_json(buffer.str());
    spec.theta_values = default_angle_grid(static_cast<int>(spec.plan.steps.size()));
    spec.trials = trials;
    spec.seed = seed;
    spec.backend = backend_from_string(backend);
    if (eta < 1.0) {
        spec.loss = LossModel{eta};
    }
    const CampaignSummary summary = run_campaign(spec);
    emit(summary_table(spec, summary), json);
    return 0;
}

int run_sweep(const CLI::App* sub, const std::string& figure, int k, double x_k, double eta,
              int b_max, double n_lo, double n_hi, int points, bool json) {
    FigureParams params;
    if (sub->count("--k")) params.k = k;
    if (sub->count("--xk")) params.x_k = x_k;
    if (sub->count("--eta")) params.eta = eta;
    if (sub->count("--b-max")) params.b_max = b_max;
    if (sub->count("--n-lo")) params.n_lo = n_lo;
    if (sub->count("--n-hi")) params.n_hi = n_hi;
    if (sub->count("--points")) params.points = points;
    emit(figure_table(figure_from_string(figure), params), json);
    return 0;
}

int run_limited_plan(const CLI::App* sub, int k, double x_km1, std::int64_t cap, double eta,
                     bool json) {
    HybridPlanParams params{k, x_km1, BoundConstants::calibrated_numeric(), {}, {}};
    if (sub->count("--cap")) {
        params.cap = cap;
    }
    if (sub->count("--eta") && eta < 1.0) {
        params.loss = LossModel{eta};
    }
    const SchedulePlan plan = hybrid_plan(params);
    if (json) {
        std::cout << plan_to_json(plan) << "\n";
        return 0;
    }
    DataTable table = plan_table(plan);
    table.metadata.emplace_back("k", std::to_string(k));
    table.metadata.emplace_back("x_km1", fmt(x_km1));
    table.metadata.emplace_back("cap", params.cap ? std::to_string(*params.cap) : "none");
    table.metadata.emplace_back("eta", fmt(params.loss ? params.loss->eta : 1.0));
    table.metadata.emplace_back("n_total", std::to_string(total_probes(plan)));
    table.metadata.emplace_back("nu_last", fmt(hybrid_last_step(params)));
    table.metadata.emplace_back("bound", fmt(hybrid_mse_bound(params)));
    emit(table, false);
    return 0;
}

int run_noise_plan(int k, double x_k, double eta, bool json) {
    const BoundConstants c = BoundConstants::calibrated_numeric();
    const LossModel loss{eta};
    const LossyRamp provision = lossy_ramp(k, x_k, loss, c);
    const SchedulePlan plan = lossy_plan(k, x_k, loss, c);
    if (json) {
        std::cout << plan_to_json(plan) << "\n";
        return 0;
    }
    const double budget = lossy_budget(provision);
    DataTable table;
    table.columns = {"j", "m", "expected", "provisioned", "nu"};
    for (std::size_t j = 0; j < plan.steps.size(); ++j) {
        table.rows.push_back({static_cast<double>(j + 1),
                              static_cast<double>(plan.steps[j].m), provision.expected[j],
                              provision.provisioned[j],
                              static_cast<double>(plan.steps[j].nu0)});
    }
    table.metadata.emplace_back("k", std::to_string(k));
    table.metadata.emplace_back("x_k", fmt(x_k));
    table.metadata.emplace_back("eta", fmt(eta));
    table.metadata.emplace_back("budget", fmt(budget));
    table.metadata.emplace_back("n_total", std::to_string(total_probes(plan)));
    table.metadata.emplace_back("x_ideal_top", fmt(ideal_ramp_top_for_budget(budget, k, c)));
    emit(table, false);
    return 0;
}

int dispatch(int argc, char** argv) {
    CLI::App app{"GHZ-ladder phase estimation: plans, bounds, and campaigns"};
    app.require_subcommand(1);

    auto* cal = app.add_subcommand("calibrate", "fit the per-step failure envelope");
    int nu_max = 80;
    int angles = 100;
    int div = 3;
    bool cal_json = false;
    cal->add_option("--nu-max", nu_max, "largest shot count")->check(CLI::Range(1, 500));
    cal->add_option("--angles", angles, "angle grid size")->check(CLI::Range(1, 100000));
    cal->add_option("--threshold-div", div, "failure threshold is pi over this");
    cal->add_flag("--json", cal_json, "emit JSON");

    auto* plan_cmd = app.add_subcommand("plan", "round a shot ramp into a schedule");
    int plan_k = 0;
    double plan_xk = 0.0;
    std::int64_t plan_target = 0;
    bool plan_json = false;
    plan_cmd->add_option("--k", plan_k, "ladder depth")->required();
    plan_cmd->add_option("--xk", plan_xk, "top-step shot offset")->required();
    plan_cmd->add_option("--target-n", plan_target,
                         "stretch or shrink to this probe budget");
    plan_cmd->add_flag("--json", plan_json, "emit the executable plan as JSON");

    auto* bound_cmd = app.add_subcommand("bound", "accuracy bounds for a ramp");
    int bound_k = 0;
    double bound_xk = 0.0;
    std::string vs_n;
    bool bound_json = false;
    bound_cmd->add_option("--k", bound_k, "ladder depth")->required();
    bound_cmd->add_option("--xk", bound_xk, "top-step shot offset")->required();
    bound_cmd->add_option("--vs-n", vs_n, "sweep the budget as N0:N1:steps");
    bound_cmd->add_flag("--json", bound_json, "emit JSON");

    auto* sim = app.add_subcommand("simulate", "Monte Carlo campaign for a plan file");
    std::string plan_path;
    std::int64_t trials = 0;
    std::uint64_t seed = 0;
    std::string backend = "collective";
    double sim_eta = 1.0;
    bool sim_json = false;
    sim->add_option("--plan", plan_path, "plan JSON file")->required();
    sim->add_option("--trials", trials, "trials per angle")->required();
    sim->add_option("--seed", seed, "campaign seed")->required();
    sim->add_option("--backend", backend, "collective or parity");
    sim->add_option("--eta", sim_eta, "per-probe survival probability");
    sim->add_flag("--json", sim_json, "emit JSON");

    auto* sweep = app.add_subcommand("sweep", "emit the data behind one figure");
    std::string figure;
    int sweep_k = 0;
    double sweep_xk = 0.0;
    double sweep_eta = 0.0;
    int b_max = 10;
    double n_lo = 0.0;
    double n_hi = 0.0;
    int points = 0;
    bool sweep_json = false;
    sweep->add_option("--figure", figure, "fig5|fig6|fig7|fig8|fig9|fig10")->required();
    sweep->add_option("--k", sweep_k, "ladder depth override");
    sweep->add_option("--xk", sweep_xk, "shot offset override");
    sweep->add_option("--eta", sweep_eta, "survival probability override");
    sweep->add_option("--b-max", b_max, "largest base (fig10)");
    sweep->add_option("--n-lo", n_lo, "budget grid start");
    sweep->add_option("--n-hi", n_hi, "budget grid end");
    sweep->add_option("--points", points, "budget grid size");
    sweep->add_flag("--json", sweep_json, "emit JSON");

    auto* limited = app.add_subcommand("limited-plan", "size-limited hybrid schedule");
    int lim_k = 0;
    double x_km1 = 0.0;
    std::int64_t cap = 0;
    double lim_eta = 1.0;
    bool lim_json = false;
    limited->add_option("--k", lim_k, "ladder depth")->required();
    limited->add_option("--xkm1", x_km1, "next-to-last-step shot offset")->required();
    limited->add_option("--cap", cap, "largest block size");
    limited->add_option("--eta", lim_eta, "per-probe survival probability");
    limited->add_flag("--json", lim_json, "emit the executable plan as JSON");

    auto* noise = app.add_subcommand("noise-plan", "loss-provisioned schedule");
    int noise_k = 0;
    double noise_xk = 0.0;
    double noise_eta = 0.0;
    bool noise_json = false;
    noise->add_option("--k", noise_k, "ladder depth")->required();
    noise->add_option("--xk", noise_xk, "surviving top-step shot offset")->required();
    noise->add_option("--eta", noise_eta, "per-probe survival probability")->required();
    noise->add_flag("--json", noise_json, "emit the executable plan as JSON");

    auto* base = app.add_subcommand("base-study", "prefactor scan over ladder bases");
    int study_b_max = 10;
    bool base_json = false;
    base->add_option("--b-max", study_b_max, "largest base");
    base->add_flag("--json", base_json, "emit JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (cal->parsed()) {
        return run_calibrate(nu_max, angles, div, cal_json);
    }
    if (plan_cmd->parsed()) {
        std::optional<std::int64_t> target;
        if (plan_cmd->count("--target-n")) {
            target = plan_target;
        }
        return run_plan(plan_k, plan_xk, target, plan_json);
    }
    if (bound_cmd->parsed()) {
        return run_bound(bound_k, bound_xk, vs_n, bound_json);
    }
    if (sim->parsed()) {
        return run_simulate(plan_path, trials, seed, backend, sim_eta, sim_json);
    }
    if (sweep->parsed()) {
        return run_sweep(sweep, figure, sweep_k, sweep_xk, sweep_eta, b_max, n_lo, n_hi,
                         points, sweep_json);
    }
    if (limited->parsed()) {
        return run_limited_plan(limited, lim_k, x_km1, cap, lim_eta, lim_json);
    }
    if (noise->parsed()) {
        return run_noise_plan(noise_k, noise_xk, noise_eta, noise_json);
    }
    if (base->parsed()) {
        FigureParams params;
        params.b_max = study_b_max;
        emit(figure_table(Figure::fig10, params), base_json);
        return 0;
    }
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return dispatch(argc, argv);
    } catch (const ghzladder::infeasible_error& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid parameters: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
