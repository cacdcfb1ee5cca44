#include "ghzladder/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "json.hpp"

#include "ghzladder/baseb.hpp"
#include "ghzladder/planner.hpp"
#include "ghzladder/rng.hpp"

namespace ghzladder {

namespace {

std::string fmt(double v) {
    if (std::isnan(v)) {
        return "nan";
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt_int(std::int64_t v) { return std::to_string(v); }

bool is_pure_ladder(const SchedulePlan& plan) {
    if (plan.base != 2 || plan.cap.has_value() ||
        plan.last_step_mode != LastStepMode::ladder) {
        return false;
    }
    std::int64_t m = 1;
    for (const StepSpec& step : plan.steps) {
        if (step.m != m) {
            return false;
        }
        m *= 2;
    }
    return true;
}

/// The closed ramp bound applies when the plan's counts are exactly the
/// rounded ramp at some known offset.  ramp_x is the caller's word; without
/// it, the top-step count is the only integer candidate.
double closed_bound_for(const CampaignSpec& spec) {
    const int k = static_cast<int>(spec.plan.steps.size());
    if (spec.ramp_x.has_value()) {
        return mse_bound_ramp(RampParams{k, *spec.ramp_x, spec.constants});
    }
    const double x = static_cast<double>(spec.plan.steps.back().nu0);
    const SchedulePlan candidate = ramp(RampParams{k, x, spec.constants});
    for (std::size_t j = 0; j < candidate.steps.size(); ++j) {
        if (candidate.steps[j].nu0 != spec.plan.steps[j].nu0 ||
            candidate.steps[j].nuplus != spec.plan.steps[j].nuplus) {
            return std::nan("");
        }
    }
    return mse_bound_ramp(RampParams{k, x, spec.constants});
}

struct ChunkResult {
    NeumaierSum sq_error;
    std::vector<std::int64_t> first_failure;
};

const char* backend_name(Backend backend) {
    return backend == Backend::collective ? "collective" : "parity";
}

double geometric_point(double lo, double hi, int i, int points) {
    if (points == 1) {
        return lo;
    }
    const double t = static_cast<double>(i) / static_cast<double>(points - 1);
    return lo * std::pow(hi / lo, t);
}

/// Operating depth along the piecewise envelope: upgrade from K to K+1
/// each time the budget passes the size-upgrade point u* 2^(K+1).
int operating_depth(double n, double u_star) {
    int k = 1;
    while (k < 59 && n >= u_star * std::ldexp(1.0, k + 1)) {
        ++k;
    }
    return k;
}

void require(bool ok, const char* what) {
    if (!ok) {
        throw std::invalid_argument(what);
    }
}

struct FigureConfig {
    int k = 0;
    double x_k = 0.0;
    double eta = 1.0;
    int b_max = 10;
    double n_lo = 0.0;
    double n_hi = 0.0;
    int points = 0;
};

FigureConfig resolve(Figure figure, const FigureParams& params) {
    FigureConfig cfg;
    switch (figure) {
        case Figure::fig5:
            cfg.k = params.k.value_or(15);
            cfg.points = params.points.value_or(600);
            cfg.n_lo = params.n_lo.value_or(10.0 * std::ldexp(1.0, cfg.k + 1));
            cfg.n_hi = params.n_hi.value_or(60.0 * std::ldexp(1.0, cfg.k + 1));
            break;
        case Figure::fig6:
            cfg.points = params.points.value_or(1201);
            cfg.n_lo = params.n_lo.value_or(1e2);
            cfg.n_hi = params.n_hi.value_or(1e7);
            break;
        case Figure::fig7:
            cfg.k = params.k.value_or(10);
            cfg.x_k = params.x_k.value_or(30.0);
            break;
        case Figure::fig8:
        case Figure::fig9:
            cfg.k = params.k.value_or(10);
            cfg.x_k = params.x_k.value_or(10.0);
            cfg.eta = params.eta.value_or(0.998);
            break;
        case Figure::fig10:
            cfg.b_max = params.b_max.value_or(10);
            break;
    }
    if (cfg.points != 0) {
        require(cfg.points >= 2, "grid needs at least two points");
        require(cfg.n_lo > 0.0 && cfg.n_hi > cfg.n_lo, "budget range must be increasing");
    }
    return cfg;
}

void push_constants_meta(DataTable& table, const BoundConstants& c) {
    table.metadata.emplace_back("a", fmt(c.a_const));
    table.metadata.emplace_back("c", fmt(c.c_const));
    table.metadata.emplace_back("gamma", fmt(c.gamma));
}

DataTable fig5_table(const FigureConfig& cfg) {
    const BoundConstants c = BoundConstants::calibrated_numeric();
    DataTable table;
    table.metadata.emplace_back("figure", "fig5");
    table.metadata.emplace_back("k", fmt_int(cfg.k));
    push_constants_meta(table, c);
    table.metadata.emplace_back("u_star", fmt(upgrade_point(c).n_units));
    table.columns = {"n", "bound_k", "bound_k1"};
    for (int i = 0; i < cfg.points; ++i) {
        const double n = geometric_point(cfg.n_lo, cfg.n_hi, i, cfg.points);
        std::vector<double> row{n, std::nan(""), std::nan("")};
        try {
            row[1] = mse_bound_vs_n(n, cfg.k, c);
        } catch (const infeasible_error&) {
        }
        try {
            row[2] = mse_bound_vs_n(n, cfg.k + 1, c);
        } catch (const infeasible_error&) {
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

DataTable fig6_table(const FigureConfig& cfg) {
    const BoundConstants c = BoundConstants::calibrated_numeric();
    const double u_star = upgrade_point(c).n_units;
    DataTable table;
    table.metadata.emplace_back("figure", "fig6");
    push_constants_meta(table, c);
    table.metadata.emplace_back("u_star", fmt(u_star));
    table.columns = {"n", "sql", "hs", "mse_bound", "qfi_inv"};
    for (int i = 0; i < cfg.points; ++i) {
        const double n = geometric_point(cfg.n_lo, cfg.n_hi, i, cfg.points);
        const int k = operating_depth(n, u_star);
        double bound = std::nan("");
        double qfi_inv = std::nan("");
        try {
            bound = mse_bound_vs_n(n, k, c);
        } catch (const infeasible_error&) {
        }
        const double shots_top = n / std::ldexp(1.0, k) - 4.0 * c.gamma / 3.0;
        if (shots_top > 0.0) {
            qfi_inv = 3.0 / (shots_top * std::ldexp(1.0, 2 * k));
        }
        table.rows.push_back({n, 1.0 / n, kPi * kPi / (n * n), bound, qfi_inv});
    }
    return table;
}

DataTable fig7_table(const FigureConfig& cfg) {
    const BoundConstants c = BoundConstants::calibrated_numeric();
    const HybridPlanParams params{cfg.k, cfg.x_k, c, {}, {}};
    const SchedulePlan plan = hybrid_plan(params);
    const double n = static_cast<double>(total_probes(plan));
    const double x_top = ideal_ramp_top_for_budget(n, cfg.k, c);
    DataTable table;
    table.metadata.emplace_back("figure", "fig7");
    table.metadata.emplace_back("k", fmt_int(cfg.k));
    table.metadata.emplace_back("x_km1", fmt(cfg.x_k));
    push_constants_meta(table, c);
    table.metadata.emplace_back("n", fmt(n));
    table.metadata.emplace_back("x_ideal_top", fmt(x_top));
    table.metadata.emplace_back("bound_limited", fmt(hybrid_mse_bound(params)));
    table.metadata.emplace_back("bound_ideal",
                                fmt(mse_bound_ramp(RampParams{cfg.k, x_top, c})));
    table.columns = {"j", "size", "nu_limited", "probes_limited", "x_ideal", "probes_ideal"};
    for (int j = 1; j <= cfg.k; ++j) {
        const StepSpec& step = plan.steps[static_cast<std::size_t>(j - 1)];
        const double probes =
            static_cast<double>((step.nu0 + step.nuplus) * step.m);
        const double x_ideal = c.gamma * static_cast<double>(cfg.k - j) + x_top;
        table.rows.push_back({static_cast<double>(j), static_cast<double>(step.m),
                              static_cast<double>(step.nu0 + step.nuplus) / 2.0, probes,
                              x_ideal, x_ideal * std::ldexp(1.0, j)});
    }
    return table;
}

DataTable lossy_delta_table(Figure figure, const FigureConfig& cfg) {
    const BoundConstants c = BoundConstants::calibrated_numeric();
    const LossModel loss{cfg.eta};
    const LossyRamp lossy = lossy_ramp(cfg.k, cfg.x_k, loss, c);
    const double n = lossy_budget(lossy);
    const double x_top = ideal_ramp_top_for_budget(n, cfg.k, c);
    DataTable table;
    table.metadata.emplace_back("figure", figure == Figure::fig8 ? "fig8" : "fig9");
    table.metadata.emplace_back("k", fmt_int(cfg.k));
    table.metadata.emplace_back("x_k", fmt(cfg.x_k));
    table.metadata.emplace_back("eta", fmt(cfg.eta));
    push_constants_meta(table, c);
    table.metadata.emplace_back("n", fmt(n));
    table.metadata.emplace_back("x_ideal_top", fmt(x_top));
    const bool probes = figure == Figure::fig9;
    table.columns = probes
                        ? std::vector<std::string>{"j", "probes_lossy", "probes_ideal",
                                                   "delta_probes"}
                        : std::vector<std::string>{"j", "states_lossy", "states_ideal",
                                                   "delta_states"};
    for (int j = 1; j <= cfg.k; ++j) {
        const double scale = probes ? std::ldexp(1.0, j) : 1.0;
        const double noisy = lossy.provisioned[static_cast<std::size_t>(j - 1)] * scale;
        const double ideal =
            (c.gamma * static_cast<double>(cfg.k - j) + x_top) * scale;
        table.rows.push_back({static_cast<double>(j), noisy, ideal, noisy - ideal});
    }
    return table;
}

DataTable fig10_table(const FigureConfig& cfg) {
    DataTable table;
    table.metadata.emplace_back("figure", "fig10");
    table.metadata.emplace_back("b_max", fmt_int(cfg.b_max));
    table.metadata.emplace_back("a", fmt(4.0));
    table.columns = {"b", "n", "c", "gamma", "x_k_opt", "prefactor"};
    for (const BaseStudyRow& row : base_study(cfg.b_max)) {
        table.rows.push_back({static_cast<double>(row.base), static_cast<double>(row.shrink),
                              row.c_analytic, row.gamma_b, row.x_k_opt, row.prefactor});
    }
    return table;
}

}  // namespace

std::vector<Angle> default_angle_grid(int k_steps) {
    if (k_steps < 1 || k_steps > 60) {
        throw std::invalid_argument("step count must be in [1, 60], got " +
                                    std::to_string(k_steps));
    }
    std::vector<Angle> grid;
    grid.reserve(32);
    for (int i = 0; i < 24; ++i) {
        grid.push_back(canonicalize((static_cast<double>(i) + 0.5) * kTwoPi / 24.0));
    }
    // Eight angles sitting just off top-step period boundaries, where a
    // wrong fold replica is nearest.
    const double period = kTwoPi / std::ldexp(1.0, k_steps);
    const double boundaries = std::ldexp(1.0, k_steps);
    for (int i = 0; i < 8; ++i) {
        const double index =
            std::ceil(boundaries * static_cast<double>(i + 1) / 9.0);
        const double sign = (i % 2 == 0) ? 1.0 : -1.0;
        grid.push_back(canonicalize(index * period + sign * period / 32.0));
    }
    return grid;
}

CampaignSummary run_campaign(const CampaignSpec& spec, int workers) {
    spec.plan.validate();
    if (spec.trials < 1) {
        throw std::invalid_argument("trial count must be positive");
    }
    if (spec.theta_values.empty()) {
        throw std::invalid_argument("angle grid must not be empty");
    }
    if (spec.loss && (!(spec.loss->eta > 0.0) || spec.loss->eta > 1.0)) {
        throw std::invalid_argument("survival probability must be in (0, 1]");
    }

    const std::size_t rows = spec.theta_values.size();
    const std::size_t k = spec.plan.steps.size();

    // Fixed-size trial chunks, each summed independently and merged in
    // index order: the outcome is bitwise identical for every worker
    // count.  The chunk count is capped so bookkeeping stays small even
    // for huge campaigns.
    const std::int64_t max_chunks =
        std::max<std::int64_t>(1, 65536 / static_cast<std::int64_t>(rows));
    const std::int64_t chunks_wanted = (spec.trials + 255) / 256;
    const std::int64_t n_chunks = std::clamp<std::int64_t>(chunks_wanted, 1, max_chunks);
    const std::int64_t chunk_len = (spec.trials + n_chunks - 1) / n_chunks;
    const std::size_t tasks = rows * static_cast<std::size_t>(n_chunks);

    std::vector<ChunkResult> results(tasks);
    for (ChunkResult& r : results) {
        r.first_failure.assign(k, 0);
    }

    RunOptions base_options;
    base_options.backend = spec.backend;
    base_options.eta = spec.loss ? spec.loss->eta : 1.0;
    base_options.noiseless = spec.noiseless;

    std::atomic<std::size_t> next{0};
    auto work = [&]() {
        for (std::size_t task = next.fetch_add(1); task < tasks; task = next.fetch_add(1)) {
            const std::size_t row = task / static_cast<std::size_t>(n_chunks);
            const std::int64_t chunk = static_cast<std::int64_t>(task) % n_chunks;
            const std::int64_t t_begin = chunk * chunk_len;
            const std::int64_t t_end = std::min(spec.trials, t_begin + chunk_len);
            ChunkResult& out = results[task];
            const Angle theta = spec.theta_values[row];
            for (std::int64_t t = t_begin; t < t_end; ++t) {
                RunOptions options = base_options;
                options.seed = derive_key(
                    spec.seed, static_cast<std::uint64_t>(row) *
                                       static_cast<std::uint64_t>(spec.trials) +
                                   static_cast<std::uint64_t>(t));
                const auto [est, state] = run_estimation_ex(theta, spec.plan, options);
                const double err = circle_distance(est, theta);
                out.sq_error.add(err * err);
                for (std::size_t j = 0; j < state.history.size(); ++j) {
                    const std::optional<bool>& ok = state.history[j].success;
                    if (ok.has_value() && !*ok) {
                        out.first_failure[j] += 1;
                        break;
                    }
                }
            }
        }
    };

    int pool = workers;
    if (pool <= 0) {
        pool = static_cast<int>(std::thread::hardware_concurrency());
        if (pool <= 0) {
            pool = 1;
        }
    }
    pool = static_cast<int>(
        std::min<std::size_t>(static_cast<std::size_t>(pool), tasks));
    if (pool <= 1) {
        work();
    } else {
        std::vector<std::thread> threads;
        threads.reserve(static_cast<std::size_t>(pool));
        for (int w = 0; w < pool; ++w) {
            threads.emplace_back(work);
        }
        for (std::thread& t : threads) {
            t.join();
        }
    }

    CampaignSummary summary;
    summary.per_step_first_failure.assign(k, 0);
    NeumaierSum total;
    for (const ChunkResult& r : results) {
        total.add(r.sq_error.value());
        for (std::size_t j = 0; j < k; ++j) {
            summary.per_step_first_failure[j] += r.first_failure[j];
        }
    }
    const double samples =
        static_cast<double>(rows) * static_cast<double>(spec.trials);
    summary.empirical_mse = total.value() / samples;
    summary.empirical_rmse = std::sqrt(summary.empirical_mse);
    summary.n_total = total_probes(spec.plan);

    if (!spec.loss && is_pure_ladder(spec.plan)) {
        summary.bound_raw = mse_bound_raw(spec.plan, spec.constants);
        summary.bound_closed = closed_bound_for(spec);
    } else {
        summary.bound_raw = std::nan("");
        summary.bound_closed = std::nan("");
    }
    return summary;
}

Figure figure_from_string(const std::string& s) {
    if (s == "fig5") return Figure::fig5;
    if (s == "fig6") return Figure::fig6;
    if (s == "fig7") return Figure::fig7;
    if (s == "fig8") return Figure::fig8;
    if (s == "fig9") return Figure::fig9;
    if (s == "fig10") return Figure::fig10;
    throw std::invalid_argument("unknown figure id: " + s);
}

std::string to_string(Figure figure) {
    switch (figure) {
        case Figure::fig5: return "fig5";
        case Figure::fig6: return "fig6";
        case Figure::fig7: return "fig7";
        case Figure::fig8: return "fig8";
        case Figure::fig9: return "fig9";
        case Figure::fig10: return "fig10";
    }
    throw std::invalid_argument("unknown figure id");
}

DataTable figure_table(Figure figure, const FigureParams& params) {
    const FigureConfig cfg = resolve(figure, params);
    switch (figure) {
        case Figure::fig5: return fig5_table(cfg);
        case Figure::fig6: return fig6_table(cfg);
        case Figure::fig7: return fig7_table(cfg);
        case Figure::fig8:
        case Figure::fig9: return lossy_delta_table(figure, cfg);
        case Figure::fig10: return fig10_table(cfg);
    }
    throw std::invalid_argument("unknown figure id");
}

void write_csv(const DataTable& table, std::ostream& out) {
    out << "# version=" << kVersion << "\n";
    for (const auto& [key, value] : table.metadata) {
        out << "# " << key << "=" << value << "\n";
    }
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
        out << (i ? "," : "") << table.columns[i];
    }
    out << "\n";
    for (const std::vector<double>& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            out << (i ? "," : "") << fmt(row[i]);
        }
        out << "\n";
    }
}

void write_json(const DataTable& table, std::ostream& out) {
    nlohmann::json doc;
    doc["version"] = kVersion;
    nlohmann::json meta = nlohmann::json::object();
    for (const auto& [key, value] : table.metadata) {
        meta[key] = value;
    }
    doc["metadata"] = meta;
    doc["columns"] = table.columns;
    doc["rows"] = table.rows;
    out << doc.dump(2) << "\n";
}

void emit_figure_data(Figure figure, const FigureParams& params, std::ostream& out) {
    write_csv(figure_table(figure, params), out);
}

DataTable summary_table(const CampaignSpec& spec, const CampaignSummary& summary) {
    DataTable table;
    table.metadata.emplace_back("trials", fmt_int(spec.trials));
    table.metadata.emplace_back("angles", fmt_int(static_cast<std::int64_t>(
                                              spec.theta_values.size())));
    table.metadata.emplace_back("seed", std::to_string(spec.seed));
    table.metadata.emplace_back("backend", backend_name(spec.backend));
    table.metadata.emplace_back("eta", fmt(spec.loss ? spec.loss->eta : 1.0));
    table.metadata.emplace_back("noiseless", spec.noiseless ? "1" : "0");
    table.metadata.emplace_back("k", fmt_int(static_cast<std::int64_t>(
                                         spec.plan.steps.size())));
    push_constants_meta(table, spec.constants);
    if (spec.ramp_x) {
        table.metadata.emplace_back("ramp_x", fmt(*spec.ramp_x));
    }
    table.columns = {"mse", "rmse", "n_total", "bound_raw", "bound_closed"};
    std::vector<double> row{summary.empirical_mse, summary.empirical_rmse,
                            static_cast<double>(summary.n_total), summary.bound_raw,
                            summary.bound_closed};
    for (std::size_t j = 0; j < summary.per_step_first_failure.size(); ++j) {
        table.columns.push_back("fail_" + std::to_string(j + 1));
        row.push_back(static_cast<double>(summary.per_step_first_failure[j]));
    }
    table.rows.push_back(std::move(row));
    return table;
}

}  // namespace ghzladder
