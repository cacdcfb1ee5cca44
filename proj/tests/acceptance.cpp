// Acceptance suite: one check per shipped claim, one PASS/FAIL line each.
// Runs the real code paths end to end (no mocks) and exits nonzero if any
// check fails, so it can gate releases from CI.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "ghzladder/baseb.hpp"
#include "ghzladder/constrained.hpp"
#include "ghzladder/core.hpp"
#include "ghzladder/errorprob.hpp"
#include "ghzladder/estimator.hpp"
#include "ghzladder/harness.hpp"
#include "ghzladder/measurement.hpp"
#include "ghzladder/planner.hpp"
#include "ghzladder/rng.hpp"

namespace {

using namespace ghzladder;
using Clock = std::chrono::steady_clock;

int g_failures = 0;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

void report(int id, bool ok, const char* text) {
    std::printf("%s %2d  %s\n", ok ? "PASS" : "FAIL", id, text);
    std::fflush(stdout);
    if (!ok) {
        ++g_failures;
    }
}

void check_calibration() {
    const auto t0 = Clock::now();
    const CalibrationResult r = calibrate(80, 100);
    bool dominated = true;
    double tightest = 1e300;
    for (int nu = 2; nu <= 80; ++nu) {
        const double envelope = 0.5949 * std::pow(1.6640, -static_cast<double>(nu));
        const double worst = r.worst_probs[static_cast<std::size_t>(nu - 1)];
        dominated = dominated && worst <= envelope;
        tightest = std::min(tightest, envelope / worst);
    }
    const double elapsed = seconds_since(t0);
    const bool ok = dominated && r.fitted.c_const >= 1.60 && elapsed < 60.0;
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "calibration: worst failures under 0.5949*1.6640^-nu on [2,80] "
                  "(tightest envelope/worst = %.3f), fitted C = %.4f >= 1.60, %.1f s < 60 s",
                  tightest, r.fitted.c_const, elapsed);
    report(1, ok, buf);
}

void check_half_width() {
    const double eps_star = std::sqrt(6.0) / 8.0;
    const int grid = 200001;
    double lo = 0.28;
    double hi = 0.33;
    const bool bracketed =
        verify_epsilon(lo, kPi / 3.0, grid) && !verify_epsilon(hi, kPi / 3.0, grid);
    for (int it = 0; it < 40; ++it) {
        const double mid = 0.5 * (lo + hi);
        (verify_epsilon(mid, kPi / 3.0, grid) ? lo : hi) = mid;
    }
    const double found = 0.5 * (lo + hi);
    const double c_base = hoeffding_bound(50, eps_star) / hoeffding_bound(51, eps_star);
    const bool ok = bracketed && std::fabs(found - eps_star) <= 1e-6 &&
                    std::fabs(c_base - 1.206) <= 5e-4;
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "maximal half-width by bisection = %.8f vs sqrt(6)/8 = %.8f "
                  "(|diff| = %.2e <= 1e-6); concentration base %.4f matches 1.206",
                  found, eps_star, std::fabs(found - eps_star), c_base);
    report(2, ok, buf);
}

void check_prefactor_minimum() {
    const BoundConstants c = BoundConstants::calibrated_numeric();
    const PrefactorOptimum best = optimize_prefactor(c);
    const double target = std::pow(24.26 * kPi, 2.0);
    const double qfi_target = std::pow(3.17 * kPi, 2.0);
    const double qfi_floor = qfi_ratio_lower_bound(static_cast<double>(best.x_k), c);
    const bool ok = best.x_k == 11 && std::fabs(best.value / target - 1.0) <= 0.005 &&
                    std::fabs(qfi_floor / qfi_target - 1.0) <= 0.005;
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "prefactor minimum at x_K = %d, value %.1f within 0.5%% of "
                  "(24.26 pi)^2 = %.1f; information floor %.2f within 0.5%% of "
                  "(3.17 pi)^2 = %.2f",
                  best.x_k, best.value, target, qfi_floor, qfi_target);
    report(3, ok, buf);
}

void check_upgrade_point() {
    const BoundConstants c = BoundConstants::calibrated_numeric();
    const UpgradePoint up = upgrade_point(c);
    bool ok = std::fabs(up.n_units - 22.9) <= 0.1 && std::fabs(up.x_k - 18.3) <= 0.1 &&
              std::fabs(up.x_k1 - 6.87) <= 0.05;
    // Cross-check the closed form against the numeric crossing at each depth.
    double worst_gap = 0.0;
    for (int k : {10, 15, 20}) {
        const double unit = std::ldexp(1.0, k + 1);
        auto deeper_wins = [&](double n) {
            const double at_k = mse_bound_vs_n(n, k, c);
            try {
                return mse_bound_vs_n(n, k + 1, c) < at_k;
            } catch (const infeasible_error&) {
                return false;
            }
        };
        double lo = 10.0 * unit;
        double hi = 60.0 * unit;
        for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (lo + hi);
            (deeper_wins(mid) ? hi : lo) = mid;
        }
        const double crossing = 0.5 * (lo + hi) / unit;
        worst_gap = std::max(worst_gap, std::fabs(crossing - up.n_units));
        ok = ok && std::fabs(crossing - 22.9) <= 0.1;
    }
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "depth upgrade at N/2^(K+1) = %.3f (= 22.9 +- 0.1; numeric crossings "
                  "for K in {10,15,20} agree to %.1e), x_K = %.3f (18.3 +- 0.1), "
                  "x_{K+1} = %.3f (6.87 +- 0.05)",
                  up.n_units, worst_gap, up.x_k, up.x_k1);
    report(4, ok, buf);
}

void check_limited_plan() {
    const BoundConstants c = BoundConstants::calibrated_numeric();
    const HybridPlanParams params{10, 30.0, c, {}, {}};
    const double n = static_cast<double>(total_probes(hybrid_plan(params)));
    const double bound = hybrid_mse_bound(params);
    const double same_n = mse_bound_vs_n(n, 10, c);
    const bool ok = std::fabs(n / 1.5e5 - 1.0) <= 0.03 &&
                    std::fabs(bound / 1.73e-8 - 1.0) <= 0.03 &&
                    std::fabs(same_n / 4.18e-6 - 1.0) <= 0.03;
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "size-limited K = 10, x_{K-1} = 30: N = %.0f (1.5e5 +- 3%%), bound = "
                  "%.4e (1.73e-8 +- 3%%), unrestricted same-N bound = %.4e (4.18e-6 +- 3%%)",
                  n, bound, same_n);
    report(5, ok, buf);
}

void check_loss_reshaping() {
    const DataTable states = figure_table(Figure::fig8, FigureParams{});
    const DataTable probes = figure_table(Figure::fig9, FigureParams{});
    const std::size_t sc = states.columns.size() - 1;
    const std::size_t pc = probes.columns.size() - 1;
    bool states_ok = states.rows.size() == 10;
    for (std::size_t j = 0; states_ok && j + 1 < states.rows.size(); ++j) {
        states_ok = states.rows[j][sc] < 0.0;
    }
    states_ok = states_ok && states.rows.back()[sc] > 0.0;
    std::size_t deepest = 0;
    for (std::size_t j = 1; j < probes.rows.size(); ++j) {
        if (probes.rows[j][pc] < probes.rows[deepest][pc]) {
            deepest = j;
        }
    }
    const bool ok = states_ok && deepest == 7;
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "loss reshaping at eta = 0.998, K = 10: extra states only at j = 10 "
                  "(%s), largest probe withdrawal at j = %d (want 8)",
                  states_ok ? "yes" : "no", static_cast<int>(deepest) + 1);
    report(6, ok, buf);
}

void check_loss_information() {
    const double cut = optimal_cut(LossModel{std::exp(-0.1)});
    double sup = 0.0;
    for (int i = 1; i <= 9999; ++i) {
        const double eta = static_cast<double>(i) / 10000.0;
        sup = std::max(sup, std::sqrt(kappa_ratio(LossModel{eta})));
    }
    const double root_e = std::sqrt(std::exp(1.0));
    const bool ok = std::fabs(cut - 10.0) <= 1e-12 && std::fabs(sup - root_e) <= 1e-3;
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "optimal bunch size for eta = e^(-1/10) is %.15g (|diff from 10| = "
                  "%.1e <= 1e-12); sup sqrt(kappa) = %.5f within 1e-3 of sqrt(e) = %.5f",
                  cut, std::fabs(cut - 10.0), sup, root_e);
    report(7, ok, buf);
}

std::int64_t pair_weighted_sum(const std::vector<std::int64_t>& delta) {
    std::int64_t n = 0;
    for (std::size_t j = 0; j < delta.size(); ++j) {
        n += 2 * delta[j] * (std::int64_t{1} << j);
    }
    return n;
}

void check_redistribution_oracle() {
    const auto t0 = Clock::now();
    // Self-consistent constants keep the per-step weights exactly geometric,
    // the regime where the binary placement is provably optimal.
    const BoundConstants c = BoundConstants::from_base2(0.5949, 1.6640, std::sqrt(6.0) / 8.0);
    bool exhaustive_ok = true;
    long long alternatives = 0;
    for (int k = 1; k <= 4; ++k) {
        std::vector<double> base;
        for (int j = 1; j <= k; ++j) {
            base.push_back(c.gamma * static_cast<double>(k - j) + 11.0 - 0.5);
        }
        const std::int64_t top = 2 * (std::int64_t{1} << k);
        for (std::int64_t dn = 0; dn <= top; dn += 2) {
            std::vector<double> counts = base;
            const Redistribution r = redistribute(dn, k);
            for (std::size_t j = 0; j < counts.size(); ++j) {
                counts[j] += static_cast<double>(r.delta_nu[j]);
            }
            const double best = mse_bound_raw_counts(counts, c);
            int ties = 0;
            std::vector<std::int64_t> delta(static_cast<std::size_t>(k), -8);
            while (true) {
                if (pair_weighted_sum(delta) == dn) {
                    std::vector<double> cand = base;
                    for (int j = 0; j < k; ++j) {
                        cand[static_cast<std::size_t>(j)] +=
                            static_cast<double>(delta[static_cast<std::size_t>(j)]);
                    }
                    const double bound = mse_bound_raw_counts(cand, c);
                    ++alternatives;
                    exhaustive_ok = exhaustive_ok && bound >= best * (1.0 - 1e-12);
                    if (bound <= best * (1.0 + 1e-9)) {
                        ++ties;
                    }
                }
                std::size_t pos = 0;
                while (pos < delta.size() && delta[pos] == 8) {
                    delta[pos] = -8;
                    ++pos;
                }
                if (pos == delta.size()) {
                    break;
                }
                ++delta[pos];
            }
            exhaustive_ok = exhaustive_ok && ties == 1;
        }
    }

    // The four local rewrites must strictly lower the bound whenever their
    // guard holds; force the guard so every instance exercises the rewrite.
    const std::size_t kk = 8;
    std::vector<double> base8;
    for (std::size_t j = 1; j <= kk; ++j) {
        base8.push_back(c.gamma * static_cast<double>(kk - j) + 11.0 - 0.5);
    }
    auto bound_for = [&](const std::vector<std::int64_t>& d) {
        std::vector<double> counts = base8;
        for (std::size_t l = 0; l < kk; ++l) {
            counts[l] += static_cast<double>(d[l]);
        }
        return mse_bound_raw_counts(counts, c);
    };
    SplitStream stream(4202026u);
    auto rand_entry = [&](std::int64_t lo, std::int64_t hi) {
        return lo + static_cast<std::int64_t>(stream.next_u64() %
                                              static_cast<std::uint64_t>(hi - lo + 1));
    };
    bool moves_ok = true;
    int rewrites = 0;
    for (int move = 0; move < 4 && moves_ok; ++move) {
        for (int instance = 0; instance < 1000 && moves_ok; ++instance) {
            std::vector<std::int64_t> delta(kk);
            for (auto& d : delta) {
                d = rand_entry(-3, 3);
            }
            const std::size_t j = static_cast<std::size_t>(rand_entry(0, kk - 2));
            switch (move) {
                case 0:
                    delta[j] = delta[j + 1] + 2 + rand_entry(0, 2);
                    break;
                case 1:
                    delta[j + 1] = delta[j] + 2 + rand_entry(0, 2);
                    break;
                case 2: {
                    const std::size_t end =
                        j + 1 + static_cast<std::size_t>(
                                    rand_entry(0, static_cast<std::int64_t>(kk - j) - 2));
                    delta[j] = 2;
                    for (std::size_t l = j + 1; l < end; ++l) {
                        delta[l] = 1;
                    }
                    delta[end] = 0;
                    break;
                }
                default: {
                    const std::size_t end =
                        j + 1 + static_cast<std::size_t>(
                                    rand_entry(0, static_cast<std::int64_t>(kk - j) - 2));
                    delta[j] = -1;
                    for (std::size_t l = j + 1; l < end; ++l) {
                        delta[l] = 0;
                    }
                    delta[end] = 1;
                    break;
                }
            }
            std::vector<std::int64_t> work = delta;
            bool applied = false;
            switch (move) {
                case 0: applied = move_fuse(work, j); break;
                case 1: applied = move_split(work, j); break;
                case 2: applied = move_carry(work, j); break;
                default: applied = move_borrow(work, j); break;
            }
            moves_ok = applied && pair_weighted_sum(work) == pair_weighted_sum(delta) &&
                       bound_for(work) < bound_for(delta);
            rewrites += applied ? 1 : 0;
        }
    }
    const double elapsed = seconds_since(t0);
    const bool ok = exhaustive_ok && moves_ok && elapsed < 120.0;
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "binary placement beats all %lld bounded alternatives for K <= 4, "
                  "dN in [0, 2*2^K]; %d forced rewrites all strictly improve the bound; "
                  "%.1f s < 120 s",
                  alternatives, rewrites, elapsed);
    report(8, ok, buf);
}

void check_scaling_campaigns() {
    const auto t0 = Clock::now();
    const BoundConstants c = BoundConstants::calibrated_numeric();
    const double ceiling = std::pow(24.26 * kPi, 2.0);
    double scaled_k4 = 0.0;
    double scaled_k8 = 0.0;
    bool ok = true;
    std::string detail;
    for (int k : {4, 6, 8}) {
        CampaignSpec spec;
        spec.plan = ramp(RampParams{k, 11.0, c});
        spec.theta_values = default_angle_grid(k);
        spec.trials = 100000;
        spec.seed = 0x9a2026u + static_cast<std::uint64_t>(k);
        spec.constants = c;
        spec.ramp_x = 11.0;
        const CampaignSummary s = run_campaign(spec);
        const double n = static_cast<double>(s.n_total);
        const double scaled = s.empirical_mse * n * n;
        if (k == 4) {
            scaled_k4 = scaled;
        }
        if (k == 8) {
            scaled_k8 = scaled;
        }
        ok = ok && scaled <= ceiling && s.empirical_mse <= s.bound_raw;
        char piece[64];
        std::snprintf(piece, sizeof piece, "K=%d: MSE*N^2 = %.0f; ", k, scaled);
        detail += piece;
    }
    const double elapsed = seconds_since(t0);
    ok = ok && scaled_k8 <= 1.5 * scaled_k4 && elapsed < 600.0;
    char buf[320];
    std::snprintf(buf, sizeof buf,
                  "campaigns of 1e5 trials x 32 angles: %sall <= (24.26 pi)^2 = %.0f and "
                  "<= raw bound; K8/K4 = %.2f <= 1.5; %.0f s < 600 s",
                  detail.c_str(), ceiling, scaled_k8 / scaled_k4, elapsed);
    report(9, ok, buf);
}

void check_parity_equivalence() {
    double max_dev = 0.0;
    for (std::int64_t m : {1, 2, 4, 8, 13, 32}) {
        for (int i = 0; i < 24; ++i) {
            const Angle th(kTwoPi * i / 24.0 + 0.05);
            max_dev = std::max(max_dev,
                               std::fabs(even_count_probability(th, m, Quadrature::type0) -
                                         type0_probability(th, m)));
            max_dev = std::max(max_dev,
                               std::fabs(even_count_probability(th, m, Quadrature::typeplus) -
                                         typeplus_probability(th, m)));
        }
    }

    const std::int64_t shots = 100000;
    const double critical = 10.8276;  // 1 - 1e-3 quantile of chi-square with 1 dof
    double max_stat = 0.0;
    bool chi_ok = true;
    int cell = 0;
    for (std::int64_t m : {1, 2, 4, 8, 16, 32}) {
        for (double theta : {0.37, 0.91, 1.53, 2.11}) {
            const StepSpec step{m, shots, 1};
            const auto a = sample_batch(Angle(theta), step, 7000 + cell).a0;
            const auto b = sample_batch_parity(Angle(theta), step, 8000 + cell).a0;
            ++cell;
            const double expect_hit = 0.5 * static_cast<double>(a + b);
            const double expect_miss = static_cast<double>(shots) - expect_hit;
            const double da = static_cast<double>(a) - expect_hit;
            const double db = static_cast<double>(b) - expect_hit;
            const double stat = (da * da + db * db) * (1.0 / expect_hit + 1.0 / expect_miss);
            max_stat = std::max(max_stat, stat);
            chi_ok = chi_ok && stat <= critical;
        }
    }
    const bool ok = max_dev <= 1e-12 && chi_ok;
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "per-probe parity law equals collective law to %.1e (<= 1e-12) on 288 "
                  "grid points; backend two-sample chi-square max %.2f over 24 cells at "
                  "1e5 shots stays under %.2f (alpha = 1e-3)",
                  max_dev, max_stat, critical);
    report(10, ok, buf);
}

void check_base_study() {
    const std::vector<BaseStudyRow> rows = base_study(10);
    std::size_t arg = 0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].prefactor < rows[arg].prefactor) {
            arg = i;
        }
    }
    const double target = std::pow(62.7 * kPi, 2.0);
    const bool ok =
        rows[arg].base == 3 && std::fabs(rows[arg].prefactor / target - 1.0) <= 0.02;
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "base scan over [2,10]: minimum at b = %d with prefactor %.1f within "
                  "2%% of (62.7 pi)^2 = %.1f",
                  rows[arg].base, rows[arg].prefactor, target);
    report(11, ok, buf);
}

void check_sql_crossing() {
    const DataTable table = figure_table(Figure::fig6, FigureParams{});
    double crossing = std::nan("");
    for (const auto& row : table.rows) {
        if (std::isfinite(row[3]) && row[3] < row[1]) {
            crossing = row[0];
            break;
        }
    }
    const bool ok = std::isfinite(crossing) && crossing >= 4.8e3 && crossing <= 7.2e3;
    char buf[192];
    std::snprintf(buf, sizeof buf,
                  "bound first beats the shot-noise line 1/N at N = %.0f, inside "
                  "6e3 +- 20%% = [4800, 7200]",
                  crossing);
    report(12, ok, buf);
}

}  // namespace

int main() {
    std::printf("acceptance suite, library version %s\n", kVersion);
    check_calibration();
    check_half_width();
    check_prefactor_minimum();
    check_upgrade_point();
    check_limited_plan();
    check_loss_reshaping();
    check_loss_information();
    check_redistribution_oracle();
    check_scaling_campaigns();
    check_parity_equivalence();
    check_base_study();
    check_sql_crossing();
    if (g_failures == 0) {
        std::printf("all 12 checks passed\n");
        return 0;
    }
    std::printf("%d of 12 checks failed\n", g_failures);
    return 1;
}
