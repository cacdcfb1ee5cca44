#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "ghzladder/constrained.hpp"
#include "ghzladder/core.hpp"
#include "ghzladder/harness.hpp"
#include "ghzladder/planner.hpp"

using namespace ghzladder;

namespace {

CampaignSpec small_campaign() {
    CampaignSpec spec;
    spec.plan = ramp(RampParams{3, 11.0, BoundConstants::calibrated_numeric()});
    spec.theta_values = default_angle_grid(3);
    spec.trials = 600;
    spec.seed = 42;
    spec.ramp_x = 11.0;
    return spec;
}

bool summaries_equal(const CampaignSummary& a, const CampaignSummary& b) {
    return a.empirical_mse == b.empirical_mse && a.empirical_rmse == b.empirical_rmse &&
           a.per_step_first_failure == b.per_step_first_failure &&
           a.n_total == b.n_total;
}

double meta_value(const DataTable& table, const std::string& key) {
    for (const auto& [k, v] : table.metadata) {
        if (k == key) {
            return std::strtod(v.c_str(), nullptr);
        }
    }
    FAIL("missing metadata key ", key);
    return 0.0;
}

}  // namespace

TEST_CASE("default grid mixes uniform and boundary-adjacent angles") {
    const std::vector<Angle> grid = default_angle_grid(4);
    REQUIRE(grid.size() == 32);
    for (int i = 0; i < 24; ++i) {
        CHECK(grid[static_cast<std::size_t>(i)].value() ==
              doctest::Approx((i + 0.5) * kTwoPi / 24.0).epsilon(1e-15));
    }
    const double period = kTwoPi / 16.0;
    for (int i = 24; i < 32; ++i) {
        const double v = grid[static_cast<std::size_t>(i)].value();
        const double off = std::remainder(v, period);
        CHECK(std::abs(std::abs(off) - period / 32.0) < 1e-12);
    }
    CHECK_THROWS_AS(default_angle_grid(0), std::invalid_argument);
    CHECK_THROWS_AS(default_angle_grid(61), std::invalid_argument);
}

TEST_CASE("campaigns are deterministic and independent of worker count") {
    const CampaignSpec spec = small_campaign();
    const CampaignSummary one = run_campaign(spec, 1);
    const CampaignSummary again = run_campaign(spec, 1);
    const CampaignSummary four = run_campaign(spec, 4);
    const CampaignSummary three = run_campaign(spec, 3);
    CHECK(summaries_equal(one, again));
    CHECK(summaries_equal(one, four));
    CHECK(summaries_equal(one, three));
    CHECK(one.n_total == total_probes(spec.plan));

    CampaignSpec reseeded = spec;
    reseeded.seed = 43;
    CHECK(run_campaign(reseeded, 1).empirical_mse != one.empirical_mse);
}

TEST_CASE("empirical error stays under the reference bounds") {
    CampaignSpec spec = small_campaign();
    spec.trials = 3000;
    const CampaignSummary s = run_campaign(spec);
    CHECK(s.bound_raw ==
          doctest::Approx(mse_bound_raw(spec.plan, spec.constants)).epsilon(1e-15));
    CHECK(s.bound_closed ==
          doctest::Approx(mse_bound_ramp(RampParams{3, 11.0, spec.constants})).epsilon(1e-15));
    CHECK(s.empirical_mse <= s.bound_raw);
    CHECK(s.bound_raw <= s.bound_closed);
    CHECK(s.empirical_rmse == doctest::Approx(std::sqrt(s.empirical_mse)).epsilon(1e-15));
    CHECK(s.empirical_mse <= kPi * kPi);
}

TEST_CASE("noiseless campaigns land inside the final window") {
    CampaignSpec spec = small_campaign();
    spec.trials = 1;
    spec.noiseless = true;
    const CampaignSummary s = run_campaign(spec);
    const double window = kPi / (3.0 * 4.0);
    CHECK(s.empirical_mse <= window * window);
    CHECK(s.empirical_mse <= 1e-18);
    for (std::int64_t count : s.per_step_first_failure) {
        CHECK(count == 0);
    }
}

TEST_CASE("first-failure histogram counts each run at most once") {
    CampaignSpec spec = small_campaign();
    spec.plan = SchedulePlan{};
    spec.plan.steps = {StepSpec{1, 2, 2}, StepSpec{2, 2, 2}, StepSpec{4, 2, 2}};
    spec.ramp_x.reset();
    spec.trials = 500;
    const CampaignSummary s = run_campaign(spec);
    REQUIRE(s.per_step_first_failure.size() == 3);
    std::int64_t total = 0;
    for (std::int64_t count : s.per_step_first_failure) {
        CHECK(count >= 0);
        total += count;
    }
    CHECK(total > 0);
    CHECK(total <= spec.trials * static_cast<std::int64_t>(spec.theta_values.size()));

    CampaignSpec generous = small_campaign();
    generous.plan = ramp(RampParams{3, 40.0, BoundConstants::calibrated_numeric()});
    generous.ramp_x = 40.0;
    generous.trials = 200;
    const CampaignSummary g = run_campaign(generous);
    for (std::int64_t count : g.per_step_first_failure) {
        CHECK(count == 0);
    }
}

TEST_CASE("reference bounds are withheld for plans without a closed form") {
    CampaignSpec spec = small_campaign();
    spec.trials = 2;

    SUBCASE("hand-tuned counts have a raw bound but no ramp pedigree") {
        spec.plan.steps[0].nu0 = 7;
        spec.plan.steps[0].nuplus = 7;
        spec.ramp_x.reset();
        const CampaignSummary s = run_campaign(spec);
        CHECK(std::isfinite(s.bound_raw));
        CHECK(std::isnan(s.bound_closed));
    }
    SUBCASE("lossy campaigns get no lossless bound") {
        spec.loss = LossModel{0.99};
        const CampaignSummary s = run_campaign(spec);
        CHECK(std::isnan(s.bound_raw));
        CHECK(std::isnan(s.bound_closed));
    }
    SUBCASE("adaptive-last-step plans are out of the raw bound's scope") {
        spec.plan = hybrid_plan(HybridPlanParams{4, 20.0, spec.constants, {}, {}});
        spec.theta_values = default_angle_grid(4);
        spec.ramp_x.reset();
        const CampaignSummary s = run_campaign(spec);
        CHECK(std::isnan(s.bound_raw));
    }
    SUBCASE("invalid campaign parameters are rejected") {
        spec.trials = 0;
        CHECK_THROWS_AS(run_campaign(spec), std::invalid_argument);
        spec.trials = 1;
        spec.theta_values.clear();
        CHECK_THROWS_AS(run_campaign(spec), std::invalid_argument);
        spec.theta_values = default_angle_grid(3);
        spec.loss = LossModel{0.0};
        CHECK_THROWS_AS(run_campaign(spec), std::invalid_argument);
    }
}

TEST_CASE("parity campaigns track the same bound") {
    CampaignSpec spec = small_campaign();
    spec.backend = Backend::parity;
    spec.trials = 1200;
    const CampaignSummary s = run_campaign(spec);
    CHECK(s.empirical_mse <= s.bound_raw);
}

TEST_CASE("upgrade-comparison table crosses at the published budget") {
    const DataTable table = figure_table(Figure::fig5, FigureParams{});
    REQUIRE(table.columns ==
            std::vector<std::string>{"n", "bound_k", "bound_k1"});
    CHECK(meta_value(table, "k") == 15.0);
    double crossing = 0.0;
    for (std::size_t i = 1; i < table.rows.size(); ++i) {
        const auto& lo = table.rows[i - 1];
        const auto& hi = table.rows[i];
        if (std::isnan(lo[1]) || std::isnan(lo[2]) || std::isnan(hi[1]) || std::isnan(hi[2])) {
            continue;
        }
        const double d0 = lo[1] - lo[2];
        const double d1 = hi[1] - hi[2];
        if (d0 <= 0.0 && d1 > 0.0) {
            const double t = d0 / (d0 - d1);
            crossing = lo[0] * std::pow(hi[0] / lo[0], t);
            break;
        }
    }
    REQUIRE(crossing > 0.0);
    const double published = 22.9 * std::ldexp(1.0, 16);
    CHECK(std::abs(crossing - published) / published < 0.01);
}

TEST_CASE("scaling-comparison table beats the standard limit near the published budget") {
    const DataTable table = figure_table(Figure::fig6, FigureParams{});
    REQUIRE(table.columns ==
            std::vector<std::string>{"n", "sql", "hs", "mse_bound", "qfi_inv"});
    double first_below = 0.0;
    double prev_bound = 0.0;
    for (const std::vector<double>& row : table.rows) {
        const double n = row[0];
        CHECK(row[1] == doctest::Approx(1.0 / n).epsilon(1e-15));
        CHECK(row[2] == doctest::Approx(kPi * kPi / (n * n)).epsilon(1e-15));
        REQUIRE_FALSE(std::isnan(row[3]));
        REQUIRE_FALSE(std::isnan(row[4]));
        // The achievable bound never undercuts the quantum information floor,
        // and the envelope is monotone in the budget.
        CHECK(row[4] <= row[3]);
        CHECK(row[3] >= row[2]);
        if (prev_bound > 0.0) {
            CHECK(row[3] <= prev_bound * (1.0 + 1e-12));
        }
        prev_bound = row[3];
        if (first_below == 0.0 && row[3] < row[1]) {
            first_below = n;
        }
    }
    REQUIRE(first_below > 0.0);
    CHECK(first_below >= 4.8e3);
    CHECK(first_below <= 7.2e3);
}

TEST_CASE("size-limited comparison table reproduces the published pair of bounds") {
    const DataTable table = figure_table(Figure::fig7, FigureParams{});
    REQUIRE(table.rows.size() == 10);
    const SchedulePlan plan = hybrid_plan(HybridPlanParams{10, 30.0,
                                                           BoundConstants::calibrated_numeric(),
                                                           {},
                                                           {}});
    for (std::size_t j = 0; j < 10; ++j) {
        CHECK(table.rows[j][0] == static_cast<double>(j + 1));
        CHECK(table.rows[j][1] == static_cast<double>(plan.steps[j].m));
        CHECK(table.rows[j][2] == static_cast<double>(plan.steps[j].nu0));
    }
    CHECK(meta_value(table, "n") == 150402.0);
    CHECK(meta_value(table, "x_ideal_top") == doctest::Approx(69.4666808407).epsilon(1e-9));
    CHECK(meta_value(table, "bound_limited") ==
          doctest::Approx(1.7324057467e-8).epsilon(1e-6));
    CHECK(meta_value(table, "bound_ideal") ==
          doctest::Approx(4.1832836580e-6).epsilon(1e-6));
    // The continuous comparison ramp spends exactly the same budget.
    double ideal_total = 0.0;
    for (const std::vector<double>& row : table.rows) {
        ideal_total += row[5];
    }
    CHECK(ideal_total == doctest::Approx(150402.0).epsilon(1e-9));
}

TEST_CASE("loss reallocation tables carry the published signatures") {
    const DataTable states = figure_table(Figure::fig8, FigureParams{});
    const DataTable probes = figure_table(Figure::fig9, FigureParams{});
    REQUIRE(states.rows.size() == 10);
    REQUIRE(probes.rows.size() == 10);
    CHECK(states.columns.back() == "delta_states");
    CHECK(probes.columns.back() == "delta_probes");

    for (std::size_t j = 0; j < 9; ++j) {
        CHECK(states.rows[j][3] < 0.0);
    }
    CHECK(states.rows[9][3] > 0.0);

    std::size_t deepest = 0;
    std::size_t steepest = 0;
    for (std::size_t j = 1; j < 9; ++j) {
        if (probes.rows[j][3] < probes.rows[deepest][3]) {
            deepest = j;
        }
        const double rel = probes.rows[j][3] / probes.rows[j][2];
        if (rel < probes.rows[steepest][3] / probes.rows[steepest][2]) {
            steepest = j;
        }
    }
    CHECK(deepest == 7);   // absolute withdrawal peaks at step 8
    CHECK(steepest == 5);  // relative withdrawal peaks at step 6

    for (std::size_t j = 0; j < 10; ++j) {
        CHECK(probes.rows[j][3] ==
              doctest::Approx(states.rows[j][3] * std::ldexp(1.0, static_cast<int>(j) + 1))
                  .epsilon(1e-12));
    }
    CHECK(meta_value(states, "n") == doctest::Approx(55633.923789).epsilon(1e-9));
    CHECK(meta_value(states, "x_ideal_top") ==
          doctest::Approx(23.1479730151).epsilon(1e-9));
}

TEST_CASE("base-comparison table bottoms out at base three") {
    const DataTable table = figure_table(Figure::fig10, FigureParams{});
    REQUIRE(table.rows.size() == 9);
    std::size_t best = 0;
    for (std::size_t i = 1; i < table.rows.size(); ++i) {
        if (table.rows[i][5] < table.rows[best][5]) {
            best = i;
        }
    }
    CHECK(table.rows[best][0] == 3.0);
}

TEST_CASE("figure ids round trip and bad inputs are rejected") {
    for (Figure f : {Figure::fig5, Figure::fig6, Figure::fig7, Figure::fig8, Figure::fig9,
                     Figure::fig10}) {
        CHECK(figure_from_string(to_string(f)) == f);
    }
    CHECK_THROWS_AS(figure_from_string("fig11"), std::invalid_argument);
    FigureParams bad;
    bad.points = 1;
    CHECK_THROWS_AS(figure_table(Figure::fig5, bad), std::invalid_argument);
    bad.points = 10;
    bad.n_lo = 100.0;
    bad.n_hi = 50.0;
    CHECK_THROWS_AS(figure_table(Figure::fig6, bad), std::invalid_argument);
}

TEST_CASE("csv output is lossless and carries its metadata") {
    const DataTable table = figure_table(Figure::fig10, FigureParams{});
    std::ostringstream out;
    write_csv(table, out);
    const std::string text = out.str();
    CHECK(text.rfind("# version=", 0) == 0);
    CHECK(text.find("# figure=fig10\n") != std::string::npos);
    CHECK(text.find("b,n,c,gamma,x_k_opt,prefactor\n") != std::string::npos);

    // The last row round-trips bit for bit through the decimal form.
    const std::size_t tail = text.rfind('\n', text.size() - 2);
    std::string last = text.substr(tail + 1);
    const std::vector<double>& expect = table.rows.back();
    const char* p = last.c_str();
    for (double want : expect) {
        char* end = nullptr;
        CHECK(std::strtod(p, &end) == want);
        p = (*end == ',') ? end + 1 : end;
    }

    DataTable with_nan;
    with_nan.columns = {"v"};
    with_nan.rows = {{std::nan("")}};
    std::ostringstream nan_out;
    write_csv(with_nan, nan_out);
    CHECK(nan_out.str().find("\nnan\n") != std::string::npos);
}

TEST_CASE("json output parses back with the same shape") {
    const DataTable table = figure_table(Figure::fig10, FigureParams{});
    std::ostringstream out;
    write_json(table, out);
    const nlohmann::json doc = nlohmann::json::parse(out.str());
    CHECK(doc.at("version").get<std::string>() == kVersion);
    CHECK(doc.at("metadata").at("figure").get<std::string>() == "fig10");
    REQUIRE(doc.at("columns").size() == 6);
    REQUIRE(doc.at("rows").size() == table.rows.size());
    CHECK(doc.at("rows")[0][0].get<double>() == 2.0);
}

TEST_CASE("campaign summaries export through the same table conventions") {
    CampaignSpec spec = small_campaign();
    spec.trials = 10;
    const CampaignSummary s = run_campaign(spec);
    const DataTable table = summary_table(spec, s);
    REQUIRE(table.rows.size() == 1);
    REQUIRE(table.columns.size() == 5 + 3);
    CHECK(table.columns[0] == "mse");
    CHECK(table.columns[5] == "fail_1");
    CHECK(table.rows[0][0] == s.empirical_mse);
    CHECK(table.rows[0][2] == static_cast<double>(s.n_total));
    CHECK(meta_value(table, "trials") == 10.0);
    CHECK(meta_value(table, "eta") == 1.0);
}
