#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ghzladder/constrained.hpp"
#include "ghzladder/core.hpp"
#include "ghzladder/estimator.hpp"

namespace ghzladder {

inline constexpr char kVersion[] = "0.1.0";

/// A Monte Carlo campaign: one plan, a grid of true angles, and a trial
/// count per angle.  `constants` feeds the reference bounds reported next
/// to the empirical numbers; `ramp_x` names the continuous ramp offset the
/// plan was rounded from, which unlocks the closed-form bound column.
/// `noiseless` replaces sampled frequencies by exact expectations.
struct CampaignSpec {
    SchedulePlan plan;
    std::vector<Angle> theta_values;
    std::int64_t trials = 1;
    std::uint64_t seed = 0;
    Backend backend = Backend::collective;
    std::optional<LossModel> loss;
    BoundConstants constants = BoundConstants::calibrated_numeric();
    std::optional<double> ramp_x;
    bool noiseless = false;
};

/// Campaign outcome.  `per_step_first_failure[j]` counts runs whose first
/// ground-truth window violation happened at step j+1; runs with no
/// violation are not counted anywhere, so the histogram sums to at most
/// trials * |grid|.  The reference bounds are NaN when the plan shape has
/// no closed form (capped, lossy, or non-pure ladders).
struct CampaignSummary {
    double empirical_mse = 0.0;
    double empirical_rmse = 0.0;
    std::vector<std::int64_t> per_step_first_failure;
    double bound_raw = 0.0;
    double bound_closed = 0.0;
    std::int64_t n_total = 0;
};

/// 24 uniform angles plus 8 adversarial ones placed just off the top-step
/// period boundaries k * 2pi / 2^k_steps, where the folding chain has the
/// least margin.
std::vector<Angle> default_angle_grid(int k_steps);

/// Run the campaign on `workers` threads (0 picks the hardware count).
/// Trials are split into fixed-size chunks accumulated independently and
/// merged in a fixed order, so the result is identical for every worker
/// count, not merely close.
CampaignSummary run_campaign(const CampaignSpec& spec, int workers = 0);

enum class Figure { fig5, fig6, fig7, fig8, fig9, fig10 };

Figure figure_from_string(const std::string& s);
std::string to_string(Figure figure);

/// Optional overrides for the per-figure defaults; leave a field unset to
/// get the published configuration.  `x_k` is the top-step offset except
/// for fig7, where it is the next-to-last-step offset of the size-limited
/// schedule.
struct FigureParams {
    std::optional<int> k;
    std::optional<double> x_k;
    std::optional<double> eta;
    std::optional<int> b_max;
    std::optional<double> n_lo;
    std::optional<double> n_hi;
    std::optional<int> points;
};

/// Columnar figure data plus the `# key=value` metadata that reproduces it.
struct DataTable {
    std::vector<std::pair<std::string, std::string>> metadata;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

DataTable figure_table(Figure figure, const FigureParams& params);

/// Lossless CSV: metadata as `# key=value` lines, then a header line, then
/// one comma-separated row per entry (NaN cells print as nan).
void write_csv(const DataTable& table, std::ostream& out);
void write_json(const DataTable& table, std::ostream& out);

/// figure_table composed with write_csv, the one-call figure exporter.
void emit_figure_data(Figure figure, const FigureParams& params, std::ostream& out);

/// Campaign summary in the same tabular conventions as the figure data.
DataTable summary_table(const CampaignSpec& spec, const CampaignSummary& summary);

}  // namespace ghzladder
