#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ghzladder {

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Thrown when a requested configuration is mathematically out of reach
/// (ramp would need a negative shot count, bound exponent is nonpositive,
/// a probe budget cannot be redistributed, ...).  The CLI maps this to
/// exit code 2; genuine precondition violations stay std::invalid_argument.
struct infeasible_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A phase folded into the canonical window [0, 2*pi).
///
/// Keeping the representative in one window at construction time means
/// downstream code can compare raw doubles without re-reducing, and the
/// circle metric below stays branch-free.
class Angle {
  public:
    Angle() = default;
    explicit Angle(double radians);

    double value() const { return value_; }

    friend bool operator==(const Angle& a, const Angle& b) { return a.value_ == b.value_; }

  private:
    double value_ = 0.0;
};

/// Reduce an arbitrary finite phase into [0, 2*pi).  Rejects NaN/inf.
Angle canonicalize(double radians);

/// Geodesic distance on the circle, always in [0, pi].
double circle_distance(Angle a, Angle b);

/// Round to nearest integer with ties away from zero resolved upward
/// (0.5 -> 1, 1.5 -> 2, -0.5 -> 0).  Shot counts derived from real-valued
/// ramps must round the same way everywhere, so this is the single home.
std::int64_t round_half_up(double x);

/// How the final (largest-entanglement) step of a plan is executed.
enum class LastStepMode {
    ladder,        // same two-quadrature measurement as every other step
    adaptive_mle,  // phase-shifted single-quadrature shots + restricted MLE
};

std::string to_string(LastStepMode mode);
LastStepMode last_step_mode_from_string(const std::string& s);

/// One rung of the ladder: entangled-block size `m`, plus per-quadrature
/// shot counts (nu0 cosine-type, nuplus sine-type).
struct StepSpec {
    std::int64_t m = 1;
    std::int64_t nu0 = 0;
    std::int64_t nuplus = 0;
};

/// A complete measurement schedule.
///
/// `base` is the geometric growth factor of the block sizes, `shrink` the
/// per-step interval shrink divisor (the selection geometry only closes
/// when shrink == base + 1, which validate() enforces).  `cap` limits the
/// largest block size; capped plans use ceil(cap / base^(K-j)) sizes
/// instead of pure powers.
struct SchedulePlan {
    int base = 2;
    int shrink = 3;
    std::optional<std::int64_t> cap;
    LastStepMode last_step_mode = LastStepMode::ladder;
    std::vector<StepSpec> steps;

    /// Throws std::invalid_argument when the structural invariants fail.
    void validate() const;

    std::size_t k_steps() const { return steps.size(); }
};

/// Total probe budget 2 * sum_j nu_j * m_j, counting both quadratures.
std::int64_t total_probes(const SchedulePlan& plan);

/// Serialize to the on-disk JSON schema.  Field order is irrelevant on
/// input and unknown fields are an error, so plans cannot silently carry
/// stale keys across versions.
std::string plan_to_json(const SchedulePlan& plan);
SchedulePlan plan_from_json(const std::string& text);

/// The (A, C) envelope constants of the per-step failure bound
/// A * C^-nu, the ramp slope gamma tied to them, and the frequency
/// deviation epsilon that the confidence geometry tolerates.
struct BoundConstants {
    double a_const = 0.0;
    double c_const = 1.0;
    double gamma = 0.0;
    double epsilon = 0.0;

    /// Analytic Hoeffding-based set for base 2: A = 4, C = exp(3/16),
    /// epsilon = sqrt(6)/8, gamma derived from C.
    static BoundConstants analytic();

    /// Numerically calibrated set, as conventionally quoted rounded to
    /// four digits: A = 0.5949, C = 1.6640, gamma = 4.0835.
    static BoundConstants calibrated_numeric();

    /// Build a base-2 set from (A, C) with gamma = 3 / log2(C).
    static BoundConstants from_base2(double a, double c, double eps);
};

std::string constants_to_json(const BoundConstants& c);
BoundConstants constants_from_json(const std::string& text);

}  // namespace ghzladder
