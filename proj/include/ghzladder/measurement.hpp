#pragma once

#include <cstdint>
#include <vector>

#include "ghzladder/core.hpp"

namespace ghzladder {

/// Aggregated outcome of one ladder step: a0 of nu0 cosine-quadrature
/// shots produced outcome 0, aplus of nuplus sine-quadrature shots did.
struct MeasurementBatch {
    std::int64_t m = 1;
    std::int64_t nu0 = 0;
    std::int64_t a0 = 0;
    std::int64_t nuplus = 0;
    std::int64_t aplus = 0;
};

enum class Quadrature { type0, typeplus };

/// P(outcome 0) of a cosine-quadrature shot on an m-block: (1 + cos(m*theta))/2.
double type0_probability(Angle theta, std::int64_t m);

/// P(outcome 0) of a sine-quadrature shot on an m-block: (1 + sin(m*theta))/2.
double typeplus_probability(Angle theta, std::int64_t m);

/// Probability that the per-probe readout of an m-block yields an even
/// number of 1s, summed directly from the k-count law
/// p_k = 2^-m binom(m,k) (1 + (-1)^k q), q = cos or sin of m*theta.
/// Equals the corresponding collective outcome-0 probability.
double even_count_probability(Angle theta, std::int64_t m, Quadrature quad);

/// Collective backend: each shot is one Bernoulli draw of the block-level
/// outcome.  Shot i of the cosine quadrature uses stream child(i), shot i
/// of the sine quadrature uses child(nu0 + i), so sub-batches can be
/// replayed independently.
MeasurementBatch sample_batch(Angle theta, const StepSpec& step, std::uint64_t seed);

/// Parity backend: each shot resolves the m single-probe readouts through
/// their joint k-count law and records outcome 0 on even parity.  Shares
/// the shot-level stream layout of sample_batch, so at m = 1 the two
/// backends produce bit-identical batches.
MeasurementBatch sample_batch_parity(Angle theta, const StepSpec& step, std::uint64_t seed);

/// Loss-thinned sampling: a shot on an m-block survives with probability
/// eta^m (first draw of the shot stream), otherwise it consumes budget and
/// yields nothing.  Returned nu0/nuplus are the surviving counts.
MeasurementBatch sample_batch_lossy(Angle theta, const StepSpec& step, double eta,
                                    std::uint64_t seed, bool parity);

/// Two-quadrature inversion: atan2(2 f_plus - 1, 2 f_0 - 1) folded into
/// [0, 2*pi).  The all-center degenerate point maps to 0.  Requires at
/// least one shot in each quadrature.
Angle step_estimate(const MeasurementBatch& batch);

/// Phase-shifted cosine-quadrature shots for the adaptive final step.
/// Outcome i is Bernoulli with success probability
/// (1 + cos(m*(theta - shifts[i])))/2, drawn from stream child(i).
struct ShiftedBatch {
    std::int64_t m = 1;
    std::vector<double> shifts;
    std::vector<std::uint8_t> outcomes;
};

ShiftedBatch sample_shifted(Angle theta, std::int64_t m, const std::vector<double>& shifts,
                            std::uint64_t seed);

/// Loss-thinned variant; dropped shots are removed from the batch.
ShiftedBatch sample_shifted_lossy(Angle theta, std::int64_t m, const std::vector<double>& shifts,
                                  double eta, std::uint64_t seed);

/// Maximum-likelihood phase for a shifted batch, restricted to [lo, hi]
/// (a confidence interval from the preceding localization; may straddle
/// the 2*pi seam).  Golden-section ascent on the log-likelihood; the
/// interval is short enough that the restricted likelihood is unimodal.
Angle mle_shifted(const ShiftedBatch& batch, double lo, double hi);

}  // namespace ghzladder
