#pragma once

#include <cstdint>

namespace ghzladder {

/// 64-bit finalizer with full avalanche (the splitmix64 output function).
std::uint64_t mix64(std::uint64_t x);

/// Derive a child key from (key, index).  Used to build the deterministic
/// stream tree  campaign -> angle row -> trial -> step -> shot  so that
/// any cell of a campaign can be replayed in isolation and results do not
/// depend on scheduling or worker count.
std::uint64_t derive_key(std::uint64_t key, std::uint64_t index);

/// Counter-based uniform generator: output n is a pure function of
/// (key, n), so streams can be split without sharing state.
class SplitStream {
  public:
    explicit SplitStream(std::uint64_t key) : state_(key) {}

    SplitStream child(std::uint64_t index) const { return SplitStream(derive_key(state_, index)); }

    std::uint64_t next_u64();

    /// Uniform double in [0, 1) with 53 random bits.
    double next_unit();

    bool bernoulli(double p) { return next_unit() < p; }

  private:
    std::uint64_t state_;
};

/// Neumaier compensated accumulator.  Campaign reductions must give the
/// same answer for any worker count, so every sum that crosses a thread
/// boundary is accumulated through one of these in a fixed order.
class NeumaierSum {
  public:
    void add(double x);
    double value() const { return sum_ + comp_; }

  private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

}  // namespace ghzladder
