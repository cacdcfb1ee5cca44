#include "ghzladder/rng.hpp"

#include <cmath>

namespace ghzladder {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
// Domain separator so that child-key derivation can never alias the
// in-stream counter sequence of the parent.
constexpr std::uint64_t kChildSalt = 0xD1B54A32D192ED03ULL;
}  // namespace

std::uint64_t mix64(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xBF58476D1CE4E5B9ULL;
    x ^= x >> 27;
    x *= 0x94D049BB133111EBULL;
    x ^= x >> 31;
    return x;
}

std::uint64_t derive_key(std::uint64_t key, std::uint64_t index) {
    return mix64((key ^ kChildSalt) + kGolden * (index + 1));
}

std::uint64_t SplitStream::next_u64() {
    state_ += kGolden;
    return mix64(state_);
}

double SplitStream::next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

void NeumaierSum::add(double x) {
    double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x)) {
        comp_ += (sum_ - t) + x;
    } else {
        comp_ += (x - t) + sum_;
    }
    sum_ = t;
}

}  // namespace ghzladder
