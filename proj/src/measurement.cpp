#include "ghzladder/measurement.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "ghzladder/rng.hpp"

namespace ghzladder {

namespace {

double block_phase_cos(Angle theta, std::int64_t m) {
    return std::cos(static_cast<double>(m) * theta.value());
}

double block_phase_sin(Angle theta, std::int64_t m) {
    return std::sin(static_cast<double>(m) * theta.value());
}

void check_step(const StepSpec& step) {
    if (step.m < 1) throw std::invalid_argument("block size must be >= 1");
    if (step.nu0 < 0 || step.nuplus < 0) {
        throw std::invalid_argument("shot counts must be nonnegative");
    }
}

/// Cumulative k-count law of one m-block readout.  q is cos(m theta) for
/// the cosine quadrature, sin(m theta) for the sine quadrature.
std::vector<double> count_cdf(std::int64_t m, double q) {
    const double lg_m = std::lgamma(static_cast<double>(m) + 1.0);
    const double ln2m = static_cast<double>(m) * std::log(2.0);
    std::vector<double> cdf(static_cast<std::size_t>(m) + 1);
    double run = 0.0;
    for (std::int64_t k = 0; k <= m; ++k) {
        double sign_term = (k % 2 == 0) ? 1.0 + q : 1.0 - q;
        double p = 0.0;
        if (sign_term > 0.0) {
            double lb = lg_m - std::lgamma(static_cast<double>(k) + 1.0) -
                        std::lgamma(static_cast<double>(m - k) + 1.0) - ln2m;
            p = std::exp(lb + std::log(sign_term));
        }
        run += p;
        cdf[static_cast<std::size_t>(k)] = run;
    }
    // run == 1 up to roundoff; rescale so inversion cannot fall off the end.
    for (double& c : cdf) c /= run;
    cdf.back() = 1.0;
    return cdf;
}

std::int64_t sample_count(const std::vector<double>& cdf, double u) {
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    if (it == cdf.end()) --it;
    return static_cast<std::int64_t>(it - cdf.begin());
}

}  // namespace

double type0_probability(Angle theta, std::int64_t m) {
    if (m < 1) throw std::invalid_argument("block size must be >= 1");
    return 0.5 * (1.0 + block_phase_cos(theta, m));
}

double typeplus_probability(Angle theta, std::int64_t m) {
    if (m < 1) throw std::invalid_argument("block size must be >= 1");
    return 0.5 * (1.0 + block_phase_sin(theta, m));
}

double even_count_probability(Angle theta, std::int64_t m, Quadrature quad) {
    if (m < 1) throw std::invalid_argument("block size must be >= 1");
    double q = quad == Quadrature::type0 ? block_phase_cos(theta, m) : block_phase_sin(theta, m);
    const double lg_m = std::lgamma(static_cast<double>(m) + 1.0);
    const double ln2m = static_cast<double>(m) * std::log(2.0);
    NeumaierSum even;
    for (std::int64_t k = 0; k <= m; k += 2) {
        double sign_term = 1.0 + q;
        if (sign_term <= 0.0) continue;
        double lb = lg_m - std::lgamma(static_cast<double>(k) + 1.0) -
                    std::lgamma(static_cast<double>(m - k) + 1.0) - ln2m;
        even.add(std::exp(lb + std::log(sign_term)));
    }
    return even.value();
}

MeasurementBatch sample_batch(Angle theta, const StepSpec& step, std::uint64_t seed) {
    check_step(step);
    const double p0 = type0_probability(theta, step.m);
    const double pp = typeplus_probability(theta, step.m);
    SplitStream root(seed);
    MeasurementBatch b;
    b.m = step.m;
    b.nu0 = step.nu0;
    b.nuplus = step.nuplus;
    for (std::int64_t i = 0; i < step.nu0; ++i) {
        if (root.child(static_cast<std::uint64_t>(i)).bernoulli(p0)) ++b.a0;
    }
    for (std::int64_t i = 0; i < step.nuplus; ++i) {
        if (root.child(static_cast<std::uint64_t>(step.nu0 + i)).bernoulli(pp)) ++b.aplus;
    }
    return b;
}

MeasurementBatch sample_batch_parity(Angle theta, const StepSpec& step, std::uint64_t seed) {
    check_step(step);
    const std::vector<double> cdf0 = count_cdf(step.m, block_phase_cos(theta, step.m));
    const std::vector<double> cdfp = count_cdf(step.m, block_phase_sin(theta, step.m));
    SplitStream root(seed);
    MeasurementBatch b;
    b.m = step.m;
    b.nu0 = step.nu0;
    b.nuplus = step.nuplus;
    for (std::int64_t i = 0; i < step.nu0; ++i) {
        SplitStream shot = root.child(static_cast<std::uint64_t>(i));
        if (sample_count(cdf0, shot.next_unit()) % 2 == 0) ++b.a0;
    }
    for (std::int64_t i = 0; i < step.nuplus; ++i) {
        SplitStream shot = root.child(static_cast<std::uint64_t>(step.nu0 + i));
        if (sample_count(cdfp, shot.next_unit()) % 2 == 0) ++b.aplus;
    }
    return b;
}

MeasurementBatch sample_batch_lossy(Angle theta, const StepSpec& step, double eta,
                                    std::uint64_t seed, bool parity) {
    check_step(step);
    if (!(eta > 0.0) || eta > 1.0) throw std::invalid_argument("survival rate must be in (0, 1]");
    const double survive = std::pow(eta, static_cast<double>(step.m));
    const double p0 = type0_probability(theta, step.m);
    const double pp = typeplus_probability(theta, step.m);
    std::vector<double> cdf0, cdfp;
    if (parity) {
        cdf0 = count_cdf(step.m, block_phase_cos(theta, step.m));
        cdfp = count_cdf(step.m, block_phase_sin(theta, step.m));
    }
    SplitStream root(seed);
    MeasurementBatch b;
    b.m = step.m;
    for (std::int64_t i = 0; i < step.nu0 + step.nuplus; ++i) {
        const bool cosine = i < step.nu0;
        SplitStream shot = root.child(static_cast<std::uint64_t>(i));
        if (!shot.bernoulli(survive)) continue;
        bool outcome0;
        if (parity) {
            outcome0 = sample_count(cosine ? cdf0 : cdfp, shot.next_unit()) % 2 == 0;
        } else {
            outcome0 = shot.bernoulli(cosine ? p0 : pp);
        }
        if (cosine) {
            ++b.nu0;
            if (outcome0) ++b.a0;
        } else {
            ++b.nuplus;
            if (outcome0) ++b.aplus;
        }
    }
    return b;
}

Angle step_estimate(const MeasurementBatch& batch) {
    if (batch.nu0 < 1 || batch.nuplus < 1) {
        throw std::invalid_argument("step_estimate needs shots in both quadratures");
    }
    double x = 2.0 * static_cast<double>(batch.a0) / static_cast<double>(batch.nu0) - 1.0;
    double y = 2.0 * static_cast<double>(batch.aplus) / static_cast<double>(batch.nuplus) - 1.0;
    if (x == 0.0 && y == 0.0) {
        return Angle(0.0);
    }
    return canonicalize(std::atan2(y, x));
}

ShiftedBatch sample_shifted(Angle theta, std::int64_t m, const std::vector<double>& shifts,
                            std::uint64_t seed) {
    if (m < 1) throw std::invalid_argument("block size must be >= 1");
    SplitStream root(seed);
    ShiftedBatch b;
    b.m = m;
    b.shifts = shifts;
    b.outcomes.resize(shifts.size());
    for (std::size_t i = 0; i < shifts.size(); ++i) {
        double p = 0.5 * (1.0 + std::cos(static_cast<double>(m) * (theta.value() - shifts[i])));
        b.outcomes[i] = root.child(i).bernoulli(p) ? 1 : 0;
    }
    return b;
}

ShiftedBatch sample_shifted_lossy(Angle theta, std::int64_t m, const std::vector<double>& shifts,
                                  double eta, std::uint64_t seed) {
    if (m < 1) throw std::invalid_argument("block size must be >= 1");
    if (!(eta > 0.0) || eta > 1.0) throw std::invalid_argument("survival rate must be in (0, 1]");
    const double survive = std::pow(eta, static_cast<double>(m));
    SplitStream root(seed);
    ShiftedBatch b;
    b.m = m;
    for (std::size_t i = 0; i < shifts.size(); ++i) {
        SplitStream shot = root.child(i);
        if (!shot.bernoulli(survive)) continue;
        double p = 0.5 * (1.0 + std::cos(static_cast<double>(m) * (theta.value() - shifts[i])));
        b.shifts.push_back(shifts[i]);
        b.outcomes.push_back(shot.bernoulli(p) ? 1 : 0);
    }
    return b;
}

Angle mle_shifted(const ShiftedBatch& batch, double lo, double hi) {
    if (!(lo < hi)) throw std::invalid_argument("mle interval must have positive width");
    if (batch.shifts.size() != batch.outcomes.size()) {
        throw std::invalid_argument("shifted batch shifts/outcomes mismatch");
    }
    if (batch.outcomes.empty()) throw std::invalid_argument("mle needs at least one outcome");

    // The shift policy reuses one working point for every shot, so fold
    // identical shifts into (shots, successes) pairs; the likelihood then
    // costs O(#distinct shifts) per probe.
    std::map<double, std::pair<std::int64_t, std::int64_t>> groups;
    for (std::size_t i = 0; i < batch.shifts.size(); ++i) {
        auto& g = groups[batch.shifts[i]];
        ++g.first;
        g.second += batch.outcomes[i];
    }

    const double md = static_cast<double>(batch.m);
    auto loglik = [&](double th) {
        double ll = 0.0;
        for (const auto& [shift, ns] : groups) {
            double p = 0.5 * (1.0 + std::cos(md * (th - shift)));
            p = std::min(1.0 - 1e-12, std::max(1e-12, p));
            ll += static_cast<double>(ns.second) * std::log(p) +
                  static_cast<double>(ns.first - ns.second) * std::log1p(-p);
        }
        return ll;
    };

    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    double fc = loglik(c), fd = loglik(d);
    for (int it = 0; it < 200 && (b - a) > 1e-13; ++it) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = loglik(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = loglik(d);
        }
    }
    return canonicalize(0.5 * (a + b));
}

}  // namespace ghzladder
