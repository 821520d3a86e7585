// shots.hpp
//
// Seedable Monte Carlo sampling of the exact click distributions, with
// subensemble accumulation and statistical estimators. Sampling is
// counter-based: the uniform draw for shot i of stream `seed` depends only
// on (seed, i), so runs are reproducible bit for bit regardless of thread
// count or evaluation order.

#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "qeraser/epr.hpp"
#include "qeraser/interferometer.hpp"

namespace qeraser {

// --- Counter-based RNG ---------------------------------------------------

// SplitMix64 finalizer (Steele, Lea, Flood). One full avalanche per call.
inline std::uint64_t mix_bits(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Uniform double in [0, 1) for a (stream, counter) pair.
inline double uniform_unit(std::uint64_t seed, std::uint64_t counter) {
    const std::uint64_t bits = mix_bits(mix_bits(seed) ^ counter);
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// Deterministic sub-stream derivation; distinct salts give independent
// streams from one user seed.
inline std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t salt) {
    return mix_bits(mix_bits(seed) + 0x632be59bd9b4e019ull * (salt + 1));
}

// --- Records -------------------------------------------------------------

enum class Outcome { d_plus, d_minus };
enum class ChoiceTimeTag { before_signal, after_signal };

using ConfigSnapshot = std::variant<InterferometerConfig, JointConfig>;

// One sampled run. The idler outcome is present exactly when the sampled
// experiment has an idler arm (i.e. the snapshot is a JointConfig). The
// choice-time tag is narrative only: no statistic in this toolkit reads it.
struct ShotRecord {
    std::uint64_t index;
    std::uint64_t seed;
    Outcome signal;
    std::optional<Outcome> idler;
    ConfigSnapshot config;
    ChoiceTimeTag tag;
};

// --- Sampling ------------------------------------------------------------

inline std::vector<ShotRecord> sample(const JointDistribution& dist, const JointConfig& config,
                                      std::size_t n, std::uint64_t seed,
                                      ChoiceTimeTag tag = ChoiceTimeTag::before_signal) {
    if (n < 1) throw ValidationError("sample: shot count must be at least 1");
    const double c0 = dist.pp;
    const double c1 = c0 + dist.pm;
    const double c2 = c1 + dist.mp;
    std::vector<ShotRecord> records;
    records.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = uniform_unit(seed, i);
        Outcome signal = Outcome::d_plus;
        Outcome idler = Outcome::d_plus;
        if (u < c0) {
            // (D+, D'+)
        } else if (u < c1) {
            idler = Outcome::d_minus;
        } else if (u < c2) {
            signal = Outcome::d_minus;
        } else {
            signal = Outcome::d_minus;
            idler = Outcome::d_minus;
        }
        records.push_back(ShotRecord{i, seed, signal, idler, config, tag});
    }
    return records;
}

inline std::vector<ShotRecord> sample(const DetectionProbabilities& dist,
                                      const InterferometerConfig& config, std::size_t n,
                                      std::uint64_t seed,
                                      ChoiceTimeTag tag = ChoiceTimeTag::before_signal) {
    if (n < 1) throw ValidationError("sample: shot count must be at least 1");
    if (!std::isfinite(dist.d_plus) || !std::isfinite(dist.d_minus) || dist.d_plus < -kTol ||
        dist.d_minus < -kTol || std::abs(dist.d_plus + dist.d_minus - 1.0) > kTol)
        throw ValidationError("sample: two-outcome distribution is not normalized");
    std::vector<ShotRecord> records;
    records.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = uniform_unit(seed, i);
        const Outcome signal = (u < dist.d_plus) ? Outcome::d_plus : Outcome::d_minus;
        records.push_back(ShotRecord{i, seed, signal, std::nullopt, config, tag});
    }
    return records;
}

// --- Accumulation --------------------------------------------------------

// Click counts grouped by (signal outcome, idler outcome).
struct SubensembleCounts {
    std::array<std::array<std::uint64_t, 2>, 2> n{}; // [signal][idler]
    std::uint64_t total = 0;

    std::uint64_t count(Outcome signal, Outcome idler) const {
        return n[signal == Outcome::d_minus][idler == Outcome::d_minus];
    }
    std::uint64_t idler_total(Outcome idler) const {
        const int i = idler == Outcome::d_minus;
        return n[0][i] + n[1][i];
    }
    std::uint64_t signal_total(Outcome signal) const {
        const int s = signal == Outcome::d_minus;
        return n[s][0] + n[s][1];
    }

    SubensembleCounts& operator+=(const SubensembleCounts& other) {
        for (int s = 0; s < 2; ++s)
            for (int i = 0; i < 2; ++i) n[s][i] += other.n[s][i];
        total += other.total;
        return *this;
    }
};

inline SubensembleCounts accumulate(std::span<const ShotRecord> records) {
    SubensembleCounts counts;
    for (const ShotRecord& r : records) {
        if (!r.idler)
            throw ValidationError("accumulate: record has no idler outcome to group by");
        ++counts.n[r.signal == Outcome::d_minus][*r.idler == Outcome::d_minus];
        ++counts.total;
    }
    return counts;
}

// --- Estimators ----------------------------------------------------------

struct PhiCell {
    double phi;
    SubensembleCounts counts;
};

struct VisibilityEstimate {
    double value;
    double std_error; // bootstrap, 1000 resamples
};

inline constexpr int kBootstrapResamples = 1000;

// Fringe visibility (max-min)/(max+min) of the empirical conditional
// frequency P(D+ | chosen idler outcome) over a phi grid. Requires at
// least 8 grid points spanning a full 2 pi period and at least 1000
// conditioned shots per point.
inline VisibilityEstimate estimate_visibility(std::span<const PhiCell> cells,
                                              Outcome condition_on,
                                              std::uint64_t bootstrap_seed = 0x5ee1eb00u) {
    if (cells.size() < 8)
        throw ValidationError("estimate_visibility: need at least 8 phi grid points");
    double lo = cells[0].phi, hi = cells[0].phi;
    for (const PhiCell& c : cells) {
        lo = std::min(lo, c.phi);
        hi = std::max(hi, c.phi);
    }
    const double needed = kTwoPi * (1.0 - 1.0 / static_cast<double>(cells.size())) - 1e-9;
    if (hi - lo < needed)
        throw ValidationError("estimate_visibility: phi grid does not span a full 2 pi period");

    std::vector<std::uint64_t> cond_totals(cells.size());
    std::vector<std::uint64_t> plus_counts(cells.size());
    for (std::size_t j = 0; j < cells.size(); ++j) {
        cond_totals[j] = cells[j].counts.idler_total(condition_on);
        if (cond_totals[j] < 1000)
            throw ValidationError("estimate_visibility: need at least 1000 shots per grid point");
        plus_counts[j] = cells[j].counts.count(Outcome::d_plus, condition_on);
    }

    const auto contrast = [&](const std::vector<double>& freq) {
        double fmax = freq[0], fmin = freq[0];
        for (double f : freq) {
            fmax = std::max(fmax, f);
            fmin = std::min(fmin, f);
        }
        const double denom = fmax + fmin;
        return denom > 0.0 ? (fmax - fmin) / denom : 0.0;
    };

    std::vector<double> freq(cells.size());
    for (std::size_t j = 0; j < cells.size(); ++j)
        freq[j] = static_cast<double>(plus_counts[j]) / static_cast<double>(cond_totals[j]);
    const double value = contrast(freq);

    // Parametric bootstrap: redraw each point's conditioned counts from a
    // binomial at the empirical rate.
    double sum = 0.0, sum_sq = 0.0;
    std::vector<double> resampled(cells.size());
    for (int r = 0; r < kBootstrapResamples; ++r) {
        for (std::size_t j = 0; j < cells.size(); ++j) {
            const std::uint64_t stream =
                derive_stream(bootstrap_seed, static_cast<std::uint64_t>(r) * cells.size() + j);
            std::uint64_t hits = 0;
            for (std::uint64_t k = 0; k < cond_totals[j]; ++k)
                hits += uniform_unit(stream, k) < freq[j];
            resampled[j] = static_cast<double>(hits) / static_cast<double>(cond_totals[j]);
        }
        const double v = contrast(resampled);
        sum += v;
        sum_sq += v * v;
    }
    const double mean = sum / kBootstrapResamples;
    const double var = std::max(sum_sq / kBootstrapResamples - mean * mean, 0.0);
    return {value, std::sqrt(var)};
}

} // namespace qeraser
