#pragma once
#include <cstdint>
#include <random>

namespace colucb {

/// Deterministic stream of raw 64-bit draws with a documented consumption
/// contract: every public sampling helper consumes exactly one raw draw per
/// call (uniform01, bernoulli, gaussian alike).  This keeps paired-seed
/// comparisons between policies meaningful: the n-th draw of a stream is the
/// same number no matter which distribution it is turned into.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t raw() { return eng_(); }

    /// Uniform on the open interval (0,1); never returns 0 or 1, so inverse
    /// CDF transforms stay finite.  One raw draw.
    double uniform01() {
        return (double)((raw() >> 11) + 0.5) * 0x1p-53;
    }

    /// One raw draw.  bernoulli(0) is always 0, bernoulli(1) always 1.
    bool bernoulli(double p) { return uniform01() < p; }

    /// Standard normal via inverse CDF; one raw draw.
    double gaussian() { return normal_quantile(uniform01()); }

    /// Wichura's AS241 (PPND16) inverse of the standard normal CDF,
    /// accurate to about 1e-16 over (0,1).
    static double normal_quantile(double p);

private:
    std::mt19937_64 eng_;
};

/// Kinds of per-trajectory streams.  Environment streams feed reward draws
/// (exactly one per (group, round), consumed in ascending group order every
/// round); policy streams feed action sampling (exactly one per group per
/// round in which the allocation LP was solved, zero otherwise).
enum class StreamKind : std::uint64_t { Environment = 0, Policy = 1 };

/// splitmix64 finalizer used to derive well-separated stream seeds.
std::uint64_t mix64(std::uint64_t x);

/// Stream seed for (base_seed, trial, policy, kind).  When an experiment
/// couples environment streams across policies it passes policy_index = 0
/// for every policy's Environment stream, so matched trials see identical
/// reward noise.
std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t trial,
                          std::uint64_t policy_index, StreamKind kind);

} // namespace colucb
