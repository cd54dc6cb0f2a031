#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>

namespace richstate {

/// Stable 64-bit FNV-1a; used wherever a hash must not vary between builds
/// of the standard library.
std::uint64_t stable_hash(std::string_view text, std::uint64_t basis = 0xcbf29ce484222325ULL);

/// Seeded generator with portable sampling helpers. The std distributions are
/// implementation-defined, so sampling is done on raw engine output instead.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

    /// Independent stream for a named consumer ("population", "explorer", ...).
    static Rng substream(std::uint64_t seed, std::string_view name);
    static std::uint64_t derive_seed(std::uint64_t seed, std::string_view name);

    std::uint64_t next() { return engine_(); }
    /// Uniform in [0, 1) with 53 bits of resolution.
    double uniform01();
    /// Uniform integer in [0, bound). bound must be > 0.
    std::uint64_t below(std::uint64_t bound);
    bool bernoulli(double p) { return uniform01() < p; }
    /// Index drawn proportionally to non-negative weights; weights.size() if all are zero.
    std::size_t weighted_index(std::span<const double> weights);

    /// Engine state as text, for persistence.
    std::string state() const;
    void set_state(const std::string& text);

    friend bool operator==(const Rng& a, const Rng& b) { return a.engine_ == b.engine_; }

private:
    std::mt19937_64 engine_;
};

}  // namespace richstate
