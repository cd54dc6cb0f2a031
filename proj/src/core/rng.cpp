#include "richstate/core/rng.hpp"

#include <sstream>

namespace richstate {

std::uint64_t stable_hash(std::string_view text, std::uint64_t basis) {
    std::uint64_t h = basis;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t Rng::derive_seed(std::uint64_t seed, std::string_view name) {
    // splitmix64 finaliser over (seed, name) so nearby seeds decorrelate
    std::uint64_t z = stable_hash(name, seed ^ 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

Rng Rng::substream(std::uint64_t seed, std::string_view name) {
    return Rng(derive_seed(seed, name));
}

double Rng::uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::uint64_t Rng::below(std::uint64_t bound) {
    // rejection sampling keeps the draw unbiased for any bound
    const std::uint64_t limit = bound * (UINT64_MAX / bound);
    std::uint64_t x;
    do {
        x = engine_();
    } while (x >= limit);
    return x % bound;
}

std::size_t Rng::weighted_index(std::span<const double> weights) {
    double total = 0.0;
    for (double w : weights) {
        if (w > 0.0) total += w;
    }
    if (total <= 0.0) return weights.size();
    const double target = uniform01() * total;
    double acc = 0.0;
    std::size_t last_positive = weights.size();
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (weights[i] <= 0.0) continue;
        acc += weights[i];
        last_positive = i;
        if (target < acc) return i;
    }
    return last_positive;
}

std::string Rng::state() const {
    std::ostringstream out;
    out << engine_;
    return out.str();
}

void Rng::set_state(const std::string& text) {
    std::istringstream in(text);
    in >> engine_;
}

}  // namespace richstate
