#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace sere {

/// Hierarchical seed. A root seed is extended with child indices to name
/// independent sub-streams, e.g. Seed(42).child(eps_index).child(replica).
/// Distinct index paths give distinct word sequences, so derivation is
/// injective over (seed, path).
class Seed {
public:
    Seed(std::uint64_t root = 0)  // NOLINT(google-explicit-constructor)
        : words_{static_cast<std::uint32_t>(root), static_cast<std::uint32_t>(root >> 32)} {}

    Seed child(std::uint64_t index) const {
        Seed s = *this;
        s.words_.push_back(static_cast<std::uint32_t>(index));
        s.words_.push_back(static_cast<std::uint32_t>(index >> 32));
        return s;
    }

    const std::vector<std::uint32_t>& words() const { return words_; }

    friend bool operator==(const Seed&, const Seed&) = default;

private:
    std::vector<std::uint32_t> words_;
};

using Engine = std::mt19937_64;

inline Engine make_engine(const Seed& seed) {
    std::seed_seq seq(seed.words().begin(), seed.words().end());
    return Engine(seq);
}

/// Uniform variate on the open interval (0, 1).
inline double uniform_open(Engine& rng) {
    // 53 random bits, offset by half an ulp so 0 is never returned.
    return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace sere
