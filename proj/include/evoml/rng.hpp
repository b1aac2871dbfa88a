#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <utility>

namespace evoml {

/// Mixes a base seed with a list of tags into an independent 64-bit stream seed.
/// Used everywhere a sub-computation needs its own reproducible randomness.
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> tags);

/// Thin wrapper over mt19937_64 whose draws do not depend on the standard
/// library's distribution implementations, so results are stable across toolchains.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    // uniform in [0, n)
    std::size_t index(std::size_t n);

    // uniform in [0, 1)
    double unit();

    bool chance(double p) { return unit() < p; }

    template <typename T>
    void shuffle(std::span<T> values)
    {
        for (std::size_t i = values.size(); i > 1; --i) {
            std::swap(values[i - 1], values[index(i)]);
        }
    }

private:
    std::mt19937_64 engine_;
};

} // namespace evoml
