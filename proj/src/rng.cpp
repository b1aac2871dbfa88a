#include "evoml/rng.hpp"

#include <limits>
#include <stdexcept>

namespace evoml {

namespace {

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30U)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27U)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31U);
}

} // namespace

std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> tags)
{
    std::uint64_t h = splitmix64(base);
    for (auto t : tags) {
        h = splitmix64(h ^ splitmix64(t + 0x632be59bd9b4e019ULL));
    }
    return h;
}

std::size_t Rng::index(std::size_t n)
{
    if (n == 0) {
        throw std::invalid_argument("Rng::index: empty range");
    }
    auto const bound = static_cast<std::uint64_t>(n);
    // rejection sampling keeps the draw unbiased
    std::uint64_t const limit = std::numeric_limits<std::uint64_t>::max() - (std::numeric_limits<std::uint64_t>::max() % bound);
    std::uint64_t x = 0;
    do {
        x = engine_();
    } while (x >= limit);
    return static_cast<std::size_t>(x % bound);
}

double Rng::unit()
{
    return static_cast<double>(engine_() >> 11U) * 0x1.0p-53;
}

} // namespace evoml
