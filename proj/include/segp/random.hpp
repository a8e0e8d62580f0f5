#pragma once

#include <cstdint>
#include <random>

namespace segp {

// Every stochastic operation takes the stream explicitly; nothing in the
// library owns global random state.
using Random = std::mt19937_64;

inline std::size_t uniform_index(Random& rng, std::size_t n)
{
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

inline double uniform_real(Random& rng, double lo, double hi)
{
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline bool bernoulli(Random& rng, double p)
{
    return std::bernoulli_distribution(p)(rng);
}

} // namespace segp
