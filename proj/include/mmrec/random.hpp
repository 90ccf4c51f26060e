#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>

namespace mmrec {

/// The one generator type threaded through every randomized operation.
/// mt19937_64's output sequence is fixed by the standard; the helpers below
/// avoid std::*_distribution so draws are identical across standard libraries.
using Rng = std::mt19937_64;

/// Uniform integer in [0, bound) by rejection sampling. bound must be > 0.
std::uint64_t uniform_index(Rng& rng, std::uint64_t bound);

/// Uniform double in [0, 1) with 53 random bits.
double uniform_unit(Rng& rng);

bool bernoulli(Rng& rng, double p);

std::uint64_t splitmix64(std::uint64_t x);

/// Per-key seed derived from a global seed, e.g. one stream per user id.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view key);

}  // namespace mmrec
