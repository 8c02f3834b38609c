#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace socmap {

using rng_t = std::mt19937_64;

// Independent generator for a named stream under a master seed. Every random
// draw in the library goes through one of these, never through wall-clock state.
rng_t make_rng(std::uint64_t seed, std::initializer_list<std::uint64_t> stream = {});

// Uniform draw of k distinct indices out of [0, n), in draw order.
std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k, rng_t& rng);

std::vector<std::size_t> random_permutation(std::size_t n, rng_t& rng);

double standard_normal(rng_t& rng);

}  // namespace socmap
