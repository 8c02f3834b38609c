#include <socmap/util/random.hpp>

#include <numeric>
#include <utility>

namespace socmap {

rng_t make_rng(std::uint64_t seed, std::initializer_list<std::uint64_t> stream) {
  std::vector<std::uint32_t> words;
  words.reserve(2 + 2 * stream.size());
  auto push = [&words](std::uint64_t v) {
    words.push_back(static_cast<std::uint32_t>(v & 0xffffffffu));
    words.push_back(static_cast<std::uint32_t>(v >> 32));
  };
  push(seed);
  for (auto s : stream) push(s);
  std::seed_seq seq(words.begin(), words.end());
  return rng_t(seq);
}

std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k, rng_t& rng) {
  if (k > n) k = n;
  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  // Partial Fisher-Yates.
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(pool[i], pool[pick(rng)]);
  }
  pool.resize(k);
  return pool;
}

std::vector<std::size_t> random_permutation(std::size_t n, rng_t& rng) {
  return sample_without_replacement(n, n, rng);
}

double standard_normal(rng_t& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  return dist(rng);
}

}  // namespace socmap
