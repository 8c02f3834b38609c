#include <socmap/validation/compare.hpp>

#include <socmap/error.hpp>
#include <socmap/util/stats.hpp>

#include <boost/math/distributions/students_t.hpp>

#include <cmath>

namespace socmap::validation {

welch_result welch_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) throw data_error("Welch test needs at least two values per sample");
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double va = sample_variance(a) / na;
  const double vb = sample_variance(b) / nb;
  const double diff = mean(a) - mean(b);
  welch_result r;
  const double se2 = va + vb;
  if (!(se2 > 0.0)) {
    // Both samples constant.
    r.t = diff == 0.0 ? 0.0 : std::copysign(INFINITY, diff);
    r.df = na + nb - 2.0;
    r.p = diff == 0.0 ? 1.0 : 0.0;
    return r;
  }
  r.t = diff / std::sqrt(se2);
  r.df = se2 * se2 / (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
  const boost::math::students_t dist(r.df);
  r.p = std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(r.t))));
  return r;
}

significance_matrix compare_samples(const std::vector<std::string>& models,
                                    const std::vector<std::vector<double>>& samples, double alpha) {
  if (models.size() != samples.size()) throw data_error("one sample per model is required");
  if (!(alpha > 0.0 && alpha < 1.0)) throw config_error("alpha must lie in (0, 1)");
  const auto k = models.size();
  significance_matrix m;
  m.models = models;
  m.alpha = alpha;
  const double pairs = k >= 2 ? static_cast<double>(k * (k - 1) / 2) : 1.0;
  m.adjusted_alpha = alpha / pairs;
  m.cells.assign(k, std::vector<pair_test>(k));
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j) {
      pair_test t;
      if (samples[i].size() >= 2 && samples[j].size() >= 2) {
        t.p = welch_test(samples[i], samples[j]).p;
        t.status = t.p < m.adjusted_alpha ? pair_status::significant : pair_status::not_significant;
      }
      m.cells[i][j] = t;
      m.cells[j][i] = t;
    }
  return m;
}

}  // namespace socmap::validation
