#pragma once

#include <socmap/geometry.hpp>
#include <socmap/variogram/matern.hpp>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

namespace socmap::kriging {

struct kriging_prediction {
  double u_hat = 0.0;
  double sigma2 = 0.0;
  double psi = 0.0;  // Lagrange multiplier of the semivariance system
};

// Sites sharing exact coordinates merged into one donor carrying the mean
// residual. group[i] is the merged index of input site i.
struct collapsed_sites {
  std::vector<location> sites;
  std::vector<double> values;
  std::vector<std::size_t> group;
};

collapsed_sites collapse_duplicates(std::span<const location> sites, std::span<const double> values);

// Global-neighbourhood ordinary kriging. The bordered semivariance system
//   Gamma lambda + psi 1 = gamma_0,  1' lambda = 1
// is solved through the equivalent covariance form with one Cholesky factor:
//   lambda = C^-1 (c + psi 1),  psi = (1 - 1' C^-1 c) / (1' C^-1 1).
class ordinary_kriging {
 public:
  // Exact duplicate locations are collapsed first. Throws numeric_error when
  // the covariance matrix is not positive definite.
  ordinary_kriging(std::span<const location> sites, std::span<const double> values,
                   const variogram::matern_model& model);

  kriging_prediction predict(const location& target) const;

  // Weights over the collapsed donors, and the matching psi.
  std::vector<double> weights(const location& target, double* psi = nullptr) const;

  std::span<const location> donors() const { return donors_.sites; }
  std::span<const double> donor_values() const { return donors_.values; }
  const variogram::matern_model& model() const { return model_; }

 private:
  Eigen::VectorXd covariances_to(const location& target) const;

  collapsed_sites donors_;
  variogram::matern_model model_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  Eigen::VectorXd a_;  // C^-1 1
  double s_ = 0.0;     // 1' C^-1 1
  Eigen::VectorXd w_;  // C^-1 u
  double one_w_ = 0.0; // 1' C^-1 u
};

inline kriging_prediction krige_point(std::span<const location> sites, std::span<const double> values,
                                      const variogram::matern_model& model, const location& target) {
  return ordinary_kriging(sites, values, model).predict(target);
}

Eigen::MatrixXd covariance_matrix(std::span<const location> sites, const variogram::matern_model& model);

// Leave-one-out kriging of every site from all the others, from one inverse
// of the covariance matrix (Dubrule's identities). No duplicate collapse.
struct loo_result {
  std::vector<double> prediction;  // u_hat_{-i}
  std::vector<double> error;       // u_i - u_hat_{-i}
  std::vector<double> sigma2;      // kriging variance without site i
};

// Reusable LOO operator for a fixed geometry and model; applying it to new
// residuals costs O(n^2).
class loo_operator {
 public:
  loo_operator(std::span<const location> sites, const variogram::matern_model& model);

  loo_result apply(std::span<const double> values) const;
  std::size_t size() const { return static_cast<std::size_t>(p_.rows()); }

 private:
  Eigen::MatrixXd p_;  // C^-1 - a a' / s
};

loo_result leave_one_out(std::span<const location> sites, std::span<const double> values,
                         const variogram::matern_model& model);

}  // namespace socmap::kriging
