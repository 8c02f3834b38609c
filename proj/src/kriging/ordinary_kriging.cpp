#include <socmap/kriging/ordinary_kriging.hpp>

#include <socmap/error.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

namespace socmap::kriging {
namespace {

Eigen::LLT<Eigen::MatrixXd> factor(const Eigen::MatrixXd& c) {
  Eigen::LLT<Eigen::MatrixXd> llt(c);
  if (llt.info() != Eigen::Success) throw numeric_error("kriging covariance matrix is not positive definite");
  const double scale = c.diagonal().maxCoeff();
  const Eigen::VectorXd d = llt.matrixL().toDenseMatrix().diagonal();
  if (!(scale > 0.0) || (d.array().square() / scale).minCoeff() < 1e-14)
    throw numeric_error("kriging covariance matrix is numerically singular");
  return llt;
}

void check_inputs(std::span<const location> sites, std::span<const double> values) {
  if (sites.size() != values.size()) throw data_error("site and residual counts differ");
  if (sites.empty()) throw data_error("kriging needs at least one donor");
  for (double v : values)
    if (!std::isfinite(v)) throw data_error("non-finite residual");
  for (const auto& s : sites)
    if (!std::isfinite(s.x_km) || !std::isfinite(s.y_km)) throw data_error("non-finite coordinate");
}

}  // namespace

collapsed_sites collapse_duplicates(std::span<const location> sites, std::span<const double> values) {
  if (sites.size() != values.size()) throw data_error("site and residual counts differ");
  collapsed_sites out;
  std::map<std::pair<double, double>, std::size_t> seen;
  std::vector<std::size_t> counts;
  out.group.reserve(sites.size());
  for (std::size_t i = 0; i < sites.size(); ++i) {
    const auto key = std::make_pair(sites[i].x_km, sites[i].y_km);
    auto [it, fresh] = seen.emplace(key, out.sites.size());
    if (fresh) {
      out.sites.push_back(sites[i]);
      out.values.push_back(0.0);
      counts.push_back(0);
    }
    out.values[it->second] += values[i];
    ++counts[it->second];
    out.group.push_back(it->second);
  }
  for (std::size_t k = 0; k < out.values.size(); ++k) out.values[k] /= static_cast<double>(counts[k]);
  return out;
}

Eigen::MatrixXd covariance_matrix(std::span<const location> sites, const variogram::matern_model& model) {
  const auto n = static_cast<Eigen::Index>(sites.size());
  Eigen::MatrixXd c(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    c(i, i) = model.sill();
    for (Eigen::Index j = 0; j < i; ++j) {
      const double v = variogram::matern_covariance(
          model, distance(sites[static_cast<std::size_t>(i)], sites[static_cast<std::size_t>(j)]));
      c(i, j) = v;
      c(j, i) = v;
    }
  }
  return c;
}

ordinary_kriging::ordinary_kriging(std::span<const location> sites, std::span<const double> values,
                                   const variogram::matern_model& model)
    : model_(model) {
  check_inputs(sites, values);
  variogram::validate(model);
  donors_ = collapse_duplicates(sites, values);
  llt_ = factor(covariance_matrix(donors_.sites, model_));
  const auto n = static_cast<Eigen::Index>(donors_.sites.size());
  a_ = llt_.solve(Eigen::VectorXd::Ones(n));
  s_ = a_.sum();
  const Eigen::Map<const Eigen::VectorXd> u(donors_.values.data(), n);
  w_ = llt_.solve(u);
  one_w_ = w_.sum();
  if (!(s_ > 0.0) || !std::isfinite(s_)) throw numeric_error("kriging system is singular");
}

Eigen::VectorXd ordinary_kriging::covariances_to(const location& target) const {
  Eigen::VectorXd c(static_cast<Eigen::Index>(donors_.sites.size()));
  for (std::size_t i = 0; i < donors_.sites.size(); ++i)
    c(static_cast<Eigen::Index>(i)) = variogram::matern_covariance(model_, distance(donors_.sites[i], target));
  return c;
}

kriging_prediction ordinary_kriging::predict(const location& target) const {
  const Eigen::VectorXd c = covariances_to(target);
  const Eigen::VectorXd ci = llt_.solve(c);
  kriging_prediction p;
  p.psi = (1.0 - ci.sum()) / s_;
  const Eigen::VectorXd lambda = ci + p.psi * a_;
  p.u_hat = c.dot(w_) + p.psi * one_w_;
  p.sigma2 = std::max(0.0, model_.sill() - lambda.dot(c) + p.psi);
  return p;
}

std::vector<double> ordinary_kriging::weights(const location& target, double* psi) const {
  const Eigen::VectorXd c = covariances_to(target);
  const Eigen::VectorXd ci = llt_.solve(c);
  const double ps = (1.0 - ci.sum()) / s_;
  const Eigen::VectorXd lambda = ci + ps * a_;
  if (psi) *psi = ps;
  return {lambda.data(), lambda.data() + lambda.size()};
}

loo_operator::loo_operator(std::span<const location> sites, const variogram::matern_model& model) {
  if (sites.size() < 2) throw data_error("leave-one-out needs at least two sites");
  variogram::validate(model);
  const auto llt = factor(covariance_matrix(sites, model));
  const auto n = static_cast<Eigen::Index>(sites.size());
  p_ = llt.solve(Eigen::MatrixXd::Identity(n, n));
  const Eigen::VectorXd a = p_.rowwise().sum();
  p_ -= a * a.transpose() / a.sum();
  for (Eigen::Index i = 0; i < n; ++i)
    if (!(p_(i, i) > 0.0) || !std::isfinite(1.0 / p_(i, i)))
      throw degenerate_error("zero leave-one-out kriging variance");
}

loo_result loo_operator::apply(std::span<const double> values) const {
  if (values.size() != size()) throw data_error("residual count does not match the LOO geometry");
  const auto n = p_.rows();
  const Eigen::Map<const Eigen::VectorXd> u(values.data(), n);
  const Eigen::VectorXd pu = p_ * u;
  loo_result r;
  r.prediction.resize(values.size());
  r.error.resize(values.size());
  r.sigma2.resize(values.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    r.error[k] = pu(i) / p_(i, i);
    r.prediction[k] = values[k] - r.error[k];
    r.sigma2[k] = 1.0 / p_(i, i);
  }
  return r;
}

loo_result leave_one_out(std::span<const location> sites, std::span<const double> values,
                         const variogram::matern_model& model) {
  check_inputs(sites, values);
  return loo_operator(sites, model).apply(values);
}

}  // namespace socmap::kriging
