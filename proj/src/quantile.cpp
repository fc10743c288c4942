#include "hibreg/quantile.hpp"

#include <cmath>

#include "hibreg/auxiliary.hpp"
#include "hibreg/link.hpp"

namespace hibreg {

void QuantileModel::validate() const {
  if (!(quantile_level > 0.0 && quantile_level < 1.0)) {
    throw DomainError("quantile model: tau must lie strictly inside (0, 1)");
  }
  if (!(ald_scale > 0.0)) {
    throw DomainError("quantile model: ALD scale must be positive");
  }
  if (beta_tau.size() == 0) {
    throw DomainError("quantile model: empty coefficient vector");
  }
}

double qr_binary_loglik(const QuantileModel& model, const std::vector<int>& y,
                        const Matrix& X) {
  model.validate();
  if (static_cast<Eigen::Index>(y.size()) != X.rows()) {
    throw DomainError("qr_binary_loglik: y and X lengths differ");
  }
  if (X.cols() != model.beta_tau.size()) {
    throw DomainError("qr_binary_loglik: coefficient length mismatch");
  }
  Vector p(X.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    const double m = X.row(i).dot(model.beta_tau);
    p[i] = 1.0 - ald_cdf(-m, 0.0, model.ald_scale, model.quantile_level);
  }
  return log_likelihood(y, p);
}

double qr_x_intercept(const QuantileModel& model, int direction) {
  model.validate();
  if (direction <= 0 || direction >= model.beta_tau.size()) {
    throw DomainError("qr_x_intercept: direction out of range");
  }
  const double slope = model.beta_tau[direction];
  if (slope == 0.0) {
    throw DomainError("qr_x_intercept: zero slope; intercept undefined");
  }
  return -model.beta_tau[0] / slope;
}

double qr_relative_effect(const Vector& beta_tau, int j) {
  if (beta_tau.size() < 2) {
    throw DomainError("qr_relative_effect: need at least one covariate");
  }
  if (j <= 0 || j >= beta_tau.size()) {
    throw DomainError("qr_relative_effect: index out of range");
  }
  const double norm = beta_tau.tail(beta_tau.size() - 1).norm();
  if (norm == 0.0) {
    throw DomainError(
        "qr_relative_effect: all non-intercept coefficients are zero");
  }
  return beta_tau[j] / norm;
}

QuantileModel project_unit_norm(const QuantileModel& model) {
  model.validate();
  const double norm = model.beta_tau.norm();
  if (norm == 0.0) {
    throw DomainError("project_unit_norm: zero coefficient vector");
  }
  QuantileModel out = model;
  out.beta_tau /= norm;
  out.ald_scale /= norm;
  return out;
}

QuantileModel project_slope_one(const QuantileModel& model, int index) {
  model.validate();
  if (index < 0 || index >= model.beta_tau.size()) {
    throw DomainError("project_slope_one: index out of range");
  }
  const double c = model.beta_tau[index];
  if (!(c > 0.0)) {
    throw DomainError("project_slope_one: coefficient must be positive");
  }
  QuantileModel out = model;
  out.beta_tau /= c;
  out.ald_scale /= c;
  return out;
}

}  // namespace hibreg
