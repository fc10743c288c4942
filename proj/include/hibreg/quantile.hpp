#pragma once

#include <vector>

#include "hibreg/types.hpp"

namespace hibreg {

/// Binary quantile-regression model: auxiliary variable with tau-quantile
/// x'beta(tau) and asymmetric-Laplace residuals of scale sigma.
struct QuantileModel {
  double quantile_level = 0.5;  // tau in (0, 1)
  Vector beta_tau;
  double ald_scale = 1.0;  // sigma > 0

  void validate() const;
};

/// Bernoulli log-likelihood with p_i = 1 - F_ALD(-x_i'beta(tau); sigma, tau).
/// Invariant under (beta, sigma) -> (k beta, k sigma) for every k > 0: the
/// scale of the coefficients cannot be identified from binary data.
double qr_binary_loglik(const QuantileModel& model, const std::vector<int>& y,
                        const Matrix& X);

/// Where the tau-quantile line crosses the covariate axis:
/// -beta_0(tau) / beta_j(tau). Identified despite the scaling ambiguity.
/// Throws DomainError when the slope is zero.
double qr_x_intercept(const QuantileModel& model, int direction);

/// Relative effect beta_j(tau) / ||beta_{-0}(tau)||_2 (L2 norm over the
/// non-intercept entries). Throws DomainError when all non-intercept
/// coefficients are zero.
double qr_relative_effect(const Vector& beta_tau, int j);

/// Rescale (beta, sigma) jointly so that ||beta||_2 = 1. The induced
/// probability curve is unchanged.
QuantileModel project_unit_norm(const QuantileModel& model);

/// Rescale (beta, sigma) jointly so that beta[index] = 1.
QuantileModel project_slope_one(const QuantileModel& model, int index = 1);

}  // namespace hibreg
