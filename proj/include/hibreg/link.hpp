#pragma once

#include <string>
#include <vector>

#include "hibreg/types.hpp"

namespace hibreg {

enum class LinkKind { logit, probit, cloglog, skew_logistic, negbin };

std::string to_string(LinkKind kind);

/// A named inverse-link family with optional shape parameters.
///
/// The skew-logistic inverse link is (e^eta + kappa) / (1 + e^eta + kappa);
/// for kappa > 0 its range is (kappa/(1+kappa), 1) rather than (0, 1), so the
/// forward link is only defined above that floor. The negative-binomial link
/// 1 - (r/(r + e^eta))^r maps onto (0, 1) for every overdispersion r > 0 and
/// reduces exactly to the logit at r = 1 and to the cloglog as r -> infinity.
struct LinkFamily {
  LinkKind kind = LinkKind::logit;
  double kappa = 0.0;           // skew-logistic shift, >= 0
  double overdispersion = 1.0;  // negbin r, > 0

  static LinkFamily logit() { return {LinkKind::logit}; }
  static LinkFamily probit() { return {LinkKind::probit}; }
  static LinkFamily cloglog() { return {LinkKind::cloglog}; }
  static LinkFamily skew_logistic(double kappa) {
    return {LinkKind::skew_logistic, kappa};
  }
  static LinkFamily negbin(double overdispersion) {
    return {LinkKind::negbin, 0.0, overdispersion};
  }

  /// Throws DomainError when a shape parameter is invalid for the kind.
  void validate() const;

  /// Infimum of the inverse link's range (0 for all kinds except the
  /// skew-logistic, where it is kappa / (1 + kappa)).
  double range_floor() const;
};

/// g^{-1}(eta). Throws DomainError for non-finite eta or invalid shape.
double inverse_link(const LinkFamily& link, double eta);

/// Forward link g(p). Throws DomainError when p is outside the link's range.
double link_value(const LinkFamily& link, double p);

/// d g^{-1} / d eta, closed form.
double inverse_link_deriv(const LinkFamily& link, double eta);

/// Bernoulli log-likelihood sum y log p + (1-y) log(1-p); probabilities are
/// clamped to [1e-300, 1-1e-16] before the logs. Throws DomainError on a
/// length mismatch.
double log_likelihood(const std::vector<int>& y, const Vector& p);

/// Gradient of the success probability with respect to the covariate vector:
/// (d g^{-1}/d eta)(x'beta) * beta.
Vector probability_gradient(const LinkFamily& link, const Vector& beta,
                            const Vector& x);

}  // namespace hibreg
