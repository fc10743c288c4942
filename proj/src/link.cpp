#include "hibreg/link.hpp"

#include <cmath>

#include "hibreg/normal.hpp"

namespace hibreg {

std::string to_string(LinkKind kind) {
  switch (kind) {
    case LinkKind::logit: return "logit";
    case LinkKind::probit: return "probit";
    case LinkKind::cloglog: return "cloglog";
    case LinkKind::skew_logistic: return "skew-logistic";
    case LinkKind::negbin: return "negbin";
  }
  return "unknown";
}

void LinkFamily::validate() const {
  if (kind == LinkKind::skew_logistic && !(kappa >= 0.0)) {
    throw DomainError("skew-logistic link requires kappa >= 0");
  }
  if (kind == LinkKind::negbin && !(overdispersion > 0.0)) {
    throw DomainError("negbin link requires overdispersion > 0");
  }
}

double LinkFamily::range_floor() const {
  if (kind == LinkKind::skew_logistic) return kappa / (1.0 + kappa);
  return 0.0;
}

double inverse_link(const LinkFamily& link, double eta) {
  link.validate();
  if (!std::isfinite(eta)) {
    throw DomainError("inverse_link: eta must be finite");
  }
  switch (link.kind) {
    case LinkKind::logit:
      return logistic_cdf(eta);
    case LinkKind::probit:
      return norm_cdf(eta);
    case LinkKind::cloglog:
      return -std::expm1(-std::exp(eta));
    case LinkKind::skew_logistic: {
      // (e^eta + kappa) / (1 + e^eta + kappa), rescaled for large eta.
      if (eta > 0.0) {
        const double e = std::exp(-eta);
        return (1.0 + link.kappa * e) / (e + 1.0 + link.kappa * e);
      }
      const double e = std::exp(eta);
      return (e + link.kappa) / (1.0 + e + link.kappa);
    }
    case LinkKind::negbin: {
      const double r = link.overdispersion;
      // 1 - (r / (r + e^eta))^r = -expm1(-r * log1p(e^eta / r))
      return -std::expm1(-r * std::log1p(std::exp(eta) / r));
    }
  }
  throw DomainError("inverse_link: unknown link kind");
}

double link_value(const LinkFamily& link, double p) {
  link.validate();
  if (!(p > link.range_floor() && p < 1.0)) {
    throw DomainError("link_value: p outside the range of " +
                      to_string(link.kind));
  }
  switch (link.kind) {
    case LinkKind::logit:
      return logit(p);
    case LinkKind::probit:
      return norm_quantile(p);
    case LinkKind::cloglog:
      return std::log(-std::log1p(-p));
    case LinkKind::skew_logistic:
      // Solve p = (e^eta + kappa) / (1 + e^eta + kappa) for eta.
      return std::log((p * (1.0 + link.kappa) - link.kappa) / (1.0 - p));
    case LinkKind::negbin: {
      const double r = link.overdispersion;
      return std::log(r) + std::log(std::expm1(-std::log1p(-p) / r));
    }
  }
  throw DomainError("link_value: unknown link kind");
}

double inverse_link_deriv(const LinkFamily& link, double eta) {
  link.validate();
  if (!std::isfinite(eta)) {
    throw DomainError("inverse_link_deriv: eta must be finite");
  }
  switch (link.kind) {
    case LinkKind::logit: {
      const double p = logistic_cdf(eta);
      return p * (1.0 - p);
    }
    case LinkKind::probit:
      return norm_pdf(eta);
    case LinkKind::cloglog:
      return std::exp(eta - std::exp(eta));
    case LinkKind::skew_logistic: {
      // d/deta of (e^eta + kappa)/(1 + e^eta + kappa) = e^eta / (1+e^eta+kappa)^2
      const double d = 1.0 + std::exp(eta) + link.kappa;
      return std::exp(eta) / (d * d);
    }
    case LinkKind::negbin: {
      // e^eta * (r / (r + e^eta))^(r+1), evaluated in log space
      const double r = link.overdispersion;
      return std::exp(eta - (r + 1.0) * std::log1p(std::exp(eta) / r));
    }
  }
  throw DomainError("inverse_link_deriv: unknown link kind");
}

double log_likelihood(const std::vector<int>& y, const Vector& p) {
  if (static_cast<Eigen::Index>(y.size()) != p.size()) {
    throw DomainError("log_likelihood: y and p lengths differ");
  }
  double total = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    const double pi = clamp_probability(p[i]);
    total += y[i] ? std::log(pi) : std::log1p(-pi);
  }
  return total;
}

Vector probability_gradient(const LinkFamily& link, const Vector& beta,
                            const Vector& x) {
  if (beta.size() != x.size()) {
    throw DomainError("probability_gradient: beta and x lengths differ");
  }
  const double eta = x.dot(beta);
  return inverse_link_deriv(link, eta) * beta;
}

}  // namespace hibreg
