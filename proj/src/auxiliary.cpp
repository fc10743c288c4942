#include "hibreg/auxiliary.hpp"

#include <cmath>

#include "hibreg/normal.hpp"

namespace hibreg {

std::string to_string(AuxFamily f) {
  switch (f) {
    case AuxFamily::gaussian: return "gaussian";
    case AuxFamily::logistic: return "logistic";
    case AuxFamily::asymmetric_laplace: return "asymmetric-laplace";
    case AuxFamily::poisson: return "poisson";
    case AuxFamily::negbin: return "negbin";
  }
  return "unknown";
}

double ald_cdf(double z, double location, double scale, double tau) {
  if (!(scale > 0.0)) throw DomainError("ald_cdf: scale must be positive");
  if (!(tau > 0.0 && tau < 1.0)) {
    throw DomainError("ald_cdf: tau must lie in (0, 1)");
  }
  const double u = (z - location) / scale;
  if (u <= 0.0) {
    return tau * std::exp((1.0 - tau) * u);
  }
  return 1.0 - (1.0 - tau) * std::exp(-tau * u);
}

AuxiliarySpec AuxiliarySpec::gaussian(Vector beta, Vector gamma) {
  AuxiliarySpec s;
  s.family = AuxFamily::gaussian;
  s.location_coef = std::move(beta);
  s.scale_coef = std::move(gamma);
  return s;
}

AuxiliarySpec AuxiliarySpec::gaussian(Vector beta, double scale) {
  Vector gamma = Vector::Zero(beta.size());
  gamma[0] = scale;
  return gaussian(std::move(beta), std::move(gamma));
}

AuxiliarySpec AuxiliarySpec::logistic(Vector beta, double scale) {
  AuxiliarySpec s;
  s.family = AuxFamily::logistic;
  s.scale_coef = Vector::Zero(beta.size());
  s.scale_coef[0] = scale;
  s.location_coef = std::move(beta);
  return s;
}

AuxiliarySpec AuxiliarySpec::asymmetric_laplace(Vector beta, double scale,
                                                double tau) {
  AuxiliarySpec s;
  s.family = AuxFamily::asymmetric_laplace;
  s.scale_coef = Vector::Zero(beta.size());
  s.scale_coef[0] = scale;
  s.location_coef = std::move(beta);
  s.skew = tau;
  return s;
}

AuxiliarySpec AuxiliarySpec::poisson(Vector beta) {
  AuxiliarySpec s;
  s.family = AuxFamily::poisson;
  s.location_coef = std::move(beta);
  return s;
}

AuxiliarySpec AuxiliarySpec::negbin(Vector beta, double overdispersion) {
  AuxiliarySpec s;
  s.family = AuxFamily::negbin;
  s.location_coef = std::move(beta);
  s.overdispersion = overdispersion;
  return s;
}

void AuxiliarySpec::validate() const {
  if (location_coef.size() == 0) {
    throw DomainError("auxiliary spec: empty location map");
  }
  if (family == AuxFamily::asymmetric_laplace &&
      !(skew > 0.0 && skew < 1.0)) {
    throw DomainError("auxiliary spec: ALD skew must lie in (0, 1)");
  }
  if (family == AuxFamily::negbin && !(overdispersion > 0.0)) {
    throw DomainError("auxiliary spec: negbin overdispersion must be > 0");
  }
  const bool count =
      family == AuxFamily::poisson || family == AuxFamily::negbin;
  if (!count && scale_coef.size() != location_coef.size()) {
    throw DomainError("auxiliary spec: scale map length mismatch");
  }
}

double success_probability(const AuxiliarySpec& spec, const Vector& x) {
  spec.validate();
  if (x.size() != spec.location_coef.size()) {
    throw DomainError("success_probability: covariate length mismatch");
  }
  const double m = x.dot(spec.location_coef);
  switch (spec.family) {
    case AuxFamily::poisson:
      return -std::expm1(-std::exp(m));
    case AuxFamily::negbin: {
      const double r = spec.overdispersion;
      return -std::expm1(-r * std::log1p(std::exp(m) / r));
    }
    default:
      break;
  }
  const double s = x.dot(spec.scale_coef);
  if (!(s > 0.0)) {
    throw DomainError("success_probability: scale map non-positive at x");
  }
  switch (spec.family) {
    case AuxFamily::gaussian:
      return norm_cdf(m / s);
    case AuxFamily::logistic:
      return logistic_cdf(m / s);
    case AuxFamily::asymmetric_laplace:
      return 1.0 - ald_cdf(-m, 0.0, s, spec.skew);
    default:
      break;
  }
  throw DomainError("success_probability: unknown family");
}

CurveFn curve_of(const AuxiliarySpec& spec) {
  return [spec](const Vector& x) { return success_probability(spec, x); };
}

CurveFn curve_of(const LinkFamily& link, const Vector& beta) {
  return [link, beta](const Vector& x) {
    if (x.size() != beta.size()) {
      throw DomainError("curve_of: covariate length mismatch");
    }
    return inverse_link(link, x.dot(beta));
  };
}

EquivalenceReport check_equivalence(const CurveFn& a, const CurveFn& b,
                                    const std::vector<Vector>& grid,
                                    double tol) {
  if (grid.empty()) throw DomainError("check_equivalence: empty grid");
  EquivalenceReport rep;
  for (const auto& x : grid) {
    const double d = std::fabs(a(x) - b(x));
    if (d > rep.max_abs_diff) rep.max_abs_diff = d;
  }
  rep.equivalent = rep.max_abs_diff <= tol;
  return rep;
}

EquivalenceReport check_equivalence(const AuxiliarySpec& a,
                                    const AuxiliarySpec& b,
                                    const std::vector<Vector>& grid,
                                    double tol) {
  return check_equivalence(curve_of(a), curve_of(b), grid, tol);
}

EquivalenceReport check_equivalence(const AuxiliarySpec& a,
                                    const LinkFamily& link, const Vector& beta,
                                    const std::vector<Vector>& grid,
                                    double tol) {
  return check_equivalence(curve_of(a), curve_of(link, beta), grid, tol);
}

Vector match_nonlinear_systematic(const AuxiliarySpec& target,
                                  const LinkFamily& base_link,
                                  const std::vector<Vector>& grid) {
  if (grid.empty()) {
    throw DomainError("match_nonlinear_systematic: empty grid");
  }
  Vector eta(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double p = success_probability(target, grid[i]);
    if (!(p > base_link.range_floor() && p < 1.0)) {
      throw NumericError(
          "match_nonlinear_systematic: target probability saturates on grid");
    }
    eta[static_cast<Eigen::Index>(i)] = link_value(base_link, p);
  }
  return eta;
}

std::vector<Vector> covariate_grid(double lo, double hi, int n) {
  if (n < 2) throw DomainError("covariate_grid: need at least 2 points");
  std::vector<Vector> grid;
  grid.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    Vector x(2);
    x[0] = 1.0;
    x[1] = lo + (hi - lo) * static_cast<double>(i) / (n - 1);
    grid.push_back(std::move(x));
  }
  return grid;
}

}  // namespace hibreg
