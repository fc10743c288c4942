#pragma once

#include <functional>
#include <string>
#include <vector>

#include "hibreg/link.hpp"
#include "hibreg/types.hpp"

namespace hibreg {

enum class AuxFamily { gaussian, logistic, asymmetric_laplace, poisson, negbin };

std::string to_string(AuxFamily f);

/// Asymmetric Laplace CDF, parameterized so that the tau-quantile sits at the
/// location: F(location; location, scale, tau) = tau.
double ald_cdf(double z, double location, double scale, double tau);

/// Conditional auxiliary-variable family plus covariate-to-parameter maps.
/// The binary response is the indicator that the auxiliary variable exceeds
/// zero, so the success probability is 1 - F_Z(0).
///
/// Continuous families use location x'beta and scale x'gamma (a constant
/// scale is gamma = (c, 0, ...)). Count families (poisson, negbin) use the
/// log map rate = exp(x'beta) and ignore the scale.
struct AuxiliarySpec {
  AuxFamily family = AuxFamily::gaussian;
  Vector location_coef;
  Vector scale_coef;
  double skew = 0.5;           // asymmetric-Laplace quantile-skew, in (0,1)
  double overdispersion = 1.0; // negbin r, > 0

  static AuxiliarySpec gaussian(Vector beta, Vector gamma);
  static AuxiliarySpec gaussian(Vector beta, double scale = 1.0);
  static AuxiliarySpec logistic(Vector beta, double scale = 1.0);
  static AuxiliarySpec asymmetric_laplace(Vector beta, double scale,
                                          double tau);
  static AuxiliarySpec poisson(Vector beta);
  static AuxiliarySpec negbin(Vector beta, double overdispersion);

  void validate() const;
};

/// Pr(z > 0 | x) = 1 - F_Z(0). Throws DomainError when the scale map is
/// non-positive at x.
double success_probability(const AuxiliarySpec& spec, const Vector& x);

struct EquivalenceReport {
  bool equivalent = false;
  double max_abs_diff = 0.0;
};

using CurveFn = std::function<double(const Vector&)>;

CurveFn curve_of(const AuxiliarySpec& spec);
CurveFn curve_of(const LinkFamily& link, const Vector& beta);

/// Two specifications are equivalent when their success-probability curves
/// agree within tol everywhere on the grid.
EquivalenceReport check_equivalence(const CurveFn& a, const CurveFn& b,
                                    const std::vector<Vector>& grid,
                                    double tol = 1e-8);
EquivalenceReport check_equivalence(const AuxiliarySpec& a,
                                    const AuxiliarySpec& b,
                                    const std::vector<Vector>& grid,
                                    double tol = 1e-8);
EquivalenceReport check_equivalence(const AuxiliarySpec& a,
                                    const LinkFamily& link, const Vector& beta,
                                    const std::vector<Vector>& grid,
                                    double tol = 1e-8);

/// Systematic values eta_b(x) = g_b(success_probability(target, x)) such that
/// the base link's inverse reproduces the target curve on the grid. Throws
/// NumericError when the target probability saturates at machine 0/1.
Vector match_nonlinear_systematic(const AuxiliarySpec& target,
                                  const LinkFamily& base_link,
                                  const std::vector<Vector>& grid);

/// Default equivalence grid: n points (1, t) with t equally spaced over
/// [lo, hi].
std::vector<Vector> covariate_grid(double lo, double hi, int n = 401);

}  // namespace hibreg
