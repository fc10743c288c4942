#include <doctest.h>

#include <cmath>

#include "hibreg/auxiliary.hpp"
#include "hibreg/normal.hpp"
#include "hibreg/rng.hpp"

using namespace hibreg;

namespace {
Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}
}  // namespace

TEST_CASE("ald_cdf puts the tau quantile at the location") {
  for (double tau : {0.1, 0.3, 0.5, 0.77}) {
    for (double loc : {-2.0, 0.0, 1.5}) {
      for (double s : {0.5, 1.0, 3.0}) {
        CHECK(ald_cdf(loc, loc, s, tau) == doctest::Approx(tau).epsilon(1e-14));
      }
    }
  }
  CHECK(ald_cdf(0.0, 0.0, 1.0, 0.5) == doctest::Approx(0.5));
  CHECK_THROWS_AS(ald_cdf(0.0, 0.0, -1.0, 0.5), DomainError);
  CHECK_THROWS_AS(ald_cdf(0.0, 0.0, 1.0, 1.5), DomainError);
}

TEST_CASE("success_probability per family") {
  SUBCASE("poisson: 1 - exp(-lambda)") {
    // lambda = exp(x'beta) = 1 at x = (1, 0), beta = (0, anything)
    const auto spec = AuxiliarySpec::poisson(vec2(0.0, 1.0));
    CHECK(success_probability(spec, vec2(1.0, 0.0)) ==
          doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-12));
  }
  SUBCASE("poisson: vanishing rate gives probability 0") {
    const auto spec = AuxiliarySpec::poisson(vec2(-745.0, 0.0));
    CHECK(success_probability(spec, vec2(1.0, 0.0)) ==
          doctest::Approx(0.0).epsilon(1e-12));
  }
  SUBCASE("gaussian: location 0, scale 1 gives 1/2") {
    const auto spec = AuxiliarySpec::gaussian(vec2(0.0, 1.0), 1.0);
    CHECK(success_probability(spec, vec2(1.0, 0.0)) == doctest::Approx(0.5));
  }
  SUBCASE("heteroskedastic gaussian: Phi((b0+b1 x)/(g0+g1 x))") {
    const auto spec =
        AuxiliarySpec::gaussian(vec2(0.5, 1.0), vec2(1.0, 0.4));
    for (double x : {-1.5, -0.2, 0.0, 0.7, 2.0}) {
      CHECK(success_probability(spec, vec2(1.0, x)) ==
            doctest::Approx(norm_cdf((0.5 + x) / (1.0 + 0.4 * x)))
                .epsilon(1e-14));
    }
  }
  SUBCASE("non-positive scale on the requested x is an error") {
    const auto spec =
        AuxiliarySpec::gaussian(vec2(0.0, 1.0), vec2(1.0, 1.0));
    CHECK_THROWS_AS(success_probability(spec, vec2(1.0, -1.5)), DomainError);
  }
  SUBCASE("negbin matches the link formula") {
    const auto spec = AuxiliarySpec::negbin(vec2(0.3, 1.0), 2.0);
    const double lam = std::exp(0.3 + 0.9);
    CHECK(success_probability(spec, vec2(1.0, 0.9)) ==
          doctest::Approx(1.0 - std::pow(2.0 / (2.0 + lam), 2.0))
              .epsilon(1e-12));
  }
  SUBCASE("monotone in the location for every family") {
    Rng rng(99);
    const std::vector<AuxiliarySpec> specs = {
        AuxiliarySpec::gaussian(vec2(0.0, 1.0), 1.3),
        AuxiliarySpec::logistic(vec2(0.0, 1.0)),
        AuxiliarySpec::asymmetric_laplace(vec2(0.0, 1.0), 0.8, 0.3),
        AuxiliarySpec::poisson(vec2(0.0, 1.0)),
        AuxiliarySpec::negbin(vec2(0.0, 1.0), 1.7)};
    for (const auto& spec : specs) {
      double prev = -1.0;
      for (int i = 0; i <= 60; ++i) {
        const double x = -4.0 + 8.0 * i / 60.0;
        const double p = success_probability(spec, vec2(1.0, x));
        CHECK(p >= prev);
        prev = p;
      }
    }
  }
}

TEST_CASE("check_equivalence") {
  const auto grid = covariate_grid(-5.0, 5.0, 401);
  SUBCASE("poisson auxiliary == cloglog GLM") {
    const Vector beta = vec2(0.4, 1.2);
    const auto rep = check_equivalence(AuxiliarySpec::poisson(beta),
                                       LinkFamily::cloglog(), beta, grid, 1e-12);
    CHECK(rep.equivalent);
    CHECK(rep.max_abs_diff < 1e-12);
  }
  SUBCASE("unit gaussian auxiliary == probit GLM") {
    const Vector beta = vec2(-0.3, 0.9);
    const auto rep = check_equivalence(AuxiliarySpec::gaussian(beta, 1.0),
                                       LinkFamily::probit(), beta, grid, 1e-12);
    CHECK(rep.equivalent);
    CHECK(rep.max_abs_diff < 1e-12);
  }
  SUBCASE("logistic auxiliary == logit GLM") {
    const Vector beta = vec2(0.2, -1.1);
    const auto rep = check_equivalence(AuxiliarySpec::logistic(beta),
                                       LinkFamily::logit(), beta, grid, 1e-12);
    CHECK(rep.equivalent);
  }
  SUBCASE("logit vs probit with the same coefficients differ") {
    // grid-scan oracle: the largest gap between the two CDFs
    double oracle = 0.0;
    for (const auto& x : grid) {
      oracle = std::max(oracle,
                        std::fabs(logistic_cdf(x[1]) - norm_cdf(x[1])));
    }
    const Vector beta = vec2(0.0, 1.0);
    const auto rep = check_equivalence(AuxiliarySpec::logistic(beta),
                                       LinkFamily::probit(), beta, grid, 1e-8);
    CHECK_FALSE(rep.equivalent);
    CHECK(rep.max_abs_diff == doctest::Approx(oracle).epsilon(1e-12));
    // the unscaled logistic and normal CDFs are ~0.117 apart at their widest
    CHECK(rep.max_abs_diff == doctest::Approx(0.117402).epsilon(1e-4));
  }
  SUBCASE("empty grid is an error") {
    CHECK_THROWS_AS(check_equivalence(AuxiliarySpec::poisson(vec2(0, 1)),
                                      AuxiliarySpec::poisson(vec2(0, 1)), {},
                                      1e-8),
                    DomainError);
  }
}

TEST_CASE("match_nonlinear_systematic") {
  const auto grid = covariate_grid(-2.0, 2.0, 201);
  SUBCASE("poisson target through a probit base reproduces the curve") {
    const auto target = AuxiliarySpec::poisson(vec2(0.2, 0.8));
    const Vector eta = match_nonlinear_systematic(target, LinkFamily::probit(), grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double p_target = success_probability(target, grid[i]);
      const double p_base = inverse_link(LinkFamily::probit(),
                                         eta[static_cast<Eigen::Index>(i)]);
      CHECK(std::fabs(p_target - p_base) < 1e-10);
      // composition identity: eta = Phi^{-1}(1 - exp(-e^{x'beta}))
      CHECK(eta[static_cast<Eigen::Index>(i)] ==
            doctest::Approx(norm_quantile(p_target)).epsilon(1e-12));
    }
  }
  SUBCASE("probit target through a probit base is the identity systematic") {
    const Vector beta = vec2(0.1, 1.3);
    const auto target = AuxiliarySpec::gaussian(beta, 1.0);
    const Vector eta = match_nonlinear_systematic(target, LinkFamily::probit(), grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      CHECK(eta[static_cast<Eigen::Index>(i)] ==
            doctest::Approx(grid[i].dot(beta)).epsilon(1e-9));
    }
  }
  SUBCASE("heteroskedastic gaussian target: eta = (b0+b1x)/(g0+g1x)") {
    const auto target =
        AuxiliarySpec::gaussian(vec2(0.5, 1.0), vec2(1.0, 0.4));
    const Vector eta = match_nonlinear_systematic(target, LinkFamily::probit(), grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double x = grid[i][1];
      CHECK(eta[static_cast<Eigen::Index>(i)] ==
            doctest::Approx((0.5 + x) / (1.0 + 0.4 * x)).epsilon(1e-9));
    }
  }
  SUBCASE("matched pairs pass the equivalence check at 1e-9") {
    const std::vector<AuxiliarySpec> targets = {
        AuxiliarySpec::poisson(vec2(0.3, 0.7)),
        AuxiliarySpec::asymmetric_laplace(vec2(0.2, 0.9), 1.1, 0.3),
        AuxiliarySpec::gaussian(vec2(0.5, 1.0), vec2(1.0, 0.4)),
        AuxiliarySpec::negbin(vec2(0.1, 0.6), 2.0)};
    for (const auto& target : targets) {
      const Vector eta =
          match_nonlinear_systematic(target, LinkFamily::probit(), grid);
      auto base_curve = [&](const Vector& x) {
        // look up the grid position of x (grid is ordered and regular)
        const double t = x[1];
        const double lo = grid.front()[1], hi = grid.back()[1];
        const auto i = static_cast<Eigen::Index>(
            std::lround((t - lo) / (hi - lo) * (grid.size() - 1)));
        return inverse_link(LinkFamily::probit(), eta[i]);
      };
      const auto rep =
          check_equivalence(curve_of(target), base_curve, grid, 1e-9);
      CHECK(rep.equivalent);
    }
  }
  SUBCASE("saturated target probability is a numeric error") {
    // lambda = exp(60) drives p to machine 1
    const auto target = AuxiliarySpec::poisson(vec2(60.0, 0.0));
    CHECK_THROWS_AS(
        match_nonlinear_systematic(target, LinkFamily::probit(), grid),
        NumericError);
  }
}
