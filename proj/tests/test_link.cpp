#include <doctest.h>

#include <cmath>

#include "hibreg/link.hpp"
#include "hibreg/normal.hpp"
#include "hibreg/rng.hpp"

using namespace hibreg;

TEST_CASE("inverse_link closed-form identities") {
  CHECK(inverse_link(LinkFamily::logit(), 0.0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(inverse_link(LinkFamily::cloglog(), 0.0) ==
        doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-14));
  CHECK(inverse_link(LinkFamily::skew_logistic(1.0), 0.0) ==
        doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(inverse_link(LinkFamily::cloglog(), std::log(std::log(2.0))) ==
        doctest::Approx(0.5).epsilon(1e-12));
  CHECK(inverse_link(LinkFamily::probit(), 0.0) == doctest::Approx(0.5));
  // geometric positivity (negbin r = 1) is exactly the logit
  CHECK(inverse_link(LinkFamily::negbin(1.0), 0.7) ==
        doctest::Approx(inverse_link(LinkFamily::logit(), 0.7)).epsilon(1e-14));
}

TEST_CASE("inverse_link rejects bad inputs") {
  CHECK_THROWS_AS(inverse_link(LinkFamily::logit(),
                               std::numeric_limits<double>::quiet_NaN()),
                  DomainError);
  CHECK_THROWS_AS(inverse_link(LinkFamily::logit(),
                               std::numeric_limits<double>::infinity()),
                  DomainError);
  CHECK_THROWS_AS(inverse_link(LinkFamily::skew_logistic(-0.5), 0.0),
                  DomainError);
  CHECK_THROWS_AS(inverse_link(LinkFamily::negbin(0.0), 0.0), DomainError);
  CHECK_THROWS_AS(inverse_link(LinkFamily::negbin(-2.0), 0.0), DomainError);
}

TEST_CASE("monotonicity over a dense eta grid") {
  // The map is strictly increasing; in double precision the probit, cloglog
  // and negbin all round to exactly 1.0 well inside [-20, 20], so strictness
  // is asserted away from saturation and non-decrease everywhere.
  const std::vector<LinkFamily> links = {
      LinkFamily::logit(), LinkFamily::probit(), LinkFamily::cloglog(),
      LinkFamily::skew_logistic(0.7), LinkFamily::negbin(2.5)};
  for (const auto& link : links) {
    const double floor = link.range_floor();
    double prev = floor - 1.0;
    bool nondecreasing = true, strict_inside = true;
    int strict_points = 0;
    for (int i = 0; i < 10000; ++i) {
      const double eta = -20.0 + 40.0 * i / 9999.0;
      const double p = inverse_link(link, eta);
      if (p < prev) nondecreasing = false;
      const bool interior = std::min(p - floor, 1.0 - p) > 1e-12 &&
                            std::min(prev - floor, 1.0 - prev) > 1e-12;
      if (i > 0 && interior) {
        ++strict_points;
        if (!(p > prev)) strict_inside = false;
      }
      prev = p;
    }
    INFO("link: ", to_string(link.kind));
    CHECK(nondecreasing);
    CHECK(strict_inside);
    CHECK(strict_points > 3000);  // probit interior is ~(-7, 7)
  }
}

TEST_CASE("forward/inverse round trips") {
  const std::vector<LinkFamily> links = {
      LinkFamily::logit(), LinkFamily::probit(), LinkFamily::cloglog(),
      LinkFamily::skew_logistic(0.7), LinkFamily::negbin(2.5)};
  SUBCASE("link(inverse_link(eta)) = eta on [-10, 10]") {
    // Once p sits within ~1e-9 of the range boundary, the double holding it
    // no longer carries enough digits to recover eta; those saturated tail
    // points are excluded rather than papered over with a loose tolerance.
    for (const auto& link : links) {
      int checked = 0;
      for (int i = 0; i <= 200; ++i) {
        const double eta = -10.0 + 20.0 * i / 200.0;
        const double p = inverse_link(link, eta);
        if (p - link.range_floor() < 1e-9 || 1.0 - p < 1e-9) continue;
        INFO("link ", to_string(link.kind), " eta ", eta);
        CHECK(link_value(link, p) == doctest::Approx(eta).epsilon(1e-8));
        ++checked;
      }
      CHECK(checked > 60);  // the non-saturated region is wide
    }
  }
  SUBCASE("inverse_link(link(p)) = p over the link's range") {
    for (const auto& link : links) {
      const double floor = link.range_floor();
      for (int i = 1; i < 400; ++i) {
        // p in (floor + eps, 1 - eps); full (1e-6, 1-1e-6) when floor is 0
        const double lo = std::max(1e-6, floor + 1e-6);
        const double p = lo + (1.0 - 1e-6 - lo) * i / 400.0;
        INFO("link ", to_string(link.kind), " p ", p);
        CHECK(inverse_link(link, link_value(link, p)) ==
              doctest::Approx(p).epsilon(1e-10));
      }
    }
  }
  SUBCASE("forward link rejects out-of-range p") {
    CHECK_THROWS_AS(link_value(LinkFamily::logit(), 0.0), DomainError);
    CHECK_THROWS_AS(link_value(LinkFamily::logit(), 1.0), DomainError);
    // skew-logistic range floor is kappa / (1 + kappa)
    CHECK_THROWS_AS(link_value(LinkFamily::skew_logistic(1.0), 0.4),
                    DomainError);
  }
}

TEST_CASE("skew-logistic degenerates to logit at kappa = 0") {
  for (int i = 0; i <= 400; ++i) {
    const double eta = -10.0 + 20.0 * i / 400.0;
    CHECK(inverse_link(LinkFamily::skew_logistic(0.0), eta) ==
          doctest::Approx(inverse_link(LinkFamily::logit(), eta))
              .epsilon(1e-12));
  }
}

TEST_CASE("negbin approaches cloglog as overdispersion grows") {
  const LinkFamily nb = LinkFamily::negbin(1e6);
  double max_diff = 0.0;
  for (int i = 0; i <= 400; ++i) {
    const double eta = -10.0 + 20.0 * i / 400.0;
    max_diff = std::max(max_diff,
                        std::fabs(inverse_link(nb, eta) -
                                  inverse_link(LinkFamily::cloglog(), eta)));
  }
  CHECK(max_diff < 1e-4);
}

// Symmetric links satisfy p(eta) = 1 - p(-eta). The cloglog and the
// skew-logistic (kappa > 0) both break the identity, and both break it the
// same way at the curve level: p(eta) + p(-eta) > 1 for every eta. What makes
// the cloglog "left-skewed" is the shape of its gradient, which peaks where
// the curve has already passed one half (the curve climbs slowly from 0 and
// saturates fast at 1). The logit gradient peaks exactly at p = 1/2.
TEST_CASE("symmetry and its violations") {
  SUBCASE("logit and probit are symmetric") {
    for (int i = 1; i <= 100; ++i) {
      const double eta = 8.0 * i / 100.0;
      CHECK(inverse_link(LinkFamily::logit(), eta) ==
            doctest::Approx(1.0 - inverse_link(LinkFamily::logit(), -eta))
                .epsilon(1e-12));
      CHECK(inverse_link(LinkFamily::probit(), eta) ==
            doctest::Approx(1.0 - inverse_link(LinkFamily::probit(), -eta))
                .epsilon(1e-12));
    }
  }
  SUBCASE("cloglog and skew-logistic break symmetry: 1 - p(-eta) < p(eta)") {
    for (int i = 0; i <= 100; ++i) {
      const double eta = -6.0 + 12.0 * i / 100.0;
      CHECK(1.0 - inverse_link(LinkFamily::cloglog(), -eta) <
            inverse_link(LinkFamily::cloglog(), eta) + 1e-15);
      CHECK(1.0 - inverse_link(LinkFamily::skew_logistic(1.0), -eta) <
            inverse_link(LinkFamily::skew_logistic(1.0), eta) + 1e-15);
    }
    // strict at eta != 0 (and at 0, since p(0) > 1/2 for both)
    CHECK(1.0 - inverse_link(LinkFamily::cloglog(), -1.0) <
          inverse_link(LinkFamily::cloglog(), 1.0));
  }
  SUBCASE("cloglog gradient peaks after the median crossing (left skew)") {
    // gradient mode at eta* = 0 where p = 1 - 1/e > 1/2
    const double g0 = inverse_link_deriv(LinkFamily::cloglog(), 0.0);
    CHECK(g0 > inverse_link_deriv(LinkFamily::cloglog(), -0.1));
    CHECK(g0 > inverse_link_deriv(LinkFamily::cloglog(), 0.1));
    CHECK(inverse_link(LinkFamily::cloglog(), 0.0) > 0.5);
    // while the logit gradient peaks exactly at p = 1/2
    CHECK(inverse_link(LinkFamily::logit(), 0.0) == doctest::Approx(0.5));
  }
}

TEST_CASE("log_likelihood") {
  SUBCASE("direct arithmetic") {
    Vector p(2);
    p << 0.8, 0.3;
    CHECK(log_likelihood({1, 0}, p) ==
          doctest::Approx(std::log(0.8) + std::log(0.7)).epsilon(1e-12));
    CHECK(log_likelihood({1, 0}, p) == doctest::Approx(-0.57982).epsilon(1e-4));
  }
  SUBCASE("perfect fit is ~0") {
    Vector p(1);
    p << 1.0 - 1e-12;
    CHECK(log_likelihood({1}, p) == doctest::Approx(0.0).epsilon(1e-9));
  }
  SUBCASE("three coin flips") {
    Vector p(3);
    p << 0.5, 0.5, 0.5;
    CHECK(log_likelihood({0, 1, 1}, p) ==
          doctest::Approx(3.0 * std::log(0.5)).epsilon(1e-12));
  }
  SUBCASE("clamping keeps the result finite") {
    Vector p(2);
    p << 0.0, 1.0;
    CHECK(std::isfinite(log_likelihood({1, 0}, p)));
  }
  SUBCASE("length mismatch") {
    Vector p(2);
    p << 0.5, 0.5;
    CHECK_THROWS_AS(log_likelihood({1}, p), DomainError);
  }
}

TEST_CASE("probability_gradient closed forms") {
  Vector beta(2), x(2);
  SUBCASE("logit at eta = 0: slope p(1-p) = 1/4") {
    beta << 0.0, 1.0;
    x << 1.0, 0.0;
    const Vector g = probability_gradient(LinkFamily::logit(), beta, x);
    CHECK(g[1] == doctest::Approx(0.25).epsilon(1e-12));
  }
  SUBCASE("cloglog at eta = 0: slope e^{-1}") {
    beta << 0.0, 1.0;
    x << 1.0, 0.0;
    const Vector g = probability_gradient(LinkFamily::cloglog(), beta, x);
    CHECK(g[1] == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  }
  SUBCASE("probit with beta = (0,2): slope 2 phi(0)") {
    beta << 0.0, 2.0;
    x << 1.0, 0.0;
    const Vector g = probability_gradient(LinkFamily::probit(), beta, x);
    CHECK(g[1] == doctest::Approx(2.0 / std::sqrt(2.0 * M_PI)).epsilon(1e-12));
    CHECK(g[1] == doctest::Approx(0.79788).epsilon(1e-4));
  }
}

TEST_CASE("analytic gradients match central finite differences") {
  Rng rng(20240811);
  const std::vector<LinkFamily> links = {
      LinkFamily::logit(), LinkFamily::probit(), LinkFamily::cloglog(),
      LinkFamily::skew_logistic(0.8), LinkFamily::negbin(3.0)};
  const double h = 1e-5;
  for (int rep = 0; rep < 100; ++rep) {
    const LinkFamily& link = links[static_cast<std::size_t>(rep % 5)];
    const int p = 2 + static_cast<int>(rng.integer(3));
    Vector beta(p), x(p);
    for (int j = 0; j < p; ++j) {
      beta[j] = rng.normal();
      x[j] = rng.normal();
    }
    // keep eta away from the saturated tails so the FD quotient is stable
    const double eta = x.dot(beta);
    if (std::fabs(eta) > 2.5) beta *= 2.5 / std::fabs(eta);
    const Vector g = probability_gradient(link, beta, x);
    for (int j = 0; j < p; ++j) {
      Vector xp = x, xm = x;
      xp[j] += h;
      xm[j] -= h;
      const double fd = (inverse_link(link, xp.dot(beta)) -
                         inverse_link(link, xm.dot(beta))) /
                        (2.0 * h);
      INFO("link ", to_string(link.kind), " rep ", rep, " component ", j);
      CHECK(std::fabs(g[j] - fd) <= 1e-6 * std::fabs(g[j]) + 1e-8);
    }
  }
}

TEST_CASE("norm_quantile inverts norm_cdf") {
  for (int i = 1; i < 1000; ++i) {
    const double p = i / 1000.0;
    CHECK(norm_cdf(norm_quantile(p)) == doctest::Approx(p).epsilon(1e-12));
  }
  // deep tails
  for (double p : {1e-10, 1e-6, 1.0 - 1e-6, 1.0 - 1e-10}) {
    CHECK(norm_cdf(norm_quantile(p)) == doctest::Approx(p).epsilon(1e-9));
  }
  CHECK_THROWS_AS(norm_quantile(0.0), DomainError);
  CHECK_THROWS_AS(norm_quantile(1.0), DomainError);
}
