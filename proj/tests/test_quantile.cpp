#include <doctest.h>

#include <cmath>

#include "hibreg/auxiliary.hpp"
#include "hibreg/quantile.hpp"
#include "hibreg/rng.hpp"

using namespace hibreg;

namespace {

struct QrData {
  Matrix X;
  std::vector<int> y;
};

QrData simulate_qr_data(int n, double tau, Rng& rng) {
  QrData d;
  d.X.resize(n, 2);
  d.y.resize(static_cast<std::size_t>(n));
  Vector beta(2);
  beta << 0.4, 1.1;
  for (int i = 0; i < n; ++i) {
    d.X(i, 0) = 1.0;
    d.X(i, 1) = -2.0 + 4.0 * rng.uniform();
    const double p = 1.0 - ald_cdf(-d.X.row(i).dot(beta), 0.0, 1.0, tau);
    d.y[static_cast<std::size_t>(i)] = rng.bernoulli(p) ? 1 : 0;
  }
  return d;
}

}  // namespace

TEST_CASE("qr_binary_loglik basics") {
  SUBCASE("median model with zero coefficients gives coin-flip likelihood") {
    Matrix X(2, 2);
    X << 1.0, 0.3, 1.0, -0.7;
    QuantileModel m{0.5, Vector::Zero(2), 1.0};
    CHECK(qr_binary_loglik(m, {1, 0}, X) ==
          doctest::Approx(2.0 * std::log(0.5)).epsilon(1e-12));
  }
  SUBCASE("scaling both beta and sigma leaves the likelihood unchanged") {
    Rng rng(5);
    const QrData d = simulate_qr_data(40, 0.3, rng);
    Vector beta(2);
    beta << -0.2, 0.9;
    QuantileModel m{0.3, beta, 0.7};
    const double base = qr_binary_loglik(m, d.y, d.X);
    QuantileModel scaled = m;
    scaled.beta_tau *= 3.0;
    scaled.ald_scale *= 3.0;
    CHECK(qr_binary_loglik(scaled, d.y, d.X) ==
          doctest::Approx(base).epsilon(1e-10));
    QuantileModel identity = m;  // k = 1
    CHECK(qr_binary_loglik(identity, d.y, d.X) == base);
  }
  SUBCASE("preconditions") {
    Matrix X(1, 2);
    X << 1.0, 0.0;
    CHECK_THROWS_AS(qr_binary_loglik({0.5, Vector::Zero(2), -1.0}, {1}, X),
                    DomainError);
    CHECK_THROWS_AS(qr_binary_loglik({1.5, Vector::Zero(2), 1.0}, {1}, X),
                    DomainError);
  }
}

TEST_CASE("scaling non-identifiability holds for every k > 0 and dataset") {
  Rng rng(77);
  for (int rep = 0; rep < 50; ++rep) {
    const double tau = 0.1 + 0.8 * rng.uniform();
    const QrData d = simulate_qr_data(50, tau, rng);
    Vector beta(2);
    beta << rng.normal(), rng.normal();
    QuantileModel m{tau, beta, 0.3 + rng.uniform()};
    const double base = qr_binary_loglik(m, d.y, d.X);
    for (double k : {0.1, 3.0, 40.0}) {
      QuantileModel scaled = m;
      scaled.beta_tau *= k;
      scaled.ald_scale *= k;
      CHECK(std::fabs(qr_binary_loglik(scaled, d.y, d.X) - base) < 1e-10);
    }
  }
}

TEST_CASE("qr_x_intercept") {
  Vector b(2);
  b << 0.2, 1.0;
  CHECK(qr_x_intercept({0.5, b, 1.0}, 1) == doctest::Approx(-0.2));
  Vector b3 = 3.0 * b;
  CHECK(qr_x_intercept({0.5, b3, 1.0}, 1) == doctest::Approx(-0.2));
  Vector flat(2);
  flat << 1.0, 0.0;
  CHECK_THROWS_AS(qr_x_intercept({0.5, flat, 1.0}, 1), DomainError);
}

TEST_CASE("qr_relative_effect") {
  Vector b(3);
  b << 7.7, 3.0, 4.0;
  CHECK(qr_relative_effect(b, 1) == doctest::Approx(0.6));
  CHECK(qr_relative_effect(7.0 * b, 1) == doctest::Approx(0.6));
  Vector b2(3);
  b2 << 1.0, 0.0, 1.0;
  CHECK(qr_relative_effect(b2, 1) == doctest::Approx(0.0));
  Vector zeros(3);
  zeros << 2.0, 0.0, 0.0;
  CHECK_THROWS_AS(qr_relative_effect(zeros, 1), DomainError);
}

TEST_CASE("identified functionals are invariant under positive scaling") {
  Rng rng(123);
  for (int rep = 0; rep < 30; ++rep) {
    Vector b(3);
    b << rng.normal(), rng.normal() + 2.0, rng.normal();
    const double k = 0.05 + 5.0 * rng.uniform();
    QuantileModel m{0.4, b, 1.2};
    QuantileModel s{0.4, Vector(k * b), 1.2 * k};
    CHECK(std::fabs(qr_x_intercept(m, 1) - qr_x_intercept(s, 1)) < 1e-12);
    CHECK(std::fabs(qr_relative_effect(m.beta_tau, 2) -
                    qr_relative_effect(s.beta_tau, 2)) < 1e-12);
  }
}

TEST_CASE("constraint projections preserve the probability curve") {
  Rng rng(321);
  Vector b(2);
  b << 0.8, 1.7;
  QuantileModel m{0.35, b, 0.9};
  const QuantileModel unit = project_unit_norm(m);
  CHECK(unit.beta_tau.norm() == doctest::Approx(1.0).epsilon(1e-12));
  const QuantileModel slope1 = project_slope_one(m, 1);
  CHECK(slope1.beta_tau[1] == doctest::Approx(1.0).epsilon(1e-12));
  for (int i = 0; i <= 50; ++i) {
    const double x = -2.0 + 4.0 * i / 50.0;
    Vector row(2);
    row << 1.0, x;
    auto prob = [&](const QuantileModel& q) {
      return 1.0 -
             ald_cdf(-row.dot(q.beta_tau), 0.0, q.ald_scale, q.quantile_level);
    };
    CHECK(std::fabs(prob(m) - prob(unit)) < 1e-10);
    CHECK(std::fabs(prob(m) - prob(slope1)) < 1e-10);
  }
}
