#include <doctest.h>

#include <cmath>

#include "hibreg/occupancy.hpp"
#include "hibreg/auxiliary.hpp"
#include "hibreg/rng.hpp"
#include "oracles.hpp"

using namespace hibreg;

namespace {
Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}
}  // namespace

TEST_CASE("psi per model kind") {
  OccupancyModelSpec poisson{ModelKind::poisson, CovariateCollection::linear};
  OccupancyModelSpec sp{ModelKind::spatial_poisson, CovariateCollection::linear};
  OccupancyModelSpec kr{ModelKind::kery_royle, CovariateCollection::linear};
  OccupancyModelSpec naive{ModelKind::naive, CovariateCollection::linear};
  const Vector x = vec2(1.0, 0.0);

  CHECK(psi(poisson, vec2(0.0, 0.4), x) ==
        doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-12));
  CHECK(psi(sp, vec2(0.0, 0.4), x, std::log(2.0)) ==
        doctest::Approx(1.0 - std::exp(-2.0)).epsilon(1e-12));
  CHECK(psi(kr, vec2(0.0, 0.4), x) == doctest::Approx(0.5));
  Vector p1(1);
  p1 << 0.37;
  CHECK(psi(naive, p1, x) == doctest::Approx(0.37));
  CHECK_THROWS_AS(psi(sp, vec2(0.0, 0.4), x), DomainError);
}

TEST_CASE("psi of the Poisson model equals the poisson auxiliary curve") {
  // cross-module check of the shared construction
  OccupancyModelSpec poisson{ModelKind::poisson, CovariateCollection::linear};
  const Vector beta = vec2(0.3, -0.8);
  const auto spec = AuxiliarySpec::poisson(beta);
  for (int i = 0; i <= 40; ++i) {
    const double t = -3.0 + 6.0 * i / 40.0;
    const Vector x = vec2(1.0, t);
    CHECK(psi(poisson, beta, x) ==
          doctest::Approx(success_probability(spec, x)).epsilon(1e-12));
  }
}

TEST_CASE("detection_prob per model kind") {
  OccupancyModelSpec poisson{ModelKind::poisson, CovariateCollection::linear};
  OccupancyModelSpec kr{ModelKind::kery_royle, CovariateCollection::linear};
  OccupancyModelSpec naive{ModelKind::naive, CovariateCollection::linear};
  const Vector w = vec2(1.0, 0.0);
  CHECK(detection_prob(poisson, vec2(0.0, 1.0), w) == doctest::Approx(0.5));
  CHECK(detection_prob(kr, vec2(40.0, 0.0), w) ==
        doctest::Approx(1.0).epsilon(1e-12));
  Vector r1(1);
  r1 << 0.3;
  CHECK(detection_prob(naive, r1, w) == doctest::Approx(0.3));
}

TEST_CASE("site_marginal_loglik examples") {
  Vector r(2);
  r << 0.5, 0.5;
  CHECK(site_marginal_loglik(0.5, r, {0, 0}) ==
        doctest::Approx(std::log(0.625)).epsilon(1e-12));
  CHECK(site_marginal_loglik(0.5, r, {1, 0}) ==
        doctest::Approx(std::log(0.125)).epsilon(1e-12));
  Vector r9(1);
  r9 << 0.9;
  CHECK(site_marginal_loglik(1.0, r9, {1}) ==
        doctest::Approx(std::log(0.9)).epsilon(1e-12));
}

TEST_CASE("marginal likelihood equals enumeration over the indicator") {
  Rng rng(101);
  for (int rep = 0; rep < 100; ++rep) {
    const double psi_i = rng.uniform();
    const int J = 1 + static_cast<int>(rng.integer(3));
    Vector r(J);
    for (int j = 0; j < J; ++j) r[j] = rng.uniform();
    for (int pattern = 0; pattern < (1 << J); ++pattern) {
      std::vector<int> y(static_cast<std::size_t>(J));
      for (int j = 0; j < J; ++j) y[static_cast<std::size_t>(j)] = (pattern >> j) & 1;
      const double expect = oracle::site_marginal_enumeration(psi_i, r, y);
      CHECK(std::exp(site_marginal_loglik(psi_i, r, y)) ==
            doctest::Approx(expect).epsilon(1e-12));
    }
  }
}

TEST_CASE("site_marginal_loglik for all-zero data is monotone") {
  Vector r(2);
  r << 0.4, 0.6;
  double prev = 0.0;
  for (int i = 1; i <= 20; ++i) {
    const double cur = site_marginal_loglik(i / 21.0, r, {0, 0});
    if (i > 1) CHECK(cur < prev);
    prev = cur;
  }
  // and decreasing in each detection probability
  Vector lo(2), hi(2);
  lo << 0.2, 0.5;
  hi << 0.3, 0.5;
  CHECK(site_marginal_loglik(0.5, hi, {0, 0}) <
        site_marginal_loglik(0.5, lo, {0, 0}));
}

TEST_CASE("observation_prob") {
  CHECK(observation_prob(0.5, 0.5) == doctest::Approx(0.25));
  CHECK(observation_prob(1.0, 0.77) == doctest::Approx(0.77));
  CHECK(observation_prob(0.3, 0.0) == doctest::Approx(0.0));
  CHECK_THROWS_AS(observation_prob(1.2, 0.5), DomainError);
  SUBCASE("never exceeds either factor") {
    Rng rng(3);
    for (int i = 0; i < 200; ++i) {
      const double a = rng.uniform(), b = rng.uniform();
      const double p = observation_prob(a, b);
      CHECK(p <= std::min(a, b) + 1e-15);
    }
  }
}

TEST_CASE("abundance_intensity") {
  OccupancyModelSpec poisson{ModelKind::poisson, CovariateCollection::linear};
  OccupancyModelSpec sp{ModelKind::spatial_poisson, CovariateCollection::linear};
  OccupancyModelSpec kr{ModelKind::kery_royle, CovariateCollection::linear};
  const Vector x = vec2(1.0, 0.0);
  CHECK(abundance_intensity(poisson, vec2(0.0, 1.0), x) == doctest::Approx(1.0));
  CHECK(abundance_intensity(poisson, vec2(std::log(5.0), 0.0), x) ==
        doctest::Approx(5.0).epsilon(1e-12));
  CHECK(abundance_intensity(sp, vec2(0.0, 1.0), x, 1.0) ==
        doctest::Approx(std::exp(1.0)).epsilon(1e-12));
  CHECK_THROWS_AS(abundance_intensity(kr, vec2(0.0, 1.0), x), DomainError);
}

TEST_CASE("sample_occ_indicator") {
  Rng rng(8);
  Vector r(2);
  r << 0.5, 0.5;
  SUBCASE("any detection forces occupancy") {
    for (int i = 0; i < 100000; ++i) {
      if (sample_occ_indicator(0.01, r, {0, 1}, rng) != 1) {
        FAIL("forced occupancy violated");
        break;
      }
    }
  }
  SUBCASE("all-zero record follows the posterior odds") {
    // psi = 0.5, two misses at r = 0.5: Pr(o=1 | y=0) = 0.125/0.625 = 0.2
    long ones = 0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
      ones += sample_occ_indicator(0.5, r, {0, 0}, rng);
    }
    CHECK(static_cast<double>(ones) / n == doctest::Approx(0.2).epsilon(0.02));
  }
  SUBCASE("impossible occupancy stays empty") {
    for (int i = 0; i < 1000; ++i) {
      CHECK(sample_occ_indicator(0.0, r, {0, 0}, rng) == 0);
    }
  }
}

TEST_CASE("dataset indexing and subsetting") {
  OccupancyDataset d;
  d.sites = {{"a", 0, 0, 100, 10}, {"b", 1, 0, 200, 20}, {"c", 0, 1, 300, 30}};
  d.visits = {{0, 1, 1, 10, 1}, {0, 2, 0, 11, 2}, {1, 1, 0, 12, 3},
              {2, 1, 1, 13, 4}, {2, 2, 1, 14, 5}};
  d.index_visits();
  CHECK(d.site_visits[0].size() == 2);
  CHECK(d.site_visits[1].size() == 1);
  CHECK(d.any_detection() == std::vector<int>{1, 0, 1});

  const OccupancyDataset sub = d.subset({2, 0});
  CHECK(sub.n_sites() == 2);
  CHECK(sub.sites[0].id == "c");
  CHECK(sub.n_visits() == 4);
  CHECK(sub.visits[0].site == 1);  // first visit row belonged to "a"
  CHECK(sub.site_visits[0].size() == 2);

  SUBCASE("bad visit rows are rejected") {
    OccupancyDataset bad = d;
    bad.visits.push_back({7, 1, 0, 0, 0});
    CHECK_THROWS_AS(bad.index_visits(), IngestError);
    bad = d;
    bad.visits.push_back({0, 3, 2, 0, 0});
    CHECK_THROWS_AS(bad.index_visits(), IngestError);
  }
}
