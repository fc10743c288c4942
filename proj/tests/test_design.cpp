#include <doctest.h>

#include <cmath>

#include "hibreg/design.hpp"
#include "hibreg/rng.hpp"

using namespace hibreg;

namespace {

CovariateTable occupancy_table(int n, Rng& rng) {
  Vector elev(n), forest(n);
  for (int i = 0; i < n; ++i) {
    elev[i] = 500.0 + 300.0 * rng.normal();
    forest[i] = 40.0 + 15.0 * rng.normal();
  }
  CovariateTable t;
  t.add("elevation", elev);
  t.add("forest", forest);
  return t;
}

CovariateTable detection_table(int n, Rng& rng) {
  Vector date(n), dur(n);
  for (int i = 0; i < n; ++i) {
    date[i] = 120.0 + 30.0 * rng.normal();
    dur[i] = 4.0 + 1.5 * rng.normal();
  }
  CovariateTable t;
  t.add("date", date);
  t.add("duration", dur);
  return t;
}

}  // namespace

TEST_CASE("covariate collections produce the documented columns") {
  Rng rng(11);
  const auto occ = occupancy_table(40, rng);
  const auto det = detection_table(40, rng);

  SUBCASE("quadratic occupancy has 7 columns") {
    const DesignMatrix d = build_design(occ, CovariateCollection::quadratic,
                                        DesignTarget::occupancy);
    CHECK(d.cols() == 7);
    const auto names = d.term_names();
    CHECK(names[0] == "intercept");
    CHECK(names[1] == "elevation");
    CHECK(names[2] == "forest");
    CHECK(names[3] == "elevation^2");
    CHECK(names[4] == "forest^2");
    CHECK(names[5] == "elevation^2:forest");
    CHECK(names[6] == "elevation:forest^2");
  }
  SUBCASE("linear detection has 3 columns") {
    const DesignMatrix d = build_design(det, CovariateCollection::linear,
                                        DesignTarget::detection);
    CHECK(d.cols() == 3);
    CHECK(d.term_names() == std::vector<std::string>{"intercept", "date",
                                                     "duration"});
  }
  SUBCASE("quadratic detection adds duration^2 only") {
    const DesignMatrix d = build_design(det, CovariateCollection::quadratic,
                                        DesignTarget::detection);
    CHECK(d.cols() == 4);
    CHECK(d.term_names()[3] == "duration^2");
  }
  SUBCASE("linear occupancy has 3 columns") {
    const DesignMatrix d = build_design(occ, CovariateCollection::linear,
                                        DesignTarget::occupancy);
    CHECK(d.cols() == 3);
  }
  SUBCASE("opt-in plain interaction column") {
    const DesignMatrix d = build_design(occ, CovariateCollection::quadratic,
                                        DesignTarget::occupancy, true);
    CHECK(d.cols() == 8);
    CHECK(d.term_names()[7] == "elevation:forest");
  }
  SUBCASE("missing column raises an ingestion error") {
    CovariateTable t;
    t.add("elevation", Vector::Ones(5));
    CHECK_THROWS_AS(
        build_design(t, CovariateCollection::linear, DesignTarget::occupancy),
        IngestError);
  }
}

TEST_CASE("standardization and product columns") {
  SUBCASE("standardized elevation 2, forest -1 gives elevation^2:forest -4") {
    const DesignMatrix d = DesignMatrix::from_schema(
        {"elevation", "forest"}, {{0.0, 1.0}, {0.0, 1.0}},
        {{"intercept", {}},
         {"elevation", {{0, 1}}},
         {"forest", {{1, 1}}},
         {"elevation^2", {{0, 2}}},
         {"forest^2", {{1, 2}}},
         {"elevation^2:forest", {{0, 2}, {1, 1}}},
         {"elevation:forest^2", {{0, 1}, {1, 2}}}});
    Vector raw(2);
    raw << 2.0, -1.0;
    const Vector row = d.row_from_raw(raw);
    CHECK(row[0] == 1.0);
    CHECK(row[5] == doctest::Approx(-4.0));   // 2^2 * (-1)
    CHECK(row[6] == doctest::Approx(2.0));    // 2 * (-1)^2
  }
  SUBCASE("base columns are centered and scaled; products are exact") {
    Rng rng(12);
    const auto occ = occupancy_table(60, rng);
    const DesignMatrix d = build_design(occ, CovariateCollection::quadratic,
                                        DesignTarget::occupancy);
    const Matrix& B = d.base_values();
    CHECK(B.col(0).mean() == doctest::Approx(0.0).epsilon(1e-12));
    const double sd =
        std::sqrt(B.col(0).squaredNorm() / (B.rows() - 1.0));
    CHECK(sd == doctest::Approx(1.0).epsilon(1e-12));
    for (Eigen::Index i = 0; i < B.rows(); ++i) {
      CHECK(d.values()(i, 5) ==
            doctest::Approx(B(i, 0) * B(i, 0) * B(i, 1)).epsilon(1e-14));
    }
  }
  SUBCASE("constant covariate cannot be standardized") {
    CovariateTable t;
    t.add("elevation", Vector::Ones(5));
    t.add("forest", Vector::Ones(5));
    CHECK_THROWS_AS(
        build_design(t, CovariateCollection::linear, DesignTarget::occupancy),
        IngestError);
  }
}

TEST_CASE("design row evaluation and analytic eta gradient") {
  Rng rng(13);
  const auto occ = occupancy_table(30, rng);
  const DesignMatrix d = build_design(occ, CovariateCollection::quadratic,
                                      DesignTarget::occupancy, true);
  Vector beta(d.cols());
  for (Eigen::Index j = 0; j < beta.size(); ++j) beta[j] = rng.normal();
  const double h = 1e-6;
  for (int rep = 0; rep < 20; ++rep) {
    Vector bases(2);
    bases << rng.normal(), rng.normal();
    for (int b = 0; b < 2; ++b) {
      Vector up = bases, dn = bases;
      up[b] += h;
      dn[b] -= h;
      const double fd = (d.eta(up, beta) - d.eta(dn, beta)) / (2.0 * h);
      CHECK(d.deta_dbase(b, bases, beta) ==
            doctest::Approx(fd).epsilon(1e-6));
    }
  }
}
