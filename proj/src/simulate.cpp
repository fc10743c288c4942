#include "hibreg/simulate.hpp"

#include <cmath>

#include "hibreg/spatial.hpp"

namespace hibreg {

SimulatedData simulate_dataset(const SimulationTruth& truth) {
  const int n = truth.n_sites;
  const int J = truth.n_visits;
  if (n < 3) throw DomainError("simulate: need at least 3 sites");
  if (J < 1) throw DomainError("simulate: need at least 1 visit per site");
  const bool naive = truth.spec.kind == ModelKind::naive;
  const bool spatial = truth.spec.kind == ModelKind::spatial_poisson;

  Rng rng(truth.seed, 0x5117ull);
  SimulatedData out;
  out.data.sites.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    Site& s = out.data.sites[static_cast<std::size_t>(i)];
    s.id = "s" + std::to_string(i + 1);
    s.x_km = truth.coord_span_km * rng.uniform();
    s.y_km = truth.coord_span_km * rng.uniform();
    s.elevation = rng.normal();
    s.forest = rng.normal();
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 1; j <= J; ++j) {
      Visit v;
      v.site = i;
      v.number = j;
      v.date = rng.normal();
      v.duration = rng.normal();
      out.data.visits.push_back(v);
    }
  }
  out.data.index_visits();

  Vector psi_vec(n);
  Vector r_vec(n * J);
  if (naive) {
    if (truth.beta.size() != 1 || truth.alpha.size() != 1) {
      throw DomainError("simulate: naive model takes beta=(psi), alpha=(r)");
    }
    psi_vec.setConstant(truth.beta[0]);
    r_vec.setConstant(truth.alpha[0]);
  } else {
    const DesignMatrix occ =
        build_design(out.data.occupancy_table(), truth.spec.covariates,
                     DesignTarget::occupancy, truth.spec.elev_forest_interaction);
    const DesignMatrix det =
        build_design(out.data.detection_table(), truth.spec.covariates,
                     DesignTarget::detection, false);
    if (truth.beta.size() != occ.cols()) {
      throw DomainError("simulate: beta needs " + std::to_string(occ.cols()) +
                        " entries for this covariate collection");
    }
    if (truth.alpha.size() != det.cols()) {
      throw DomainError("simulate: alpha needs " + std::to_string(det.cols()) +
                        " entries for this covariate collection");
    }
    Vector eta = occ.values() * truth.beta;
    if (spatial) {
      const NeighborhoodGraph graph = delaunay_adjacency(out.data.coordinates());
      if (!graph.is_connected()) {
        throw NumericError("simulate: neighborhood graph disconnected");
      }
      CarDensity car(graph);
      Vector z(n);
      for (int i = 0; i < n; ++i) z[i] = rng.normal();
      out.zeta = car.sample(truth.rho, truth.tau2, z);
      eta += out.zeta;
    }
    for (int i = 0; i < n; ++i) {
      psi_vec[i] = psi_from_eta(truth.spec.kind, eta[i]);
    }
    const Vector eta_det = det.values() * truth.alpha;
    for (int k = 0; k < n * J; ++k) {
      r_vec[k] = detection_from_eta(truth.spec.kind, eta_det[k]);
    }
  }

  out.psi_true = psi_vec;
  out.occupied.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    out.occupied[static_cast<std::size_t>(i)] =
        rng.bernoulli(psi_vec[i]) ? 1 : 0;
  }
  for (auto& v : out.data.visits) {
    const int k = static_cast<int>(&v - out.data.visits.data());
    v.y = out.occupied[static_cast<std::size_t>(v.site)] &&
                  rng.bernoulli(r_vec[k])
              ? 1
              : 0;
  }
  return out;
}

}  // namespace hibreg
