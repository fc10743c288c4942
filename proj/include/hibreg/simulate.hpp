#pragma once

#include <cstdint>

#include "hibreg/mcmc.hpp"
#include "hibreg/occupancy.hpp"
#include "hibreg/types.hpp"

namespace hibreg {

/// Ground truth for a synthetic survey. Coefficients apply to the design
/// built from the simulated raw covariates (standardized in the usual way),
/// so a subsequent fit on the emitted dataset estimates exactly these values.
/// The naive model takes beta = (psi) and alpha = (r).
struct SimulationTruth {
  OccupancyModelSpec spec;
  Vector beta;
  Vector alpha;
  double rho = 0.9;
  double tau2 = 1.0;
  int n_sites = 265;
  int n_visits = 3;
  double coord_span_km = 100.0;
  std::uint64_t seed = 1;
};

struct SimulatedData {
  OccupancyDataset data;
  Vector zeta;      // spatial model only
  Vector psi_true;  // per site
  std::vector<int> occupied;
};

SimulatedData simulate_dataset(const SimulationTruth& truth);

}  // namespace hibreg
