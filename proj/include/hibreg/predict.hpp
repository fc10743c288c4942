#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hibreg/mcmc.hpp"
#include "hibreg/types.hpp"

namespace hibreg {

/// New locations to predict at: occupancy covariates are required, detection
/// covariates are optional (per-visit observation probabilities are only
/// produced when they are present), coordinates are required for the spatial
/// model.
struct PredictionInput {
  std::vector<std::string> ids;
  CovariateTable occ_covariates;                     // elevation, forest
  std::vector<std::array<double, 2>> coordinates;   // may be empty (non-SP)
  std::optional<CovariateTable> det_covariates;     // date, duration
};

struct PredictionDraws {
  std::vector<std::string> ids;
  Matrix psi;     // draws x sites
  Matrix lambda;  // draws x sites; empty unless a Poisson-based model
  Matrix phat;    // draws x sites; empty unless detection covariates given
};

/// Posterior draws of psi (and lambda, p-hat) at new sites. Applies the
/// stored covariate standardization. For the spatial model, each draw's
/// random effect at a genuinely new location comes from its conditional
/// Gaussian given the fitted field under the jointly triangulated graph;
/// locations that coincide with a training site reuse that site's draws.
/// max_draws > 0 thins the posterior evenly to at most that many draws.
PredictionDraws predict(const FittedModel& model, const PredictionInput& input,
                        std::uint64_t seed = 1, int max_draws = 0);

}  // namespace hibreg
