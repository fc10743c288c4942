#pragma once

#include <string>
#include <vector>

#include "hibreg/mcmc.hpp"
#include "hibreg/types.hpp"

namespace hibreg {

/// Random partition of sites into K folds, sizes differing by at most one.
struct FoldPlan {
  int K = 8;
  std::vector<int> assignment;  // site index -> fold id in [0, K)
  std::uint64_t seed = 0;
};

FoldPlan make_folds(int n_sites, int K, std::uint64_t seed);

/// Mean squared deviation (y - p_hat)^2; the proper score used for model
/// comparison. Throws DomainError on an empty holdout.
double brier_score(const std::vector<int>& y, const Vector& p_hat);

/// Average of the Brier score over posterior draws of the predicted
/// probabilities (rows of phat_draws).
double expected_posterior_score(const Matrix& phat_draws,
                                const std::vector<int>& y);

/// Per-draw predicted observation probabilities for a holdout set.
/// per_site = false: columns are holdout visits with p-hat = psi_i * r_ij.
/// per_site = true:  columns are holdout sites with
///                   p-hat = psi_i (1 - prod_j (1 - r_ij)).
/// For the spatial model, holdout-site random effects are drawn from their
/// CAR conditional given the fitted field (no holdout detections used).
Matrix holdout_phat_draws(const FittedModel& model,
                          const OccupancyDataset& holdout, std::uint64_t seed,
                          bool per_site = false, int max_draws = 0);

/// Holdout outcomes aligned with holdout_phat_draws' columns.
std::vector<int> holdout_outcomes(const OccupancyDataset& holdout,
                                  bool per_site);

struct ScoreReport {
  std::vector<std::string> model_names;
  Matrix scores;  // models x folds, expected posterior Brier score
  int K = 0;
  std::vector<std::string> warnings;
};

struct CvModel {
  std::string name;
  OccupancyModelSpec spec;
};

/// K-fold cross validation with the site as the fold unit: every visit of a
/// held-out site is scored against a model fit on the remaining sites.
ScoreReport cross_validate(const std::vector<CvModel>& models,
                           const OccupancyDataset& data, int K,
                           std::uint64_t seed, const PriorConfig& priors,
                           const SamplerConfig& sampler, bool per_site = false,
                           int threads = 1);

struct CurveSpec {
  DesignTarget target = DesignTarget::occupancy;
  std::string term;        // base covariate name, e.g. "elevation"
  int grid_points = 201;
  double lo = 0.0, hi = 0.0;  // raw units; lo == hi: mean +/- 2 sd default
  bool average_covariates = false;  // otherwise hold others at their means
  bool gradient = false;            // emit d p / d (raw term) instead of p
};

/// Pointwise posterior median and equal-tailed 95% band of the marginal
/// probability curve (or its derivative with respect to the swept raw
/// covariate). Non-swept covariates sit at their training means unless
/// average_covariates computes the curve as the average over the observed
/// covariate rows. The spatial random effect is evaluated at zero.
struct ProbabilityCurve {
  std::string term;
  Vector grid;  // raw covariate values
  Vector median, lower, upper;
  std::vector<std::string> warnings;
};

ProbabilityCurve marginal_curve(const FittedModel& model,
                                const CurveSpec& spec);

}  // namespace hibreg
