#pragma once

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hibreg/design.hpp"
#include "hibreg/rng.hpp"
#include "hibreg/types.hpp"

namespace hibreg {

struct Site {
  std::string id;
  double x_km = 0.0;
  double y_km = 0.0;
  double elevation = 0.0;  // meters
  double forest = 0.0;     // percent cover, [0, 100]
};

struct Visit {
  int site = -1;    // index into sites
  int number = 1;   // visit index within the site
  int y = 0;        // detection (1) / nondetection (0)
  double date = 0.0;      // day of year
  double duration = 0.0;  // hours
};

/// Detection/nondetection survey data: site-level covariates and coordinates
/// plus visit-level detection records. Missing visits are simply absent; the
/// per-site visit lists are ragged.
struct OccupancyDataset {
  std::vector<Site> sites;
  std::vector<Visit> visits;
  std::vector<std::vector<int>> site_visits;  // visit row indices per site

  int n_sites() const { return static_cast<int>(sites.size()); }
  int n_visits() const { return static_cast<int>(visits.size()); }

  /// Rebuild site_visits from the visit rows (validates site indices).
  void index_visits();

  CovariateTable occupancy_table() const;  // elevation, forest per site
  CovariateTable detection_table() const;  // date, duration per visit row
  std::vector<std::array<double, 2>> coordinates() const;

  /// 1 when the site has at least one detection.
  std::vector<int> any_detection() const;

  /// Subset by site indices (visits re-pointed; order preserved).
  OccupancyDataset subset(const std::vector<int>& site_idx) const;
};

enum class ModelKind { naive, kery_royle, poisson, spatial_poisson };

std::string to_string(ModelKind kind);
ModelKind parse_model_kind(const std::string& s);

/// Parse a combined model token: naive, krl, krq, pl, pq, spl, spq (also the
/// long forms "kr", "poisson", "spatial-poisson" with a separate collection).
std::pair<ModelKind, CovariateCollection> parse_model_token(
    const std::string& s);
std::string model_token(ModelKind kind, CovariateCollection c);

struct OccupancyModelSpec {
  ModelKind kind = ModelKind::poisson;
  CovariateCollection covariates = CovariateCollection::linear;
  bool elev_forest_interaction = false;
};

/// Occupancy probability psi for one site.
///   naive:            constant (beta = (psi))
///   kery_royle:       logistic CDF at x'beta
///   poisson:          1 - exp(-e^{x'beta})
///   spatial_poisson:  1 - exp(-e^{x'beta + zeta})
/// Throws DomainError when the spatial model is evaluated without zeta.
double psi(const OccupancyModelSpec& model, const Vector& beta,
           const Vector& x, std::optional<double> zeta = std::nullopt);

/// Conditional detection probability r for one visit.
///   naive:                     constant (alpha = (r))
///   kery_royle:                logistic CDF at w'alpha
///   poisson / spatial_poisson: Phi(w'alpha)
double detection_prob(const OccupancyModelSpec& model, const Vector& alpha,
                      const Vector& w);

/// Scalar link helpers used by the samplers (eta already includes zeta).
double psi_from_eta(ModelKind kind, double eta);
double detection_from_eta(ModelKind kind, double eta);

/// d psi / d eta and d r / d eta for the model-specific links.
double psi_deriv_from_eta(ModelKind kind, double eta);
double detection_deriv_from_eta(ModelKind kind, double eta);

/// Site log-likelihood with the latent occupancy indicator marginalized out:
/// any detection  -> log psi + sum_j [y log r + (1-y) log(1-r)]
/// no detections  -> log(psi * prod_j (1-r) + (1-psi)).
double site_marginal_loglik(double psi_i, const Vector& r,
                            const std::vector<int>& y);

/// Per-visit marginal probability of a detection, psi * r.
double observation_prob(double psi_i, double r_ij);

/// Expected abundance lambda = e^{x'beta (+ zeta)}. Only meaningful for the
/// Poisson-based models; throws DomainError otherwise.
double abundance_intensity(const OccupancyModelSpec& model, const Vector& beta,
                           const Vector& x,
                           std::optional<double> zeta = std::nullopt);

/// Draw the latent occupancy indicator given data: forced to 1 whenever any
/// visit detected the species, otherwise Bernoulli with posterior probability
/// psi prod(1-r) / (psi prod(1-r) + 1 - psi).
int sample_occ_indicator(double psi_i, const Vector& r,
                         const std::vector<int>& y, Rng& rng);

}  // namespace hibreg
