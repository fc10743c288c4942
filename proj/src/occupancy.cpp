#include "hibreg/occupancy.hpp"

#include <cmath>

#include "hibreg/normal.hpp"

namespace hibreg {

void OccupancyDataset::index_visits() {
  site_visits.assign(sites.size(), {});
  for (std::size_t k = 0; k < visits.size(); ++k) {
    const Visit& v = visits[k];
    if (v.site < 0 || v.site >= n_sites()) {
      throw IngestError("visit references unknown site index");
    }
    if (v.y != 0 && v.y != 1) {
      throw IngestError("visit outcome must be 0 or 1");
    }
    site_visits[static_cast<std::size_t>(v.site)].push_back(
        static_cast<int>(k));
  }
}

CovariateTable OccupancyDataset::occupancy_table() const {
  Vector elev(n_sites()), forest(n_sites());
  for (int i = 0; i < n_sites(); ++i) {
    elev[i] = sites[static_cast<std::size_t>(i)].elevation;
    forest[i] = sites[static_cast<std::size_t>(i)].forest;
  }
  CovariateTable t;
  t.add("elevation", std::move(elev));
  t.add("forest", std::move(forest));
  return t;
}

CovariateTable OccupancyDataset::detection_table() const {
  Vector date(n_visits()), duration(n_visits());
  for (int k = 0; k < n_visits(); ++k) {
    date[k] = visits[static_cast<std::size_t>(k)].date;
    duration[k] = visits[static_cast<std::size_t>(k)].duration;
  }
  CovariateTable t;
  t.add("date", std::move(date));
  t.add("duration", std::move(duration));
  return t;
}

std::vector<std::array<double, 2>> OccupancyDataset::coordinates() const {
  std::vector<std::array<double, 2>> c;
  c.reserve(sites.size());
  for (const auto& s : sites) c.push_back({s.x_km, s.y_km});
  return c;
}

std::vector<int> OccupancyDataset::any_detection() const {
  std::vector<int> out(sites.size(), 0);
  for (const auto& v : visits) {
    if (v.y == 1) out[static_cast<std::size_t>(v.site)] = 1;
  }
  return out;
}

OccupancyDataset OccupancyDataset::subset(
    const std::vector<int>& site_idx) const {
  OccupancyDataset out;
  std::vector<int> remap(sites.size(), -1);
  for (std::size_t k = 0; k < site_idx.size(); ++k) {
    const int i = site_idx[k];
    if (i < 0 || i >= n_sites()) throw DomainError("subset: bad site index");
    remap[static_cast<std::size_t>(i)] = static_cast<int>(k);
    out.sites.push_back(sites[static_cast<std::size_t>(i)]);
  }
  for (const auto& v : visits) {
    const int m = remap[static_cast<std::size_t>(v.site)];
    if (m >= 0) {
      Visit w = v;
      w.site = m;
      out.visits.push_back(w);
    }
  }
  out.index_visits();
  return out;
}

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::naive: return "naive";
    case ModelKind::kery_royle: return "kr";
    case ModelKind::poisson: return "poisson";
    case ModelKind::spatial_poisson: return "spatial-poisson";
  }
  return "unknown";
}

ModelKind parse_model_kind(const std::string& s) {
  if (s == "naive" || s == "n") return ModelKind::naive;
  if (s == "kr" || s == "kery-royle") return ModelKind::kery_royle;
  if (s == "poisson" || s == "p") return ModelKind::poisson;
  if (s == "spatial-poisson" || s == "sp" || s == "spatial") {
    return ModelKind::spatial_poisson;
  }
  throw ConfigError("unknown model kind: " + s);
}

std::pair<ModelKind, CovariateCollection> parse_model_token(
    const std::string& s) {
  if (s == "naive" || s == "n") {
    return {ModelKind::naive, CovariateCollection::linear};
  }
  if (s == "krl") return {ModelKind::kery_royle, CovariateCollection::linear};
  if (s == "krq") {
    return {ModelKind::kery_royle, CovariateCollection::quadratic};
  }
  if (s == "pl") return {ModelKind::poisson, CovariateCollection::linear};
  if (s == "pq") return {ModelKind::poisson, CovariateCollection::quadratic};
  if (s == "spl") {
    return {ModelKind::spatial_poisson, CovariateCollection::linear};
  }
  if (s == "spq") {
    return {ModelKind::spatial_poisson, CovariateCollection::quadratic};
  }
  throw ConfigError("unknown model token: " + s +
                    " (expected naive|krl|krq|pl|pq|spl|spq)");
}

std::string model_token(ModelKind kind, CovariateCollection c) {
  if (kind == ModelKind::naive) return "naive";
  const std::string suffix = c == CovariateCollection::linear ? "l" : "q";
  switch (kind) {
    case ModelKind::kery_royle: return "kr" + suffix;
    case ModelKind::poisson: return "p" + suffix;
    case ModelKind::spatial_poisson: return "sp" + suffix;
    default: return "naive";
  }
}

double psi_from_eta(ModelKind kind, double eta) {
  switch (kind) {
    case ModelKind::kery_royle:
      return logistic_cdf(eta);
    case ModelKind::poisson:
    case ModelKind::spatial_poisson:
      return -std::expm1(-std::exp(eta));
    case ModelKind::naive:
      break;
  }
  throw DomainError("psi_from_eta: naive model has no systematic component");
}

double detection_from_eta(ModelKind kind, double eta) {
  switch (kind) {
    case ModelKind::kery_royle:
      return logistic_cdf(eta);
    case ModelKind::poisson:
    case ModelKind::spatial_poisson:
      return norm_cdf(eta);
    case ModelKind::naive:
      break;
  }
  throw DomainError(
      "detection_from_eta: naive model has no systematic component");
}

double psi_deriv_from_eta(ModelKind kind, double eta) {
  switch (kind) {
    case ModelKind::kery_royle: {
      const double p = logistic_cdf(eta);
      return p * (1.0 - p);
    }
    case ModelKind::poisson:
    case ModelKind::spatial_poisson:
      return std::exp(eta - std::exp(eta));
    case ModelKind::naive:
      break;
  }
  throw DomainError("psi_deriv_from_eta: naive model has no covariates");
}

double detection_deriv_from_eta(ModelKind kind, double eta) {
  switch (kind) {
    case ModelKind::kery_royle: {
      const double p = logistic_cdf(eta);
      return p * (1.0 - p);
    }
    case ModelKind::poisson:
    case ModelKind::spatial_poisson:
      return norm_pdf(eta);
    case ModelKind::naive:
      break;
  }
  throw DomainError("detection_deriv_from_eta: naive model has no covariates");
}

double psi(const OccupancyModelSpec& model, const Vector& beta, const Vector& x,
           std::optional<double> zeta) {
  if (model.kind == ModelKind::naive) {
    if (beta.size() != 1 || !(beta[0] >= 0.0 && beta[0] <= 1.0)) {
      throw DomainError("psi: naive model takes beta = (psi) in [0, 1]");
    }
    return beta[0];
  }
  if (beta.size() != x.size()) {
    throw DomainError("psi: beta and x lengths differ");
  }
  double eta = x.dot(beta);
  if (model.kind == ModelKind::spatial_poisson) {
    if (!zeta.has_value()) {
      throw DomainError("psi: spatial model requires a zeta value");
    }
    eta += *zeta;
  }
  return psi_from_eta(model.kind, eta);
}

double detection_prob(const OccupancyModelSpec& model, const Vector& alpha,
                      const Vector& w) {
  if (model.kind == ModelKind::naive) {
    if (alpha.size() != 1 || !(alpha[0] >= 0.0 && alpha[0] <= 1.0)) {
      throw DomainError("detection_prob: naive model takes alpha = (r)");
    }
    return alpha[0];
  }
  if (alpha.size() != w.size()) {
    throw DomainError("detection_prob: alpha and w lengths differ");
  }
  return detection_from_eta(model.kind, w.dot(alpha));
}

double site_marginal_loglik(double psi_i, const Vector& r,
                            const std::vector<int>& y) {
  if (static_cast<Eigen::Index>(y.size()) != r.size()) {
    throw DomainError("site_marginal_loglik: r and y lengths differ");
  }
  bool any = false;
  for (int yi : y) {
    if (yi == 1) {
      any = true;
      break;
    }
  }
  const double p = clamp_probability(psi_i);
  if (any) {
    double ll = std::log(p);
    for (Eigen::Index j = 0; j < r.size(); ++j) {
      const double rj = clamp_probability(r[j]);
      ll += y[static_cast<std::size_t>(j)] ? std::log(rj) : std::log1p(-rj);
    }
    return ll;
  }
  double prod = 1.0;
  for (Eigen::Index j = 0; j < r.size(); ++j) {
    prod *= 1.0 - clamp_probability(r[j]);
  }
  return std::log(clamp_probability(p * prod + (1.0 - p)));
}

double observation_prob(double psi_i, double r_ij) {
  if (!(psi_i >= 0.0 && psi_i <= 1.0) || !(r_ij >= 0.0 && r_ij <= 1.0)) {
    throw DomainError("observation_prob: arguments must lie in [0, 1]");
  }
  return psi_i * r_ij;
}

double abundance_intensity(const OccupancyModelSpec& model, const Vector& beta,
                           const Vector& x, std::optional<double> zeta) {
  if (model.kind != ModelKind::poisson &&
      model.kind != ModelKind::spatial_poisson) {
    throw DomainError(
        "abundance_intensity: only the Poisson-based models have lambda");
  }
  if (beta.size() != x.size()) {
    throw DomainError("abundance_intensity: beta and x lengths differ");
  }
  double eta = x.dot(beta);
  if (model.kind == ModelKind::spatial_poisson && zeta.has_value()) {
    eta += *zeta;
  }
  return std::exp(eta);
}

int sample_occ_indicator(double psi_i, const Vector& r,
                         const std::vector<int>& y, Rng& rng) {
  if (static_cast<Eigen::Index>(y.size()) != r.size()) {
    throw DomainError("sample_occ_indicator: r and y lengths differ");
  }
  for (int yi : y) {
    if (yi == 1) return 1;
  }
  double prod = 1.0;
  for (Eigen::Index j = 0; j < r.size(); ++j) {
    prod *= 1.0 - clamp_probability(r[j]);
  }
  const double numer = psi_i * prod;
  const double denom = numer + (1.0 - psi_i);
  if (denom <= 0.0) return 1;  // psi = 1 and all r = 1: occupied almost surely
  return rng.bernoulli(numer / denom) ? 1 : 0;
}

}  // namespace hibreg
