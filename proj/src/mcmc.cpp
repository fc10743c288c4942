#include "hibreg/mcmc.hpp"

#include <cmath>
#include <future>
#include <numeric>

#include "hibreg/normal.hpp"

namespace hibreg {

void PriorConfig::validate() const {
  if (!(beta_sd > 0.0) || !(alpha_sd > 0.0)) {
    throw ConfigError("prior: coefficient sds must be positive");
  }
  if (!(psi_a > 0.0 && psi_b > 0.0 && r_a > 0.0 && r_b > 0.0)) {
    throw ConfigError("prior: Beta hyperparameters must be positive");
  }
  if (!(rho_min >= 0.0 && rho_min < 1.0)) {
    throw ConfigError("prior: rho_min must lie in [0, 1)");
  }
  if (!(tau2_shape > 0.0 && tau2_rate > 0.0)) {
    throw ConfigError("prior: tau2 Gamma hyperparameters must be positive");
  }
}

void SamplerConfig::validate() const {
  if (n_iter <= 0 || n_burnin < 0 || n_burnin >= n_iter) {
    throw ConfigError("sampler: need 0 <= n_burnin < n_iter");
  }
  if (n_chains < 1) throw ConfigError("sampler: n_chains must be >= 1");
  if (thin < 1) throw ConfigError("sampler: thin must be >= 1");
  if (!(target_accept_scalar > 0.0 && target_accept_scalar < 1.0) ||
      !(target_accept_block > 0.0 && target_accept_block < 1.0)) {
    throw ConfigError("sampler: target acceptance rates must lie in (0, 1)");
  }
}

int PosteriorSamples::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return static_cast<int>(i);
  }
  return -1;
}

Vector PosteriorSamples::stacked(int param) const {
  Vector out(static_cast<Eigen::Index>(n_chains()) * n_kept());
  Eigen::Index at = 0;
  for (const auto& c : chains) {
    out.segment(at, c.rows()) = c.col(param);
    at += c.rows();
  }
  return out;
}

double truncated_normal_draw(double mean, bool positive, Rng& rng) {
  if (!std::isfinite(mean)) {
    throw DomainError("truncated_normal_draw: mean must be finite");
  }
  if (!positive) return -truncated_normal_draw(-mean, true, rng);
  const double a = -mean;  // standardized lower bound
  if (a <= 5.0) {
    const double phi_a = norm_cdf(a);
    double p = phi_a + rng.uniform() * (1.0 - phi_a);
    p = std::min(p, 1.0 - 1e-16);
    return mean + norm_quantile(std::max(p, 1e-300));
  }
  // Far tail: exponential rejection (proposal rate at the optimal value).
  const double alpha = 0.5 * (a + std::sqrt(a * a + 4.0));
  for (;;) {
    const double x = a + rng.exponential(alpha);
    const double d = x - alpha;
    if (std::log(rng.uniform()) <= -0.5 * d * d) return mean + x;
  }
}

Vector conjugate_gaussian_coeff_update(const Vector& z, const Matrix& X,
                                       double prior_sd, Rng& rng) {
  if (z.size() != X.rows()) {
    throw DomainError("conjugate_gaussian_coeff_update: length mismatch");
  }
  if (!(prior_sd > 0.0)) {
    throw DomainError("conjugate_gaussian_coeff_update: prior sd must be > 0");
  }
  const Eigen::Index q = X.cols();
  Matrix precision = X.transpose() * X;
  precision.diagonal().array() += 1.0 / (prior_sd * prior_sd);
  Eigen::LLT<Matrix> llt(precision);
  const Vector mean = llt.solve(X.transpose() * z);
  Vector eps(q);
  for (Eigen::Index i = 0; i < q; ++i) eps[i] = rng.normal();
  // precision = L L', so L'^{-1} eps has covariance precision^{-1}.
  return mean + llt.matrixU().solve(eps);
}

void FittedModel::rebuild_indices() {
  beta_index.clear();
  alpha_index.clear();
  zeta_index.clear();
  rho_index = tau2_index = psi_index = r_index = -1;
  for (int i = 0; i < samples.n_params(); ++i) {
    const std::string& n = samples.names[static_cast<std::size_t>(i)];
    if (n.rfind("beta[", 0) == 0) beta_index.push_back(i);
    else if (n.rfind("alpha[", 0) == 0) alpha_index.push_back(i);
    else if (n.rfind("zeta[", 0) == 0) zeta_index.push_back(i);
    else if (n == "rho") rho_index = i;
    else if (n == "tau2_car") tau2_index = i;
    else if (n == "psi") psi_index = i;
    else if (n == "r") r_index = i;
  }
}

Vector FittedModel::beta_draw(int chain, int it) const {
  Vector b(static_cast<Eigen::Index>(beta_index.size()));
  for (std::size_t k = 0; k < beta_index.size(); ++k) {
    b[static_cast<Eigen::Index>(k)] =
        samples.chains[static_cast<std::size_t>(chain)](it, beta_index[k]);
  }
  return b;
}

Vector FittedModel::alpha_draw(int chain, int it) const {
  Vector a(static_cast<Eigen::Index>(alpha_index.size()));
  for (std::size_t k = 0; k < alpha_index.size(); ++k) {
    a[static_cast<Eigen::Index>(k)] =
        samples.chains[static_cast<std::size_t>(chain)](it, alpha_index[k]);
  }
  return a;
}

namespace {

// Immutable per-fit quantities shared by all chains.
struct FitInputs {
  const OccupancyModelSpec* spec;
  const OccupancyDataset* data;
  const PriorConfig* priors;
  const SamplerConfig* cfg;
  Matrix X;  // occupancy design (non-naive)
  Matrix W;  // detection design rows per visit (non-naive)
  std::vector<int> any_det;
  const NeighborhoodGraph* graph = nullptr;
  std::vector<std::vector<int>> neighbors;  // spatial only
  std::vector<std::string> names;
  int n_params = 0;
};

struct ChainOutput {
  Matrix draws;
  std::map<std::string, double> acceptance;
  std::map<std::string, std::vector<double>> scale_trace;
};

class ChainRunner {
 public:
  ChainRunner(const FitInputs& in, int chain_id)
      : in_(in),
        rng_(in.cfg->seed, static_cast<std::uint64_t>(chain_id)),
        chain_id_(chain_id) {
    const int n = in_.data->n_sites();
    const int m = in_.data->n_visits();
    naive_ = in_.spec->kind == ModelKind::naive;
    spatial_ = in_.spec->kind == ModelKind::spatial_poisson;
    o_ = in_.data->any_detection();
    if (!naive_) {
      beta_ = Vector::Zero(in_.X.cols());
      alpha_ = Vector::Zero(in_.W.cols());
      eta_occ_ = Vector::Zero(n);
      eta_det_ = Vector::Zero(m);
      r_ = Vector::Constant(m, detection_from_eta(in_.spec->kind, 0.0));
      beta_scale_ = AdaptiveScale(0.1, in_.cfg->target_accept_block);
      alpha_scale_ = AdaptiveScale(0.1, in_.cfg->target_accept_block);
    }
    if (spatial_) {
      zeta_ = Vector::Zero(n);
      rho_ = (in_.priors->rho_min < 0.5) ? 0.5
                                         : 0.5 * (in_.priors->rho_min + 1.0);
      tau2_ = 1.0;
      car_.emplace(*in_.graph);
      zeta_scales_.assign(static_cast<std::size_t>(n),
                          AdaptiveScale(0.5, in_.cfg->target_accept_scalar));
      rho_scale_ = AdaptiveScale(0.5, in_.cfg->target_accept_scalar);
    }
    refresh_site_caches();
    refresh_psi();
    if (!std::isfinite(total_marginal_loglik())) {
      throw NumericError("fit: non-finite likelihood at initialization");
    }
  }

  ChainOutput run() {
    const auto& cfg = *in_.cfg;
    ChainOutput out;
    out.draws.resize(cfg.n_kept(), in_.n_params);
    int kept = 0;
    for (int iter = 0; iter < cfg.n_iter; ++iter) {
      if (iter == cfg.n_burnin) freeze_adaptation();
      const bool tally = iter >= cfg.n_burnin;
      if (naive_) {
        update_o();
        update_naive_rates();
      } else {
        update_beta(tally);
        if (spatial_) {
          update_zeta(tally);
          update_rho(tally);
          update_tau2();
        }
        update_o();
        update_alpha(tally);
      }
      if (cfg.record_scale_trace && chain_id_ == 0 && !naive_) {
        out.scale_trace["beta"].push_back(beta_scale_.scale());
        if (spatial_) {
          out.scale_trace["rho"].push_back(rho_scale_.scale());
          out.scale_trace["zeta[0]"].push_back(zeta_scales_[0].scale());
        }
      }
      if (tally && (iter - cfg.n_burnin) % cfg.thin == 0) {
        record(out.draws, kept++);
      }
    }
    finalize_acceptance(out);
    return out;
  }

 private:
  double beta_log_prior(const Vector& b) const {
    const double s = in_.priors->beta_sd;
    return -0.5 * b.squaredNorm() / (s * s);
  }

  double alpha_log_prior(const Vector& a) const {
    const double s = in_.priors->alpha_sd;
    return -0.5 * a.squaredNorm() / (s * s);
  }

  // Per-site detection caches for the current r: the log-likelihood of the
  // visit record given occupancy, and prod_j (1 - r_ij).
  void refresh_site_caches() {
    const int n = in_.data->n_sites();
    det_ll_occ_.assign(static_cast<std::size_t>(n), 0.0);
    prod_1mr_.assign(static_cast<std::size_t>(n), 1.0);
    if (naive_) {
      for (int i = 0; i < n; ++i) {
        double ll = 0.0, prod = 1.0;
        for (int k : in_.data->site_visits[static_cast<std::size_t>(i)]) {
          const int y = in_.data->visits[static_cast<std::size_t>(k)].y;
          const double r = clamp_probability(r_naive_);
          ll += y ? std::log(r) : std::log1p(-r);
          prod *= 1.0 - r;
        }
        det_ll_occ_[static_cast<std::size_t>(i)] = ll;
        prod_1mr_[static_cast<std::size_t>(i)] = prod;
      }
      return;
    }
    for (int i = 0; i < n; ++i) {
      double ll = 0.0, prod = 1.0;
      for (int k : in_.data->site_visits[static_cast<std::size_t>(i)]) {
        const int y = in_.data->visits[static_cast<std::size_t>(k)].y;
        const double r = clamp_probability(r_[k]);
        ll += y ? std::log(r) : std::log1p(-r);
        prod *= 1.0 - r;
      }
      det_ll_occ_[static_cast<std::size_t>(i)] = ll;
      prod_1mr_[static_cast<std::size_t>(i)] = prod;
    }
  }

  void refresh_psi() {
    const int n = in_.data->n_sites();
    psi_.resize(n);
    if (naive_) {
      psi_.setConstant(psi_naive_);
      return;
    }
    for (int i = 0; i < n; ++i) {
      const double eta = eta_occ_[i] + (spatial_ ? zeta_[i] : 0.0);
      psi_[i] = psi_from_eta(in_.spec->kind, eta);
    }
  }

  double site_marginal(int i, double psi_i) const {
    const double p = clamp_probability(psi_i);
    if (in_.any_det[static_cast<std::size_t>(i)]) {
      return std::log(p) + det_ll_occ_[static_cast<std::size_t>(i)];
    }
    return std::log(clamp_probability(
        p * prod_1mr_[static_cast<std::size_t>(i)] + (1.0 - p)));
  }

  double total_marginal_loglik() const {
    double ll = 0.0;
    for (int i = 0; i < in_.data->n_sites(); ++i) ll += site_marginal(i, psi_[i]);
    return ll;
  }

  void update_beta(bool tally) {
    const Eigen::Index p = beta_.size();
    Vector prop = beta_;
    const double s = beta_scale_.scale();
    for (Eigen::Index j = 0; j < p; ++j) prop[j] += s * rng_.normal();
    const Vector eta_prop = in_.X * prop;
    double ll_prop = 0.0, ll_cur = 0.0;
    for (int i = 0; i < in_.data->n_sites(); ++i) {
      const double z = spatial_ ? zeta_[i] : 0.0;
      ll_prop += site_marginal(i, psi_from_eta(in_.spec->kind, eta_prop[i] + z));
      ll_cur += site_marginal(i, psi_[i]);
    }
    const double log_ratio =
        ll_prop + beta_log_prior(prop) - ll_cur - beta_log_prior(beta_);
    const double ap = std::min(1.0, std::exp(log_ratio));
    if (rng_.uniform() < ap) {
      beta_ = prop;
      eta_occ_ = eta_prop;
      refresh_psi();
      if (tally) ++accept_["beta"];
    }
    if (tally) ++count_["beta"];
    beta_scale_.observe(ap);
  }

  void update_zeta(bool tally) {
    const double tau2 = tau2_;
    int accepted = 0;
    const int n = in_.data->n_sites();
    for (int i = 0; i < n; ++i) {
      auto& sc = zeta_scales_[static_cast<std::size_t>(i)];
      const double cur = zeta_[i];
      const double prop = cur + sc.scale() * rng_.normal();
      double nb_sum = 0.0;
      for (int j : in_.neighbors[static_cast<std::size_t>(i)]) nb_sum += zeta_[j];
      const double deg =
          static_cast<double>(in_.neighbors[static_cast<std::size_t>(i)].size());
      // CAR full conditional: zeta_i | zeta_-i ~ N(rho*sum/deg, 1/(tau2*deg))
      const double dprior = -0.5 * tau2 *
                            (deg * (prop * prop - cur * cur) -
                             2.0 * rho_ * (prop - cur) * nb_sum);
      const double psi_prop = psi_from_eta(in_.spec->kind, eta_occ_[i] + prop);
      const double dll = site_marginal(i, psi_prop) - site_marginal(i, psi_[i]);
      const double ap = std::min(1.0, std::exp(dll + dprior));
      if (rng_.uniform() < ap) {
        zeta_[i] = prop;
        psi_[i] = psi_prop;
        ++accepted;
      }
      sc.observe(ap);
    }
    if (tally) {
      accept_["zeta"] += static_cast<double>(accepted) / n;
      ++count_["zeta"];
    }
  }

  // rho is updated on the transformed scale theta with
  // rho = rho_min + (1 - rho_min) * logistic(theta); the Jacobian enters the
  // acceptance ratio. A Cholesky failure rejects the proposal.
  void update_rho(bool tally) {
    const double rho_min = in_.priors->rho_min;
    const double width = 1.0 - rho_min;
    const double u = (rho_ - rho_min) / width;
    const double theta = std::log(u / (1.0 - u));
    const double theta_prop = theta + rho_scale_.scale() * rng_.normal();
    const double u_prop = logistic_cdf(theta_prop);
    const double rho_prop = rho_min + width * u_prop;
    double ap = 0.0;
    try {
      const double cur_target = 0.5 * car_->base_logdet(rho_) -
                                0.5 * tau2_ * car_->quad_form(zeta_, rho_) +
                                std::log(u * (1.0 - u));
      const double prop_target =
          0.5 * car_->base_logdet(rho_prop) -
          0.5 * tau2_ * car_->quad_form(zeta_, rho_prop) +
          std::log(u_prop * (1.0 - u_prop));
      ap = std::min(1.0, std::exp(prop_target - cur_target));
    } catch (const NumericError&) {
      ap = 0.0;  // reject and continue
    }
    if (ap > 0.0 && rng_.uniform() < ap) {
      rho_ = rho_prop;
      if (tally) ++accept_["rho"];
    }
    if (tally) ++count_["rho"];
    rho_scale_.observe(ap);
  }

  void update_tau2() {
    const double shape =
        in_.priors->tau2_shape + 0.5 * in_.data->n_sites();
    const double rate =
        in_.priors->tau2_rate + 0.5 * car_->quad_form(zeta_, rho_);
    tau2_ = rng_.gamma(shape, rate);
  }

  void update_o() {
    for (int i = 0; i < in_.data->n_sites(); ++i) {
      if (in_.any_det[static_cast<std::size_t>(i)]) {
        o_[static_cast<std::size_t>(i)] = 1;
        continue;
      }
      const double numer = psi_[i] * prod_1mr_[static_cast<std::size_t>(i)];
      const double denom = numer + (1.0 - psi_[i]);
      const double p = denom > 0.0 ? numer / denom : 1.0;
      o_[static_cast<std::size_t>(i)] = rng_.bernoulli(p) ? 1 : 0;
    }
  }

  void update_alpha(bool tally) {
    if (in_.spec->kind == ModelKind::kery_royle) {
      update_alpha_logistic(tally);
    } else {
      update_alpha_probit();
    }
    eta_det_ = in_.W * alpha_;
    for (int k = 0; k < in_.data->n_visits(); ++k) {
      r_[k] = detection_from_eta(in_.spec->kind, eta_det_[k]);
    }
    refresh_site_caches();
  }

  // Albert-Chib: latent truncated normals for the visits at occupied sites,
  // then a conjugate Gaussian draw for alpha.
  void update_alpha_probit() {
    const Eigen::Index q = alpha_.size();
    Matrix precision = Matrix::Zero(q, q);
    Vector b = Vector::Zero(q);
    for (int k = 0; k < in_.data->n_visits(); ++k) {
      const Visit& v = in_.data->visits[static_cast<std::size_t>(k)];
      if (!o_[static_cast<std::size_t>(v.site)]) continue;
      const double u = truncated_normal_draw(eta_det_[k], v.y == 1, rng_);
      precision.noalias() += in_.W.row(k).transpose() * in_.W.row(k);
      b.noalias() += in_.W.row(k).transpose() * u;
    }
    const double sd = in_.priors->alpha_sd;
    precision.diagonal().array() += 1.0 / (sd * sd);
    Eigen::LLT<Matrix> llt(precision);
    const Vector mean = llt.solve(b);
    Vector eps(q);
    for (Eigen::Index i = 0; i < q; ++i) eps[i] = rng_.normal();
    alpha_ = mean + llt.matrixU().solve(eps);
  }

  double alpha_conditional_loglik(const Vector& alpha) const {
    const Vector eta = in_.W * alpha;
    double ll = 0.0;
    for (int k = 0; k < in_.data->n_visits(); ++k) {
      const Visit& v = in_.data->visits[static_cast<std::size_t>(k)];
      if (!o_[static_cast<std::size_t>(v.site)]) continue;
      const double r =
          clamp_probability(detection_from_eta(in_.spec->kind, eta[k]));
      ll += v.y ? std::log(r) : std::log1p(-r);
    }
    return ll;
  }

  void update_alpha_logistic(bool tally) {
    Vector prop = alpha_;
    const double s = alpha_scale_.scale();
    for (Eigen::Index j = 0; j < prop.size(); ++j) prop[j] += s * rng_.normal();
    const double log_ratio = alpha_conditional_loglik(prop) +
                             alpha_log_prior(prop) -
                             alpha_conditional_loglik(alpha_) -
                             alpha_log_prior(alpha_);
    const double ap = std::min(1.0, std::exp(log_ratio));
    if (rng_.uniform() < ap) {
      alpha_ = prop;
      if (tally) ++accept_["alpha"];
    }
    if (tally) ++count_["alpha"];
    alpha_scale_.observe(ap);
  }

  void update_naive_rates() {
    const auto& pr = *in_.priors;
    int occupied = 0;
    double det = 0.0, miss = 0.0;
    for (int i = 0; i < in_.data->n_sites(); ++i) {
      if (!o_[static_cast<std::size_t>(i)]) continue;
      ++occupied;
      for (int k : in_.data->site_visits[static_cast<std::size_t>(i)]) {
        const int y = in_.data->visits[static_cast<std::size_t>(k)].y;
        det += y;
        miss += 1 - y;
      }
    }
    const int n = in_.data->n_sites();
    psi_naive_ = rng_.beta(pr.psi_a + occupied, pr.psi_b + (n - occupied));
    r_naive_ = rng_.beta(pr.r_a + det, pr.r_b + miss);
    refresh_site_caches();
    refresh_psi();
  }

  void freeze_adaptation() {
    beta_scale_.freeze();
    alpha_scale_.freeze();
    rho_scale_.freeze();
    for (auto& s : zeta_scales_) s.freeze();
  }

  void record(Matrix& draws, int row) {
    int at = 0;
    if (naive_) {
      draws(row, at++) = psi_naive_;
      draws(row, at++) = r_naive_;
      return;
    }
    for (Eigen::Index j = 0; j < beta_.size(); ++j) draws(row, at++) = beta_[j];
    for (Eigen::Index j = 0; j < alpha_.size(); ++j) {
      draws(row, at++) = alpha_[j];
    }
    if (spatial_) {
      for (Eigen::Index j = 0; j < zeta_.size(); ++j) {
        draws(row, at++) = zeta_[j];
      }
      draws(row, at++) = rho_;
      draws(row, at++) = tau2_;
    }
  }

  void finalize_acceptance(ChainOutput& out) {
    for (const auto& [k, c] : count_) {
      out.acceptance[k] = c > 0 ? accept_[k] / c : 0.0;
    }
  }

  const FitInputs& in_;
  Rng rng_;
  int chain_id_;
  bool naive_ = false, spatial_ = false;

  Vector beta_, alpha_, eta_occ_, eta_det_, r_, zeta_, psi_;
  std::vector<int> o_;
  double rho_ = 0.5, tau2_ = 1.0;
  double psi_naive_ = 0.5, r_naive_ = 0.5;
  std::vector<double> det_ll_occ_, prod_1mr_;
  std::optional<CarDensity> car_;

  AdaptiveScale beta_scale_, alpha_scale_, rho_scale_;
  std::vector<AdaptiveScale> zeta_scales_;
  std::map<std::string, double> accept_, count_;
};

}  // namespace

FittedModel fit(const OccupancyModelSpec& spec, const OccupancyDataset& data,
                const PriorConfig& priors, const SamplerConfig& cfg,
                FitReport* report) {
  priors.validate();
  cfg.validate();
  if (data.n_sites() == 0) throw DomainError("fit: empty dataset");
  if (data.site_visits.size() != data.sites.size()) {
    throw DomainError("fit: dataset visits not indexed (call index_visits)");
  }

  FitInputs in;
  in.spec = &spec;
  in.data = &data;
  in.priors = &priors;
  in.cfg = &cfg;
  in.any_det = data.any_detection();

  FittedModel model;
  model.spec = spec;
  model.priors = priors;
  model.sampler = cfg;
  for (const auto& s : data.sites) model.site_ids.push_back(s.id);

  if (spec.kind == ModelKind::naive) {
    in.names = {"psi", "r"};
  } else {
    model.occ_design = build_design(data.occupancy_table(), spec.covariates,
                                    DesignTarget::occupancy,
                                    spec.elev_forest_interaction);
    model.det_design = build_design(data.detection_table(), spec.covariates,
                                    DesignTarget::detection, false);
    in.X = model.occ_design.values();
    in.W = model.det_design.values();
    for (const auto& t : model.occ_design.terms()) {
      in.names.push_back("beta[" + t.name + "]");
    }
    for (const auto& t : model.det_design.terms()) {
      in.names.push_back("alpha[" + t.name + "]");
    }
  }
  if (spec.kind == ModelKind::spatial_poisson) {
    model.graph = delaunay_adjacency(data.coordinates());
    if (!model.graph->is_connected()) {
      throw DomainError("fit: neighborhood graph is disconnected");
    }
    in.graph = &*model.graph;
    in.neighbors.assign(data.sites.size(), {});
    for (const auto& [i, j] : model.graph->edges()) {
      in.neighbors[static_cast<std::size_t>(i)].push_back(j);
      in.neighbors[static_cast<std::size_t>(j)].push_back(i);
    }
    for (const auto& s : data.sites) {
      in.names.push_back("zeta[" + s.id + "]");
    }
    in.names.push_back("rho");
    in.names.push_back("tau2_car");
  }
  in.n_params = static_cast<int>(in.names.size());

  std::vector<ChainOutput> outputs(static_cast<std::size_t>(cfg.n_chains));
  auto run_chain = [&](int c) {
    ChainRunner runner(in, c);
    outputs[static_cast<std::size_t>(c)] = runner.run();
  };
  if (cfg.threads == 1 || cfg.n_chains == 1) {
    for (int c = 0; c < cfg.n_chains; ++c) run_chain(c);
  } else {
    std::vector<std::future<void>> futs;
    futs.reserve(static_cast<std::size_t>(cfg.n_chains));
    for (int c = 0; c < cfg.n_chains; ++c) {
      futs.push_back(std::async(std::launch::async, run_chain, c));
    }
    for (auto& f : futs) f.get();
  }

  model.samples.names = in.names;
  for (auto& o : outputs) model.samples.chains.push_back(std::move(o.draws));
  for (const auto& c : model.samples.chains) {
    if (!c.allFinite()) {
      throw NumericError("fit: non-finite values in posterior draws");
    }
  }
  model.rebuild_indices();

  if (report != nullptr) {
    for (const auto& o : outputs) {
      for (const auto& [k, v] : o.acceptance) {
        report->acceptance[k] += v / cfg.n_chains;
      }
    }
    report->scale_trace = outputs[0].scale_trace;
    if (spec.kind != ModelKind::naive) {
      // Weak separation of psi and r when occupancy saturates: if nearly
      // every site has posterior-mean psi close to 1, the detection history
      // alone carries the likelihood. Trigger on the 5th percentile of the
      // per-site posterior means.
      const auto& X = in.X;
      std::vector<double> mean_psi;
      mean_psi.reserve(static_cast<std::size_t>(data.n_sites()));
      for (int i = 0; i < data.n_sites(); ++i) {
        double acc = 0.0;
        long cnt = 0;
        for (int c = 0; c < model.samples.n_chains(); ++c) {
          for (int t = 0; t < model.samples.n_kept(); ++t) {
            double eta = 0.0;
            for (std::size_t k = 0; k < model.beta_index.size(); ++k) {
              eta += model.samples.chains[static_cast<std::size_t>(c)](
                         t, model.beta_index[k]) *
                     X(i, static_cast<Eigen::Index>(k));
            }
            if (spec.kind == ModelKind::spatial_poisson) {
              eta += model.samples.chains[static_cast<std::size_t>(c)](
                  t, model.zeta_index[static_cast<std::size_t>(i)]);
            }
            acc += psi_from_eta(spec.kind, eta);
            ++cnt;
          }
        }
        mean_psi.push_back(acc / cnt);
      }
      std::sort(mean_psi.begin(), mean_psi.end());
      const double median_psi = mean_psi[mean_psi.size() / 2];
      if (median_psi > 0.95) {
        report->warnings.push_back(
            "occupancy probability near 1 at the typical site: psi and the "
            "detection intercept are weakly separated");
      }
    }
  }
  return model;
}

}  // namespace hibreg
