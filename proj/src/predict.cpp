#include "hibreg/predict.hpp"

#include <cmath>

#include "hibreg/normal.hpp"
#include "hibreg/spatial.hpp"

namespace hibreg {

namespace {

struct DrawIndex {
  int chain;
  int it;
};

std::vector<DrawIndex> select_draws(const PosteriorSamples& s, int max_draws) {
  std::vector<DrawIndex> all;
  for (int c = 0; c < s.n_chains(); ++c) {
    for (int t = 0; t < s.n_kept(); ++t) all.push_back({c, t});
  }
  if (max_draws <= 0 || static_cast<int>(all.size()) <= max_draws) return all;
  std::vector<DrawIndex> out;
  out.reserve(static_cast<std::size_t>(max_draws));
  const double stride =
      static_cast<double>(all.size()) / static_cast<double>(max_draws);
  for (int k = 0; k < max_draws; ++k) {
    out.push_back(all[static_cast<std::size_t>(k * stride)]);
  }
  return out;
}

// Conditional draws of the spatial effect at new locations given the fitted
// field, under the CAR prior on the joint Delaunay graph.
class SpatialExtension {
 public:
  SpatialExtension(const FittedModel& model,
                   const std::vector<std::array<double, 2>>& new_coords)
      : n_new_(static_cast<int>(new_coords.size())) {
    const auto& train = model.graph->coordinates;
    n_train_ = static_cast<int>(train.size());
    match_.assign(static_cast<std::size_t>(n_new_), -1);

    double span = 1e-12;
    for (const auto& p : train) {
      span = std::max({span, std::fabs(p[0]), std::fabs(p[1])});
    }
    const double tol = 1e-9 * span;

    std::vector<std::array<double, 2>> joint = train;
    for (int k = 0; k < n_new_; ++k) {
      const auto& p = new_coords[static_cast<std::size_t>(k)];
      for (int i = 0; i < n_train_; ++i) {
        if (std::fabs(p[0] - train[static_cast<std::size_t>(i)][0]) <= tol &&
            std::fabs(p[1] - train[static_cast<std::size_t>(i)][1]) <= tol) {
          match_[static_cast<std::size_t>(k)] = i;
          break;
        }
      }
      if (match_[static_cast<std::size_t>(k)] < 0) {
        fresh_pos_.push_back(static_cast<int>(fresh_.size()));
        fresh_.push_back(k);
        joint.push_back(p);
      } else {
        fresh_pos_.push_back(-1);
      }
    }
    if (fresh_.empty()) return;

    const NeighborhoodGraph g = delaunay_adjacency(joint);
    const Vector deg = g.degrees();
    const int nf = static_cast<int>(fresh_.size());
    deg_new_ = Vector::Zero(nf);
    for (int k = 0; k < nf; ++k) {
      deg_new_[k] = deg[n_train_ + k];
    }
    // Partition the joint adjacency into new-new and new-train blocks.
    std::vector<Eigen::Triplet<double>> ann, ant;
    for (const auto& [i, j] : g.edges()) {
      const bool i_new = i >= n_train_, j_new = j >= n_train_;
      if (i_new && j_new) {
        ann.emplace_back(i - n_train_, j - n_train_, 1.0);
        ann.emplace_back(j - n_train_, i - n_train_, 1.0);
      } else if (i_new != j_new) {
        const int a = i_new ? i - n_train_ : j - n_train_;
        const int b = i_new ? j : i;
        ant.emplace_back(a, b, 1.0);
      }
    }
    a_nn_.resize(nf, nf);
    a_nn_.setFromTriplets(ann.begin(), ann.end());
    a_nt_.resize(nf, n_train_);
    a_nt_.setFromTriplets(ant.begin(), ant.end());
    analyzed_ = false;
  }

  /// zeta at every requested location for one posterior draw.
  Vector extend(const Vector& zeta_train, double rho, double tau2, Rng& rng) {
    Vector out(n_new_);
    Vector fresh_draw;
    if (!fresh_.empty()) {
      // Q_nn = tau2 (D_n - rho A_nn); mean = -Q_nn^{-1} Q_nt zeta_t.
      SparseMatrix qnn = -rho * a_nn_;
      for (int k = 0; k < qnn.rows(); ++k) qnn.coeffRef(k, k) += deg_new_[k];
      qnn *= tau2;
      qnn.makeCompressed();
      if (!analyzed_) {
        llt_.analyzePattern(qnn);
        analyzed_ = true;
      }
      llt_.factorize(qnn);
      if (llt_.info() != Eigen::Success) {
        throw NumericError("predict: conditional CAR factorization failed");
      }
      const Vector cross = tau2 * (-rho) * (a_nt_ * zeta_train);
      const Vector mean = llt_.solve(-cross);
      Vector z(qnn.rows());
      for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = rng.normal();
      fresh_draw = mean + llt_.permutationPinv() * llt_.matrixU().solve(z);
    }
    for (int k = 0; k < n_new_; ++k) {
      const int m = match_[static_cast<std::size_t>(k)];
      out[k] = m >= 0 ? zeta_train[m]
                      : fresh_draw[fresh_pos_[static_cast<std::size_t>(k)]];
    }
    return out;
  }

 private:
  int n_train_ = 0;
  int n_new_ = 0;
  std::vector<int> match_;  // index of coinciding training site, or -1
  std::vector<int> fresh_;  // new-location indices needing conditional draws
  std::vector<int> fresh_pos_;  // new index -> row in the conditional system
  Vector deg_new_;
  SparseMatrix a_nn_, a_nt_;
  Eigen::SimplicialLLT<SparseMatrix> llt_;
  bool analyzed_ = false;
};

}  // namespace

PredictionDraws predict(const FittedModel& model, const PredictionInput& input,
                        std::uint64_t seed, int max_draws) {
  const int n_new = static_cast<int>(input.ids.size());
  if (n_new == 0) throw DomainError("predict: no sites");
  const bool naive = model.spec.kind == ModelKind::naive;
  const bool spatial = model.spec.kind == ModelKind::spatial_poisson;
  const bool poissonish = model.spec.kind == ModelKind::poisson || spatial;

  PredictionDraws out;
  out.ids = input.ids;

  const auto draws = select_draws(model.samples, max_draws);
  const int nd = static_cast<int>(draws.size());
  out.psi.resize(nd, n_new);

  if (naive) {
    for (int d = 0; d < nd; ++d) {
      const auto& [c, t] = draws[static_cast<std::size_t>(d)];
      out.psi.row(d).setConstant(
          model.samples.chains[static_cast<std::size_t>(c)](t,
                                                            model.psi_index));
    }
    if (input.det_covariates.has_value()) {
      out.phat.resize(nd, n_new);
      for (int d = 0; d < nd; ++d) {
        const auto& [c, t] = draws[static_cast<std::size_t>(d)];
        const double r =
            model.samples.chains[static_cast<std::size_t>(c)](t,
                                                              model.r_index);
        out.phat.row(d) = out.psi.row(d) * r;
      }
    }
    return out;
  }

  const Matrix x = model.occ_design.rows_from_raw(input.occ_covariates);
  if (x.rows() != n_new) {
    throw DomainError("predict: covariate rows do not match site ids");
  }

  std::optional<SpatialExtension> ext;
  Rng rng(seed, 0x9e3779b97f4a7c15ull);
  if (spatial) {
    if (static_cast<int>(input.coordinates.size()) != n_new) {
      throw DomainError("predict: spatial model requires coordinates");
    }
    ext.emplace(model, input.coordinates);
  }

  Matrix w;
  if (input.det_covariates.has_value()) {
    w = model.det_design.rows_from_raw(*input.det_covariates);
    if (w.rows() != n_new) {
      throw DomainError("predict: detection covariate rows mismatch");
    }
    out.phat.resize(nd, n_new);
  }
  if (poissonish) out.lambda.resize(nd, n_new);

  for (int d = 0; d < nd; ++d) {
    const auto& [c, t] = draws[static_cast<std::size_t>(d)];
    const Vector beta = model.beta_draw(c, t);
    const Vector eta = x * beta;
    Vector zeta_new;
    if (spatial) {
      Vector zeta_train(static_cast<Eigen::Index>(model.zeta_index.size()));
      for (std::size_t k = 0; k < model.zeta_index.size(); ++k) {
        zeta_train[static_cast<Eigen::Index>(k)] =
            model.samples.chains[static_cast<std::size_t>(c)](
                t, model.zeta_index[k]);
      }
      const double rho =
          model.samples.chains[static_cast<std::size_t>(c)](t, model.rho_index);
      const double tau2 = model.samples.chains[static_cast<std::size_t>(c)](
          t, model.tau2_index);
      zeta_new = ext->extend(zeta_train, rho, tau2, rng);
    }
    for (int i = 0; i < n_new; ++i) {
      const double e = eta[i] + (spatial ? zeta_new[i] : 0.0);
      out.psi(d, i) = psi_from_eta(model.spec.kind, e);
      if (poissonish) out.lambda(d, i) = std::exp(e);
    }
    if (input.det_covariates.has_value()) {
      const Vector alpha = model.alpha_draw(c, t);
      const Vector eta_det = w * alpha;
      for (int i = 0; i < n_new; ++i) {
        out.phat(d, i) =
            out.psi(d, i) * detection_from_eta(model.spec.kind, eta_det[i]);
      }
    }
  }
  return out;
}

}  // namespace hibreg
