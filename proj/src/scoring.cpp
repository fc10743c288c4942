#include "hibreg/scoring.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <future>
#include <mutex>
#include <numeric>

#include "hibreg/predict.hpp"

namespace hibreg {

FoldPlan make_folds(int n_sites, int K, std::uint64_t seed) {
  if (K < 2) throw DomainError("make_folds: K must be >= 2");
  if (K > n_sites) throw DomainError("make_folds: more folds than sites");
  FoldPlan plan;
  plan.K = K;
  plan.seed = seed;
  std::vector<int> order(static_cast<std::size_t>(n_sites));
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed, 0xf01d5ull);
  for (int i = n_sites - 1; i > 0; --i) {
    const int j = static_cast<int>(rng.integer(static_cast<std::uint64_t>(i + 1)));
    std::swap(order[static_cast<std::size_t>(i)],
              order[static_cast<std::size_t>(j)]);
  }
  plan.assignment.assign(static_cast<std::size_t>(n_sites), 0);
  for (int k = 0; k < n_sites; ++k) {
    plan.assignment[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])] =
        k % K;
  }
  return plan;
}

double brier_score(const std::vector<int>& y, const Vector& p_hat) {
  if (y.empty()) throw DomainError("brier_score: empty holdout");
  if (static_cast<Eigen::Index>(y.size()) != p_hat.size()) {
    throw DomainError("brier_score: length mismatch");
  }
  double s = 0.0;
  for (Eigen::Index i = 0; i < p_hat.size(); ++i) {
    if (!(p_hat[i] >= 0.0 && p_hat[i] <= 1.0)) {
      throw DomainError("brier_score: p_hat outside [0, 1]");
    }
    const double d = static_cast<double>(y[static_cast<std::size_t>(i)]) - p_hat[i];
    s += d * d;
  }
  return s / static_cast<double>(y.size());
}

double expected_posterior_score(const Matrix& phat_draws,
                                const std::vector<int>& y) {
  if (phat_draws.rows() == 0) {
    throw DomainError("expected_posterior_score: no posterior draws");
  }
  double total = 0.0;
  for (Eigen::Index d = 0; d < phat_draws.rows(); ++d) {
    total += brier_score(y, phat_draws.row(d));
  }
  return total / static_cast<double>(phat_draws.rows());
}

std::vector<int> holdout_outcomes(const OccupancyDataset& holdout,
                                  bool per_site) {
  std::vector<int> y;
  if (per_site) {
    return holdout.any_detection();
  }
  y.reserve(holdout.visits.size());
  for (const auto& v : holdout.visits) y.push_back(v.y);
  return y;
}

Matrix holdout_phat_draws(const FittedModel& model,
                          const OccupancyDataset& holdout, std::uint64_t seed,
                          bool per_site, int max_draws) {
  PredictionInput input;
  for (const auto& s : holdout.sites) input.ids.push_back(s.id);
  input.occ_covariates = holdout.occupancy_table();
  if (model.spec.kind == ModelKind::spatial_poisson) {
    input.coordinates = holdout.coordinates();
  }
  const PredictionDraws pred = predict(model, input, seed, max_draws);
  const int nd = static_cast<int>(pred.psi.rows());
  const bool naive = model.spec.kind == ModelKind::naive;

  // Per-visit detection probabilities per draw.
  Matrix w;
  if (!naive) {
    w = model.det_design.rows_from_raw(holdout.detection_table());
  }
  const int n_cols = per_site ? holdout.n_sites() : holdout.n_visits();
  Matrix out(nd, n_cols);

  // Re-derive the draw order exactly as predict() does so alpha rows align.
  std::vector<std::pair<int, int>> order;
  for (int c = 0; c < model.samples.n_chains(); ++c) {
    for (int t = 0; t < model.samples.n_kept(); ++t) order.push_back({c, t});
  }
  if (max_draws > 0 && static_cast<int>(order.size()) > max_draws) {
    std::vector<std::pair<int, int>> sel;
    const double stride =
        static_cast<double>(order.size()) / static_cast<double>(max_draws);
    for (int k = 0; k < max_draws; ++k) {
      sel.push_back(order[static_cast<std::size_t>(k * stride)]);
    }
    order.swap(sel);
  }

  for (int d = 0; d < nd; ++d) {
    const auto& [c, t] = order[static_cast<std::size_t>(d)];
    Vector r(holdout.n_visits());
    if (naive) {
      r.setConstant(
          model.samples.chains[static_cast<std::size_t>(c)](t, model.r_index));
    } else {
      const Vector alpha = model.alpha_draw(c, t);
      const Vector eta = w * alpha;
      for (int k = 0; k < holdout.n_visits(); ++k) {
        r[k] = detection_from_eta(model.spec.kind, eta[k]);
      }
    }
    if (per_site) {
      for (int i = 0; i < holdout.n_sites(); ++i) {
        double prod = 1.0;
        for (int k : holdout.site_visits[static_cast<std::size_t>(i)]) {
          prod *= 1.0 - r[k];
        }
        out(d, i) = pred.psi(d, i) * (1.0 - prod);
      }
    } else {
      for (int k = 0; k < holdout.n_visits(); ++k) {
        const int site = holdout.visits[static_cast<std::size_t>(k)].site;
        out(d, k) = observation_prob(pred.psi(d, site), r[k]);
      }
    }
  }
  return out;
}

ScoreReport cross_validate(const std::vector<CvModel>& models,
                           const OccupancyDataset& data, int K,
                           std::uint64_t seed, const PriorConfig& priors,
                           const SamplerConfig& sampler, bool per_site,
                           int threads) {
  if (models.empty()) throw DomainError("cross_validate: no models");
  const FoldPlan plan = make_folds(data.n_sites(), K, seed);

  ScoreReport report;
  report.K = K;
  report.scores.resize(static_cast<Eigen::Index>(models.size()), K);
  for (const auto& m : models) report.model_names.push_back(m.name);

  struct Task {
    int model;
    int fold;
  };
  std::vector<Task> tasks;
  for (std::size_t m = 0; m < models.size(); ++m) {
    for (int k = 0; k < K; ++k) tasks.push_back({static_cast<int>(m), k});
  }

  std::vector<std::vector<int>> train_idx(static_cast<std::size_t>(K)),
      hold_idx(static_cast<std::size_t>(K));
  for (int i = 0; i < data.n_sites(); ++i) {
    const int f = plan.assignment[static_cast<std::size_t>(i)];
    for (int k = 0; k < K; ++k) {
      (k == f ? hold_idx : train_idx)[static_cast<std::size_t>(k)].push_back(i);
    }
  }

  std::mutex warn_mutex;
  auto run_task = [&](const Task& task) {
    const OccupancyDataset train =
        data.subset(train_idx[static_cast<std::size_t>(task.fold)]);
    const OccupancyDataset hold =
        data.subset(hold_idx[static_cast<std::size_t>(task.fold)]);
    bool any_det = false;
    for (const auto& v : train.visits) any_det |= v.y == 1;
    if (!any_det) {
      std::lock_guard<std::mutex> lock(warn_mutex);
      report.warnings.push_back("fold " + std::to_string(task.fold) +
                                ": training data has no detections");
    }
    SamplerConfig cfg = sampler;
    cfg.threads = 1;  // tasks are already parallel
    const FittedModel fitted =
        fit(models[static_cast<std::size_t>(task.model)].spec, train, priors,
            cfg);
    const Matrix phat = holdout_phat_draws(
        fitted, hold, seed + 1000003ull * static_cast<std::uint64_t>(task.fold),
        per_site);
    const std::vector<int> y = holdout_outcomes(hold, per_site);
    report.scores(task.model, task.fold) = expected_posterior_score(phat, y);
  };

  if (threads <= 1 || tasks.size() == 1) {
    for (const auto& t : tasks) run_task(t);
  } else {
    std::atomic<std::size_t> next{0};
    const int n_workers =
        std::min<int>(threads, static_cast<int>(tasks.size()));
    std::vector<std::future<void>> futs;
    for (int wk = 0; wk < n_workers; ++wk) {
      futs.push_back(std::async(std::launch::async, [&]() {
        for (;;) {
          const std::size_t i = next.fetch_add(1);
          if (i >= tasks.size()) return;
          run_task(tasks[i]);
        }
      }));
    }
    for (auto& f : futs) f.get();
  }
  return report;
}

ProbabilityCurve marginal_curve(const FittedModel& model,
                                const CurveSpec& spec) {
  if (model.spec.kind == ModelKind::naive) {
    throw DomainError("marginal_curve: the naive model has no covariates");
  }
  const bool occ = spec.target == DesignTarget::occupancy;
  const DesignMatrix& design = occ ? model.occ_design : model.det_design;
  const int base = design.base_index(spec.term);
  if (base < 0) {
    throw DomainError("marginal_curve: term not in the design: " + spec.term);
  }
  if (spec.grid_points < 2) {
    throw DomainError("marginal_curve: need at least 2 grid points");
  }
  const Standardization st =
      design.standardization()[static_cast<std::size_t>(base)];
  double lo = spec.lo, hi = spec.hi;
  if (lo == hi) {
    lo = st.mean - 2.0 * st.sd;
    hi = st.mean + 2.0 * st.sd;
  }

  ProbabilityCurve curve;
  curve.term = spec.term;
  curve.grid.resize(spec.grid_points);
  for (int g = 0; g < spec.grid_points; ++g) {
    curve.grid[g] =
        lo + (hi - lo) * static_cast<double>(g) / (spec.grid_points - 1);
  }
  const double z_lo = (lo - st.mean) / st.sd;
  const double z_hi = (hi - st.mean) / st.sd;
  if (std::fabs(z_lo) > 4.0 || std::fabs(z_hi) > 4.0) {
    curve.warnings.push_back("grid extends beyond 4 sd of the data for " +
                             spec.term + ": extrapolation");
  }

  // Held covariate rows (standardized): either the covariate means (zero) or
  // every observed row when averaging.
  Matrix held;
  if (spec.average_covariates) {
    held = design.base_values();
  } else {
    held = Matrix::Zero(1, static_cast<Eigen::Index>(design.base_names().size()));
  }

  const int nc = model.samples.n_chains();
  const int nk = model.samples.n_kept();
  const int nd = nc * nk;
  Matrix values(nd, spec.grid_points);

  const ModelKind kind = model.spec.kind;
  for (int c = 0; c < nc; ++c) {
    for (int t = 0; t < nk; ++t) {
      const int d = c * nk + t;
      const Vector coef = occ ? model.beta_draw(c, t) : model.alpha_draw(c, t);
      for (int g = 0; g < spec.grid_points; ++g) {
        const double zg = (curve.grid[g] - st.mean) / st.sd;
        double acc = 0.0;
        for (Eigen::Index rowi = 0; rowi < held.rows(); ++rowi) {
          Vector bases = held.row(rowi);
          bases[base] = zg;
          if (spec.gradient) {
            const double eta = design.eta(bases, coef);
            const double deta = design.deta_dbase(base, bases, coef) / st.sd;
            const double dp = occ ? psi_deriv_from_eta(kind, eta)
                                  : detection_deriv_from_eta(kind, eta);
            acc += dp * deta;
          } else {
            const double eta = design.eta(bases, coef);
            acc += occ ? psi_from_eta(kind, eta) : detection_from_eta(kind, eta);
          }
        }
        values(d, g) = acc / static_cast<double>(held.rows());
      }
    }
  }

  curve.median.resize(spec.grid_points);
  curve.lower.resize(spec.grid_points);
  curve.upper.resize(spec.grid_points);
  std::vector<double> col(static_cast<std::size_t>(nd));
  auto quantile = [&](double q) {
    const double h = q * (static_cast<double>(col.size()) - 1.0);
    const std::size_t i = static_cast<std::size_t>(h);
    const double frac = h - static_cast<double>(i);
    if (i + 1 >= col.size()) return col.back();
    return col[i] * (1.0 - frac) + col[i + 1] * frac;
  };
  for (int g = 0; g < spec.grid_points; ++g) {
    for (int d = 0; d < nd; ++d) {
      col[static_cast<std::size_t>(d)] = values(d, g);
    }
    std::sort(col.begin(), col.end());
    curve.lower[g] = quantile(0.025);
    curve.median[g] = quantile(0.5);
    curve.upper[g] = quantile(0.975);
  }
  return curve;
}

}  // namespace hibreg
