// Command-line front end: fit | predict | curves | cv | simulate | qr-demo.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "hibreg/auxiliary.hpp"
#include "hibreg/diagnostics.hpp"
#include "hibreg/io.hpp"
#include "hibreg/mcmc.hpp"
#include "hibreg/normal.hpp"
#include "hibreg/predict.hpp"
#include "hibreg/quantile.hpp"
#include "hibreg/scoring.hpp"
#include "hibreg/simulate.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommonOptions {
  std::string sites_path, visits_path, out_dir;
  std::string model = "poisson";
  std::string covariates = "linear";
  bool elev_forest_interaction = false;
  int iters = 6000, burnin = 2000, chains = 2, thin = 1;
  std::uint64_t seed = 1;
  int threads = 0;
  hibreg::PriorConfig priors;
  bool gzip_samples = false;
};

void add_sampler_options(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--iters", o.iters, "Total MCMC iterations per chain");
  cmd->add_option("--burnin", o.burnin, "Burn-in iterations (adaptation window)");
  cmd->add_option("--chains", o.chains, "Number of chains");
  cmd->add_option("--thin", o.thin, "Keep every thin-th draw after burn-in");
  cmd->add_option("--seed", o.seed, "RNG seed");
  cmd->add_option("--threads", o.threads, "Worker threads (0 = auto)")
      ->envname("HIBREG_THREADS");
}

void add_prior_options(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--beta-sd", o.priors.beta_sd, "Prior sd for occupancy coefficients");
  cmd->add_option("--alpha-sd", o.priors.alpha_sd, "Prior sd for detection coefficients");
  cmd->add_option("--psi-a", o.priors.psi_a, "Naive psi Beta prior shape a");
  cmd->add_option("--psi-b", o.priors.psi_b, "Naive psi Beta prior shape b");
  cmd->add_option("--r-a", o.priors.r_a, "Naive r Beta prior shape a");
  cmd->add_option("--r-b", o.priors.r_b, "Naive r Beta prior shape b");
  cmd->add_option("--rho-min", o.priors.rho_min, "Lower bound of the uniform prior on rho");
  cmd->add_option("--tau2-shape", o.priors.tau2_shape, "Gamma prior shape for tau2");
  cmd->add_option("--tau2-rate", o.priors.tau2_rate, "Gamma prior rate for tau2");
}

hibreg::SamplerConfig sampler_config(const CommonOptions& o) {
  hibreg::SamplerConfig cfg;
  cfg.n_iter = o.iters;
  cfg.n_burnin = o.burnin;
  cfg.n_chains = o.chains;
  cfg.thin = o.thin;
  cfg.seed = o.seed;
  cfg.threads = o.threads;
  return cfg;
}

void echo_config(CLI::App& app, const std::string& out_dir) {
  fs::create_directories(out_dir);
  hibreg::write_text_file(out_dir + "/config.resolved.ini",
                          app.config_to_str(true, true));
}

int run_fit(CLI::App& app, const CommonOptions& o) {
  std::string summary;
  const hibreg::OccupancyDataset data =
      hibreg::ingest(o.sites_path, o.visits_path, &summary);
  std::cout << summary << "\n";

  hibreg::OccupancyModelSpec spec;
  spec.kind = hibreg::parse_model_kind(o.model);
  spec.covariates = hibreg::parse_collection(o.covariates);
  spec.elev_forest_interaction = o.elev_forest_interaction;

  hibreg::FitReport report;
  const hibreg::FittedModel model =
      hibreg::fit(spec, data, o.priors, sampler_config(o), &report);

  echo_config(app, o.out_dir);
  hibreg::save_artifact(o.out_dir, model, o.gzip_samples);
  const hibreg::Diagnostics diag = hibreg::diagnostics(model.samples);
  hibreg::write_summary_json(o.out_dir + "/summary.json", model.samples, diag,
                             report);
  if (model.graph.has_value()) {
    hibreg::write_edges_csv(o.out_dir + "/edges.csv", *model.graph,
                            model.site_ids);
  }
  for (const auto& [block, rate] : report.acceptance) {
    std::cout << "acceptance[" << block << "] = " << rate << "\n";
  }
  for (const auto& w : report.warnings) std::cout << "warning: " << w << "\n";
  std::cout << "artifact written to " << o.out_dir << "\n";
  return 0;
}

int run_predict(CLI::App& app, const std::string& artifact_dir,
                const std::string& new_sites, const std::string& out_dir,
                std::uint64_t seed, int max_draws) {
  const hibreg::FittedModel model = hibreg::load_artifact(artifact_dir);
  const hibreg::PredictionInput input = hibreg::read_prediction_csv(new_sites);
  if (model.spec.kind == hibreg::ModelKind::spatial_poisson &&
      input.coordinates.empty()) {
    throw hibreg::IngestError(
        new_sites + ": the spatial model needs x_km and y_km columns");
  }
  const hibreg::PredictionDraws draws =
      hibreg::predict(model, input, seed, max_draws);
  echo_config(app, out_dir);
  hibreg::write_prediction_csv(out_dir + "/predictions.csv", draws);
  std::cout << "predictions for " << draws.ids.size() << " sites written to "
            << out_dir << "/predictions.csv\n";
  return 0;
}

int run_curves(CLI::App& app, const std::string& artifact_dir,
               const std::string& out_dir, std::vector<std::string> terms,
               int grid, bool average) {
  const hibreg::FittedModel model = hibreg::load_artifact(artifact_dir);
  if (model.spec.kind == hibreg::ModelKind::naive) {
    throw hibreg::ConfigError("curves: the naive model has no covariates");
  }
  if (terms.empty()) terms = {"elevation", "forest", "date", "duration"};
  std::vector<hibreg::NamedCurve> out;
  for (const auto& term : terms) {
    const bool occ = model.occ_design.base_index(term) >= 0;
    hibreg::CurveSpec cs;
    cs.target = occ ? hibreg::DesignTarget::occupancy
                    : hibreg::DesignTarget::detection;
    cs.term = term;
    cs.grid_points = grid;
    cs.average_covariates = average;
    const std::string target = occ ? "occupancy" : "detection";
    cs.gradient = false;
    out.push_back({target, "curve", hibreg::marginal_curve(model, cs)});
    cs.gradient = true;
    out.push_back({target, "gradient", hibreg::marginal_curve(model, cs)});
  }
  echo_config(app, out_dir);
  hibreg::write_curves_csv(out_dir + "/curves.csv", out);
  for (const auto& c : out) {
    for (const auto& w : c.curve.warnings) std::cout << "warning: " << w << "\n";
  }
  std::cout << "curves written to " << out_dir << "/curves.csv\n";
  return 0;
}

int run_cv(CLI::App& app, const CommonOptions& o,
           const std::vector<std::string>& model_tokens, int folds,
           bool per_site) {
  const hibreg::OccupancyDataset data =
      hibreg::ingest(o.sites_path, o.visits_path);
  std::vector<hibreg::CvModel> models;
  for (const auto& tok : model_tokens) {
    const auto [kind, coll] = hibreg::parse_model_token(tok);
    hibreg::OccupancyModelSpec spec;
    spec.kind = kind;
    spec.covariates = coll;
    spec.elev_forest_interaction = o.elev_forest_interaction;
    models.push_back({tok, spec});
  }
  const int threads = o.threads > 0
                          ? o.threads
                          : static_cast<int>(std::thread::hardware_concurrency());
  const hibreg::ScoreReport report =
      hibreg::cross_validate(models, data, folds, o.seed, o.priors,
                             sampler_config(o), per_site, threads);
  echo_config(app, o.out_dir);
  hibreg::write_scores_csv(o.out_dir + "/scores.csv", report);
  for (const auto& w : report.warnings) std::cout << "warning: " << w << "\n";
  std::cout << "cross-validation scores written to " << o.out_dir
            << "/scores.csv\n";
  return 0;
}

int run_simulate(CLI::App& app, const CommonOptions& o,
                 const std::vector<double>& beta,
                 const std::vector<double>& alpha, int n_sites, int n_visits,
                 double rho, double tau2, double span) {
  hibreg::SimulationTruth truth;
  truth.spec.kind = hibreg::parse_model_kind(o.model);
  truth.spec.covariates = hibreg::parse_collection(o.covariates);
  truth.spec.elev_forest_interaction = o.elev_forest_interaction;
  truth.beta = Eigen::Map<const hibreg::Vector>(beta.data(),
                                                static_cast<long>(beta.size()));
  truth.alpha = Eigen::Map<const hibreg::Vector>(
      alpha.data(), static_cast<long>(alpha.size()));
  truth.n_sites = n_sites;
  truth.n_visits = n_visits;
  truth.rho = rho;
  truth.tau2 = tau2;
  truth.coord_span_km = span;
  truth.seed = o.seed;
  const hibreg::SimulatedData sim = hibreg::simulate_dataset(truth);
  echo_config(app, o.out_dir);
  hibreg::write_sites_csv(o.out_dir + "/sites.csv", sim.data);
  hibreg::write_visits_csv(o.out_dir + "/visits.csv", sim.data);
  json t;
  t["model"] = hibreg::model_token(truth.spec.kind, truth.spec.covariates);
  t["beta"] = beta;
  t["alpha"] = alpha;
  t["seed"] = truth.seed;
  if (truth.spec.kind == hibreg::ModelKind::spatial_poisson) {
    t["rho"] = rho;
    t["tau2"] = tau2;
  }
  int detections = 0;
  for (const auto& v : sim.data.visits) detections += v.y;
  t["detections"] = detections;
  hibreg::write_text_file(o.out_dir + "/truth.json", t.dump(2) + "\n");
  std::cout << "simulated " << n_sites << " sites, " << sim.data.n_visits()
            << " visits (" << detections << " detections) into " << o.out_dir
            << "\n";
  return 0;
}

int run_qr_demo(CLI::App& app, const std::string& out_dir,
                std::vector<double> taus, int n, std::uint64_t seed) {
  using namespace hibreg;
  if (taus.empty()) taus = {0.1, 0.25, 0.5, 0.75, 0.9};
  json report;

  // Global-linear family: every quantile of z | x is linear in x. The
  // heteroskedastic-normal construction makes that explicit:
  // Q(z | x, tau) = (b0 + q(tau) g0) + (b1 + q(tau) g1) x.
  const double b0 = 0.5, b1 = 1.0, g0 = 1.0, g1 = 0.4;
  json quantile_lines = json::array();
  for (double tau : taus) {
    const double zq = norm_quantile(tau);
    Vector beta_tau(2);
    beta_tau << b0 + zq * g0, b1 + zq * g1;
    QuantileModel qm{tau, beta_tau, 1.0};
    const double x_int = qr_x_intercept(qm, 1);
    QuantileModel scaled = qm;
    scaled.beta_tau *= 3.0;
    scaled.ald_scale *= 3.0;
    quantile_lines.push_back(
        {{"tau", tau},
         {"beta", {beta_tau[0], beta_tau[1]}},
         {"x_intercept", x_int},
         {"x_intercept_scaled_by_3", qr_x_intercept(scaled, 1)}});
  }
  report["quantile_lines"] = quantile_lines;

  // Two equivalent auxiliary specifications: the heteroskedastic-normal
  // linear model and a probit link with the matched nonlinear systematic
  // component produce the same probability curve.
  Vector beta(2), gamma(2);
  beta << b0, b1;
  gamma << g0, g1;
  const auto grid = covariate_grid(-2.0, 2.0, 401);
  const AuxiliarySpec het = AuxiliarySpec::gaussian(beta, gamma);
  const Vector eta_b = match_nonlinear_systematic(het, LinkFamily::probit(), grid);
  double max_diff = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double p1 = success_probability(het, grid[i]);
    const double p2 =
        inverse_link(LinkFamily::probit(), eta_b[static_cast<long>(i)]);
    max_diff = std::max(max_diff, std::fabs(p1 - p2));
  }
  report["equivalent_pair"] = {
      {"spec_a", "gaussian auxiliary, location b0+b1*x, scale g0+g1*x"},
      {"spec_b", "probit link with matched nonlinear systematic"},
      {"grid", "401 points, x in [-2, 2]"},
      {"max_abs_diff", max_diff}};

  // Scaling non-identifiability at the likelihood level.
  Rng rng(seed, 0x9712ull);
  Matrix X(n, 2);
  std::vector<int> y(static_cast<std::size_t>(n));
  double worst = 0.0;
  json scaling = json::array();
  for (double tau : taus) {
    Vector beta_tau(2);
    beta_tau << b0 + norm_quantile(tau) * g0, b1 + norm_quantile(tau) * g1;
    QuantileModel qm{tau, beta_tau, 1.0};
    for (int i = 0; i < n; ++i) {
      X(i, 0) = 1.0;
      X(i, 1) = -2.0 + 4.0 * rng.uniform();
      const double p =
          1.0 - ald_cdf(-X.row(i).dot(beta_tau), 0.0, 1.0, tau);
      y[static_cast<std::size_t>(i)] = rng.bernoulli(p) ? 1 : 0;
    }
    const double base = qr_binary_loglik(qm, y, X);
    json row{{"tau", tau}, {"loglik", base}};
    for (double k : {0.1, 3.0, 40.0}) {
      QuantileModel scaled = qm;
      scaled.beta_tau *= k;
      scaled.ald_scale *= k;
      const double diff = std::fabs(qr_binary_loglik(scaled, y, X) - base);
      worst = std::max(worst, diff);
      row["abs_loglik_change_k" + std::to_string(k).substr(0, 4)] = diff;
    }
    scaling.push_back(row);
  }
  report["scaling_invariance"] = {
      {"k_values", {0.1, 3.0, 40.0}},
      {"max_abs_loglik_change", worst},
      {"per_tau", scaling},
      {"conclusion",
       "the coefficient scale is not identifiable from binary data; "
       "x-intercepts and relative effects are"}};

  echo_config(app, out_dir);
  hibreg::write_text_file(out_dir + "/qr_report.json", report.dump(2) + "\n");
  std::cout << "x-intercepts per tau:";
  for (const auto& q : quantile_lines) {
    std::cout << " " << q["x_intercept"].get<double>();
  }
  std::cout << "\nequivalent-pair max |p_a - p_b| = " << max_diff
            << "\nmax |loglik(k beta, k sigma) - loglik(beta, sigma)| = "
            << worst << "\nreport written to " << out_dir << "/qr_report.json\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hierarchical binary regression with occupancy models"};
  app.option_defaults()->always_capture_default(true);
  app.set_config("--config", "", "Read options from an INI file");
  app.require_subcommand(1);

  CommonOptions o;

  auto* fit_cmd = app.add_subcommand("fit", "Fit an occupancy model");
  fit_cmd->configurable();
  fit_cmd->add_option("--sites", o.sites_path, "Sites CSV")->required();
  fit_cmd->add_option("--visits", o.visits_path, "Visits CSV")->required();
  fit_cmd->add_option("--model", o.model,
                      "naive | kr | poisson | spatial-poisson");
  fit_cmd->add_option("--covariates", o.covariates, "linear | quadratic");
  fit_cmd->add_flag("--with-elev-forest-interaction",
                    o.elev_forest_interaction,
                    "Add the plain elevation:forest column");
  fit_cmd->add_flag("--gzip-samples", o.gzip_samples,
                    "Compress the posterior draw CSV");
  fit_cmd->add_option("--out", o.out_dir, "Output directory")->required();
  add_sampler_options(fit_cmd, o);
  add_prior_options(fit_cmd, o);

  std::string artifact_dir, new_sites;
  int max_draws = 0;
  auto* predict_cmd =
      app.add_subcommand("predict", "Posterior predictions at new sites");
  predict_cmd->configurable();
  predict_cmd->add_option("--artifact", artifact_dir, "Fitted model directory")
      ->required();
  predict_cmd->add_option("--new-sites", new_sites, "New-site CSV")->required();
  predict_cmd->add_option("--out", o.out_dir, "Output directory")->required();
  predict_cmd->add_option("--seed", o.seed, "RNG seed (spatial conditional)");
  predict_cmd->add_option("--max-draws", max_draws,
                          "Thin the posterior to at most this many draws");

  std::vector<std::string> curve_terms;
  int curve_grid = 201;
  bool curve_average = false;
  auto* curves_cmd =
      app.add_subcommand("curves", "Marginal probability curves and gradients");
  curves_cmd->configurable();
  curves_cmd->add_option("--artifact", artifact_dir, "Fitted model directory")
      ->required();
  curves_cmd->add_option("--out", o.out_dir, "Output directory")->required();
  curves_cmd->add_option("--terms", curve_terms, "Covariates to sweep")
      ->delimiter(',');
  curves_cmd->add_option("--grid", curve_grid, "Grid points per curve");
  curves_cmd->add_flag("--average-covariates", curve_average,
                       "Average over observed covariates instead of holding "
                       "them at their means");

  std::vector<std::string> cv_models = {"naive", "krl", "pl"};
  int folds = 8;
  bool per_site = false;
  auto* cv_cmd = app.add_subcommand("cv", "K-fold cross-validated scoring");
  cv_cmd->configurable();
  cv_cmd->add_option("--sites", o.sites_path, "Sites CSV")->required();
  cv_cmd->add_option("--visits", o.visits_path, "Visits CSV")->required();
  cv_cmd->add_option("--models", cv_models,
                     "Model tokens: naive,krl,krq,pl,pq,spl,spq")
      ->delimiter(',');
  cv_cmd->add_option("--folds", folds, "Number of folds");
  cv_cmd->add_flag("--per-site-score", per_site,
                   "Score per site (psi*(1-prod(1-r))) instead of per visit");
  cv_cmd->add_option("--out", o.out_dir, "Output directory")->required();
  add_sampler_options(cv_cmd, o);
  add_prior_options(cv_cmd, o);

  std::vector<double> sim_beta{0.3, 0.8, -0.5}, sim_alpha{0.5, 0.3, 0.2};
  int sim_sites = 265, sim_visits = 3;
  double sim_rho = 0.9, sim_tau2 = 1.0, sim_span = 100.0;
  auto* sim_cmd =
      app.add_subcommand("simulate", "Generate a synthetic survey dataset");
  sim_cmd->configurable();
  sim_cmd->add_option("--model", o.model,
                      "naive | kr | poisson | spatial-poisson");
  sim_cmd->add_option("--covariates", o.covariates, "linear | quadratic");
  sim_cmd->add_flag("--with-elev-forest-interaction",
                    o.elev_forest_interaction,
                    "Add the plain elevation:forest column");
  sim_cmd->add_option("--beta", sim_beta, "True occupancy coefficients")
      ->delimiter(',');
  sim_cmd->add_option("--alpha", sim_alpha, "True detection coefficients")
      ->delimiter(',');
  sim_cmd->add_option("--sites", sim_sites, "Number of sites");
  sim_cmd->add_option("--visits", sim_visits, "Visits per site");
  sim_cmd->add_option("--rho", sim_rho, "CAR rho (spatial model)");
  sim_cmd->add_option("--tau2", sim_tau2, "CAR tau2 (spatial model)");
  sim_cmd->add_option("--span", sim_span, "Coordinate span in km");
  sim_cmd->add_option("--seed", o.seed, "RNG seed");
  sim_cmd->add_option("--out", o.out_dir, "Output directory")->required();

  std::vector<double> taus;
  int qr_n = 50;
  auto* qr_cmd = app.add_subcommand(
      "qr-demo", "Binary quantile-regression identifiability report");
  qr_cmd->configurable();
  qr_cmd->add_option("--taus", taus, "Quantile levels")->delimiter(',');
  qr_cmd->add_option("--n", qr_n, "Simulated dataset size");
  qr_cmd->add_option("--seed", o.seed, "RNG seed");
  qr_cmd->add_option("--out", o.out_dir, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error[config]: " << e.what() << "\n";
    return 2;
  }

  try {
    if (app.got_subcommand(fit_cmd)) return run_fit(app, o);
    if (app.got_subcommand(predict_cmd)) {
      return run_predict(app, artifact_dir, new_sites, o.out_dir, o.seed,
                         max_draws);
    }
    if (app.got_subcommand(curves_cmd)) {
      return run_curves(app, artifact_dir, o.out_dir, curve_terms, curve_grid,
                        curve_average);
    }
    if (app.got_subcommand(cv_cmd)) {
      return run_cv(app, o, cv_models, folds, per_site);
    }
    if (app.got_subcommand(sim_cmd)) {
      return run_simulate(app, o, sim_beta, sim_alpha, sim_sites, sim_visits,
                          sim_rho, sim_tau2, sim_span);
    }
    if (app.got_subcommand(qr_cmd)) {
      return run_qr_demo(app, o.out_dir, taus, qr_n, o.seed);
    }
    std::cerr << "error[config]: no subcommand given\n";
    return 2;
  } catch (const hibreg::IngestError& e) {
    std::cerr << "error[ingest]: " << e.what() << "\n";
    return 3;
  } catch (const hibreg::ConfigError& e) {
    std::cerr << "error[config]: " << e.what() << "\n";
    return 2;
  } catch (const hibreg::DomainError& e) {
    // bad arguments reaching the library are configuration mistakes here
    std::cerr << "error[config]: " << e.what() << "\n";
    return 2;
  } catch (const hibreg::NumericError& e) {
    std::cerr << "error[numeric]: " << e.what() << "\n";
    return 4;
  } catch (const hibreg::Error& e) {
    std::cerr << "error[numeric]: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error[internal]: " << e.what() << "\n";
    return 4;
  }
}
