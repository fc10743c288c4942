#include "hibreg/io.hpp"

#include <zlib.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

namespace hibreg {

namespace {

using nlohmann::json;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  for (char c : line) {
    if (c == ',') {
      out.push_back(field);
      field.clear();
    } else if (c != '\r') {
      field += c;
    }
  }
  out.push_back(field);
  return out;
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;  // keeps original line numbers
  std::vector<long> line_numbers;

  int column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return static_cast<int>(i);
    }
    return -1;
  }
};

CsvTable read_csv(const std::string& path) {
  const std::string content = read_text_file_auto(path);
  CsvTable t;
  std::istringstream in(content);
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    auto fields = split_csv_line(line);
    if (t.header.empty()) {
      t.header = std::move(fields);
    } else {
      t.rows.push_back(std::move(fields));
      t.line_numbers.push_back(line_no);
    }
  }
  if (t.header.empty()) throw IngestError(path + ": empty file");
  return t;
}

int require_column(const CsvTable& t, const std::string& path,
                   const std::string& name) {
  const int c = t.column(name);
  if (c < 0) throw IngestError(path + ": missing column " + name);
  return c;
}

double parse_double(const CsvTable& t, const std::string& path, std::size_t row,
                    int col, const std::string& name) {
  const std::string& s = t.rows[row][static_cast<std::size_t>(col)];
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw IngestError(path + ": line " + std::to_string(t.line_numbers[row]) +
                      ": non-numeric value for " + name + ": '" + s + "'");
  }
}

json design_to_json(const DesignMatrix& d) {
  json j;
  j["bases"] = json::array();
  for (std::size_t b = 0; b < d.base_names().size(); ++b) {
    j["bases"].push_back({{"name", d.base_names()[b]},
                          {"mean", d.standardization()[b].mean},
                          {"sd", d.standardization()[b].sd}});
  }
  j["terms"] = json::array();
  for (const auto& t : d.terms()) {
    json powers = json::array();
    for (const auto& [base, exp] : t.powers) {
      powers.push_back({base, exp});
    }
    j["terms"].push_back({{"name", t.name}, {"powers", powers}});
  }
  json rows = json::array();
  for (Eigen::Index i = 0; i < d.base_values().rows(); ++i) {
    json row = json::array();
    for (Eigen::Index c = 0; c < d.base_values().cols(); ++c) {
      row.push_back(d.base_values()(i, c));
    }
    rows.push_back(std::move(row));
  }
  j["base_values"] = std::move(rows);
  return j;
}

DesignMatrix design_from_json(const json& j) {
  std::vector<std::string> names;
  std::vector<Standardization> stds;
  for (const auto& b : j.at("bases")) {
    names.push_back(b.at("name").get<std::string>());
    stds.push_back({b.at("mean").get<double>(), b.at("sd").get<double>()});
  }
  std::vector<DesignTerm> terms;
  for (const auto& t : j.at("terms")) {
    DesignTerm term;
    term.name = t.at("name").get<std::string>();
    for (const auto& p : t.at("powers")) {
      term.powers.emplace_back(p.at(0).get<int>(), p.at(1).get<int>());
    }
    terms.push_back(std::move(term));
  }
  DesignMatrix d = DesignMatrix::from_schema(std::move(names), std::move(stds),
                                             std::move(terms));
  const auto& rows = j.at("base_values");
  Matrix base(static_cast<Eigen::Index>(rows.size()),
              static_cast<Eigen::Index>(d.base_names().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t c = 0; c < rows[i].size(); ++c) {
      base(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) =
          rows[i][c].get<double>();
    }
  }
  if (base.rows() > 0) d.set_base_values(std::move(base));
  return d;
}

}  // namespace

std::string read_text_file_auto(const std::string& path) {
  gzFile f = gzopen(path.c_str(), "rb");
  if (f == nullptr) throw IngestError("cannot open " + path);
  std::string out;
  char buf[1 << 16];
  int n;
  while ((n = gzread(f, buf, sizeof(buf))) > 0) {
    out.append(buf, static_cast<std::size_t>(n));
  }
  const bool bad = n < 0;
  gzclose(f);
  if (bad) throw IngestError("error while reading " + path);
  return out;
}

void write_text_file(const std::string& path, const std::string& content) {
  if (ends_with(path, ".gz")) {
    // Deterministic gzip: deflate with the gzip wrapper writes mtime = 0
    // unless a header is supplied.
    z_stream strm{};
    if (deflateInit2(&strm, 6, Z_DEFLATED, 15 + 16, 8,
                     Z_DEFAULT_STRATEGY) != Z_OK) {
      throw NumericError("gzip: deflateInit2 failed");
    }
    gz_header header{};
    header.os = 255;  // unknown OS byte, fixed for reproducibility
    deflateSetHeader(&strm, &header);
    std::string out;
    out.resize(deflateBound(&strm, static_cast<uLong>(content.size())));
    strm.next_in =
        reinterpret_cast<Bytef*>(const_cast<char*>(content.data()));
    strm.avail_in = static_cast<uInt>(content.size());
    strm.next_out = reinterpret_cast<Bytef*>(out.data());
    strm.avail_out = static_cast<uInt>(out.size());
    const int rc = deflate(&strm, Z_FINISH);
    if (rc != Z_STREAM_END) {
      deflateEnd(&strm);
      throw NumericError("gzip: deflate failed");
    }
    out.resize(out.size() - strm.avail_out);
    deflateEnd(&strm);
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IngestError("cannot write " + path);
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IngestError("cannot write " + path);
  f.write(content.data(), static_cast<std::streamsize>(content.size()));
}

OccupancyDataset ingest(const std::string& sites_path,
                        const std::string& visits_path, std::string* summary) {
  const CsvTable sites = read_csv(sites_path);
  const int c_id = require_column(sites, sites_path, "site_id");
  const int c_x = require_column(sites, sites_path, "x_km");
  const int c_y = require_column(sites, sites_path, "y_km");
  const int c_elev = require_column(sites, sites_path, "elevation");
  const int c_forest = require_column(sites, sites_path, "forest");

  OccupancyDataset data;
  std::map<std::string, int> site_index;
  for (std::size_t r = 0; r < sites.rows.size(); ++r) {
    Site s;
    s.id = sites.rows[r][static_cast<std::size_t>(c_id)];
    if (s.id.empty()) {
      throw IngestError(sites_path + ": line " +
                        std::to_string(sites.line_numbers[r]) +
                        ": empty site_id");
    }
    if (site_index.count(s.id)) {
      throw IngestError(sites_path + ": line " +
                        std::to_string(sites.line_numbers[r]) +
                        ": duplicate site_id " + s.id);
    }
    s.x_km = parse_double(sites, sites_path, r, c_x, "x_km");
    s.y_km = parse_double(sites, sites_path, r, c_y, "y_km");
    s.elevation = parse_double(sites, sites_path, r, c_elev, "elevation");
    s.forest = parse_double(sites, sites_path, r, c_forest, "forest");
    site_index[s.id] = static_cast<int>(data.sites.size());
    data.sites.push_back(std::move(s));
  }

  const CsvTable visits = read_csv(visits_path);
  const int v_id = require_column(visits, visits_path, "site_id");
  const int v_visit = require_column(visits, visits_path, "visit");
  const int v_y = require_column(visits, visits_path, "y");
  const int v_date = require_column(visits, visits_path, "date");
  const int v_dur = require_column(visits, visits_path, "duration");

  std::set<std::pair<int, int>> seen;
  for (std::size_t r = 0; r < visits.rows.size(); ++r) {
    const long line = visits.line_numbers[r];
    Visit v;
    const std::string& id = visits.rows[r][static_cast<std::size_t>(v_id)];
    const auto it = site_index.find(id);
    if (it == site_index.end()) {
      throw IngestError(visits_path + ": line " + std::to_string(line) +
                        ": unknown site_id " + id);
    }
    v.site = it->second;
    const double visit_no = parse_double(visits, visits_path, r, v_visit, "visit");
    v.number = static_cast<int>(visit_no);
    if (v.number < 1 || visit_no != static_cast<double>(v.number)) {
      throw IngestError(visits_path + ": line " + std::to_string(line) +
                        ": visit must be a positive integer");
    }
    const double y = parse_double(visits, visits_path, r, v_y, "y");
    if (y != 0.0 && y != 1.0) {
      throw IngestError(visits_path + ": line " + std::to_string(line) +
                        ": y must be 0 or 1");
    }
    v.y = static_cast<int>(y);
    v.date = parse_double(visits, visits_path, r, v_date, "date");
    v.duration = parse_double(visits, visits_path, r, v_dur, "duration");
    if (!seen.insert({v.site, v.number}).second) {
      throw IngestError(visits_path + ": line " + std::to_string(line) +
                        ": duplicate (site_id, visit) = (" + id + ", " +
                        std::to_string(v.number) + ")");
    }
    data.visits.push_back(v);
  }
  data.index_visits();

  if (summary != nullptr) {
    int max_visits = 0;
    for (const auto& sv : data.site_visits) {
      max_visits = std::max(max_visits, static_cast<int>(sv.size()));
    }
    int short_sites = 0;
    for (const auto& sv : data.site_visits) {
      if (static_cast<int>(sv.size()) < max_visits) ++short_sites;
    }
    std::ostringstream os;
    os << "sites: " << data.n_sites() << ", visit rows: " << data.n_visits()
       << ", max visits per site: " << max_visits
       << ", sites with missing visits: " << short_sites;
    *summary = os.str();
  }
  return data;
}

void write_sites_csv(const std::string& path, const OccupancyDataset& data) {
  std::ostringstream os;
  os << "site_id,x_km,y_km,elevation,forest\n";
  for (const auto& s : data.sites) {
    os << s.id << ',' << fmt(s.x_km) << ',' << fmt(s.y_km) << ','
       << fmt(s.elevation) << ',' << fmt(s.forest) << '\n';
  }
  write_text_file(path, os.str());
}

void write_visits_csv(const std::string& path, const OccupancyDataset& data) {
  std::ostringstream os;
  os << "site_id,visit,y,date,duration\n";
  for (const auto& v : data.visits) {
    os << data.sites[static_cast<std::size_t>(v.site)].id << ',' << v.number
       << ',' << v.y << ',' << fmt(v.date) << ',' << fmt(v.duration) << '\n';
  }
  write_text_file(path, os.str());
}

void write_samples_csv(const std::string& path,
                       const PosteriorSamples& samples) {
  std::ostringstream os;
  os << "chain,iter,parameter,value\n";
  for (int c = 0; c < samples.n_chains(); ++c) {
    const Matrix& m = samples.chains[static_cast<std::size_t>(c)];
    for (Eigen::Index t = 0; t < m.rows(); ++t) {
      for (Eigen::Index p = 0; p < m.cols(); ++p) {
        os << c << ',' << t << ','
           << samples.names[static_cast<std::size_t>(p)] << ','
           << fmt(m(t, p)) << '\n';
      }
    }
  }
  write_text_file(path, os.str());
}

PosteriorSamples read_samples_csv(const std::string& path) {
  const CsvTable t = read_csv(path);
  const int c_chain = require_column(t, path, "chain");
  const int c_iter = require_column(t, path, "iter");
  const int c_param = require_column(t, path, "parameter");
  const int c_value = require_column(t, path, "value");

  PosteriorSamples s;
  std::map<std::string, int> param_index;
  int n_chains = 0;
  long n_kept = 0;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const std::string& name = t.rows[r][static_cast<std::size_t>(c_param)];
    if (!param_index.count(name)) {
      param_index[name] = static_cast<int>(s.names.size());
      s.names.push_back(name);
    }
    n_chains = std::max(
        n_chains,
        1 + static_cast<int>(parse_double(t, path, r, c_chain, "chain")));
    n_kept = std::max(
        n_kept, 1 + static_cast<long>(parse_double(t, path, r, c_iter, "iter")));
  }
  for (int c = 0; c < n_chains; ++c) {
    s.chains.emplace_back(
        Matrix::Zero(n_kept, static_cast<Eigen::Index>(s.names.size())));
  }
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const int c = static_cast<int>(parse_double(t, path, r, c_chain, "chain"));
    const long it = static_cast<long>(parse_double(t, path, r, c_iter, "iter"));
    const int p = param_index.at(t.rows[r][static_cast<std::size_t>(c_param)]);
    s.chains[static_cast<std::size_t>(c)](it, p) =
        parse_double(t, path, r, c_value, "value");
  }
  return s;
}

void write_summary_json(const std::string& path,
                        const PosteriorSamples& samples,
                        const Diagnostics& diag, const FitReport& report) {
  json j;
  j["parameters"] = json::object();
  for (int p = 0; p < samples.n_params(); ++p) {
    const Vector v = samples.stacked(p);
    std::vector<double> sorted(v.data(), v.data() + v.size());
    std::sort(sorted.begin(), sorted.end());
    auto q = [&](double qq) {
      const double h = qq * (static_cast<double>(sorted.size()) - 1.0);
      const std::size_t i = static_cast<std::size_t>(h);
      if (i + 1 >= sorted.size()) return sorted.back();
      const double f = h - static_cast<double>(i);
      return sorted[i] * (1.0 - f) + sorted[i + 1] * f;
    };
    const double mean = v.mean();
    const double sd =
        std::sqrt((v.array() - mean).square().sum() /
                  std::max<double>(1.0, static_cast<double>(v.size()) - 1.0));
    json pj{{"mean", mean},   {"sd", sd},        {"q2.5", q(0.025)},
            {"q25", q(0.25)}, {"q50", q(0.5)},   {"q75", q(0.75)},
            {"q97.5", q(0.975)}};
    const double ess = diag.ess[static_cast<std::size_t>(p)];
    const double rhat = diag.rhat[static_cast<std::size_t>(p)];
    if (std::isfinite(ess)) pj["ess"] = ess;
    if (std::isfinite(rhat)) pj["rhat"] = rhat;
    j["parameters"][samples.names[static_cast<std::size_t>(p)]] = pj;
  }
  j["acceptance"] = report.acceptance;
  json warnings = json::array();
  for (const auto& w : report.warnings) warnings.push_back(w);
  for (const auto& w : diag.warnings) warnings.push_back(w);
  j["warnings"] = warnings;
  write_text_file(path, j.dump(2) + "\n");
}

void save_artifact(const std::string& dir, const FittedModel& model,
                   bool compress) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const long total_values = static_cast<long>(model.samples.n_chains()) *
                            model.samples.n_kept() * model.samples.n_params();
  const bool gz = compress || total_values > 1000000L;
  const std::string samples_file = gz ? "samples.csv.gz" : "samples.csv";

  json j;
  j["schema"] = "hibreg/model-artifact/v1";
  j["model"] = {{"kind", to_string(model.spec.kind)},
                {"covariates", to_string(model.spec.covariates)},
                {"elev_forest_interaction", model.spec.elev_forest_interaction}};
  j["priors"] = {{"beta_sd", model.priors.beta_sd},
                 {"alpha_sd", model.priors.alpha_sd},
                 {"psi_a", model.priors.psi_a},
                 {"psi_b", model.priors.psi_b},
                 {"r_a", model.priors.r_a},
                 {"r_b", model.priors.r_b},
                 {"rho_min", model.priors.rho_min},
                 {"tau2_shape", model.priors.tau2_shape},
                 {"tau2_rate", model.priors.tau2_rate}};
  j["sampler"] = {{"n_iter", model.sampler.n_iter},
                  {"n_burnin", model.sampler.n_burnin},
                  {"n_chains", model.sampler.n_chains},
                  {"thin", model.sampler.thin},
                  {"seed", model.sampler.seed}};
  j["site_ids"] = model.site_ids;
  if (model.spec.kind != ModelKind::naive) {
    j["occupancy_design"] = design_to_json(model.occ_design);
    j["detection_design"] = design_to_json(model.det_design);
  }
  if (model.graph.has_value()) {
    json coords = json::array();
    for (const auto& p : model.graph->coordinates) {
      coords.push_back({p[0], p[1]});
    }
    json edges = json::array();
    for (const auto& [a, b] : model.graph->edges()) edges.push_back({a, b});
    j["graph"] = {{"coordinates", coords}, {"edges", edges}};
  }
  j["samples_file"] = samples_file;
  write_text_file(dir + "/artifact.json", j.dump(2) + "\n");
  write_samples_csv(dir + "/" + samples_file, model.samples);
}

FittedModel load_artifact(const std::string& dir) {
  const json j = json::parse(read_text_file_auto(dir + "/artifact.json"));
  if (j.at("schema").get<std::string>() != "hibreg/model-artifact/v1") {
    throw IngestError("unrecognized artifact schema in " + dir);
  }
  FittedModel m;
  m.spec.kind = parse_model_kind(j.at("model").at("kind").get<std::string>());
  m.spec.covariates =
      parse_collection(j.at("model").at("covariates").get<std::string>());
  m.spec.elev_forest_interaction =
      j.at("model").at("elev_forest_interaction").get<bool>();
  const auto& pj = j.at("priors");
  m.priors.beta_sd = pj.at("beta_sd").get<double>();
  m.priors.alpha_sd = pj.at("alpha_sd").get<double>();
  m.priors.psi_a = pj.at("psi_a").get<double>();
  m.priors.psi_b = pj.at("psi_b").get<double>();
  m.priors.r_a = pj.at("r_a").get<double>();
  m.priors.r_b = pj.at("r_b").get<double>();
  m.priors.rho_min = pj.at("rho_min").get<double>();
  m.priors.tau2_shape = pj.at("tau2_shape").get<double>();
  m.priors.tau2_rate = pj.at("tau2_rate").get<double>();
  const auto& sj = j.at("sampler");
  m.sampler.n_iter = sj.at("n_iter").get<int>();
  m.sampler.n_burnin = sj.at("n_burnin").get<int>();
  m.sampler.n_chains = sj.at("n_chains").get<int>();
  m.sampler.thin = sj.at("thin").get<int>();
  m.sampler.seed = sj.at("seed").get<std::uint64_t>();
  m.site_ids = j.at("site_ids").get<std::vector<std::string>>();
  if (j.contains("occupancy_design")) {
    m.occ_design = design_from_json(j.at("occupancy_design"));
    m.det_design = design_from_json(j.at("detection_design"));
  }
  if (j.contains("graph")) {
    std::vector<std::array<double, 2>> coords;
    for (const auto& p : j.at("graph").at("coordinates")) {
      coords.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
    }
    std::vector<std::pair<int, int>> edges;
    for (const auto& e : j.at("graph").at("edges")) {
      edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
    }
    m.graph = graph_from_edges(std::move(coords), edges);
  }
  m.samples = read_samples_csv(dir + "/" +
                               j.at("samples_file").get<std::string>());
  m.rebuild_indices();
  return m;
}

PredictionInput read_prediction_csv(const std::string& path) {
  const CsvTable t = read_csv(path);
  const int c_id = require_column(t, path, "site_id");
  const int c_elev = require_column(t, path, "elevation");
  const int c_forest = require_column(t, path, "forest");
  const int c_x = t.column("x_km");
  const int c_y = t.column("y_km");
  const int c_date = t.column("date");
  const int c_dur = t.column("duration");
  if ((c_x < 0) != (c_y < 0)) {
    throw IngestError(path + ": x_km and y_km must appear together");
  }
  if ((c_date < 0) != (c_dur < 0)) {
    throw IngestError(path + ": date and duration must appear together");
  }

  PredictionInput input;
  const std::size_t n = t.rows.size();
  Vector elev(static_cast<Eigen::Index>(n)), forest(static_cast<Eigen::Index>(n));
  Vector date(static_cast<Eigen::Index>(n)), dur(static_cast<Eigen::Index>(n));
  for (std::size_t r = 0; r < n; ++r) {
    input.ids.push_back(t.rows[r][static_cast<std::size_t>(c_id)]);
    elev[static_cast<Eigen::Index>(r)] =
        parse_double(t, path, r, c_elev, "elevation");
    forest[static_cast<Eigen::Index>(r)] =
        parse_double(t, path, r, c_forest, "forest");
    if (c_x >= 0) {
      input.coordinates.push_back({parse_double(t, path, r, c_x, "x_km"),
                                   parse_double(t, path, r, c_y, "y_km")});
    }
    if (c_date >= 0) {
      date[static_cast<Eigen::Index>(r)] =
          parse_double(t, path, r, c_date, "date");
      dur[static_cast<Eigen::Index>(r)] =
          parse_double(t, path, r, c_dur, "duration");
    }
  }
  input.occ_covariates.add("elevation", std::move(elev));
  input.occ_covariates.add("forest", std::move(forest));
  if (c_date >= 0) {
    CovariateTable det;
    det.add("date", std::move(date));
    det.add("duration", std::move(dur));
    input.det_covariates = std::move(det);
  }
  return input;
}

namespace {

void append_quantiles(std::ostringstream& os, const Matrix& draws, int col) {
  std::vector<double> v(static_cast<std::size_t>(draws.rows()));
  for (Eigen::Index d = 0; d < draws.rows(); ++d) {
    v[static_cast<std::size_t>(d)] = draws(d, col);
  }
  std::sort(v.begin(), v.end());
  auto q = [&](double qq) {
    const double h = qq * (static_cast<double>(v.size()) - 1.0);
    const std::size_t i = static_cast<std::size_t>(h);
    if (i + 1 >= v.size()) return v.back();
    const double f = h - static_cast<double>(i);
    return v[i] * (1.0 - f) + v[i + 1] * f;
  };
  os << ',' << fmt(q(0.025)) << ',' << fmt(q(0.5)) << ',' << fmt(q(0.975));
}

}  // namespace

void write_prediction_csv(const std::string& path,
                          const PredictionDraws& draws) {
  const bool lambda = draws.lambda.size() > 0;
  const bool phat = draws.phat.size() > 0;
  std::ostringstream os;
  os << "site_id,psi_q2.5,psi_q50,psi_q97.5";
  if (lambda) os << ",lambda_q2.5,lambda_q50,lambda_q97.5";
  if (phat) os << ",phat_q2.5,phat_q50,phat_q97.5";
  os << '\n';
  for (std::size_t i = 0; i < draws.ids.size(); ++i) {
    os << draws.ids[i];
    append_quantiles(os, draws.psi, static_cast<int>(i));
    if (lambda) append_quantiles(os, draws.lambda, static_cast<int>(i));
    if (phat) append_quantiles(os, draws.phat, static_cast<int>(i));
    os << '\n';
  }
  write_text_file(path, os.str());
}

void write_curves_csv(const std::string& path,
                      const std::vector<NamedCurve>& curves) {
  std::ostringstream os;
  os << "target,term,kind,x,q2.5,q50,q97.5\n";
  for (const auto& c : curves) {
    for (Eigen::Index g = 0; g < c.curve.grid.size(); ++g) {
      os << c.target << ',' << c.curve.term << ',' << c.kind << ','
         << fmt(c.curve.grid[g]) << ',' << fmt(c.curve.lower[g]) << ','
         << fmt(c.curve.median[g]) << ',' << fmt(c.curve.upper[g]) << '\n';
    }
  }
  write_text_file(path, os.str());
}

void write_scores_csv(const std::string& path, const ScoreReport& report) {
  std::ostringstream os;
  os << "model,fold,expected_score\n";
  for (std::size_t m = 0; m < report.model_names.size(); ++m) {
    for (int k = 0; k < report.K; ++k) {
      os << report.model_names[m] << ',' << k << ','
         << fmt(report.scores(static_cast<Eigen::Index>(m), k)) << '\n';
    }
  }
  write_text_file(path, os.str());
}

void write_edges_csv(const std::string& path, const NeighborhoodGraph& graph,
                     const std::vector<std::string>& site_ids) {
  std::ostringstream os;
  os << "site_a,site_b\n";
  for (const auto& [a, b] : graph.edges()) {
    os << site_ids[static_cast<std::size_t>(a)] << ','
       << site_ids[static_cast<std::size_t>(b)] << '\n';
  }
  write_text_file(path, os.str());
}

}  // namespace hibreg
