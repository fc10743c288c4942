#pragma once

#include <string>
#include <vector>

#include "hibreg/diagnostics.hpp"
#include "hibreg/mcmc.hpp"
#include "hibreg/occupancy.hpp"
#include "hibreg/predict.hpp"
#include "hibreg/scoring.hpp"
#include "hibreg/types.hpp"

namespace hibreg {

/// Read the two survey CSVs.
///   sites:  site_id, x_km, y_km, elevation, forest
///   visits: site_id, visit, y, date, duration
/// Extra columns are ignored; every validation failure names the offending
/// line. When summary is given it receives row counts and a missing-visit
/// breakdown.
OccupancyDataset ingest(const std::string& sites_path,
                        const std::string& visits_path,
                        std::string* summary = nullptr);

void write_sites_csv(const std::string& path, const OccupancyDataset& data);
void write_visits_csv(const std::string& path, const OccupancyDataset& data);

/// Posterior draws in long format: chain, iter, parameter, value. A ".gz"
/// suffix writes a deterministic gzip stream (zero mtime).
void write_samples_csv(const std::string& path,
                       const PosteriorSamples& samples);
PosteriorSamples read_samples_csv(const std::string& path);

void write_summary_json(const std::string& path,
                        const PosteriorSamples& samples,
                        const Diagnostics& diag, const FitReport& report);

/// Persist / restore a fitted model. The directory receives artifact.json
/// plus samples.csv (or samples.csv.gz when compress is set or the draw
/// count exceeds ~10^6 values).
void save_artifact(const std::string& dir, const FittedModel& model,
                   bool compress = false);
FittedModel load_artifact(const std::string& dir);

/// New-site table for predict: site_id [, x_km, y_km], elevation, forest
/// [, date, duration].
PredictionInput read_prediction_csv(const std::string& path);

void write_prediction_csv(const std::string& path,
                          const PredictionDraws& draws);

struct NamedCurve {
  std::string target;  // "occupancy" | "detection"
  std::string kind;    // "curve" | "gradient"
  ProbabilityCurve curve;
};

void write_curves_csv(const std::string& path,
                      const std::vector<NamedCurve>& curves);

void write_scores_csv(const std::string& path, const ScoreReport& report);

/// Adjacency edge list (site_id_a, site_id_b) for inspection.
void write_edges_csv(const std::string& path, const NeighborhoodGraph& graph,
                     const std::vector<std::string>& site_ids);

std::string read_text_file_auto(const std::string& path);  // plain or gzip
void write_text_file(const std::string& path, const std::string& content);

}  // namespace hibreg
