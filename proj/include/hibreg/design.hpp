#pragma once

#include <string>
#include <utility>
#include <vector>

#include "hibreg/types.hpp"

namespace hibreg {

/// A named table of raw covariate columns, all the same length.
struct CovariateTable {
  std::vector<std::string> names;
  std::vector<Vector> columns;

  Eigen::Index rows() const { return columns.empty() ? 0 : columns[0].size(); }
  bool has(const std::string& name) const;
  const Vector& column(const std::string& name) const;
  void add(const std::string& name, Vector values);
};

enum class CovariateCollection { linear, quadratic };
enum class DesignTarget { occupancy, detection };

std::string to_string(CovariateCollection c);
CovariateCollection parse_collection(const std::string& s);

/// Per-covariate centering/scaling constants, stored with the model so that
/// predictions on raw new data reproduce the training transformation.
struct Standardization {
  double mean = 0.0;
  double sd = 1.0;
};

/// One design column: a product of powers of standardized base covariates.
/// An empty power list is the intercept.
struct DesignTerm {
  std::string name;
  std::vector<std::pair<int, int>> powers;  // (base index, exponent)
};

/// Design matrix with stored standardization and term structure. Base
/// covariates are centered and scaled first; polynomial and interaction
/// columns are exact products of the standardized base columns.
class DesignMatrix {
 public:
  DesignMatrix() = default;

  /// Rebuild a design from persisted schema pieces (no data rows).
  static DesignMatrix from_schema(std::vector<std::string> base_names,
                                  std::vector<Standardization> base_std,
                                  std::vector<DesignTerm> terms);

  /// Restore the standardized training rows (recomputes the term columns).
  void set_base_values(Matrix base_values);

  Eigen::Index rows() const { return values_.rows(); }
  Eigen::Index cols() const { return static_cast<Eigen::Index>(terms_.size()); }

  const Matrix& values() const { return values_; }
  const Matrix& base_values() const { return base_values_; }
  const std::vector<DesignTerm>& terms() const { return terms_; }
  const std::vector<std::string>& base_names() const { return base_names_; }
  const std::vector<Standardization>& standardization() const {
    return base_std_;
  }
  std::vector<std::string> term_names() const;
  int base_index(const std::string& name) const;  // -1 when absent

  /// Standardize one raw base-covariate vector (ordered as base_names).
  Vector standardize(const Vector& raw_bases) const;

  /// Design row for standardized base values.
  Vector row_from_standardized(const Vector& std_bases) const;

  /// Design row for raw base values (applies stored standardization).
  Vector row_from_raw(const Vector& raw_bases) const;

  /// Design rows for a raw table; columns looked up by base name.
  Matrix rows_from_raw(const CovariateTable& raw) const;

  /// Standardized base values for a raw table (n x n_bases).
  Matrix bases_from_raw(const CovariateTable& raw) const;

  double eta(const Vector& std_bases, const Vector& beta) const;

  /// d eta / d (standardized base covariate), analytic through every
  /// polynomial and interaction term.
  double deta_dbase(int base, const Vector& std_bases,
                    const Vector& beta) const;

 private:
  friend DesignMatrix build_design(const CovariateTable&, CovariateCollection,
                                   DesignTarget, bool);
  std::vector<std::string> base_names_;
  std::vector<Standardization> base_std_;
  std::vector<DesignTerm> terms_;
  Matrix base_values_;  // standardized base columns (n x n_bases)
  Matrix values_;       // term columns (n x n_terms)
};

/// Build the design for one of the two covariate collections.
///
/// occupancy linear:    intercept, elevation, forest
/// occupancy quadratic: + elevation^2, forest^2, elevation^2:forest,
///                        elevation:forest^2
/// detection linear:    intercept, date, duration
/// detection quadratic: + duration^2
///
/// The plain elevation:forest interaction is off by default and enabled via
/// the flag. Throws IngestError when a required column is missing.
DesignMatrix build_design(const CovariateTable& raw,
                          CovariateCollection collection, DesignTarget target,
                          bool elev_forest_interaction = false);

}  // namespace hibreg
