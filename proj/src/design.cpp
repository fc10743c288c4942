#include "hibreg/design.hpp"

#include <algorithm>
#include <cmath>

namespace hibreg {

bool CovariateTable::has(const std::string& name) const {
  return std::find(names.begin(), names.end(), name) != names.end();
}

const Vector& CovariateTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return columns[i];
  }
  throw IngestError("covariate column not found: " + name);
}

void CovariateTable::add(const std::string& name, Vector values) {
  if (!columns.empty() && values.size() != rows()) {
    throw IngestError("covariate column " + name + " has mismatched length");
  }
  names.push_back(name);
  columns.push_back(std::move(values));
}

std::string to_string(CovariateCollection c) {
  return c == CovariateCollection::linear ? "linear" : "quadratic";
}

CovariateCollection parse_collection(const std::string& s) {
  if (s == "linear" || s == "l") return CovariateCollection::linear;
  if (s == "quadratic" || s == "q") return CovariateCollection::quadratic;
  throw ConfigError("unknown covariate collection: " + s);
}

DesignMatrix DesignMatrix::from_schema(std::vector<std::string> base_names,
                                       std::vector<Standardization> base_std,
                                       std::vector<DesignTerm> terms) {
  if (base_names.size() != base_std.size()) {
    throw DomainError("design schema: base name/standardization mismatch");
  }
  DesignMatrix d;
  d.base_names_ = std::move(base_names);
  d.base_std_ = std::move(base_std);
  d.terms_ = std::move(terms);
  return d;
}

void DesignMatrix::set_base_values(Matrix base_values) {
  if (base_values.cols() != static_cast<Eigen::Index>(base_names_.size())) {
    throw DomainError("set_base_values: column count mismatch");
  }
  base_values_ = std::move(base_values);
  values_.resize(base_values_.rows(), cols());
  for (Eigen::Index i = 0; i < base_values_.rows(); ++i) {
    values_.row(i) = row_from_standardized(base_values_.row(i)).transpose();
  }
}

std::vector<std::string> DesignMatrix::term_names() const {
  std::vector<std::string> out;
  out.reserve(terms_.size());
  for (const auto& t : terms_) out.push_back(t.name);
  return out;
}

int DesignMatrix::base_index(const std::string& name) const {
  for (std::size_t i = 0; i < base_names_.size(); ++i) {
    if (base_names_[i] == name) return static_cast<int>(i);
  }
  return -1;
}

Vector DesignMatrix::standardize(const Vector& raw_bases) const {
  if (raw_bases.size() != static_cast<Eigen::Index>(base_names_.size())) {
    throw DomainError("standardize: wrong number of base covariates");
  }
  Vector out(raw_bases.size());
  for (Eigen::Index i = 0; i < raw_bases.size(); ++i) {
    out[i] = (raw_bases[i] - base_std_[i].mean) / base_std_[i].sd;
  }
  return out;
}

Vector DesignMatrix::row_from_standardized(const Vector& std_bases) const {
  Vector row(cols());
  for (Eigen::Index c = 0; c < cols(); ++c) {
    double v = 1.0;
    for (const auto& [b, e] : terms_[c].powers) {
      for (int k = 0; k < e; ++k) v *= std_bases[b];
    }
    row[c] = v;
  }
  return row;
}

Vector DesignMatrix::row_from_raw(const Vector& raw_bases) const {
  return row_from_standardized(standardize(raw_bases));
}

Matrix DesignMatrix::bases_from_raw(const CovariateTable& raw) const {
  const Eigen::Index n = raw.rows();
  Matrix bases(n, static_cast<Eigen::Index>(base_names_.size()));
  for (std::size_t b = 0; b < base_names_.size(); ++b) {
    if (!raw.has(base_names_[b])) {
      throw IngestError("missing covariate column: " + base_names_[b]);
    }
    const Vector& col = raw.column(base_names_[b]);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!std::isfinite(col[i])) {
        throw IngestError("non-finite value in covariate " + base_names_[b]);
      }
      bases(i, static_cast<Eigen::Index>(b)) =
          (col[i] - base_std_[b].mean) / base_std_[b].sd;
    }
  }
  return bases;
}

Matrix DesignMatrix::rows_from_raw(const CovariateTable& raw) const {
  const Matrix bases = bases_from_raw(raw);
  Matrix X(bases.rows(), cols());
  for (Eigen::Index i = 0; i < bases.rows(); ++i) {
    X.row(i) = row_from_standardized(bases.row(i)).transpose();
  }
  return X;
}

double DesignMatrix::eta(const Vector& std_bases, const Vector& beta) const {
  if (beta.size() != cols()) {
    throw DomainError("eta: coefficient length does not match design columns");
  }
  return row_from_standardized(std_bases).dot(beta);
}

double DesignMatrix::deta_dbase(int base, const Vector& std_bases,
                                const Vector& beta) const {
  double grad = 0.0;
  for (Eigen::Index c = 0; c < cols(); ++c) {
    int exponent = 0;
    double rest = 1.0;
    for (const auto& [b, e] : terms_[c].powers) {
      if (b == base) {
        exponent = e;
      } else {
        for (int k = 0; k < e; ++k) rest *= std_bases[b];
      }
    }
    if (exponent == 0) continue;
    double dpow = static_cast<double>(exponent);
    for (int k = 0; k < exponent - 1; ++k) dpow *= std_bases[base];
    grad += beta[c] * dpow * rest;
  }
  return grad;
}

namespace {

Standardization column_standardization(const Vector& col,
                                       const std::string& name) {
  const Eigen::Index n = col.size();
  if (n < 2) throw IngestError("covariate " + name + " needs >= 2 rows");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!std::isfinite(col[i])) {
      throw IngestError("non-finite value in covariate " + name);
    }
  }
  Standardization s;
  s.mean = col.mean();
  const double ss = (col.array() - s.mean).square().sum();
  s.sd = std::sqrt(ss / static_cast<double>(n - 1));
  if (!(s.sd > 0.0)) {
    throw IngestError("covariate " + name + " is constant; cannot standardize");
  }
  return s;
}

}  // namespace

DesignMatrix build_design(const CovariateTable& raw,
                          CovariateCollection collection, DesignTarget target,
                          bool elev_forest_interaction) {
  const bool occ = target == DesignTarget::occupancy;
  const std::vector<std::string> bases =
      occ ? std::vector<std::string>{"elevation", "forest"}
          : std::vector<std::string>{"date", "duration"};
  for (const auto& b : bases) {
    if (!raw.has(b)) throw IngestError("missing covariate column: " + b);
  }

  DesignMatrix d;
  d.base_names_ = bases;
  for (const auto& b : bases) {
    d.base_std_.push_back(column_standardization(raw.column(b), b));
  }

  d.terms_.push_back({"intercept", {}});
  if (occ) {
    d.terms_.push_back({"elevation", {{0, 1}}});
    d.terms_.push_back({"forest", {{1, 1}}});
    if (collection == CovariateCollection::quadratic) {
      d.terms_.push_back({"elevation^2", {{0, 2}}});
      d.terms_.push_back({"forest^2", {{1, 2}}});
      d.terms_.push_back({"elevation^2:forest", {{0, 2}, {1, 1}}});
      d.terms_.push_back({"elevation:forest^2", {{0, 1}, {1, 2}}});
    }
    if (elev_forest_interaction) {
      d.terms_.push_back({"elevation:forest", {{0, 1}, {1, 1}}});
    }
  } else {
    d.terms_.push_back({"date", {{0, 1}}});
    d.terms_.push_back({"duration", {{1, 1}}});
    if (collection == CovariateCollection::quadratic) {
      d.terms_.push_back({"duration^2", {{1, 2}}});
    }
  }

  d.base_values_ = d.bases_from_raw(raw);
  d.values_.resize(d.base_values_.rows(), d.cols());
  for (Eigen::Index i = 0; i < d.base_values_.rows(); ++i) {
    d.values_.row(i) =
        d.row_from_standardized(d.base_values_.row(i)).transpose();
  }
  return d;
}

}  // namespace hibreg
