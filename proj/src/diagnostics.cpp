#include "hibreg/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "hibreg/normal.hpp"

namespace hibreg {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<Vector> split_in_half(const std::vector<Vector>& chains) {
  std::vector<Vector> out;
  for (const auto& c : chains) {
    const Eigen::Index h = c.size() / 2;
    if (h < 2) throw DomainError("diagnostics: chains too short to split");
    out.push_back(c.head(h));
    out.push_back(c.segment(h, h));
  }
  return out;
}

// Pooled ranks (average rank for ties) mapped through the normal quantile:
// z = Phi^{-1}((rank - 3/8) / (N + 1/4)).
std::vector<Vector> rank_normalize(const std::vector<Vector>& chains) {
  std::size_t total = 0;
  for (const auto& c : chains) total += static_cast<std::size_t>(c.size());
  struct Entry {
    double value;
    std::size_t chain;
    Eigen::Index pos;
  };
  std::vector<Entry> entries;
  entries.reserve(total);
  for (std::size_t m = 0; m < chains.size(); ++m) {
    for (Eigen::Index i = 0; i < chains[m].size(); ++i) {
      entries.push_back({chains[m][i], m, i});
    }
  }
  std::stable_sort(entries.begin(), entries.end(),
                   [](const Entry& a, const Entry& b) {
                     return a.value < b.value;
                   });
  std::vector<Vector> out(chains.size());
  for (std::size_t m = 0; m < chains.size(); ++m) {
    out[m] = Vector::Zero(chains[m].size());
  }
  const double n = static_cast<double>(total);
  std::size_t i = 0;
  while (i < entries.size()) {
    std::size_t j = i;
    while (j < entries.size() && entries[j].value == entries[i].value) ++j;
    const double avg_rank = 0.5 * (static_cast<double>(i + 1) +
                                   static_cast<double>(j));  // 1-based
    const double z = norm_quantile((avg_rank - 0.375) / (n + 0.25));
    for (std::size_t k = i; k < j; ++k) {
      out[entries[k].chain][entries[k].pos] = z;
    }
    i = j;
  }
  return out;
}

struct ChainMoments {
  double within = 0.0;   // W: mean of within-chain variances
  double between = 0.0;  // B
  double var_plus = 0.0;
  std::vector<double> means, vars;
};

ChainMoments moments(const std::vector<Vector>& chains) {
  ChainMoments m;
  const double n = static_cast<double>(chains[0].size());
  for (const auto& c : chains) {
    const double mu = c.mean();
    m.means.push_back(mu);
    m.vars.push_back((c.array() - mu).square().sum() / (n - 1.0));
  }
  const double grand =
      std::accumulate(m.means.begin(), m.means.end(), 0.0) / m.means.size();
  double b = 0.0;
  for (double mu : m.means) b += (mu - grand) * (mu - grand);
  m.between = m.means.size() > 1
                  ? n * b / (static_cast<double>(m.means.size()) - 1.0)
                  : 0.0;
  m.within =
      std::accumulate(m.vars.begin(), m.vars.end(), 0.0) / m.vars.size();
  m.var_plus = (n - 1.0) / n * m.within + m.between / n;
  return m;
}

// Autocovariance at one lag (biased 1/n normalization).
double autocov(const Vector& c, double mean, Eigen::Index lag) {
  const Eigen::Index n = c.size();
  double s = 0.0;
  for (Eigen::Index i = 0; i + lag < n; ++i) {
    s += (c[i] - mean) * (c[i + lag] - mean);
  }
  return s / static_cast<double>(n);
}

}  // namespace

double split_rhat_rank_normalized(const std::vector<Vector>& chains) {
  if (chains.size() < 2) {
    throw DomainError("split_rhat: need at least 2 chains");
  }
  const Eigen::Index len = chains[0].size();
  for (const auto& c : chains) {
    if (c.size() != len) throw DomainError("split_rhat: unequal chain lengths");
  }
  const auto z = rank_normalize(split_in_half(chains));
  const ChainMoments m = moments(z);
  if (m.within <= 0.0) {
    // Constant chains: identical (rhat 1) or separated (rhat infinite).
    return m.between <= 0.0 ? 1.0
                            : std::numeric_limits<double>::infinity();
  }
  return std::sqrt(m.var_plus / m.within);
}

double effective_sample_size(const std::vector<Vector>& chains) {
  if (chains.empty()) throw DomainError("ess: no chains");
  const Eigen::Index n = chains[0].size();
  if (n < 4) throw DomainError("ess: chains too short");
  const std::size_t m = chains.size();
  ChainMoments mom = moments(chains);
  if (mom.var_plus <= 0.0) return kNaN;  // constant draws

  // Combined autocorrelations: rho_t = 1 - (W - mean_m s_m^2 rho_{m,t}) / var+
  // truncated by Geyer's initial monotone positive pair rule.
  double tau = 1.0;
  double prev_pair = std::numeric_limits<double>::infinity();
  for (Eigen::Index t = 1; t + 1 < n; t += 2) {
    double acov_t = 0.0, acov_t1 = 0.0;
    for (std::size_t c = 0; c < m; ++c) {
      acov_t += autocov(chains[c], mom.means[c], t);
      acov_t1 += autocov(chains[c], mom.means[c], t + 1);
    }
    acov_t /= static_cast<double>(m);
    acov_t1 /= static_cast<double>(m);
    // n/(n-1) rescales the biased autocovariance to match the sample variance
    const double scale = static_cast<double>(n) / (n - 1.0);
    const double rho_t =
        1.0 - (mom.within - scale * acov_t) / mom.var_plus;
    const double rho_t1 =
        1.0 - (mom.within - scale * acov_t1) / mom.var_plus;
    double pair = rho_t + rho_t1;
    if (pair < 0.0) break;
    pair = std::min(pair, prev_pair);  // enforce monotone decrease
    prev_pair = pair;
    tau += 2.0 * pair;
  }
  const double total = static_cast<double>(m) * static_cast<double>(n);
  return std::min(total / tau, total * std::log10(total));
}

Diagnostics diagnostics(const PosteriorSamples& samples) {
  Diagnostics d;
  d.names = samples.names;
  const int p = samples.n_params();
  d.ess.assign(static_cast<std::size_t>(p), kNaN);
  d.rhat.assign(static_cast<std::size_t>(p), kNaN);
  const bool single = samples.n_chains() < 2;
  if (single) {
    d.warnings.push_back("single chain: rhat omitted");
  }
  for (int j = 0; j < p; ++j) {
    std::vector<Vector> per_chain;
    per_chain.reserve(static_cast<std::size_t>(samples.n_chains()));
    for (const auto& c : samples.chains) per_chain.push_back(c.col(j));
    d.ess[static_cast<std::size_t>(j)] = effective_sample_size(per_chain);
    if (!single) {
      d.rhat[static_cast<std::size_t>(j)] =
          split_rhat_rank_normalized(per_chain);
    }
  }
  return d;
}

}  // namespace hibreg
