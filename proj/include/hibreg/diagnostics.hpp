#pragma once

#include <string>
#include <vector>

#include "hibreg/mcmc.hpp"
#include "hibreg/types.hpp"

namespace hibreg {

struct Diagnostics {
  std::vector<std::string> names;
  std::vector<double> ess;
  std::vector<double> rhat;  // NaN with a warning when only one chain
  std::vector<std::string> warnings;
};

/// Rank-normalized split R-hat over the given chains. Returns a large value
/// when the within-chain variance vanishes but chains disagree.
double split_rhat_rank_normalized(const std::vector<Vector>& chains);

/// Multi-chain effective sample size via autocorrelations combined across
/// chains, truncated by the initial-monotone-positive-pair rule.
double effective_sample_size(const std::vector<Vector>& chains);

Diagnostics diagnostics(const PosteriorSamples& samples);

}  // namespace hibreg
