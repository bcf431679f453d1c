#ifndef DECOQ_DISTRIBUTION_HPP
#define DECOQ_DISTRIBUTION_HPP

#include <utility>
#include <vector>

#include "decoq/operator_space.hpp"

namespace decoq {

enum class CapKind { none, ad_depth, stage, dim };

const char* cap_kind_name(CapKind k);

/// Termination caps for the closure; zero entries pick the defaults
/// max_ad_depth = max_stage = 2d², max_dim = d² per frequency bucket.
struct ClosureCaps {
  int max_ad_depth = 0;
  int max_stage = 0;
  int max_dim = 0;
};

struct ClosureReport {
  bool converged = false;
  int iterations = 0;       // stages run
  int final_dimension = 0;
  std::vector<int> per_stage_dims;  // seed dimension first, then one entry per stage
  CapKind cap_hit = CapKind::none;
};

struct DistributionOptions {
  ClosureCaps caps;
  double rank_tol = kRankTol;
  double freq_tol = kFreqTol;
  ComplexMatrix projector;  // optional; restricts rank decisions to a subspace
};

/// Operator distribution generated from the observable C by alternating stages:
/// commutator powers against each control, then drift-derivation powers, each phase
/// iterated until the rank stops growing. The returned space always contains C.
/// Cap exhaustion is reported in the ClosureReport, never thrown.
std::pair<OperatorSpace, ClosureReport> generate_distribution(
    const HarmonicOperator& C, const ComplexMatrix& H0,
    const std::vector<ComplexMatrix>& controls, const DistributionOptions& opts = {});

}  // namespace decoq

#endif
