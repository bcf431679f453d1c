#ifndef DECOQ_ANALYSIS_HPP
#define DECOQ_ANALYSIS_HPP

#include "decoq/distribution.hpp"
#include "decoq/invariance.hpp"
#include "decoq/model.hpp"

namespace decoq {

/// Algebraic verdicts for one model: generated distribution, open-loop condition,
/// and the relaxed feedback membership condition on the joint-space embedding.
struct AnalysisResult {
  bool joint_level;        // closure ran on the joint space (joint observable/controls)
  OperatorSpace space;     // distribution as generated
  ClosureReport closure;
  ViolationReport open_loop;
  OperatorSpace joint_space;  // joint embedding of the distribution
  ViolationReport feedback;
};

AnalysisResult analyze_model(const SystemModel& model, const DistributionOptions& opts = {},
                             double tol = kMatrixZeroTol);

}  // namespace decoq

#endif
