#include "decoq/analysis.hpp"

#include <tuple>

namespace decoq {

AnalysisResult analyze_model(const SystemModel& model, const DistributionOptions& opts,
                             double tol) {
  bool joint = !model.observable.empty() && model.observable.dim() == model.joint_dim() &&
               model.joint_dim() != model.factorization.d_s;
  for (const auto& c : model.controls) joint |= c.joint;

  OperatorSpace space(1);
  ClosureReport closure;
  if (joint) {
    std::vector<ComplexMatrix> controls;
    for (size_t i = 0; i < model.controls.size(); ++i)
      controls.push_back(model.control_joint(int(i)));
    std::tie(space, closure) =
        generate_distribution(model.observable_joint(), model.drift_joint(), controls, opts);
  } else {
    std::vector<ComplexMatrix> controls;
    for (const auto& c : model.controls) controls.push_back(c.op);
    std::tie(space, closure) =
        generate_distribution(model.observable, model.H0_sys, controls, opts);
  }

  ViolationReport open_loop =
      check_open_loop(space, model.interaction(), model.factorization, tol);

  OperatorSpace joint_space = [&] {
    if (space.matrix_dim() == model.joint_dim()) return space;
    OperatorSpace js(model.joint_dim(), space.rank_tol(), space.freq_tol());
    for (const auto& T : space.basis())
      js.insert(harmonic_map(
          T, [&](const ComplexMatrix& M) { return model.factorization.embed_system(M); }));
    return js;
  }();
  ViolationReport feedback =
      check_feedback(joint_space, model.interaction(), model.factorization, tol);

  return AnalysisResult{joint,          std::move(space),       closure,
                        open_loop,      std::move(joint_space), feedback};
}

}  // namespace decoq
