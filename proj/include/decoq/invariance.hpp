#ifndef DECOQ_INVARIANCE_HPP
#define DECOQ_INVARIANCE_HPP

#include <vector>

#include "decoq/model.hpp"
#include "decoq/operator_space.hpp"

namespace decoq {

struct Witness {
  int basis_index = -1;
  double frequency = 0.0;
  double norm = 0.0;
};

struct ViolationReport {
  bool decoupled = false;
  double worst_norm = 0.0;
  Witness witness;
  std::vector<double> per_element_norms;
  double threshold = 0.0;
};

/// Open-loop decoupling (every [T, H_SB] must vanish). System-dimensional basis
/// elements are embedded as M ⊗ I_e before commutation. tol is absolute on the
/// Frobenius norm, scaled by ‖H_SB‖ (basis elements are unit norm).
ViolationReport check_open_loop(const OperatorSpace& space, const HarmonicOperator& H_SB,
                                const HilbertFactorization& fact, double tol = kMatrixZeroTol);

/// Feedback decoupling: every [T, H_SB] must lie back in the space. The space must
/// be represented on the joint Hilbert space for membership to be meaningful.
ViolationReport check_feedback(const OperatorSpace& space, const HarmonicOperator& H_SB,
                               const HilbertFactorization& fact, double tol = kMatrixZeroTol);

/// One factor of a chained Lie derivative of the output.
struct ChainLink {
  enum class Kind { drift, control, interaction, combo };
  Kind kind = Kind::drift;
  int control_index = -1;              // Kind::control
  double drift_coeff = 0.0;            // Kind::combo
  std::vector<double> control_coeffs;  // Kind::combo

  static ChainLink drift() { return {Kind::drift, -1, 0.0, {}}; }
  static ChainLink control(int i) { return {Kind::control, i, 0.0, {}}; }
  static ChainLink interaction() { return {Kind::interaction, -1, 0.0, {}}; }
  static ChainLink combo(double u0, std::vector<double> u) {
    return {Kind::combo, -1, u0, std::move(u)};
  }
};

/// Operator T on the joint space with L_{links} y = <xi|T(t)|xi>. links[0] is the
/// leftmost (outermost) Lie derivative; the rightmost link is applied to the
/// observable first. Generators carry the -i convention throughout, so the result
/// matches lie_chain_oracle exactly, not just up to phase.
HarmonicOperator lie_chain_operator(const std::vector<ChainLink>& links,
                                    const SystemModel& model);

Complex chain_expectation(const HarmonicOperator& T, const StateVector& state, double time);

/// Frobenius scale of a chain, max(1, ‖C‖·Π‖field‖); tolerances are taken relative to it.
double chain_scale(const std::vector<ChainLink>& links, const SystemModel& model);

struct LieChainSpec {
  std::vector<ChainLink> links;  // same ordering as lie_chain_operator
  StateVector state;             // joint dimension, unit norm
  double time = 0.0;
};

/// Independent finite-difference route: composes exact short-time propagator flows
/// of the selected vector fields and takes Richardson-extrapolated central
/// differences of the output at the given state. Flow arithmetic runs in extended
/// precision; the base step is widened for chains longer than two to balance
/// truncation against cancellation. Chains of more than four links are rejected.
class LieChainOracle {
 public:
  explicit LieChainOracle(const SystemModel& model, double base_step = 1e-3);
  ~LieChainOracle();
  LieChainOracle(const LieChainOracle&) = delete;
  LieChainOracle& operator=(const LieChainOracle&) = delete;

  Complex evaluate(const std::vector<ChainLink>& links, const StateVector& state,
                   double time) const;

 private:
  struct Impl;
  Impl* impl_;
};

Complex lie_chain_oracle(const LieChainSpec& spec, const SystemModel& model,
                         double base_step = 1e-3);

struct ChainCheckOptions {
  int max_prefix_len = 3;  // prefix words over {drift, controls}; chains end in K_I
  int n_states = 20;
  int n_times = 5;
  double t_min = 0.0;
  double t_max = 10.0;
  unsigned seed = 12345;
  double base_step = 1e-3;
  double zero_tol = 1e-10;          // operator-route zero test, relative to chain scale
  double oracle_zero_tol = 1e-5;    // oracle-route zero test (finite-difference noise floor)
  double agree_tol = 1e-6;          // |operator - oracle|, relative to chain scale
  int threads = 1;
};

struct ChainSampleResult {
  std::vector<ChainLink> links;
  double scale = 1.0;
  double max_abs_operator = 0.0;
  double max_abs_oracle = 0.0;
  double max_disagreement = 0.0;
};

struct ChainCheckReport {
  std::vector<ChainSampleResult> chains;
  double max_disagreement_rel = 0.0;
  double worst_operator_rel = 0.0;  // max over chains of max|value|/scale
  double worst_oracle_rel = 0.0;
  bool operator_all_zero = false;
  bool oracle_all_zero = false;
  bool agree = false;  // both routes within agree_tol everywhere
};

/// Evaluates every chain of prefix length <= max_prefix_len over {K_0, K_1..K_r}
/// terminated by K_I, through both routes, at randomly sampled states and times.
ChainCheckReport run_chain_checks(const SystemModel& model, const ChainCheckOptions& opts = {});

}  // namespace decoq

#endif
