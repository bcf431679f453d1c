#ifndef DECOQ_DYNAMICS_HPP
#define DECOQ_DYNAMICS_HPP

#include <iosfwd>
#include <string>

#include "decoq/distribution.hpp"
#include "decoq/invariance.hpp"
#include "decoq/model.hpp"

namespace decoq {

/// Time series of one propagation run.
struct TraceRecord {
  std::vector<double> times;
  std::vector<Complex> outputs;         // y(t) = <psi|C(t)|psi>
  std::vector<Eigen::VectorXd> controls;
  std::vector<double> norm_defect;      // | ‖psi‖ - 1 |
  double max_norm_defect = 0.0;
  double max_top_level_occupation = 0.0;  // truncation guard on the last bath level
  bool truncation_warning = false;        // occupation above 1e-6
};

struct PropagationOptions {
  double dt = 0.01;
  double norm_defect_bound = 1e-9;
  double truncation_warn_level = 1e-6;
};

/// Steps psi with the per-step matrix exponential of the midpoint-sampled generator
/// -i(H0⊗I + I⊗He + Σ u_i(t) H_i + H_SB(t) if interaction_on); records y at every
/// step. Feedback controls are recomputed each step from the current expectations.
/// Throws when the norm defect exceeds the bound (step too large).
TraceRecord propagate(const SystemModel& model, const StateVector& psi0, double t0, double t1,
                      const PropagationOptions& opts = {}, bool interaction_on = true);

/// t,re_y,im_y,u_1..u_r,norm_defect rows, LF line endings.
void write_trace_csv(std::ostream& os, const TraceRecord& trace);

struct InvarianceExperimentOptions {
  PropagationOptions propagation;
  DistributionOptions distribution;
  double tol = kMatrixZeroTol;   // algebraic verdict tolerance
  double sim_tol = 1e-8;         // 10x the norm-defect integration bound
};

struct InvarianceExperimentReport {
  double max_deviation = 0.0;               // max over states and times of |y_on - y_off|
  std::vector<double> per_state_deviation;
  std::vector<TraceRecord> traces_on;
  std::vector<TraceRecord> traces_off;
  ClosureReport closure;
  ViolationReport open_loop;
  bool simulation_decoupled = false;
  bool algebraically_decoupled = false;
  bool agree = false;
};

/// Runs every initial state with the interaction on and off and compares the output
/// traces against the algebraic verdict for the same model.
InvarianceExperimentReport invariance_experiment(const SystemModel& model,
                                                 const std::vector<StateVector>& initial_states,
                                                 double t0, double t1,
                                                 const InvarianceExperimentOptions& opts = {});

/// Bath vacuum default: psi_sys ⊗ |0...0>; joint states pass through unchanged.
StateVector with_default_bath(const StateVector& psi, const HilbertFactorization& fact);

}  // namespace decoq

#endif
