#ifndef DECOQ_MODEL_HPP
#define DECOQ_MODEL_HPP

#include <variant>
#include <vector>

#include "decoq/builders.hpp"
#include "decoq/harmonic.hpp"

namespace decoq {

/// Control Hamiltonian; acts on the system factor unless flagged joint-acting.
struct Control {
  ComplexMatrix op;
  bool joint = false;
};

/// u(t) = values of the last segment with times[k] <= t; zero before the first
/// segment and for an empty schedule.
struct PiecewiseSchedule {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> values;

  Eigen::VectorXd at(double t, int r) const;
};

/// Expectation-value feedback u = alpha(e) + beta(e)·v(t), affine in the recorded
/// expectations e_m = Re<psi|O_m|psi> of the declared auxiliary observables.
struct FeedbackLaw {
  std::vector<HarmonicOperator> observables;  // system- or joint-dimensional
  Eigen::MatrixXd alpha;                      // r x (1+m): u_i = alpha(i,0) + sum_m alpha(i,1+m) e_m
  std::vector<Eigen::MatrixXd> beta;          // (1+m) matrices r x r, beta(e) = beta[0] + sum_m e_m beta[1+m]
  PiecewiseSchedule reference;                // v(t)

  Eigen::VectorXd controls_for(const Eigen::VectorXd& expectations, double t, int r) const;
};

/// Full system tuple: drift, environment, controls, interaction and observable.
struct SystemModel {
  HilbertFactorization factorization;
  ComplexMatrix H0_sys;                // d_s x d_s
  ComplexMatrix H_env;                 // d_e x d_e; empty means zero
  std::vector<Control> controls;
  HarmonicOperator H_SB;               // joint dimension; empty means zero
  HarmonicOperator observable;         // d_s or joint dimension
  std::variant<PiecewiseSchedule, FeedbackLaw> control_law = PiecewiseSchedule{};

  int joint_dim() const { return factorization.joint_dim(); }

  /// H0 ⊗ I_e + I_s ⊗ H_e.
  ComplexMatrix drift_joint() const;
  ComplexMatrix control_joint(int i) const;
  HarmonicOperator observable_joint() const;
  HarmonicOperator interaction() const;  // zero operator when H_SB is unset

  /// Hermiticity and dimension checks; throws std::invalid_argument naming the offender.
  void validate(double tol = kMatrixZeroTol) const;
};

}  // namespace decoq

#endif
