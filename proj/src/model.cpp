#include "decoq/model.hpp"

#include <stdexcept>
#include <string>

namespace decoq {

namespace {

HarmonicOperator embed_if_system(const HarmonicOperator& T, const HilbertFactorization& fact) {
  if (T.empty() || T.dim() == fact.joint_dim()) return T;
  if (T.dim() != fact.d_s)
    throw std::invalid_argument("SystemModel: operator fits neither system nor joint dimension");
  return harmonic_map(T, [&](const ComplexMatrix& M) { return fact.embed_system(M); });
}

}  // namespace

ComplexMatrix SystemModel::drift_joint() const {
  ComplexMatrix H = factorization.embed_system(H0_sys);
  if (H_env.size()) H += factorization.embed_env(H_env);
  return H;
}

ComplexMatrix SystemModel::control_joint(int i) const {
  const Control& c = controls.at(i);
  return c.joint ? c.op : factorization.embed_system(c.op);
}

HarmonicOperator SystemModel::observable_joint() const {
  return embed_if_system(observable, factorization);
}

HarmonicOperator SystemModel::interaction() const {
  return H_SB.empty() ? HarmonicOperator::zero(joint_dim()) : H_SB;
}

void SystemModel::validate(double tol) const {
  if (H0_sys.rows() != factorization.d_s || H0_sys.cols() != factorization.d_s)
    throw std::invalid_argument("SystemModel: H0 is not d_s x d_s");
  if (!is_hermitian(H0_sys, tol * std::max(1.0, H0_sys.norm())))
    throw std::invalid_argument("SystemModel: H0 is not Hermitian");
  if (H_env.size()) {
    if (H_env.rows() != factorization.d_e || H_env.cols() != factorization.d_e)
      throw std::invalid_argument("SystemModel: H_env is not d_e x d_e");
    if (!is_hermitian(H_env, tol * std::max(1.0, H_env.norm())))
      throw std::invalid_argument("SystemModel: H_env is not Hermitian");
  }
  for (size_t i = 0; i < controls.size(); ++i) {
    int want = controls[i].joint ? joint_dim() : factorization.d_s;
    if (controls[i].op.rows() != want || controls[i].op.cols() != want)
      throw std::invalid_argument("SystemModel: control " + std::to_string(i + 1) +
                                  " has wrong dimension");
    if (!is_hermitian(controls[i].op, tol * std::max(1.0, controls[i].op.norm())))
      throw std::invalid_argument("SystemModel: control " + std::to_string(i + 1) +
                                  " is not Hermitian");
  }
  if (!H_SB.empty()) {
    if (H_SB.dim() != joint_dim())
      throw std::invalid_argument("SystemModel: H_SB does not act on the joint space");
    if (!H_SB.is_hermitian_operator(tol * std::max(1.0, H_SB.norm())))
      throw std::invalid_argument("SystemModel: H_SB is not Hermitian");
  }
  if (!observable.empty() && observable.dim() != factorization.d_s &&
      observable.dim() != joint_dim())
    throw std::invalid_argument("SystemModel: observable fits neither system nor joint dimension");
}

Eigen::VectorXd PiecewiseSchedule::at(double t, int r) const {
  Eigen::VectorXd u = Eigen::VectorXd::Zero(r);
  for (size_t k = 0; k < times.size(); ++k) {
    if (times[k] <= t + 1e-15) {
      u = values[k];
      if (u.size() != r) throw std::invalid_argument("PiecewiseSchedule: wrong value size");
    } else {
      break;
    }
  }
  return u;
}

Eigen::VectorXd FeedbackLaw::controls_for(const Eigen::VectorXd& e, double t, int r) const {
  int m = int(observables.size());
  if (alpha.rows() != r || alpha.cols() != 1 + m)
    throw std::invalid_argument("FeedbackLaw: alpha must be r x (1+m)");
  Eigen::VectorXd u = alpha.col(0);
  for (int k = 0; k < m; ++k) u += e(k) * alpha.col(1 + k);
  if (!beta.empty()) {
    if (int(beta.size()) != 1 + m) throw std::invalid_argument("FeedbackLaw: beta needs 1+m terms");
    Eigen::MatrixXd B = beta[0];
    for (int k = 0; k < m; ++k) B += e(k) * beta[1 + k];
    u += B * reference.at(t, r);
  }
  return u;
}

}  // namespace decoq
