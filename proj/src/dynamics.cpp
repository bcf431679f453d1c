#include "decoq/dynamics.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include <unsupported/Eigen/MatrixFunctions>

#include "decoq/analysis.hpp"

namespace decoq {

StateVector with_default_bath(const StateVector& psi, const HilbertFactorization& fact) {
  if (psi.size() == fact.joint_dim()) return psi;
  if (psi.size() != fact.d_s)
    throw std::invalid_argument("initial state fits neither system nor joint dimension");
  return tensor(psi, StateVector(basis_ket(0, fact.d_e)));
}

namespace {

double top_level_occupation(const StateVector& psi, const HilbertFactorization& fact) {
  if (fact.d_e < 2) return 0.0;
  double occ = 0.0;
  for (int s = 0; s < fact.d_s; ++s) occ += std::norm(psi(s * fact.d_e + fact.d_e - 1));
  return occ;
}

struct Stepper {
  const SystemModel& model;
  ComplexMatrix H_drift;
  std::vector<ComplexMatrix> controls;
  HarmonicOperator C;
  HarmonicOperator H_SB;
  bool interaction_on;
  bool interaction_time_dep;

  // cached propagator, valid while the generator and step stay the same
  bool have_cached = false;
  Eigen::VectorXd cached_u;
  double cached_dt = -1.0;
  ComplexMatrix cached_U;

  Stepper(const SystemModel& m, bool on)
      : model(m),
        H_drift(m.drift_joint()),
        C(m.observable_joint()),
        H_SB(m.interaction()),
        interaction_on(on && !m.H_SB.empty()),
        interaction_time_dep(on && !m.H_SB.empty() && !m.H_SB.is_constant()) {
    for (size_t i = 0; i < m.controls.size(); ++i) controls.push_back(m.control_joint(int(i)));
  }

  Eigen::VectorXd control_values(double t, const StateVector& psi) const {
    int r = int(controls.size());
    if (const auto* sched = std::get_if<PiecewiseSchedule>(&model.control_law))
      return sched->at(t, r);
    const auto& law = std::get<FeedbackLaw>(model.control_law);
    Eigen::VectorXd e(law.observables.size());
    for (size_t m = 0; m < law.observables.size(); ++m) {
      HarmonicOperator O = law.observables[m];
      if (!O.empty() && O.dim() == model.factorization.d_s)
        O = harmonic_map(O, [&](const ComplexMatrix& M) {
          return model.factorization.embed_system(M);
        });
      e(int(m)) = (psi.adjoint() * O.evaluate(t) * psi)(0, 0).real();
    }
    return law.controls_for(e, t, r);
  }

  const ComplexMatrix& step_propagator(const Eigen::VectorXd& u, double t_mid, double dt) {
    if (have_cached && !interaction_time_dep && dt == cached_dt && u == cached_u)
      return cached_U;
    ComplexMatrix G = H_drift;
    for (size_t i = 0; i < controls.size(); ++i) G += u(int(i)) * controls[i];
    if (interaction_on) G += H_SB.evaluate(t_mid);
    cached_U = (Complex(0.0, -1.0) * dt * G).exp();
    cached_u = u;
    cached_dt = dt;
    have_cached = true;
    return cached_U;
  }
};

}  // namespace

TraceRecord propagate(const SystemModel& model, const StateVector& psi0, double t0, double t1,
                      const PropagationOptions& opts, bool interaction_on) {
  if (opts.dt <= 0.0) throw std::invalid_argument("propagate: dt must be positive");
  if (t1 < t0) throw std::invalid_argument("propagate: empty time span");
  StateVector psi = with_default_bath(psi0, model.factorization);
  if (std::abs(psi.norm() - 1.0) > 1e-9)
    throw std::invalid_argument("propagate: initial state is not normalized");

  Stepper stepper(model, interaction_on);
  TraceRecord trace;
  double t = t0;

  // each row carries the control computed at its own time, the one applied
  // from that instant on; the step below reuses the recorded value
  auto record = [&](double time) {
    trace.times.push_back(time);
    trace.outputs.push_back((psi.adjoint() * stepper.C.evaluate(time) * psi)(0, 0));
    trace.controls.push_back(stepper.control_values(time, psi));
    double defect = std::abs(psi.norm() - 1.0);
    trace.norm_defect.push_back(defect);
    trace.max_norm_defect = std::max(trace.max_norm_defect, defect);
    trace.max_top_level_occupation =
        std::max(trace.max_top_level_occupation, top_level_occupation(psi, model.factorization));
    if (defect > opts.norm_defect_bound)
      throw std::runtime_error("propagate: norm defect exceeded bound; reduce dt");
  };

  record(t);

  while (t < t1 - 1e-12) {
    double dt = std::min(opts.dt, t1 - t);
    psi = stepper.step_propagator(trace.controls.back(), t + 0.5 * dt, dt) * psi;
    t += dt;
    record(t);
  }

  trace.truncation_warning = trace.max_top_level_occupation > opts.truncation_warn_level;
  return trace;
}

void write_trace_csv(std::ostream& os, const TraceRecord& trace) {
  int r = trace.controls.empty() ? 0 : int(trace.controls.front().size());
  os << "t,re_y,im_y";
  for (int i = 1; i <= r; ++i) os << ",u_" << i;
  os << ",norm_defect\n";
  char buf[64];
  auto put = [&](double v, char sep) {
    snprintf(buf, sizeof buf, "%.17g%c", v, sep);
    os << buf;
  };
  for (size_t k = 0; k < trace.times.size(); ++k) {
    put(trace.times[k], ',');
    put(trace.outputs[k].real(), ',');
    put(trace.outputs[k].imag(), ',');
    for (int i = 0; i < r; ++i) put(trace.controls[k](i), ',');
    snprintf(buf, sizeof buf, "%.17g\n", trace.norm_defect[k]);
    os << buf;
  }
}

InvarianceExperimentReport invariance_experiment(const SystemModel& model,
                                                 const std::vector<StateVector>& initial_states,
                                                 double t0, double t1,
                                                 const InvarianceExperimentOptions& opts) {
  if (initial_states.empty())
    throw std::invalid_argument("invariance_experiment: need at least one initial state");

  InvarianceExperimentReport report;
  for (const auto& psi0 : initial_states) {
    TraceRecord on = propagate(model, psi0, t0, t1, opts.propagation, true);
    TraceRecord off = propagate(model, psi0, t0, t1, opts.propagation, false);
    double dev = 0.0;
    for (size_t k = 0; k < on.outputs.size(); ++k)
      dev = std::max(dev, std::abs(on.outputs[k] - off.outputs[k]));
    report.per_state_deviation.push_back(dev);
    report.max_deviation = std::max(report.max_deviation, dev);
    report.traces_on.push_back(std::move(on));
    report.traces_off.push_back(std::move(off));
  }

  AnalysisResult algebra = analyze_model(model, opts.distribution, opts.tol);
  report.closure = algebra.closure;
  report.open_loop = algebra.open_loop;
  report.algebraically_decoupled = algebra.open_loop.decoupled;
  report.simulation_decoupled = report.max_deviation <= opts.sim_tol;
  report.agree = report.simulation_decoupled == report.algebraically_decoupled;
  return report;
}

}  // namespace decoq
