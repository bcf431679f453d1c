#include "decoq/invariance.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <thread>

namespace decoq {

namespace {

// frequency of the largest term
double dominant_frequency(const HarmonicOperator& R) {
  double freq = 0.0, best = -1.0;
  for (const auto& t : R.terms()) {
    double n = t.matrix.norm();
    if (n > best) {
      best = n;
      freq = t.freq;
    }
  }
  return freq;
}

HarmonicOperator embed_if_system(const HarmonicOperator& T, const HilbertFactorization& fact) {
  if (T.empty() || T.dim() == fact.joint_dim()) return T;
  if (T.dim() != fact.d_s)
    throw std::invalid_argument("invariance: operator fits neither system nor joint dimension");
  return harmonic_map(T, [&](const ComplexMatrix& M) { return fact.embed_system(M); });
}

}  // namespace

ViolationReport check_open_loop(const OperatorSpace& space, const HarmonicOperator& H_SB,
                                const HilbertFactorization& fact, double tol) {
  if (!H_SB.empty() && H_SB.dim() != fact.joint_dim())
    throw std::invalid_argument("check_open_loop: H_SB does not act on the joint space");
  if (space.matrix_dim() != fact.d_s && space.matrix_dim() != fact.joint_dim())
    throw std::invalid_argument("check_open_loop: space fits neither system nor joint dimension");

  ViolationReport report;
  report.threshold = tol * std::max(1.0, H_SB.norm());
  for (int i = 0; i < space.dimension(); ++i) {
    HarmonicOperator T = embed_if_system(space.basis()[i], fact);
    HarmonicOperator R = harmonic_commutator(T, H_SB);
    double n = R.norm();
    report.per_element_norms.push_back(n);
    if (n > report.worst_norm) {
      report.worst_norm = n;
      report.witness = {i, dominant_frequency(R), n};
    }
  }
  report.decoupled = report.worst_norm <= report.threshold;
  return report;
}

ViolationReport check_feedback(const OperatorSpace& space, const HarmonicOperator& H_SB,
                               const HilbertFactorization& fact, double tol) {
  if (!H_SB.empty() && H_SB.dim() != fact.joint_dim())
    throw std::invalid_argument("check_feedback: H_SB does not act on the joint space");
  if (space.matrix_dim() != fact.joint_dim())
    throw std::invalid_argument(
        "check_feedback: space must be represented on the joint space for membership");

  ViolationReport report;
  report.threshold = tol * std::max(1.0, H_SB.norm());
  for (int i = 0; i < space.dimension(); ++i) {
    HarmonicOperator R = harmonic_commutator(space.basis()[i], H_SB);
    double residual = space.residual_norm(R);
    report.per_element_norms.push_back(residual);
    if (residual > report.worst_norm) {
      report.worst_norm = residual;
      report.witness = {i, dominant_frequency(R), residual};
    }
  }
  report.decoupled = report.worst_norm <= report.threshold;
  return report;
}

HarmonicOperator lie_chain_operator(const std::vector<ChainLink>& links,
                                    const SystemModel& model) {
  if (links.empty()) throw std::invalid_argument("lie_chain_operator: empty chain");
  const Complex mi(0.0, -1.0);
  ComplexMatrix drift = model.drift_joint();
  HarmonicOperator T = model.observable_joint();
  for (auto it = links.rbegin(); it != links.rend(); ++it) {
    switch (it->kind) {
      case ChainLink::Kind::drift:
        T = harmonic_derivation(T, drift);
        break;
      case ChainLink::Kind::control:
        if (it->control_index < 0 || it->control_index >= int(model.controls.size()))
          throw std::invalid_argument("lie_chain_operator: unknown control index");
        T = harmonic_commutator(T, HarmonicOperator::constant(model.control_joint(it->control_index)))
                .scaled(mi);
        break;
      case ChainLink::Kind::interaction:
        T = harmonic_commutator(T, model.interaction()).scaled(mi);
        break;
      case ChainLink::Kind::combo: {
        HarmonicOperator acc = harmonic_derivation(T, drift).scaled(it->drift_coeff);
        if (it->control_coeffs.size() != model.controls.size())
          throw std::invalid_argument("lie_chain_operator: combo coefficient count mismatch");
        for (size_t i = 0; i < it->control_coeffs.size(); ++i)
          acc = acc + harmonic_commutator(T, HarmonicOperator::constant(model.control_joint(int(i))))
                          .scaled(mi * it->control_coeffs[i]);
        T = acc;
        break;
      }
    }
  }
  return T;
}

Complex chain_expectation(const HarmonicOperator& T, const StateVector& state, double time) {
  if (T.empty()) return 0.0;
  if (state.size() != T.dim())
    throw std::invalid_argument("chain_expectation: state dimension mismatch");
  return (state.adjoint() * T.evaluate(time) * state)(0, 0);
}

double chain_scale(const std::vector<ChainLink>& links, const SystemModel& model) {
  double s = std::max(model.observable.norm(), 1e-30);
  double drift_norm = model.drift_joint().norm();
  for (const auto& link : links) {
    switch (link.kind) {
      case ChainLink::Kind::drift: s *= drift_norm; break;
      case ChainLink::Kind::control: s *= model.control_joint(link.control_index).norm(); break;
      case ChainLink::Kind::interaction: s *= std::max(model.interaction().norm(), 1e-30); break;
      case ChainLink::Kind::combo: {
        double g = std::abs(link.drift_coeff) * drift_norm;
        for (size_t i = 0; i < link.control_coeffs.size(); ++i)
          g += std::abs(link.control_coeffs[i]) * model.control_joint(int(i)).norm();
        s *= std::max(g, 1e-30);
        break;
      }
    }
  }
  return std::max(1.0, 2.0 * s);
}

namespace {

void enumerate_prefixes(int r, int max_len, std::vector<std::vector<ChainLink>>& out) {
  out.push_back({ChainLink::interaction()});
  std::vector<std::vector<ChainLink>> frontier = {{}};
  for (int len = 1; len <= max_len; ++len) {
    std::vector<std::vector<ChainLink>> next;
    for (const auto& prefix : frontier) {
      for (int f = 0; f <= r; ++f) {
        auto word = prefix;
        word.push_back(f == 0 ? ChainLink::drift() : ChainLink::control(f - 1));
        std::vector<ChainLink> chain = {ChainLink::interaction()};
        chain.insert(chain.end(), word.begin(), word.end());
        out.push_back(chain);
        next.push_back(std::move(word));
      }
    }
    frontier = std::move(next);
  }
}

template <typename Fn>
void parallel_over(int n, int threads, Fn&& fn) {
  if (threads <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  int workers = std::min(threads, n);
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      for (int i = w; i < n; i += workers) fn(i);
    });
  for (auto& th : pool) th.join();
}

}  // namespace

ChainCheckReport run_chain_checks(const SystemModel& model, const ChainCheckOptions& opts) {
  std::vector<std::vector<ChainLink>> chains;
  enumerate_prefixes(int(model.controls.size()), opts.max_prefix_len, chains);

  std::mt19937 rng(opts.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> tdist(opts.t_min, opts.t_max);
  int dim = model.joint_dim();
  std::vector<StateVector> states;
  for (int s = 0; s < opts.n_states; ++s) {
    StateVector psi(dim);
    for (int k = 0; k < dim; ++k) psi(k) = Complex(gauss(rng), gauss(rng));
    psi /= psi.norm();
    states.push_back(std::move(psi));
  }
  std::vector<double> times;
  for (int k = 0; k < opts.n_times; ++k) times.push_back(tdist(rng));

  ChainCheckReport report;
  report.chains.resize(chains.size());
  parallel_over(int(chains.size()), opts.threads, [&](int c) {
    ChainSampleResult res;
    res.links = chains[c];
    res.scale = chain_scale(res.links, model);
    HarmonicOperator T = lie_chain_operator(res.links, model);
    LieChainOracle oracle(model, opts.base_step);
    for (const auto& psi : states) {
      for (double t : times) {
        Complex v_op = chain_expectation(T, psi, t);
        Complex v_or = oracle.evaluate(res.links, psi, t);
        res.max_abs_operator = std::max(res.max_abs_operator, std::abs(v_op));
        res.max_abs_oracle = std::max(res.max_abs_oracle, std::abs(v_or));
        res.max_disagreement = std::max(res.max_disagreement, std::abs(v_op - v_or));
      }
    }
    report.chains[c] = std::move(res);
  });

  for (const auto& res : report.chains) {
    report.max_disagreement_rel =
        std::max(report.max_disagreement_rel, res.max_disagreement / res.scale);
    report.worst_operator_rel =
        std::max(report.worst_operator_rel, res.max_abs_operator / res.scale);
    report.worst_oracle_rel = std::max(report.worst_oracle_rel, res.max_abs_oracle / res.scale);
  }
  report.operator_all_zero = report.worst_operator_rel <= opts.zero_tol;
  report.oracle_all_zero = report.worst_oracle_rel <= opts.oracle_zero_tol;
  report.agree = report.max_disagreement_rel <= opts.agree_tol;
  return report;
}

}  // namespace decoq
