#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

#include "decoq/invariance.hpp"

// Finite-difference evaluation of chained Lie derivatives by composing the exact
// short-time flows of the augmented vector fields. Runs in extended precision:
// a mixed central difference of order p divides an alternating sum by (2h)^p, so
// double-precision roundoff alone would swamp chains of length three and four.

namespace decoq {

namespace {

using LComplex = std::complex<long double>;
using LMatrix = Eigen::Matrix<LComplex, Eigen::Dynamic, Eigen::Dynamic>;
using LVector = Eigen::Matrix<LComplex, Eigen::Dynamic, 1>;

LMatrix widen(const ComplexMatrix& M) {
  LMatrix out(M.rows(), M.cols());
  for (Eigen::Index i = 0; i < M.rows(); ++i)
    for (Eigen::Index j = 0; j < M.cols(); ++j)
      out(i, j) = LComplex((long double)M(i, j).real(), (long double)M(i, j).imag());
  return out;
}

// scaling-and-squaring Taylor exponential, accurate to long double precision
LMatrix expm(LMatrix A) {
  int squarings = 0;
  long double nrm = A.norm();
  while (nrm > 0.25L) {
    nrm /= 2.0L;
    ++squarings;
  }
  A /= std::pow(2.0L, (long double)squarings);
  LMatrix X = LMatrix::Identity(A.rows(), A.cols());
  LMatrix term = X;
  for (int k = 1; k <= 64; ++k) {
    term = (term * A) / (long double)k;
    X += term;
    if (term.norm() <= 1e-24L * X.norm()) break;
  }
  for (int s = 0; s < squarings; ++s) X = X * X;
  return X;
}

struct HarmonicLTerm {
  long double freq;
  LMatrix matrix;
};

std::vector<HarmonicLTerm> widen(const HarmonicOperator& H) {
  std::vector<HarmonicLTerm> terms;
  for (const auto& t : H.terms()) terms.push_back({(long double)t.freq, widen(t.matrix)});
  return terms;
}

LMatrix evaluate_terms(const std::vector<HarmonicLTerm>& terms, long double t, int dim) {
  LMatrix out = LMatrix::Zero(dim, dim);
  for (const auto& term : terms)
    out += std::exp(LComplex(0.0L, term.freq * t)) * term.matrix;
  return out;
}

}  // namespace

struct LieChainOracle::Impl {
  int dim;
  long double base_step;
  LMatrix drift;                       // H0 ⊗ I + I ⊗ He
  std::vector<LMatrix> controls;       // embedded
  std::vector<HarmonicLTerm> interaction;
  bool interaction_constant;
  std::vector<HarmonicLTerm> observable;
  // propagator cache; key by (field, step); time enters only for harmonic H_SB
  mutable std::map<std::pair<int, long double>, LMatrix> flow_cache;

  static constexpr int kDriftField = -1;
  static constexpr int kInteractionField = -2;

  const LMatrix& cached_flow(int field, long double s) const {
    auto key = std::make_pair(field, s);
    auto it = flow_cache.find(key);
    if (it != flow_cache.end()) return it->second;
    const LMatrix& H = field == kDriftField ? drift : controls[field];
    LMatrix U = expm(LComplex(0.0L, -1.0L) * s * H);
    return flow_cache.emplace(key, std::move(U)).first->second;
  }

  // one flow segment; advances (t, psi) in place
  void apply_flow(const ChainLink& link, long double s, long double& t, LVector& psi) const {
    switch (link.kind) {
      case ChainLink::Kind::drift:
        psi = cached_flow(kDriftField, s) * psi;
        t += s;
        break;
      case ChainLink::Kind::control:
        psi = cached_flow(link.control_index, s) * psi;
        break;
      case ChainLink::Kind::interaction: {
        if (interaction_constant) {
          auto key = std::make_pair(kInteractionField, s);
          auto it = flow_cache.find(key);
          if (it == flow_cache.end()) {
            LMatrix U = expm(LComplex(0.0L, -1.0L) * s * evaluate_terms(interaction, 0.0L, dim));
            it = flow_cache.emplace(key, std::move(U)).first;
          }
          psi = it->second * psi;
        } else {
          // time is frozen along the interaction field; evaluate H_SB at segment start
          psi = expm(LComplex(0.0L, -1.0L) * s * evaluate_terms(interaction, t, dim)) * psi;
        }
        break;
      }
      case ChainLink::Kind::combo: {
        LMatrix H = (long double)link.drift_coeff * drift;
        for (size_t i = 0; i < link.control_coeffs.size(); ++i)
          H += (long double)link.control_coeffs[i] * controls[i];
        psi = expm(LComplex(0.0L, -1.0L) * s * H) * psi;
        t += (long double)link.drift_coeff * s;
        break;
      }
    }
  }

  // y after composing one flow per link; links[0] (the outermost derivative) flows first
  LComplex output(const std::vector<ChainLink>& links, const std::vector<long double>& steps,
                  const LVector& psi0, long double t0) const {
    LVector psi = psi0;
    long double t = t0;
    for (size_t k = 0; k < links.size(); ++k) apply_flow(links[k], steps[k], t, psi);
    LMatrix C = evaluate_terms(observable, t, dim);
    return (psi.adjoint() * C * psi)(0, 0);
  }

  // mixed central difference with uniform step h over all chain variables
  LComplex central(const std::vector<ChainLink>& links, const LVector& psi, long double t0,
                   long double h) const {
    size_t p = links.size();
    std::vector<long double> steps(p);
    LComplex acc = 0.0L;
    for (unsigned corner = 0; corner < (1u << p); ++corner) {
      int sign = 1;
      for (size_t k = 0; k < p; ++k) {
        bool plus = corner & (1u << k);
        steps[k] = plus ? h : -h;
        if (!plus) sign = -sign;
      }
      acc += (long double)sign * output(links, steps, psi, t0);
    }
    return acc / std::pow(2.0L * h, (long double)p);
  }
};

LieChainOracle::LieChainOracle(const SystemModel& model, double base_step)
    : impl_(new Impl) {
  impl_->dim = model.joint_dim();
  impl_->base_step = (long double)base_step;
  impl_->drift = widen(model.drift_joint());
  for (size_t i = 0; i < model.controls.size(); ++i)
    impl_->controls.push_back(widen(model.control_joint(int(i))));
  impl_->interaction = widen(model.interaction());
  impl_->interaction_constant = model.interaction().is_constant();
  impl_->observable = widen(model.observable_joint());
}

LieChainOracle::~LieChainOracle() { delete impl_; }

Complex LieChainOracle::evaluate(const std::vector<ChainLink>& links, const StateVector& state,
                                 double time) const {
  if (links.empty()) throw std::invalid_argument("lie_chain_oracle: empty chain");
  if (links.size() > 4)
    throw std::invalid_argument("lie_chain_oracle: chain longer than 4 links (cost safeguard)");
  if (state.size() != impl_->dim)
    throw std::invalid_argument("lie_chain_oracle: state dimension mismatch");
  for (const auto& link : links)
    if (link.kind == ChainLink::Kind::control &&
        (link.control_index < 0 || link.control_index >= int(impl_->controls.size())))
      throw std::invalid_argument("lie_chain_oracle: unknown control index");

  LVector psi(state.size());
  for (Eigen::Index k = 0; k < state.size(); ++k)
    psi(k) = LComplex((long double)state(k).real(), (long double)state(k).imag());

  // widen the step for deep chains: the (2h)^p divisor erodes the alternating sum
  size_t p = links.size();
  long double h = impl_->base_step;
  for (size_t k = 2; k < p; ++k) h *= 2.0L;

  LComplex coarse = impl_->central(links, psi, (long double)time, h);
  LComplex fine = impl_->central(links, psi, (long double)time, h / 2.0L);
  LComplex value = (4.0L * fine - coarse) / 3.0L;  // second-order Richardson
  return Complex((double)value.real(), (double)value.imag());
}

Complex lie_chain_oracle(const LieChainSpec& spec, const SystemModel& model, double base_step) {
  if (std::abs(spec.state.norm() - 1.0) > 1e-12)
    throw std::invalid_argument("lie_chain_oracle: state is not normalized");
  LieChainOracle oracle(model, base_step);
  return oracle.evaluate(spec.links, spec.state, spec.time);
}

}  // namespace decoq
