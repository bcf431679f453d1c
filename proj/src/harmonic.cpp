#include "decoq/harmonic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace decoq {

HarmonicOperator::HarmonicOperator(std::vector<Term> terms, double freq_tol, double drop_tol)
    : freq_tol_(freq_tol), drop_tol_(drop_tol), terms_(std::move(terms)) {
  for (const auto& t : terms_) {
    require_square(t.matrix, "HarmonicOperator");
    if (dim_ == 0) dim_ = int(t.matrix.rows());
    if (t.matrix.rows() != dim_)
      throw std::invalid_argument("HarmonicOperator: terms have mixed dimensions");
  }
  canonicalize();
}

HarmonicOperator HarmonicOperator::zero(int dim, double freq_tol) {
  HarmonicOperator h;
  h.dim_ = dim;
  h.freq_tol_ = freq_tol;
  return h;
}

HarmonicOperator HarmonicOperator::constant(const ComplexMatrix& M, double freq_tol) {
  return HarmonicOperator({{0.0, M}}, freq_tol);
}

HarmonicOperator HarmonicOperator::rotating(double freq, const ComplexMatrix& M,
                                            double freq_tol) {
  return HarmonicOperator({{freq, M}}, freq_tol);
}

void HarmonicOperator::canonicalize() {
  std::stable_sort(terms_.begin(), terms_.end(),
                   [](const Term& a, const Term& b) { return a.freq < b.freq; });
  std::vector<Term> merged;
  for (auto& t : terms_) {
    if (!merged.empty() && std::abs(t.freq - merged.back().freq) <= freq_tol_)
      merged.back().matrix += t.matrix;
    else
      merged.push_back(std::move(t));
  }
  terms_.clear();
  for (auto& t : merged) {
    if (t.matrix.norm() > drop_tol_) {
      // snap near-zero bucket representatives to exactly zero frequency
      if (std::abs(t.freq) <= freq_tol_) t.freq = 0.0;
      terms_.push_back(std::move(t));
    }
  }
}

bool HarmonicOperator::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && terms_[0].freq == 0.0);
}

ComplexMatrix HarmonicOperator::evaluate(double t) const {
  ComplexMatrix out = ComplexMatrix::Zero(dim_, dim_);
  for (const auto& term : terms_)
    out += std::exp(Complex(0.0, term.freq * t)) * term.matrix;
  return out;
}

double HarmonicOperator::norm() const {
  double s = 0.0;
  for (const auto& t : terms_) s += t.matrix.squaredNorm();
  return std::sqrt(s);
}

HarmonicOperator HarmonicOperator::operator+(const HarmonicOperator& other) const {
  if (!empty() && !other.empty() && dim_ != other.dim_)
    throw std::invalid_argument("HarmonicOperator: dimension mismatch in sum");
  std::vector<Term> terms = terms_;
  terms.insert(terms.end(), other.terms_.begin(), other.terms_.end());
  HarmonicOperator out(std::move(terms), std::min(freq_tol_, other.freq_tol_));
  if (out.dim_ == 0) out.dim_ = dim_ ? dim_ : other.dim_;
  return out;
}

HarmonicOperator HarmonicOperator::operator-(const HarmonicOperator& other) const {
  return *this + other.scaled(-1.0);
}

HarmonicOperator HarmonicOperator::scaled(Complex factor) const {
  std::vector<Term> terms;
  terms.reserve(terms_.size());
  for (const auto& t : terms_) terms.push_back({t.freq, factor * t.matrix});
  HarmonicOperator out(std::move(terms), freq_tol_);
  if (out.dim_ == 0) out.dim_ = dim_;
  return out;
}

HarmonicOperator HarmonicOperator::adjoint() const {
  std::vector<Term> terms;
  terms.reserve(terms_.size());
  for (const auto& t : terms_) terms.push_back({-t.freq, t.matrix.adjoint()});
  HarmonicOperator out(std::move(terms), freq_tol_);
  if (out.dim_ == 0) out.dim_ = dim_;
  return out;
}

HarmonicOperator HarmonicOperator::derivative() const {
  std::vector<Term> terms;
  terms.reserve(terms_.size());
  for (const auto& t : terms_) terms.push_back({t.freq, Complex(0.0, t.freq) * t.matrix});
  HarmonicOperator out(std::move(terms), freq_tol_);
  if (out.dim_ == 0) out.dim_ = dim_;
  return out;
}

HarmonicOperator HarmonicOperator::frequency_shifted(double freq) const {
  std::vector<Term> terms;
  terms.reserve(terms_.size());
  for (const auto& t : terms_) terms.push_back({t.freq + freq, t.matrix});
  HarmonicOperator out(std::move(terms), freq_tol_);
  if (out.dim_ == 0) out.dim_ = dim_;
  return out;
}

bool HarmonicOperator::is_hermitian_operator(double tol) const {
  for (const auto& t : terms_) {
    bool matched = false;
    for (const auto& u : terms_) {
      if (std::abs(u.freq + t.freq) <= freq_tol_) {
        matched = (u.matrix - t.matrix.adjoint()).norm() <= tol;
        break;
      }
    }
    if (!matched) return false;
  }
  return true;
}

namespace {

template <typename Combine>
HarmonicOperator pairwise(const HarmonicOperator& A, const HarmonicOperator& B,
                          const char* what, int out_dim, Combine&& combine) {
  if (!A.empty() && !B.empty() && A.dim() != B.dim())
    throw std::invalid_argument(std::string(what) + ": dimension mismatch");
  std::vector<HarmonicOperator::Term> terms;
  terms.reserve(A.terms().size() * B.terms().size());
  for (const auto& a : A.terms())
    for (const auto& b : B.terms())
      terms.push_back({a.freq + b.freq, combine(a.matrix, b.matrix)});
  double tol = std::min(A.freq_tol(), B.freq_tol());
  HarmonicOperator out(std::move(terms), tol);
  return out.empty() ? HarmonicOperator::zero(out_dim, tol) : out;
}

}  // namespace

HarmonicOperator harmonic_commutator(const HarmonicOperator& A, const HarmonicOperator& B) {
  return pairwise(A, B, "harmonic_commutator", A.dim() ? A.dim() : B.dim(),
                  [](const ComplexMatrix& m, const ComplexMatrix& n) {
                    return ComplexMatrix(m * n - n * m);
                  });
}

HarmonicOperator harmonic_product(const HarmonicOperator& A, const HarmonicOperator& B) {
  return pairwise(A, B, "harmonic_product", A.dim() ? A.dim() : B.dim(),
                  [](const ComplexMatrix& m, const ComplexMatrix& n) {
                    return ComplexMatrix(m * n);
                  });
}

HarmonicOperator harmonic_tensor(const HarmonicOperator& A, const HarmonicOperator& B) {
  std::vector<HarmonicOperator::Term> terms;
  for (const auto& a : A.terms())
    for (const auto& b : B.terms()) terms.push_back({a.freq + b.freq, tensor(a.matrix, b.matrix)});
  double tol = std::min(A.freq_tol(), B.freq_tol());
  HarmonicOperator out(std::move(terms), tol);
  return out.empty() ? HarmonicOperator::zero(A.dim() * B.dim(), tol) : out;
}

HarmonicOperator harmonic_derivation(const HarmonicOperator& A, const ComplexMatrix& H) {
  require_square(H, "harmonic_derivation");
  if (!A.empty() && A.dim() != H.rows())
    throw std::invalid_argument("harmonic_derivation: dimension mismatch");
  const Complex mi(0.0, -1.0);
  std::vector<HarmonicOperator::Term> terms;
  terms.reserve(A.terms().size());
  for (const auto& t : A.terms())
    terms.push_back(
        {t.freq, mi * (t.matrix * H - H * t.matrix) + Complex(0.0, t.freq) * t.matrix});
  HarmonicOperator out(std::move(terms), A.freq_tol());
  return out.empty() ? HarmonicOperator::zero(A.dim() ? A.dim() : int(H.rows()), A.freq_tol())
                     : out;
}

}  // namespace decoq
