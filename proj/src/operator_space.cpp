#include "decoq/operator_space.hpp"

#include <cmath>
#include <stdexcept>

namespace decoq {

OperatorSpace::OperatorSpace(int matrix_dim, double rank_tol, double freq_tol)
    : matrix_dim_(matrix_dim), rank_tol_(rank_tol), freq_tol_(freq_tol) {
  if (matrix_dim < 1) throw std::invalid_argument("OperatorSpace: dim must be >= 1");
}

void OperatorSpace::set_projector(const ComplexMatrix& P) {
  require_square(P, "OperatorSpace::set_projector");
  if (P.rows() != matrix_dim_)
    throw std::invalid_argument("OperatorSpace::set_projector: dimension mismatch");
  if (!basis_.empty())
    throw std::logic_error("OperatorSpace::set_projector: space is not empty");
  projector_ = P;
}

ComplexMatrix OperatorSpace::compress(const ComplexMatrix& M) const {
  return projector_.size() ? ComplexMatrix(projector_ * M * projector_) : M;
}

double OperatorSpace::Rep::norm() const {
  double s = 0.0;
  for (const auto& m : slots) s += m.squaredNorm();
  for (const auto& [f, pair] : extra) s += pair.first.squaredNorm();
  return std::sqrt(s);
}

int OperatorSpace::find_bucket(double freq) const {
  for (size_t b = 0; b < bucket_freqs_.size(); ++b)
    if (std::abs(bucket_freqs_[b] - freq) <= freq_tol_) return int(b);
  return -1;
}

OperatorSpace::Rep OperatorSpace::make_rep(const HarmonicOperator& T) const {
  if (!T.empty() && T.dim() != matrix_dim_)
    throw std::invalid_argument("OperatorSpace: operator dimension mismatch");
  Rep rep;
  rep.slots.assign(bucket_freqs_.size(), ComplexMatrix::Zero(matrix_dim_, matrix_dim_));
  rep.full.assign(bucket_freqs_.size(), ComplexMatrix::Zero(matrix_dim_, matrix_dim_));
  for (const auto& term : T.terms()) {
    double f = std::abs(term.freq);
    ComplexMatrix coeff = term.freq < -freq_tol_ ? term.matrix.adjoint() : term.matrix;
    int b = find_bucket(f);
    if (b >= 0) {
      rep.slots[b] += compress(coeff);
      rep.full[b] += coeff;
      continue;
    }
    bool found = false;
    for (auto& [ef, pair] : rep.extra) {
      if (std::abs(ef - f) <= freq_tol_) {
        pair.first += compress(coeff);
        pair.second += coeff;
        found = true;
        break;
      }
    }
    if (!found) rep.extra.emplace_back(f, std::make_pair(compress(coeff), coeff));
  }
  return rep;
}

double OperatorSpace::project_out(Rep& rep) const {
  // two Gram-Schmidt passes; extra slots are orthogonal to every basis vector.
  // Coefficients come from the projected inner product and are applied to the
  // full-side slots as well, keeping P(full) == projected throughout.
  for (int pass = 0; pass < 2; ++pass) {
    for (size_t r = 0; r < reps_.size(); ++r) {
      const auto& bvec = reps_[r];
      Complex overlap = 0.0;
      for (size_t b = 0; b < bvec.size(); ++b) overlap += matrix_inner(bvec[b], rep.slots[b]);
      for (size_t b = 0; b < bvec.size(); ++b) {
        rep.slots[b] -= overlap * bvec[b];
        rep.full[b] -= overlap * reps_full_[r][b];
      }
    }
  }
  return rep.norm();
}

bool OperatorSpace::insert(const HarmonicOperator& T) {
  Rep rep = make_rep(T);
  double input_norm = rep.norm();
  if (input_norm <= 1e-14 * std::max(1.0, T.norm())) return false;  // zero in the quotient
  double residual = project_out(rep);
  if (residual <= rank_tol_ * input_norm) return false;

  // register any new frequency buckets, padding stored reps with zero slots
  for (auto& [f, pair] : rep.extra) {
    bucket_freqs_.push_back(f);
    for (auto& bvec : reps_) bvec.emplace_back(ComplexMatrix::Zero(matrix_dim_, matrix_dim_));
    for (auto& bvec : reps_full_) bvec.emplace_back(ComplexMatrix::Zero(matrix_dim_, matrix_dim_));
    rep.slots.push_back(std::move(pair.first));
    rep.full.push_back(std::move(pair.second));
  }
  rep.extra.clear();

  std::vector<HarmonicOperator::Term> terms;
  for (size_t b = 0; b < rep.slots.size(); ++b) {
    rep.slots[b] /= residual;
    rep.full[b] /= residual;
    terms.push_back({bucket_freqs_[b], rep.full[b]});
  }
  basis_.emplace_back(std::move(terms), freq_tol_);
  reps_.push_back(std::move(rep.slots));
  reps_full_.push_back(std::move(rep.full));
  return true;
}

bool OperatorSpace::contains(const HarmonicOperator& T, double rel_tol) const {
  Rep rep = make_rep(T);
  double input_norm = rep.norm();
  if (input_norm <= 1e-14 * std::max(1.0, T.norm())) return true;
  return project_out(rep) <= rel_tol * input_norm;
}

double OperatorSpace::residual_norm(const HarmonicOperator& T) const {
  Rep rep = make_rep(T);
  return project_out(rep);
}

double OperatorSpace::rep_norm(const HarmonicOperator& T) const { return make_rep(T).norm(); }

double OperatorSpace::gram_defect() const {
  double worst = 0.0;
  for (size_t i = 0; i < reps_.size(); ++i) {
    for (size_t j = i; j < reps_.size(); ++j) {
      Complex overlap = 0.0;
      for (size_t b = 0; b < reps_[i].size(); ++b)
        overlap += matrix_inner(reps_[i][b], reps_[j][b]);
      worst = std::max(worst, std::abs(overlap - (i == j ? 1.0 : 0.0)));
    }
  }
  return worst;
}

OperatorSpace orthonormalize(const std::vector<HarmonicOperator>& ops, double rank_tol) {
  int dim = 1;
  for (const auto& op : ops)
    if (op.dim() > 0) {
      dim = op.dim();
      break;
    }
  OperatorSpace space(dim, rank_tol);
  for (const auto& op : ops) space.insert(op);
  return space;
}

}  // namespace decoq
