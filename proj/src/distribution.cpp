#include "decoq/distribution.hpp"

#include <stdexcept>

namespace decoq {

const char* cap_kind_name(CapKind k) {
  switch (k) {
    case CapKind::none: return "none";
    case CapKind::ad_depth: return "max_ad_depth";
    case CapKind::stage: return "max_stage";
    case CapKind::dim: return "max_dim";
  }
  return "?";
}

namespace {

struct ClosureState {
  OperatorSpace space;
  ClosureReport report;
  int max_dim;

  bool dim_capped() {
    if (space.dimension() > max_dim * space.frequency_bucket_count()) {
      report.cap_hit = CapKind::dim;
      return true;
    }
    return false;
  }
};

enum class PhaseResult { closed, capped };

// Sweeps `image` over the basis until no rank growth; each sweep is one more power.
template <typename ImageFn>
PhaseResult run_phase(ClosureState& st, int max_power, ImageFn&& image) {
  for (int power = 1; power <= max_power; ++power) {
    bool grew = false;
    int snapshot = st.space.dimension();
    for (int b = 0; b < snapshot; ++b) {
      HarmonicOperator parent = st.space.basis()[b];  // copy: basis may reallocate
      grew |= image(parent);
      if (st.dim_capped()) return PhaseResult::capped;
    }
    if (!grew) return PhaseResult::closed;
    if (power == max_power) {
      st.report.cap_hit = CapKind::ad_depth;
      return PhaseResult::capped;
    }
  }
  return PhaseResult::closed;
}

}  // namespace

std::pair<OperatorSpace, ClosureReport> generate_distribution(
    const HarmonicOperator& C, const ComplexMatrix& H0,
    const std::vector<ComplexMatrix>& controls, const DistributionOptions& opts) {
  require_square(H0, "generate_distribution");
  int d = C.dim() ? C.dim() : int(H0.rows());
  if (d != H0.rows()) throw std::invalid_argument("generate_distribution: H0 dimension mismatch");
  for (const auto& Hi : controls)
    if (Hi.rows() != d || Hi.cols() != d)
      throw std::invalid_argument("generate_distribution: control dimension mismatch");

  ClosureCaps caps = opts.caps;
  if (caps.max_ad_depth <= 0) caps.max_ad_depth = 2 * d * d;
  if (caps.max_stage <= 0) caps.max_stage = 2 * d * d;
  if (caps.max_dim <= 0) caps.max_dim = d * d;

  ClosureState st{OperatorSpace(d, opts.rank_tol, opts.freq_tol), ClosureReport{}, caps.max_dim};
  if (opts.projector.size()) st.space.set_projector(opts.projector);

  // degenerate input: zero observable generates the empty distribution
  if (C.norm() <= HarmonicOperator::kDropTol) {
    st.report.converged = true;
    st.report.per_stage_dims.push_back(0);
    return {std::move(st.space), std::move(st.report)};
  }

  st.space.insert(C);
  st.report.per_stage_dims.push_back(st.space.dimension());

  for (int stage = 1; stage <= caps.max_stage; ++stage) {
    int before = st.space.dimension();
    st.report.iterations = stage;

    auto ad_images = [&](const HarmonicOperator& parent) {
      bool grew = false;
      for (const auto& Hi : controls)
        grew |= st.space.insert(harmonic_commutator(parent, HarmonicOperator::constant(Hi)));
      return grew;
    };
    if (run_phase(st, caps.max_ad_depth, ad_images) == PhaseResult::capped) break;

    auto derivation_images = [&](const HarmonicOperator& parent) {
      return st.space.insert(harmonic_derivation(parent, H0));
    };
    if (run_phase(st, caps.max_ad_depth, derivation_images) == PhaseResult::capped) break;

    st.report.per_stage_dims.push_back(st.space.dimension());
    if (st.space.dimension() == before) {
      st.report.converged = true;
      break;
    }
    if (stage == caps.max_stage) st.report.cap_hit = CapKind::stage;
  }

  st.report.final_dimension = st.space.dimension();
  return {std::move(st.space), std::move(st.report)};
}

}  // namespace decoq
