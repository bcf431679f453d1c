#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/QR>

#include "decoq/distribution.hpp"
#include "fixtures.hpp"

using namespace decoq;

namespace {

// independent rank oracle: stack vectorized coefficient blocks and QR-rank them
int stacked_rank(const std::vector<HarmonicOperator>& ops) {
  std::vector<double> freqs;
  auto bucket = [&](double f) {
    for (size_t b = 0; b < freqs.size(); ++b)
      if (std::abs(freqs[b] - f) <= 1e-9) return int(b);
    freqs.push_back(f);
    return int(freqs.size() - 1);
  };
  for (const auto& op : ops)
    for (const auto& t : op.terms()) bucket(t.freq);
  int d = ops.front().dim();
  ComplexMatrix stack = ComplexMatrix::Zero(int(ops.size()), int(freqs.size()) * d * d);
  for (size_t k = 0; k < ops.size(); ++k)
    for (const auto& t : ops[k].terms()) {
      int b = bucket(t.freq);
      for (int c = 0; c < d * d; ++c) stack(int(k), b * d * d + c) = t.matrix(c % d, c / d);
    }
  Eigen::ColPivHouseholderQR<ComplexMatrix> qr(stack);
  qr.setThreshold(1e-9);
  return int(qr.rank());
}

}  // namespace

TEST_CASE("orthonormalize drops dependent directions") {
  std::mt19937 rng(11);
  ComplexMatrix M = fixtures::random_matrix(3, rng);

  SUBCASE("scalar multiples collapse") {
    auto space = orthonormalize({HarmonicOperator::constant(M),
                                 HarmonicOperator::constant(ComplexMatrix(2.0 * M))});
    CHECK(space.dimension() == 1);
  }

  SUBCASE("pairwise sums detected") {
    ComplexMatrix s1 = pauli_string("X"), s2 = pauli_string("Y");
    auto space = orthonormalize({HarmonicOperator::constant(s1), HarmonicOperator::constant(s2),
                                 HarmonicOperator::constant(ComplexMatrix(s1 + s2))});
    CHECK(space.dimension() == 2);
  }

  SUBCASE("random full-rank batch agrees with the stacked-rank oracle") {
    std::vector<HarmonicOperator> ops;
    for (int k = 0; k < 16; ++k)
      ops.push_back(HarmonicOperator::constant(fixtures::random_matrix(4, rng)));
    REQUIRE(stacked_rank(ops) == 16);
    auto space = orthonormalize(ops);
    CHECK(space.dimension() == 16);
    CHECK(space.gram_defect() < space.rank_tol());
  }

  SUBCASE("empty input yields the empty space") {
    auto space = orthonormalize({});
    CHECK(space.dimension() == 0);
  }
}

TEST_CASE("span decisions agree with the stacked-rank oracle on mixed harmonic batches") {
  std::mt19937 rng(23);
  for (int rep = 0; rep < 6; ++rep) {
    std::vector<HarmonicOperator> ops;
    for (int k = 0; k < 6; ++k)
      ops.push_back(HarmonicOperator({{0.0, fixtures::random_matrix(3, rng)},
                                      {1.1, fixtures::random_matrix(3, rng)}}));
    // inject one exact dependency
    ops.push_back(ops[0] + ops[1].scaled(Complex(0.5, 0.25)));
    auto space = orthonormalize(ops);
    CHECK(space.dimension() == stacked_rank(ops));
  }
}

TEST_CASE("closed constant observable generates only itself") {
  fixtures::Dephasing deph;
  ComplexMatrix N = deph.H0();  // commutes with itself
  auto [space, report] =
      generate_distribution(HarmonicOperator::constant(N), deph.H0(), {});
  CHECK(report.converged);
  CHECK(space.dimension() == 1);
  CHECK(report.final_dimension == 1);
  CHECK(report.cap_hit == CapKind::none);
  CHECK(space.contains(HarmonicOperator::constant(N)));
}

TEST_CASE("zero observable yields the empty distribution") {
  fixtures::Dephasing deph;
  auto [space, report] =
      generate_distribution(HarmonicOperator::zero(4), deph.H0(), {deph.sigma_x(0)});
  CHECK(report.converged);
  CHECK(space.dimension() == 0);
}

TEST_CASE("oscillator example closes at the quadrature and the interior identity") {
  fixtures::Oscillator osc;
  DistributionOptions opts;
  opts.projector = osc.interior_projector();

  auto [space, report] = generate_distribution(osc.C(), osc.H0(), {osc.H1_raw()}, opts);

  CHECK(report.converged);
  CHECK(report.cap_hit == CapKind::none);
  CHECK(space.dimension() == 2);
  CHECK(space.gram_defect() < space.rank_tol());
  CHECK(report.final_dimension <=
        space.matrix_dim() * space.matrix_dim() * space.frequency_bucket_count());

  CHECK(space.contains(osc.C()));
  ComplexMatrix P = osc.interior_projector();
  HarmonicOperator cos_identity({{osc.omega, P}, {-osc.omega, P}});
  CHECK(space.contains(cos_identity));
  // the time-phase companion carries no further decoupling information
  HarmonicOperator sin_identity(
      {{osc.omega, ComplexMatrix(Complex(0, -1) * P)}, {osc.omega * -1.0, ComplexMatrix(Complex(0, 1) * P)}});
  CHECK(space.contains(sin_identity));

  for (int dim : report.per_stage_dims) CHECK(dim <= 2);
}

TEST_CASE("equal-weight coherence is invariant under collective dephasing drift") {
  fixtures::Dephasing deph;
  ComplexMatrix S = deph.collective_z();

  // [ |i><j| , S ] = 2 (w(i) - w(j)) |i><j|
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      ComplexMatrix E = ketbra(i, j, 4);
      ComplexMatrix expected = 2.0 * double(hamming_weight(i) - hamming_weight(j)) * E;
      CHECK((commutator(E, S) - expected).norm() < 1e-14);
    }

  auto [space, report] =
      generate_distribution(HarmonicOperator::constant(ketbra(1, 2, 4)), deph.H0(), {});
  CHECK(report.converged);
  CHECK(space.dimension() == 1);
  CHECK(space.contains(HarmonicOperator::constant(ketbra(1, 2, 4))));
}

TEST_CASE("per-stage dimensions are monotone and the closure is idempotent") {
  fixtures::Dephasing deph;
  std::mt19937 rng(31);
  HarmonicOperator C = HarmonicOperator::constant(fixtures::random_matrix(4, rng));
  std::vector<ComplexMatrix> controls = {deph.sigma_x(0), deph.sigma_x(1)};

  auto [space, report] = generate_distribution(C, deph.H0(), controls);
  CHECK(report.converged);
  for (size_t k = 1; k < report.per_stage_dims.size(); ++k)
    CHECK(report.per_stage_dims[k] >= report.per_stage_dims[k - 1]);

  // containment: every generator image of every basis element stays inside
  for (const auto& T : space.basis()) {
    for (const auto& Hi : controls)
      CHECK(space.contains(harmonic_commutator(T, HarmonicOperator::constant(Hi)), 1e-8));
    CHECK(space.contains(harmonic_derivation(T, deph.H0()), 1e-8));
  }

  // idempotence: re-generating from any basis element grows nothing new
  for (const auto& T : space.basis()) {
    auto [sub, subreport] = generate_distribution(T, deph.H0(), controls);
    CHECK(subreport.converged);
    for (const auto& B : sub.basis()) CHECK(space.contains(B, 1e-8));
  }
}

TEST_CASE("dephasing distribution of a generic observable follows the weight-difference pattern") {
  fixtures::Dephasing deph;
  std::mt19937 rng(47);
  ComplexMatrix C0(4, 4);
  std::uniform_real_distribution<double> mag(0.5, 1.5);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      C0(i, j) = std::polar(mag(rng), mag(rng));

  auto [space, report] = generate_distribution(HarmonicOperator::constant(C0), deph.H0(), {});
  CHECK(report.converged);

  // oracle: span of the derivation orbit D^K C, rank via the stacked QR
  std::vector<HarmonicOperator> orbit = {HarmonicOperator::constant(C0)};
  for (int k = 0; k < 8; ++k) orbit.push_back(harmonic_derivation(orbit.back(), deph.H0()));
  CHECK(space.dimension() == stacked_rank(orbit));

  // every basis element scales each coordinate by a function of w(j) - w(i) only
  for (const auto& T : space.basis()) {
    REQUIRE(T.terms().size() == 1);
    const ComplexMatrix& B = T.terms()[0].matrix;
    std::map<int, Complex> ratio_by_weight_gap;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        int gap = hamming_weight(j) - hamming_weight(i);
        Complex ratio = B(i, j) / C0(i, j);
        auto [it, fresh] = ratio_by_weight_gap.emplace(gap, ratio);
        if (!fresh) CHECK(std::abs(ratio - it->second) < 1e-9);
      }
  }
}

TEST_CASE("max_dim cap is reported") {
  fixtures::Dephasing deph;
  std::mt19937 rng(53);
  HarmonicOperator C = HarmonicOperator::constant(fixtures::random_matrix(4, rng));
  DistributionOptions opts;
  opts.caps.max_dim = 2;
  auto [space, report] =
      generate_distribution(C, deph.H0(), {deph.sigma_x(0), deph.sigma_x(1)}, opts);
  CHECK(!report.converged);
  CHECK(report.cap_hit == CapKind::dim);
  CHECK(space.dimension() > 2);  // the cap fires after the threshold is crossed
}
