#ifndef DECOQ_TESTS_FIXTURES_HPP
#define DECOQ_TESTS_FIXTURES_HPP

#include <random>

#include "decoq/builders.hpp"
#include "decoq/model.hpp"

namespace decoq::fixtures {

// driven electromagnetic mode monitored by its rotating quadrature,
// coupled to one bath mode by an excitation-exchange interaction
struct Oscillator {
  int d = 10;
  int d_e = 4;
  double omega = 1.0;
  double omega_bath = 1.3;
  double g = 0.5;

  ComplexMatrix a() const { return boson_annihilate(d); }
  ComplexMatrix number_op() const { return ComplexMatrix(a().adjoint() * a()); }
  ComplexMatrix H0() const { return ComplexMatrix(omega * number_op()); }
  // algebraic form of the control used by the worked example
  ComplexMatrix H1_raw() const { return ComplexMatrix(a().adjoint() - a()); }
  // Hermitian form used for propagation, i(a^dag - a)
  ComplexMatrix H1_hermitian() const { return ComplexMatrix(Complex(0, 1) * H1_raw()); }

  HarmonicOperator C() const {
    return HarmonicOperator({{omega, a()}, {-omega, ComplexMatrix(a().adjoint())}});
  }

  // projector onto Fock levels 0..d-2, where canonical commutation holds
  ComplexMatrix interior_projector() const {
    ComplexMatrix P = ComplexMatrix::Identity(d, d);
    P(d - 1, d - 1) = 0.0;
    return P;
  }

  HilbertFactorization fact() const { return HilbertFactorization(d, d_e); }

  HarmonicOperator H_SB() const {
    ComplexMatrix c = boson_annihilate(d_e);
    ComplexMatrix coupling =
        g * (tensor(a(), ComplexMatrix(c.adjoint())) + tensor(ComplexMatrix(a().adjoint()), c));
    return HarmonicOperator::constant(coupling);
  }

  SystemModel model() const {
    SystemModel m;
    m.factorization = fact();
    m.H0_sys = H0();
    m.H_env = omega_bath * ComplexMatrix(boson_annihilate(d_e).adjoint() * boson_annihilate(d_e));
    m.controls.push_back({H1_hermitian(), false});
    m.H_SB = H_SB();
    m.observable = C();
    return m;
  }
};

// N qubits dephasing collectively through sum sigma_z into one bath mode
struct Dephasing {
  int n_qubits = 2;
  int d_e = 4;
  double omega0 = 1.0;
  double omega_bath = 1.0;
  double g = 0.5;

  int d_s() const { return 1 << n_qubits; }

  ComplexMatrix collective_z() const {
    ComplexMatrix S = ComplexMatrix::Zero(d_s(), d_s());
    for (int q = 0; q < n_qubits; ++q) {
      std::string word(n_qubits, 'I');
      word[q] = 'Z';
      S += pauli_string(word);
    }
    return S;
  }

  ComplexMatrix sigma_x(int q) const {
    std::string word(n_qubits, 'I');
    word[q] = 'X';
    return pauli_string(word);
  }

  ComplexMatrix H0() const { return ComplexMatrix(0.5 * omega0 * collective_z()); }

  HilbertFactorization fact() const { return HilbertFactorization(d_s(), d_e); }

  HarmonicOperator H_SB() const {
    ComplexMatrix b = boson_annihilate(d_e);
    ComplexMatrix B = g * ComplexMatrix(b + ComplexMatrix(b.adjoint()));
    return HarmonicOperator::constant(tensor(collective_z(), B));
  }

  SystemModel model(const HarmonicOperator& observable,
                    std::vector<ComplexMatrix> controls = {}) const {
    SystemModel m;
    m.factorization = fact();
    m.H0_sys = H0();
    ComplexMatrix b = boson_annihilate(d_e);
    m.H_env = omega_bath * ComplexMatrix(b.adjoint() * b);
    for (auto& c : controls) m.controls.push_back({std::move(c), false});
    m.H_SB = H_SB();
    m.observable = observable;
    return m;
  }
};

inline ComplexMatrix random_matrix(int d, std::mt19937& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  ComplexMatrix M(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) M(i, j) = Complex(gauss(rng), gauss(rng));
  return M;
}

inline ComplexMatrix random_hermitian(int d, std::mt19937& rng) {
  ComplexMatrix M = random_matrix(d, rng);
  return ComplexMatrix(0.5 * (M + ComplexMatrix(M.adjoint())));
}

inline StateVector random_state(int d, std::mt19937& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  StateVector v(d);
  for (int i = 0; i < d; ++i) v(i) = Complex(gauss(rng), gauss(rng));
  return v / v.norm();
}

}  // namespace decoq::fixtures

#endif
