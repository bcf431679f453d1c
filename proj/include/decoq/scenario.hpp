#ifndef DECOQ_SCENARIO_HPP
#define DECOQ_SCENARIO_HPP

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "decoq/distribution.hpp"
#include "decoq/dynamics.hpp"
#include "decoq/model.hpp"

namespace decoq {

class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One scenario file: dimensions, named operator definitions (builder expressions),
/// model wiring, analysis parameters and output paths. Parsing rejects unknown keys;
/// serialization is canonical, so parse ∘ serialize is the identity on bytes.
struct Scenario {
  std::string name;
  int d_s = 1;
  int d_e = 1;
  std::vector<std::pair<std::string, std::string>> operators;  // (name, expression), ordered

  struct ControlSpec {
    std::string op;  // expression or operator name
    bool joint = false;
  };
  std::string H0;     // expression or name; required
  std::string H_env;  // optional ("" = zero)
  std::vector<ControlSpec> controls;
  std::string H_SB;                                   // optional
  std::vector<std::string> interaction_system_factors;  // S_k of H_SB = sum S_k (x) B_k
  std::string observable;                             // required

  struct ControlLawSpec {
    std::string type;  // "piecewise" or "feedback"
    std::vector<double> times;
    std::vector<std::vector<double>> values;
    std::vector<std::string> observables;               // feedback
    std::vector<std::vector<double>> alpha;              // r x (1+m)
    std::vector<std::vector<std::vector<double>>> beta;  // (1+m) x r x r
    std::vector<double> reference_times;
    std::vector<std::vector<double>> reference_values;
  };
  std::optional<ControlLawSpec> control_law;

  std::optional<double> tol, freq_tol, rank_tol, dt;
  std::optional<std::array<double, 2>> t_span;
  std::optional<int> max_ad_depth, max_stage, max_dim;
  std::optional<unsigned> seed;
  std::vector<std::string> initial_states;

  std::optional<std::string> trace_dir, report_path;

  static Scenario parse(const std::string& text);
  static Scenario load(const std::string& path);
  std::string serialize() const;

  SystemModel build_model() const;
  std::vector<ComplexMatrix> system_factors() const;
  std::vector<StateVector> initial_state_vectors() const;
  DistributionOptions distribution_options() const;

  double verdict_tol() const { return tol.value_or(kMatrixZeroTol); }
  double time_step() const { return dt.value_or(0.01); }
  std::array<double, 2> time_span() const { return t_span.value_or(std::array<double, 2>{0, 10}); }
  unsigned chain_seed() const { return seed.value_or(12345u); }
};

}  // namespace decoq

#endif
