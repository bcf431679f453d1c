#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "decoq/expr.hpp"
#include "decoq/scenario.hpp"
#include "fixtures.hpp"

using namespace decoq;

TEST_CASE("expression grammar: builders") {
  expr::OperatorEnv env;

  SUBCASE("pauli with tensor word") {
    auto op = expr::eval_operator("pauli(\"ZZ\")", env);
    REQUIRE(op.is_constant());
    CHECK((op.evaluate(0.0) - pauli_string("ZZ")).norm() < 1e-14);
  }

  SUBCASE("complex scalar literals") {
    auto op = expr::eval_operator("scale(0.5-1.5i, identity(2))", env);
    CHECK(std::abs(op.terms()[0].matrix(0, 0) - Complex(0.5, -1.5)) < 1e-14);
    auto op2 = expr::eval_operator("scale(2i, identity(2))", env);
    CHECK(std::abs(op2.terms()[0].matrix(0, 0) - Complex(0, 2)) < 1e-14);
    auto op3 = expr::eval_operator("scale(-3, identity(2))", env);
    CHECK(std::abs(op3.terms()[0].matrix(0, 0) - Complex(-3, 0)) < 1e-14);
  }

  SUBCASE("dag, prod, sum, tensor build the number operator and couplings") {
    auto n_op = expr::eval_operator("prod(dag(boson_a(4)), boson_a(4))", env);
    ComplexMatrix a = boson_annihilate(4);
    CHECK((n_op.evaluate(0.0) - ComplexMatrix(a.adjoint() * a)).norm() < 1e-14);

    auto coupling = expr::eval_operator("tensor(pauli(\"Z\"), sum(boson_a(3), dag(boson_a(3))))", env);
    ComplexMatrix b = boson_annihilate(3);
    CHECK((coupling.evaluate(0.0) - tensor(pauli_string("Z"), ComplexMatrix(b + ComplexMatrix(b.adjoint())))).norm() <
          1e-14);
  }

  SUBCASE("harmonic attaches a rotating phase") {
    auto op = expr::eval_operator("harmonic(2.5, boson_a(3))", env);
    REQUIRE(op.terms().size() == 1);
    CHECK(op.terms()[0].freq == doctest::Approx(2.5));
    double t = 0.37;
    CHECK((op.evaluate(t) - std::exp(Complex(0, 2.5 * t)) * boson_annihilate(3)).norm() < 1e-14);
  }

  SUBCASE("named references in order") {
    env["S"] = HarmonicOperator::constant(pauli_string("Z"));
    auto op = expr::eval_operator("sum(S, scale(2, S))", env);
    CHECK((op.evaluate(0.0) - 3.0 * pauli_string("Z")).norm() < 1e-14);
  }

  SUBCASE("state expressions") {
    StateVector v = expr::eval_state("normalize(sum(ket(0, 2), ket(1, 2)))");
    CHECK(std::abs(v.norm() - 1.0) < 1e-14);
    CHECK(std::abs(v(0) - v(1)) < 1e-14);
    StateVector joint = expr::eval_state("tensor(ket(1, 2), ket(0, 3))");
    CHECK(joint.size() == 6);
    CHECK(std::abs(joint(3) - 1.0) < 1e-14);
  }
}

TEST_CASE("expression grammar: position-tracked errors") {
  expr::OperatorEnv env;

  auto position_of = [&](const std::string& src) -> size_t {
    try {
      expr::eval_operator(src, env);
    } catch (const expr::ExprError& e) {
      return e.position();
    }
    return SIZE_MAX;
  };

  CHECK(position_of("pauli(\"ZQ\")") == 0);     // reported at the call
  CHECK(position_of("sum(pauli(\"Z\"), nope)") == 16);
  CHECK(position_of("scale(1 + , identity(2))") == 10);
  CHECK(position_of("boson_a(2") == 9);
  CHECK(position_of("") == 0);
  CHECK_THROWS_AS(expr::eval_operator("tensor(pauli(\"Z\"))", env), expr::ExprError);
  CHECK_THROWS_AS(expr::eval_operator("42", env), expr::ExprError);
  CHECK_THROWS_AS(expr::eval_operator("pauli(\"Z\") extra", env), expr::ExprError);
}

namespace {

std::string minimal_scenario(const std::string& extra_model = "",
                             const std::string& extra_top = "") {
  return std::string(R"json({
    "name": "t",
    "dims": {"system": 2, "environment": 2},
    "operators": {"Z": "pauli(\"Z\")", "b": "boson_a(2)"},
    "model": {
      "H0": "scale(0.5, Z)",
      "H_env": "prod(dag(b), b)",
      "H_SB": "tensor(Z, sum(b, dag(b)))",
      "observable": "Z")json") +
         extra_model + "\n    }" + extra_top + "\n  }";
}

}  // namespace

TEST_CASE("scenario parsing and validation") {
  SUBCASE("minimal scenario builds a valid model") {
    Scenario sc = Scenario::parse(minimal_scenario());
    SystemModel m = sc.build_model();
    CHECK(m.joint_dim() == 4);
    CHECK(m.H_SB.is_hermitian_operator());
  }

  SUBCASE("unknown keys are rejected with a path") {
    std::string text = minimal_scenario("", R"(, "extra": 1)");
    CHECK_THROWS_WITH_AS(Scenario::parse(text),
                         "scenario: unknown key 'extra'", ScenarioError);
    std::string text2 = minimal_scenario(R"(, "bogus": "x")");
    CHECK_THROWS_WITH_AS(Scenario::parse(text2),
                         "model: unknown key 'bogus'", ScenarioError);
  }

  SUBCASE("malformed JSON is reported") {
    CHECK_THROWS_AS(Scenario::parse("{\"name\": }"), ScenarioError);
  }

  SUBCASE("dimension mismatches are named by operator") {
    std::string text = minimal_scenario();
    // sabotage the observable: fits neither the system nor the joint dimension
    size_t pos = text.find("\"observable\": \"Z\"");
    text.replace(pos, 17, "\"observable\": \"pauli(\\\"ZZZ\\\")\"");
    Scenario sc = Scenario::parse(text);
    try {
      sc.build_model();
      FAIL("expected a ScenarioError");
    } catch (const ScenarioError& e) {
      CHECK(std::string(e.what()).find("model.observable") != std::string::npos);
    }
  }

  SUBCASE("non-Hermitian Hamiltonians are rejected at load") {
    std::string text = minimal_scenario();
    size_t pos = text.find("\"H0\": \"scale(0.5, Z)\"");
    text.replace(pos, 21, "\"H0\": \"boson_a(2)\"");
    Scenario sc = Scenario::parse(text);
    CHECK_THROWS_AS(sc.build_model(), ScenarioError);
  }

  SUBCASE("expression errors carry the operator name") {
    std::string text = minimal_scenario();
    size_t pos = text.find("\"b\": \"boson_a(2)\"");
    text.replace(pos, 17, "\"b\": \"boson_a(2\"");
    Scenario sc = Scenario::parse(text);
    try {
      sc.build_model();
      FAIL("expected a ScenarioError");
    } catch (const ScenarioError& e) {
      std::string msg = e.what();
      CHECK(msg.find("operator 'b'") != std::string::npos);
      CHECK(msg.find("position") != std::string::npos);
    }
  }
}

TEST_CASE("scenario serialization round-trips byte-identically") {
  const char* files[] = {"n2_dephasing.json", "oscillator.json", "feedback_joint.json",
                         "n3_dephasing.json"};
  for (const char* name : files) {
    CAPTURE(name);
    Scenario sc = Scenario::load(std::string(DECOQ_SCENARIO_DIR) + "/" + name);
    std::string canonical = sc.serialize();
    Scenario reparsed = Scenario::parse(canonical);
    CHECK(reparsed.serialize() == canonical);
  }
}

TEST_CASE("scenario with a control law builds the corresponding model") {
  std::string text = R"json({
    "name": "fb",
    "dims": {"system": 2, "environment": 1},
    "operators": {"Z": "pauli(\"Z\")", "X": "pauli(\"X\")"},
    "model": {
      "H0": "scale(0.5, Z)",
      "controls": ["X"],
      "observable": "Z",
      "control_law": {
        "type": "feedback",
        "observables": ["Z"],
        "alpha": [[0.2, 0.7]]
      }
    }
  })json";
  Scenario sc = Scenario::parse(text);
  SystemModel m = sc.build_model();
  const auto* law = std::get_if<FeedbackLaw>(&m.control_law);
  REQUIRE(law != nullptr);
  CHECK(law->alpha(0, 0) == doctest::Approx(0.2));
  CHECK(law->observables.size() == 1);

  // canonical round trip with the law included
  std::string canonical = sc.serialize();
  CHECK(Scenario::parse(canonical).serialize() == canonical);
}
