#include "decoq/scenario.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "decoq/expr.hpp"

namespace decoq {

using json = nlohmann::ordered_json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ScenarioError(where + ": " + what);
}

void reject_unknown(const json& obj, const std::string& where,
                    const std::set<std::string>& known) {
  for (const auto& [key, _] : obj.items())
    if (!known.count(key)) fail(where, "unknown key '" + key + "'");
}

const json& need(const json& obj, const std::string& where, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) fail(where, std::string("missing key '") + key + "'");
  return *it;
}

std::string get_string(const json& v, const std::string& where) {
  if (!v.is_string()) fail(where, "expected a string");
  return v.get<std::string>();
}

double get_number(const json& v, const std::string& where) {
  if (!v.is_number()) fail(where, "expected a number");
  return v.get<double>();
}

int get_int(const json& v, const std::string& where) {
  if (!v.is_number_integer()) fail(where, "expected an integer");
  return v.get<int>();
}

std::vector<double> get_real_vector(const json& v, const std::string& where) {
  if (!v.is_array()) fail(where, "expected an array of numbers");
  std::vector<double> out;
  for (const auto& x : v) out.push_back(get_number(x, where));
  return out;
}

std::vector<std::vector<double>> get_real_matrix(const json& v, const std::string& where) {
  if (!v.is_array()) fail(where, "expected an array of rows");
  std::vector<std::vector<double>> out;
  for (const auto& row : v) out.push_back(get_real_vector(row, where));
  return out;
}

Scenario::ControlLawSpec parse_control_law(const json& v) {
  const std::string where = "model.control_law";
  if (!v.is_object()) fail(where, "expected an object");
  Scenario::ControlLawSpec law;
  law.type = get_string(need(v, where, "type"), where + ".type");
  if (law.type == "piecewise") {
    reject_unknown(v, where, {"type", "times", "values"});
    if (v.contains("times")) law.times = get_real_vector(v["times"], where + ".times");
    if (v.contains("values")) law.values = get_real_matrix(v["values"], where + ".values");
    if (law.times.size() != law.values.size())
      fail(where, "'times' and 'values' must have the same length");
  } else if (law.type == "feedback") {
    reject_unknown(v, where,
                   {"type", "observables", "alpha", "beta", "reference_times", "reference_values"});
    for (const auto& o : need(v, where, "observables"))
      law.observables.push_back(get_string(o, where + ".observables"));
    law.alpha = get_real_matrix(need(v, where, "alpha"), where + ".alpha");
    if (v.contains("beta")) {
      if (!v["beta"].is_array()) fail(where + ".beta", "expected an array of matrices");
      for (const auto& b : v["beta"]) law.beta.push_back(get_real_matrix(b, where + ".beta"));
    }
    if (v.contains("reference_times"))
      law.reference_times = get_real_vector(v["reference_times"], where + ".reference_times");
    if (v.contains("reference_values"))
      law.reference_values = get_real_matrix(v["reference_values"], where + ".reference_values");
    if (law.reference_times.size() != law.reference_values.size())
      fail(where, "'reference_times' and 'reference_values' must have the same length");
  } else {
    fail(where + ".type", "must be 'piecewise' or 'feedback'");
  }
  return law;
}

}  // namespace

Scenario Scenario::parse(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ScenarioError(std::string("scenario: ") + e.what());
  }
  if (!root.is_object()) throw ScenarioError("scenario: top level must be an object");
  reject_unknown(root, "scenario", {"name", "dims", "operators", "model", "analysis", "outputs"});

  Scenario sc;
  sc.name = get_string(need(root, "scenario", "name"), "name");

  const json& dims = need(root, "scenario", "dims");
  reject_unknown(dims, "dims", {"system", "environment"});
  sc.d_s = get_int(need(dims, "dims", "system"), "dims.system");
  sc.d_e = dims.contains("environment") ? get_int(dims["environment"], "dims.environment") : 1;
  if (sc.d_s < 1 || sc.d_e < 1) fail("dims", "dimensions must be >= 1");

  const json& ops = need(root, "scenario", "operators");
  if (!ops.is_object()) fail("operators", "expected an object of name -> expression");
  for (const auto& [opname, expr] : ops.items()) {
    for (const auto& [seen, _] : sc.operators)
      if (seen == opname) fail("operators", "duplicate operator '" + opname + "'");
    sc.operators.emplace_back(opname, get_string(expr, "operators." + opname));
  }

  const json& model = need(root, "scenario", "model");
  reject_unknown(model, "model",
                 {"H0", "H_env", "controls", "H_SB", "H_SB_system_factors", "observable",
                  "control_law"});
  sc.H0 = get_string(need(model, "model", "H0"), "model.H0");
  if (model.contains("H_env")) sc.H_env = get_string(model["H_env"], "model.H_env");
  if (model.contains("controls")) {
    if (!model["controls"].is_array()) fail("model.controls", "expected an array");
    for (const auto& c : model["controls"]) {
      ControlSpec spec;
      if (c.is_string()) {
        spec.op = c.get<std::string>();
      } else if (c.is_object()) {
        reject_unknown(c, "model.controls[]", {"op", "joint"});
        spec.op = get_string(need(c, "model.controls[]", "op"), "model.controls[].op");
        if (c.contains("joint")) {
          if (!c["joint"].is_boolean()) fail("model.controls[].joint", "expected a boolean");
          spec.joint = c["joint"].get<bool>();
        }
      } else {
        fail("model.controls[]", "expected a string or an object");
      }
      sc.controls.push_back(std::move(spec));
    }
  }
  if (model.contains("H_SB")) sc.H_SB = get_string(model["H_SB"], "model.H_SB");
  if (model.contains("H_SB_system_factors")) {
    if (!model["H_SB_system_factors"].is_array())
      fail("model.H_SB_system_factors", "expected an array");
    for (const auto& s : model["H_SB_system_factors"])
      sc.interaction_system_factors.push_back(get_string(s, "model.H_SB_system_factors"));
  }
  sc.observable = get_string(need(model, "model", "observable"), "model.observable");
  if (model.contains("control_law")) sc.control_law = parse_control_law(model["control_law"]);

  if (root.contains("analysis")) {
    const json& an = root["analysis"];
    reject_unknown(an, "analysis",
                   {"tol", "freq_tol", "rank_tol", "dt", "t_span", "max_ad_depth", "max_stage",
                    "max_dim", "seed", "initial_states"});
    if (an.contains("tol")) sc.tol = get_number(an["tol"], "analysis.tol");
    if (an.contains("freq_tol")) sc.freq_tol = get_number(an["freq_tol"], "analysis.freq_tol");
    if (an.contains("rank_tol")) sc.rank_tol = get_number(an["rank_tol"], "analysis.rank_tol");
    if (an.contains("dt")) sc.dt = get_number(an["dt"], "analysis.dt");
    if (an.contains("t_span")) {
      auto v = get_real_vector(an["t_span"], "analysis.t_span");
      if (v.size() != 2) fail("analysis.t_span", "expected [t0, t1]");
      sc.t_span = {v[0], v[1]};
    }
    if (an.contains("max_ad_depth")) sc.max_ad_depth = get_int(an["max_ad_depth"], "analysis.max_ad_depth");
    if (an.contains("max_stage")) sc.max_stage = get_int(an["max_stage"], "analysis.max_stage");
    if (an.contains("max_dim")) sc.max_dim = get_int(an["max_dim"], "analysis.max_dim");
    if (an.contains("seed")) sc.seed = unsigned(get_int(an["seed"], "analysis.seed"));
    if (an.contains("initial_states"))
      for (const auto& s : an["initial_states"])
        sc.initial_states.push_back(get_string(s, "analysis.initial_states"));
  }

  if (root.contains("outputs")) {
    const json& out = root["outputs"];
    reject_unknown(out, "outputs", {"trace_dir", "report"});
    if (out.contains("trace_dir")) sc.trace_dir = get_string(out["trace_dir"], "outputs.trace_dir");
    if (out.contains("report")) sc.report_path = get_string(out["report"], "outputs.report");
  }
  return sc;
}

Scenario Scenario::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open scenario file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::string Scenario::serialize() const {
  json root;
  root["name"] = name;
  root["dims"]["system"] = d_s;
  root["dims"]["environment"] = d_e;
  json ops = json::object();
  for (const auto& [opname, expr] : operators) ops[opname] = expr;
  root["operators"] = std::move(ops);

  json model;
  model["H0"] = H0;
  if (!H_env.empty()) model["H_env"] = H_env;
  if (!controls.empty()) {
    json arr = json::array();
    for (const auto& c : controls) arr.push_back(json{{"op", c.op}, {"joint", c.joint}});
    model["controls"] = std::move(arr);
  }
  if (!H_SB.empty()) model["H_SB"] = H_SB;
  if (!interaction_system_factors.empty())
    model["H_SB_system_factors"] = interaction_system_factors;
  model["observable"] = observable;
  if (control_law) {
    json law;
    law["type"] = control_law->type;
    if (control_law->type == "piecewise") {
      if (!control_law->times.empty()) {
        law["times"] = control_law->times;
        law["values"] = control_law->values;
      }
    } else {
      law["observables"] = control_law->observables;
      law["alpha"] = control_law->alpha;
      if (!control_law->beta.empty()) law["beta"] = control_law->beta;
      if (!control_law->reference_times.empty()) {
        law["reference_times"] = control_law->reference_times;
        law["reference_values"] = control_law->reference_values;
      }
    }
    model["control_law"] = std::move(law);
  }
  root["model"] = std::move(model);

  json an;
  if (tol) an["tol"] = *tol;
  if (freq_tol) an["freq_tol"] = *freq_tol;
  if (rank_tol) an["rank_tol"] = *rank_tol;
  if (dt) an["dt"] = *dt;
  if (t_span) an["t_span"] = std::vector<double>{(*t_span)[0], (*t_span)[1]};
  if (max_ad_depth) an["max_ad_depth"] = *max_ad_depth;
  if (max_stage) an["max_stage"] = *max_stage;
  if (max_dim) an["max_dim"] = *max_dim;
  if (seed) an["seed"] = int(*seed);
  if (!initial_states.empty()) an["initial_states"] = initial_states;
  if (!an.empty()) root["analysis"] = std::move(an);

  json out;
  if (trace_dir) out["trace_dir"] = *trace_dir;
  if (report_path) out["report"] = *report_path;
  if (!out.empty()) root["outputs"] = std::move(out);

  return root.dump(2) + "\n";
}

namespace {

HarmonicOperator eval_in_env(const std::string& source, const expr::OperatorEnv& env,
                             const std::string& what, double freq_tol) {
  try {
    HarmonicOperator op = expr::eval_operator(source, env);
    if (freq_tol != kFreqTol) {
      std::vector<HarmonicOperator::Term> terms(op.terms().begin(), op.terms().end());
      op = HarmonicOperator(std::move(terms), freq_tol);
    }
    return op;
  } catch (const expr::ExprError& e) {
    throw ScenarioError(what + ": " + e.what());
  } catch (const std::exception& e) {
    throw ScenarioError(what + ": " + e.what());
  }
}

}  // namespace

SystemModel Scenario::build_model() const {
  expr::OperatorEnv env;
  double ftol = freq_tol.value_or(kFreqTol);
  for (const auto& [opname, source] : operators)
    env[opname] = eval_in_env(source, env, "operator '" + opname + "'", ftol);

  SystemModel model;
  model.factorization = HilbertFactorization(d_s, d_e);

  HarmonicOperator H0op = eval_in_env(H0, env, "model.H0", ftol);
  if (!H0op.is_constant()) throw ScenarioError("model.H0: must be time-independent");
  if (H0op.dim() != d_s) throw ScenarioError("model.H0: expected dimension " + std::to_string(d_s));
  model.H0_sys = H0op.evaluate(0.0);

  if (!H_env.empty()) {
    HarmonicOperator He = eval_in_env(H_env, env, "model.H_env", ftol);
    if (!He.is_constant()) throw ScenarioError("model.H_env: must be time-independent");
    if (He.dim() != d_e)
      throw ScenarioError("model.H_env: expected dimension " + std::to_string(d_e));
    model.H_env = He.evaluate(0.0);
  }

  for (size_t i = 0; i < controls.size(); ++i) {
    const std::string what = "model.controls[" + std::to_string(i) + "]";
    HarmonicOperator Hc = eval_in_env(controls[i].op, env, what, ftol);
    if (!Hc.is_constant()) throw ScenarioError(what + ": must be time-independent");
    int want = controls[i].joint ? d_s * d_e : d_s;
    if (Hc.dim() != want)
      throw ScenarioError(what + ": expected dimension " + std::to_string(want));
    model.controls.push_back({Hc.evaluate(0.0), controls[i].joint});
  }

  if (!H_SB.empty()) {
    model.H_SB = eval_in_env(H_SB, env, "model.H_SB", ftol);
    if (!model.H_SB.empty() && model.H_SB.dim() != d_s * d_e)
      throw ScenarioError("model.H_SB: expected joint dimension " + std::to_string(d_s * d_e));
  }

  model.observable = eval_in_env(observable, env, "model.observable", ftol);
  if (model.observable.dim() != d_s && model.observable.dim() != d_s * d_e)
    throw ScenarioError("model.observable: expected dimension " + std::to_string(d_s) + " or " +
                        std::to_string(d_s * d_e));

  if (control_law) {
    if (control_law->type == "piecewise") {
      PiecewiseSchedule sched;
      sched.times = control_law->times;
      for (const auto& row : control_law->values) {
        if (row.size() != controls.size())
          throw ScenarioError("model.control_law.values: each row needs one entry per control");
        sched.values.push_back(Eigen::Map<const Eigen::VectorXd>(row.data(), row.size()));
      }
      model.control_law = std::move(sched);
    } else {
      FeedbackLaw law;
      for (const auto& oname : control_law->observables)
        law.observables.push_back(eval_in_env(oname, env, "control_law observable", ftol));
      size_t m = law.observables.size(), r = controls.size();
      if (control_law->alpha.size() != r)
        throw ScenarioError("model.control_law.alpha: need one row per control");
      law.alpha.resize(r, 1 + m);
      for (size_t i = 0; i < r; ++i) {
        if (control_law->alpha[i].size() != 1 + m)
          throw ScenarioError("model.control_law.alpha: rows must have 1+m entries");
        for (size_t k = 0; k <= m; ++k) law.alpha(int(i), int(k)) = control_law->alpha[i][k];
      }
      if (!control_law->beta.empty()) {
        if (control_law->beta.size() != 1 + m)
          throw ScenarioError("model.control_law.beta: need 1+m matrices");
        for (const auto& mat : control_law->beta) {
          if (mat.size() != r) throw ScenarioError("model.control_law.beta: matrices must be rxr");
          Eigen::MatrixXd B(r, r);
          for (size_t i = 0; i < r; ++i) {
            if (mat[i].size() != r)
              throw ScenarioError("model.control_law.beta: matrices must be rxr");
            for (size_t j = 0; j < r; ++j) B(int(i), int(j)) = mat[i][j];
          }
          law.beta.push_back(std::move(B));
        }
        law.reference.times = control_law->reference_times;
        for (const auto& row : control_law->reference_values) {
          if (row.size() != r)
            throw ScenarioError("model.control_law.reference_values: rows must have r entries");
          law.reference.values.push_back(Eigen::Map<const Eigen::VectorXd>(row.data(), row.size()));
        }
      }
      model.control_law = std::move(law);
    }
  }

  try {
    model.validate();
  } catch (const std::exception& e) {
    throw ScenarioError(std::string("model validation: ") + e.what());
  }
  return model;
}

std::vector<ComplexMatrix> Scenario::system_factors() const {
  expr::OperatorEnv env;
  double ftol = freq_tol.value_or(kFreqTol);
  for (const auto& [opname, source] : operators)
    env[opname] = eval_in_env(source, env, "operator '" + opname + "'", ftol);
  std::vector<ComplexMatrix> out;
  for (size_t k = 0; k < interaction_system_factors.size(); ++k) {
    const std::string what = "model.H_SB_system_factors[" + std::to_string(k) + "]";
    HarmonicOperator S = eval_in_env(interaction_system_factors[k], env, what, ftol);
    if (!S.is_constant()) throw ScenarioError(what + ": must be time-independent");
    if (S.dim() != d_s) throw ScenarioError(what + ": expected dimension " + std::to_string(d_s));
    out.push_back(S.evaluate(0.0));
  }
  return out;
}

std::vector<StateVector> Scenario::initial_state_vectors() const {
  std::vector<StateVector> out;
  for (size_t k = 0; k < initial_states.size(); ++k) {
    try {
      StateVector v = expr::eval_state(initial_states[k]);
      if (v.size() != d_s && v.size() != d_s * d_e)
        throw ScenarioError("dimension " + std::to_string(v.size()) + " fits neither system nor joint");
      out.push_back(std::move(v));
    } catch (const std::exception& e) {
      throw ScenarioError("analysis.initial_states[" + std::to_string(k) + "]: " + e.what());
    }
  }
  return out;
}

DistributionOptions Scenario::distribution_options() const {
  DistributionOptions opts;
  if (max_ad_depth) opts.caps.max_ad_depth = *max_ad_depth;
  if (max_stage) opts.caps.max_stage = *max_stage;
  if (max_dim) opts.caps.max_dim = *max_dim;
  if (rank_tol) opts.rank_tol = *rank_tol;
  if (freq_tol) opts.freq_tol = *freq_tol;
  return opts;
}

}  // namespace decoq
