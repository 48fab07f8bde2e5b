#include "mgsim/scenario_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "mgsim/toml.hpp"

namespace mgsim {

namespace {

using toml::Value;

[[noreturn]] void schema_error(const std::string& path, const std::string& why, int line = 0) {
  std::string msg = "scenario key '" + path + "': " + why;
  if (line > 0) msg += " (line " + std::to_string(line) + ")";
  throw ValidationError(msg);
}

const Value* child(const Value& table, const char* key) {
  const auto it = table.table.find(key);
  if (it == table.table.end()) return nullptr;
  it->second.visited = true;
  return &it->second;
}

const Value& require_child(const Value& table, const std::string& parent, const char* key) {
  const Value* v = child(table, key);
  if (!v) schema_error(parent.empty() ? key : parent + "." + key, "missing required key");
  return *v;
}

double as_number(const Value& v, const std::string& path) {
  if (!v.is_number()) schema_error(path, "expected a number", v.line);
  return v.as_number();
}

long long as_int(const Value& v, const std::string& path) {
  if (v.kind != Value::Kind::integer) schema_error(path, "expected an integer", v.line);
  return v.int_value;
}

std::string as_string(const Value& v, const std::string& path) {
  if (v.kind != Value::Kind::string) schema_error(path, "expected a string", v.line);
  return v.str_value;
}

// A scalar broadcasts to all inverters; an array must match their count.
Vec as_vec(const Value& v, int n, const std::string& path) {
  if (v.is_number()) return Vec::Constant(n, v.as_number());
  if (v.kind != Value::Kind::array) schema_error(path, "expected a number or an array", v.line);
  if (static_cast<int>(v.array.size()) != n) {
    schema_error(path,
                 "expected " + std::to_string(n) + " entries, got " +
                     std::to_string(v.array.size()),
                 v.line);
  }
  Vec out(n);
  for (int i = 0; i < n; ++i) out(i) = as_number(v.array[i], path);
  return out;
}

Mat as_matrix(const Value& v, const std::string& path) {
  if (v.kind != Value::Kind::array || v.array.empty()) {
    schema_error(path, "expected an array of rows", v.line);
  }
  const int rows = static_cast<int>(v.array.size());
  int cols = -1;
  Mat out;
  for (int r = 0; r < rows; ++r) {
    const Value& row = v.array[r];
    if (row.kind != Value::Kind::array) schema_error(path, "expected nested arrays", v.line);
    if (cols < 0) {
      cols = static_cast<int>(row.array.size());
      out.resize(rows, cols);
    }
    if (static_cast<int>(row.array.size()) != cols) {
      schema_error(path, "ragged rows", v.line);
    }
    for (int c = 0; c < cols; ++c) out(r, c) = as_number(row.array[c], path);
  }
  return out;
}

SegmentKind parse_kind(const std::string& text, const std::string& path, int line) {
  if (text == "constant") return SegmentKind::constant;
  if (text == "cubic") return SegmentKind::cubic;
  if (text == "exponential") return SegmentKind::exponential;
  if (text == "expr") return SegmentKind::custom;
  schema_error(path, "unknown attack kind '" + text + "'", line);
}

void read_attack_channels(const Value& list, Loop loop, const std::string& path, int n,
                          AttackProfile& profile) {
  if (list.kind != Value::Kind::array) schema_error(path, "expected an array of tables");
  for (size_t idx = 0; idx < list.array.size(); ++idx) {
    const Value& seg_tbl = list.array[idx];
    const std::string seg_path = path + "[" + std::to_string(idx) + "]";
    auto seg_child = [&](const char* key) -> const Value& {
      const Value* v = child(seg_tbl, key);
      if (!v) schema_error(seg_path + "." + key, "missing required key", seg_tbl.line);
      return *v;
    };
    const long long inverter = as_int(seg_child("inverter"), seg_path + ".inverter");
    if (inverter < 1 || inverter > n) {
      schema_error(seg_path + ".inverter",
                   "inverter must be in 1..=" + std::to_string(n) + ", got " +
                       std::to_string(inverter),
                   seg_tbl.line);
    }
    AttackSegment seg;
    seg.t_start = as_number(seg_child("t_start_s"), seg_path + ".t_start_s");
    seg.t_end = as_number(seg_child("t_end_s"), seg_path + ".t_end_s");
    seg.kind =
        parse_kind(as_string(seg_child("kind"), seg_path + ".kind"), seg_path + ".kind",
                   seg_tbl.line);
    switch (seg.kind) {
      case SegmentKind::constant:
        seg.value = as_number(seg_child("value"), seg_path + ".value");
        break;
      case SegmentKind::cubic:
        seg.scale = as_number(seg_child("scale"), seg_path + ".scale");
        seg.offset = as_number(seg_child("offset"), seg_path + ".offset");
        break;
      case SegmentKind::exponential:
        seg.rate = as_number(seg_child("rate"), seg_path + ".rate");
        seg.offset = as_number(seg_child("offset"), seg_path + ".offset");
        break;
      case SegmentKind::custom: {
        const std::string text = as_string(seg_child("expr"), seg_path + ".expr");
        try {
          seg.expr = TimeExpr::parse(text);
        } catch (const ParseError& e) {
          schema_error(seg_path + ".expr", e.what(), seg_tbl.line);
        }
        break;
      }
      case SegmentKind::none:
        break;
    }
    try {
      profile.add_segment(static_cast<int>(inverter - 1), loop, std::move(seg));
    } catch (const ValidationError& e) {
      schema_error(seg_path, e.what(), seg_tbl.line);
    }
  }
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt(const Vec& v) {
  std::string out = "[";
  for (int i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += fmt(v(i));
  }
  return out + "]";
}

const char* kind_name(SegmentKind k) {
  switch (k) {
    case SegmentKind::constant: return "constant";
    case SegmentKind::cubic: return "cubic";
    case SegmentKind::exponential: return "exponential";
    case SegmentKind::custom: return "expr";
    case SegmentKind::none: return "none";
  }
  return "none";
}

void echo_attack(std::ostream& os, const AttackProfile& attacks, Loop loop, const char* table) {
  for (int i = 0; i < attacks.n_inverters(); ++i) {
    for (const AttackSegment& seg : attacks.segments(i, loop)) {
      os << "\n[[" << table << "]]\n";
      os << "inverter = " << (i + 1) << "\n";
      os << "t_start_s = " << fmt(seg.t_start) << "\n";
      os << "t_end_s = " << fmt(seg.t_end) << "\n";
      os << "kind = \"" << kind_name(seg.kind) << "\"\n";
      switch (seg.kind) {
        case SegmentKind::constant:
          os << "value = " << fmt(seg.value) << "\n";
          break;
        case SegmentKind::cubic:
          os << "scale = " << fmt(seg.scale) << "\n";
          os << "offset = " << fmt(seg.offset) << "\n";
          break;
        case SegmentKind::exponential:
          os << "rate = " << fmt(seg.rate) << "\n";
          os << "offset = " << fmt(seg.offset) << "\n";
          break;
        case SegmentKind::custom:
          os << "expr = \"" << seg.expr.text() << "\"\n";
          break;
        case SegmentKind::none:
          break;
      }
    }
  }
}

}  // namespace

ScenarioConfig parse_scenario_text(const std::string& text) {
  const Value root = toml::parse(text);
  root.visited = true;
  ScenarioConfig cfg;

  // [graph]
  const Value* graph = toml::find(root, "graph");
  if (!graph) throw ValidationError("scenario key 'graph': missing required table");
  cfg.adjacency = as_matrix(require_child(*graph, "graph", "adjacency"), "graph.adjacency");
  const int n = static_cast<int>(cfg.adjacency.rows());
  {
    const Value& pin = require_child(*graph, "graph", "pinning");
    if (pin.kind != Value::Kind::array || pin.array.size() != 2) {
      schema_error("graph.pinning", "expected two pinning vectors", pin.line);
    }
    cfg.pinning[0] = as_vec(pin.array[0], n, "graph.pinning[0]");
    cfg.pinning[1] = as_vec(pin.array[1], n, "graph.pinning[1]");
  }

  // [droop]
  const Value* droop = toml::find(root, "droop");
  if (!droop) throw ValidationError("scenario key 'droop': missing required table");
  cfg.droop.m_p = as_vec(require_child(*droop, "droop", "m_p_radps_per_w"), n, "droop.m_p_radps_per_w");
  cfg.droop.n_q = as_vec(require_child(*droop, "droop", "n_q_v_per_var"), n, "droop.n_q_v_per_var");
  cfg.droop.b = as_vec(require_child(*droop, "droop", "b_w_per_rad"), n, "droop.b_w_per_rad");
  cfg.droop.q = as_vec(require_child(*droop, "droop", "q_var_per_v"), n, "droop.q_var_per_v");

  // [load]
  const Value* load = toml::find(root, "load");
  if (!load) throw ValidationError("scenario key 'load': missing required table");
  cfg.load.p_l = as_number(require_child(*load, "load", "p_l_w"), "load.p_l_w");
  cfg.load.q_l = as_number(require_child(*load, "load", "q_l_var"), "load.q_l_var");

  // [gains]
  const Value* gains = toml::find(root, "gains");
  if (!gains) throw ValidationError("scenario key 'gains': missing required table");
  auto gain_vec = [&](const char* key) {
    return as_vec(require_child(*gains, "gains", key), n, std::string("gains.") + key);
  };
  cfg.gains.c_f = gain_vec("c_f");
  cfg.gains.c_v = gain_vec("c_v");
  cfg.gains.beta_f = gain_vec("beta_f");
  cfg.gains.beta_v = gain_vec("beta_v");
  cfg.gains.upsilon_f = gain_vec("upsilon_f");
  cfg.gains.upsilon_v = gain_vec("upsilon_v");
  cfg.gains.kappa_f = gain_vec("kappa_f");
  cfg.gains.kappa_v = gain_vec("kappa_v");
  cfg.gains.alpha_f = gain_vec("alpha_f");
  cfg.gains.alpha_v = gain_vec("alpha_v");
  if (const Value* form = child(*gains, "eta_form")) {
    const std::string text = as_string(*form, "gains.eta_form");
    if (text == "gaussian") {
      cfg.gains.eta_form = EtaForm::gaussian;
    } else if (text == "exponential") {
      cfg.gains.eta_form = EtaForm::exponential_in_t;
    } else {
      schema_error("gains.eta_form", "expected \"gaussian\" or \"exponential\"", form->line);
    }
  }

  // [leaders]
  const Value* leaders = toml::find(root, "leaders");
  if (!leaders) throw ValidationError("scenario key 'leaders': missing required table");
  const Value* f_hz = child(*leaders, "f_ref_hz");
  const Value* w_radps = child(*leaders, "omega_ref_radps");
  if (f_hz && w_radps) {
    schema_error("leaders", "give either f_ref_hz or omega_ref_radps, not both", f_hz->line);
  }
  if (f_hz) {
    const double w = 2.0 * M_PI * as_number(*f_hz, "leaders.f_ref_hz");
    cfg.leaders.omega_ref = {w, w};
  } else if (w_radps) {
    if (w_radps->kind != Value::Kind::array || w_radps->array.size() != 2) {
      schema_error("leaders.omega_ref_radps", "expected two values", w_radps->line);
    }
    cfg.leaders.omega_ref = {as_number(w_radps->array[0], "leaders.omega_ref_radps[0]"),
                             as_number(w_radps->array[1], "leaders.omega_ref_radps[1]")};
  } else {
    schema_error("leaders.f_ref_hz", "missing required key");
  }
  cfg.leaders.v_ref = {as_number(require_child(*leaders, "leaders", "v_upper_v"), "leaders.v_upper_v"),
                       as_number(require_child(*leaders, "leaders", "v_lower_v"), "leaders.v_lower_v")};
  if (const Value* nom = child(*leaders, "nominal_omega_radps")) {
    cfg.nominal_omega = as_number(*nom, "leaders.nominal_omega_radps");
  } else {
    cfg.nominal_omega = cfg.leaders.omega_ref[0];
  }

  // [sim]
  const Value* sim = toml::find(root, "sim");
  if (!sim) throw ValidationError("scenario key 'sim': missing required table");
  cfg.dt = as_number(require_child(*sim, "sim", "dt_s"), "sim.dt_s");
  cfg.t_end = as_number(require_child(*sim, "sim", "t_end_s"), "sim.t_end_s");
  if (!(cfg.dt > 0.0)) schema_error("sim.dt_s", "must be positive");
  const double sample_ms = as_number(require_child(*sim, "sim", "sample_ms"), "sim.sample_ms");
  cfg.sample_stride = static_cast<int>(std::max(1LL, std::llround(sample_ms * 1e-3 / cfg.dt)));
  const std::string ctl = as_string(require_child(*sim, "sim", "controller"), "sim.controller");
  if (ctl == "conventional") {
    cfg.controller = ControllerKind::conventional;
  } else if (ctl == "resilient") {
    cfg.controller = ControllerKind::resilient;
  } else {
    schema_error("sim.controller", "expected \"conventional\" or \"resilient\"");
  }
  cfg.blowup = 1e7;
  if (const Value* blow = child(*sim, "blowup")) {
    cfg.blowup = as_number(*blow, "sim.blowup");
  }

  // [init] (optional; defaults resolve here)
  cfg.init.delta = Vec::Zero(n);
  cfg.init.omega_n = Vec::Constant(n, cfg.leaders.omega_ref[0]);
  cfg.init.v_n = Vec::Constant(n, 0.5 * (cfg.leaders.v_ref[0] + cfg.leaders.v_ref[1]));
  cfg.init.phi_f = Vec::Constant(n, 0.1);
  cfg.init.phi_hat_f = Vec::Zero(n);
  cfg.init.phi_v = Vec::Constant(n, 0.1);
  cfg.init.phi_hat_v = Vec::Zero(n);
  if (const Value* init = toml::find(root, "init")) {
    if (const Value* v = child(*init, "delta_rad")) {
      cfg.init.delta = as_vec(*v, n, "init.delta_rad");
    }
    const Value* wn_hz = child(*init, "omega_n_hz");
    const Value* wn_radps = child(*init, "omega_n_radps");
    if (wn_hz && wn_radps) {
      schema_error("init", "give either omega_n_hz or omega_n_radps, not both", wn_hz->line);
    }
    if (wn_hz) cfg.init.omega_n = 2.0 * M_PI * as_vec(*wn_hz, n, "init.omega_n_hz");
    if (wn_radps) cfg.init.omega_n = as_vec(*wn_radps, n, "init.omega_n_radps");
    if (const Value* v = child(*init, "v_n_v")) cfg.init.v_n = as_vec(*v, n, "init.v_n_v");
    if (const Value* v = child(*init, "phi0")) {
      cfg.init.phi_f = as_vec(*v, n, "init.phi0");
      cfg.init.phi_v = cfg.init.phi_f;
    }
    if (const Value* v = child(*init, "phi_hat0")) {
      cfg.init.phi_hat_f = as_vec(*v, n, "init.phi_hat0");
      cfg.init.phi_hat_v = cfg.init.phi_hat_f;
    }
  }

  // [envelope] (optional)
  if (const Value* env = toml::find(root, "envelope")) {
    cfg.envelope.gamma = as_number(require_child(*env, "envelope", "gamma"), "envelope.gamma");
    cfg.envelope.rho = as_number(require_child(*env, "envelope", "rho"), "envelope.rho");
  }

  // [[attack.frequency]] / [[attack.voltage]]
  cfg.attacks = AttackProfile(n);
  if (const Value* attack = toml::find(root, "attack")) {
    if (const Value* freq = child(*attack, "frequency")) {
      read_attack_channels(*freq, Loop::frequency, "attack.frequency", n, cfg.attacks);
    }
    if (const Value* volt = child(*attack, "voltage")) {
      read_attack_channels(*volt, Loop::voltage, "attack.voltage", n, cfg.attacks);
    }
  }

  const std::vector<std::string> unknown = toml::unvisited_keys(root);
  if (!unknown.empty()) {
    std::string msg = "unknown scenario keys:";
    for (const std::string& k : unknown) msg += " " + k;
    throw ValidationError(msg);
  }

  cfg.validate();
  return cfg;
}

ScenarioConfig parse_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("file not found: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_scenario_text(ss.str());
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what(), e.line);
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

std::string echo_toml(const ScenarioConfig& cfg) {
  std::ostringstream os;
  const int n = cfg.n_inverters();
  os << "# resolved scenario (canonical echo)\n";
  os << "\n[graph]\n";
  os << "adjacency = [";
  for (int r = 0; r < n; ++r) {
    if (r) os << ", ";
    os << fmt(Vec(cfg.adjacency.row(r).transpose()));
  }
  os << "]\n";
  os << "pinning = [" << fmt(cfg.pinning[0]) << ", " << fmt(cfg.pinning[1]) << "]\n";

  os << "\n[droop]\n";
  os << "m_p_radps_per_w = " << fmt(cfg.droop.m_p) << "\n";
  os << "n_q_v_per_var = " << fmt(cfg.droop.n_q) << "\n";
  os << "b_w_per_rad = " << fmt(cfg.droop.b) << "\n";
  os << "q_var_per_v = " << fmt(cfg.droop.q) << "\n";

  os << "\n[load]\n";
  os << "p_l_w = " << fmt(cfg.load.p_l) << "\n";
  os << "q_l_var = " << fmt(cfg.load.q_l) << "\n";

  os << "\n[gains]\n";
  os << "c_f = " << fmt(cfg.gains.c_f) << "\n";
  os << "c_v = " << fmt(cfg.gains.c_v) << "\n";
  os << "beta_f = " << fmt(cfg.gains.beta_f) << "\n";
  os << "beta_v = " << fmt(cfg.gains.beta_v) << "\n";
  os << "upsilon_f = " << fmt(cfg.gains.upsilon_f) << "\n";
  os << "upsilon_v = " << fmt(cfg.gains.upsilon_v) << "\n";
  os << "kappa_f = " << fmt(cfg.gains.kappa_f) << "\n";
  os << "kappa_v = " << fmt(cfg.gains.kappa_v) << "\n";
  os << "alpha_f = " << fmt(cfg.gains.alpha_f) << "\n";
  os << "alpha_v = " << fmt(cfg.gains.alpha_v) << "\n";
  os << "eta_form = \""
     << (cfg.gains.eta_form == EtaForm::gaussian ? "gaussian" : "exponential") << "\"\n";

  os << "\n[leaders]\n";
  os << "omega_ref_radps = [" << fmt(cfg.leaders.omega_ref[0]) << ", "
     << fmt(cfg.leaders.omega_ref[1]) << "]\n";
  os << "v_upper_v = " << fmt(cfg.leaders.v_ref[0]) << "\n";
  os << "v_lower_v = " << fmt(cfg.leaders.v_ref[1]) << "\n";
  os << "nominal_omega_radps = " << fmt(cfg.nominal_omega) << "\n";

  os << "\n[sim]\n";
  os << "dt_s = " << fmt(cfg.dt) << "\n";
  os << "t_end_s = " << fmt(cfg.t_end) << "\n";
  os << "sample_ms = " << fmt(cfg.sample_interval() * 1e3) << "\n";
  os << "controller = \""
     << (cfg.controller == ControllerKind::resilient ? "resilient" : "conventional") << "\"\n";
  os << "blowup = " << fmt(cfg.blowup) << "\n";

  os << "\n[init]\n";
  os << "delta_rad = " << fmt(cfg.init.delta) << "\n";
  os << "omega_n_radps = " << fmt(cfg.init.omega_n) << "\n";
  os << "v_n_v = " << fmt(cfg.init.v_n) << "\n";
  os << "phi0 = " << fmt(cfg.init.phi_f) << "\n";
  os << "phi_hat0 = " << fmt(cfg.init.phi_hat_f) << "\n";

  os << "\n[envelope]\n";
  os << "gamma = " << fmt(cfg.envelope.gamma) << "\n";
  os << "rho = " << fmt(cfg.envelope.rho) << "\n";

  echo_attack(os, cfg.attacks, Loop::frequency, "attack.frequency");
  echo_attack(os, cfg.attacks, Loop::voltage, "attack.voltage");
  return os.str();
}

void write_config_echo(const ScenarioConfig& cfg, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << echo_toml(cfg);
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace mgsim
