#include "mgsim/scenario.hpp"

#include <cmath>

namespace mgsim {

namespace {

bool vec_equal(const Vec& a, const Vec& b) {
  return a.size() == b.size() && (a.array() == b.array()).all();
}

bool mat_equal(const Mat& a, const Mat& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && (a.array() == b.array()).all();
}

void require_finite(const Vec& v, const char* name) {
  if (!v.allFinite()) throw ValidationError(std::string(name) + " must be finite");
}

}  // namespace

bool DroopParams::operator==(const DroopParams& o) const {
  return vec_equal(m_p, o.m_p) && vec_equal(n_q, o.n_q) && vec_equal(b, o.b) &&
         vec_equal(q, o.q);
}

bool GainSet::operator==(const GainSet& o) const {
  return vec_equal(c_f, o.c_f) && vec_equal(c_v, o.c_v) && vec_equal(beta_f, o.beta_f) &&
         vec_equal(beta_v, o.beta_v) && vec_equal(upsilon_f, o.upsilon_f) &&
         vec_equal(upsilon_v, o.upsilon_v) && vec_equal(kappa_f, o.kappa_f) &&
         vec_equal(kappa_v, o.kappa_v) && vec_equal(alpha_f, o.alpha_f) &&
         vec_equal(alpha_v, o.alpha_v) && eta_form == o.eta_form;
}

bool InitialState::operator==(const InitialState& o) const {
  return vec_equal(delta, o.delta) && vec_equal(omega_n, o.omega_n) && vec_equal(v_n, o.v_n) &&
         vec_equal(phi_f, o.phi_f) && vec_equal(phi_hat_f, o.phi_hat_f) &&
         vec_equal(phi_v, o.phi_v) && vec_equal(phi_hat_v, o.phi_hat_v);
}

bool ScenarioConfig::operator==(const ScenarioConfig& o) const {
  return mat_equal(adjacency, o.adjacency) && vec_equal(pinning[0], o.pinning[0]) &&
         vec_equal(pinning[1], o.pinning[1]) && droop == o.droop && load == o.load &&
         gains == o.gains && leaders == o.leaders && attacks == o.attacks &&
         controller == o.controller && dt == o.dt && t_end == o.t_end &&
         sample_stride == o.sample_stride && init == o.init && blowup == o.blowup &&
         envelope == o.envelope && nominal_omega == o.nominal_omega;
}

CommGraph ScenarioConfig::build_graph() const {
  return CommGraph(adjacency, pinning[0], pinning[1]);
}

void ScenarioConfig::validate() const {
  const CommGraph graph = build_graph();  // structural checks
  const int n = graph.n_followers();
  if (!check_reachability(graph)) {
    throw ValidationError(
        "communication graph invalid: some follower is unreachable from both leaders");
  }
  droop.validate(n);
  gains.validate(n);
  leaders.validate();
  if (!std::isfinite(load.p_l) || !std::isfinite(load.q_l)) {
    throw ValidationError("load must be finite");
  }
  if (attacks.n_inverters() != n) {
    throw ValidationError("attack profile covers " + std::to_string(attacks.n_inverters()) +
                          " inverters, scenario has " + std::to_string(n));
  }
  if (!(dt > 0.0)) throw ValidationError("dt must be positive");
  if (!(t_end > dt)) throw ValidationError("t_end must exceed dt");
  if (sample_stride < 1) throw ValidationError("sample stride must be at least 1");
  if (!(blowup > 0.0)) throw ValidationError("blow-up threshold must be positive");
  if (!(envelope.gamma > 0.0) || !(envelope.rho > 0.0)) {
    throw ValidationError("envelope constants must be positive");
  }
  if (!(nominal_omega > 0.0)) throw ValidationError("nominal frequency must be positive");

  for (const Vec* v : {&init.delta, &init.omega_n, &init.v_n, &init.phi_f, &init.phi_hat_f,
                       &init.phi_v, &init.phi_hat_v}) {
    if (v->size() != n) {
      throw ValidationError("initial state vectors must have length " + std::to_string(n));
    }
    require_finite(*v, "initial state");
  }
  // Adaptive parameters start positive with a nonnegative estimator mismatch.
  for (int i = 0; i < n; ++i) {
    if (!(init.phi_f(i) > 0.0) || !(init.phi_v(i) > 0.0)) {
      throw ValidationError("initial phi must be positive (inverter " + std::to_string(i + 1) +
                            ")");
    }
    if (init.phi_f(i) - init.phi_hat_f(i) < 0.0 || init.phi_v(i) - init.phi_hat_v(i) < 0.0) {
      throw ValidationError("initial phi - phi_hat must be nonnegative (inverter " +
                            std::to_string(i + 1) + ")");
    }
  }
}

}  // namespace mgsim
