#include "mgsim/engine.hpp"

#include <cmath>

namespace mgsim {

SystemModel::SystemModel(const ScenarioConfig& cfg)
    : cfg_(cfg), graph_(cfg.build_graph()), n_(graph_.n_followers()) {
  cfg_.droop.validate(n_);
  cfg_.gains.validate(n_);
  cfg_.leaders.validate();
  if (cfg_.attacks.n_inverters() != n_) {
    throw ValidationError("attack profile does not match inverter count");
  }
}

Vec SystemModel::initial_state() const {
  Vec s(state_size());
  s.segment(0 * n_, n_) = cfg_.init.delta;
  s.segment(1 * n_, n_) = cfg_.init.omega_n;
  s.segment(2 * n_, n_) = cfg_.init.v_n;
  s.segment(3 * n_, n_) = cfg_.init.phi_f;
  s.segment(4 * n_, n_) = cfg_.init.phi_hat_f;
  s.segment(5 * n_, n_) = cfg_.init.phi_v;
  s.segment(6 * n_, n_) = cfg_.init.phi_hat_v;
  return s;
}

Vec SystemModel::derivative(const Vec& state, double t) const {
  StageOutputs scratch;
  return derivative(state, t, scratch);
}

Vec SystemModel::derivative(const Vec& state, double t, StageOutputs& out) const {
  const auto d = delta(state);
  const auto wn = omega_n(state);
  const auto vn = v_n(state);

  // Algebraic closure of the plant at this state.
  const ActivePowerSolution ap = solve_active_power(d, cfg_.droop, cfg_.load);
  const ReactivePowerSolution rp = solve_reactive_power(vn, cfg_.droop, cfg_.load);
  out.P = ap.P;
  out.delta_L = ap.delta_L;
  out.Q = rp.Q;
  out.v_od = rp.v_od;
  out.V_L = rp.V_L;
  out.omega = droop_frequency(cfg_.droop, wn, out.P);

  out.xi_f.resize(n_);
  out.xi_v.resize(n_);
  out.gamma_f = Vec::Zero(n_);
  out.gamma_v = Vec::Zero(n_);
  out.u_f.resize(n_);
  out.u_v.resize(n_);
  out.mu_f.resize(n_);
  out.mu_v.resize(n_);

  Vec deriv = Vec::Zero(state_size());
  const bool resilient = cfg_.controller == ControllerKind::resilient;

  for (int i = 0; i < n_; ++i) {
    const double xf =
        xi_frequency(i, wn, out.P, graph_, cfg_.gains, cfg_.leaders, cfg_.droop);
    const double xv = xi_voltage(i, vn, out.Q, graph_, cfg_.gains, cfg_.leaders, cfg_.droop);
    out.xi_f(i) = xf;
    out.xi_v(i) = xv;

    double uf = 0.0;
    double uv = 0.0;
    if (resilient) {
      const double eta_f = eta(t, cfg_.gains.alpha_f(i), cfg_.gains.eta_form);
      const double eta_v = eta(t, cfg_.gains.alpha_v(i), cfg_.gains.eta_form);
      const ResilientInput rf = resilient_input(xf, phi_f(state)(i), eta_f);
      const ResilientInput rv = resilient_input(xv, phi_v(state)(i), eta_v);
      out.gamma_f(i) = rf.gamma;
      out.gamma_v(i) = rv.gamma;
      uf = rf.u;
      uv = rv.u;

      const AdaptiveRates af =
          adaptive_derivatives(xf, phi_f(state)(i), phi_hat_f(state)(i), cfg_.gains.beta_f(i),
                               cfg_.gains.upsilon_f(i), cfg_.gains.kappa_f(i));
      const AdaptiveRates av =
          adaptive_derivatives(xv, phi_v(state)(i), phi_hat_v(state)(i), cfg_.gains.beta_v(i),
                               cfg_.gains.upsilon_v(i), cfg_.gains.kappa_v(i));
      deriv(3 * n_ + i) = af.phi_dot;
      deriv(4 * n_ + i) = af.phi_hat_dot;
      deriv(5 * n_ + i) = av.phi_dot;
      deriv(6 * n_ + i) = av.phi_hat_dot;
    } else {
      uf = conventional_input(xf);
      uv = conventional_input(xv);
      // adaptive states stay frozen
    }
    out.u_f(i) = uf;
    out.u_v(i) = uv;

    // Corruption hits the actuator channel, after the controller.
    out.mu_f(i) = cfg_.attacks.evaluate(i, Loop::frequency, t);
    out.mu_v(i) = cfg_.attacks.evaluate(i, Loop::voltage, t);
    deriv(1 * n_ + i) = inject(uf, out.mu_f(i));
    deriv(2 * n_ + i) = inject(uv, out.mu_v(i));
  }

  deriv.segment(0, n_) = plant_derivative(out.omega, cfg_.nominal_omega);
  return deriv;
}

Vec SystemModel::rk4_step(const Vec& state, double t, double dt) const {
  const Vec k1 = derivative(state, t);
  const Vec k2 = derivative(state + (0.5 * dt) * k1, t + 0.5 * dt);
  const Vec k3 = derivative(state + (0.5 * dt) * k2, t + 0.5 * dt);
  const Vec k4 = derivative(state + dt * k3, t + dt);
  return state + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

namespace {

bool state_ok(const Vec& state, double blowup) {
  for (int i = 0; i < state.size(); ++i) {
    const double v = state(i);
    if (!std::isfinite(v) || std::abs(v) > blowup) return false;
  }
  return true;
}

struct Recorder {
  explicit Recorder(int capacity, int n) {
    t.resize(capacity);
    for (Mat* m : all()) m->resize(capacity, n);
  }

  void record(int row, double time, const SystemModel& model, const Vec& state,
              StageOutputs& ws) {
    model.derivative(state, time, ws);
    t(row) = time;
    delta.row(row) = model.delta(state).transpose();
    omega_n.row(row) = model.omega_n(state).transpose();
    v_n.row(row) = model.v_n(state).transpose();
    phi_f.row(row) = model.phi_f(state).transpose();
    phi_hat_f.row(row) = model.phi_hat_f(state).transpose();
    phi_v.row(row) = model.phi_v(state).transpose();
    phi_hat_v.row(row) = model.phi_hat_v(state).transpose();
    P.row(row) = ws.P.transpose();
    Q.row(row) = ws.Q.transpose();
    omega.row(row) = ws.omega.transpose();
    v_od.row(row) = ws.v_od.transpose();
    xi_f.row(row) = ws.xi_f.transpose();
    xi_v.row(row) = ws.xi_v.transpose();
    gamma_f.row(row) = ws.gamma_f.transpose();
    gamma_v.row(row) = ws.gamma_v.transpose();
    mu_f.row(row) = ws.mu_f.transpose();
    mu_v.row(row) = ws.mu_v.transpose();
  }

  TimeSeries finish(int rows) {
    TimeSeries ts;
    ts.t = t.head(rows);
    ts.delta = delta.topRows(rows);
    ts.omega_n = omega_n.topRows(rows);
    ts.v_n = v_n.topRows(rows);
    ts.phi_f = phi_f.topRows(rows);
    ts.phi_hat_f = phi_hat_f.topRows(rows);
    ts.phi_v = phi_v.topRows(rows);
    ts.phi_hat_v = phi_hat_v.topRows(rows);
    ts.P = P.topRows(rows);
    ts.Q = Q.topRows(rows);
    ts.omega = omega.topRows(rows);
    ts.v_od = v_od.topRows(rows);
    ts.xi_f = xi_f.topRows(rows);
    ts.xi_v = xi_v.topRows(rows);
    ts.gamma_f = gamma_f.topRows(rows);
    ts.gamma_v = gamma_v.topRows(rows);
    ts.mu_f = mu_f.topRows(rows);
    ts.mu_v = mu_v.topRows(rows);
    return ts;
  }

  std::array<Mat*, 17> all() {
    return {&delta,   &omega_n, &v_n,  &phi_f, &phi_hat_f, &phi_v, &phi_hat_v, &P,    &Q,
            &omega,   &v_od,    &xi_f, &xi_v,  &gamma_f,   &gamma_v, &mu_f,    &mu_v};
  }

  Vec t;
  Mat delta, omega_n, v_n, phi_f, phi_hat_f, phi_v, phi_hat_v;
  Mat P, Q, omega, v_od, xi_f, xi_v, gamma_f, gamma_v, mu_f, mu_v;
};

}  // namespace

TimeSeries run(const ScenarioConfig& cfg) {
  cfg.validate();
  SystemModel model(cfg);
  const int n = model.n_inverters();
  const long steps = std::lround(cfg.t_end / cfg.dt);
  if (steps < 1) throw ValidationError("t_end shorter than one step");
  const int stride = cfg.sample_stride;

  Recorder rec(static_cast<int>(steps / stride) + 1, n);
  StageOutputs ws;

  Vec state = model.initial_state();
  int rows = 0;
  rec.record(rows++, 0.0, model, state, ws);

  RunStatus status = RunStatus::completed;
  double t_diverged = std::numeric_limits<double>::quiet_NaN();

  for (long i = 0; i < steps; ++i) {
    const double t = static_cast<double>(i) * cfg.dt;
    state = model.rk4_step(state, t, cfg.dt);
    const double t_next = static_cast<double>(i + 1) * cfg.dt;
    if (!state_ok(state, cfg.blowup)) {
      status = RunStatus::diverged;
      t_diverged = t_next;
      break;
    }
    if ((i + 1) % stride == 0) rec.record(rows++, t_next, model, state, ws);
  }

  TimeSeries ts = rec.finish(rows);
  ts.status = status;
  ts.t_diverged = t_diverged;
  ts.dt = cfg.dt;
  ts.t_end_requested = cfg.t_end;
  return ts;
}

Vec step(const Vec& state, double t, double dt, const ScenarioConfig& cfg) {
  SystemModel model(cfg);
  return model.rk4_step(state, t, dt);
}

}  // namespace mgsim
