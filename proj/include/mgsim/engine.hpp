#pragma once

#include <limits>
#include <vector>

#include "mgsim/scenario.hpp"

namespace mgsim {

enum class RunStatus { completed, diverged };

// Quantities produced algebraically inside one derivative evaluation.
struct StageOutputs {
  Vec P, Q, omega, v_od;
  Vec xi_f, xi_v;
  Vec gamma_f, gamma_v;
  Vec u_f, u_v;      // controller outputs before corruption
  Vec mu_f, mu_v;    // injected attack values
  double delta_L = 0.0;
  double V_L = 0.0;
};

// Columnar record of one run; row k of every matrix belongs to time t(k).
struct TimeSeries {
  Vec t;
  Mat delta, omega_n, v_n;
  Mat phi_f, phi_hat_f, phi_v, phi_hat_v;
  Mat P, Q, omega, v_od;
  Mat xi_f, xi_v, gamma_f, gamma_v, mu_f, mu_v;
  RunStatus status = RunStatus::completed;
  double t_diverged = std::numeric_limits<double>::quiet_NaN();
  double dt = 0.0;
  double t_end_requested = 0.0;

  int n_samples() const { return static_cast<int>(t.size()); }
  int n_inverters() const { return static_cast<int>(omega_n.cols()); }
};

// Right-hand side of the closed-loop ODE plus a classical fixed-step
// fourth-order stepper. One instance serves one run; instances are
// independent, so whole runs may execute in parallel.
class SystemModel {
 public:
  explicit SystemModel(const ScenarioConfig& cfg);

  int n_inverters() const { return n_; }
  int state_size() const { return 7 * n_; }
  const CommGraph& graph() const { return graph_; }
  const ScenarioConfig& config() const { return cfg_; }

  Vec initial_state() const;
  Vec derivative(const Vec& state, double t) const;
  Vec derivative(const Vec& state, double t, StageOutputs& out) const;
  Vec rk4_step(const Vec& state, double t, double dt) const;

  // State layout: [delta, omega_n, v_n, phi_f, phi_hat_f, phi_v, phi_hat_v].
  auto delta(const Vec& s) const { return s.segment(0 * n_, n_); }
  auto omega_n(const Vec& s) const { return s.segment(1 * n_, n_); }
  auto v_n(const Vec& s) const { return s.segment(2 * n_, n_); }
  auto phi_f(const Vec& s) const { return s.segment(3 * n_, n_); }
  auto phi_hat_f(const Vec& s) const { return s.segment(4 * n_, n_); }
  auto phi_v(const Vec& s) const { return s.segment(5 * n_, n_); }
  auto phi_hat_v(const Vec& s) const { return s.segment(6 * n_, n_); }

 private:
  ScenarioConfig cfg_;
  CommGraph graph_;
  int n_;
};

// Advances the full scenario. Validation failures surface before the first
// step; a state magnitude beyond the blow-up threshold ends the run with
// status diverged instead of crashing.
TimeSeries run(const ScenarioConfig& cfg);

// Single integration step over the scenario's dynamics (test surface; run()
// is the efficient path).
Vec step(const Vec& state, double t, double dt, const ScenarioConfig& cfg);

}  // namespace mgsim
