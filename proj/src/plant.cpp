#include "mgsim/plant.hpp"

namespace mgsim {

namespace {

void require_length(const Vec& v, int n, const char* name) {
  if (v.size() != n) {
    throw ValidationError(std::string(name) + " has length " + std::to_string(v.size()) +
                          ", expected " + std::to_string(n));
  }
}

void require_positive(const Vec& v, const char* name) {
  for (int i = 0; i < v.size(); ++i) {
    if (!(v(i) > 0.0)) {
      throw ValidationError(std::string(name) + "[" + std::to_string(i + 1) +
                            "] must be strictly positive, got " + std::to_string(v(i)));
    }
  }
}

}  // namespace

void DroopParams::validate(int n) const {
  require_length(m_p, n, "m_p");
  require_length(n_q, n, "n_q");
  require_length(b, n, "b");
  require_length(q, n, "q");
  require_positive(m_p, "m_p");
  require_positive(n_q, "n_q");
  require_positive(b, "b");
  require_positive(q, "q");
}

Vec droop_frequency(const DroopParams& params, const Vec& omega_n, const Vec& P) {
  if (omega_n.size() != P.size() || omega_n.size() != params.m_p.size()) {
    throw ValidationError("droop_frequency: length mismatch");
  }
  return omega_n - params.m_p.cwiseProduct(P);
}

Vec droop_voltage(const DroopParams& params, const Vec& v_n, const Vec& Q) {
  if (v_n.size() != Q.size() || v_n.size() != params.n_q.size()) {
    throw ValidationError("droop_voltage: length mismatch");
  }
  return v_n - params.n_q.cwiseProduct(Q);
}

ActivePowerSolution solve_active_power(const Vec& delta, const DroopParams& params,
                                       const LoadSpec& load) {
  if (delta.size() != params.b.size()) {
    throw ValidationError("solve_active_power: length mismatch");
  }
  const double b_sum = params.b.sum();
  if (!(b_sum > 0.0)) {
    throw ValidationError("solve_active_power: sum of couplings b must be positive");
  }
  ActivePowerSolution sol;
  sol.delta_L = (params.b.dot(delta) - load.p_l) / b_sum;
  sol.P = (params.b.array() * (delta.array() - sol.delta_L)).matrix();
  return sol;
}

ReactivePowerSolution solve_reactive_power(const Vec& v_n, const DroopParams& params,
                                           const LoadSpec& load) {
  if (v_n.size() != params.q.size()) {
    throw ValidationError("solve_reactive_power: length mismatch");
  }
  // s_i = q_i / (1 + q_i n_q_i) is the effective source admittance.
  const Vec s =
      (params.q.array() / (1.0 + params.q.array() * params.n_q.array())).matrix();
  const double s_sum = s.sum();
  if (!(s_sum > 0.0)) {
    throw ValidationError("solve_reactive_power: degenerate denominator");
  }
  ReactivePowerSolution sol;
  sol.V_L = (s.dot(v_n) - load.q_l) / s_sum;
  sol.Q = (s.array() * (v_n.array() - sol.V_L)).matrix();
  sol.v_od = v_n - params.n_q.cwiseProduct(sol.Q);
  return sol;
}

Vec plant_derivative(const Vec& omega, double nominal_omega) {
  return (omega.array() - nominal_omega).matrix();
}

PlantOutputs solve_outputs(const PlantState& state, const DroopParams& params,
                           const LoadSpec& load) {
  PlantOutputs out;
  const ActivePowerSolution ap = solve_active_power(state.delta, params, load);
  const ReactivePowerSolution rp = solve_reactive_power(state.v_n, params, load);
  out.P = ap.P;
  out.delta_L = ap.delta_L;
  out.Q = rp.Q;
  out.v_od = rp.v_od;
  out.V_L = rp.V_L;
  out.omega = droop_frequency(params, state.omega_n, out.P);
  return out;
}

}  // namespace mgsim
