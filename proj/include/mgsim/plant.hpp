#pragma once

#include "mgsim/common.hpp"

namespace mgsim {

// Per-inverter droop and coupling constants. m_p ties frequency to active
// power (rad/s per W), n_q ties voltage to reactive power (V per var). b and
// q couple each inverter to the common load bus: P_i = b_i (delta_i -
// delta_L) and Q_i = q_i (v_od_i - V_L).
struct DroopParams {
  Vec m_p;
  Vec n_q;
  Vec b;
  Vec q;

  void validate(int n) const;
  bool operator==(const DroopParams&) const;
};

struct LoadSpec {
  double p_l = 0.0;  // W
  double q_l = 0.0;  // var
  bool operator==(const LoadSpec&) const = default;
};

// Integrated electrical state: bus angles relative to the nominal rotating
// frame plus the two droop setpoint vectors.
struct PlantState {
  Vec delta;    // rad
  Vec omega_n;  // rad/s
  Vec v_n;      // V
};

struct ActivePowerSolution {
  Vec P;            // W
  double delta_L;   // rad
};

struct ReactivePowerSolution {
  Vec Q;        // var
  Vec v_od;     // V
  double V_L;   // V
};

// Everything the algebraic layer produces for one state.
struct PlantOutputs {
  Vec P, Q;
  Vec omega;   // rad/s
  Vec v_od;    // V
  double delta_L = 0.0;
  double V_L = 0.0;
};

// omega_i = omega_n_i - m_p_i P_i
Vec droop_frequency(const DroopParams& params, const Vec& omega_n, const Vec& P);

// v_od_i = v_n_i - n_q_i Q_i
Vec droop_voltage(const DroopParams& params, const Vec& v_n, const Vec& Q);

// Load bus angle delta_L = (sum b_i delta_i - P_L) / sum b_i, then
// P_i = b_i (delta_i - delta_L). The injections balance the load exactly.
ActivePowerSolution solve_active_power(const Vec& delta, const DroopParams& params,
                                       const LoadSpec& load);

// Closed form of the implicit pair Q_i = q_i (v_od_i - V_L),
// v_od_i = v_n_i - n_q_i Q_i, with V_L picked so the injections sum to Q_L.
ReactivePowerSolution solve_reactive_power(const Vec& v_n, const DroopParams& params,
                                           const LoadSpec& load);

// Angle kinematics in the rotating frame: delta_dot_i = omega_i - omega_0.
Vec plant_derivative(const Vec& omega, double nominal_omega);

// Full algebraic closure for one state.
PlantOutputs solve_outputs(const PlantState& state, const DroopParams& params,
                           const LoadSpec& load);

}  // namespace mgsim
