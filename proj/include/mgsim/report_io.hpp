#pragma once

#include <string>

#include "mgsim/diagnostics.hpp"

namespace mgsim {

// Writes the sampled trajectories as CSV. Column order: t, then one block per
// inverter i (omega_hz_i, v_od_i, P_i, Q_i, omega_n_i, V_n_i, xi_f_i, xi_v_i,
// phi_f_i, phitilde_f_i, Gamma_f_i, mu_f_i, phi_v_i, phitilde_v_i, Gamma_v_i,
// mu_v_i), then e_f_norm, e_v_norm, E_f, E_v. Frequency is exported in Hz;
// every other column keeps its internal SI unit. Numbers round-trip exactly.
void write_timeseries(const TimeSeries& ts, const ScenarioConfig& cfg, const std::string& path);

std::string report_json(const DiagnosticsReport& rep);
void write_report(const DiagnosticsReport& rep, const std::string& path);

}  // namespace mgsim
