#pragma once

#include <vector>

#include "mgsim/engine.hpp"

namespace mgsim {

// Per-sample containment errors: e = x_n - (sum Phi_k)^-1 (sum_k G_k w_k)
// with w_k the per-follower augmented leader vector. Zero exactly at the
// controller's consensus fixed point.
struct ErrorTrajectories {
  Mat e_f;  // rad/s
  Mat e_v;  // V
};

ErrorTrajectories containment_errors(const TimeSeries& ts, const CommGraph& graph,
                                     const LeaderSignals& leaders, const DroopParams& droop);

// E = xi^T (sum Phi_k)^-1 xi / 2.
double lyapunov_energy(const Vec& xi, const Mat& phi_sum_inverse);

struct LyapunovMonitorOptions {
  double tol_rel = 1e-3;             // tolerance = tol_rel * max |Edot|
  double boundary_exclusion = 0.5;   // s ignored after each attack-phase boundary
};

// Central-difference energy monitor. A sample is a violation when ||xi||
// exceeds the tail bound of its attack phase while the discrete energy
// derivative is above tolerance. settling_time is the earliest time after
// which no violations occur. Requires the sampling stride to resolve the
// energy variation (documented: sample interval <= 10 dt when the dynamics
// are integration-rate limited).
struct LyapunovMonitorResult {
  std::vector<double> violations_f, violations_v;  // sample times
  double settling_time_f = 0.0, settling_time_v = 0.0;
  double max_abs_edot_f = 0.0, max_abs_edot_v = 0.0;
  Vec energy_f, energy_v;
};

LyapunovMonitorResult lyapunov_monitor(const TimeSeries& ts, const CommGraph& graph,
                                       const std::vector<double>& phase_boundaries,
                                       const LyapunovMonitorOptions& opts = {});

// Empirical ultimate bound of the adaptation mismatch phi - phi_hat: the
// largest |phi - phi_hat| over the final quarter of the run, plus whether the
// mismatch stayed nonnegative throughout (the initialization contract).
struct PhiTildeBound {
  Vec psi_f, psi_v;
  bool nonnegative_f = true, nonnegative_v = true;
};

PhiTildeBound phi_tilde_bound(const TimeSeries& ts);

// Consecutive attack phases of a run and their tail windows (final quarter of
// each phase; windows never cross a phase boundary).
struct PhaseTail {
  double phase_begin = 0.0, phase_end = 0.0, tail_begin = 0.0;
  double e_f_sup = 0.0, e_v_sup = 0.0;
  double xi_f_sup = 0.0, xi_v_sup = 0.0;
  double sharing_dispersion_sup = 0.0;
  double v_od_min = 0.0, v_od_max = 0.0;
  double freq_dev_sup_hz = 0.0;
};

std::vector<PhaseTail> phase_tail_metrics(const TimeSeries& ts, const ScenarioConfig& cfg);

// Everything the verification layer derives from one run. Built from the
// sampled series alone, so reports can be recomputed offline.
struct DiagnosticsReport {
  RunStatus status = RunStatus::completed;
  double t_diverged = std::numeric_limits<double>::quiet_NaN();
  double t_end = 0.0;
  std::vector<double> phase_boundaries;
  std::vector<PhaseTail> phases;

  // Final-phase tail headline numbers.
  double tail_e_f_sup = 0.0, tail_e_v_sup = 0.0;
  double tail_sharing_dispersion = 0.0;
  double tail_freq_dev_hz = 0.0;
  double tail_v_od_min = 0.0, tail_v_od_max = 0.0;

  double max_abs_edot_f = 0.0, max_abs_edot_v = 0.0;
  int n_violations_f = 0, n_violations_v = 0;
  double settling_time_f = std::numeric_limits<double>::quiet_NaN();
  double settling_time_v = std::numeric_limits<double>::quiet_NaN();
  bool lyapunov_clean_tail_f = false, lyapunov_clean_tail_v = false;

  Vec psi_f, psi_v;
  bool phi_tilde_nonneg_f = true, phi_tilde_nonneg_v = true;

  bool completed_ok = false;
  bool freq_band_ok = false;     // |f - f_ref| <= 0.1 Hz over the final tail
  bool v_od_band_ok = false;     // v_od within [v_lower - 1, v_upper + 1] over the final tail
  bool sharing_ok = false;       // dispersion <= 2% over the final tail
};

DiagnosticsReport build_report(const TimeSeries& ts, const ScenarioConfig& cfg);

// One run per adaptation gain, everything else fixed. Diverging runs are
// recorded, not dropped. Values must be ascending.
struct SweepRow {
  double beta = 0.0;
  RunStatus status = RunStatus::completed;
  double t_diverged = std::numeric_limits<double>::quiet_NaN();
  double tail_e_f_sup = std::numeric_limits<double>::quiet_NaN();
  double tail_e_v_sup = std::numeric_limits<double>::quiet_NaN();
};

std::vector<SweepRow> sweep_beta(const ScenarioConfig& cfg, const std::vector<double>& betas);

}  // namespace mgsim
