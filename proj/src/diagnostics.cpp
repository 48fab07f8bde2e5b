#include "mgsim/diagnostics.hpp"

#include <algorithm>
#include <cmath>

namespace mgsim {

namespace {

Mat require_inverse(const CommGraph& graph) {
  const ContainmentAlgebra alg = containment_algebra(graph);
  if (!alg.phi_sum_inverse) {
    throw SingularityError("pinned Laplacian sum is singular; containment is undefined");
  }
  return *alg.phi_sum_inverse;
}

double dispersion(const Vec& shares) {
  const double mean = shares.mean();
  const double scale = std::abs(mean);
  if (scale < 1e-15) {
    return shares.cwiseAbs().maxCoeff() < 1e-15 ? 0.0
                                                : std::numeric_limits<double>::infinity();
  }
  return (shares.array() - mean).abs().maxCoeff() / scale;
}

}  // namespace

ErrorTrajectories containment_errors(const TimeSeries& ts, const CommGraph& graph,
                                     const LeaderSignals& leaders, const DroopParams& droop) {
  const int n = ts.n_inverters();
  const int m = ts.n_samples();
  if (graph.n_followers() != n) throw ValidationError("graph does not match the series");
  const Mat inv = require_inverse(graph);
  const Vec& g1 = graph.pinning_vectors()[0];
  const Vec& g2 = graph.pinning_vectors()[1];

  ErrorTrajectories out;
  out.e_f.resize(m, n);
  out.e_v.resize(m, n);
  for (int k = 0; k < m; ++k) {
    const Vec droop_f = droop.m_p.cwiseProduct(ts.P.row(k).transpose());
    const Vec droop_v = droop.n_q.cwiseProduct(ts.Q.row(k).transpose());
    const Vec rhs_f = g1.cwiseProduct((droop_f.array() + leaders.omega_ref[0]).matrix()) +
                      g2.cwiseProduct((droop_f.array() + leaders.omega_ref[1]).matrix());
    const Vec rhs_v = g1.cwiseProduct((droop_v.array() + leaders.v_ref[0]).matrix()) +
                      g2.cwiseProduct((droop_v.array() + leaders.v_ref[1]).matrix());
    out.e_f.row(k) = ts.omega_n.row(k) - (inv * rhs_f).transpose();
    out.e_v.row(k) = ts.v_n.row(k) - (inv * rhs_v).transpose();
  }
  return out;
}

double lyapunov_energy(const Vec& xi, const Mat& phi_sum_inverse) {
  if (xi.size() != phi_sum_inverse.rows() || xi.size() != phi_sum_inverse.cols()) {
    throw ValidationError("lyapunov_energy: dimension mismatch");
  }
  return 0.5 * xi.dot(phi_sum_inverse * xi);
}

LyapunovMonitorResult lyapunov_monitor(const TimeSeries& ts, const CommGraph& graph,
                                       const std::vector<double>& phase_boundaries,
                                       const LyapunovMonitorOptions& opts) {
  const int m = ts.n_samples();
  if (m < 5) throw ValidationError("lyapunov_monitor: too few samples");
  const Mat inv = require_inverse(graph);

  LyapunovMonitorResult res;
  res.energy_f.resize(m);
  res.energy_v.resize(m);
  for (int k = 0; k < m; ++k) {
    res.energy_f(k) = lyapunov_energy(ts.xi_f.row(k).transpose(), inv);
    res.energy_v(k) = lyapunov_energy(ts.xi_v.row(k).transpose(), inv);
  }

  const double t0 = ts.t(0);
  const double t1 = ts.t(m - 1);
  // Phase of each time plus its tail bound on ||xi||.
  std::vector<double> edges{t0};
  for (double b : phase_boundaries) {
    if (b > t0 && b < t1) edges.push_back(b);
  }
  edges.push_back(t1);

  auto run_loop = [&](const Mat& xi, const Vec& energy, std::vector<double>& violations,
                      double& settling, double& max_edot) {
    Vec norms(m);
    for (int k = 0; k < m; ++k) norms(k) = xi.row(k).norm();

    // Tail bound per phase: sup of ||xi|| over the final quarter of the phase.
    std::vector<double> bound(edges.size() - 1, 0.0);
    for (size_t p = 0; p + 1 < edges.size(); ++p) {
      const double tail_begin = edges[p] + 0.75 * (edges[p + 1] - edges[p]);
      double sup = 0.0;
      for (int k = 0; k < m; ++k) {
        if (ts.t(k) >= tail_begin && ts.t(k) <= edges[p + 1]) sup = std::max(sup, norms(k));
      }
      bound[p] = sup;
    }

    Vec edot = Vec::Zero(m);
    for (int k = 1; k + 1 < m; ++k) {
      edot(k) = (energy(k + 1) - energy(k - 1)) / (ts.t(k + 1) - ts.t(k - 1));
    }
    max_edot = edot.cwiseAbs().maxCoeff();
    const double tol = opts.tol_rel * max_edot;

    violations.clear();
    for (int k = 1; k + 1 < m; ++k) {
      const double t = ts.t(k);
      size_t p = 0;
      while (p + 2 < edges.size() && t >= edges[p + 1]) ++p;
      // Skip the re-adaptation window right after a phase change.
      if (p > 0 && t < edges[p] + opts.boundary_exclusion) continue;
      if (norms(k) >= bound[p] * (1.0 - 1e-12) && edot(k) > tol) violations.push_back(t);
    }
    settling = violations.empty() ? t0 : violations.back();
  };

  run_loop(ts.xi_f, res.energy_f, res.violations_f, res.settling_time_f, res.max_abs_edot_f);
  run_loop(ts.xi_v, res.energy_v, res.violations_v, res.settling_time_v, res.max_abs_edot_v);
  return res;
}

PhiTildeBound phi_tilde_bound(const TimeSeries& ts) {
  const int n = ts.n_inverters();
  const int m = ts.n_samples();
  if (m < 1) throw ValidationError("phi_tilde_bound: empty series");
  const Mat tilde_f = ts.phi_f - ts.phi_hat_f;
  const Mat tilde_v = ts.phi_v - ts.phi_hat_v;

  PhiTildeBound out;
  out.psi_f = Vec::Zero(n);
  out.psi_v = Vec::Zero(n);
  const int k0 = (3 * m) / 4;  // final quarter of the sampled run
  for (int k = k0; k < m; ++k) {
    out.psi_f = out.psi_f.cwiseMax(tilde_f.row(k).transpose().cwiseAbs());
    out.psi_v = out.psi_v.cwiseMax(tilde_v.row(k).transpose().cwiseAbs());
  }
  out.nonnegative_f = (tilde_f.array() >= -1e-9).all();
  out.nonnegative_v = (tilde_v.array() >= -1e-9).all();
  return out;
}

std::vector<PhaseTail> phase_tail_metrics(const TimeSeries& ts, const ScenarioConfig& cfg) {
  const int m = ts.n_samples();
  if (m < 1) return {};
  const CommGraph graph = cfg.build_graph();
  const ErrorTrajectories err = containment_errors(ts, graph, cfg.leaders, cfg.droop);

  const double t0 = ts.t(0);
  const double t1 = ts.t(m - 1);
  std::vector<double> edges{t0};
  for (double b : cfg.attacks.boundary_times(cfg.t_end)) {
    if (b > t0 && b < t1) edges.push_back(b);
  }
  edges.push_back(t1);

  const double f_ref_hz = cfg.leaders.omega_ref[0] / (2.0 * M_PI);
  std::vector<PhaseTail> phases;
  for (size_t p = 0; p + 1 < edges.size(); ++p) {
    PhaseTail ph;
    ph.phase_begin = edges[p];
    ph.phase_end = edges[p + 1];
    ph.tail_begin = edges[p] + 0.75 * (edges[p + 1] - edges[p]);
    ph.v_od_min = std::numeric_limits<double>::infinity();
    ph.v_od_max = -std::numeric_limits<double>::infinity();
    bool any = false;
    for (int k = 0; k < m; ++k) {
      const double t = ts.t(k);
      if (t < ph.tail_begin || t > ph.phase_end) continue;
      any = true;
      ph.e_f_sup = std::max(ph.e_f_sup, err.e_f.row(k).norm());
      ph.e_v_sup = std::max(ph.e_v_sup, err.e_v.row(k).norm());
      ph.xi_f_sup = std::max(ph.xi_f_sup, ts.xi_f.row(k).norm());
      ph.xi_v_sup = std::max(ph.xi_v_sup, ts.xi_v.row(k).norm());
      const Vec shares = cfg.droop.m_p.cwiseProduct(ts.P.row(k).transpose());
      ph.sharing_dispersion_sup = std::max(ph.sharing_dispersion_sup, dispersion(shares));
      ph.v_od_min = std::min(ph.v_od_min, ts.v_od.row(k).minCoeff());
      ph.v_od_max = std::max(ph.v_od_max, ts.v_od.row(k).maxCoeff());
      const double fdev =
          (ts.omega.row(k).array() / (2.0 * M_PI) - f_ref_hz).abs().maxCoeff();
      ph.freq_dev_sup_hz = std::max(ph.freq_dev_sup_hz, fdev);
    }
    if (!any) {
      ph.v_od_min = std::numeric_limits<double>::quiet_NaN();
      ph.v_od_max = std::numeric_limits<double>::quiet_NaN();
    }
    phases.push_back(ph);
  }
  return phases;
}

DiagnosticsReport build_report(const TimeSeries& ts, const ScenarioConfig& cfg) {
  DiagnosticsReport rep;
  rep.status = ts.status;
  rep.t_diverged = ts.t_diverged;
  rep.t_end = ts.n_samples() > 0 ? ts.t(ts.n_samples() - 1) : 0.0;
  rep.phase_boundaries = cfg.attacks.boundary_times(cfg.t_end);
  rep.phases = phase_tail_metrics(ts, cfg);
  rep.completed_ok = ts.status == RunStatus::completed;

  if (!rep.phases.empty()) {
    const PhaseTail& last = rep.phases.back();
    rep.tail_e_f_sup = last.e_f_sup;
    rep.tail_e_v_sup = last.e_v_sup;
    rep.tail_sharing_dispersion = last.sharing_dispersion_sup;
    rep.tail_freq_dev_hz = last.freq_dev_sup_hz;
    rep.tail_v_od_min = last.v_od_min;
    rep.tail_v_od_max = last.v_od_max;
    rep.freq_band_ok = last.freq_dev_sup_hz <= 0.1;
    rep.v_od_band_ok =
        last.v_od_min >= cfg.leaders.v_ref[1] - 1.0 && last.v_od_max <= cfg.leaders.v_ref[0] + 1.0;
    rep.sharing_ok = last.sharing_dispersion_sup <= 0.02;
  }

  const PhiTildeBound ptb = phi_tilde_bound(ts);
  rep.psi_f = ptb.psi_f;
  rep.psi_v = ptb.psi_v;
  rep.phi_tilde_nonneg_f = ptb.nonnegative_f;
  rep.phi_tilde_nonneg_v = ptb.nonnegative_v;

  if (ts.n_samples() >= 5) {
    const CommGraph graph = cfg.build_graph();
    const LyapunovMonitorResult mon =
        lyapunov_monitor(ts, graph, rep.phase_boundaries, LyapunovMonitorOptions{});
    rep.max_abs_edot_f = mon.max_abs_edot_f;
    rep.max_abs_edot_v = mon.max_abs_edot_v;
    rep.n_violations_f = static_cast<int>(mon.violations_f.size());
    rep.n_violations_v = static_cast<int>(mon.violations_v.size());
    rep.settling_time_f = mon.settling_time_f;
    rep.settling_time_v = mon.settling_time_v;
    if (!rep.phases.empty()) {
      rep.lyapunov_clean_tail_f = mon.settling_time_f < rep.phases.back().tail_begin;
      rep.lyapunov_clean_tail_v = mon.settling_time_v < rep.phases.back().tail_begin;
    }
  }
  return rep;
}

std::vector<SweepRow> sweep_beta(const ScenarioConfig& cfg, const std::vector<double>& betas) {
  if (betas.size() < 1) throw ValidationError("sweep_beta: need at least one value");
  for (size_t i = 0; i + 1 < betas.size(); ++i) {
    if (!(betas[i] < betas[i + 1])) {
      throw ValidationError("sweep_beta: values must be strictly ascending");
    }
  }
  std::vector<SweepRow> rows;
  for (double beta : betas) {
    ScenarioConfig c = cfg;
    c.gains.beta_f = Vec::Constant(cfg.n_inverters(), beta);
    const TimeSeries ts = run(c);
    SweepRow row;
    row.beta = beta;
    row.status = ts.status;
    row.t_diverged = ts.t_diverged;
    if (ts.status == RunStatus::completed) {
      const std::vector<PhaseTail> phases = phase_tail_metrics(ts, c);
      if (!phases.empty()) {
        row.tail_e_f_sup = phases.back().e_f_sup;
        row.tail_e_v_sup = phases.back().e_v_sup;
      }
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace mgsim
