#pragma once

#include <array>

#include "mgsim/netgraph.hpp"
#include "mgsim/plant.hpp"

namespace mgsim {

// Shape of the decaying gate in the compensator denominator.
enum class EtaForm { gaussian, exponential_in_t };

// Per-inverter controller constants. c couples the consensus term, beta is
// the adaptation gain, upsilon and kappa drive the leak estimator, alpha sets
// the gate decay.
struct GainSet {
  Vec c_f, c_v;
  Vec beta_f, beta_v;
  Vec upsilon_f, upsilon_v;
  Vec kappa_f, kappa_v;
  Vec alpha_f, alpha_v;
  EtaForm eta_form = EtaForm::gaussian;

  void validate(int n) const;
  bool operator==(const GainSet&) const;
};

// Reference values issued by the two leader nodes. Index 0 is the first
// leader (upper voltage reference), index 1 the second (lower).
struct LeaderSignals {
  std::array<double, 2> omega_ref{};  // rad/s
  std::array<double, 2> v_ref{};      // V

  void validate() const;
  bool operator==(const LeaderSignals&) const = default;
};

// Adaptive compensator states, one entry per inverter and loop.
struct ControllerState {
  Vec phi_f, phi_hat_f;
  Vec phi_v, phi_hat_v;
};

// Neighborhood disagreement of the frequency loop at inverter i:
//   xi_f_i = c_f_i [ sum_j a_ij (wn_j - wn_i) + sum_k g_ik (w_k + m_p_i P_i - wn_i) ]
// Each follower augments the leader reference with its own droop term.
double xi_frequency(int i, const Vec& omega_n, const Vec& P, const CommGraph& graph,
                    const GainSet& gains, const LeaderSignals& leaders,
                    const DroopParams& params);

// Voltage-loop counterpart with (v_n, n_q, Q, c_v).
double xi_voltage(int i, const Vec& v_n, const Vec& Q, const CommGraph& graph,
                  const GainSet& gains, const LeaderSignals& leaders,
                  const DroopParams& params);

// Stacked consensus terms written with the pinned Laplacian sum:
//   xi = -diag(c) [ (sum_k Phi_k) x - sum_k G_k w_k ]
// with w_k the per-follower augmented leader vector. Agrees elementwise with
// the per-inverter forms above.
Vec xi_frequency_global(const Vec& omega_n, const Vec& P, const CommGraph& graph,
                        const GainSet& gains, const LeaderSignals& leaders,
                        const DroopParams& params);
Vec xi_voltage_global(const Vec& v_n, const Vec& Q, const CommGraph& graph,
                      const GainSet& gains, const LeaderSignals& leaders,
                      const DroopParams& params);

// Decaying gate eta(t) = exp(-alpha t^2), clamped below at 1e-300 so the
// compensator denominator never reaches zero in finite arithmetic.
double eta(double t, double alpha);
double eta(double t, double alpha, EtaForm form);

struct ResilientInput {
  double u = 0.0;
  double gamma = 0.0;
};

// Compensated input u = xi + Gamma with Gamma = xi e^phi / (|xi| + eta_t).
// Gamma has the sign of xi and |Gamma| < e^phi.
ResilientInput resilient_input(double xi, double phi, double eta_t);

struct AdaptiveRates {
  double phi_dot = 0.0;
  double phi_hat_dot = 0.0;
};

// phi_dot = beta (|xi| - lambda), lambda = upsilon (phi - phi_hat),
// phi_hat_dot = kappa (phi - phi_hat).
AdaptiveRates adaptive_derivatives(double xi, double phi, double phi_hat, double beta,
                                   double upsilon, double kappa);

// Plain consensus controller: u = xi. Kept so both controllers share one
// call shape.
double conventional_input(double xi);

}  // namespace mgsim
