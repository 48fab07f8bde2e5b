#include "mgsim/control.hpp"

#include <cmath>

namespace mgsim {

namespace {

constexpr double kEtaFloor = 1e-300;

void require_positive(const Vec& v, int n, const char* name) {
  if (v.size() != n) {
    throw ValidationError(std::string(name) + " has length " + std::to_string(v.size()) +
                          ", expected " + std::to_string(n));
  }
  for (int i = 0; i < n; ++i) {
    if (!(v(i) > 0.0)) {
      throw ValidationError(std::string(name) + "[" + std::to_string(i + 1) +
                            "] must be strictly positive, got " + std::to_string(v(i)));
    }
  }
}

void check_follower(int i, const CommGraph& graph) {
  if (i < 0 || i >= graph.n_followers()) {
    throw IndexError("follower index " + std::to_string(i) + " out of range [0, " +
                     std::to_string(graph.n_followers()) + ")");
  }
}

double xi_local(int i, const Vec& x, double droop_term, const Vec& c,
                const std::array<double, 2>& leader_values, const CommGraph& graph) {
  const Mat& a = graph.adjacency();
  double acc = 0.0;
  for (int j = 0; j < graph.n_followers(); ++j) {
    if (a(i, j) != 0.0) acc += a(i, j) * (x(j) - x(i));
  }
  for (int k = 0; k < 2; ++k) {
    const double g = graph.pinning_vectors()[k](i);
    if (g != 0.0) acc += g * (leader_values[k] + droop_term - x(i));
  }
  return c(i) * acc;
}

Vec xi_global(const Vec& x, const Vec& droop_terms, const Vec& c,
              const std::array<double, 2>& leader_values, const CommGraph& graph) {
  const ContainmentAlgebra alg = containment_algebra(graph);
  Vec rhs = Vec::Zero(graph.n_followers());
  for (int k = 0; k < 2; ++k) {
    rhs += graph.pinning_vectors()[k].cwiseProduct(
        (droop_terms.array() + leader_values[k]).matrix());
  }
  return -c.cwiseProduct(alg.phi_sum * x - rhs);
}

}  // namespace

void GainSet::validate(int n) const {
  require_positive(c_f, n, "c_f");
  require_positive(c_v, n, "c_v");
  require_positive(beta_f, n, "beta_f");
  require_positive(beta_v, n, "beta_v");
  require_positive(upsilon_f, n, "upsilon_f");
  require_positive(upsilon_v, n, "upsilon_v");
  require_positive(kappa_f, n, "kappa_f");
  require_positive(kappa_v, n, "kappa_v");
  require_positive(alpha_f, n, "alpha_f");
  require_positive(alpha_v, n, "alpha_v");
}

void LeaderSignals::validate() const {
  for (double w : omega_ref) {
    if (!std::isfinite(w)) throw ValidationError("leader frequency reference must be finite");
  }
  for (double v : v_ref) {
    if (!std::isfinite(v)) throw ValidationError("leader voltage reference must be finite");
  }
  if (v_ref[0] < v_ref[1]) {
    throw ValidationError("upper voltage reference " + std::to_string(v_ref[0]) +
                          " below lower reference " + std::to_string(v_ref[1]));
  }
}

double xi_frequency(int i, const Vec& omega_n, const Vec& P, const CommGraph& graph,
                    const GainSet& gains, const LeaderSignals& leaders,
                    const DroopParams& params) {
  check_follower(i, graph);
  return xi_local(i, omega_n, params.m_p(i) * P(i), gains.c_f, leaders.omega_ref, graph);
}

double xi_voltage(int i, const Vec& v_n, const Vec& Q, const CommGraph& graph,
                  const GainSet& gains, const LeaderSignals& leaders,
                  const DroopParams& params) {
  check_follower(i, graph);
  return xi_local(i, v_n, params.n_q(i) * Q(i), gains.c_v, leaders.v_ref, graph);
}

Vec xi_frequency_global(const Vec& omega_n, const Vec& P, const CommGraph& graph,
                        const GainSet& gains, const LeaderSignals& leaders,
                        const DroopParams& params) {
  return xi_global(omega_n, params.m_p.cwiseProduct(P), gains.c_f, leaders.omega_ref, graph);
}

Vec xi_voltage_global(const Vec& v_n, const Vec& Q, const CommGraph& graph,
                      const GainSet& gains, const LeaderSignals& leaders,
                      const DroopParams& params) {
  return xi_global(v_n, params.n_q.cwiseProduct(Q), gains.c_v, leaders.v_ref, graph);
}

double eta(double t, double alpha) { return eta(t, alpha, EtaForm::gaussian); }

double eta(double t, double alpha, EtaForm form) {
  const double exponent = form == EtaForm::gaussian ? -alpha * t * t : -alpha * t;
  return std::max(std::exp(exponent), kEtaFloor);
}

ResilientInput resilient_input(double xi, double phi, double eta_t) {
  if (!(eta_t > 0.0)) {
    throw ValidationError("resilient_input: eta must be positive, got " + std::to_string(eta_t));
  }
  ResilientInput out;
  out.gamma = xi * std::exp(phi) / (std::abs(xi) + eta_t);
  out.u = xi + out.gamma;
  return out;
}

AdaptiveRates adaptive_derivatives(double xi, double phi, double phi_hat, double beta,
                                   double upsilon, double kappa) {
  const double mismatch = phi - phi_hat;
  const double lambda = upsilon * mismatch;
  AdaptiveRates rates;
  rates.phi_dot = beta * (std::abs(xi) - lambda);
  rates.phi_hat_dot = kappa * mismatch;
  return rates;
}

double conventional_input(double xi) { return xi; }

}  // namespace mgsim
