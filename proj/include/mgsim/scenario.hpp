#pragma once

#include <array>

#include "mgsim/attack.hpp"
#include "mgsim/control.hpp"
#include "mgsim/netgraph.hpp"
#include "mgsim/plant.hpp"

namespace mgsim {

enum class ControllerKind { conventional, resilient };

// Certified growth bound of the attack schedule: |mu(t)| <= gamma exp(rho t).
// Scenario metadata, validated on demand by check_envelope.
struct EnvelopeSpec {
  double gamma = 5.0;
  double rho = 0.5;
  bool operator==(const EnvelopeSpec&) const = default;
};

// Initial value of every integrated state, one entry per inverter.
struct InitialState {
  Vec delta;
  Vec omega_n;
  Vec v_n;
  Vec phi_f, phi_hat_f;
  Vec phi_v, phi_hat_v;
  bool operator==(const InitialState&) const;
};

// Complete description of one run. Everything a run reads lives here;
// identical configs give byte-identical results.
struct ScenarioConfig {
  Mat adjacency;
  std::array<Vec, 2> pinning;
  DroopParams droop;
  LoadSpec load;
  GainSet gains;
  LeaderSignals leaders;
  AttackProfile attacks;
  ControllerKind controller = ControllerKind::resilient;
  double dt = 5e-5;             // s
  double t_end = 20.0;          // s
  int sample_stride = 10;       // record every this many steps
  InitialState init;
  double blowup = 1e7;          // any |state| beyond this terminates the run
  EnvelopeSpec envelope;
  double nominal_omega = 0.0;   // rotating-frame rate, rad/s

  int n_inverters() const { return static_cast<int>(adjacency.rows()); }
  double sample_interval() const { return dt * sample_stride; }

  // Structural graph validation only (dimensions, signs).
  CommGraph build_graph() const;

  // Full pre-run validation: graph reachability, positive gains, integrator
  // settings, adaptive-state initialization contract.
  void validate() const;

  bool operator==(const ScenarioConfig&) const;
};

}  // namespace mgsim
