#pragma once

#include <string>
#include <vector>

#include "mgsim/attack_expr.hpp"
#include "mgsim/common.hpp"

namespace mgsim {

enum class Loop { frequency, voltage };

enum class SegmentKind { none, constant, cubic, exponential, custom };

// One piece of a piecewise attack signal, active on [t_start, t_end).
// Formulas use absolute simulation time, not segment-relative time:
//   constant:    value
//   cubic:       (scale * t)^3 + offset
//   exponential: exp(rate * t) + offset
//   custom:      expr(t)
struct AttackSegment {
  double t_start = 0.0;
  double t_end = 0.0;
  SegmentKind kind = SegmentKind::none;
  double value = 0.0;
  double scale = 0.0;
  double offset = 0.0;
  double rate = 0.0;
  TimeExpr expr;

  double eval(double t) const;
  bool operator==(const AttackSegment&) const = default;
};

// Per-inverter, per-loop attack schedules. Evaluates to zero outside all
// segments. Segments of one channel must be time-ordered and non-overlapping.
class AttackProfile {
 public:
  AttackProfile() = default;
  explicit AttackProfile(int n_inverters);

  int n_inverters() const { return n_; }
  void add_segment(int inverter, Loop loop, AttackSegment segment);
  const std::vector<AttackSegment>& segments(int inverter, Loop loop) const;

  double evaluate(int inverter, Loop loop, double t) const;

  // True when no channel has any segment.
  bool empty() const;
  // Earliest segment start, or +inf when empty.
  double earliest_onset() const;
  // Sorted unique segment starts/ends strictly inside (0, t_end).
  std::vector<double> boundary_times(double t_end) const;

  bool operator==(const AttackProfile&) const = default;

 private:
  const std::vector<AttackSegment>& channel(int inverter, Loop loop) const;
  std::vector<AttackSegment>& channel(int inverter, Loop loop);

  int n_ = 0;
  std::vector<std::vector<AttackSegment>> frequency_;
  std::vector<std::vector<AttackSegment>> voltage_;
};

// Sampled test that every channel stays inside |mu(t)| <= gamma exp(rho t)
// on a uniform grid over [0, horizon]. A sampled check, not a proof.
bool check_envelope(const AttackProfile& profile, double gamma, double rho, double horizon,
                    int samples = 10000);

// Corruption of a control input is additive: u_bar = u + mu.
double inject(double u, double mu);

}  // namespace mgsim
