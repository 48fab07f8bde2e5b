#include "mgsim/attack.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mgsim {

double AttackSegment::eval(double t) const {
  switch (kind) {
    case SegmentKind::none: return 0.0;
    case SegmentKind::constant: return value;
    case SegmentKind::cubic: {
      const double s = scale * t;
      return s * s * s + offset;
    }
    case SegmentKind::exponential: return std::exp(rate * t) + offset;
    case SegmentKind::custom: return expr.eval(t);
  }
  return 0.0;
}

AttackProfile::AttackProfile(int n_inverters)
    : n_(n_inverters), frequency_(n_inverters), voltage_(n_inverters) {
  if (n_inverters < 0) throw ValidationError("negative inverter count");
}

const std::vector<AttackSegment>& AttackProfile::channel(int inverter, Loop loop) const {
  if (inverter < 0 || inverter >= n_) {
    throw IndexError("attack channel inverter index " + std::to_string(inverter) +
                     " out of range [0, " + std::to_string(n_) + ")");
  }
  return loop == Loop::frequency ? frequency_[inverter] : voltage_[inverter];
}

std::vector<AttackSegment>& AttackProfile::channel(int inverter, Loop loop) {
  const auto& self = *this;
  return const_cast<std::vector<AttackSegment>&>(self.channel(inverter, loop));
}

void AttackProfile::add_segment(int inverter, Loop loop, AttackSegment segment) {
  if (!(segment.t_start < segment.t_end)) {
    throw ValidationError("attack segment must have t_start < t_end, got [" +
                          std::to_string(segment.t_start) + ", " +
                          std::to_string(segment.t_end) + ")");
  }
  if (segment.kind == SegmentKind::custom && segment.expr.empty()) {
    throw ValidationError("custom attack segment without an expression");
  }
  auto& segs = channel(inverter, loop);
  if (!segs.empty() && !(segs.back().t_end <= segment.t_start)) {
    throw ValidationError("attack segments must be time-ordered and non-overlapping; segment at " +
                          std::to_string(segment.t_start) + " s overlaps one ending at " +
                          std::to_string(segs.back().t_end) + " s");
  }
  segs.push_back(std::move(segment));
}

const std::vector<AttackSegment>& AttackProfile::segments(int inverter, Loop loop) const {
  return channel(inverter, loop);
}

double AttackProfile::evaluate(int inverter, Loop loop, double t) const {
  for (const AttackSegment& seg : channel(inverter, loop)) {
    if (t < seg.t_start) break;  // segments are ordered
    if (t < seg.t_end) return seg.eval(t);
  }
  return 0.0;
}

bool AttackProfile::empty() const {
  for (const auto* per_loop : {&frequency_, &voltage_}) {
    for (const auto& segs : *per_loop) {
      if (!segs.empty()) return false;
    }
  }
  return true;
}

double AttackProfile::earliest_onset() const {
  double onset = std::numeric_limits<double>::infinity();
  for (const auto* per_loop : {&frequency_, &voltage_}) {
    for (const auto& segs : *per_loop) {
      if (!segs.empty()) onset = std::min(onset, segs.front().t_start);
    }
  }
  return onset;
}

std::vector<double> AttackProfile::boundary_times(double t_end) const {
  std::vector<double> times;
  for (const auto* per_loop : {&frequency_, &voltage_}) {
    for (const auto& segs : *per_loop) {
      for (const AttackSegment& seg : segs) {
        for (double t : {seg.t_start, seg.t_end}) {
          if (t > 0.0 && t < t_end) times.push_back(t);
        }
      }
    }
  }
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  return times;
}

bool check_envelope(const AttackProfile& profile, double gamma, double rho, double horizon,
                    int samples) {
  if (!(gamma > 0.0) || !(rho > 0.0)) {
    throw ValidationError("envelope constants gamma and rho must be positive");
  }
  if (!(horizon > 0.0) || samples < 2) {
    throw ValidationError("envelope check needs horizon > 0 and at least 2 samples");
  }
  for (int k = 0; k < samples; ++k) {
    const double t = horizon * static_cast<double>(k) / (samples - 1);
    const double bound = gamma * std::exp(rho * t);
    for (int i = 0; i < profile.n_inverters(); ++i) {
      for (Loop loop : {Loop::frequency, Loop::voltage}) {
        if (std::abs(profile.evaluate(i, loop, t)) > bound) return false;
      }
    }
  }
  return true;
}

double inject(double u, double mu) { return u + mu; }

}  // namespace mgsim
