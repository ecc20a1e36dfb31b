#include "pathint/canonical_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pathint/errors.hpp"

namespace pathint::oracle {
namespace {

constexpr double kTimeSlack = 1e-12;

std::vector<TimedOperator> sorted_by_time(std::span<const TimedOperator> ops) {
  std::vector<TimedOperator> sorted(ops.begin(), ops.end());
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const TimedOperator& a, const TimedOperator& b) { return a.time < b.time; });
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i].time == sorted[i - 1].time) {
      std::ostringstream msg;
      msg << "time ordering undefined: two operators at t = " << sorted[i].time;
      throw InvalidArgument(msg.str());
    }
  }
  return sorted;
}

}  // namespace

EvolutionSchedule::EvolutionSchedule(std::vector<Segment> segments, cplx contour)
    : segments_(std::move(segments)), total_(0.0), contour_(contour) {
  if (segments_.empty()) throw InvalidArgument("EvolutionSchedule: no segments");
  for (const auto& s : segments_) {
    if (!(s.duration > 0.0)) throw InvalidArgument("EvolutionSchedule: segment durations must be positive");
    if (!(s.hamiltonian.space() == segments_.front().hamiltonian.space()))
      throw DimensionMismatch("EvolutionSchedule: segments live on different spaces");
    total_ += s.duration;
  }
}

EvolutionSchedule EvolutionSchedule::constant(const SliceOperator& hamiltonian, double total, cplx contour) {
  return EvolutionSchedule({Segment{hamiltonian, total}}, contour);
}

SliceOperator evolve_between(const EvolutionSchedule& schedule, double t1, double t2) {
  const double total = schedule.total();
  if (t1 < -kTimeSlack || t2 > total + kTimeSlack * std::max(1.0, total) || t1 > t2) {
    std::ostringstream msg;
    msg << "evolve: interval [" << t1 << ", " << t2 << "] outside [0, " << total << "]";
    throw InvalidArgument(msg.str());
  }
  const SliceSpace& space = schedule.space();
  CMatrix u = CMatrix::Identity(space.dim(), space.dim());
  double start = 0.0;
  for (const auto& seg : schedule.segments()) {
    const double end = start + seg.duration;
    const double lo = std::max(start, t1);
    const double hi = std::min(end, t2);
    if (hi > lo) {
      const SliceOperator step = propagator_step(seg.hamiltonian, schedule.contour() * (hi - lo));
      u = step.matrix() * u;
    }
    start = end;
  }
  return SliceOperator(space, std::move(u), "U");
}

SliceOperator evolve(const EvolutionSchedule& schedule, double t) { return evolve_between(schedule, 0.0, t); }

cplx time_ordered_correlator(const EvolutionSchedule& schedule, std::span<const TimedOperator> ops,
                             const CVector& in, const CVector& out) {
  const auto sorted = sorted_by_time(ops);
  CVector v = in;
  double now = 0.0;
  for (const auto& item : sorted) {
    v = evolve_between(schedule, now, item.time).matrix() * v;
    v = item.op.matrix() * v;
    now = item.time;
  }
  v = evolve_between(schedule, now, schedule.total()).matrix() * v;
  return out.dot(v);
}

cplx time_ordered_correlator(const EvolutionSchedule& schedule, std::span<const TimedOperator> ops, int q_in,
                             int q_out) {
  const int m = schedule.space().dim();
  if (q_in < 0 || q_in >= m || q_out < 0 || q_out >= m)
    throw InvalidArgument("time_ordered_correlator: basis index out of range");
  return time_ordered_correlator(schedule, ops, CVector::Unit(m, q_in), CVector::Unit(m, q_out));
}

cplx vacuum_amplitude(double omega, double total, int truncation, double mass) {
  const SliceSpace space = SliceSpace::fock(truncation, mass, omega);
  const SliceOperator u = propagator_step(harmonic_hamiltonian(space), total);
  return u.matrix()(0, 0);
}

cplx thermal_partition(const SliceOperator& hamiltonian, double beta) {
  return propagator_step(hamiltonian, cplx(0.0, -beta)).matrix().trace();
}

cplx thermal_correlator(const SliceOperator& hamiltonian, double beta, std::span<const TimedOperator> ops) {
  const auto sorted = sorted_by_time(ops);
  for (const auto& item : sorted)
    if (item.time < 0.0 || item.time > beta) throw InvalidArgument("thermal_correlator: angle outside [0, beta]");
  const int m = hamiltonian.dim();
  CMatrix acc = CMatrix::Identity(m, m);
  double now = 0.0;
  for (const auto& item : sorted) {
    acc = propagator_step(hamiltonian, cplx(0.0, -(item.time - now))).matrix() * acc;
    acc = item.op.matrix() * acc;
    now = item.time;
  }
  acc = propagator_step(hamiltonian, cplx(0.0, -(beta - now))).matrix() * acc;
  return acc.trace() / thermal_partition(hamiltonian, beta);
}

}  // namespace pathint::oracle
