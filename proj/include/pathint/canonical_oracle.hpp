#pragma once

// Conventional canonical quantum mechanics on a single slice space: ordered
// products of exact segment exponentials. Nothing here touches the extended
// space, so these values can serve as the independent side of every trace
// identity.

#include <span>
#include <vector>

#include "pathint/slice_space.hpp"
#include "pathint/types.hpp"

namespace pathint::oracle {

struct Segment {
  SliceOperator hamiltonian;
  double duration;
};

/// Piecewise-constant H(t). Real durations are mapped onto the contour
/// t -> contour * t when exponentiated, so contour = 1 - i eta damps.
class EvolutionSchedule {
 public:
  explicit EvolutionSchedule(std::vector<Segment> segments, cplx contour = 1.0);
  static EvolutionSchedule constant(const SliceOperator& hamiltonian, double total, cplx contour = 1.0);

  std::span<const Segment> segments() const { return segments_; }
  double total() const { return total_; }
  cplx contour() const { return contour_; }
  const SliceSpace& space() const { return segments_.front().hamiltonian.space(); }

 private:
  std::vector<Segment> segments_;
  double total_;
  cplx contour_;
};

/// U(t) = U(t, 0).
SliceOperator evolve(const EvolutionSchedule& schedule, double t);

/// U(t2, t1) for 0 <= t1 <= t2 <= T.
SliceOperator evolve_between(const EvolutionSchedule& schedule, double t1, double t2);

struct TimedOperator {
  double time;
  SliceOperator op;
};

/// <q_out| U(T, t_n) O_n ... U(t_2, t_1) O_1 U(t_1, 0) |q_in> with the
/// operators sorted by time internally. Distinct operators at equal times
/// are rejected.
cplx time_ordered_correlator(const EvolutionSchedule& schedule, std::span<const TimedOperator> ops, int q_in,
                             int q_out);
cplx time_ordered_correlator(const EvolutionSchedule& schedule, std::span<const TimedOperator> ops,
                             const CVector& in, const CVector& out);

/// <0| exp(-i H T) |0> for the truncated harmonic oscillator.
cplx vacuum_amplitude(double omega, double total, int truncation, double mass = 1.0);

/// Tr[exp(-beta H)].
cplx thermal_partition(const SliceOperator& hamiltonian, double beta);

/// Tr[e^{-(beta-theta_n) H} O_n ... e^{-(theta_2-theta_1) H} O_1 e^{-theta_1 H}] / Tr[e^{-beta H}]
/// with the operators sorted by angle in [0, beta].
cplx thermal_correlator(const SliceOperator& hamiltonian, double beta, std::span<const TimedOperator> ops);

}  // namespace pathint::oracle
