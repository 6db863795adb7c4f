#pragma once

#include <stdexcept>

#include "qpa/bell.hpp"
#include "qpa/map.hpp"

namespace qpa {

enum class NoiseKind { depolarizing, bit_flip, phase_flip };
enum class NoisePlacement { before_step, after_step, both };
enum class NoiseSides { alice, bob, both };

struct NoiseSpec {
  NoiseKind kind = NoiseKind::depolarizing;
  double strength = 0.0;  // flip/replacement probability per affected qubit
  NoisePlacement placement = NoisePlacement::before_step;
  NoiseSides sides = NoiseSides::both;
};

inline void validate_noise(const NoiseSpec& spec) {
  if (!(spec.strength >= 0.0 && spec.strength <= 1.0))
    throw std::domain_error("noise: strength must lie in [0, 1]");
}

// Single-qubit channel applied to the chosen side(s) of a two-qubit state.
// Depolarizing replaces the qubit with the maximally mixed state with
// probability p; the flips conjugate by the corresponding Pauli.
inline Matrix apply_local_noise(const Matrix& rho, const NoiseSpec& spec) {
  validate_noise(spec);
  validate_density(rho, "apply_local_noise");
  if (rho.rows() != 4)
    throw std::domain_error("apply_local_noise: expected a two-qubit state");
  if (spec.strength == 0.0) return rho;

  const auto on_qubit = [&spec](const Matrix& in, int q) -> Matrix {
    const double p = spec.strength;
    switch (spec.kind) {
      case NoiseKind::bit_flip: {
        const Matrix x = op_on_qubit(pauli_x(), q, 2);
        return (1.0 - p) * in + p * (x * in * x);
      }
      case NoiseKind::phase_flip: {
        const Matrix z = op_on_qubit(pauli_z(), q, 2);
        return (1.0 - p) * in + p * (z * in * z);
      }
      case NoiseKind::depolarizing: {
        const Matrix rest = partial_trace(in, {1 - q});
        const Matrix half = 0.5 * Matrix::Identity(2, 2);
        const Matrix replaced = (q == 0) ? kron(half, rest) : kron(rest, half);
        return (1.0 - p) * in + p * replaced;
      }
    }
    throw std::domain_error("apply_local_noise: unknown noise kind");
  };

  Matrix out = rho;
  if (spec.sides != NoiseSides::bob) out = on_qubit(out, 0);
  if (spec.sides != NoiseSides::alice) out = on_qubit(out, 1);
  return out;
}

// These channels map Bell-diagonal states to Bell-diagonal states (Pauli
// conjugation permutes the Bell basis; depolarizing mixes in identity), so
// the weights round-trip through the density form without loss.
inline BellDiagonal apply_local_noise(const BellDiagonal& w, const NoiseSpec& spec) {
  validate_noise(spec);
  validate_bell_diagonal(w, "apply_local_noise");
  if (spec.strength == 0.0) return w;
  return density_to_bell_diagonal(apply_local_noise(bell_diagonal_to_density(w), spec));
}

struct NoisyRun {
  Trajectory trajectory;          // states as held entering the next round
  double plateau_fidelity = 0.0;  // mean fidelity over the last ceil(rounds/5) rounds
  bool purifying = false;         // plateau above the 1/2 threshold
};

// Recurrence rounds with a noise channel inserted before and/or after each
// step, tracking where the fidelity settles.
inline NoisyRun noisy_iterate(const BellDiagonal& w0, const NoiseSpec& spec, int rounds) {
  validate_bell_diagonal(w0, "noisy_iterate");
  validate_noise(spec);
  if (rounds < 1) throw std::domain_error("noisy_iterate: rounds must be >= 1");

  NoisyRun run;
  run.trajectory.initial = w0;
  BellDiagonal w = w0;
  for (int k = 0; k < rounds; ++k) {
    if (spec.placement != NoisePlacement::after_step) w = apply_local_noise(w, spec);
    const StepOutcome s = step_identical(w);
    w = s.state;
    if (spec.placement != NoisePlacement::before_step) w = apply_local_noise(w, spec);
    run.trajectory.steps.push_back({w, s.success_prob});
  }

  const int tail = (rounds + 4) / 5;
  double acc = 0.0;
  for (int k = rounds - tail; k < rounds; ++k) acc += run.trajectory.steps[k].state.a;
  run.plateau_fidelity = acc / tail;
  run.purifying = run.plateau_fidelity > 0.5;
  run.trajectory.converged = (1.0 - w.a < 1e-6);
  return run;
}

}  // namespace qpa
