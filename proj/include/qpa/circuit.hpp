#pragma once

#include <cmath>
#include <stdexcept>

#include "qpa/bell.hpp"
#include "qpa/map.hpp"

namespace qpa {

// Gate-level reference for one purification round. Register wire order,
// most significant bit first:
//   qubit 0: Alice, source pair    qubit 2: Alice, target pair
//   qubit 1: Bob,   source pair    qubit 3: Bob,   target pair
// Extra qubits (e.g. an eavesdropper's purifying register) trail behind.

// Rotation by pi/2 about x.
inline const Matrix& alice_rotation() {
  static const Matrix m = [] {
    const double s = 1.0 / std::sqrt(2.0);
    Matrix u(2, 2);
    u << Complex(s, 0), Complex(0, -s), Complex(0, -s), Complex(s, 0);
    return u;
  }();
  return m;
}

// Rotation by -pi/2 about x (the inverse of Alice's).
inline const Matrix& bob_rotation() {
  static const Matrix m = [] {
    const double s = 1.0 / std::sqrt(2.0);
    Matrix u(2, 2);
    u << Complex(s, 0), Complex(0, s), Complex(0, s), Complex(s, 0);
    return u;
  }();
  return m;
}

inline Matrix cnot(int n_qubits, int control, int target) {
  if (n_qubits < 1 || n_qubits > 16)
    throw std::domain_error("cnot: unsupported register size");
  if (control < 0 || control >= n_qubits || target < 0 || target >= n_qubits ||
      control == target)
    throw std::domain_error("cnot: bad control/target qubits");
  const Eigen::Index dim = Eigen::Index(1) << n_qubits;
  const Eigen::Index cbit = Eigen::Index(1) << (n_qubits - 1 - control);
  const Eigen::Index tbit = Eigen::Index(1) << (n_qubits - 1 - target);
  Matrix u = Matrix::Zero(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) u((i & cbit) ? (i ^ tbit) : i, i) = 1.0;
  return u;
}

// Both one-sided rotations followed by both local CNOTs (source controls
// target on each side).
inline const Matrix& two_pair_circuit() {
  static const Matrix w = [] {
    const Matrix rot = kron(kron(alice_rotation(), bob_rotation()),
                            kron(alice_rotation(), bob_rotation()));
    return Matrix(cnot(4, 0, 2) * cnot(4, 1, 3) * rot);
  }();
  return w;
}

struct CircuitOutcome {
  Matrix surviving;  // density matrix on [source pair, trailing qubits]
  double success_prob = 0.0;
};

// Runs the round on a register of >= 4 qubits, measures the target pair in
// the computational basis, keeps coincident outcomes (00 or 11), and traces
// the measured qubits out.
inline CircuitOutcome qpa_circuit_step(const Matrix& joint) {
  validate_density(joint, "qpa_circuit_step");
  const int n = qubit_count(joint.rows());
  if (n < 4) throw std::domain_error("qpa_circuit_step: need at least four qubits");

  Matrix u = two_pair_circuit();
  if (n > 4) {
    const Eigen::Index rest = Eigen::Index(1) << (n - 4);
    u = kron(u, Matrix(Matrix::Identity(rest, rest)));
  }
  Matrix rho = u * joint * u.adjoint();

  const Eigen::Index dim = rho.rows();
  const Eigen::Index abit = Eigen::Index(1) << (n - 3);  // qubit 2
  const Eigen::Index bbit = Eigen::Index(1) << (n - 4);  // qubit 3
  const auto coincident = [&](Eigen::Index i) {
    return ((i & abit) != 0) == ((i & bbit) != 0);
  };

  double success = 0.0;
  for (Eigen::Index i = 0; i < dim; ++i)
    if (coincident(i)) success += rho(i, i).real();
  if (success < 1e-15)
    throw NumericError("qpa_circuit_step: post-selection impossible", success);

  for (Eigen::Index i = 0; i < dim; ++i)
    if (!coincident(i)) {
      rho.row(i).setZero();
      rho.col(i).setZero();
    }
  rho /= success;

  std::vector<int> keep = {0, 1};
  for (int q = 4; q < n; ++q) keep.push_back(q);
  return {partial_trace(rho, keep), success};
}

// Circuit-backed counterpart of step_identical: feeds two independent
// copies of the same Bell-diagonal pair through the gates.
inline StepOutcome oracle_step_bell_diagonal(const BellDiagonal& w) {
  const Matrix rho = bell_diagonal_to_density(w);
  const CircuitOutcome res = qpa_circuit_step(kron(rho, rho));
  return {density_to_bell_diagonal(res.surviving), res.success_prob};
}

// Same gates on an arbitrary (possibly classically correlated) four-qubit
// input. The round is linear in the joint state, so a correlated mixture
// maps to the mixture of its branch outputs, not to any function of the
// marginals alone.
inline CircuitOutcome oracle_step_correlated(const Matrix& joint) {
  if (joint.rows() != 16 || joint.cols() != 16)
    throw std::domain_error("oracle_step_correlated: expected a four-qubit state");
  return qpa_circuit_step(joint);
}

// Purification of one Bell-diagonal pair: a two-qubit environment records
// which Bell state the pair is in. Wire order [pair q0 q1, environment q2 q3].
inline Vector purify_bell_diagonal(const BellDiagonal& w) {
  validate_bell_diagonal(w, "purify_bell_diagonal");
  const auto& bells = bell_states();
  Vector psi = Vector::Zero(16);
  for (int i = 0; i < 4; ++i) {
    if (w[i] <= 0.0) continue;
    Vector env = Vector::Zero(4);
    env(i) = 1.0;
    psi += std::sqrt(w[i]) * kron(bells[i], env);
  }
  return psi;
}

struct EveStep {
  double entropy_before = 0.0;  // nats
  double entropy_after = 0.0;
  double success_prob = 0.0;
};

// Gives an eavesdropper the full purification of both pairs (four extra
// qubits), runs one round, and compares the surviving pair's entanglement
// with the environment before and after, via the reduced-state entropy.
inline EveStep eve_step_entropy(const BellDiagonal& w) {
  validate_bell_diagonal(w, "eve_step_entropy");

  // psi(ab, env): ab indexes the four pair qubits [q0..q3], env the four
  // eavesdropper qubits recording both Bell labels.
  const auto& bells = bell_states();
  Matrix psi = Matrix::Zero(16, 16);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      const double amp = std::sqrt(w[i] * w[j]);
      if (amp == 0.0) continue;
      const Vector pair = kron(bells[i], bells[j]);
      for (int ab = 0; ab < 16; ++ab) psi(ab, 4 * i + j) = amp * pair(ab);
    }

  const Matrix pair_before = partial_trace(psi * psi.adjoint(), {0, 1});
  const double s_before = von_neumann_entropy(pair_before);

  Matrix out = two_pair_circuit() * psi;
  double success = 0.0;
  for (int ab = 0; ab < 16; ++ab) {
    const int targets = ab & 3;  // qubits 2 and 3
    if (targets == 0 || targets == 3)
      success += out.row(ab).squaredNorm();
    else
      out.row(ab).setZero();
  }
  if (success < 1e-15)
    throw NumericError("eve_step_entropy: post-selection impossible", success);
  out /= std::sqrt(success);

  const Matrix pair_after = partial_trace(out * out.adjoint(), {0, 1});
  const double s_after = von_neumann_entropy(pair_after);
  return {s_before, s_after, success};
}

}  // namespace qpa
