#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace qpa {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// Tolerances for structural checks on quantum states.
inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kTraceTol = 1e-12;
inline constexpr double kEigenvalueFloor = -1e-10;
inline constexpr double kNormTol = 1e-12;

// Numeric failure that still carries the best value reached.
class NumericError : public std::runtime_error {
 public:
  NumericError(const std::string& what, double best)
      : std::runtime_error(what), best_value(best) {}

  double best_value;
};

inline Matrix dagger(const Matrix& m) { return m.adjoint(); }

inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline Vector kron(const Vector& a, const Vector& b) {
  Vector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i)
    out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

// Number of qubits for a 2^n dimension; rejects anything else.
inline int qubit_count(Eigen::Index dim) {
  if (dim < 1) throw std::domain_error("qubit_count: empty dimension");
  int n = 0;
  Eigen::Index d = dim;
  while (d > 1) {
    if (d % 2 != 0) throw std::domain_error("qubit_count: dimension is not a power of two");
    d /= 2;
    ++n;
  }
  return n;
}

// Eigenvalues of a Hermitian matrix, ascending.
inline Eigen::VectorXd hermitian_eigenvalues(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw NumericError("hermitian_eigenvalues: eigensolver failed", 0.0);
  return solver.eigenvalues();
}

// Checks Hermiticity, unit trace and positivity; throws std::domain_error
// naming the violated property.
inline void validate_density(const Matrix& rho, const char* context) {
  if (rho.rows() != rho.cols())
    throw std::domain_error(std::string(context) + ": density matrix must be square");
  qubit_count(rho.rows());
  const double herm = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
  if (herm > kHermitianTol)
    throw std::domain_error(std::string(context) + ": matrix is not Hermitian");
  if (std::abs(rho.trace() - Complex(1.0)) > kTraceTol)
    throw std::domain_error(std::string(context) + ": trace is not 1");
  const Eigen::VectorXd evals = hermitian_eigenvalues(rho);
  if (evals.minCoeff() < kEigenvalueFloor)
    throw std::domain_error(std::string(context) + ": matrix has a negative eigenvalue");
}

inline void validate_pure(const Vector& psi, const char* context) {
  qubit_count(psi.size());
  if (std::abs(psi.norm() - 1.0) > kNormTol)
    throw std::domain_error(std::string(context) + ": state vector is not normalized");
}

// Partial trace keeping the listed qubits (most significant bit = qubit 0).
// Kept qubits stay in their original relative order.
inline Matrix partial_trace(const Matrix& rho, const std::vector<int>& keep) {
  if (rho.rows() != rho.cols())
    throw std::domain_error("partial_trace: matrix must be square");
  const int n = qubit_count(rho.rows());

  std::vector<bool> kept(n, false);
  for (int q : keep) {
    if (q < 0 || q >= n) throw std::domain_error("partial_trace: qubit index out of range");
    if (kept[q]) throw std::domain_error("partial_trace: duplicate qubit index");
    kept[q] = true;
  }
  std::vector<int> traced;
  for (int q = 0; q < n; ++q)
    if (!kept[q]) traced.push_back(q);

  const int nk = static_cast<int>(keep.size());
  const int nt = static_cast<int>(traced.size());
  std::vector<int> keep_sorted;
  for (int q = 0; q < n; ++q)
    if (kept[q]) keep_sorted.push_back(q);

  // Index with qubit q at bit (n-1-q).
  const auto assemble = [&](Eigen::Index kept_bits, Eigen::Index traced_bits) {
    Eigen::Index idx = 0;
    for (int i = 0; i < nk; ++i)
      if ((kept_bits >> (nk - 1 - i)) & 1) idx |= Eigen::Index(1) << (n - 1 - keep_sorted[i]);
    for (int i = 0; i < nt; ++i)
      if ((traced_bits >> (nt - 1 - i)) & 1) idx |= Eigen::Index(1) << (n - 1 - traced[i]);
    return idx;
  };

  const Eigen::Index out_dim = Eigen::Index(1) << nk;
  const Eigen::Index trace_dim = Eigen::Index(1) << nt;
  Matrix out = Matrix::Zero(out_dim, out_dim);
  for (Eigen::Index r = 0; r < out_dim; ++r)
    for (Eigen::Index c = 0; c < out_dim; ++c)
      for (Eigen::Index t = 0; t < trace_dim; ++t)
        out(r, c) += rho(assemble(r, t), assemble(c, t));
  return out;
}

// Von Neumann entropy in nats.
inline double von_neumann_entropy(const Matrix& rho) {
  validate_density(rho, "von_neumann_entropy");
  const Eigen::VectorXd evals = hermitian_eigenvalues(rho);
  double s = 0.0;
  for (Eigen::Index i = 0; i < evals.size(); ++i)
    if (evals(i) > 0.0) s -= evals(i) * std::log(evals(i));
  return s;
}

// Embed a single-qubit operator at position `qubit` of an n-qubit register.
inline Matrix op_on_qubit(const Matrix& u, int qubit, int n_qubits) {
  if (u.rows() != 2 || u.cols() != 2)
    throw std::domain_error("op_on_qubit: operator must be 2x2");
  if (qubit < 0 || qubit >= n_qubits)
    throw std::domain_error("op_on_qubit: qubit index out of range");
  const Eigen::Index left = Eigen::Index(1) << qubit;
  const Eigen::Index right = Eigen::Index(1) << (n_qubits - 1 - qubit);
  return kron(kron(Matrix(Matrix::Identity(left, left)), u),
              Matrix(Matrix::Identity(right, right)));
}

}  // namespace qpa
