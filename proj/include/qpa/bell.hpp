#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "qpa/linalg.hpp"
#include "qpa/rng.hpp"

namespace qpa {

// Bell basis, in this order everywhere:
//   0: phi+ = (|00> + |11>)/sqrt2
//   1: psi- = (|01> - |10>)/sqrt2
//   2: psi+ = (|01> + |10>)/sqrt2
//   3: phi- = (|00> - |11>)/sqrt2
inline const std::array<Vector, 4>& bell_states() {
  static const std::array<Vector, 4> states = [] {
    const double s = 1.0 / std::sqrt(2.0);
    std::array<Vector, 4> b{Vector(4), Vector(4), Vector(4), Vector(4)};
    b[0] << s, 0.0, 0.0, s;
    b[1] << 0.0, s, -s, 0.0;
    b[2] << 0.0, s, s, 0.0;
    b[3] << s, 0.0, 0.0, -s;
    return b;
  }();
  return states;
}

inline const Matrix& pauli_x() {
  static const Matrix m = [] {
    Matrix x(2, 2);
    x << 0.0, 1.0, 1.0, 0.0;
    return x;
  }();
  return m;
}

inline const Matrix& pauli_y() {
  static const Matrix m = [] {
    Matrix y(2, 2);
    y << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
    return y;
  }();
  return m;
}

inline const Matrix& pauli_z() {
  static const Matrix m = [] {
    Matrix z(2, 2);
    z << 1.0, 0.0, 0.0, -1.0;
    return z;
  }();
  return m;
}

// Weights of a Bell-diagonal two-qubit state, in the basis order above.
struct BellDiagonal {
  double a = 1.0;  // phi+
  double b = 0.0;  // psi-
  double c = 0.0;  // psi+
  double d = 0.0;  // phi-

  double operator[](int i) const {
    switch (i) {
      case 0: return a;
      case 1: return b;
      case 2: return c;
      case 3: return d;
      default: throw std::domain_error("BellDiagonal: index out of range");
    }
  }
  double& operator[](int i) {
    switch (i) {
      case 0: return a;
      case 1: return b;
      case 2: return c;
      case 3: return d;
      default: throw std::domain_error("BellDiagonal: index out of range");
    }
  }

  double sum() const { return a + b + c + d; }

  // Earliest slot wins ties.
  int max_index() const {
    int best = 0;
    for (int i = 1; i < 4; ++i)
      if ((*this)[i] > (*this)[best]) best = i;
    return best;
  }
  double max_component() const { return (*this)[max_index()]; }
};

inline void validate_bell_diagonal(const BellDiagonal& w, const char* context) {
  for (int i = 0; i < 4; ++i)
    if (w[i] < -kTraceTol)
      throw std::domain_error(std::string(context) + ": negative Bell weight");
  if (std::abs(w.sum() - 1.0) > kTraceTol)
    throw std::domain_error(std::string(context) + ": Bell weights do not sum to 1");
}

inline BellDiagonal make_bell_diagonal(double a, double b, double c, double d) {
  const BellDiagonal w{a, b, c, d};
  validate_bell_diagonal(w, "make_bell_diagonal");
  return w;
}

inline Matrix bell_diagonal_to_density(const BellDiagonal& w) {
  validate_bell_diagonal(w, "bell_diagonal_to_density");
  const auto& bells = bell_states();
  Matrix rho = Matrix::Zero(4, 4);
  for (int i = 0; i < 4; ++i) rho += w[i] * (bells[i] * bells[i].adjoint());
  return rho;
}

// Diagonal of rho in the Bell basis; Bell coherences are dropped. Tiny
// eigenvalue noise is clamped before renormalizing.
inline BellDiagonal density_to_bell_diagonal(const Matrix& rho) {
  validate_density(rho, "density_to_bell_diagonal");
  if (rho.rows() != 4)
    throw std::domain_error("density_to_bell_diagonal: expected a two-qubit state");
  const auto& bells = bell_states();
  BellDiagonal w{0, 0, 0, 0};
  for (int i = 0; i < 4; ++i) {
    double v = bells[i].dot(rho * bells[i]).real();
    if (v < 0.0) {
      if (v < kEigenvalueFloor)
        throw std::domain_error("density_to_bell_diagonal: negative Bell weight");
      v = 0.0;
    }
    w[i] = v;
  }
  const double total = w.sum();
  for (int i = 0; i < 4; ++i) w[i] /= total;
  validate_bell_diagonal(w, "density_to_bell_diagonal");
  return w;
}

// Overlap with phi+.
inline double fidelity(const Matrix& rho) {
  validate_density(rho, "fidelity");
  if (rho.rows() != 4) throw std::domain_error("fidelity: expected a two-qubit state");
  const auto& phi = bell_states()[0];
  return phi.dot(rho * phi).real();
}

// max <e| rho |e> over maximally entangled |e> = (U x 1)|phi+>, U in SU(2).
// Deterministic coarse grid over (theta, alpha, beta), then monotone local
// pattern searches (narrowing only after rounds without improvement) around
// the best spatially distinct candidates.
inline double fully_entangled_fraction(const Matrix& rho, double tol = 1e-6) {
  validate_density(rho, "fully_entangled_fraction");
  if (rho.rows() != 4)
    throw std::domain_error("fully_entangled_fraction: expected a two-qubit state");
  if (!(tol > 0.0))
    throw std::domain_error("fully_entangled_fraction: tol must be positive");

  // U = [[cos t e^{i alpha}, -sin t e^{-i beta}], [sin t e^{i beta}, cos t e^{-i alpha}]]
  // gives |e> = (ua|00> - conj(ub)|01> + ub|10> + conj(ua)|11>), already
  // carrying the 1/sqrt2 normalization inside ua, ub.
  const auto value = [&rho](double t, double alpha, double beta) {
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    const Complex ua = std::polar(std::cos(t) * inv_sqrt2, alpha);
    const Complex ub = std::polar(std::sin(t) * inv_sqrt2, beta);
    Vector e(4);
    e << ua, -std::conj(ub), ub, std::conj(ua);
    return e.dot(rho * e).real();
  };

  constexpr int kCoarse = 16;
  const double pi = std::acos(-1.0);
  const double step_t = (pi / 2) / kCoarse;
  const double step_ab = (2 * pi) / kCoarse;

  struct Point {
    double t, alpha, beta, v;
  };
  std::vector<Point> coarse;
  coarse.reserve(kCoarse * kCoarse * kCoarse);
  for (int i = 0; i < kCoarse; ++i)
    for (int j = 0; j < kCoarse; ++j)
      for (int k = 0; k < kCoarse; ++k) {
        const double t = (i + 0.5) * step_t;
        const double al = (j + 0.5) * step_ab;
        const double be = (k + 0.5) * step_ab;
        coarse.push_back({t, al, be, value(t, al, be)});
      }
  std::sort(coarse.begin(), coarse.end(),
            [](const Point& x, const Point& y) { return x.v > y.v; });

  // Up to 4 refinement seeds, kept spatially distinct so near-degenerate
  // maxima all get explored.
  const auto angle_gap = [&](double x, double y) {
    const double d = std::abs(x - y);
    return std::min(d, 2 * pi - d);
  };
  std::vector<Point> seeds;
  for (const Point& p : coarse) {
    bool distinct = true;
    for (const Point& s : seeds)
      if (std::abs(p.t - s.t) < 2 * step_t && angle_gap(p.alpha, s.alpha) < 2 * step_ab &&
          angle_gap(p.beta, s.beta) < 2 * step_ab) {
        distinct = false;
        break;
      }
    if (distinct) seeds.push_back(p);
    if (seeds.size() == 4) break;
  }

  // Monotone pattern search: a round that improves keeps its scale (so the
  // walker can ride a long ridge out of a mis-ranked basin), a round without
  // improvement halves it. Stops once the scale is fine enough that the
  // quadratic remainder is far below tol.
  const double h_floor = std::max(1e-9, std::min(1e-4, std::sqrt(tol) * 0.1));
  double best = coarse.front().v;
  for (const Point& seed : seeds) {
    Point center = seed;
    double ht = 1.5 * step_t;
    double hab = 1.5 * step_ab;
    bool settled = false;
    for (int round = 0; round < 1000 && !settled; ++round) {
      Point round_best = center;
      for (int i = -2; i <= 2; ++i)
        for (int j = -2; j <= 2; ++j)
          for (int k = -2; k <= 2; ++k) {
            if (i == 0 && j == 0 && k == 0) continue;
            const double t = center.t + i * (ht / 2);
            const double al = center.alpha + j * (hab / 2);
            const double be = center.beta + k * (hab / 2);
            const double v = value(t, al, be);
            if (v > round_best.v) round_best = {t, al, be, v};
          }
      if (round_best.v > center.v) {
        center = round_best;
      } else {
        ht /= 2;
        hab /= 2;
        settled = hab <= h_floor;
      }
    }
    best = std::max(best, center.v);
    if (!settled)
      throw NumericError("fully_entangled_fraction: refinement did not settle", best);
  }
  return best;
}

// Largest CHSH expectation reachable with projective measurements:
// 2 sqrt(m1 + m2), the top two eigenvalues of T^T T for the correlation
// matrix T_ij = tr(rho sigma_i x sigma_j).
inline double chsh_max(const Matrix& rho) {
  validate_density(rho, "chsh_max");
  if (rho.rows() != 4) throw std::domain_error("chsh_max: expected a two-qubit state");
  const std::array<const Matrix*, 3> sigma = {&pauli_x(), &pauli_y(), &pauli_z()};
  Eigen::Matrix3d t;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      t(i, j) = (rho * kron(*sigma[i], *sigma[j])).trace().real();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(t.transpose() * t,
                                                        Eigen::EigenvaluesOnly);
  const Eigen::Vector3d m = solver.eigenvalues();
  return 2.0 * std::sqrt(std::max(0.0, m(1) + m(2)));
}

// Isotropic mixture with phi+ weight f and the rest spread evenly.
inline BellDiagonal werner(double f) {
  if (f < -kTraceTol || f > 1.0 + kTraceTol)
    throw std::domain_error("werner: fidelity must lie in [0, 1]");
  f = std::clamp(f, 0.0, 1.0);
  const double r = (1.0 - f) / 3.0;
  return BellDiagonal{f, r, r, r};
}

inline BellDiagonal random_bell_diagonal(rng::Stream& s) {
  const auto x = rng::dirichlet4(s);
  return BellDiagonal{x[0], x[1], x[2], x[3]};
}

// Rejection-sampled simplex point with a > 1/2.
inline BellDiagonal random_bell_diagonal_above_half(rng::Stream& s) {
  for (;;) {
    const auto x = rng::dirichlet4(s);
    if (x[0] > 0.5) return BellDiagonal{x[0], x[1], x[2], x[3]};
  }
}

}  // namespace qpa
