#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "qpa/bell.hpp"

namespace qpa {

// One purification round: both sides rotate, both apply a CNOT between
// their halves of two shared pairs, the target pair is measured and kept
// only on coincident outcomes. These maps give the post-selected source
// pair weights and the coincidence probability.
struct StepOutcome {
  BellDiagonal state;
  double success_prob = 1.0;
};

inline StepOutcome step_identical(const BellDiagonal& w) {
  validate_bell_diagonal(w, "step_identical");
  const double n = (w.a + w.b) * (w.a + w.b) + (w.c + w.d) * (w.c + w.d);
  if (n < 0.5 - kTraceTol || n > 1.0 + kTraceTol)
    throw NumericError("step_identical: coincidence probability out of range", n);
  const BellDiagonal out{
      (w.a * w.a + w.b * w.b) / n,
      2.0 * w.c * w.d / n,
      (w.c * w.c + w.d * w.d) / n,
      2.0 * w.a * w.b / n,
  };
  validate_bell_diagonal(out, "step_identical");
  return {out, n};
}

// Same round applied to two different Bell-diagonal pairs; symmetric in
// its arguments. The surviving pair carries the combined weights.
inline StepOutcome step_mixed(const BellDiagonal& w, const BellDiagonal& v) {
  validate_bell_diagonal(w, "step_mixed");
  validate_bell_diagonal(v, "step_mixed");
  const double n = (w.a + w.b) * (v.a + v.b) + (w.c + w.d) * (v.c + v.d);
  if (n < 1e-15)
    throw NumericError("step_mixed: post-selection impossible", n);
  const BellDiagonal out{
      (w.a * v.a + w.b * v.b) / n,
      (w.c * v.d + w.d * v.c) / n,
      (w.c * v.c + w.d * v.d) / n,
      (w.a * v.b + w.b * v.a) / n,
  };
  validate_bell_diagonal(out, "step_mixed");
  return {out, n};
}

struct Trajectory {
  BellDiagonal initial;
  std::vector<StepOutcome> steps;  // one entry per applied round
  bool converged = false;

  int iterations_used() const { return static_cast<int>(steps.size()); }
  const BellDiagonal& final_state() const {
    return steps.empty() ? initial : steps.back().state;
  }
  double final_fidelity() const { return final_state().a; }
};

// Repeated rounds until the phi+ weight is within fid_tol of 1 or the
// iteration cap is hit. A converged input reports zero iterations.
inline Trajectory iterate(const BellDiagonal& w0, int max_iters = 200,
                          double fid_tol = 1e-6) {
  validate_bell_diagonal(w0, "iterate");
  if (max_iters < 0) throw std::domain_error("iterate: max_iters must be >= 0");
  if (!(fid_tol > 0.0)) throw std::domain_error("iterate: fid_tol must be positive");
  Trajectory tr;
  tr.initial = w0;
  BellDiagonal w = w0;
  for (int k = 0; k < max_iters; ++k) {
    if (1.0 - w.a < fid_tol) {
      tr.converged = true;
      return tr;
    }
    const StepOutcome s = step_identical(w);
    w = s.state;
    tr.steps.push_back(s);
  }
  tr.converged = (1.0 - w.a < fid_tol);
  return tr;
}

enum class BellSlot { phi_plus = 0, psi_minus = 1, psi_plus = 2, phi_minus = 3 };

inline const char* slot_name(BellSlot s) {
  switch (s) {
    case BellSlot::phi_plus: return "phi+";
    case BellSlot::psi_minus: return "psi-";
    case BellSlot::psi_plus: return "psi+";
    case BellSlot::phi_minus: return "phi-";
  }
  throw std::domain_error("slot_name: unknown slot");
}

// Result of rotating the largest Bell weight into the phi+ slot with a
// one-sided Pauli. promoted records which slot was moved (phi_plus means
// the state was left alone).
struct CanonicalForm {
  BellDiagonal state;
  BellSlot promoted = BellSlot::phi_plus;
};

inline CanonicalForm canonicalize(const BellDiagonal& w) {
  validate_bell_diagonal(w, "canonicalize");
  switch (w.max_index()) {
    case 0: return {w, BellSlot::phi_plus};
    case 1: return {{w.b, w.a, w.d, w.c}, BellSlot::psi_minus};   // sigma_y x 1
    case 2: return {{w.c, w.d, w.a, w.b}, BellSlot::psi_plus};    // sigma_x x 1
    default: return {{w.d, w.c, w.b, w.a}, BellSlot::phi_minus};  // sigma_z x 1
  }
}

enum class Purifiability { purifiable, not_purifiable, indeterminate };

inline constexpr double kPurifiabilityBand = 1e-9;

inline const char* purifiability_name(Purifiability p) {
  switch (p) {
    case Purifiability::purifiable: return "true";
    case Purifiability::not_purifiable: return "false";
    case Purifiability::indeterminate: return "indeterminate";
  }
  throw std::domain_error("purifiability_name: unknown value");
}

// A Bell-diagonal state feeds the recurrence iff some local rotation puts
// more than half its weight on one Bell state.
inline Purifiability is_purifiable(const BellDiagonal& w,
                                   double band = kPurifiabilityBand) {
  validate_bell_diagonal(w, "is_purifiable");
  if (!(band >= 0.0)) throw std::domain_error("is_purifiable: band must be nonnegative");
  const double m = w.max_component();
  if (std::abs(m - 0.5) < band) return Purifiability::indeterminate;
  return m > 0.5 ? Purifiability::purifiable : Purifiability::not_purifiable;
}

// General two-qubit version: the criterion is a fully entangled fraction
// above 1/2.
inline Purifiability is_purifiable(const Matrix& rho, double tol = 1e-6) {
  const double f = fully_entangled_fraction(rho, tol);
  if (std::abs(f - 0.5) < kPurifiabilityBand) return Purifiability::indeterminate;
  return f > 0.5 ? Purifiability::purifiable : Purifiability::not_purifiable;
}

// Surviving-pair accounting for a fixed number of rounds. Each round
// consumes half the pairs and keeps a coincident fraction N_k of those:
//   fraction = prod N_k / 2   (pairs out per pair in)
//   units    = prod N_k       (fraction in units of 2^-rounds)
struct Yield {
  double fraction = 1.0;
  double units = 1.0;
  std::vector<double> success_probs;
};

inline Yield efficiency(const BellDiagonal& w0, int rounds) {
  validate_bell_diagonal(w0, "efficiency");
  if (rounds < 0) throw std::domain_error("efficiency: rounds must be >= 0");
  Yield y;
  y.success_probs.reserve(rounds);
  BellDiagonal w = w0;
  for (int k = 0; k < rounds; ++k) {
    const StepOutcome s = step_identical(w);
    y.fraction *= s.success_prob / 2.0;
    y.units *= s.success_prob;
    y.success_probs.push_back(s.success_prob);
    w = s.state;
  }
  return y;
}

// Fidelity-vs-round table for isotropic inputs, one block per grid value.
// Grid entries at or below the purification threshold are computed anyway
// and flagged.
struct FidelitySweepRow {
  double initial_fidelity = 0.0;
  int iteration = 0;
  double fidelity = 0.0;
  bool below_threshold = false;
};

inline std::vector<FidelitySweepRow> fidelity_sweep(const std::vector<double>& grid,
                                                    int iterations) {
  if (iterations < 0) throw std::domain_error("fidelity_sweep: iterations must be >= 0");
  std::vector<FidelitySweepRow> rows;
  rows.reserve(grid.size() * (iterations + 1));
  for (const double f : grid) {
    const bool flagged = f <= 0.5;
    BellDiagonal w = werner(f);
    rows.push_back({f, 0, w.a, flagged});
    for (int k = 1; k <= iterations; ++k) {
      w = step_identical(w).state;
      rows.push_back({f, k, w.a, flagged});
    }
  }
  return rows;
}

// Yield-vs-initial-fidelity table for isotropic inputs.
struct YieldSweepRow {
  double initial_fidelity = 0.0;
  double yield_fraction = 0.0;
  double yield_units = 0.0;
};

inline std::vector<YieldSweepRow> yield_sweep(const std::vector<double>& grid,
                                              int rounds) {
  std::vector<YieldSweepRow> rows;
  rows.reserve(grid.size());
  for (const double f : grid) {
    const Yield y = efficiency(werner(f), rounds);
    rows.push_back({f, y.fraction, y.units});
  }
  return rows;
}

// Random-start convergence audit plus exactness residuals at the two
// algebraic fixed points (1,0,0,0) and (1/4,1/4,1/4,1/4).
struct ScanOutlier {
  BellDiagonal initial;
  double final_fidelity = 0.0;
  int iterations = 0;
  double boundary_margin = 0.0;  // initial phi+ weight minus 1/2
};

struct FixedPointScan {
  int samples = 0;
  std::uint64_t seed = 0;
  int converged = 0;
  int max_iterations_seen = 0;
  double unit_residual = 0.0;
  double quarter_residual = 0.0;
  std::vector<ScanOutlier> outliers;
};

inline FixedPointScan fixed_point_scan(int samples, std::uint64_t seed,
                                       int max_iters = 200, double fid_tol = 1e-6) {
  if (samples < 0) throw std::domain_error("fixed_point_scan: samples must be >= 0");
  const auto residual = [](const BellDiagonal& w) {
    const StepOutcome s = step_identical(w);
    double m = 0.0;
    for (int i = 0; i < 4; ++i) m = std::max(m, std::abs(s.state[i] - w[i]));
    return m;
  };
  FixedPointScan r;
  r.samples = samples;
  r.seed = seed;
  r.unit_residual = residual({1.0, 0.0, 0.0, 0.0});
  r.quarter_residual = residual({0.25, 0.25, 0.25, 0.25});
  rng::Stream s(seed);
  for (int i = 0; i < samples; ++i) {
    const BellDiagonal w = random_bell_diagonal_above_half(s);
    const Trajectory tr = iterate(w, max_iters, fid_tol);
    if (tr.converged) {
      ++r.converged;
      r.max_iterations_seen = std::max(r.max_iterations_seen, tr.iterations_used());
    } else {
      r.outliers.push_back({w, tr.final_fidelity(), tr.iterations_used(), w.a - 0.5});
    }
  }
  return r;
}

// A state the recurrence can purify even though no measurement settings
// violate the CHSH bound. The isotropic state at fidelity 0.55 qualifies;
// the seeded search is a fallback.
inline BellDiagonal find_cond_no_chsh(std::uint64_t seed) {
  const auto admissible = [](const BellDiagonal& w) {
    if (!(w.max_component() > 0.5 + kPurifiabilityBand)) return false;
    return chsh_max(bell_diagonal_to_density(w)) <= 2.0;
  };
  const BellDiagonal isotropic = werner(0.55);
  if (admissible(isotropic)) return isotropic;
  rng::Stream s(seed);
  for (int i = 0; i < 200000; ++i) {
    const BellDiagonal w = canonicalize(random_bell_diagonal(s)).state;
    if (admissible(w)) return w;
  }
  throw NumericError("find_cond_no_chsh: no admissible state found", 0.0);
}

}  // namespace qpa
