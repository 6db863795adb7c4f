#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qpa/circuit.hpp"
#include "qpa/map.hpp"

namespace qpa {

// Self-check suites: the analytic recurrence against the gate-level
// circuit, threshold preservation, and fixed-point exactness plus basin
// convergence. The step function is injectable so a deliberately broken
// map can prove the harness catches defects; production callers use the
// plain overload below.

struct SuiteResult {
  std::string name;
  bool pass = false;
  double max_abs_deviation = 0.0;
  std::int64_t violations = 0;
  std::string note;
};

struct VerifyReport {
  std::uint64_t seed = 0;
  std::vector<SuiteResult> suites;

  bool all_pass() const {
    for (const auto& s : suites)
      if (!s.pass) return false;
    return true;
  }
};

inline constexpr double kOracleTol = 1e-12;
inline constexpr double kFixedPointTol = 1e-15;
inline constexpr double kBoundaryMargin = 1e-4;

template <typename StepFn>
VerifyReport run_verification_with(StepFn&& step, int oracle_samples, int scan_samples,
                                   std::uint64_t seed) {
  if (oracle_samples < 1 || scan_samples < 1)
    throw std::domain_error("run_verification: sample counts must be >= 1");
  VerifyReport rep;
  rep.seed = seed;
  const rng::Stream root(seed);

  {
    SuiteResult s;
    s.name = "oracle_equivalence";
    rng::Stream stream = root.child(0);
    for (int i = 0; i < oracle_samples; ++i) {
      const BellDiagonal w = random_bell_diagonal(stream);
      const StepOutcome analytic = step(w);
      const StepOutcome oracle = oracle_step_bell_diagonal(w);
      double dev = std::abs(analytic.success_prob - oracle.success_prob);
      for (int j = 0; j < 4; ++j)
        dev = std::max(dev, std::abs(analytic.state[j] - oracle.state[j]));
      s.max_abs_deviation = std::max(s.max_abs_deviation, dev);
      if (dev >= kOracleTol) ++s.violations;
    }
    s.pass = s.violations == 0;
    s.note = "analytic map vs gate-level circuit, " + std::to_string(oracle_samples) +
             " samples";
    rep.suites.push_back(std::move(s));
  }

  {
    SuiteResult s;
    s.name = "threshold_preservation";
    rng::Stream stream = root.child(1);
    double min_image = 1.0;
    for (int i = 0; i < scan_samples; ++i) {
      const BellDiagonal w = random_bell_diagonal_above_half(stream);
      const BellDiagonal out = step(w).state;
      min_image = std::min(min_image, out.a);
      if (!(out.a > 0.5)) ++s.violations;
    }
    s.max_abs_deviation = 0.5 - min_image;  // negative margin means safe
    s.pass = s.violations == 0;
    s.note = "smallest image fidelity " + std::to_string(min_image);
    rep.suites.push_back(std::move(s));
  }

  {
    SuiteResult s;
    s.name = "fixed_point_attraction";
    const auto residual = [&step](const BellDiagonal& w) {
      const BellDiagonal out = step(w).state;
      double m = 0.0;
      for (int i = 0; i < 4; ++i) m = std::max(m, std::abs(out[i] - w[i]));
      return m;
    };
    s.max_abs_deviation = std::max(residual({1.0, 0.0, 0.0, 0.0}),
                                   residual({0.25, 0.25, 0.25, 0.25}));

    rng::Stream stream = root.child(2);
    int max_iters_seen = 0;
    std::int64_t boundary_misses = 0;
    for (int i = 0; i < scan_samples; ++i) {
      BellDiagonal w = random_bell_diagonal_above_half(stream);
      const double margin = w.a - 0.5;
      int k = 0;
      while (k < 200 && 1.0 - w.a >= 1e-6) {
        w = step(w).state;
        ++k;
      }
      if (1.0 - w.a < 1e-6) {
        max_iters_seen = std::max(max_iters_seen, k);
      } else if (margin > kBoundaryMargin) {
        ++s.violations;
      } else {
        ++boundary_misses;
      }
    }
    s.pass = s.violations == 0 && s.max_abs_deviation <= kFixedPointTol;
    s.note = "max iterations " + std::to_string(max_iters_seen) + ", boundary misses " +
             std::to_string(boundary_misses);
    rep.suites.push_back(std::move(s));
  }

  return rep;
}

inline VerifyReport run_verification(int oracle_samples = 100, int scan_samples = 10000,
                                     std::uint64_t seed = 1) {
  return run_verification_with([](const BellDiagonal& w) { return step_identical(w); },
                               oracle_samples, scan_samples, seed);
}

}  // namespace qpa
