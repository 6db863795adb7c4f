// Acceptance gate: ten end-to-end criteria, one pass/fail line each.
// Exit code is the number of failed criteria.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "qpa/qpa.hpp"

namespace {

namespace fs = std::filesystem;
using clock_type = std::chrono::steady_clock;

// Pinned tolerances.
constexpr double kOracleTol = 1e-12;         // circuit vs analytic recurrence
constexpr double kResidualTol = 1e-15;       // fixed-point exactness
constexpr double kBoundaryMargin = 1e-4;     // allowed non-convergence band
constexpr double kSpotTol = 1e-6;            // tabulated-value spot checks
constexpr double kEntropyTol = 1e-6;         // frozen entropy value
constexpr double kFinalFidelityFloor = 0.999;
constexpr int kOracleSamples = 100;
constexpr int kPropertySamples = 10000;
constexpr double kOracleBudgetSec = 10.0;
constexpr double kPropertyBudgetSec = 5.0;
constexpr double kRoundBudgetSec = 60.0;

std::string cli_path;
fs::path work;

double seconds_since(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

struct RunResult {
  int code = -1;
  std::string out;
};

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

RunResult run_cli(const std::string& args) {
  const fs::path out = work / "stdout.txt";
  const std::string cmd =
      "\"" + cli_path + "\" " + args + " > " + out.string() + " 2> /dev/null";
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  return r;
}

// Rows of a CSV body (header skipped), split on commas.
std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream lines(text);
  std::string line;
  bool first = true;
  while (std::getline(lines, line)) {
    if (first) {
      first = false;
      continue;
    }
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::istringstream fs_(line);
    std::string field;
    while (std::getline(fs_, field, ',')) fields.push_back(field);
    rows.push_back(std::move(fields));
  }
  return rows;
}

int failures = 0;

void report(int number, bool pass, const std::string& what, const std::string& detail) {
  if (!pass) ++failures;
  std::cout << "criterion " << number << (pass ? " PASS " : " FAIL ") << what << " ("
            << detail << ")\n";
}

// 1: the gate-level circuit and the analytic recurrence agree to 1e-12.
void criterion_1() {
  const auto t0 = clock_type::now();
  qpa::rng::Stream s(1);
  double worst = 0.0;
  int compared = 0;
  for (int i = 0; i < kOracleSamples; ++i) {
    const qpa::BellDiagonal w = i % 2 == 0 ? qpa::random_bell_diagonal_above_half(s)
                                           : qpa::random_bell_diagonal(s);
    qpa::StepOutcome expect;
    try {
      expect = qpa::step_identical(w);
    } catch (const qpa::NumericError&) {
      continue;
    }
    const qpa::StepOutcome got = qpa::oracle_step_bell_diagonal(w);
    for (int k = 0; k < 4; ++k)
      worst = std::max(worst, std::abs(got.state[k] - expect.state[k]));
    worst = std::max(worst, std::abs(got.success_prob - expect.success_prob));
    ++compared;
  }
  const double dt = seconds_since(t0);
  char detail[160];
  std::snprintf(detail, sizeof detail, "%d samples, max deviation %.3g, %.2fs", compared,
                worst, dt);
  report(1, worst < kOracleTol && dt < kOracleBudgetSec && compared >= 90,
         "circuit matches recurrence", detail);
}

// 2: both algebraic fixed points are numerically exact.
void criterion_2() {
  const auto residual = [](const qpa::BellDiagonal& w) {
    const qpa::StepOutcome s = qpa::step_identical(w);
    double m = 0.0;
    for (int i = 0; i < 4; ++i) m = std::max(m, std::abs(s.state[i] - w[i]));
    return m;
  };
  const double unit = residual({1.0, 0.0, 0.0, 0.0});
  const double quarter = residual({0.25, 0.25, 0.25, 0.25});
  char detail[120];
  std::snprintf(detail, sizeof detail, "residuals %.3g and %.3g", unit, quarter);
  report(2, unit <= kResidualTol && quarter <= kResidualTol, "fixed points are exact",
         detail);
}

// 3: states above the half threshold stay above it.
void criterion_3() {
  const auto t0 = clock_type::now();
  qpa::rng::Stream s(3);
  int violations = 0;
  for (int i = 0; i < kPropertySamples; ++i) {
    const qpa::BellDiagonal w = qpa::random_bell_diagonal_above_half(s);
    if (!(qpa::step_identical(w).state.a > 0.5)) ++violations;
  }
  const double dt = seconds_since(t0);
  char detail[120];
  std::snprintf(detail, sizeof detail, "%d samples, %d violations, %.2fs",
                kPropertySamples, violations, dt);
  report(3, violations == 0 && dt < kPropertyBudgetSec, "threshold is preserved", detail);
}

// 4: random starts above threshold converge within the iteration cap; any
// stragglers sit within the allowed boundary margin.
void criterion_4() {
  const qpa::FixedPointScan scan = qpa::fixed_point_scan(kPropertySamples, 4);
  bool stragglers_ok = true;
  for (const auto& o : scan.outliers) stragglers_ok = stragglers_ok && o.boundary_margin <= kBoundaryMargin;
  char detail[200];
  std::snprintf(detail, sizeof detail,
                "%d/%d converged, worst %d iterations, %zu stragglers (margin <= %.0e)",
                scan.converged, scan.samples, scan.max_iterations_seen,
                scan.outliers.size(), kBoundaryMargin);
  report(4, stragglers_ok, "random starts converge", detail);
}

// 5: the fidelity sweep exits near unity and hits the known first-round value.
void criterion_5() {
  const RunResult r = run_cli("fig1");
  bool ok = r.code == 0;
  double min_final = 1.0;
  double spot = -1.0;
  int final_rows = 0;
  for (const auto& row : csv_rows(r.out)) {
    if (row.size() != 3) {
      ok = false;
      continue;
    }
    const double fid = std::strtod(row[2].c_str(), nullptr);
    if (row[1] == "15") {
      min_final = std::min(min_final, fid);
      ++final_rows;
    }
    if (row[0] == "0.75" && row[1] == "1") spot = fid;
  }
  ok = ok && final_rows == 9 && min_final >= kFinalFidelityFloor &&
       std::abs(spot - 41.0 / 52.0) < kSpotTol;
  char detail[160];
  std::snprintf(detail, sizeof detail, "min final fidelity %.6f, spot row %.12f", min_final,
                spot);
  report(5, ok, "fidelity sweep reaches the target", detail);
}

// 6: yields grow with initial fidelity; the perfect input keeps every pair
// it is arithmetically allowed to keep.
void criterion_6() {
  const RunResult r = run_cli("fig2");
  bool ok = r.code == 0;
  double prev = -1.0;
  bool monotone = true;
  double top_units = 0.0;
  for (const auto& row : csv_rows(r.out)) {
    if (row.size() != 3) {
      ok = false;
      continue;
    }
    const double units = std::strtod(row[2].c_str(), nullptr);
    monotone = monotone && units >= prev;
    prev = units;
    top_units = units;
  }
  const qpa::Yield flat = qpa::efficiency(qpa::werner(0.25), 10);
  const bool flat_exact = flat.units == 0.0009765625;  // 2^-10, bit for bit
  ok = ok && monotone && top_units == 1.0 && flat_exact;
  char detail[160];
  std::snprintf(detail, sizeof detail,
                "monotone=%s, units(F=1)=%g, units(F=1/4)=2^-10 exact=%s",
                monotone ? "yes" : "no", top_units, flat_exact ? "yes" : "no");
  report(6, ok, "yield accounting is consistent", detail);
}

// 7: a million-pair simulation tracks the analytic cascade within three
// binomial standard deviations, with every round inside the time budget.
void criterion_7() {
  const std::int64_t l = 1000000;
  const int rounds = 10;
  const qpa::BellDiagonal w0 = qpa::werner(0.75);

  double expected = static_cast<double>(l);
  {
    qpa::BellDiagonal w = w0;
    for (int k = 0; k < rounds; ++k) {
      const qpa::StepOutcome s = qpa::step_identical(w);
      expected *= s.success_prob / 2.0;
      w = s.state;
    }
  }

  qpa::Ensemble e = qpa::make_ensemble(w0, l);
  const qpa::rng::Stream root(7);
  double worst_round_sec = 0.0;
  for (int k = 0; k < rounds; ++k) {
    const auto t0 = clock_type::now();
    e = qpa::mc_round(std::move(e), root.child(static_cast<std::uint64_t>(k)));
    worst_round_sec = std::max(worst_round_sec, seconds_since(t0));
  }

  const double final_count = static_cast<double>(e.members.size());
  // Binomial-style bound; the odd-leftover carry adds at most one pair per round.
  const double sigma = std::sqrt(expected) + static_cast<double>(rounds);
  const bool within = std::abs(final_count - expected) <= 3.0 * sigma;
  char detail[200];
  std::snprintf(detail, sizeof detail,
                "final %d vs expected %.1f (3 sigma = %.1f), slowest round %.2fs",
                static_cast<int>(final_count), expected, 3.0 * sigma, worst_round_sec);
  report(7, within && worst_round_sec < kRoundBudgetSec, "simulation tracks the cascade",
         detail);
}

// 8: a successful round lowers the environment entropy, and the starting
// entropy for the 0.55 isotropic state matches the frozen value.
void criterion_8() {
  const qpa::EveStep base = qpa::eve_step_entropy(qpa::werner(0.55));
  bool ok = std::abs(base.entropy_before - 1.182514343614238) < kEntropyTol &&
            base.entropy_after < base.entropy_before;
  for (const double f : {0.6, 0.75, 0.9}) {
    const qpa::EveStep e = qpa::eve_step_entropy(qpa::werner(f));
    ok = ok && e.entropy_after < e.entropy_before;
  }
  char detail[160];
  std::snprintf(detail, sizeof detail, "entropy %.9f -> %.9f at F=0.55",
                base.entropy_before, base.entropy_after);
  report(8, ok, "environment entropy drops", detail);
}

// 9: there is a state the recurrence purifies although no measurement
// settings break the classical CHSH bound.
void criterion_9() {
  bool ok = false;
  double m = 0.0, chsh = 0.0;
  try {
    const qpa::BellDiagonal w = qpa::find_cond_no_chsh(1);
    m = w.max_component();
    chsh = qpa::chsh_max(qpa::bell_diagonal_to_density(w));
    ok = m > 0.5 && chsh <= 2.0 && qpa::iterate(w).converged;
  } catch (const std::exception&) {
    ok = false;
  }
  char detail[120];
  std::snprintf(detail, sizeof detail, "max weight %.4f, CHSH value %.6f", m, chsh);
  report(9, ok, "purifiable without CHSH violation", detail);
}

// 10: repeated seeded invocations produce byte-identical output.
void criterion_10() {
  const std::vector<std::string> cases = {
      "step --state 0.7,0.1,0.1,0.1",
      "fig1",
      "fig2",
      "verify --samples 25 --seed 1",
      "mc --state 1,0,0,0 --l 1024 --rounds 10 --seed 7",
      "witness",
  };
  int stable = 0;
  bool ok = true;
  for (const auto& c : cases) {
    const RunResult a = run_cli(c);
    const RunResult b = run_cli(c);
    const bool same = a.code == b.code && a.out == b.out && a.code == 0;
    ok = ok && same;
    stable += same ? 1 : 0;
  }
  char detail[120];
  std::snprintf(detail, sizeof detail, "%d/%zu invocations byte-identical", stable,
                cases.size());
  report(10, ok, "seeded output is reproducible", detail);
}

}  // namespace

int main(int argc, char** argv) {
  for (int i = 1; i + 1 < argc; ++i)
    if (std::string(argv[i]) == "--cli") cli_path = argv[i + 1];
  if (cli_path.empty()) {
    std::cerr << "usage: acceptance --cli <path-to-binary>\n";
    return 99;
  }
  work = fs::temp_directory_path() / "qpa_acceptance";
  fs::create_directories(work);

  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10();

  std::cout << (failures == 0 ? "all criteria satisfied\n"
                              : std::to_string(failures) + " criteria failed\n");
  return failures;
}
