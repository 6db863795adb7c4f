// Command-line front end: one purification round, fidelity/yield sweeps,
// self-verification, finite-ensemble Monte Carlo, eavesdropper entropy,
// noisy iteration, purifiability checks and a no-CHSH witness.
//
// Exit codes: 0 success, 2 validation, 3 I/O, 4 internal numeric failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "qpa/qpa.hpp"

namespace {

using json = nlohmann::ordered_json;

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

double parse_double(const std::string& text, const char* what) {
  double v = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  const auto res = std::from_chars(begin, end, v);
  if (res.ec != std::errc() || res.ptr != end || !std::isfinite(v))
    throw std::domain_error(std::string("invalid ") + what + ": '" + text + "'");
  return v;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = text.find(sep, start);
    if (pos == std::string::npos) {
      parts.push_back(text.substr(start));
      return parts;
    }
    parts.push_back(text.substr(start, pos - start));
    start = pos + 1;
  }
}

// Comma-separated Bell weights A,B,C,D. Deviations from unit sum up to 1e-9
// are renormalized (warning beyond 1e-12); larger ones are rejected.
qpa::BellDiagonal parse_state(const std::string& text) {
  const auto parts = split(text, ',');
  if (parts.size() != 4)
    throw std::domain_error("state must be four comma-separated weights A,B,C,D");
  qpa::BellDiagonal w{0, 0, 0, 0};
  for (int i = 0; i < 4; ++i) {
    w[i] = parse_double(parts[i], "state component");
    if (w[i] < 0.0) throw std::domain_error("state components must be nonnegative");
  }
  const double sum = w.sum();
  const double dev = std::abs(sum - 1.0);
  if (dev > 1e-9) {
    std::ostringstream msg;
    msg << "state weights sum to " << fmt(sum) << "; deviation exceeds 1e-9";
    throw std::domain_error(msg.str());
  }
  if (sum <= 0.0) throw std::domain_error("state weights must not all be zero");
  if (dev > 1e-12)
    std::cerr << "warning: state weights sum to " << fmt(sum) << "; renormalizing\n";
  for (int i = 0; i < 4; ++i) w[i] /= sum;
  return w;
}

// Inclusive grid lo:hi:step, clamped against accumulation overshoot.
std::vector<double> parse_grid(const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.size() != 3) throw std::domain_error("grid must be lo:hi:step");
  const double lo = parse_double(parts[0], "grid bound");
  const double hi = parse_double(parts[1], "grid bound");
  const double step = parse_double(parts[2], "grid step");
  if (!(step > 0.0)) throw std::domain_error("grid step must be positive");
  if (hi < lo) throw std::domain_error("grid upper bound below lower bound");
  const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  if (count > 100000) throw std::domain_error("grid has too many points");
  std::vector<double> values;
  values.reserve(count);
  for (std::size_t i = 0; i < count; ++i)
    values.push_back(std::min(lo + static_cast<double>(i) * step, hi));
  return values;
}

void write_output(const std::string& path, const std::string& content) {
  if (path == "-") {
    std::cout << content;
    std::cout.flush();
    return;
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open output file: " + path);
  f << content;
  f.close();
  if (!f) throw IoError("failed writing output file: " + path);
}

// Summary lines go to stdout when the table went to a file, stderr otherwise.
std::ostream& summary_stream(const std::string& out_path) {
  return out_path == "-" ? std::cerr : std::cout;
}

json state_json(const qpa::BellDiagonal& w) {
  return json{{"a", w.a}, {"b", w.b}, {"c", w.c}, {"d", w.d}};
}

std::string state_text(const qpa::BellDiagonal& w) {
  return "A=" + fmt(w.a) + " B=" + fmt(w.b) + " C=" + fmt(w.c) + " D=" + fmt(w.d);
}

int cmd_step(const std::string& state, const std::string& other, const std::string& format) {
  const qpa::BellDiagonal w = parse_state(state);
  const qpa::StepOutcome out =
      other.empty() ? qpa::step_identical(w) : qpa::step_mixed(w, parse_state(other));
  if (format == "json") {
    const json doc{{"state", state_json(out.state)}, {"success_prob", out.success_prob}};
    std::cout << doc.dump(2) << "\n";
  } else {
    std::cout << state_text(out.state) << " N=" << fmt(out.success_prob) << "\n";
  }
  return 0;
}

int cmd_fig1(const std::string& grid_text, int iters, const std::string& out,
             const std::string& format) {
  if (iters < 0) throw std::domain_error("iterations must be >= 0");
  const std::vector<double> grid = parse_grid(grid_text);
  for (const double f : grid)
    if (f <= 0.5)
      std::cerr << "warning: initial fidelity " << fmt(f)
                << " is at or below the 0.5 threshold; kept but flagged\n";
  const auto rows = qpa::fidelity_sweep(grid, iters);
  if (format == "json") {
    json jrows = json::array();
    for (const auto& r : rows)
      jrows.push_back(json{{"initial_fidelity", r.initial_fidelity},
                           {"iteration", r.iteration},
                           {"fidelity", r.fidelity},
                           {"below_threshold", r.below_threshold}});
    write_output(out, json{{"iterations", iters}, {"rows", jrows}}.dump(2) + "\n");
  } else {
    std::string csv = "initial_fidelity,iteration,fidelity\n";
    for (const auto& r : rows)
      csv += fmt(r.initial_fidelity) + "," + std::to_string(r.iteration) + "," +
             fmt(r.fidelity) + "\n";
    write_output(out, csv);
  }
  return 0;
}

int cmd_fig2(const std::string& grid_text, int rounds, const std::string& out,
             const std::string& format) {
  if (rounds < 0) throw std::domain_error("rounds must be >= 0");
  const auto rows = qpa::yield_sweep(parse_grid(grid_text), rounds);
  if (format == "json") {
    json jrows = json::array();
    for (const auto& r : rows)
      jrows.push_back(json{{"initial_fidelity", r.initial_fidelity},
                           {"yield_fraction", r.yield_fraction},
                           {"yield_units_2pow10", r.yield_units}});
    write_output(out, json{{"rounds", rounds}, {"rows", jrows}}.dump(2) + "\n");
  } else {
    std::string csv = "initial_fidelity,yield_fraction,yield_units_2pow10\n";
    for (const auto& r : rows)
      csv += fmt(r.initial_fidelity) + "," + fmt(r.yield_fraction) + "," +
             fmt(r.yield_units) + "\n";
    write_output(out, csv);
  }
  return 0;
}

int cmd_verify(int samples, std::uint64_t seed, const std::string& out) {
  const qpa::VerifyReport rep = qpa::run_verification(samples, 10000, seed);
  json suites = json::array();
  for (const auto& s : rep.suites)
    suites.push_back(json{{"name", s.name},
                          {"pass", s.pass},
                          {"max_abs_deviation", s.max_abs_deviation},
                          {"violations", s.violations},
                          {"note", s.note}});
  const json doc{{"seed", rep.seed}, {"all_pass", rep.all_pass()}, {"suites", suites}};
  write_output(out, doc.dump(2) + "\n");
  return rep.all_pass() ? 0 : 1;
}

int cmd_mc(const std::string& state, std::int64_t l, int rounds, std::uint64_t seed,
           const std::string& out, const std::string& format) {
  const qpa::McReport rep = qpa::mc_run(parse_state(state), l, rounds, seed);
  if (format == "json") {
    json jrounds = json::array();
    for (std::size_t k = 0; k < rep.rounds.size(); ++k) {
      const auto& r = rep.rounds[k];
      json row{{"round", k + 1},
               {"survivors", r.survivors},
               {"couples", r.couples},
               {"successes", r.successes},
               {"empirical_success_rate", r.empirical_success_rate},
               {"analytic_success_prob", r.analytic_success_prob}};
      row["survivor_average"] = r.has_average ? state_json(r.survivor_average) : json();
      jrounds.push_back(row);
    }
    const json doc{{"seed", rep.seed},
                   {"initial_count", rep.initial_count},
                   {"rounds_requested", rep.rounds_requested},
                   {"exhausted_early", rep.exhausted_early},
                   {"final_survivors", rep.final_survivors},
                   {"final_fraction", rep.final_fraction},
                   {"rounds", jrounds}};
    write_output(out, doc.dump(2) + "\n");
  } else {
    std::string csv = "round,survivors,couples,successes,empirical_success_rate,analytic_success_prob\n";
    for (std::size_t k = 0; k < rep.rounds.size(); ++k) {
      const auto& r = rep.rounds[k];
      csv += std::to_string(k + 1) + "," + std::to_string(r.survivors) + "," +
             std::to_string(r.couples) + "," + std::to_string(r.successes) + "," +
             fmt(r.empirical_success_rate) + "," + fmt(r.analytic_success_prob) + "\n";
    }
    write_output(out, csv);
  }
  summary_stream(out) << "final_survivors=" << rep.final_survivors
                      << " final_fraction=" << fmt(rep.final_fraction)
                      << " rounds_completed=" << rep.rounds.size()
                      << " exhausted_early=" << (rep.exhausted_early ? "true" : "false")
                      << "\n";
  return 0;
}

int cmd_eve(const std::string& state, bool bits, const std::string& format) {
  const qpa::EveStep e = qpa::eve_step_entropy(parse_state(state));
  const double scale = bits ? 1.0 / std::log(2.0) : 1.0;
  const char* units = bits ? "bits" : "nats";
  if (format == "json") {
    const json doc{{"entropy_before", e.entropy_before * scale},
                   {"entropy_after", e.entropy_after * scale},
                   {"success_prob", e.success_prob},
                   {"units", units}};
    std::cout << doc.dump(2) << "\n";
  } else {
    std::cout << "entropy_before=" << fmt(e.entropy_before * scale)
              << " entropy_after=" << fmt(e.entropy_after * scale)
              << " success_prob=" << fmt(e.success_prob) << " units=" << units << "\n";
  }
  return 0;
}

qpa::NoiseKind parse_kind(const std::string& name) {
  if (name == "depolarizing") return qpa::NoiseKind::depolarizing;
  if (name == "bit_flip") return qpa::NoiseKind::bit_flip;
  if (name == "phase_flip") return qpa::NoiseKind::phase_flip;
  throw std::domain_error("unknown noise kind: " + name);
}

qpa::NoisePlacement parse_placement(const std::string& name) {
  if (name == "before") return qpa::NoisePlacement::before_step;
  if (name == "after") return qpa::NoisePlacement::after_step;
  if (name == "both") return qpa::NoisePlacement::both;
  throw std::domain_error("unknown noise placement: " + name);
}

qpa::NoiseSides parse_sides(const std::string& name) {
  if (name == "alice") return qpa::NoiseSides::alice;
  if (name == "bob") return qpa::NoiseSides::bob;
  if (name == "both") return qpa::NoiseSides::both;
  throw std::domain_error("unknown noise sides: " + name);
}

int cmd_noise(const std::string& state, const std::string& kind, double strength,
              const std::string& placement, const std::string& sides, int rounds,
              const std::string& out, const std::string& format) {
  qpa::NoiseSpec spec;
  spec.kind = parse_kind(kind);
  spec.strength = strength;
  spec.placement = parse_placement(placement);
  spec.sides = parse_sides(sides);
  const qpa::NoisyRun run = qpa::noisy_iterate(parse_state(state), spec, rounds);
  if (format == "json") {
    json traj = json::array();
    for (std::size_t k = 0; k < run.trajectory.steps.size(); ++k)
      traj.push_back(json{{"round", k + 1},
                          {"fidelity", run.trajectory.steps[k].state.a},
                          {"success_prob", run.trajectory.steps[k].success_prob}});
    const json doc{{"kind", kind},
                   {"strength", strength},
                   {"placement", placement},
                   {"sides", sides},
                   {"rounds", rounds},
                   {"plateau_fidelity", run.plateau_fidelity},
                   {"purifying", run.purifying},
                   {"trajectory", traj}};
    write_output(out, doc.dump(2) + "\n");
  } else {
    std::string csv = "round,fidelity,success_prob\n";
    for (std::size_t k = 0; k < run.trajectory.steps.size(); ++k)
      csv += std::to_string(k + 1) + "," + fmt(run.trajectory.steps[k].state.a) + "," +
             fmt(run.trajectory.steps[k].success_prob) + "\n";
    write_output(out, csv);
  }
  summary_stream(out) << "plateau_fidelity=" << fmt(run.plateau_fidelity)
                      << " purifying=" << (run.purifying ? "true" : "false") << "\n";
  return 0;
}

int cmd_purifiable(const std::string& state, double band, const std::string& format) {
  const qpa::Purifiability p = qpa::is_purifiable(parse_state(state), band);
  if (format == "json")
    std::cout << json{{"purifiable", qpa::purifiability_name(p)}}.dump(2) << "\n";
  else
    std::cout << qpa::purifiability_name(p) << "\n";
  return 0;
}

int cmd_witness(std::uint64_t seed, const std::string& format) {
  const qpa::BellDiagonal w = qpa::find_cond_no_chsh(seed);
  const double chsh = qpa::chsh_max(qpa::bell_diagonal_to_density(w));
  if (format == "json") {
    const json doc{{"state", state_json(w)},
                   {"max_component", w.max_component()},
                   {"chsh_max", chsh},
                   {"purifiable", qpa::purifiability_name(qpa::is_purifiable(w))}};
    std::cout << doc.dump(2) << "\n";
  } else {
    std::cout << state_text(w) << " max_component=" << fmt(w.max_component())
              << " chsh_max=" << fmt(chsh)
              << " purifiable=" << qpa::purifiability_name(qpa::is_purifiable(w)) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"entanglement purification recurrence toolkit"};
  app.require_subcommand(1);

  auto* step = app.add_subcommand("step", "apply one purification round");
  std::string step_state, step_other, step_format = "text";
  step->add_option("--state", step_state, "Bell weights A,B,C,D")->required();
  step->add_option("--other", step_other, "second pair's weights (mixed-pair round)");
  step->add_option("--format", step_format, "text|json")
      ->check(CLI::IsMember({"text", "json"}));

  auto* fig1 = app.add_subcommand("fig1", "fidelity-vs-iteration sweep (CSV)");
  std::string fig1_grid = "0.55:0.95:0.05", fig1_out = "-", fig1_format = "csv";
  int fig1_iters = 15;
  fig1->add_option("--grid", fig1_grid, "initial fidelities lo:hi:step");
  fig1->add_option("--iters", fig1_iters, "iterations per grid point");
  fig1->add_option("--out", fig1_out, "output path ('-' for stdout)");
  fig1->add_option("--format", fig1_format, "csv|json")->check(CLI::IsMember({"csv", "json"}));

  auto* fig2 = app.add_subcommand("fig2", "yield-vs-initial-fidelity sweep (CSV)");
  std::string fig2_grid = "0.55:1.0:0.05", fig2_out = "-", fig2_format = "csv";
  int fig2_rounds = 10;
  fig2->add_option("--grid", fig2_grid, "initial fidelities lo:hi:step");
  fig2->add_option("--rounds", fig2_rounds, "purification rounds");
  fig2->add_option("--out", fig2_out, "output path ('-' for stdout)");
  fig2->add_option("--format", fig2_format, "csv|json")->check(CLI::IsMember({"csv", "json"}));

  auto* verify = app.add_subcommand("verify", "run the self-check suites (JSON report)");
  int verify_samples = 100;
  std::uint64_t verify_seed = 1;
  std::string verify_out = "-";
  verify->add_option("--samples", verify_samples, "circuit-equivalence sample count");
  verify->add_option("--seed", verify_seed, "RNG seed");
  verify->add_option("--out", verify_out, "output path ('-' for stdout)");

  auto* mc = app.add_subcommand("mc", "finite-ensemble Monte Carlo run");
  std::string mc_state, mc_out = "-", mc_format = "csv";
  std::int64_t mc_l = 1 << 20;
  int mc_rounds = 10;
  std::uint64_t mc_seed = 1;
  mc->add_option("--state", mc_state, "Bell weights A,B,C,D")->required();
  mc->add_option("--l", mc_l, "initial pair count");
  mc->add_option("--rounds", mc_rounds, "purification rounds");
  mc->add_option("--seed", mc_seed, "RNG seed");
  mc->add_option("--out", mc_out, "output path ('-' for stdout)");
  mc->add_option("--format", mc_format, "csv|json")->check(CLI::IsMember({"csv", "json"}));

  auto* eve = app.add_subcommand("eve", "eavesdropper entropy across one round");
  std::string eve_state, eve_format = "text";
  bool eve_bits = false;
  eve->add_option("--state", eve_state, "Bell weights A,B,C,D")->required();
  eve->add_flag("--bits", eve_bits, "report entropies in bits instead of nats");
  eve->add_option("--format", eve_format, "text|json")->check(CLI::IsMember({"text", "json"}));

  auto* noise = app.add_subcommand("noise", "iterate with a local noise channel");
  std::string noise_state, noise_kind = "depolarizing", noise_placement = "before";
  std::string noise_sides = "both", noise_out = "-", noise_format = "csv";
  double noise_p = 0.01;
  int noise_rounds = 50;
  noise->add_option("--state", noise_state, "Bell weights A,B,C,D")->required();
  noise->add_option("--kind", noise_kind, "depolarizing|bit_flip|phase_flip");
  noise->add_option("--p", noise_p, "noise strength in [0,1]");
  noise->add_option("--placement", noise_placement, "before|after|both");
  noise->add_option("--sides", noise_sides, "alice|bob|both");
  noise->add_option("--rounds", noise_rounds, "purification rounds");
  noise->add_option("--out", noise_out, "output path ('-' for stdout)");
  noise->add_option("--format", noise_format, "csv|json")->check(CLI::IsMember({"csv", "json"}));

  auto* purifiable = app.add_subcommand("purifiable", "threshold check for Bell weights");
  std::string pur_state, pur_format = "text";
  double pur_tol = 1e-9;
  purifiable->add_option("--state", pur_state, "Bell weights A,B,C,D")->required();
  purifiable->add_option("--tol", pur_tol, "half-width of the indeterminate band");
  purifiable->add_option("--format", pur_format, "text|json")
      ->check(CLI::IsMember({"text", "json"}));

  auto* witness = app.add_subcommand("witness", "purifiable state with no CHSH violation");
  std::uint64_t witness_seed = 1;
  std::string witness_format = "text";
  witness->add_option("--seed", witness_seed, "RNG seed for the fallback search");
  witness->add_option("--format", witness_format, "text|json")
      ->check(CLI::IsMember({"text", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*step) return cmd_step(step_state, step_other, step_format);
    if (*fig1) return cmd_fig1(fig1_grid, fig1_iters, fig1_out, fig1_format);
    if (*fig2) return cmd_fig2(fig2_grid, fig2_rounds, fig2_out, fig2_format);
    if (*verify) return cmd_verify(verify_samples, verify_seed, verify_out);
    if (*mc) return cmd_mc(mc_state, mc_l, mc_rounds, mc_seed, mc_out, mc_format);
    if (*eve) return cmd_eve(eve_state, eve_bits, eve_format);
    if (*noise)
      return cmd_noise(noise_state, noise_kind, noise_p, noise_placement, noise_sides,
                       noise_rounds, noise_out, noise_format);
    if (*purifiable) return cmd_purifiable(pur_state, pur_tol, pur_format);
    if (*witness) return cmd_witness(witness_seed, witness_format);
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const qpa::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << " (best value " << fmt(e.best_value)
              << ")\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
