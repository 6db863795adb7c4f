#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "qpa/map.hpp"
#include "qpa/rng.hpp"

namespace qpa {

// Finite-ensemble Monte Carlo: L pairs, uniform random pairing each round,
// sampled coincide/discard outcomes. Surviving pairs keep the expected
// post-selection state from step_mixed; distinct states are stored once in
// a palette and members reference them by id.

struct RoundStats {
  std::int64_t members_before = 0;
  std::int64_t couples = 0;  // pairings attempted
  std::int64_t successes = 0;
  std::int64_t survivors = 0;  // successes plus any carried-forward odd pair
  bool refused = false;        // fewer than two members, nothing happened
};

struct Ensemble {
  std::vector<BellDiagonal> palette;
  std::vector<std::uint32_t> members;  // palette id per surviving pair
  int rounds_done = 0;
  std::vector<RoundStats> history;
};

inline Ensemble make_ensemble(const BellDiagonal& w, std::int64_t count) {
  validate_bell_diagonal(w, "make_ensemble");
  if (count < 1) throw std::domain_error("make_ensemble: count must be >= 1");
  Ensemble e;
  e.palette.push_back(w);
  e.members.assign(static_cast<std::size_t>(count), 0);
  return e;
}

inline BellDiagonal average_density(const Ensemble& e) {
  if (e.members.empty()) throw std::domain_error("average_density: empty ensemble");
  // Tally exact occurrence counts per palette entry first; the float
  // accumulation then runs over the few distinct states instead of every
  // member, so its error does not grow with the ensemble size.
  std::vector<std::int64_t> count(e.palette.size(), 0);
  for (const std::uint32_t id : e.members) ++count[id];
  const double n = static_cast<double>(e.members.size());
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  for (std::size_t id = 0; id < count.size(); ++id) {
    if (count[id] == 0) continue;
    const double frac = static_cast<double>(count[id]) / n;
    for (int i = 0; i < 4; ++i) acc[i] += frac * e.palette[id][i];
  }
  const BellDiagonal w{acc[0], acc[1], acc[2], acc[3]};
  validate_bell_diagonal(w, "average_density");
  return w;
}

// One round: shuffle, pair neighbours, keep each couple's first pair with
// probability N from step_mixed. The shuffle uses the round stream's child 0;
// success draws are counter-indexed per couple from child 1, so results do
// not depend on processing order.
inline Ensemble mc_round(Ensemble e, const rng::Stream& round_stream) {
  RoundStats st;
  st.members_before = static_cast<std::int64_t>(e.members.size());
  if (e.members.size() < 2) {
    st.refused = true;
    st.survivors = st.members_before;
    e.history.push_back(st);
    return e;
  }

  rng::Stream shuffle_stream = round_stream.child(0);
  const rng::Stream success_stream = round_stream.child(1);

  auto& m = e.members;
  for (std::size_t i = m.size() - 1; i > 0; --i) {
    const std::size_t j = static_cast<std::size_t>(shuffle_stream.below(i + 1));
    std::swap(m[i], m[j]);
  }

  const std::size_t couples = m.size() / 2;
  const bool leftover = (m.size() % 2) != 0;
  const std::uint32_t leftover_id = leftover ? m.back() : 0;

  struct CoupleResult {
    std::uint32_t out_id;
    double success_prob;
  };
  std::map<std::pair<std::uint32_t, std::uint32_t>, CoupleResult> memo;

  std::vector<std::uint32_t> next;
  next.reserve(couples + 1);
  for (std::size_t i = 0; i < couples; ++i) {
    const std::uint32_t ida = m[2 * i];
    const std::uint32_t idb = m[2 * i + 1];
    const auto key = std::minmax(ida, idb);  // step_mixed is symmetric
    auto it = memo.find(key);
    if (it == memo.end()) {
      const StepOutcome out = step_mixed(e.palette[ida], e.palette[idb]);
      e.palette.push_back(out.state);
      const std::uint32_t out_id = static_cast<std::uint32_t>(e.palette.size() - 1);
      it = memo.emplace(key, CoupleResult{out_id, out.success_prob}).first;
    }
    if (success_stream.uniform_at(i) < it->second.success_prob) {
      next.push_back(it->second.out_id);
      ++st.successes;
    }
  }
  if (leftover) next.push_back(leftover_id);

  st.couples = static_cast<std::int64_t>(couples);
  st.survivors = static_cast<std::int64_t>(next.size());
  e.members = std::move(next);
  ++e.rounds_done;
  e.history.push_back(st);
  return e;
}

struct McRound {
  std::int64_t survivors = 0;
  std::int64_t couples = 0;
  std::int64_t successes = 0;
  double empirical_success_rate = 0.0;
  double analytic_success_prob = 0.0;
  BellDiagonal survivor_average;  // meaningful only when has_average
  bool has_average = false;
};

struct McReport {
  std::uint64_t seed = 0;
  std::int64_t initial_count = 0;
  int rounds_requested = 0;
  bool exhausted_early = false;
  std::vector<McRound> rounds;
  std::int64_t final_survivors = 0;
  double final_fraction = 0.0;
};

inline McReport mc_run(const BellDiagonal& w0, std::int64_t count, int rounds,
                       std::uint64_t seed) {
  validate_bell_diagonal(w0, "mc_run");
  if (count < 2) throw std::domain_error("mc_run: need at least two pairs");
  if (rounds < 1) throw std::domain_error("mc_run: rounds must be >= 1");

  // Analytic trajectory over the same number of rounds, for comparison.
  std::vector<double> analytic;
  analytic.reserve(rounds);
  {
    BellDiagonal w = w0;
    for (int k = 0; k < rounds; ++k) {
      const StepOutcome s = step_identical(w);
      analytic.push_back(s.success_prob);
      w = s.state;
    }
  }

  McReport rep;
  rep.seed = seed;
  rep.initial_count = count;
  rep.rounds_requested = rounds;

  Ensemble e = make_ensemble(w0, count);
  const rng::Stream root(seed);
  for (int k = 0; k < rounds; ++k) {
    if (e.members.size() < 2) {
      rep.exhausted_early = true;
      break;
    }
    e = mc_round(std::move(e), root.child(static_cast<std::uint64_t>(k)));
    const RoundStats& st = e.history.back();
    McRound r;
    r.survivors = st.survivors;
    r.couples = st.couples;
    r.successes = st.successes;
    r.empirical_success_rate =
        st.couples > 0 ? static_cast<double>(st.successes) / static_cast<double>(st.couples)
                       : 0.0;
    r.analytic_success_prob = analytic[static_cast<std::size_t>(k)];
    if (!e.members.empty()) {
      r.survivor_average = average_density(e);
      r.has_average = true;
    }
    rep.rounds.push_back(r);
  }

  rep.final_survivors = static_cast<std::int64_t>(e.members.size());
  rep.final_fraction =
      static_cast<double>(rep.final_survivors) / static_cast<double>(count);
  return rep;
}

}  // namespace qpa
