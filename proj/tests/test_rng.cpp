#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <set>
#include <vector>

#include "qpa/rng.hpp"

using qpa::rng::Stream;

TEST_CASE("draws are a pure function of seed and counter") {
  Stream a(42);
  std::vector<std::uint64_t> walked;
  for (int i = 0; i < 16; ++i) walked.push_back(a.next_word());

  const Stream b(42);
  for (int i = 0; i < 16; ++i) CHECK(b.word_at(i) == walked[static_cast<std::size_t>(i)]);

  // Stateless access never disturbs stateful position.
  Stream c(42);
  (void)c.word_at(1000);
  CHECK(c.next_word() == walked[0]);
}

TEST_CASE("distinct seeds and distinct children give distinct sequences") {
  const Stream a(1), b(2);
  CHECK(a.word_at(0) != b.word_at(0));

  const Stream parent(7);
  const Stream c0 = parent.child(0);
  const Stream c1 = parent.child(1);
  CHECK(c0.word_at(0) != c1.word_at(0));
  CHECK(c0.word_at(0) != parent.word_at(0));

  // Derivation is deterministic and side-effect free.
  CHECK(parent.child(0).word_at(3) == c0.word_at(3));

  // No collisions among a family of children's first words.
  std::set<std::uint64_t> firsts;
  for (std::uint64_t i = 0; i < 1000; ++i) firsts.insert(parent.child(i).word_at(0));
  CHECK(firsts.size() == 1000);
}

TEST_CASE("uniform stays in [0,1) with a flat mean") {
  Stream s(123);
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double u = s.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(std::abs(sum / n - 0.5) < 0.005);
}

TEST_CASE("below(bound) covers the full range uniformly") {
  Stream s(9);
  std::array<int, 8> counts{};
  const int n = 80000;
  for (int i = 0; i < n; ++i) {
    const std::uint64_t v = s.below(8);
    REQUIRE(v < 8);
    ++counts[v];
  }
  for (const int c : counts) CHECK(std::abs(c - n / 8) < 500);

  Stream t(10);
  for (int i = 0; i < 100; ++i) CHECK(t.below(1) == 0);
}

TEST_CASE("dirichlet4 samples the simplex") {
  Stream s(2024);
  std::array<double, 4> mean{};
  const int n = 40000;
  for (int i = 0; i < n; ++i) {
    const auto x = qpa::rng::dirichlet4(s);
    double total = 0.0;
    for (int k = 0; k < 4; ++k) {
      REQUIRE(x[static_cast<std::size_t>(k)] >= 0.0);
      total += x[static_cast<std::size_t>(k)];
      mean[static_cast<std::size_t>(k)] += x[static_cast<std::size_t>(k)];
    }
    REQUIRE(std::abs(total - 1.0) < 1e-12);
  }
  // Component means of a flat Dirichlet are 1/4 each.
  for (int k = 0; k < 4; ++k)
    CHECK(std::abs(mean[static_cast<std::size_t>(k)] / n - 0.25) < 0.005);
}
