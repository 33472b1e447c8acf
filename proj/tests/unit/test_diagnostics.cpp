#include <doctest.h>

#include <random>

#include "mfrmab/diagnostics.hpp"
#include "mfrmab/errors.hpp"
#include "oracles.hpp"

using namespace mfrmab;

namespace {
GapBounds gaps(double eta, double omega) { return {omega, omega, eta, eta}; }
}  // namespace

TEST_CASE("t0 is the last episode with eta >= 1") {
  DiagnosticsTracker tr(2);
  std::vector<PairMask> v{kAllPairs, kAllPairs};
  const std::vector<double> eta{1.2, 1.0, 0.8, 1.0, 0.7, 0.6, 0.5, 0.5, 0.4, 0.4};
  for (double e : eta) {
    std::vector<GapBounds> g{gaps(e, 0.1), gaps(0.2, 0.3)};
    tr.record_episode(v, g);
  }
  const auto d = tr.snapshot();
  CHECK(d.t0_candidate == 4);
  CHECK(d.assumption_verified);
  CHECK(d.eta == doctest::Approx(0.7));
  CHECK(d.omega == doctest::Approx(0.3));
  CHECK(d.episodes == 10);
}

TEST_CASE("t0 defaults to one and can fail verification") {
  DiagnosticsTracker ok(1);
  std::vector<PairMask> v{kAllPairs};
  std::vector<GapBounds> low{gaps(0.5, 0.0)}, high{gaps(1.5, 0.0)};
  ok.record_episode(v, low);
  ok.record_episode(v, low);
  CHECK(ok.t0_candidate() == 1);
  CHECK(ok.snapshot().assumption_verified);

  DiagnosticsTracker bad(1);
  for (int i = 0; i < 3; ++i) bad.record_episode(v, low);
  for (int i = 0; i < 2; ++i) bad.record_episode(v, high);
  const auto d = bad.snapshot();
  CHECK(d.t0_candidate == 5);
  CHECK_FALSE(d.assumption_verified);
  CHECK(std::isnan(d.eta));

  DiagnosticsTracker late(1);
  for (int i = 0; i < 6; ++i) late.record_episode(v, high);
  for (int i = 0; i < 4; ++i) late.record_episode(v, low);
  CHECK_FALSE(late.snapshot().assumption_verified);  // t0 = 6 > T/2
}

TEST_CASE("G by hand") {
  DiagnosticsTracker tr(1);
  const std::vector<PairMask> masks{1, 2, 4, 8, 0, 0, 15, 1, 2, 4, 8};
  for (auto m : masks) {
    std::vector<PairMask> v{m};
    std::vector<GapBounds> g{gaps(0, 0)};
    tr.record_episode(v, g);
  }
  // window starting at 5 needs 5..7 (3); starting at 1 needs 1..4 (4);
  // starting at 8 needs 8..11 (4); start 2 needs 2..7 (6)
  CHECK(tr.g(0) == 6);
  CHECK(tr.g(0) == oracle::brute_force_g(masks));
}

TEST_CASE("G is infinite when a pair is never seen") {
  DiagnosticsTracker tr(2);
  for (int i = 0; i < 5; ++i) {
    std::vector<PairMask> v{kAllPairs, 7};
    std::vector<GapBounds> g{gaps(0, 0), gaps(0, 0)};
    tr.record_episode(v, g);
  }
  const auto d = tr.snapshot();
  CHECK(d.g_per_arm[0] == 1);
  CHECK(std::isinf(d.g_per_arm[1]));
  CHECK(std::isinf(d.g_max));
}

TEST_CASE("streaming G equals brute force on random masks") {
  std::mt19937_64 rng(5);
  std::bernoulli_distribution bit(0.3);
  for (int rep = 0; rep < 400; ++rep) {
    const int T = 1 + rep % 60;
    std::vector<std::vector<PairMask>> masks(3);
    DiagnosticsTracker tr(3);
    for (int t = 0; t < T; ++t) {
      std::vector<PairMask> v(3);
      for (int i = 0; i < 3; ++i) {
        PairMask m = 0;
        for (int b = 0; b < 4; ++b)
          if (bit(rng)) m |= static_cast<PairMask>(1 << b);
        v[static_cast<std::size_t>(i)] = m;
        masks[static_cast<std::size_t>(i)].push_back(m);
      }
      std::vector<GapBounds> g(3, gaps(0, 0));
      tr.record_episode(v, g);
    }
    for (int i = 0; i < 3; ++i) CHECK(tr.g(i) == oracle::brute_force_g(masks[static_cast<std::size_t>(i)]));
  }
}

TEST_CASE("tracker input checks") {
  CHECK_THROWS(DiagnosticsTracker(0));
  DiagnosticsTracker tr(2);
  std::vector<PairMask> v{kAllPairs};
  std::vector<GapBounds> g{gaps(0, 0)};
  CHECK_THROWS_AS(tr.record_episode(v, g), LengthMismatchError);
}
