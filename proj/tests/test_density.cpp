#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "support.hpp"
#include "tsgaudit/density.hpp"

using namespace tsgaudit;

namespace {

std::vector<NormalizedMoment> uniform_triangle(std::size_t n, std::uint64_t seed, double lo = 0.0, double hi = 1.0) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<NormalizedMoment> out;
  while (out.size() < n) {
    const double a = u(gen), b = u(gen);
    if (a <= b) out.push_back({a, b});
  }
  return out;
}

std::vector<std::pair<double, double>> as_pairs(const std::vector<NormalizedMoment>& m) {
  std::vector<std::pair<double, double>> out;
  for (const auto& x : m) out.emplace_back(x.s, x.e);
  return out;
}

}  // namespace

TEST_CASE("fit rejects bad input") {
  CHECK_THROWS_AS(KdeModel::fit({}), ConfigError);
  const std::vector<NormalizedMoment> one = {{0.2, 0.8}};
  CHECK_THROWS_AS(BandwidthPolicy::explicit_bandwidth(0.0, 0.1), ConfigError);
  CHECK_THROWS_AS(BandwidthPolicy::explicit_bandwidth(0.1, -1.0), ConfigError);
  BandwidthPolicy sneaky{BandwidthPolicy::Kind::fixed, {0.0, 0.1}};
  CHECK_THROWS_AS(KdeModel::fit(one, sneaky), ConfigError);
  const std::vector<NormalizedMoment> invalid = {{0.8, 0.2}};
  CHECK_THROWS_AS(KdeModel::fit(invalid), ConfigError);
}

TEST_CASE("bandwidth policy parsing") {
  CHECK(BandwidthPolicy::parse("scott").kind == BandwidthPolicy::Kind::scott);
  CHECK(BandwidthPolicy::parse("silverman").kind == BandwidthPolicy::Kind::silverman);
  const auto p = BandwidthPolicy::parse("0.05,0.125");
  CHECK(p.kind == BandwidthPolicy::Kind::fixed);
  CHECK(p.fixed_value.s == 0.05);
  CHECK(p.fixed_value.e == 0.125);
  CHECK(BandwidthPolicy::parse(p.to_string()).fixed_value.e == 0.125);
  CHECK_THROWS_AS(BandwidthPolicy::parse("0.1"), ConfigError);
  CHECK_THROWS_AS(BandwidthPolicy::parse("0.1,x"), ConfigError);
  CHECK_THROWS_AS(BandwidthPolicy::parse("0,0.1"), ConfigError);
}

TEST_CASE("single point density peaks at its datum") {
  const std::vector<NormalizedMoment> one = {{0.2, 0.8}};
  const auto model = KdeModel::fit(one, BandwidthPolicy::explicit_bandwidth(0.1, 0.1));
  const double peak = model.density_at({0.2, 0.8});
  CHECK(peak == doctest::Approx(1.0 / (2 * std::numbers::pi * 0.01)).epsilon(1e-14));
  for (int R : {2, 7, 64}) {
    const auto grid = density_grid(model, R);
    for (double v : grid.values) CHECK(v <= peak);
  }
  const auto fine = density_grid(model, 100);
  const auto [i, j] = fine.argmax();
  CHECK(std::abs(fine.axis[i] - 0.2) <= 0.5 / 100 + 1e-12);
  CHECK(std::abs(fine.axis[j] - 0.8) <= 0.5 / 100 + 1e-12);
}

TEST_CASE("closed-form peak for a one-point model") {
  for (auto [hs, he] : {std::pair{0.1, 0.1}, std::pair{0.03, 0.2}, std::pair{1e-3, 1e-3}}) {
    const std::vector<NormalizedMoment> one = {{0.4, 0.6}};
    const auto model = KdeModel::fit(one, BandwidthPolicy::explicit_bandwidth(hs, he));
    CHECK(model.density_at({0.4, 0.6}) == doctest::Approx(1.0 / (2 * std::numbers::pi * hs * he)).epsilon(1e-14));
  }
}

TEST_CASE("two-point symmetry") {
  const std::vector<NormalizedMoment> two = {{0.1, 0.4}, {0.6, 0.9}};
  const auto model = KdeModel::fit(two, BandwidthPolicy::explicit_bandwidth(0.08, 0.08));
  CHECK(model.density_at({0.1, 0.4}) == doctest::Approx(model.density_at({0.6, 0.9})).epsilon(1e-15));

  // R = 2: centers at 0.25 / 0.75. (0.1, 0.4) is nearest cell (0, 0) and
  // (0.6, 0.9) nearest cell (1, 1).
  const auto grid = density_grid(model, 2);
  std::vector<double> sorted = grid.values;
  std::sort(sorted.rbegin(), sorted.rend());
  const double low_pair = std::min(grid.at(0, 0), grid.at(1, 1));
  CHECK(low_pair >= sorted[1]);
}

TEST_CASE("density agrees with the brute-force formula and is nonnegative") {
  const auto pts = uniform_triangle(300, 9);
  const auto model = KdeModel::fit(pts);
  const auto h = model.bandwidth();
  const auto pairs = as_pairs(pts);
  std::mt19937_64 gen(2);
  std::uniform_real_distribution<double> u(-0.5, 1.5);
  for (int q = 0; q < 200; ++q) {
    const NormalizedMoment x{u(gen), u(gen)};
    const double got = model.density_at(x);
    CHECK(got >= 0.0);
    CHECK(got == doctest::Approx(testing::brute_density(pairs, h.s, h.e, x.s, x.e)).epsilon(1e-12));
  }
}

TEST_CASE("far from every kernel the density vanishes") {
  const std::vector<NormalizedMoment> pts = {{0.1, 0.2}, {0.3, 0.35}};
  const auto model = KdeModel::fit(pts, BandwidthPolicy::explicit_bandwidth(0.01, 0.01));
  CHECK(model.density_at({0.9, 0.95}) < 1e-12);
  CHECK(model.density_at({1.0, 1.0}) < 1e-12);
}

TEST_CASE("permutation invariance and duplicate invariance") {
  auto pts = uniform_triangle(257, 4);
  const auto policy = BandwidthPolicy::explicit_bandwidth(0.06, 0.09);
  const auto base = KdeModel::fit(pts, policy);
  auto shuffled = pts;
  std::mt19937_64 gen(8);
  std::shuffle(shuffled.begin(), shuffled.end(), gen);
  const auto perm = KdeModel::fit(shuffled, policy);
  auto doubled = pts;
  doubled.insert(doubled.end(), pts.begin(), pts.end());
  const auto dup = KdeModel::fit(doubled, policy);
  for (const auto& q : uniform_triangle(100, 5)) {
    const double d = base.density_at(q);
    CHECK(std::abs(perm.density_at(q) - d) <= 1e-12 * std::max(1.0, d));
    CHECK(std::abs(dup.density_at(q) - d) <= 1e-12 * std::max(1.0, d));
  }
}

TEST_CASE("scott bandwidth") {
  SUBCASE("formula") {
    const auto pts = uniform_triangle(500, 1);
    const auto [sd_s, sd_e] = moment_stddev(pts);
    const auto h = scott_bandwidth(pts);
    CHECK(h.s == doctest::Approx(sd_s * std::pow(500.0, -1.0 / 6.0)));
    CHECK(h.e == doctest::Approx(sd_e * std::pow(500.0, -1.0 / 6.0)));
    // In two dimensions Silverman's factor is (4/4)^(1/6) = 1.
    CHECK(silverman_bandwidth(pts).s == doctest::Approx(h.s).epsilon(1e-14));
  }
  SUBCASE("shrinks with N at fixed spread") {
    // Same two-point pattern repeated: sample sd stays close, N grows.
    auto make = [](int reps) {
      std::vector<NormalizedMoment> pts;
      for (int r = 0; r < reps; ++r) {
        pts.push_back({0.2, 0.4});
        pts.push_back({0.4, 0.8});
      }
      return pts;
    };
    double prev = 1e9;
    for (int reps : {5, 50, 500, 5000}) {
      const auto h = scott_bandwidth(make(reps));
      CHECK(h.s < prev);
      prev = h.s;
    }
  }
  SUBCASE("floor guards degenerate dimensions") {
    std::vector<NormalizedMoment> pts = {{0.0, 0.2}, {0.0, 0.3}, {0.0, 0.5}};
    const auto h = scott_bandwidth(pts);
    CHECK(h.s == kBandwidthFloor);
    CHECK(h.e > kBandwidthFloor);
    const std::vector<NormalizedMoment> one = {{0.5, 0.5}};
    CHECK(KdeModel::fit(one).bandwidth().s == kBandwidthFloor);
  }
}

TEST_CASE("grid construction") {
  const std::vector<NormalizedMoment> pts = {{0.1, 0.3}, {0.2, 0.6}, {0.5, 0.55}};
  const auto model = KdeModel::fit(pts);
  CHECK_THROWS_AS(density_grid(model, 1), ConfigError);
  const auto grid = density_grid(model, 16);
  REQUIRE(grid.values.size() == 256);
  CHECK(grid.axis.front() == 0.5 / 16);
  for (int i = 0; i < 16; ++i)
    for (int j = 0; j < 16; ++j) CHECK(grid.at(i, j) == model.density_at({grid.axis[i], grid.axis[j]}));
  CHECK(density_grid(model, 16).values == grid.values);
}

TEST_CASE("grid argmax is stable under refinement") {
  // Fixed synthetic model: a dominant blob plus a weaker one.
  std::vector<NormalizedMoment> pts;
  std::mt19937_64 gen(21);
  std::normal_distribution<double> n(0.0, 0.04);
  for (int i = 0; i < 300; ++i) pts.push_back({std::clamp(0.2 + n(gen), 0.0, 0.5), std::clamp(0.6 + n(gen), 0.5, 1.0)});
  for (int i = 0; i < 80; ++i) pts.push_back({std::clamp(0.7 + n(gen), 0.5, 0.8), std::clamp(0.9 + n(gen), 0.8, 1.0)});
  const auto model = KdeModel::fit(pts);
  const auto coarse = density_grid(model, 64);
  const auto fine = density_grid(model, 128);
  const auto [ci, cj] = coarse.argmax();
  const auto [fi, fj] = fine.argmax();
  CHECK(std::abs(coarse.axis[ci] - fine.axis[fi]) <= 1.0 / 64);
  CHECK(std::abs(coarse.axis[cj] - fine.axis[fj]) <= 1.0 / 64);
}

TEST_CASE("grid mass matches the exact unit-square mass") {
  SUBCASE("uniform triangle: tails leak across s = 0 and e = 1") {
    const auto pts = uniform_triangle(1000, 17);
    const auto model = KdeModel::fit(pts);
    const double exact = testing::exact_unit_square_mass(as_pairs(pts), model.bandwidth().s, model.bandwidth().e);
    const double mass = density_grid(model, 256).mass();
    CHECK(mass == doctest::Approx(exact).epsilon(1e-3));
    // The leak through the two boundary edges is roughly 0.8 h each, ~0.12 in
    // total for this bandwidth.
    CHECK(mass > 0.85);
    CHECK(mass < 0.92);
  }
  SUBCASE("interior-concentrated data keeps nearly all of its mass") {
    const auto pts = uniform_triangle(1000, 17, 0.25, 0.75);
    const auto model = KdeModel::fit(pts);
    const double exact = testing::exact_unit_square_mass(as_pairs(pts), model.bandwidth().s, model.bandwidth().e);
    const double mass = density_grid(model, 256).mass();
    CHECK(mass == doctest::Approx(exact).epsilon(1e-4));
    CHECK(mass >= 0.95);
    CHECK(mass <= 1.0);
  }
}

TEST_CASE("sampling") {
  SUBCASE("vanishing bandwidth reproduces the datum") {
    const std::vector<NormalizedMoment> one = {{0.3, 0.6}};
    const auto model = KdeModel::fit(one, BandwidthPolicy::explicit_bandwidth(1e-9, 1e-9));
    for (const auto& m : sample_from(model, 4, 200)) {
      CHECK(std::abs(m.s - 0.3) < 1e-6);
      CHECK(std::abs(m.e - 0.6) < 1e-6);
    }
  }
  SUBCASE("outputs are valid even with absurd bandwidths") {
    const std::vector<NormalizedMoment> pts = {{0.0, 0.01}, {0.99, 1.0}, {0.5, 0.5}};
    for (double h : {0.01, 0.5, 10.0}) {
      const auto model = KdeModel::fit(pts, BandwidthPolicy::explicit_bandwidth(h, h));
      for (const auto& m : sample_from(model, 9, 2000)) {
        CHECK(0.0 <= m.s);
        CHECK(m.s <= m.e);
        CHECK(m.e <= 1.0);
      }
    }
  }
  SUBCASE("deterministic given the seed") {
    const auto model = KdeModel::fit(uniform_triangle(50, 3));
    const auto a = sample_from(model, 77, 100);
    const auto b = sample_from(model, 77, 100);
    const auto c = sample_from(model, 78, 100);
    CHECK(a == b);
    CHECK(a != c);
  }
  SUBCASE("sample means match the mixture mean") {
    // Interior support points with a small bandwidth, so rejection almost
    // never triggers and the mixture mean is the support mean.
    const auto pts = uniform_triangle(200, 12, 0.3, 0.7);
    const double h = 0.02;
    const auto model = KdeModel::fit(pts, BandwidthPolicy::explicit_bandwidth(h, h));
    double mean_s = 0.0, mean_e = 0.0, var_s = 0.0, var_e = 0.0;
    for (const auto& p : pts) {
      mean_s += p.s / pts.size();
      mean_e += p.e / pts.size();
    }
    for (const auto& p : pts) {
      var_s += (p.s - mean_s) * (p.s - mean_s) / pts.size();
      var_e += (p.e - mean_e) * (p.e - mean_e) / pts.size();
    }
    const std::size_t n = 10000;
    const auto draws = sample_from(model, 2024, n);
    double got_s = 0.0, got_e = 0.0;
    for (const auto& d : draws) {
      got_s += d.s / n;
      got_e += d.e / n;
    }
    CHECK(std::abs(got_s - mean_s) < 3.0 * std::sqrt((var_s + h * h) / n));
    CHECK(std::abs(got_e - mean_e) < 3.0 * std::sqrt((var_e + h * h) / n));
  }
}
