#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "tsgaudit/density.hpp"
#include "tsgaudit/kernels.hpp"

using namespace tsgaudit;
namespace k = tsgaudit::kernels;

namespace {

struct Case {
  std::vector<double> ps, pe, qs, qe;
};

Case random_case(std::size_t points, std::size_t queries, std::uint64_t seed, double lo = 0.0, double hi = 1.0) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  Case c;
  for (std::size_t i = 0; i < points; ++i) {
    c.ps.push_back(u(gen));
    c.pe.push_back(u(gen));
  }
  for (std::size_t i = 0; i < queries; ++i) {
    c.qs.push_back(u(gen));
    c.qe.push_back(u(gen));
  }
  return c;
}

std::vector<double> run(k::Isa isa, const Case& c, double scale_s, double scale_e) {
  std::vector<double> out(c.qs.size(), -1.0);
  k::resolve(isa)({c.ps, c.pe}, scale_s, scale_e, c.qs, c.qe, out);
  return out;
}

bool close(double a, double b, double rel) {
  return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b)) + 1e-300;
}

}  // namespace

TEST_CASE("isa names parse") {
  CHECK(k::parse_isa("scalar") == k::Isa::scalar);
  CHECK(k::parse_isa("avx2") == k::Isa::avx2);
  CHECK(k::parse_isa("auto") == k::detect_isa());
  CHECK_THROWS_AS(k::parse_isa("sse9"), std::invalid_argument);
  CHECK(k::to_string(k::Isa::avx2) == "avx2");
}

TEST_CASE("scalar kernel matches the direct formula") {
  const auto c = random_case(17, 9, 1);
  const double scale_s = 1.0 / (2 * 0.07 * 0.07), scale_e = 1.0 / (2 * 0.11 * 0.11);
  const auto got = run(k::Isa::scalar, c, scale_s, scale_e);
  for (std::size_t q = 0; q < c.qs.size(); ++q) {
    double want = 0.0;
    for (std::size_t i = 0; i < c.ps.size(); ++i)
      want += std::exp(-(c.qs[q] - c.ps[i]) * (c.qs[q] - c.ps[i]) * scale_s -
                       (c.qe[q] - c.pe[i]) * (c.qe[q] - c.pe[i]) * scale_e);
    CHECK(got[q] == doctest::Approx(want).epsilon(1e-14));
  }
}

TEST_CASE("empty point set sums to zero") {
  Case c;
  c.qs = {0.5};
  c.qe = {0.5};
  CHECK(run(k::Isa::scalar, c, 1.0, 1.0)[0] == 0.0);
  if (k::detect_isa() == k::Isa::avx2) CHECK(run(k::Isa::avx2, c, 1.0, 1.0)[0] == 0.0);
}

TEST_CASE("avx2 kernel is equivalent to the scalar reference") {
  if (k::detect_isa() != k::Isa::avx2) {
    MESSAGE("AVX2/FMA not available; skipping equivalence check");
    return;
  }
  SUBCASE("every tail length") {
    for (std::size_t n = 1; n <= 37; ++n) {
      const auto c = random_case(n, 11, 100 + n);
      const double scale = 1.0 / (2 * 0.05 * 0.05);
      const auto a = run(k::Isa::scalar, c, scale, scale);
      const auto b = run(k::Isa::avx2, c, scale, scale);
      for (std::size_t q = 0; q < a.size(); ++q) CHECK(close(a[q], b[q], 1e-13));
    }
  }
  SUBCASE("bandwidths from tiny to wide") {
    for (double h : {1e-3, 1e-2, 0.05, 0.3, 2.0, 50.0}) {
      const auto c = random_case(1003, 64, 7);
      const double scale = 1.0 / (2 * h * h);
      const auto a = run(k::Isa::scalar, c, scale, scale * 0.5);
      const auto b = run(k::Isa::avx2, c, scale, scale * 0.5);
      for (std::size_t q = 0; q < a.size(); ++q) CHECK(close(a[q], b[q], 1e-12));
    }
  }
  SUBCASE("arguments far below the exp underflow range") {
    Case c = random_case(9, 5, 3);
    for (auto& q : c.qs) q += 1e3;
    const auto b = run(k::Isa::avx2, c, 1e6, 1e6);
    for (double v : b) CHECK(v == 0.0);
  }
  SUBCASE("exact hits sum to the point count") {
    Case c;
    c.ps.assign(6, 0.25);
    c.pe.assign(6, 0.75);
    c.qs = {0.25};
    c.qe = {0.75};
    CHECK(run(k::Isa::avx2, c, 100.0, 100.0)[0] == 6.0);
    CHECK(run(k::Isa::scalar, c, 100.0, 100.0)[0] == 6.0);
  }
}

TEST_CASE("density evaluation does not depend on the thread count") {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<NormalizedMoment> pts;
  for (int i = 0; i < 777; ++i) {
    double a = u(gen), b = u(gen);
    pts.push_back({std::min(a, b), std::max(a, b)});
  }
  const auto model = KdeModel::fit(pts);
  const auto one = model.density_at(pts, 1);
  for (unsigned t : {2u, 3u, 8u}) CHECK(model.density_at(pts, t) == one);
}

TEST_CASE("forcing the scalar kernel is honoured") {
  const auto before = k::active_isa();
  k::set_active_isa(k::Isa::scalar);
  CHECK(k::active_isa() == k::Isa::scalar);
  k::set_active_isa(before);
  if (k::detect_isa() == k::Isa::scalar) CHECK_THROWS_AS(k::set_active_isa(k::Isa::avx2), std::invalid_argument);
}
