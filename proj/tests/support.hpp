#pragma once

// Helpers and independent oracles shared by the test binaries. Nothing here
// calls into the code paths it is used to check.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "tsgaudit/types.hpp"

namespace tsgaudit::testing {

inline Sample make_sample(std::string id, std::string video, double duration, double start, double end,
                          std::string query = "a person walks") {
  return {std::move(id), std::move(video), duration, start, end, std::move(query)};
}

/// Direct product-Gaussian KDE formula, written without the library.
inline double brute_density(const std::vector<std::pair<double, double>>& pts, double hs, double he, double xs,
                            double xe) {
  double acc = 0.0;
  for (const auto& [ps, pe] : pts) {
    const double gs = std::exp(-0.5 * ((xs - ps) / hs) * ((xs - ps) / hs)) / (std::sqrt(2 * std::numbers::pi) * hs);
    const double ge = std::exp(-0.5 * ((xe - pe) / he) * ((xe - pe) / he)) / (std::sqrt(2 * std::numbers::pi) * he);
    acc += gs * ge;
  }
  return acc / static_cast<double>(pts.size());
}

/// Exact mass of the product-Gaussian KDE inside [0,1]^2 via the normal CDF.
inline double exact_unit_square_mass(const std::vector<std::pair<double, double>>& pts, double hs, double he) {
  const auto cdf = [](double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); };
  double acc = 0.0;
  for (const auto& [ps, pe] : pts)
    acc += (cdf((1 - ps) / hs) - cdf(-ps / hs)) * (cdf((1 - pe) / he) - cdf(-pe / he));
  return acc / static_cast<double>(pts.size());
}

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    static int counter = 0;
    std::random_device rd;
    path = std::filesystem::temp_directory_path() /
           ("tsgaudit_test_" + std::to_string(rd()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  std::filesystem::path operator/(const std::string& name) const { return path / name; }
};

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

}  // namespace tsgaudit::testing
