#pragma once

#include <chrono>
#include <filesystem>
#include <string>
#include <vector>

#include "tsgaudit/report.hpp"

namespace tsgaudit {

/// Hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);
std::string sha256_hex(std::string_view bytes);

/// Provenance record written next to every command's outputs. Everything
/// except `wall_clock` is a function of the inputs and flags.
class RunManifest {
 public:
  explicit RunManifest(std::string command);

  Json& config() { return config_; }
  void add_input(const std::filesystem::path& path);
  void add_output(const std::filesystem::path& path);
  void set(const std::string& key, Json value) { extra_[key] = std::move(value); }

  Json to_json() const;
  void write(const std::filesystem::path& path) const;

 private:
  std::string command_;
  Json config_ = Json::object();
  Json inputs_ = Json::array();
  Json outputs_ = Json::array();
  Json extra_ = Json::object();
  std::chrono::system_clock::time_point started_;
  std::chrono::steady_clock::time_point ticks_;
};

}  // namespace tsgaudit
