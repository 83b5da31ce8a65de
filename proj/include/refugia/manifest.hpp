#pragma once

#include <chrono>
#include <cstdint>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "refugia/config.hpp"

namespace refugia {

inline constexpr const char* kArtifactVersion = "0.1.0";

std::uint64_t fnv1a_hash(const std::string& bytes);
std::string hash_hex(std::uint64_t h);

std::uint64_t grid_checksum(const Grid& grid);

/// One manifest per run: config hash, grid checksum, wall time and a summary
/// metric block, plus the list of every artifact the run produced. Written
/// atomically (temp file + rename) at the end of the run.
class RunManifest {
public:
  RunManifest(const RunConfig& cfg, const Grid& grid, std::string command);

  void add_output(const std::string& path);
  void add_metric(const std::string& key, double value);
  void add_note(const std::string& key, const std::string& value);
  std::string config_hash_hex() const { return hash_hex(config_hash_); }

  /// Finalizes wall time and writes <output_dir>/manifest.json atomically.
  void write(const std::string& output_dir) const;

private:
  std::uint64_t config_hash_;
  std::uint64_t grid_checksum_;
  std::string command_;
  std::vector<std::string> outputs_;
  std::map<std::string, double> metrics_;
  std::map<std::string, std::string> notes_;
  std::chrono::steady_clock::time_point start_;
};

/// Deterministic CSV writer: `%.12g` number formatting, one comment line
/// carrying the schema version and the manifest hash.
class CsvWriter {
public:
  CsvWriter(const std::string& path, const std::string& manifest_hash,
            const std::vector<std::string>& columns);
  void row(const std::vector<double>& values);
  void row_mixed(const std::vector<std::string>& values);
  static std::string format(double v);

private:
  std::ofstream out_;
  size_t columns_;
};

}  // namespace refugia
