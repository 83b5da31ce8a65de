#include "refugia/manifest.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

namespace refugia {

std::uint64_t fnv1a_hash(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::uint64_t grid_checksum(const Grid& grid) {
  std::string bytes;
  bytes.reserve(grid.num_nodes() * 24);
  auto push = [&bytes](double v) {
    bytes.append(reinterpret_cast<const char*>(&v), sizeof v);
  };
  for (int i = 0; i < grid.num_nodes(); ++i) {
    push(grid.x[i]);
    if (grid.dim == 2) push(grid.y[i]);
    push(grid.weight[i]);
    bytes.push_back(grid.label[i] == Region::Omega0 ? '0' : '1');
  }
  return fnv1a_hash(bytes);
}

RunManifest::RunManifest(const RunConfig& cfg, const Grid& grid, std::string command)
    : config_hash_(fnv1a_hash(canonical_config(cfg))),
      grid_checksum_(grid_checksum(grid)),
      command_(std::move(command)),
      start_(std::chrono::steady_clock::now()) {}

void RunManifest::add_output(const std::string& path) { outputs_.push_back(path); }
void RunManifest::add_metric(const std::string& key, double value) { metrics_[key] = value; }
void RunManifest::add_note(const std::string& key, const std::string& value) {
  notes_[key] = value;
}

void RunManifest::write(const std::string& output_dir) const {
  namespace fs = std::filesystem;
  fs::create_directories(output_dir);
  nlohmann::json j;
  j["artifact_version"] = kArtifactVersion;
  j["command"] = command_;
  j["config_hash"] = hash_hex(config_hash_);
  j["grid_checksum"] = hash_hex(grid_checksum_);
  const auto elapsed = std::chrono::steady_clock::now() - start_;
  j["wall_time_s"] = std::chrono::duration<double>(elapsed).count();
  j["outputs"] = outputs_;
  j["metrics"] = metrics_;
  if (!notes_.empty()) j["notes"] = notes_;

  const fs::path final_path = fs::path(output_dir) / "manifest.json";
  const fs::path tmp_path = fs::path(output_dir) / "manifest.json.tmp";
  {
    std::ofstream out(tmp_path);
    if (!out) fail(Errc::validation_error, "cannot write " + tmp_path.string());
    out << j.dump(2) << "\n";
  }
  fs::rename(tmp_path, final_path);
}

std::string CsvWriter::format(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

CsvWriter::CsvWriter(const std::string& path, const std::string& manifest_hash,
                     const std::vector<std::string>& columns)
    : out_(path), columns_(columns.size()) {
  if (!out_) fail(Errc::validation_error, "cannot open " + path);
  out_ << "# refugia-csv v1 config=" << manifest_hash << "\n";
  for (size_t i = 0; i < columns.size(); ++i)
    out_ << columns[i] << (i + 1 == columns.size() ? "\n" : ",");
}

void CsvWriter::row(const std::vector<double>& values) {
  for (size_t i = 0; i < values.size(); ++i)
    out_ << format(values[i]) << (i + 1 == values.size() ? "\n" : ",");
}

void CsvWriter::row_mixed(const std::vector<std::string>& values) {
  for (size_t i = 0; i < values.size(); ++i)
    out_ << values[i] << (i + 1 == values.size() ? "\n" : ",");
}

}  // namespace refugia
