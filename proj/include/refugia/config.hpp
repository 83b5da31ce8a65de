#pragma once

#include <cstdint>
#include <string>

#include "refugia/continuation.hpp"
#include "refugia/evolution.hpp"

namespace refugia {

struct MultistartConfig {
  int count = 50;
};

struct RunConfig {
  DomainSpec domain;
  ModelParams model;
  NewtonConfig newton;
  ContinuationConfig continuation;
  EvolutionConfig evolution;
  MultistartConfig multistart;
  std::uint64_t seed = 1;
  std::string output_dir = "out";
};

/// Parses and validates a JSON run configuration. Unknown keys are rejected;
/// the first violated invariant is reported with its location.
RunConfig parse_config(const std::string& path);
RunConfig parse_config_text(const std::string& text, const std::string& origin = "<inline>");

/// Canonical serialization used for hashing and manifests.
std::string canonical_config(const RunConfig& cfg);

}  // namespace refugia
