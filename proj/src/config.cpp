#include "refugia/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace refugia {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& allowed,
                    const std::string& where) {
  for (const auto& [key, _] : obj.items())
    if (!allowed.count(key))
      fail(Errc::validation_error, "unknown key '" + key + "' in " + where);
}

double num(const json& obj, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number())
    fail(Errc::validation_error, std::string("'") + key + "' must be a number");
  return obj[key].get<double>();
}

int integer(const json& obj, const char* key, int fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number_integer())
    fail(Errc::validation_error, std::string("'") + key + "' must be an integer");
  return obj[key].get<int>();
}

DomainSpec parse_domain(const json& d) {
  if (!d.contains("kind")) fail(Errc::validation_error, "domain.kind is required");
  const std::string kind = d["kind"].get<std::string>();
  if (kind == "ring1d") {
    reject_unknown(d, {"kind", "circumference", "refuge_start", "refuge_length", "resolution"},
                   "domain");
    RingSpec r;
    r.circumference = num(d, "circumference", r.circumference);
    r.refuge_start = num(d, "refuge_start", r.refuge_start);
    r.refuge_length = num(d, "refuge_length", r.refuge_length);
    r.resolution = integer(d, "resolution", r.resolution);
    return r;
  }
  if (kind == "rect2d_with_hole") {
    reject_unknown(d, {"kind", "outer_min", "outer_max", "hole_min", "hole_max", "resolution"},
                   "domain");
    RectSpec r;
    auto arr2 = [&](const char* key, std::array<double, 2> fallback) {
      if (!d.contains(key)) return fallback;
      const auto& a = d[key];
      if (!a.is_array() || a.size() != 2)
        fail(Errc::validation_error, std::string("'") + key + "' must be a 2-array");
      return std::array<double, 2>{a[0].get<double>(), a[1].get<double>()};
    };
    r.outer_min = arr2("outer_min", r.outer_min);
    r.outer_max = arr2("outer_max", r.outer_max);
    r.hole_min = arr2("hole_min", r.hole_min);
    r.hole_max = arr2("hole_max", r.hole_max);
    if (d.contains("resolution")) {
      const auto& a = d["resolution"];
      if (!a.is_array() || a.size() != 2)
        fail(Errc::validation_error, "rect resolution must be a 2-array");
      r.resolution = {a[0].get<int>(), a[1].get<int>()};
    }
    return r;
  }
  fail(Errc::validation_error, "domain.kind must be ring1d or rect2d_with_hole");
}

}  // namespace

RunConfig parse_config_text(const std::string& text, const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(Errc::parse_error, origin + ": " + e.what());
  }
  reject_unknown(j, {"domain", "model", "newton", "continuation", "evolution", "multistart",
                     "seed", "output_dir"},
                 "config root");

  RunConfig cfg;
  if (j.contains("domain")) cfg.domain = parse_domain(j["domain"]);
  if (j.contains("model")) {
    const auto& m = j["model"];
    reject_unknown(m, {"lambda", "mu", "b", "c", "alpha"}, "model");
    cfg.model.lambda = num(m, "lambda", cfg.model.lambda);
    cfg.model.mu = num(m, "mu", cfg.model.mu);
    cfg.model.b = num(m, "b", cfg.model.b);
    cfg.model.c = num(m, "c", cfg.model.c);
    cfg.model.alpha = num(m, "alpha", cfg.model.alpha);
    cfg.model.validate();
  }
  if (j.contains("newton")) {
    const auto& n = j["newton"];
    reject_unknown(n, {"tol", "max_iter", "max_backtracks"}, "newton");
    cfg.newton.tol = num(n, "tol", cfg.newton.tol);
    cfg.newton.max_iter = integer(n, "max_iter", cfg.newton.max_iter);
    cfg.newton.max_backtracks = integer(n, "max_backtracks", cfg.newton.max_backtracks);
    if (!(cfg.newton.tol > 0.0)) fail(Errc::validation_error, "newton.tol must be positive");
  }
  if (j.contains("continuation")) {
    const auto& c = j["continuation"];
    reject_unknown(c, {"ds", "ds_min", "ds_max", "max_steps", "lambda_min", "lambda_max",
                       "seed_s"},
                   "continuation");
    cfg.continuation.ds = num(c, "ds", cfg.continuation.ds);
    cfg.continuation.ds_min = num(c, "ds_min", cfg.continuation.ds_min);
    cfg.continuation.ds_max = num(c, "ds_max", cfg.continuation.ds_max);
    cfg.continuation.max_steps = integer(c, "max_steps", cfg.continuation.max_steps);
    cfg.continuation.lambda_min = num(c, "lambda_min", cfg.continuation.lambda_min);
    cfg.continuation.lambda_max = num(c, "lambda_max", cfg.continuation.lambda_max);
    cfg.continuation.seed_s = num(c, "seed_s", cfg.continuation.seed_s);
    if (!(cfg.continuation.ds > 0.0))
      fail(Errc::validation_error, "continuation.ds must be positive");
  }
  if (j.contains("evolution")) {
    const auto& e = j["evolution"];
    reject_unknown(e, {"dt", "dt_min", "dt_max", "T", "steady_tol", "cutoff_delta",
                       "snapshot_every", "blowup_ceiling"},
                   "evolution");
    cfg.evolution.dt = num(e, "dt", cfg.evolution.dt);
    cfg.evolution.dt_min = num(e, "dt_min", cfg.evolution.dt_min);
    cfg.evolution.dt_max = num(e, "dt_max", cfg.evolution.dt_max);
    cfg.evolution.t_final = num(e, "T", cfg.evolution.t_final);
    cfg.evolution.steady_tol = num(e, "steady_tol", cfg.evolution.steady_tol);
    cfg.evolution.cutoff_delta = num(e, "cutoff_delta", cfg.evolution.cutoff_delta);
    cfg.evolution.snapshot_every = integer(e, "snapshot_every", cfg.evolution.snapshot_every);
    cfg.evolution.blowup_ceiling = num(e, "blowup_ceiling", cfg.evolution.blowup_ceiling);
    cfg.evolution.validate(cfg.model.alpha);
  }
  if (j.contains("multistart")) {
    const auto& m = j["multistart"];
    reject_unknown(m, {"count"}, "multistart");
    cfg.multistart.count = integer(m, "count", cfg.multistart.count);
    if (cfg.multistart.count < 1)
      fail(Errc::validation_error, "multistart.count must be at least 1");
  }
  if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("output_dir")) cfg.output_dir = j["output_dir"].get<std::string>();

  // geometry invariants surface immediately rather than at first use
  build_grid(cfg.domain);
  return cfg;
}

RunConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::parse_error, "cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path);
}

std::string canonical_config(const RunConfig& cfg) {
  json j;
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, RingSpec>) {
          j["domain"] = {{"kind", "ring1d"},
                         {"circumference", s.circumference},
                         {"refuge_start", s.refuge_start},
                         {"refuge_length", s.refuge_length},
                         {"resolution", s.resolution}};
        } else {
          j["domain"] = {{"kind", "rect2d_with_hole"},
                         {"outer_min", s.outer_min},
                         {"outer_max", s.outer_max},
                         {"hole_min", s.hole_min},
                         {"hole_max", s.hole_max},
                         {"resolution", s.resolution}};
        }
      },
      cfg.domain);
  j["model"] = {{"lambda", cfg.model.lambda},
                {"mu", cfg.model.mu},
                {"b", cfg.model.b},
                {"c", cfg.model.c},
                {"alpha", cfg.model.alpha}};
  j["newton"] = {{"tol", cfg.newton.tol}, {"max_iter", cfg.newton.max_iter}};
  j["continuation"] = {{"ds", cfg.continuation.ds},
                       {"ds_min", cfg.continuation.ds_min},
                       {"ds_max", cfg.continuation.ds_max},
                       {"max_steps", cfg.continuation.max_steps},
                       {"lambda_min", cfg.continuation.lambda_min},
                       {"lambda_max", cfg.continuation.lambda_max},
                       {"seed_s", cfg.continuation.seed_s}};
  j["evolution"] = {{"dt", cfg.evolution.dt},
                    {"T", cfg.evolution.t_final},
                    {"steady_tol", cfg.evolution.steady_tol},
                    {"snapshot_every", cfg.evolution.snapshot_every}};
  j["multistart"] = {{"count", cfg.multistart.count}};
  j["seed"] = cfg.seed;
  return j.dump();
}

}  // namespace refugia
