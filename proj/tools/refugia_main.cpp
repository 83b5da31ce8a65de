// Command-line front end: every subcommand reads one JSON run configuration,
// writes CSV/JSON/SVG artifacts into the output directory and finishes with
// an atomically written manifest referencing each artifact.
#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <iostream>

#include <nlohmann/json.hpp>

#include "refugia/acceptance.hpp"
#include "refugia/asymptotics.hpp"
#include "refugia/evolution.hpp"
#include "refugia/manifest.hpp"
#include "refugia/svg.hpp"
#include "refugia/thresholds.hpp"

namespace {

using namespace refugia;
namespace fs = std::filesystem;

constexpr int kExitConfig = 3;
constexpr int kExitNumerics = 4;
constexpr int kExitTimeReached = 10;  // evolve: T hit before steady detection

struct RangeSpec {
  double lo = 0.0, hi = 1.0;
  int n = 10;
};

// "a:b:n" inclusive range
RangeSpec parse_range(const std::string& text) {
  RangeSpec r;
  if (std::sscanf(text.c_str(), "%lf:%lf:%d", &r.lo, &r.hi, &r.n) != 3 || r.n < 1)
    fail(Errc::validation_error, "range must be a:b:n, got '" + text + "'");
  return r;
}

std::vector<double> range_values(const RangeSpec& r) {
  std::vector<double> out;
  for (int i = 0; i < r.n; ++i)
    out.push_back(r.n == 1 ? r.lo : r.lo + (r.hi - r.lo) * i / (r.n - 1.0));
  return out;
}

std::string out_path(const RunConfig& cfg, const std::string& name) {
  fs::create_directories(cfg.output_dir);
  return (fs::path(cfg.output_dir) / name).string();
}

int cmd_eig(const RunConfig& cfg, const std::string& mu_grid) {
  const Grid grid = build_grid(cfg.domain);
  RunManifest manifest(cfg, grid, "eig");
  const std::string csv_path = out_path(cfg, "eig.csv");
  CsvWriter csv(csv_path, manifest.config_hash_hex(), {"mu", "sigma1"});
  std::vector<double> mus, sigmas;
  for (double mu : range_values(parse_range(mu_grid))) {
    const double sig = sigma1_curve(grid, cfg.model.b, mu);
    csv.row({mu, sig});
    mus.push_back(mu);
    sigmas.push_back(sig);
  }
  manifest.add_output(csv_path);
  const double sD = sigma1_dirichlet_refuge(grid);
  manifest.add_metric("sigma1_dirichlet_refuge", sD);

  SvgPlot plot("principal eigenvalue curve", "mu", "sigma1");
  plot.add_line(mus, sigmas, "sigma1(b mu)");
  plot.add_line({mus.front(), mus.back()}, {sD, sD}, "refuge Dirichlet value");
  const std::string svg_path = out_path(cfg, "eig.svg");
  plot.write(svg_path);
  manifest.add_output(svg_path);
  manifest.write(cfg.output_dir);
  return 0;
}

int cmd_regions(const RunConfig& cfg, const std::string& lambda_grid,
                const std::string& mu_grid, double alpha) {
  const Grid grid = build_grid(cfg.domain);
  RunManifest manifest(cfg, grid, "regions");
  const std::string csv_path = out_path(cfg, "regions.csv");
  CsvWriter csv(csv_path, manifest.config_hash_hex(),
                {"lambda", "mu", "verdict", "ell_tilde", "m", "sigma1"});
  for (double mu : range_values(parse_range(mu_grid))) {
    for (double lambda : range_values(parse_range(lambda_grid))) {
      if (lambda <= 0.0) continue;
      const RegionVerdict v = classify(grid, lambda, mu, alpha, cfg.model.b, cfg.model.c);
      csv.row_mixed({CsvWriter::format(lambda), CsvWriter::format(mu),
                     classification_name(v.classification), CsvWriter::format(v.ell_tilde),
                     CsvWriter::format(v.m_value), CsvWriter::format(v.sigma1)});
    }
  }
  manifest.add_output(csv_path);

  // curve overlay in the lambda-mu plane: bifurcation curves plus the
  // nonexistence boundaries
  SvgPlot plot("parameter plane", "lambda", "mu");
  {
    std::vector<double> lam, mu;
    for (double m = 0.0; m <= 6.0; m += 0.05) {
      lam.push_back(sigma1_curve(grid, cfg.model.b, m));
      mu.push_back(m);
    }
    plot.add_line(lam, mu, "lambda = sigma1(b mu 1)");
  }
  {
    std::vector<double> lam, mu;
    for (double m = -3.0; m <= 0.0; m += 0.05) {
      lam.push_back(-m / cfg.model.c);
      mu.push_back(m);
    }
    plot.add_line(lam, mu, "lambda = |mu|/c");
  }
  if (alpha > 0.0) {
    std::vector<double> lam, mu;
    for (double m = 0.05; m <= 6.0; m += 0.05) {
      lam.push_back(ell_tilde(grid, m, alpha, cfg.model.b, cfg.model.c));
      mu.push_back(m);
    }
    plot.add_line(lam, mu, "lambda = ell~(mu, alpha)");
  }
  {
    std::vector<double> lam, mu;
    for (double l = 0.05; l <= 3.0; l += 0.05) {
      lam.push_back(l);
      mu.push_back(m_curve(l, alpha, cfg.model.c));
    }
    plot.add_line(lam, mu, "mu = m(lambda, alpha)");
  }
  const std::string svg_path = out_path(cfg, "regions.svg");
  plot.write(svg_path);
  manifest.add_output(svg_path);
  manifest.write(cfg.output_dir);
  return 0;
}

int cmd_steady(const RunConfig& cfg, bool dump_fields) {
  const Grid grid = build_grid(cfg.domain);
  RunManifest manifest(cfg, grid, "steady");
  const auto found =
      multistart_newton(grid, cfg.model, cfg.multistart.count, cfg.seed, cfg.newton);
  const auto distinct = distinct_states(found, 1e-3);

  nlohmann::json j;
  j["params"] = {{"lambda", cfg.model.lambda}, {"mu", cfg.model.mu},
                 {"b", cfg.model.b},           {"c", cfg.model.c},
                 {"alpha", cfg.model.alpha}};
  j["starts"] = cfg.multistart.count;
  j["converged"] = found.size();
  j["distinct"] = distinct.size();
  const AprioriBox box = apriori_box(cfg.model);
  nlohmann::json sols = nlohmann::json::array();
  for (const auto& st : distinct) {
    nlohmann::json rec;
    rec["residual_norm"] = st.residual_norm;
    rec["positive"] = st.positive();
    rec["u_min"] = st.u.values.minCoeff();
    rec["u_max"] = st.u.values.maxCoeff();
    rec["v_min"] = st.v.values.minCoeff();
    rec["v_max"] = st.v.values.maxCoeff();
    rec["identity_u"] = st.identity_u;
    rec["identity_v"] = st.identity_v;
    rec["within_apriori_box"] = st.u.values.maxCoeff() <= box.u_max * 1.01 &&
                                st.v.values.maxCoeff() <= box.v_max * 1.01;
    sols.push_back(rec);
  }
  j["solutions"] = sols;
  const std::string json_path = out_path(cfg, "steady.json");
  {
    std::ofstream out(json_path);
    out << j.dump(2) << "\n";
  }
  manifest.add_output(json_path);
  manifest.add_metric("distinct_solutions", static_cast<double>(distinct.size()));

  if (dump_fields) {
    const std::string csv_path = out_path(cfg, "steady_fields.csv");
    CsvWriter csv(csv_path, manifest.config_hash_hex(),
                  {"solution", "node", "x", "y", "region", "u", "v"});
    for (size_t si = 0; si < distinct.size(); ++si) {
      const auto& st = distinct[si];
      for (int i = 0; i < grid.num_nodes(); ++i) {
        const int k = grid.to_omega1[i];
        csv.row_mixed({std::to_string(si), std::to_string(i), CsvWriter::format(grid.x[i]),
                       CsvWriter::format(grid.dim == 2 ? grid.y[i] : 0.0),
                       grid.label[i] == Region::Omega0 ? "0" : "1",
                       CsvWriter::format(st.u.values[i]),
                       k >= 0 ? CsvWriter::format(st.v.values[k]) : "nan"});
      }
    }
    manifest.add_output(csv_path);
  }
  manifest.write(cfg.output_dir);
  return 0;
}

void write_branch_csv(CsvWriter& csv, const Grid& grid, const Branch& br) {
  const Measures m = measures(grid);
  for (const auto& pt : br.points) {
    csv.row({pt.s, pt.params.lambda, pt.u.values.lpNorm<Eigen::Infinity>(),
             pt.v.values.lpNorm<Eigen::Infinity>(), integrate(grid, pt.u) / m.omega,
             integrate(grid, pt.v) / m.omega1, pt.fold ? 1.0 : 0.0, pt.jac_proxy});
  }
}

int cmd_continue(const RunConfig& cfg, const std::string& from) {
  const Grid grid = build_grid(cfg.domain);
  RunManifest manifest(cfg, grid, "continue");
  Branch br;
  if (from == "gamma-v") {
    const auto seeded =
        seed_from_gamma_v(grid, cfg.model, cfg.continuation.seed_s, cfg.newton);
    br = continue_branch(grid, seeded.first, seeded.second, cfg.continuation);
    br.origin = BranchOrigin::from_gamma_v;
    br.origin_lambda = sigma1_curve(grid, cfg.model.b, cfg.model.mu);
  } else if (from == "gamma-u") {
    const auto seeded =
        seed_from_gamma_u(grid, cfg.model, cfg.continuation.seed_s, cfg.newton);
    br = continue_branch(grid, seeded.first, seeded.second, cfg.continuation);
    br.origin = BranchOrigin::from_gamma_u;
    br.origin_lambda = -cfg.model.mu / cfg.model.c;
  } else if (from == "lp2") {
    br = continue_lp2_branch(grid, cfg.model.mu, cfg.model.b, cfg.continuation);
  } else {
    fail(Errc::validation_error, "--from must be gamma-v, gamma-u or lp2");
  }

  const std::string csv_path = out_path(cfg, "branch.csv");
  CsvWriter csv(csv_path, manifest.config_hash_hex(),
                {"s", "lambda", "u_max", "v_max", "u_mean", "v_mean", "fold", "jac_proxy"});
  write_branch_csv(csv, grid, br);
  manifest.add_output(csv_path);
  manifest.add_metric("points", static_cast<double>(br.points.size()));
  manifest.add_metric("origin_lambda", br.origin_lambda);
  manifest.add_note("origin", branch_origin_name(br.origin));
  manifest.add_note("termination", branch_termination_name(br.termination));

  SvgPlot plot("bifurcation diagram", "lambda", "|u|_inf");
  std::vector<double> lam, unorm, flam, funorm;
  for (const auto& pt : br.points) {
    lam.push_back(pt.params.lambda);
    unorm.push_back(pt.u.values.lpNorm<Eigen::Infinity>());
    if (pt.fold) {
      flam.push_back(pt.params.lambda);
      funorm.push_back(pt.u.values.lpNorm<Eigen::Infinity>());
    }
  }
  plot.add_line(lam, unorm, "branch");
  if (!flam.empty()) plot.add_points(flam, funorm, "folds");
  const std::string svg_path = out_path(cfg, "branch.svg");
  plot.write(svg_path);
  manifest.add_output(svg_path);
  manifest.write(cfg.output_dir);
  return 0;
}

int cmd_evolve(RunConfig cfg, double t_override, int snapshots) {
  const Grid grid = build_grid(cfg.domain);
  RunManifest manifest(cfg, grid, "evolve");
  if (t_override > 0.0) cfg.evolution.t_final = t_override;
  if (snapshots > 0) cfg.evolution.snapshot_every = snapshots;

  // generic positive initial data: half carrying capacity with a long-wave
  // modulation
  const Field u0 = field_from_function(grid, Region::Omega, [&](double x, double y) {
    return 0.5 * std::max(cfg.model.lambda, 0.1) * (1.0 + 0.2 * std::cos(x + y));
  });
  const Field v0 = field_from_function(grid, Region::Omega1, [&](double x, double y) {
    return 0.5 * std::max(cfg.model.mu, 0.1) * (1.0 + 0.2 * std::sin(x - y));
  });
  const Trajectory tr = evolve(grid, cfg.model, u0, v0, cfg.evolution);

  const std::string csv_path = out_path(cfg, "monitors.csv");
  CsvWriter csv(csv_path, manifest.config_hash_hex(),
                {"t", "min_u", "min_v", "mass_u", "mass_v", "steady_residual", "dudt"});
  for (const auto& m : tr.monitors)
    csv.row({m.t, m.min_u, m.min_v, m.mass_u, m.mass_v, m.steady_residual, m.dudt_norm});
  manifest.add_output(csv_path);

  if (cfg.evolution.snapshot_every > 0) {
    const std::string snap_path = out_path(cfg, "snapshots.csv");
    CsvWriter snap(snap_path, manifest.config_hash_hex(), {"t", "node", "x", "y", "u", "v"});
    for (size_t si = 0; si < tr.times.size(); ++si) {
      for (int i = 0; i < grid.num_nodes(); ++i) {
        const int k = grid.to_omega1[i];
        snap.row_mixed({CsvWriter::format(tr.times[si]), std::to_string(i),
                        CsvWriter::format(grid.x[i]),
                        CsvWriter::format(grid.dim == 2 ? grid.y[i] : 0.0),
                        CsvWriter::format(tr.snapshots[si].first.values[i]),
                        k >= 0 ? CsvWriter::format(tr.snapshots[si].second.values[k])
                               : "nan"});
      }
    }
    manifest.add_output(snap_path);
  }
  manifest.add_metric("t_final", tr.t_final);
  manifest.add_metric("steps", tr.steps);
  manifest.add_note("status", evolve_status_name(tr.status));
  manifest.write(cfg.output_dir);

  switch (tr.status) {
    case EvolveStatus::steady_detected: return 0;
    case EvolveStatus::time_reached: return kExitTimeReached;
    default: return kExitNumerics;
  }
}

int cmd_asymptotics(const RunConfig& cfg, const std::string& mode) {
  const Grid grid = build_grid(cfg.domain);
  RunManifest manifest(cfg, grid, "asymptotics");
  if (mode == "alpha") {
    const std::vector<double> alphas{0.0, 1.0, 10.0, 100.0, 1000.0};
    const auto sweep = alpha_sweep(grid, cfg.model.lambda, cfg.model.mu, cfg.model.b,
                                   cfg.model.c, alphas, cfg.seed, cfg.newton);
    const std::string csv_path = out_path(cfg, "alpha_sweep.csv");
    CsvWriter csv(csv_path, manifest.config_hash_hex(),
                  {"alpha", "solved", "err_u", "err_v", "err_rescaled", "limit_case"});
    std::vector<double> xs, ys;
    for (const auto& r : sweep.rows) {
      csv.row_mixed({CsvWriter::format(r.alpha), r.solved ? "1" : "0",
                     CsvWriter::format(r.err_u), CsvWriter::format(r.err_v),
                     CsvWriter::format(r.err_rescaled),
                     alpha_limit_case_name(r.limit_case)});
      if (r.solved && r.alpha > 0.0) {
        xs.push_back(r.alpha);
        ys.push_back(r.err_prey_only);
      }
    }
    manifest.add_output(csv_path);
    SvgPlot plot("collapse toward the prey-only state", "alpha", "|u-lambda|+|v|", true,
                 true);
    plot.add_line(xs, ys, "collapse error");
    const std::string svg_path = out_path(cfg, "alpha_sweep.svg");
    plot.write(svg_path);
    manifest.add_output(svg_path);
  } else if (mode == "lambda0") {
    const double sigma1 = sigma1_curve(grid, cfg.model.b, cfg.model.mu);
    std::vector<double> lambdas;
    for (double f : {0.2, 0.1, 0.05, 0.025}) lambdas.push_back(f * sigma1);
    const auto rows =
        lp2_scaling_probe(grid, cfg.model.mu, cfg.model.b, lambdas, cfg.newton);
    const std::string csv_path = out_path(cfg, "lambda0_probe.csv");
    CsvWriter csv(csv_path, manifest.config_hash_hex(),
                  {"lambda", "lambda_wmax", "mean_v_over_lambda", "meanzero_norm", "s", "t",
                   "vmin_over_lambda", "vmax_over_lambda", "harnack_ratio"});
    std::vector<double> xs, ys;
    for (const auto& r : rows) {
      csv.row({r.lambda, r.lambda_wmax, r.mean_v_over_lambda, r.meanzero_norm, r.s, r.t,
               r.vmin_over_lambda, r.vmax_over_lambda, r.harnack_ratio});
      xs.push_back(1.0 / r.lambda);
      ys.push_back(r.state.u.values.lpNorm<Eigen::Infinity>());
    }
    manifest.add_output(csv_path);
    const BasePointJacobian bp = jacobian_base_point(grid, cfg.model.b, cfg.model.mu);
    manifest.add_metric("s0", bp.s0);
    manifest.add_metric("t0", bp.t0);
    manifest.add_metric("detJ", bp.det);
    SvgPlot plot("blow-up of the rescaled prey component", "1/lambda", "|w|_inf", true,
                 true);
    plot.add_line(xs, ys, "|w(lambda)|");
    const std::string svg_path = out_path(cfg, "lambda0_probe.svg");
    plot.write(svg_path);
    manifest.add_output(svg_path);
  } else {
    fail(Errc::validation_error, "--mode must be alpha or lambda0");
  }
  manifest.write(cfg.output_dir);
  return 0;
}

int cmd_verify(const RunConfig& cfg) {
  const Grid grid = build_grid(cfg.domain);
  RunManifest manifest(cfg, grid, "verify");
  const AcceptanceReport report = run_acceptance(std::cout);
  for (const auto& r : report.results)
    manifest.add_metric("criterion_" + std::to_string(r.id), r.pass ? 1.0 : 0.0);
  manifest.write(cfg.output_dir);
  return report.all_pass() ? 0 : kExitNumerics;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"refugia: steady states, bifurcation branches and dynamics of a "
               "protection-zone predator-prey model with directed population flux"};
  app.require_subcommand(1);
  app.fallthrough();  // --config may follow the subcommand name

  std::string config_path;
  app.add_option("--config", config_path, "JSON run configuration")->required();
  std::string grid_dump;
  app.add_option("--dump-grid", grid_dump, "write a JSON debug dump of the grid");

  auto* eig = app.add_subcommand("eig", "principal eigenvalue curve");
  std::string mu_grid = "0:10:50";
  eig->add_option("--mu-grid", mu_grid, "mu range a:b:n");

  auto* regions = app.add_subcommand("regions", "existence / nonexistence classification");
  std::string lambda_grid = "0.05:2:40", mu_grid2 = "-1:4:40";
  double alpha_override = 1.0;
  regions->add_option("--lambda", lambda_grid, "lambda range a:b:n");
  regions->add_option("--mu", mu_grid2, "mu range a:b:n");
  regions->add_option("--alpha", alpha_override, "directed-flux strength");

  auto* steady = app.add_subcommand("steady", "multistart Newton solves");
  double lambda_opt = std::nan(""), mu_opt = std::nan(""), alpha_opt = std::nan("");
  int multistart_opt = 0;
  bool dump_fields = false;
  steady->add_option("--lambda", lambda_opt, "override model lambda");
  steady->add_option("--mu", mu_opt, "override model mu");
  steady->add_option("--alpha", alpha_opt, "override model alpha");
  steady->add_option("--multistart", multistart_opt, "number of Newton starts");
  steady->add_flag("--fields", dump_fields, "dump solution fields as CSV");

  auto* cont = app.add_subcommand("continue", "pseudo-arclength branch tracing");
  std::string from = "gamma-v";
  cont->add_option("--from", from, "gamma-v | gamma-u | lp2");

  auto* evolve_cmd = app.add_subcommand("evolve", "semi-implicit time integration");
  double t_final = -1.0;
  int snapshots = 0;
  evolve_cmd->add_option("--T", t_final, "final time");
  evolve_cmd->add_option("--snapshots", snapshots, "snapshot cadence in steps");

  auto* asym = app.add_subcommand("asymptotics", "limit-regime verification sweeps");
  std::string mode = "alpha";
  asym->add_option("--mode", mode, "alpha | lambda0");

  app.add_subcommand("verify", "run the full acceptance suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;  // usage error
  }

  try {
    RunConfig cfg = parse_config(config_path);
    if (!grid_dump.empty()) dump_grid_json(build_grid(cfg.domain), grid_dump);
    if (steady->parsed()) {
      if (!std::isnan(lambda_opt)) cfg.model.lambda = lambda_opt;
      if (!std::isnan(mu_opt)) cfg.model.mu = mu_opt;
      if (!std::isnan(alpha_opt)) cfg.model.alpha = alpha_opt;
      if (multistart_opt > 0) cfg.multistart.count = multistart_opt;
      cfg.model.validate();
      return cmd_steady(cfg, dump_fields);
    }
    if (eig->parsed()) return cmd_eig(cfg, mu_grid);
    if (regions->parsed()) return cmd_regions(cfg, lambda_grid, mu_grid2, alpha_override);
    if (cont->parsed()) return cmd_continue(cfg, from);
    if (evolve_cmd->parsed()) return cmd_evolve(cfg, t_final, snapshots);
    if (asym->parsed()) return cmd_asymptotics(cfg, mode);
    return cmd_verify(cfg);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    switch (e.code()) {
      case Errc::parse_error:
      case Errc::validation_error: return kExitConfig;
      default: return kExitNumerics;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerics;
  }
}
