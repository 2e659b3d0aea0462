// Command-line front end: one subcommand per experiment, one output directory per run.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/core.h>

#include "elastorough/errors.hpp"
#include "elastorough/harness.hpp"
#include "elastorough/parallel.hpp"
#include "elastorough/report_io.hpp"

using namespace elastorough;

namespace
{

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kNumericalFailure = 2;
constexpr int kInvariantViolation = 3;

struct Options
{
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<double> omega;
  std::optional<int> n_samples;
  std::string axis;
  std::vector<double> values;
  std::string trace_path;
  double x3 = 0.0;
  std::uint64_t sample_id = 0;
  std::optional<double> lipschitz;
};

// Where error.json goes once the configuration has been read.
std::string error_dir;

std::string join(const std::string &dir, const std::string &name)
{
  return (std::filesystem::path(dir) / name).string();
}

RunConfig prepare(const Options &o)
{
  RunConfig cfg = o.config_path.empty() ? default_config() : load_config(o.config_path);
  if (o.seed)
  {
    cfg.seed = *o.seed;
  }
  if (o.threads)
  {
    cfg.threads = *o.threads;
  }
  if (o.omega)
  {
    cfg.omega = *o.omega;
  }
  if (o.n_samples)
  {
    cfg.n_samples = *o.n_samples;
  }
  if (!o.out_dir.empty())
  {
    cfg.output_dir = o.out_dir;
  }
  error_dir = cfg.output_dir;
  validate_config(cfg);
  set_thread_limit(cfg.threads);
  ensure_directory(cfg.output_dir);
  write_json(join(cfg.output_dir, "config.json"), config_to_json(cfg));
  return cfg;
}

int cmd_verify_dtn(const RunConfig &cfg)
{
  const ElasticParams p = validate_params(cfg.lambda, cfg.mu, cfg.omega);
  const SymbolBoundsReport rep = verify_symbol_bounds(p, cfg.verify_samples, cfg.seed);
  write_json(join(cfg.output_dir, "report.json"), to_json(rep));
  fmt::print("symbol checks on {} samples: {} violations\n", rep.n_samples, rep.violations.size());
  fmt::print("min eig Re(-iM) outside K*omega: {:.6e}; max |M_ij|/(C_K omega) inside: {:.6f}\n", rep.min_eig_outer,
             rep.max_ratio_inner);
  if (!rep.violations.empty())
  {
    throw InvariantViolation(fmt::format("{} symbol checks failed", rep.violations.size()));
  }
  return kOk;
}

int cmd_solve(const RunConfig &cfg)
{
  const RunReport rep = deterministic_run(cfg);
  write_json(join(cfg.output_dir, "report.json"), to_json(rep));
  write_text(join(cfg.output_dir, "runs.csv"), runs_csv({rep}));
  fmt::print("||u||_V = {:.10e}, ||g||_H1 = {:.10e}, bound = {:.6e}, ratio = {:.6e}\n", rep.u_norm, rep.g_h1,
             rep.bound.total_bound, rep.bound.measured_ratio.value_or(0.0));
  fmt::print("energy residual {:.3e}, radiated power {:.6e}, solver iterations {}\n", rep.energy.residual,
             rep.energy.radiated_power, rep.solve.iterations);
  if (!rep.invariant_failure.empty())
  {
    throw InvariantViolation(rep.invariant_failure);
  }
  return kOk;
}

int cmd_sweep(const RunConfig &cfg, const Options &o)
{
  const SweepAxis axis = parse_sweep_axis(o.axis);
  if (o.values.empty())
  {
    throw ConfigError("sweep needs --values");
  }
  const SweepTable t = parameter_sweep(cfg, axis, o.values);
  write_json(join(cfg.output_dir, "report.json"), to_json(t));
  write_text(join(cfg.output_dir, "sweep.csv"), sweep_csv(t));
  int failed = 0;
  for (const auto &p : t.points)
  {
    if (p.report)
    {
      fmt::print("{} = {:<10g} ||u||_V/||g||_H1 = {:.6e}  bound = {:.6e}\n", o.axis, p.value,
                 p.report->u_norm / p.report->g_h1, p.report->bound.total_bound);
    }
    else
    {
      ++failed;
      fmt::print("{} = {:<10g} failed: {}\n", o.axis, p.value, p.error);
    }
  }
  for (const auto &p : t.points)
  {
    if (p.report && !p.report->invariant_failure.empty())
    {
      throw InvariantViolation(p.report->invariant_failure);
    }
  }
  if (failed > 0)
  {
    throw NumericalFailure(fmt::format("{} of {} sweep points failed", failed, t.points.size()));
  }
  return kOk;
}

int cmd_mc(const RunConfig &cfg)
{
  const McReport rep = monte_carlo(cfg, cfg.n_samples, cfg.seed);
  write_json(join(cfg.output_dir, "report.json"), to_json(rep));
  write_text(join(cfg.output_dir, "samples.csv"), mc_csv(rep));
  fmt::print("{} / {} samples completed\n", rep.n_completed, rep.n_samples);
  fmt::print("E||u||^2 = {:.6e} +- {:.2e}, E||g||^2 = {:.6e} +- {:.2e}, ratio = {:.6e}\n", rep.mean_u_sq,
             rep.stderr_u_sq, rep.mean_g_sq, rep.stderr_g_sq, rep.ratio);
  if (rep.n_completed == 0)
  {
    throw NumericalFailure("no Monte Carlo sample completed");
  }
  return kOk;
}

int cmd_pushforward(const RunConfig &cfg, const Options &o)
{
  const SurfaceProfile f0 = make_profile(cfg.f0, cfg.geometry, {2 * cfg.N1 + 1, 2 * cfg.N2 + 1});
  const RandomSample s =
    sample_one(cfg.seed, o.sample_id, configured_law(cfg), cfg.geometry, f0, {2 * cfg.N1 + 1, 2 * cfg.N2 + 1});
  std::vector<int> levels;
  for (int d : {4, 2, 1})
  {
    if (cfg.Nz % d == 0 && cfg.Nz / d >= 4)
    {
      levels.push_back(cfg.Nz / d);
    }
  }
  if (levels.empty())
  {
    levels.push_back(cfg.Nz);
  }
  const PushforwardReport rep = pushforward_study(s, cfg, levels);
  write_json(join(cfg.output_dir, "report.json"), to_json(rep));
  write_text(join(cfg.output_dir, "pushforward.csv"), pushforward_csv(rep));
  for (std::size_t i = 0; i < rep.levels.size(); ++i)
  {
    fmt::print("Nz = {:4d}  relative difference {:.6e}", rep.levels[i].Nz, rep.levels[i].difference);
    if (i > 0)
    {
      fmt::print("  order {:.3f}", rep.orders[i - 1]);
    }
    fmt::print("\n");
  }
  return kOk;
}

int cmd_extend(const RunConfig &cfg, const Options &o)
{
  if (o.trace_path.empty())
  {
    throw ConfigError("extend needs --trace");
  }
  const ElasticParams p = validate_params(cfg.lambda, cfg.mu, cfg.omega);
  const SpectralGrid grid(cfg.N1, cfg.N2, cfg.geometry.cell);
  if (!(o.x3 >= cfg.geometry.h))
  {
    throw ConstraintViolation(fmt::format("--x3 must be at least h = {}", cfg.geometry.h));
  }
  const BoundaryTrace trace = BoundaryTrace::from_values(grid, read_trace_csv(o.trace_path, grid));
  const auto vals = extend_field(trace, cfg.geometry.h, o.x3, p);
  write_text(join(cfg.output_dir, "extended.csv"), trace_csv(grid, vals));
  fmt::print("extended {} grid values to x3 = {}\n", vals.size(), o.x3);
  return kOk;
}

int cmd_constants(const RunConfig &cfg, const Options &o)
{
  const ElasticParams p = validate_params(cfg.lambda, cfg.mu, cfg.omega);
  double L = 0.0;
  if (o.lipschitz)
  {
    L = *o.lipschitz;
  }
  else
  {
    L = make_profile(configured_surface(cfg), cfg.geometry, {2 * cfg.N1 + 1, 2 * cfg.N2 + 1}).lipschitz;
  }
  const StabilityConstants s = stability_constants(p);
  const BoundReport b = bound_constants(p, cfg.geometry, L, cfg.generic_C);
  write_json(join(cfg.output_dir, "report.json"),
             {{"stability", to_json(s)}, {"bound", to_json(b)}, {"lipschitz", L}});
  write_text(join(cfg.output_dir, "constants.csv"), constants_csv(b, s));
  fmt::print("K     = {:.12g}\nC_K   = {:.12g}\nc_K   = {:.12g}\n", s.K, s.C_K, s.c_K);
  fmt::print("C1..C6 = {:.6g} {:.6g} {:.6g} {:.6g} {:.6g} {:.6g}\n", b.C1, b.C2, b.C3, b.C4, b.C5, b.C6);
  fmt::print("total bound = {:.12g} (generic_C = {}, L = {})\n", b.total_bound, b.generic_C, L);
  return kOk;
}

int fail(const Options &o, const std::string &kind, const std::string &msg, int code)
{
  std::cerr << "error: " << msg << "\n";
  try
  {
    std::string dir = !o.out_dir.empty() ? o.out_dir : !error_dir.empty() ? error_dir : "out";
    write_error(dir, kind, msg, code);
  }
  catch (const std::exception &e)
  {
    std::cerr << "could not write error record: " << e.what() << "\n";
  }
  return code;
}

}  // namespace

int main(int argc, char **argv)
{
  CLI::App app{"Time-harmonic elastic scattering by rough surfaces"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App *sub) {
    sub->add_option("--config", o.config_path, "JSON configuration file")->check(CLI::ExistingFile);
    sub->add_option("--out", o.out_dir, "output directory (overrides run.output_dir)");
    sub->add_option("--seed", o.seed, "random seed");
    sub->add_option("--threads", o.threads, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--omega", o.omega, "angular frequency");
  };

  CLI::App *verify = app.add_subcommand("verify-dtn", "check the DtN symbol inequalities on random frequencies");
  CLI::App *solve = app.add_subcommand("solve", "one deterministic solve with the bound and diagnostics");
  CLI::App *sweep = app.add_subcommand("sweep", "deterministic runs along one parameter axis");
  CLI::App *mc = app.add_subcommand("mc", "Monte Carlo over the random surface ensemble");
  CLI::App *push = app.add_subcommand("pushforward", "transformed vs. direct solve on one ensemble sample");
  CLI::App *extend = app.add_subcommand("extend", "extend a boundary trace above the artificial boundary");
  CLI::App *constants = app.add_subcommand("constants", "stability and bound constants");
  for (CLI::App *sub : {verify, solve, sweep, mc, push, extend, constants})
  {
    common(sub);
  }
  sweep->add_option("--axis", o.axis, "omega, h or L_amplitude")->required();
  sweep->add_option("--values", o.values, "comma-separated values")->delimiter(',')->required();
  mc->add_option("--n-samples", o.n_samples, "number of samples")->check(CLI::PositiveNumber);
  push->add_option("--sample-id", o.sample_id, "ensemble sample index");
  extend->add_option("--trace", o.trace_path, "trace CSV on the collocation grid")->required();
  extend->add_option("--x3", o.x3, "evaluation height (>= h)")->required();
  constants->add_option("--lipschitz", o.lipschitz, "Lipschitz constant (default: from the configured surface)");

  try
  {
    app.parse(argc, argv);
  }
  catch (const CLI::CallForHelp &e)
  {
    return app.exit(e);
  }
  catch (const CLI::ParseError &e)
  {
    app.exit(e);
    return fail(o, "ConfigError", e.what(), kConfigError);
  }

  try
  {
    const RunConfig cfg = prepare(o);
    if (verify->parsed())
    {
      return cmd_verify_dtn(cfg);
    }
    if (solve->parsed())
    {
      return cmd_solve(cfg);
    }
    if (sweep->parsed())
    {
      return cmd_sweep(cfg, o);
    }
    if (mc->parsed())
    {
      return cmd_mc(cfg);
    }
    if (push->parsed())
    {
      return cmd_pushforward(cfg, o);
    }
    if (extend->parsed())
    {
      return cmd_extend(cfg, o);
    }
    return cmd_constants(cfg, o);
  }
  catch (const InvariantViolation &e)
  {
    return fail(o, "InvariantViolation", e.what(), kInvariantViolation);
  }
  catch (const NumericalFailure &e)
  {
    return fail(o, "NumericalFailure", e.what(), kNumericalFailure);
  }
  catch (const std::invalid_argument &e)
  {
    return fail(o, "ConfigError", e.what(), kConfigError);
  }
  catch (const std::exception &e)
  {
    return fail(o, "Error", e.what(), kNumericalFailure);
  }
}
