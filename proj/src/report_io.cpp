#include "elastorough/report_io.hpp"

#include <algorithm>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <fmt/core.h>

#include "elastorough/errors.hpp"

namespace elastorough
{

using nlohmann::json;

namespace
{

std::string num(double v)
{
  return fmt::format("{:.17g}", v);
}

std::string quoted(std::string s)
{
  for (auto &ch : s)
  {
    if (ch == '"' || ch == '\n')
    {
      ch = '\'';
    }
  }
  return "\"" + s + "\"";
}

const char *kRunColumns = "omega,h,lipschitz,u_norm,g_l2,g_h1,total_bound,measured_ratio,boundary_flux,"
                          "source_term,energy_residual,radiated_power,poincare_l2_sq,poincare_bound,"
                          "iterations,relative_residual,unknowns";

std::string run_fields(const RunReport &r)
{
  return fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}", num(r.config.omega),
                     num(r.config.geometry.h), num(r.lipschitz), num(r.u_norm), num(r.g_l2), num(r.g_h1),
                     num(r.bound.total_bound), num(r.bound.measured_ratio.value_or(0.0)),
                     num(r.energy.boundary_flux), num(r.energy.source_term), num(r.energy.residual),
                     num(r.energy.radiated_power), num(r.poincare.l2_sq), num(r.poincare.bound), r.solve.iterations,
                     num(r.solve.relative_residual), r.unknowns);
}

}  // namespace

json to_json(const BoundReport &b)
{
  json j{{"C1", b.C1}, {"C2", b.C2}, {"C3", b.C3}, {"C4", b.C4}, {"C5", b.C5},
         {"C6", b.C6}, {"total_bound", b.total_bound}, {"generic_C", b.generic_C}};
  j["measured_ratio"] = b.measured_ratio ? json(*b.measured_ratio) : json(nullptr);
  return j;
}

json to_json(const StabilityConstants &s)
{
  return {{"K", s.K}, {"C_K", s.C_K}, {"c_K", s.c_K}};
}

json to_json(const SymbolBoundsReport &r)
{
  json v = json::array();
  for (const auto &x : r.violations)
  {
    v.push_back({{"check", x.check}, {"xi", {x.xi[0], x.xi[1]}}, {"value", x.value}});
  }
  return {{"n_samples", r.n_samples},         {"min_eig_outer", r.min_eig_outer},
          {"max_ratio_inner", r.max_ratio_inner}, {"min_rho_band_ratio", r.min_rho_band_ratio},
          {"max_gap_ratio", r.max_gap_ratio}, {"n_violations", r.violations.size()},
          {"violations", v}};
}

json to_json(const RunReport &r)
{
  return {
    {"config", config_to_json(r.config)},
    {"u_norm", r.u_norm},
    {"g_l2", r.g_l2},
    {"g_h1", r.g_h1},
    {"lipschitz", r.lipschitz},
    {"bound", to_json(r.bound)},
    {"energy_balance",
     {{"boundary_flux", r.energy.boundary_flux},
      {"source_term", r.energy.source_term},
      {"residual", r.energy.residual},
      {"radiated_power", r.energy.radiated_power},
      {"power_mismatch", r.energy.power_mismatch}}},
    {"poincare", {{"l2_sq", r.poincare.l2_sq}, {"bound", r.poincare.bound}, {"holds", r.poincare.holds}}},
    {"solver", {{"iterations", r.solve.iterations}, {"relative_residual", r.solve.relative_residual}}},
    {"unknowns", r.unknowns},
    {"invariant_failure", r.invariant_failure},
    {"wall_seconds", r.wall_seconds},
  };
}

json to_json(const SweepTable &t)
{
  json pts = json::array();
  for (const auto &p : t.points)
  {
    json e{{"value", p.value}, {"error", p.error}};
    e["report"] = p.report ? to_json(*p.report) : json(nullptr);
    pts.push_back(e);
  }
  return {{"axis", sweep_axis_name(t.axis)}, {"points", pts}};
}

json to_json(const McReport &r)
{
  json failures = json::array();
  for (const auto &s : r.samples)
  {
    if (!s.ok)
    {
      failures.push_back({{"sample_id", s.sample_id}, {"error", s.error}});
    }
  }
  return {
    {"config", config_to_json(r.config)},
    {"n_samples", r.n_samples},
    {"n_completed", r.n_completed},
    {"completeness", r.completeness},
    {"seed", r.seed},
    {"mean_u_sq", r.mean_u_sq},
    {"mean_g_sq", r.mean_g_sq},
    {"stderr_u_sq", r.stderr_u_sq},
    {"stderr_g_sq", r.stderr_g_sq},
    {"L0", r.L0},
    {"bound", to_json(r.bound)},
    {"stochastic_factor", r.stochastic_factor},
    {"ratio", r.ratio},
    {"failures", failures},
    {"wall_seconds", r.wall_seconds},
  };
}

json to_json(const PushforwardReport &r)
{
  json lv = json::array();
  for (const auto &l : r.levels)
  {
    lv.push_back({{"Nz", l.Nz}, {"difference", l.difference}, {"u_norm", l.u_norm}});
  }
  return {{"levels", lv}, {"orders", r.orders}, {"sample_distance", r.sample_distance}};
}

std::string runs_csv(const std::vector<RunReport> &runs)
{
  std::string out = std::string(kRunColumns) + "\n";
  for (const auto &r : runs)
  {
    out += run_fields(r) + "\n";
  }
  return out;
}

std::string sweep_csv(const SweepTable &t)
{
  std::string out = "axis,value,status," + std::string(kRunColumns) + ",error\n";
  const std::string empty_run = std::string(std::count(kRunColumns, kRunColumns + std::strlen(kRunColumns), ','), ',');
  for (const auto &p : t.points)
  {
    out += fmt::format("{},{},{},{},{}\n", sweep_axis_name(t.axis), num(p.value), p.report ? "ok" : "failed",
                       p.report ? run_fields(*p.report) : empty_run, quoted(p.error));
  }
  return out;
}

std::string mc_csv(const McReport &r)
{
  std::string out = "sample_id,status,u_h1_sq,g_h1_sq,iterations,relative_residual,energy_residual,"
                    "distance_to_reference,rejections,error\n";
  for (const auto &s : r.samples)
  {
    out += fmt::format("{},{},{},{},{},{},{},{},{},{}\n", s.sample_id, s.ok ? "ok" : "failed", num(s.u_h1_sq),
                       num(s.g_h1_sq), s.iterations, num(s.relative_residual), num(s.energy_residual),
                       num(s.distance_to_reference), s.rejections, quoted(s.error));
  }
  return out;
}

std::string pushforward_csv(const PushforwardReport &r)
{
  std::string out = "Nz,difference,u_norm,order\n";
  for (std::size_t i = 0; i < r.levels.size(); ++i)
  {
    const auto &l = r.levels[i];
    out += fmt::format("{},{},{},{}\n", l.Nz, num(l.difference), num(l.u_norm), i > 0 ? num(r.orders[i - 1]) : "");
  }
  return out;
}

std::string constants_csv(const BoundReport &b, const StabilityConstants &s)
{
  std::string out = "name,value\n";
  const std::pair<const char *, double> rows[] = {
    {"K", s.K},   {"C_K", s.C_K}, {"c_K", s.c_K}, {"C1", b.C1}, {"C2", b.C2},
    {"C3", b.C3}, {"C4", b.C4},   {"C5", b.C5},   {"C6", b.C6}, {"total_bound", b.total_bound},
  };
  for (const auto &[name, v] : rows)
  {
    out += fmt::format("{},{}\n", name, num(v));
  }
  return out;
}

std::string trace_csv(const SpectralGrid &grid, const std::vector<Vec3c> &values)
{
  std::string out = "i1,i2,u1_re,u1_im,u2_re,u2_im,u3_re,u3_im\n";
  for (int i1 = 0; i1 < grid.n1(); ++i1)
  {
    for (int i2 = 0; i2 < grid.n2(); ++i2)
    {
      const Vec3c &u = values[static_cast<std::size_t>(i1) * grid.n2() + i2];
      out += fmt::format("{},{},{},{},{},{},{},{}\n", i1, i2, num(u(0).real()), num(u(0).imag()), num(u(1).real()),
                         num(u(1).imag()), num(u(2).real()), num(u(2).imag()));
    }
  }
  return out;
}

std::vector<Vec3c> read_trace_csv(const std::string &path, const SpectralGrid &grid)
{
  std::ifstream in(path);
  if (!in)
  {
    throw ConfigError("cannot open trace file '" + path + "'");
  }
  std::vector<Vec3c> values(grid.size(), Vec3c::Zero());
  std::vector<bool> seen(grid.size(), false);
  std::string line;
  std::getline(in, line);  // header
  int row = 1;
  while (std::getline(in, line))
  {
    ++row;
    if (line.empty())
    {
      continue;
    }
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    int i1 = -1, i2 = -1;
    double v[6];
    ss >> i1 >> i2 >> v[0] >> v[1] >> v[2] >> v[3] >> v[4] >> v[5];
    if (!ss || i1 < 0 || i1 >= grid.n1() || i2 < 0 || i2 >= grid.n2())
    {
      throw ConfigError(fmt::format("trace file '{}': malformed row {}", path, row));
    }
    const std::size_t p = static_cast<std::size_t>(i1) * grid.n2() + i2;
    values[p] << cplx(v[0], v[1]), cplx(v[2], v[3]), cplx(v[4], v[5]);
    seen[p] = true;
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end())
  {
    throw ConfigError(fmt::format("trace file '{}' must list all {} x {} grid points", path, grid.n1(), grid.n2()));
  }
  return values;
}

void ensure_directory(const std::string &dir)
{
  std::filesystem::create_directories(dir);
}

void write_text(const std::string &path, const std::string &text)
{
  std::ofstream out(path, std::ios::binary);
  if (!out)
  {
    throw std::runtime_error("cannot write '" + path + "'");
  }
  out << text;
}

void write_json(const std::string &path, const json &j)
{
  write_text(path, j.dump(2) + "\n");
}

void write_error(const std::string &dir, const std::string &kind, const std::string &message, int exit_code)
{
  ensure_directory(dir);
  write_json((std::filesystem::path(dir) / "error.json").string(),
             {{"kind", kind}, {"message", message}, {"exit_code", exit_code}});
}

}  // namespace elastorough
