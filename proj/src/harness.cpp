#include "elastorough/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include <fmt/core.h>

#include "elastorough/errors.hpp"
#include "elastorough/parallel.hpp"

namespace elastorough
{

namespace
{

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::array<int, 2> solver_points(const RunConfig &cfg)
{
  return {2 * cfg.N1 + 1, 2 * cfg.N2 + 1};
}

SolverOptions solver_options(const RunConfig &cfg)
{
  return {cfg.rtol, cfg.restart, cfg.iteration_cap_factor};
}

SourceTerm configured_source(const RunConfig &cfg)
{
  SourceTerm g;
  g.cell = cfg.geometry.cell;
  g.bumps = cfg.source;
  return g;
}

LinearSystem build(std::shared_ptr<const StripMesh> mesh, const ElasticParams &params, const StripMap &map,
                   const SourceFn &g, const RunConfig &cfg, std::shared_ptr<const FlatOperator> flat = nullptr)
{
  LinearSystem sys = assemble_system(std::move(mesh), params, map, g, std::move(flat));
  sys.options = solver_options(cfg);
  return sys;
}

void require_poincare(const DiscreteField &u)
{
  const PoincareCheck pc = poincare_check(u);
  if (!pc.holds)
  {
    throw InvariantViolation(fmt::format("Poincare inequality fails: {:.6e} > {:.6e}", pc.l2_sq, pc.bound));
  }
}

// Cubic Lagrange interpolation in z over the four nodes around z3.
Vec3c interpolate_column(const std::vector<double> &z, const std::vector<Vec3c> &vals, double z3)
{
  const int Nz = static_cast<int>(z.size()) - 1;
  const auto it = std::upper_bound(z.begin(), z.end(), z3);
  int e = static_cast<int>(it - z.begin()) - 1;
  e = std::clamp(e, 0, Nz - 1);
  const int i0 = std::clamp(e - 1, 0, Nz - 3);
  Vec3c out = Vec3c::Zero();
  for (int a = i0; a < i0 + 4; ++a)
  {
    double w = 1.0;
    for (int b = i0; b < i0 + 4; ++b)
    {
      if (b != a)
      {
        w *= (z3 - z[b]) / (z[a] - z[b]);
      }
    }
    out += w * vals[a];
  }
  return out;
}

// Values of a field on the natural collocation grid, one vector per node (node 0 included).
std::vector<std::vector<Vec3c>> nodal_values(const DiscreteField &u, const FourierTransform &ft)
{
  const StripMesh &m = *u.mesh;
  const int nk = m.grid.size();
  std::vector<std::vector<Vec3c>> out(m.Nz() + 1, std::vector<Vec3c>(ft.points(), Vec3c::Zero()));
  std::vector<Vec3c> modes(nk);
  for (int node = 1; node <= m.Nz(); ++node)
  {
    for (int k = 0; k < nk; ++k)
    {
      modes[k] = u.at(k, node);
    }
    for (int c = 0; c < 3; ++c)
    {
      ft.to_physical(modes[0].data() + c, out[node][0].data() + c, 3);
    }
  }
  return out;
}

PushforwardLevel pushforward_level(const RandomSample &sample, const RunConfig &cfg, int Nz)
{
  RunConfig c = cfg;
  c.Nz = Nz;
  if (Nz < 3)
  {
    throw ConstraintViolation("the push-forward comparison needs at least three elements");
  }
  const ElasticParams params = validate_params(c.lambda, c.mu, c.omega);
  const SurfaceProfile f0 = make_profile(c.f0, c.geometry, solver_points(c));
  const SurfaceProfile &f = sample.surface;
  const CutoffFn cut = configured_cutoff(c, f0);
  const auto mesh = make_run_mesh(c);
  const double zb = mesh->z_bottom(), h = mesh->h();

  const StripMap map_a(f0, f, cut, zb, h);
  const StripMap map_b(f, f, cut, zb, h);
  const SourceTerm g = sample.source;
  const SourceFn g_b = [&](const Eigen::Vector3d &x) {
    return Eigen::Vector3cd(g.value(inverse_transform(x, f0, f, cut)));
  };

  const LinearSystem sys_a = build(mesh, params, map_a, as_source_fn(g), c);
  const LinearSystem sys_b = build(mesh, params, map_b, g_b, c);
  const DiscreteField u_a = solve_field(sys_a);
  const DiscreteField u_b = solve_field(sys_b);
  require_energy_balance(energy_balance(u_a, sys_a));
  require_energy_balance(energy_balance(u_b, sys_b));
  require_poincare(u_a);
  require_poincare(u_b);

  const SpectralGrid &grid = mesh->grid;
  const FourierTransform ft(grid, grid.n1(), grid.n2());
  const auto va = nodal_values(u_a, ft);
  const auto vb = nodal_values(u_b, ft);
  std::vector<std::vector<Vec3c>> diff(Nz + 1, std::vector<Vec3c>(ft.points(), Vec3c::Zero()));
  std::vector<Vec3c> column(Nz + 1);
  for (int p = 0; p < ft.points(); ++p)
  {
    const auto x = ft.point(p);
    const StripMap::Column ca = map_a.column(x[0], x[1]);
    const StripMap::Column cb = map_b.column(x[0], x[1]);
    for (int node = 0; node <= Nz; ++node)
    {
      column[node] = vb[node][p];
    }
    for (int node = 1; node <= Nz; ++node)
    {
      const double x3 = map_a.eval(ca, mesh->z[node]).x3;
      const double z_b = map_b.box_height_of_physical(cb, x3);
      diff[node][p] = va[node][p] - interpolate_column(mesh->z, column, z_b);
    }
  }

  DiscreteField d;
  d.mesh = mesh;
  d.coefficients = CVec::Zero(mesh->unknowns());
  std::vector<Vec3c> modes(grid.size());
  for (int node = 1; node <= Nz; ++node)
  {
    for (int c3 = 0; c3 < 3; ++c3)
    {
      ft.to_modes(diff[node][0].data() + c3, modes[0].data() + c3, 3);
    }
    for (int k = 0; k < grid.size(); ++k)
    {
      d.coefficients.segment<3>(mesh->dof(k, node, 0)) = modes[k];
    }
  }
  PushforwardLevel lvl;
  lvl.Nz = Nz;
  lvl.u_norm = vh_norm(u_a);
  lvl.difference = lvl.u_norm > 0.0 ? vh_norm(d) / lvl.u_norm : vh_norm(d);
  return lvl;
}

}  // namespace

ProfileSpec configured_surface(const RunConfig &cfg)
{
  ProfileSpec f = cfg.f0;
  f.terms.insert(f.terms.end(), cfg.perturbation.begin(), cfg.perturbation.end());
  return f;
}

double box_bottom(const RunConfig &cfg)
{
  return cfg.f0.offset;
}

std::shared_ptr<const StripMesh> make_run_mesh(const RunConfig &cfg)
{
  const SpectralGrid grid(cfg.N1, cfg.N2, cfg.geometry.cell);
  const double zb = box_bottom(cfg);
  return std::make_shared<const StripMesh>(make_mesh(grid, zb, cfg.geometry.h, cfg.Nz, cfg.quad_points, zb + cfg.delta));
}

CutoffFn configured_cutoff(const RunConfig &cfg, const SurfaceProfile &f0)
{
  return CutoffFn(cfg.delta, cfg.geometry.h - f0.f_max);
}

RunReport deterministic_run(const RunConfig &cfg)
{
  const auto t0 = Clock::now();
  RunReport rep;
  rep.config = cfg;
  const ElasticParams params = validate_params(cfg.lambda, cfg.mu, cfg.omega);
  validate_geometry(cfg.geometry);
  const SurfaceProfile f0 = make_profile(cfg.f0, cfg.geometry, solver_points(cfg));
  const SurfaceProfile f = make_profile(configured_surface(cfg), cfg.geometry, solver_points(cfg));
  const SourceTerm g = configured_source(cfg);
  validate_source(g, f.f_max, cfg.geometry.h);

  const auto mesh = make_run_mesh(cfg);
  const StripMap map(f, f, configured_cutoff(cfg, f0), mesh->z_bottom(), mesh->h());
  const LinearSystem sys = build(mesh, params, map, as_source_fn(g), cfg);
  rep.unknowns = mesh->unknowns();
  const DiscreteField u = solve_field(sys, &rep.solve);

  rep.energy = energy_balance(u, sys);
  try
  {
    require_energy_balance(rep.energy);
  }
  catch (const InvariantViolation &e)
  {
    rep.invariant_failure = e.what();
  }
  rep.poincare = poincare_check(u);
  if (!rep.poincare.holds && rep.invariant_failure.empty())
  {
    rep.invariant_failure = fmt::format("Poincare inequality fails: {:.6e} > {:.6e}", rep.poincare.l2_sq,
                                        rep.poincare.bound);
  }

  rep.u_norm = vh_norm_physical(u, map);
  const SourceNorms gn = source_norms(g, *mesh, map);
  rep.g_l2 = gn.l2;
  rep.g_h1 = gn.h1;
  rep.lipschitz = f.lipschitz;
  rep.bound = bound_constants(params, cfg.geometry, f.lipschitz, cfg.generic_C);
  rep.bound.measured_ratio = rep.g_h1 > 0.0 ? rep.u_norm / (rep.bound.total_bound * rep.g_h1) : 0.0;
  rep.wall_seconds = seconds_since(t0);
  return rep;
}

SweepAxis parse_sweep_axis(const std::string &name)
{
  if (name == "omega")
  {
    return SweepAxis::Omega;
  }
  if (name == "h")
  {
    return SweepAxis::H;
  }
  if (name == "L_amplitude")
  {
    return SweepAxis::LAmplitude;
  }
  throw ConfigError("unknown sweep axis '" + name + "' (expected omega, h or L_amplitude)");
}

std::string sweep_axis_name(SweepAxis axis)
{
  switch (axis)
  {
  case SweepAxis::Omega:
    return "omega";
  case SweepAxis::H:
    return "h";
  case SweepAxis::LAmplitude:
    return "L_amplitude";
  }
  return "";
}

RunConfig sweep_point_config(const RunConfig &cfg, SweepAxis axis, double value)
{
  if (!std::isfinite(value))
  {
    throw ConstraintViolation("sweep values must be finite");
  }
  RunConfig c = cfg;
  switch (axis)
  {
  case SweepAxis::Omega:
    c.omega = value;
    break;
  case SweepAxis::H:
    c.geometry.h = value;
    break;
  case SweepAxis::LAmplitude:
    for (auto &t : c.perturbation)
    {
      t.a *= value;
      t.b *= value;
    }
    break;
  }
  validate_config(c);
  return c;
}

SweepTable parameter_sweep(const RunConfig &cfg, SweepAxis axis, const std::vector<double> &values)
{
  SweepTable table;
  table.axis = axis;
  table.points.resize(values.size());
  parallel_for(static_cast<int>(values.size()), [&](int i) {
    SweepPoint &pt = table.points[i];
    pt.value = values[i];
    try
    {
      pt.report = deterministic_run(sweep_point_config(cfg, axis, values[i]));
    }
    catch (const std::exception &e)
    {
      pt.error = e.what();
    }
  });
  return table;
}

EnsembleLaw configured_law(const RunConfig &cfg)
{
  EnsembleLaw law;
  law.modes = cfg.ensemble;
  law.M0 = cfg.M0;
  law.source_templates = cfg.source;
  law.amp_scale = cfg.amp_scale;
  return law;
}

McReport monte_carlo(const RunConfig &cfg, int n, std::uint64_t seed)
{
  if (n < 1)
  {
    throw ConstraintViolation("monte_carlo needs n >= 1");
  }
  const auto t0 = Clock::now();
  McReport rep;
  rep.config = cfg;
  rep.n_samples = n;
  rep.seed = seed;
  const ElasticParams params = validate_params(cfg.lambda, cfg.mu, cfg.omega);
  const SurfaceProfile f0 = make_profile(cfg.f0, cfg.geometry, solver_points(cfg));
  const CutoffFn cut = configured_cutoff(cfg, f0);
  const EnsembleLaw law = configured_law(cfg);
  const auto samples = sample_ensemble(seed, n, law, cfg.geometry, f0, solver_points(cfg));

  const auto mesh = make_run_mesh(cfg);
  const auto flat = std::make_shared<const FlatOperator>(mesh, params);
  const StripMap reference(f0, f0, cut, mesh->z_bottom(), mesh->h());

  rep.samples.resize(n);
  parallel_for(n, [&](int i) {
    const RandomSample &s = samples[i];
    McSample &out = rep.samples[i];
    out.sample_id = s.sample_id;
    out.rejections = s.rejections;
    out.distance_to_reference = s.distance_to_reference;
    try
    {
      const StripMap map(f0, s.surface, cut, mesh->z_bottom(), mesh->h());
      const LinearSystem sys = build(mesh, params, map, as_source_fn(s.source), cfg, flat);
      SolveStats st;
      const DiscreteField u = solve_field(sys, &st);
      out.iterations = st.iterations;
      out.relative_residual = st.relative_residual;
      const EnergyBalance eb = energy_balance(u, sys);
      out.energy_residual = eb.residual;
      require_energy_balance(eb);
      require_poincare(u);
      out.u_h1_sq = std::pow(vh_norm_physical(u, reference), 2);
      out.g_h1_sq = std::pow(source_norms(s.source, *mesh, reference).h1, 2);
      out.ok = true;
    }
    catch (const std::exception &e)
    {
      out.error = e.what();
    }
  });

  // Accumulate in sample_id order.
  double su = 0.0, sg = 0.0;
  for (const auto &s : rep.samples)
  {
    if (s.ok)
    {
      ++rep.n_completed;
      su += s.u_h1_sq;
      sg += s.g_h1_sq;
    }
  }
  rep.completeness = static_cast<double>(rep.n_completed) / n;
  if (rep.n_completed > 0)
  {
    rep.mean_u_sq = su / rep.n_completed;
    rep.mean_g_sq = sg / rep.n_completed;
  }
  if (rep.n_completed > 1)
  {
    double vu = 0.0, vg = 0.0;
    for (const auto &s : rep.samples)
    {
      if (s.ok)
      {
        vu += std::pow(s.u_h1_sq - rep.mean_u_sq, 2);
        vg += std::pow(s.g_h1_sq - rep.mean_g_sq, 2);
      }
    }
    const double m = rep.n_completed;
    rep.stderr_u_sq = std::sqrt(vu / (m - 1.0) / m);
    rep.stderr_g_sq = std::sqrt(vg / (m - 1.0) / m);
  }
  rep.L0 = cfg.M0 + f0.lipschitz;
  rep.bound = bound_constants(params, cfg.geometry, rep.L0, cfg.generic_C);
  rep.stochastic_factor = stochastic_factor(rep.bound, cfg.geometry);
  rep.ratio = rep.mean_g_sq > 0.0 ? rep.mean_u_sq / (rep.stochastic_factor * rep.mean_g_sq) : 0.0;
  rep.wall_seconds = seconds_since(t0);
  return rep;
}

double pushforward_check(const RandomSample &sample, const RunConfig &cfg)
{
  return pushforward_level(sample, cfg, cfg.Nz).difference;
}

PushforwardReport pushforward_study(const RandomSample &sample, const RunConfig &cfg, const std::vector<int> &Nz)
{
  PushforwardReport rep;
  const SurfaceProfile f0 = make_profile(cfg.f0, cfg.geometry, solver_points(cfg));
  rep.sample_distance = sobolev_sup_distance(sample.surface, f0, solver_points(cfg));
  for (int n : Nz)
  {
    rep.levels.push_back(pushforward_level(sample, cfg, n));
  }
  for (std::size_t i = 1; i < rep.levels.size(); ++i)
  {
    const auto &a = rep.levels[i - 1], &b = rep.levels[i];
    rep.orders.push_back(std::log(a.difference / b.difference) / std::log(static_cast<double>(b.Nz) / a.Nz));
  }
  return rep;
}

}  // namespace elastorough
