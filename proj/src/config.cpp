#include "elastorough/config.hpp"

#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "elastorough/errors.hpp"

namespace elastorough
{

using nlohmann::json;

namespace
{

// Strict reader for one JSON object: unknown keys and type mismatches raise ConfigError
// with the dotted key path.
class Section
{
public:
  Section(const json &j, std::string path) : j_(j), path_(std::move(path))
  {
    if (!j_.is_object())
    {
      throw ConfigError("'" + path_ + "' must be an object");
    }
  }

  void allow(std::initializer_list<const char *> keys) const
  {
    std::set<std::string> ok(keys.begin(), keys.end());
    for (auto it = j_.begin(); it != j_.end(); ++it)
    {
      if (!ok.count(it.key()))
      {
        throw ConfigError("unknown key '" + key(it.key()) + "'");
      }
    }
  }

  bool has(const char *k) const { return j_.contains(k); }

  const json &at(const char *k) const
  {
    if (!j_.contains(k))
    {
      throw ConfigError("missing required key '" + key(k) + "'");
    }
    return j_.at(k);
  }

  double number(const char *k) const
  {
    const json &v = at(k);
    if (!v.is_number())
    {
      throw ConfigError("'" + key(k) + "' must be a number");
    }
    return v.get<double>();
  }

  double number(const char *k, double fallback) const { return has(k) ? number(k) : fallback; }

  long long integer(const char *k) const
  {
    const json &v = at(k);
    if (!v.is_number_integer())
    {
      throw ConfigError("'" + key(k) + "' must be an integer");
    }
    return v.get<long long>();
  }

  long long integer(const char *k, long long fallback) const { return has(k) ? integer(k) : fallback; }

  std::string key(const std::string &k) const { return path_.empty() ? k : path_ + "." + k; }

  Section sub(const char *k) const { return Section(at(k), key(k)); }

private:
  const json &j_;
  std::string path_;
};

const json &array_at(const Section &s, const char *k)
{
  const json &v = s.at(k);
  if (!v.is_array())
  {
    throw ConfigError("'" + s.key(k) + "' must be an array");
  }
  return v;
}

FourierTerm read_term(const Section &s)
{
  s.allow({"j1", "j2", "a", "b"});
  return {static_cast<int>(s.integer("j1")), static_cast<int>(s.integer("j2")), s.number("a", 0.0),
          s.number("b", 0.0)};
}

std::complex<double> read_complex(const json &v, const std::string &path)
{
  if (v.is_number())
  {
    return {v.get<double>(), 0.0};
  }
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
  {
    return {v[0].get<double>(), v[1].get<double>()};
  }
  throw ConfigError("'" + path + "' must be a number or a [re, im] pair");
}

SourceBump read_bump(const Section &s)
{
  s.allow({"j1", "j2", "amp", "center", "width", "lo", "hi"});
  SourceBump b;
  b.j1 = static_cast<int>(s.integer("j1", 0));
  b.j2 = static_cast<int>(s.integer("j2", 0));
  const json &amp = array_at(s, "amp");
  if (amp.size() != 3)
  {
    throw ConfigError("'" + s.key("amp") + "' must have three components");
  }
  for (int c = 0; c < 3; ++c)
  {
    b.amp(c) = read_complex(amp[c], s.key("amp") + "[" + std::to_string(c) + "]");
  }
  b.center = s.number("center");
  b.width = s.number("width");
  b.lo = s.number("lo");
  b.hi = s.number("hi");
  return b;
}

}  // namespace

bool RunConfig::operator==(const RunConfig &o) const
{
  auto same_bumps = [](const std::vector<SourceBump> &a, const std::vector<SourceBump> &b) {
    if (a.size() != b.size())
    {
      return false;
    }
    for (std::size_t i = 0; i < a.size(); ++i)
    {
      if (a[i].j1 != b[i].j1 || a[i].j2 != b[i].j2 || a[i].amp != b[i].amp || a[i].center != b[i].center ||
          a[i].width != b[i].width || a[i].lo != b[i].lo || a[i].hi != b[i].hi)
      {
        return false;
      }
    }
    return true;
  };
  auto same_modes = [](const std::vector<PerturbationMode> &a, const std::vector<PerturbationMode> &b) {
    if (a.size() != b.size())
    {
      return false;
    }
    for (std::size_t i = 0; i < a.size(); ++i)
    {
      if (a[i].j1 != b[i].j1 || a[i].j2 != b[i].j2 || a[i].scale != b[i].scale)
      {
        return false;
      }
    }
    return true;
  };
  return lambda == o.lambda && mu == o.mu && omega == o.omega && geometry.m == o.geometry.m &&
         geometry.M_sup == o.geometry.M_sup && geometry.h == o.geometry.h && geometry.cell == o.geometry.cell &&
         f0 == o.f0 && perturbation == o.perturbation && same_modes(ensemble, o.ensemble) && M0 == o.M0 &&
         delta == o.delta && same_bumps(source, o.source) && amp_scale == o.amp_scale && N1 == o.N1 &&
         N2 == o.N2 && Nz == o.Nz && quad_points == o.quad_points && rtol == o.rtol && restart == o.restart &&
         iteration_cap_factor == o.iteration_cap_factor && seed == o.seed && n_samples == o.n_samples &&
         output_dir == o.output_dir && generic_C == o.generic_C && threads == o.threads &&
         verify_samples == o.verify_samples;
}

RunConfig config_from_json(const json &j)
{
  const Section root(j, "");
  root.allow({"physics", "geometry", "surface", "source", "discretization", "run"});
  RunConfig cfg;

  const Section phys = root.sub("physics");
  phys.allow({"lambda", "mu", "omega"});
  cfg.lambda = phys.number("lambda");
  cfg.mu = phys.number("mu");
  cfg.omega = phys.number("omega");

  const Section geo = root.sub("geometry");
  geo.allow({"m", "M_sup", "h", "cell"});
  cfg.geometry.m = geo.number("m");
  cfg.geometry.M_sup = geo.number("M_sup");
  cfg.geometry.h = geo.number("h");
  const json &cell = array_at(geo, "cell");
  if (cell.size() != 2 || !cell[0].is_number() || !cell[1].is_number())
  {
    throw ConfigError("'geometry.cell' must be a pair of numbers");
  }
  cfg.geometry.cell = {cell[0].get<double>(), cell[1].get<double>()};

  if (root.has("surface"))
  {
    const Section surf = root.sub("surface");
    surf.allow({"f0", "perturbation", "ensemble", "M0", "delta"});
    if (surf.has("f0"))
    {
      const Section f0 = surf.sub("f0");
      f0.allow({"offset", "terms"});
      cfg.f0.offset = f0.number("offset");
      cfg.f0.terms.clear();
      if (f0.has("terms"))
      {
        const json &terms = array_at(f0, "terms");
        for (std::size_t i = 0; i < terms.size(); ++i)
        {
          cfg.f0.terms.push_back(read_term(Section(terms[i], f0.key("terms") + "[" + std::to_string(i) + "]")));
        }
      }
    }
    if (surf.has("perturbation"))
    {
      const json &terms = array_at(surf, "perturbation");
      for (std::size_t i = 0; i < terms.size(); ++i)
      {
        cfg.perturbation.push_back(read_term(Section(terms[i], "surface.perturbation[" + std::to_string(i) + "]")));
      }
    }
    if (surf.has("ensemble"))
    {
      const json &modes = array_at(surf, "ensemble");
      for (std::size_t i = 0; i < modes.size(); ++i)
      {
        const Section m(modes[i], "surface.ensemble[" + std::to_string(i) + "]");
        m.allow({"j1", "j2", "scale"});
        cfg.ensemble.push_back({static_cast<int>(m.integer("j1")), static_cast<int>(m.integer("j2")),
                                m.number("scale")});
      }
    }
    cfg.M0 = surf.number("M0", cfg.M0);
    cfg.delta = surf.number("delta", cfg.delta);
  }

  if (root.has("source"))
  {
    const Section src = root.sub("source");
    src.allow({"bumps", "amp_scale"});
    if (src.has("bumps"))
    {
      const json &bumps = array_at(src, "bumps");
      for (std::size_t i = 0; i < bumps.size(); ++i)
      {
        cfg.source.push_back(read_bump(Section(bumps[i], "source.bumps[" + std::to_string(i) + "]")));
      }
    }
    cfg.amp_scale = src.number("amp_scale", cfg.amp_scale);
  }

  const Section disc = root.sub("discretization");
  disc.allow({"N1", "N2", "Nz", "quad_points", "rtol", "restart", "iteration_cap_factor"});
  cfg.N1 = static_cast<int>(disc.integer("N1"));
  cfg.N2 = static_cast<int>(disc.integer("N2"));
  cfg.Nz = static_cast<int>(disc.integer("Nz"));
  cfg.quad_points = static_cast<int>(disc.integer("quad_points", cfg.quad_points));
  cfg.rtol = disc.number("rtol", cfg.rtol);
  cfg.restart = static_cast<int>(disc.integer("restart", cfg.restart));
  cfg.iteration_cap_factor = disc.number("iteration_cap_factor", cfg.iteration_cap_factor);

  if (root.has("run"))
  {
    const Section run = root.sub("run");
    run.allow({"seed", "n_samples", "output_dir", "generic_C", "threads", "verify_samples"});
    if (run.has("seed"))
    {
      const json &s = run.at("seed");
      if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0))
      {
        throw ConfigError("'run.seed' must be a nonnegative integer");
      }
      cfg.seed = s.get<std::uint64_t>();
    }
    cfg.n_samples = static_cast<int>(run.integer("n_samples", cfg.n_samples));
    if (run.has("output_dir"))
    {
      if (!run.at("output_dir").is_string())
      {
        throw ConfigError("'run.output_dir' must be a string");
      }
      cfg.output_dir = run.at("output_dir").get<std::string>();
    }
    cfg.generic_C = run.number("generic_C", cfg.generic_C);
    cfg.threads = static_cast<int>(run.integer("threads", cfg.threads));
    cfg.verify_samples = static_cast<int>(run.integer("verify_samples", cfg.verify_samples));
  }
  validate_config(cfg);
  return cfg;
}

RunConfig load_config(const std::string &path)
{
  std::ifstream in(path);
  if (!in)
  {
    throw ConfigError("cannot open config file '" + path + "'");
  }
  json j;
  try
  {
    j = json::parse(in);
  }
  catch (const json::parse_error &e)
  {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return config_from_json(j);
}

json config_to_json(const RunConfig &c)
{
  auto term = [](const FourierTerm &t) { return json{{"j1", t.j1}, {"j2", t.j2}, {"a", t.a}, {"b", t.b}}; };
  json f0_terms = json::array(), pert = json::array(), ens = json::array(), bumps = json::array();
  for (const auto &t : c.f0.terms)
  {
    f0_terms.push_back(term(t));
  }
  for (const auto &t : c.perturbation)
  {
    pert.push_back(term(t));
  }
  for (const auto &m : c.ensemble)
  {
    ens.push_back({{"j1", m.j1}, {"j2", m.j2}, {"scale", m.scale}});
  }
  for (const auto &b : c.source)
  {
    json amp = json::array();
    for (int i = 0; i < 3; ++i)
    {
      amp.push_back({b.amp(i).real(), b.amp(i).imag()});
    }
    bumps.push_back({{"j1", b.j1}, {"j2", b.j2}, {"amp", amp}, {"center", b.center}, {"width", b.width},
                     {"lo", b.lo}, {"hi", b.hi}});
  }
  return json{
    {"physics", {{"lambda", c.lambda}, {"mu", c.mu}, {"omega", c.omega}}},
    {"geometry",
     {{"m", c.geometry.m}, {"M_sup", c.geometry.M_sup}, {"h", c.geometry.h}, {"cell", {c.geometry.cell[0], c.geometry.cell[1]}}}},
    {"surface",
     {{"f0", {{"offset", c.f0.offset}, {"terms", f0_terms}}},
      {"perturbation", pert},
      {"ensemble", ens},
      {"M0", c.M0},
      {"delta", c.delta}}},
    {"source", {{"bumps", bumps}, {"amp_scale", c.amp_scale}}},
    {"discretization",
     {{"N1", c.N1}, {"N2", c.N2}, {"Nz", c.Nz}, {"quad_points", c.quad_points}, {"rtol", c.rtol},
      {"restart", c.restart}, {"iteration_cap_factor", c.iteration_cap_factor}}},
    {"run",
     {{"seed", c.seed}, {"n_samples", c.n_samples}, {"output_dir", c.output_dir}, {"generic_C", c.generic_C},
      {"threads", c.threads}, {"verify_samples", c.verify_samples}}},
  };
}

void validate_config(const RunConfig &c)
{
  try
  {
    validate_params(c.lambda, c.mu, c.omega);
    validate_geometry(c.geometry);
    if (c.N1 < 0 || c.N2 < 0)
    {
      throw ConstraintViolation("discretization.N1 and N2 must be nonnegative");
    }
    if (c.Nz < 2)
    {
      throw ConstraintViolation("discretization.Nz must be at least 2");
    }
    if (c.quad_points < 2 || c.quad_points > 5)
    {
      throw ConstraintViolation("discretization.quad_points must be between 2 and 5");
    }
    if (!(c.rtol > 0.0 && c.rtol < 1.0) || c.restart < 1 || !(c.iteration_cap_factor > 0.0))
    {
      throw ConstraintViolation("solver tolerances must be positive (rtol < 1, restart >= 1)");
    }
    if (c.n_samples < 1 || c.threads < 1 || c.verify_samples < 1)
    {
      throw ConstraintViolation("run.n_samples, run.threads and run.verify_samples must be positive");
    }
    if (!(c.generic_C > 0.0))
    {
      throw ConstraintViolation("run.generic_C must be positive");
    }
    if (!(c.M0 > 0.0))
    {
      throw ConstraintViolation("surface.M0 must be positive");
    }
    const std::array<int, 2> pts = {2 * c.N1 + 1, 2 * c.N2 + 1};
    const SurfaceProfile f0 = make_profile(c.f0, c.geometry, pts);
    validate_gap_condition(c.geometry, f0.f_max);
    CutoffFn(c.delta, c.geometry.h - f0.f_max);
    ProfileSpec f = c.f0;
    f.terms.insert(f.terms.end(), c.perturbation.begin(), c.perturbation.end());
    const SurfaceProfile fp = make_profile(f, c.geometry, pts);
    SourceTerm g;
    g.cell = c.geometry.cell;
    g.bumps = c.source;
    validate_source(g, std::max(f0.f_max, fp.f_max), c.geometry.h);
  }
  catch (const ConfigError &)
  {
    throw;
  }
  catch (const ConstraintViolation &e)
  {
    throw ConfigError(e.what());
  }
}

RunConfig default_config()
{
  RunConfig c;
  SourceBump b;
  b.j1 = 1;
  b.j2 = 0;
  b.amp << 1.0, std::complex<double>(0.0, 0.5), 0.5;
  b.center = 0.8;
  b.width = 0.15;
  b.lo = 0.5;
  b.hi = 1.15;
  c.source.push_back(b);
  SourceBump b0 = b;
  b0.j1 = 0;
  b0.amp << 0.3, 0.2, std::complex<double>(1.0, 0.0);
  c.source.push_back(b0);
  c.ensemble = {{1, 0, 0.005}, {0, 1, 0.005}, {1, 1, 0.003}};
  return c;
}

}  // namespace elastorough
