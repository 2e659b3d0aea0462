#ifndef ELASTOROUGH_CONFIG_HPP
#define ELASTOROUGH_CONFIG_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "elastorough/elastic_core.hpp"
#include "elastorough/geometry.hpp"
#include "elastorough/random_ensemble.hpp"

namespace elastorough
{

struct RunConfig
{
  // physics
  double lambda = 1.0, mu = 1.0, omega = 1.0;
  // geometry
  StripGeometry geometry;
  // surface: reference profile, deterministic perturbation, ensemble law
  ProfileSpec f0{0.25, {}};
  std::vector<FourierTerm> perturbation;
  std::vector<PerturbationMode> ensemble;
  double M0 = 0.1;
  double delta = 0.125;
  // source
  std::vector<SourceBump> source;
  double amp_scale = 1.0;
  // discretization
  int N1 = 4, N2 = 4, Nz = 32, quad_points = 3;
  double rtol = 1e-12;
  int restart = 60;
  double iteration_cap_factor = 10.0;
  // run
  std::uint64_t seed = 1;
  int n_samples = 8;
  std::string output_dir = "out";
  double generic_C = 1.0;
  int threads = 1;
  int verify_samples = 10000;

  bool operator==(const RunConfig &other) const;
};

// Parses and validates; throws ConfigError naming the offending key.
RunConfig config_from_json(const nlohmann::json &j);
RunConfig load_config(const std::string &path);
nlohmann::json config_to_json(const RunConfig &cfg);

// Re-runs the module-level checks (parameters, geometry, profiles, source support).
void validate_config(const RunConfig &cfg);

RunConfig default_config();

}  // namespace elastorough

#endif  // ELASTOROUGH_CONFIG_HPP
