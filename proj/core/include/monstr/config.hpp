#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "monstr/agents.hpp"
#include "monstr/core.hpp"
#include "monstr/elasticity.hpp"
#include "monstr/mace.hpp"
#include "monstr/phantom.hpp"

namespace monstr {

/// Everything needed to simulate and reconstruct the reference study.
///
/// The JSON form has exactly six sections (geometry, elasticity, phantom,
/// agents, mace, experiments). Every key is required and unknown keys are
/// rejected; errors name the dotted key path, e.g. "elasticity.poisson_ratio".
struct RunConfig {
  Geometry geometry = Geometry::reference();
  double youngs_modulus = 1.0;
  double poisson_ratio = 0.3;
  BeamPhantomParams phantom;
  AgentParams agents;
  int max_iters = 50;
  ExperimentSettings experiments;

  ElasticityModel elasticity() const { return ElasticityModel(youngs_modulus, poisson_ratio); }
  /// Phantom parameters with the material taken from the elasticity section.
  BeamPhantomParams phantom_params() const;
  MaceOptions mace_options(bool enable_equilibrium) const;
  /// Agent parameters with the experiment's overrides applied.
  AgentParams agents_for(const ExperimentSpec& experiment) const;
  std::vector<ExperimentSpec> experiment_list() const;
};

RunConfig default_config();
RunConfig parse_config(std::string_view json_text);
RunConfig load_config(const std::filesystem::path& path);

/// Canonical JSON (sorted keys, two-space indent) that parse_config accepts.
std::string config_to_json(const RunConfig& config);

}  // namespace monstr
