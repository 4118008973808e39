#include "monstr/config.hpp"

#include <cmath>
#include <set>

#include "json.hpp"
#include "monstr/field_io.hpp"

namespace monstr {
namespace {

using nlohmann::json;

class Section {
 public:
  Section(const json& node, std::string path, std::set<std::string> keys)
      : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) throw ConfigError("'" + path_ + "' must be an object");
    for (const auto& [key, value] : node_.items()) {
      if (!keys.contains(key)) throw ConfigError("unknown key '" + join(key) + "'");
    }
    for (const auto& key : keys) {
      if (!node_.contains(key)) throw ConfigError("missing key '" + join(key) + "'");
    }
  }

  double number(const std::string& key) const {
    const json& v = node_.at(key);
    if (!v.is_number()) throw ConfigError("'" + join(key) + "' must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError("'" + join(key) + "' must be finite");
    return d;
  }

  std::uint64_t count(const std::string& key) const {
    const json& v = node_.at(key);
    if (!v.is_number_unsigned()) {
      throw ConfigError("'" + join(key) + "' must be a non-negative integer");
    }
    return v.get<std::uint64_t>();
  }

  std::string text(const std::string& key) const {
    const json& v = node_.at(key);
    if (!v.is_string()) throw ConfigError("'" + join(key) + "' must be a string");
    return v.get<std::string>();
  }

  Section child(const std::string& key, std::set<std::string> keys) const {
    return Section(node_.at(key), join(key), std::move(keys));
  }

 private:
  std::string join(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const json& node_;
  std::string path_;
};

json to_json(const RunConfig& c) {
  const auto& a = c.agents;
  return json{
      {"geometry",
       {{"rows", c.geometry.grid_rows},
        {"cols", c.geometry.grid_cols},
        {"num_views", c.geometry.num_views},
        {"num_detector_cols", c.geometry.num_detector_cols}}},
      {"elasticity", {{"youngs_modulus", c.youngs_modulus}, {"poisson_ratio", c.poisson_ratio}}},
      {"phantom",
       {{"length", c.phantom.length},
        {"width", c.phantom.width},
        {"peak_strain_microstrain", c.phantom.peak_strain_microstrain},
        {"layout", std::string(layout_name(c.phantom.layout))}}},
      {"agents",
       {{"alpha_y", a.alpha_y},
        {"alpha_v", a.alpha_v},
        {"alpha_e", a.alpha_e},
        {"qggmrf",
         {{"q", a.qggmrf.q}, {"p", a.qggmrf.p}, {"T", a.qggmrf.T}, {"sigma_x", a.qggmrf.sigma_x}}},
        {"recon_inner_iters", a.recon_inner_iters},
        {"equil_sweeps", a.equil_sweeps},
        {"cg_tol", a.cg_tol}}},
      {"mace", {{"max_iters", c.max_iters}}},
      {"experiments",
       {{"sparse_views", c.experiments.sparse_views},
        {"noise_microstrain", c.experiments.noise_microstrain},
        {"seed", c.experiments.seed},
        {"noisy_agents",
         {{"alpha_y", c.experiments.noisy_alpha_y}, {"alpha_v", c.experiments.noisy_alpha_v}}}}},
  };
}

int as_int(std::uint64_t v, const char* key) {
  if (v > 1'000'000'000ULL) throw ConfigError(std::string("'") + key + "' is too large");
  return static_cast<int>(v);
}

}  // namespace

BeamPhantomParams RunConfig::phantom_params() const {
  BeamPhantomParams p = phantom;
  p.youngs_modulus = youngs_modulus;
  p.poisson_ratio = poisson_ratio;
  return p;
}

MaceOptions RunConfig::mace_options(bool enable_equilibrium) const {
  return MaceOptions{max_iters, enable_equilibrium};
}

AgentParams RunConfig::agents_for(const ExperimentSpec& experiment) const {
  AgentParams a = agents;
  if (experiment.alpha_y) a.alpha_y = *experiment.alpha_y;
  if (experiment.alpha_v) a.alpha_v = *experiment.alpha_v;
  return a;
}

std::vector<ExperimentSpec> RunConfig::experiment_list() const {
  return reference_experiments(geometry.num_views, experiments);
}

RunConfig default_config() { return RunConfig{}; }

RunConfig parse_config(std::string_view text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  const Section top(root, "",
                    {"geometry", "elasticity", "phantom", "agents", "mace", "experiments"});
  RunConfig c;

  const auto geo = top.child("geometry", {"rows", "cols", "num_views", "num_detector_cols"});
  c.geometry = Geometry::uniform(geo.count("rows"), geo.count("cols"), geo.count("num_views"),
                                 geo.count("num_detector_cols"));
  try {
    c.geometry.validate();
  } catch (const ShapeError& e) {
    throw ConfigError(std::string("geometry: ") + e.what());
  }

  const auto el = top.child("elasticity", {"youngs_modulus", "poisson_ratio"});
  c.youngs_modulus = el.number("youngs_modulus");
  c.poisson_ratio = el.number("poisson_ratio");
  (void)c.elasticity();  // validates the material

  const auto ph = top.child("phantom", {"length", "width", "peak_strain_microstrain", "layout"});
  try {
    c.phantom.layout = parse_layout(ph.text("layout"));
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("'phantom.layout': ") + e.what());
  }
  c.phantom.length = ph.number("length");
  c.phantom.width = ph.number("width");
  c.phantom.peak_strain_microstrain = ph.number("peak_strain_microstrain");
  if (!(c.phantom.peak_strain_microstrain > 0.0)) {
    throw ConfigError("'phantom.peak_strain_microstrain' must be positive");
  }

  const auto ag = top.child("agents", {"alpha_y", "alpha_v", "alpha_e", "qggmrf",
                                       "recon_inner_iters", "equil_sweeps", "cg_tol"});
  c.agents.alpha_y = ag.number("alpha_y");
  c.agents.alpha_v = ag.number("alpha_v");
  c.agents.alpha_e = ag.number("alpha_e");
  const auto qg = ag.child("qggmrf", {"q", "p", "T", "sigma_x"});
  c.agents.qggmrf.q = qg.number("q");
  c.agents.qggmrf.p = qg.number("p");
  c.agents.qggmrf.T = qg.number("T");
  c.agents.qggmrf.sigma_x = qg.number("sigma_x");
  c.agents.recon_inner_iters = as_int(ag.count("recon_inner_iters"), "agents.recon_inner_iters");
  c.agents.equil_sweeps = as_int(ag.count("equil_sweeps"), "agents.equil_sweeps");
  c.agents.cg_tol = ag.number("cg_tol");
  c.agents.validate();

  const auto mc = top.child("mace", {"max_iters"});
  c.max_iters = as_int(mc.count("max_iters"), "mace.max_iters");
  if (c.max_iters < 1) throw ConfigError("'mace.max_iters' must be >= 1");

  const auto ex =
      top.child("experiments", {"sparse_views", "noise_microstrain", "seed", "noisy_agents"});
  const auto noisy = ex.child("noisy_agents", {"alpha_y", "alpha_v"});
  c.experiments.noisy_alpha_y = noisy.number("alpha_y");
  c.experiments.noisy_alpha_v = noisy.number("alpha_v");
  if (!(c.experiments.noisy_alpha_y > 0.0) || !(c.experiments.noisy_alpha_v > 0.0)) {
    throw ConfigError("'experiments.noisy_agents' strengths must be positive");
  }
  c.experiments.sparse_views = ex.count("sparse_views");
  c.experiments.noise_microstrain = ex.number("noise_microstrain");
  c.experiments.seed = ex.count("seed");
  if (c.experiments.sparse_views < 1 || c.experiments.sparse_views > c.geometry.num_views) {
    throw ConfigError("'experiments.sparse_views' must lie in [1, geometry.num_views]");
  }
  if (!(c.experiments.noise_microstrain >= 0.0)) {
    throw ConfigError("'experiments.noise_microstrain' must be non-negative");
  }
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  return parse_config(read_file_bytes(path));
}

std::string config_to_json(const RunConfig& config) { return to_json(config).dump(2) + "\n"; }

}  // namespace monstr
