#include "monstr_cli/commands.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "monstr/field_io.hpp"
#include "monstr/forward_model.hpp"
#include "monstr/mace.hpp"
#include "monstr/phantom.hpp"
#include "monstr/projector.hpp"

namespace monstr::cli {
namespace {

using nlohmann::json;

constexpr const char* kVersion = "0.1.0";

void make_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create directory " + dir.string() + ": " + ec.message());
}

json file_entry(const fs::path& path) {
  return json{{"path", path.filename().string()}, {"fnv1a64", file_digest(path)}};
}

json input_entry(const fs::path& path) {
  return json{{"path", fs::absolute(path).lexically_normal().string()},
              {"fnv1a64", file_digest(path)}};
}

json invocation_json(const Invocation& inv) {
  return json{{"argv", inv.argv}, {"threads", inv.threads}};
}

json experiment_json(const ExperimentSpec& e) {
  json j{{"name", e.name},
         {"views", e.views},
         {"noise_microstrain", e.noise_microstrain},
         {"seed", e.seed},
         {"enable_equilibrium", e.enable_equilibrium}};
  if (e.alpha_y) j["alpha_y"] = *e.alpha_y;
  if (e.alpha_v) j["alpha_v"] = *e.alpha_v;
  return j;
}

void write_json(const fs::path& path, const json& j) { write_file_bytes(path, j.dump(2) + "\n"); }

json manifest(const std::string& command, const Invocation& inv) {
  return json{{"tool", "monstr"}, {"version", kVersion}, {"command", command},
              {"invocation", invocation_json(inv)}};
}

void write_config(const fs::path& dir, const RunConfig& config) {
  write_file_bytes(dir / "config.json", config_to_json(config));
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fixed(double v, int digits) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

const ExperimentSpec* find_experiment(const std::vector<ExperimentSpec>& list,
                                      const std::string& name) {
  for (const auto& e : list)
    if (e.name == name) return &e;
  return nullptr;
}

double max_abs(const TensorField2D& t) {
  double m = 0.0;
  for (const auto& c : t.c)
    for (double v : c.values()) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace

std::string file_digest(const fs::path& path) {
  const std::string bytes = read_file_bytes(path);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

// ---------------------------------------------------------------------------

SimulateOutputs simulate(const RunConfig& config, const fs::path& out, const Invocation& inv) {
  make_dir(out / "inputs");
  const BeamPhantom phantom = cantilever_strain(config.phantom_params(), config.geometry.grid());
  const Projector projector(config.geometry);
  const StrainSinogram clean = synthesize_strain_sinogram(phantom.strain, phantom.mask, projector);

  SimulateOutputs result;
  result.truth = out / "truth.mfld";
  result.mask = out / "mask.mfld";
  write_field(result.truth, phantom.strain);
  write_field(result.mask, phantom.mask);

  json experiments = json::array();
  for (const ExperimentSpec& spec : config.experiment_list()) {
    StrainSinogram s = clean;
    if (spec.noise_microstrain > 0.0) s = add_noise(s, spec.noise_microstrain, spec.seed);
    if (spec.views < s.geometry.num_views) s = subsample_views(s, spec.views);
    const fs::path path = out / "inputs" / (spec.name + ".mfld");
    write_field(path, s);
    result.inputs.push_back({spec, path});
    json e = experiment_json(spec);
    e["sinogram"] = "inputs/" + path.filename().string();
    e["fnv1a64"] = file_digest(path);
    e["valid_rays"] = s.num_valid();
    experiments.push_back(std::move(e));
  }

  write_config(out, config);
  json m = manifest("simulate", inv);
  m["config"] = json::parse(config_to_json(config));
  m["phantom"] = {{"layout", std::string(layout_name(config.phantom.layout))},
                  {"load", phantom.load},
                  {"row0", phantom.row0},
                  {"col0", phantom.col0},
                  {"rows", phantom.rows},
                  {"cols", phantom.cols}};
  m["outputs"] = {file_entry(result.truth), file_entry(result.mask)};
  m["experiments"] = std::move(experiments);
  m["rerun"] = "monstr simulate --config config.json --out <dir>";
  write_json(out / "manifest.json", m);
  return result;
}

// ---------------------------------------------------------------------------

std::string trace_csv(const std::vector<double>& trace, const std::vector<double>& wall) {
  std::string s = "iteration,consensus_nrmse,wall_seconds\n";
  for (std::size_t i = 0; i < trace.size(); ++i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", i < wall.size() ? wall[i] : 0.0);
    s += std::to_string(i + 1) + "," + format_number(trace[i]) + "," + buf + "\n";
  }
  return s;
}

std::vector<double> read_trace_csv(const fs::path& path) {
  std::istringstream in(read_file_bytes(path));
  std::string line;
  std::getline(in, line);
  if (line != "iteration,consensus_nrmse,wall_seconds") {
    throw FormatError("unexpected trace header in " + path.string());
  }
  std::vector<double> values;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto a = line.find(',');
    const auto b = line.find(',', a + 1);
    if (a == std::string::npos || b == std::string::npos) {
      throw FormatError("malformed trace row in " + path.string());
    }
    values.push_back(std::stod(line.substr(a + 1, b - a - 1)));
  }
  return values;
}

ReconstructOutputs reconstruct(const RunConfig& config, const ReconstructOptions& options,
                               const Invocation& inv) {
  const StrainSinogram sinogram = read_sinogram(options.sinogram);
  const ShapeMask mask = read_mask(options.mask);
  require_shape(sinogram.geometry.grid(), mask.shape(), "mask vs sinogram grid");

  AgentParams params = config.agents;
  json experiment = nullptr;
  if (options.experiment) {
    const auto list = config.experiment_list();
    const ExperimentSpec* spec = find_experiment(list, *options.experiment);
    if (spec == nullptr) throw ConfigError("unknown experiment '" + *options.experiment + "'");
    params = config.agents_for(*spec);
    experiment = experiment_json(*spec);
  }
  const bool equilibrium = !options.no_equilibrium;

  ReconstructOutputs result;
  result.dir = options.out / (equilibrium ? "monstr" : "baseline");
  make_dir(result.dir);
  result.strain = result.dir / "strain.mfld";
  result.trace = result.dir / "trace.csv";

  json m = manifest("reconstruct", inv);
  m["config"] = json::parse(config_to_json(config));
  m["inputs"] = {{"sinogram", input_entry(options.sinogram)}, {"mask", input_entry(options.mask)}};
  m["label"] = equilibrium ? "monstr" : "baseline";
  m["experiment"] = experiment;
  m["effective_agents"] = {{"alpha_y", params.alpha_y},
                           {"alpha_v", params.alpha_v},
                           {"alpha_e", params.alpha_e}};
  m["rerun"] = "monstr reconstruct --sinogram <sinogram> --mask <mask> --config config.json"
               " --out <dir>" +
               std::string(equilibrium ? "" : " --no-equilibrium") +
               (options.experiment ? " --experiment " + *options.experiment : "");
  write_config(result.dir, config);

  std::vector<double> trace, wall;
  const auto record = [&](const MaceState& s) {
    trace = s.trace;
    wall = s.wall_seconds;
  };
  try {
    const ElasticityModel model = config.elasticity();
    const MaceResult r = run_monstr(sinogram, mask, model, params,
                                    config.mace_options(equilibrium),
                                    Projector(sinogram.geometry), record);
    write_field(result.strain, r.strain);
    write_file_bytes(result.trace, trace_csv(r.state.trace, r.state.wall_seconds));
    m["status"] = "ok";
    m["data_scale"] = r.state.data_scale;
    m["sigma_x"] = r.state.sigma_x;
    m["iterations"] = r.state.iteration;
    m["outputs"] = {file_entry(result.strain), file_entry(result.trace)};
    write_json(result.dir / "manifest.json", m);
    result.trace_values = r.state.trace;
    result.seconds = r.state.wall_seconds.empty() ? 0.0 : r.state.wall_seconds.back();
  } catch (const DivergenceError& e) {
    write_file_bytes(result.trace, trace_csv(trace, wall));
    m["status"] = "diverged";
    m["error"] = e.what();
    m["outputs"] = {file_entry(result.trace)};
    write_json(result.dir / "manifest.json", m);
    throw;
  }
  return result;
}

// ---------------------------------------------------------------------------

std::string nrmse_table(const NrmseReport& r) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-10s %10s %10s %10s %10s\n%-10s %10s %10s %10s %10s\n",
                "", "eps_xx", "eps_yy", "eps_xy", "eps", "nrmse", fixed(r.xx, 4).c_str(),
                fixed(r.yy, 4).c_str(), fixed(r.xy, 4).c_str(), fixed(r.total, 4).c_str());
  return buf;
}

NrmseReport evaluate(const fs::path& recon, const fs::path& truth, const fs::path& mask,
                     const std::optional<fs::path>& out, const Invocation& inv) {
  const TensorField2D estimate = read_tensor(recon);
  const TensorField2D reference = read_tensor(truth);
  const ShapeMask m = read_mask(mask);
  if (!(estimate.shape() == reference.shape())) {
    throw ShapeError("reconstruction is " + to_string(estimate.shape()) + " but truth is " +
                     to_string(reference.shape()));
  }
  require_shape(reference.shape(), m.shape(), "mask vs truth");
  const NrmseReport report = nrmse(estimate, reference, m);
  if (out) {
    make_dir(*out);
    const fs::path csv = *out / "nrmse.csv";
    write_file_bytes(csv, "eps_xx,eps_yy,eps_xy,eps\n" + format_number(report.xx) + "," +
                              format_number(report.yy) + "," + format_number(report.xy) + "," +
                              format_number(report.total) + "\n");
    json j = manifest("evaluate", inv);
    j["inputs"] = {{"recon", input_entry(recon)}, {"truth", input_entry(truth)},
                   {"mask", input_entry(mask)}};
    j["outputs"] = {file_entry(csv)};
    j["rerun"] = "monstr evaluate --recon <recon> --truth <truth> --mask <mask> --out <dir>";
    write_json(*out / "manifest.json", j);
  }
  return report;
}

// ---------------------------------------------------------------------------

SuiteReport suite(const RunConfig& config, const fs::path& out, const Invocation& inv,
                  bool render_images) {
  make_dir(out);
  const SimulateOutputs inputs = simulate(config, out / "inputs", inv);
  const TensorField2D truth = read_tensor(inputs.truth);
  const double truth_max = std::max(max_abs(truth), 1e-300);

  if (render_images) {
    for (auto k : kComponents) {
      RenderOptions ro;
      ro.field = inputs.truth;
      ro.out = out / "inputs" / (std::string("truth_") + component_name(k) + ".ppm");
      ro.component = component_name(k);
      ro.range = std::pair{-truth_max, truth_max};
      ro.colormap = Colormap::diverging;
      render(ro, inv);
    }
  }

  SuiteReport report;
  for (const ExperimentInput& input : inputs.inputs) {
    ReconstructOptions ro;
    ro.sinogram = input.sinogram;
    ro.mask = inputs.mask;
    ro.out = out / "runs" / input.spec.name;
    ro.no_equilibrium = !input.spec.enable_equilibrium;
    ro.experiment = input.spec.name;
    const ReconstructOutputs rec = reconstruct(config, ro, inv);

    SuiteRun run;
    run.spec = input.spec;
    run.dir = rec.dir;
    run.trace = rec.trace_values;
    run.seconds = rec.seconds;
    run.nrmse = evaluate(rec.strain, inputs.truth, inputs.mask, rec.dir / "evaluation", inv);

    if (render_images) {
      const TensorField2D est = read_tensor(rec.strain);
      const fs::path err = rec.dir / "error_x10.mfld";
      write_field(err, error_field(est, truth, 10.0));
      for (auto k : kComponents) {
        RenderOptions o;
        o.field = rec.strain;
        o.out = rec.dir / (std::string("strain_") + component_name(k) + ".ppm");
        o.component = component_name(k);
        o.range = std::pair{-truth_max, truth_max};
        o.colormap = Colormap::diverging;
        render(o, inv);
        o.field = err;
        o.out = rec.dir / (std::string("error_x10_") + component_name(k) + ".ppm");
        render(o, inv);
      }
    }
    report.runs.push_back(std::move(run));
  }

  report.table = out / "table.csv";
  std::string csv =
      "experiment,views,noise_microstrain,equilibrium,eps_xx,eps_yy,eps_xy,eps,"
      "trace_initial,trace_final,seconds\n";
  for (const auto& r : report.runs) {
    csv += r.spec.name + "," + std::to_string(r.spec.views) + "," +
           format_number(r.spec.noise_microstrain) + "," +
           (r.spec.enable_equilibrium ? "1" : "0") + "," + format_number(r.nrmse.xx) + "," +
           format_number(r.nrmse.yy) + "," + format_number(r.nrmse.xy) + "," +
           format_number(r.nrmse.total) + "," +
           format_number(r.trace.empty() ? NAN : r.trace.front()) + "," +
           format_number(r.trace.empty() ? NAN : r.trace.back()) + "," + fixed(r.seconds, 3) +
           "\n";
  }
  write_file_bytes(report.table, csv);
  write_file_bytes(out / "report.md", "# Strain NRMSE\n\n" + suite_table(report));

  write_config(out, config);
  json m = manifest("suite", inv);
  m["config"] = json::parse(config_to_json(config));
  json runs = json::array();
  for (const auto& r : report.runs) {
    runs.push_back({{"experiment", experiment_json(r.spec)},
                    {"dir", fs::relative(r.dir, out).string()},
                    {"strain", file_entry(r.dir / "strain.mfld")}});
  }
  m["runs"] = std::move(runs);
  m["outputs"] = {file_entry(report.table)};
  m["rerun"] = "monstr suite --config config.json --out <dir>";
  write_json(out / "manifest.json", m);
  return report;
}

std::string suite_table(const SuiteReport& report) {
  std::string s =
      "| experiment | views | noise (ue) | equilibrium | eps_xx | eps_yy | eps_xy | eps | "
      "final trace |\n|---|---|---|---|---|---|---|---|---|\n";
  for (const auto& r : report.runs) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2e", r.trace.empty() ? NAN : r.trace.back());
    s += "| " + r.spec.name + " | " + std::to_string(r.spec.views) + " | " +
         fixed(r.spec.noise_microstrain, 0) + " | " + (r.spec.enable_equilibrium ? "yes" : "no") +
         " | " + fixed(r.nrmse.xx, 4) + " | " + fixed(r.nrmse.yy, 4) + " | " +
         fixed(r.nrmse.xy, 4) + " | " + fixed(r.nrmse.total, 4) + " | " + buf + " |\n";
  }
  return s;
}

}  // namespace monstr::cli
