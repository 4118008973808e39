#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "monstr/parallel.hpp"
#include "monstr_cli/commands.hpp"

namespace {

using namespace monstr;
using namespace monstr::cli;

int report(const char* kind, const std::exception& e, int code) {
  std::cerr << "monstr: " << kind << ": " << e.what() << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Strain tensor reconstruction from Bragg-edge strain sinograms"};
  app.require_subcommand(1);
  // Subcommands inherit this, so --threads is accepted after the subcommand too.
  app.fallthrough();
  int threads = 0;
  app.add_option("--threads", threads, "Worker threads, 0 for all cores")
      ->check(CLI::NonNegativeNumber);

  std::string config_path, out_path;

  auto* sim = app.add_subcommand("simulate", "Generate the phantom and reference sinograms");
  sim->add_option("--config", config_path, "Run config JSON")->required();
  sim->add_option("--out", out_path, "Output directory")->required();

  ReconstructOptions rec;
  std::string sinogram_path, mask_path, experiment;
  auto* recon = app.add_subcommand("reconstruct", "Run the consensus reconstruction");
  recon->add_option("--sinogram", sinogram_path, "Strain sinogram (MFLD)")->required();
  recon->add_option("--mask", mask_path, "Support mask (MFLD)")->required();
  recon->add_option("--config", config_path, "Run config JSON")->required();
  recon->add_option("--out", out_path, "Output directory")->required();
  recon->add_flag("--no-equilibrium", rec.no_equilibrium, "Baseline without the equilibrium agent");
  recon->add_option("--experiment", experiment, "Apply a reference experiment's agent overrides");

  std::string recon_path, truth_path, eval_out;
  auto* eval = app.add_subcommand("evaluate", "NRMSE of a reconstruction against the truth");
  eval->add_option("--recon", recon_path, "Reconstructed strain (MFLD)")->required();
  eval->add_option("--truth", truth_path, "Ground-truth strain (MFLD)")->required();
  eval->add_option("--mask", mask_path, "Support mask (MFLD)")->required();
  eval->add_option("--out", eval_out, "Directory for nrmse.csv and manifest.json");

  RenderOptions ren;
  std::string field_path, image_path, colormap = "gray";
  std::vector<double> range;
  auto* rend = app.add_subcommand("render", "Write one component as a PGM/PPM image");
  rend->add_option("--field", field_path, "Field (MFLD)")->required();
  rend->add_option("--out", image_path, "Output image")->required();
  rend->add_option("--component", ren.component, "xx, yy, xy (tensor) or y, L, valid (sinogram)");
  rend->add_option("--scale", ren.scale, "Multiply values before mapping");
  rend->add_option("--range", range, "Values mapped to the first and last color")->expected(2);
  rend->add_option("--colormap", colormap, "gray (PGM) or diverging (PPM)")
      ->check(CLI::IsMember({"gray", "diverging"}));

  bool no_render = false;
  auto* st = app.add_subcommand("suite", "Run all reference experiments and tabulate NRMSE");
  st->add_option("--config", config_path, "Run config JSON")->required();
  st->add_option("--out", out_path, "Output directory")->required();
  st->add_flag("--no-render", no_render, "Skip image output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  Invocation inv{std::vector<std::string>(argv, argv + argc), threads};
  set_num_threads(threads);

  try {
    if (sim->parsed()) {
      const SimulateOutputs r = simulate(load_config(config_path), out_path, inv);
      std::cout << "wrote " << r.inputs.size() << " experiment inputs to " << out_path << "\n";
    } else if (recon->parsed()) {
      rec.sinogram = sinogram_path;
      rec.mask = mask_path;
      rec.out = out_path;
      if (!experiment.empty()) rec.experiment = experiment;
      const ReconstructOutputs r = reconstruct(load_config(config_path), rec, inv);
      std::printf("%s: %zu iterations, consensus nrmse %.3e -> %.3e, %.1f s\n",
                  r.dir.string().c_str(), r.trace_values.size(), r.trace_values.front(),
                  r.trace_values.back(), r.seconds);
    } else if (eval->parsed()) {
      std::optional<fs::path> out;
      if (!eval_out.empty()) out = eval_out;
      std::cout << nrmse_table(evaluate(recon_path, truth_path, mask_path, out, inv));
    } else if (rend->parsed()) {
      ren.field = field_path;
      ren.out = image_path;
      if (range.size() == 2) ren.range = std::pair{range[0], range[1]};
      ren.colormap = colormap == "diverging" ? Colormap::diverging : Colormap::gray;
      render(ren, inv);
    } else if (st->parsed()) {
      const SuiteReport r = suite(load_config(config_path), out_path, inv, !no_render);
      std::cout << suite_table(r);
    }
  } catch (const ConfigError& e) {
    return report("config error", e, kConfigError);
  } catch (const ShapeError& e) {
    return report("shape error", e, kShapeError);
  } catch (const DivergenceError& e) {
    return report("divergence", e, kDivergence);
  } catch (const std::exception& e) {
    return report("error", e, kIoError);
  }
  return kOk;
}
