#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "monstr/config.hpp"
#include "monstr/metrics.hpp"

namespace monstr::cli {

namespace fs = std::filesystem;

/// Process exit codes.
enum ExitCode : int {
  kOk = 0,
  kIoError = 1,
  kConfigError = 2,
  kShapeError = 3,
  kDivergence = 4,
};

/// How the command was invoked; recorded in every manifest.
struct Invocation {
  std::vector<std::string> argv;
  int threads = 0;
};

// ---------------------------------------------------------------------------
// simulate

struct ExperimentInput {
  ExperimentSpec spec;
  fs::path sinogram;
};

struct SimulateOutputs {
  fs::path truth;
  fs::path mask;
  std::vector<ExperimentInput> inputs;
};

/// Writes truth.mfld, mask.mfld, one sinogram per reference experiment under
/// inputs/, config.json and manifest.json into `out`.
SimulateOutputs simulate(const RunConfig& config, const fs::path& out, const Invocation& inv);

// ---------------------------------------------------------------------------
// reconstruct

struct ReconstructOptions {
  fs::path sinogram;
  fs::path mask;
  fs::path out;
  bool no_equilibrium = false;
  /// Apply this reference experiment's agent overrides.
  std::optional<std::string> experiment;
};

struct ReconstructOutputs {
  fs::path dir;  // <out>/monstr or <out>/baseline
  fs::path strain;
  fs::path trace;
  std::vector<double> trace_values;
  double seconds = 0.0;
};

/// Runs the consensus loop and writes strain.mfld, trace.csv, config.json and
/// manifest.json into <out>/monstr (or <out>/baseline with no_equilibrium).
/// On divergence the partial trace and manifest are still written before
/// DivergenceError propagates.
ReconstructOutputs reconstruct(const RunConfig& config, const ReconstructOptions& options,
                               const Invocation& inv);

/// iteration,consensus_nrmse,wall_seconds with one row per iteration.
std::string trace_csv(const std::vector<double>& trace, const std::vector<double>& wall_seconds);
/// Reads the consensus_nrmse column back.
std::vector<double> read_trace_csv(const fs::path& path);

// ---------------------------------------------------------------------------
// evaluate

/// Fixed-width table with columns eps_xx, eps_yy, eps_xy, eps.
std::string nrmse_table(const NrmseReport& report);

/// NRMSE of a reconstruction against the truth on the mask. With an output
/// directory, also writes nrmse.csv and manifest.json there.
NrmseReport evaluate(const fs::path& recon, const fs::path& truth, const fs::path& mask,
                     const std::optional<fs::path>& out, const Invocation& inv);

// ---------------------------------------------------------------------------
// render

enum class Colormap { gray, diverging };

struct RenderOptions {
  fs::path field;
  fs::path out;
  /// xx, yy, xy for tensors; y, L, valid for sinograms; ignored for scalars.
  std::string component = "xx";
  double scale = 1.0;
  /// Values mapped to the first and last color. Defaults to [-m, m] with m
  /// the largest scaled magnitude (1 if the field is zero).
  std::optional<std::pair<double, double>> range;
  Colormap colormap = Colormap::gray;
};

/// Binary PGM for gray, PPM for the diverging map. Row 0 is the top line.
std::string render_image(const Array2D& values, const RenderOptions& options);

/// Reads the field, renders the selected component and writes the image plus
/// <image stem>.manifest.json next to it.
void render(const RenderOptions& options, const Invocation& inv);

// ---------------------------------------------------------------------------
// suite

struct SuiteRun {
  ExperimentSpec spec;
  NrmseReport nrmse;
  std::vector<double> trace;
  double seconds = 0.0;
  fs::path dir;
};

struct SuiteReport {
  std::vector<SuiteRun> runs;
  fs::path table;
};

/// Simulates the reference inputs into <out>/inputs, reconstructs every
/// experiment into <out>/runs/<name>, evaluates it and renders x10 error
/// images, then writes table.csv, report.md and manifest.json.
SuiteReport suite(const RunConfig& config, const fs::path& out, const Invocation& inv,
                  bool render_images = true);

std::string suite_table(const SuiteReport& report);

// ---------------------------------------------------------------------------

/// FNV-1a 64-bit hash of a file's bytes, as 16 hex digits.
std::string file_digest(const fs::path& path);

}  // namespace monstr::cli
