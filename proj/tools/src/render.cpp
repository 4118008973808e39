#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>

#include "json.hpp"
#include "monstr/field_io.hpp"
#include "monstr_cli/commands.hpp"

namespace monstr::cli {
namespace {

constexpr std::array<std::array<std::uint8_t, 3>, 256> kDiverging = {{
#include "diverging_colormap.inc"
}};

Array2D select_component(const fs::path& path, const std::string& component) {
  const FieldHeader header = read_header(path);
  switch (header.kind) {
    case FieldKind::scalar: return read_scalar(path);
    case FieldKind::tensor: {
      const TensorField2D t = read_tensor(path);
      for (auto k : kComponents)
        if (component == component_name(k)) return t[k];
      throw ConfigError("unknown tensor component '" + component + "' (expected xx, yy or xy)");
    }
    case FieldKind::sinogram: {
      const StrainSinogram s = read_sinogram(path);
      if (component == "y") return s.y;
      if (component == "L") return s.path_lengths;
      if (component == "valid") return s.valid;
      throw ConfigError("unknown sinogram component '" + component + "' (expected y, L or valid)");
    }
  }
  throw FormatError("unsupported field kind");
}

}  // namespace

std::string render_image(const Array2D& values, const RenderOptions& o) {
  if (!values.all_finite()) throw FormatError("cannot render a field with non-finite values");
  if (!std::isfinite(o.scale)) throw ConfigError("render scale must be finite");
  double lo, hi;
  if (o.range) {
    std::tie(lo, hi) = *o.range;
    if (!(std::isfinite(lo) && std::isfinite(hi) && hi > lo)) {
      throw ConfigError("render range must satisfy lo < hi");
    }
  } else {
    double m = 0.0;
    for (double v : values.values()) m = std::max(m, std::abs(o.scale * v));
    if (m == 0.0) m = 1.0;
    lo = -m;
    hi = m;
  }

  const bool color = o.colormap == Colormap::diverging;
  std::string out = std::string(color ? "P6" : "P5") + "\n" + std::to_string(values.cols()) + " " +
                    std::to_string(values.rows()) + "\n255\n";
  out.reserve(out.size() + values.size() * (color ? 3 : 1));
  for (double v : values.values()) {
    const double t = std::clamp((o.scale * v - lo) / (hi - lo), 0.0, 1.0);
    const auto idx = static_cast<std::size_t>(std::lround(t * 255.0));
    if (color) {
      for (auto ch : kDiverging[idx]) out.push_back(static_cast<char>(ch));
    } else {
      out.push_back(static_cast<char>(idx));
    }
  }
  return out;
}

void render(const RenderOptions& options, const Invocation& inv) {
  const Array2D values = select_component(options.field, options.component);
  write_file_bytes(options.out, render_image(values, options));

  nlohmann::json m{{"tool", "monstr"},
                   {"command", "render"},
                   {"invocation", {{"argv", inv.argv}, {"threads", inv.threads}}},
                   {"field", fs::absolute(options.field).lexically_normal().string()},
                   {"field_fnv1a64", file_digest(options.field)},
                   {"component", options.component},
                   {"scale", options.scale},
                   {"colormap", options.colormap == Colormap::gray ? "gray" : "diverging"},
                   {"image", options.out.filename().string()},
                   {"image_fnv1a64", file_digest(options.out)}};
  if (options.range) m["range"] = {options.range->first, options.range->second};
  fs::path manifest = options.out;
  manifest.replace_extension(".manifest.json");
  write_file_bytes(manifest, m.dump(2) + "\n");
}

}  // namespace monstr::cli
