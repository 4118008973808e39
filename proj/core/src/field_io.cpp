#include "monstr/field_io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace monstr {
namespace {

using nlohmann::json;

constexpr std::string_view kMagic = "MFLD1";

void append_values(std::string& out, std::span<const double> values) {
  const std::size_t offset = out.size();
  out.resize(offset + values.size() * sizeof(double));
  char* dst = out.data() + offset;
  for (double v : values) {
    auto bits = std::bit_cast<std::uint64_t>(v);
    if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
    std::memcpy(dst, &bits, sizeof bits);
    dst += sizeof bits;
  }
}

std::string header_line(FieldKind kind, Shape2D shape, std::size_t components, json extra) {
  json h;
  h["magic"] = kMagic;
  h["kind"] = kind_name(kind);
  h["rows"] = shape.rows;
  h["cols"] = shape.cols;
  h["components"] = components;
  h["extra"] = std::move(extra);
  return h.dump() + '\n';
}

struct Parsed {
  FieldHeader header;
  json extra;
  std::string_view payload;
};

std::size_t expected_components(FieldKind kind) { return kind == FieldKind::scalar ? 1 : 3; }

Parsed parse(std::string_view bytes) {
  const auto newline = bytes.find('\n');
  if (newline == std::string_view::npos) throw FormatError("MFLD: missing header line");
  json h;
  try {
    h = json::parse(bytes.substr(0, newline));
  } catch (const json::exception& e) {
    throw FormatError(std::string("MFLD: corrupt header: ") + e.what());
  }
  Parsed p;
  try {
    if (!h.is_object() || h.at("magic").get<std::string>() != kMagic) {
      throw FormatError("MFLD: bad magic");
    }
    const auto kind = h.at("kind").get<std::string>();
    if (kind == "scalar") {
      p.header.kind = FieldKind::scalar;
    } else if (kind == "tensor") {
      p.header.kind = FieldKind::tensor;
    } else if (kind == "sinogram") {
      p.header.kind = FieldKind::sinogram;
    } else {
      throw FormatError("MFLD: unknown kind '" + kind + "'");
    }
    p.header.rows = h.at("rows").get<std::size_t>();
    p.header.cols = h.at("cols").get<std::size_t>();
    p.header.components = h.at("components").get<std::size_t>();
    p.extra = h.value("extra", json::object());
  } catch (const json::exception& e) {
    throw FormatError(std::string("MFLD: corrupt header: ") + e.what());
  }
  if (p.header.rows == 0 || p.header.cols == 0) throw FormatError("MFLD: empty dimensions");
  if (p.header.components != expected_components(p.header.kind)) {
    throw FormatError("MFLD: " + std::string(kind_name(p.header.kind)) + " file declares " +
                      std::to_string(p.header.components) + " components");
  }
  p.payload = bytes.substr(newline + 1);
  const std::size_t expected =
      p.header.rows * p.header.cols * p.header.components * sizeof(double);
  if (p.payload.size() != expected) {
    throw ShapeError("MFLD: header declares " + std::to_string(p.header.components) + "x" +
                     std::to_string(p.header.rows) + "x" + std::to_string(p.header.cols) +
                     " values (" + std::to_string(expected) + " bytes) but payload has " +
                     std::to_string(p.payload.size()) + " bytes");
  }
  return p;
}

Array2D component_array(const Parsed& p, std::size_t k) {
  const Shape2D shape{p.header.rows, p.header.cols};
  std::vector<double> values(shape.size());
  const char* src = p.payload.data() + k * shape.size() * sizeof(double);
  for (auto& v : values) {
    std::uint64_t bits;
    std::memcpy(&bits, src, sizeof bits);
    if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
    v = std::bit_cast<double>(bits);
    if (!std::isfinite(v)) throw FormatError("MFLD: non-finite value in payload");
    src += sizeof bits;
  }
  return Array2D(shape, std::move(values));
}

void require_kind(const Parsed& p, FieldKind kind) {
  if (p.header.kind != kind) {
    throw FormatError(std::string("MFLD: expected a ") + kind_name(kind) + " file, found " +
                      kind_name(p.header.kind));
  }
}

}  // namespace

const char* kind_name(FieldKind kind) noexcept {
  switch (kind) {
    case FieldKind::scalar: return "scalar";
    case FieldKind::tensor: return "tensor";
    case FieldKind::sinogram: return "sinogram";
  }
  return "?";
}

std::string encode_field(const ScalarField& field) {
  auto out = header_line(FieldKind::scalar, field.shape(), 1, json::object());
  append_values(out, field.values());
  return out;
}

std::string encode_field(const ShapeMask& mask) {
  auto out = header_line(FieldKind::scalar, mask.shape(), 1, json{{"mask", true}});
  append_values(out, mask.values());
  return out;
}

std::string encode_field(const TensorField2D& field) {
  if (field.xx().shape() != field.yy().shape() || field.xx().shape() != field.xy().shape()) {
    throw ShapeError("tensor components do not share one grid");
  }
  auto out = header_line(FieldKind::tensor, field.shape(), 3,
                         json{{"component_names", {"xx", "yy", "xy"}}});
  for (const auto& c : field.c) append_values(out, c.values());
  return out;
}

std::string encode_field(const StrainSinogram& s) {
  s.validate();
  json extra{{"component_names", {"y", "L", "valid"}},
             {"grid_rows", s.geometry.grid_rows},
             {"grid_cols", s.geometry.grid_cols},
             {"angles", s.geometry.angles}};
  auto out = header_line(FieldKind::sinogram, s.y.shape(), 3, std::move(extra));
  append_values(out, s.y.values());
  append_values(out, s.path_lengths.values());
  append_values(out, s.valid.values());
  return out;
}

FieldHeader decode_header(std::string_view bytes) { return parse(bytes).header; }

ScalarField decode_scalar(std::string_view bytes) {
  const auto p = parse(bytes);
  require_kind(p, FieldKind::scalar);
  return ScalarField(component_array(p, 0));
}

ShapeMask decode_mask(std::string_view bytes) {
  const auto p = parse(bytes);
  require_kind(p, FieldKind::scalar);
  return ShapeMask(component_array(p, 0));
}

TensorField2D decode_tensor(std::string_view bytes) {
  const auto p = parse(bytes);
  require_kind(p, FieldKind::tensor);
  return TensorField2D(ScalarField(component_array(p, 0)), ScalarField(component_array(p, 1)),
                       ScalarField(component_array(p, 2)));
}

StrainSinogram decode_sinogram(std::string_view bytes) {
  const auto p = parse(bytes);
  require_kind(p, FieldKind::sinogram);
  StrainSinogram s;
  try {
    s.geometry.grid_rows = p.extra.at("grid_rows").get<std::size_t>();
    s.geometry.grid_cols = p.extra.at("grid_cols").get<std::size_t>();
    s.geometry.angles = p.extra.at("angles").get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw FormatError(std::string("MFLD: sinogram geometry missing from header: ") + e.what());
  }
  s.geometry.num_views = p.header.rows;
  s.geometry.num_detector_cols = p.header.cols;
  s.y = Sinogram(component_array(p, 0));
  s.path_lengths = Sinogram(component_array(p, 1));
  s.valid = Sinogram(component_array(p, 2));
  s.validate();
  return s;
}

std::string read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return std::move(ss).str();
}

void write_file_bytes(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

void write_field(const std::filesystem::path& path, const ScalarField& field) {
  write_file_bytes(path, encode_field(field));
}
void write_field(const std::filesystem::path& path, const ShapeMask& mask) {
  write_file_bytes(path, encode_field(mask));
}
void write_field(const std::filesystem::path& path, const TensorField2D& field) {
  write_file_bytes(path, encode_field(field));
}
void write_field(const std::filesystem::path& path, const StrainSinogram& sinogram) {
  write_file_bytes(path, encode_field(sinogram));
}

FieldHeader read_header(const std::filesystem::path& path) {
  return decode_header(read_file_bytes(path));
}
ScalarField read_scalar(const std::filesystem::path& path) {
  return decode_scalar(read_file_bytes(path));
}
ShapeMask read_mask(const std::filesystem::path& path) { return decode_mask(read_file_bytes(path)); }
TensorField2D read_tensor(const std::filesystem::path& path) {
  return decode_tensor(read_file_bytes(path));
}
StrainSinogram read_sinogram(const std::filesystem::path& path) {
  return decode_sinogram(read_file_bytes(path));
}

}  // namespace monstr
