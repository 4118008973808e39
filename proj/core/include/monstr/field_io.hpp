#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "monstr/core.hpp"

namespace monstr {

// MFLD field files: one UTF-8 JSON header line
//   {"magic":"MFLD1","kind":...,"rows":R,"cols":C,"components":N,"extra":{...}}
// terminated by '\n', then N*R*C little-endian float64 values, row-major,
// components concatenated. Tensors store xx, yy, xy; sinograms store y, L,
// valid and keep the scan geometry in "extra".

enum class FieldKind { scalar, tensor, sinogram };

const char* kind_name(FieldKind kind) noexcept;

struct FieldHeader {
  FieldKind kind = FieldKind::scalar;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t components = 0;
};

std::string encode_field(const ScalarField& field);
std::string encode_field(const ShapeMask& mask);
std::string encode_field(const TensorField2D& field);
std::string encode_field(const StrainSinogram& sinogram);

FieldHeader decode_header(std::string_view bytes);
ScalarField decode_scalar(std::string_view bytes);
ShapeMask decode_mask(std::string_view bytes);
TensorField2D decode_tensor(std::string_view bytes);
StrainSinogram decode_sinogram(std::string_view bytes);

void write_field(const std::filesystem::path& path, const ScalarField& field);
void write_field(const std::filesystem::path& path, const ShapeMask& mask);
void write_field(const std::filesystem::path& path, const TensorField2D& field);
void write_field(const std::filesystem::path& path, const StrainSinogram& sinogram);

FieldHeader read_header(const std::filesystem::path& path);
ScalarField read_scalar(const std::filesystem::path& path);
ShapeMask read_mask(const std::filesystem::path& path);
TensorField2D read_tensor(const std::filesystem::path& path);
StrainSinogram read_sinogram(const std::filesystem::path& path);

std::string read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, std::string_view bytes);

}  // namespace monstr
