#pragma once

// Tensor archive (.ssmz), schema version 1.
//
// Layout:
//   u64 little-endian header length H
//   H bytes of JSON:
//     { "__metadata__": { string: string, ... },
//       "<tensor name>": { "dtype": "F32" | "F64",
//                          "shape": [d0, d1, ...],
//                          "data_offsets": [begin, end] }, ... }
//   data section, offsets relative to its start, little-endian IEEE-754
//
// Canonical form: keys sorted lexicographically, no whitespace, tensors laid
// out contiguously in name order.
//
// Per-layer tensors (i = layer, d in {fwd, bwd, tfwd, tbwd}):
//   layers.{i}.a                D x N   continuous diagonal A per channel
//   layers.{i}.d_feed           D       optional feedthrough per channel
//   layers.{i}.dirs.{d}.delta   L x D   timescale per position and channel
//   layers.{i}.dirs.{d}.b       L x N   input row per position
//   layers.{i}.dirs.{d}.c       L x N   output row per position
// Positions are in the scan order of direction d.
//
// Required metadata: schema_version = "1", num_layers, state_dim, channels,
// num_dirs = "4", layers.{i}.height, layers.{i}.width.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace ssmctl {

enum class DType { F32, F64 };

std::size_t dtype_width(DType t);

struct Tensor {
  DType dtype = DType::F32;
  std::vector<std::int64_t> shape;
  /// Values promoted to double; F32 tensors hold exactly representable floats.
  std::vector<double> data;

  std::int64_t element_count() const;
  bool operator==(const Tensor&) const = default;
};

inline constexpr const char* kSchemaVersion = "1";
inline constexpr const char* kArchiveExtension = ".ssmz";

struct TensorArchive {
  std::map<std::string, Tensor> tensors;
  std::map<std::string, std::string> metadata;

  bool operator==(const TensorArchive&) const = default;
};

/// Parses and validates. ParseError for a malformed header, CorruptArchive
/// for bad byte ranges, SchemaError for missing metadata or tensors.
TensorArchive read_archive(std::span<const std::byte> bytes);
TensorArchive read_archive_file(const std::filesystem::path& path);

/// Canonical bytes. InvalidArchive if the archive violates its invariants.
std::vector<std::byte> write_archive(const TensorArchive& archive);
void write_archive_file(const TensorArchive& archive,
                        const std::filesystem::path& path);

/// Serialized JSON header exactly as write_archive emits it.
std::string archive_header(const TensorArchive& archive);

/// Returns an empty string if the schema is complete, otherwise a
/// description of the first problem found.
std::string schema_problem(const TensorArchive& archive);

/// FNV-1a 64-bit digest, lower-case hex.
std::string checksum_fnv1a64(std::span<const std::byte> bytes);

}  // namespace ssmctl
