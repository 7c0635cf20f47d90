#include "ssmctl/archive.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <optional>

#include <nlohmann/json.hpp>

#include "ssmctl/error.hpp"
#include "ssmctl/scan2d.hpp"

namespace ssmctl {

using nlohmann::json;

namespace {

constexpr std::size_t kLengthPrefix = 8;

std::string_view dtype_name(DType t) { return t == DType::F32 ? "F32" : "F64"; }

std::optional<DType> parse_dtype(std::string_view s) {
  if (s == "F32") return DType::F32;
  if (s == "F64") return DType::F64;
  return std::nullopt;
}

void put_u64(std::vector<std::byte>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::byte>((v >> (8 * i)) & 0xFF));
}

std::uint64_t get_u64(std::span<const std::byte> in) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= std::to_integer<std::uint64_t>(in[static_cast<std::size_t>(i)]) << (8 * i);
  return v;
}

template <typename Bits, typename Float>
void put_float(std::vector<std::byte>& out, Float f) {
  const auto bits = std::bit_cast<Bits>(f);
  for (std::size_t i = 0; i < sizeof(Bits); ++i) {
    out.push_back(static_cast<std::byte>((bits >> (8 * i)) & 0xFF));
  }
}

template <typename Bits, typename Float>
Float get_float(const std::byte* p) {
  Bits bits = 0;
  for (std::size_t i = 0; i < sizeof(Bits); ++i) {
    bits |= static_cast<Bits>(std::to_integer<Bits>(p[i]) << (8 * i));
  }
  return std::bit_cast<Float>(bits);
}

std::optional<long> parse_long(const std::map<std::string, std::string>& meta,
                               const std::string& key) {
  auto it = meta.find(key);
  if (it == meta.end()) return std::nullopt;
  long v = 0;
  const auto& s = it->second;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::string shape_string(const std::vector<std::int64_t>& shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

/// Byte layout for canonical serialization: name-sorted, contiguous.
std::map<std::string, std::pair<std::uint64_t, std::uint64_t>> layout(
    const TensorArchive& archive) {
  std::map<std::string, std::pair<std::uint64_t, std::uint64_t>> ranges;
  std::uint64_t offset = 0;
  for (const auto& [name, t] : archive.tensors) {
    const auto size = static_cast<std::uint64_t>(t.element_count()) * dtype_width(t.dtype);
    ranges[name] = {offset, offset + size};
    offset += size;
  }
  return ranges;
}

void check_tensor_invariants(const TensorArchive& archive) {
  for (const auto& [name, t] : archive.tensors) {
    if (name == "__metadata__" || name.empty()) {
      throw InvalidArchive("reserved or empty tensor name '" + name + "'");
    }
    for (auto d : t.shape) {
      if (d < 0) throw InvalidArchive("tensor " + name + " has a negative dimension");
    }
    if (static_cast<std::int64_t>(t.data.size()) != t.element_count()) {
      throw InvalidArchive("tensor " + name + " holds " + std::to_string(t.data.size()) +
                           " values for shape " + shape_string(t.shape));
    }
    if (t.dtype == DType::F32) {
      for (double v : t.data) {
        if (static_cast<double>(static_cast<float>(v)) != v && std::isfinite(v)) {
          throw InvalidArchive("tensor " + name + " has values not representable as F32");
        }
      }
    }
  }
}

}  // namespace

std::size_t dtype_width(DType t) { return t == DType::F32 ? 4 : 8; }

std::int64_t Tensor::element_count() const {
  std::int64_t n = 1;
  for (auto d : shape) n *= d;
  return n;
}

std::string schema_problem(const TensorArchive& archive) {
  const auto& meta = archive.metadata;
  auto version = meta.find("schema_version");
  if (version == meta.end() || version->second != kSchemaVersion) {
    return "schema_version must be \"1\"";
  }
  const auto layers = parse_long(meta, "num_layers");
  if (!layers || *layers < 1) return "archive declares no layers";
  const auto n = parse_long(meta, "state_dim");
  if (!n || *n < 1) return "state_dim missing or < 1";
  const auto d = parse_long(meta, "channels");
  if (!d || *d < 1) return "channels missing or < 1";
  const auto dirs = parse_long(meta, "num_dirs");
  if (!dirs || *dirs != 4) return "num_dirs must be 4";

  auto expect = [&](const std::string& name,
                    const std::vector<std::int64_t>& shape) -> std::string {
    auto it = archive.tensors.find(name);
    if (it == archive.tensors.end()) return "missing tensor " + name;
    if (it->second.shape != shape) {
      return "tensor " + name + " has shape " + shape_string(it->second.shape) +
             ", expected " + shape_string(shape);
    }
    for (double v : it->second.data) {
      if (!std::isfinite(v)) return "tensor " + name + " has non-finite values";
    }
    return {};
  };

  for (long i = 0; i < *layers; ++i) {
    const std::string prefix = "layers." + std::to_string(i);
    const auto h = parse_long(meta, prefix + ".height");
    const auto w = parse_long(meta, prefix + ".width");
    if (!h || !w || *h < 1 || *w < 1) return prefix + ": grid height/width missing";
    const std::int64_t len = *h * *w;
    if (auto p = expect(prefix + ".a", {*d, *n}); !p.empty()) return p;
    if (archive.tensors.count(prefix + ".d_feed")) {
      if (auto p = expect(prefix + ".d_feed", {*d}); !p.empty()) return p;
    }
    for (ScanDirection dir : kAllDirections) {
      const std::string dp = prefix + ".dirs." + std::string(direction_tag(dir));
      if (auto p = expect(dp + ".delta", {len, *d}); !p.empty()) return p;
      if (auto p = expect(dp + ".b", {len, *n}); !p.empty()) return p;
      if (auto p = expect(dp + ".c", {len, *n}); !p.empty()) return p;
      for (double v : archive.tensors.at(dp + ".delta").data) {
        if (!(v > 0.0)) return dp + ".delta must be positive";
      }
    }
  }
  return {};
}

std::string archive_header(const TensorArchive& archive) {
  json header = json::object();
  json meta = json::object();
  for (const auto& [k, v] : archive.metadata) meta[k] = v;
  header["__metadata__"] = std::move(meta);
  const auto ranges = layout(archive);
  for (const auto& [name, t] : archive.tensors) {
    const auto& r = ranges.at(name);
    header[name] = {{"dtype", dtype_name(t.dtype)},
                    {"shape", t.shape},
                    {"data_offsets", {r.first, r.second}}};
  }
  return header.dump();
}

std::vector<std::byte> write_archive(const TensorArchive& archive) {
  check_tensor_invariants(archive);
  if (auto problem = schema_problem(archive); !problem.empty()) {
    throw InvalidArchive(problem);
  }
  const std::string header = archive_header(archive);
  std::vector<std::byte> out;
  put_u64(out, header.size());
  for (char c : header) out.push_back(static_cast<std::byte>(c));
  for (const auto& [name, t] : archive.tensors) {
    for (double v : t.data) {
      if (t.dtype == DType::F32) {
        put_float<std::uint32_t>(out, static_cast<float>(v));
      } else {
        put_float<std::uint64_t>(out, v);
      }
    }
  }
  return out;
}

TensorArchive read_archive(std::span<const std::byte> bytes) {
  if (bytes.size() < kLengthPrefix) throw ParseError("archive shorter than its length prefix");
  const std::uint64_t header_len = get_u64(bytes.first(kLengthPrefix));
  if (header_len > bytes.size() - kLengthPrefix) {
    throw ParseError("header length " + std::to_string(header_len) + " exceeds file size");
  }
  const auto header_bytes = bytes.subspan(kLengthPrefix, header_len);
  const std::string_view header_text(reinterpret_cast<const char*>(header_bytes.data()),
                                     header_bytes.size());
  json header;
  try {
    header = json::parse(header_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("header is not valid JSON: ") + e.what());
  }
  if (!header.is_object()) throw ParseError("header must be a JSON object");

  const auto data = bytes.subspan(kLengthPrefix + header_len);
  TensorArchive archive;
  std::vector<std::pair<std::uint64_t, std::uint64_t>> ranges;

  for (auto it = header.begin(); it != header.end(); ++it) {
    const std::string& name = it.key();
    const json& entry = it.value();
    if (name == "__metadata__") {
      if (!entry.is_object()) throw ParseError("__metadata__ must be an object");
      for (auto m = entry.begin(); m != entry.end(); ++m) {
        if (!m.value().is_string()) throw ParseError("metadata value for '" + m.key() + "' is not a string");
        archive.metadata[m.key()] = m.value().get<std::string>();
      }
      continue;
    }
    if (!entry.is_object() || !entry.contains("dtype") || !entry.contains("shape") ||
        !entry.contains("data_offsets")) {
      throw ParseError("tensor entry '" + name + "' needs dtype, shape and data_offsets");
    }
    const json& jd = entry["dtype"];
    const json& js = entry["shape"];
    const json& jo = entry["data_offsets"];
    std::optional<DType> dtype = jd.is_string() ? parse_dtype(jd.get<std::string>()) : std::nullopt;
    if (!dtype) throw ParseError("tensor '" + name + "' has unsupported dtype");
    if (!js.is_array()) throw ParseError("tensor '" + name + "' shape is not an array");
    Tensor t;
    t.dtype = *dtype;
    for (const auto& dim : js) {
      if (!dim.is_number_unsigned()) throw ParseError("tensor '" + name + "' has a bad dimension");
      t.shape.push_back(dim.get<std::int64_t>());
    }
    if (!jo.is_array() || jo.size() != 2 || !jo[0].is_number_unsigned() ||
        !jo[1].is_number_unsigned()) {
      throw ParseError("tensor '" + name + "' data_offsets must be [begin, end]");
    }
    const auto begin = jo[0].get<std::uint64_t>();
    const auto end = jo[1].get<std::uint64_t>();
    if (begin > end || end > data.size()) {
      throw CorruptArchive("tensor '" + name + "' byte range [" + std::to_string(begin) +
                           ", " + std::to_string(end) + ") is outside the " +
                           std::to_string(data.size()) + "-byte data section");
    }
    const auto expected = static_cast<std::uint64_t>(t.element_count()) * dtype_width(t.dtype);
    if (end - begin != expected) {
      throw CorruptArchive("tensor '" + name + "' spans " + std::to_string(end - begin) +
                           " bytes, shape requires " + std::to_string(expected));
    }
    ranges.emplace_back(begin, end);
    t.data.reserve(static_cast<std::size_t>(t.element_count()));
    const std::byte* p = data.data() + begin;
    for (std::int64_t i = 0; i < t.element_count(); ++i) {
      if (t.dtype == DType::F32) {
        t.data.push_back(static_cast<double>(get_float<std::uint32_t, float>(p)));
        p += 4;
      } else {
        t.data.push_back(get_float<std::uint64_t, double>(p));
        p += 8;
      }
    }
    archive.tensors.emplace(name, std::move(t));
  }

  std::sort(ranges.begin(), ranges.end());
  for (std::size_t i = 1; i < ranges.size(); ++i) {
    if (ranges[i].first < ranges[i - 1].second) {
      throw CorruptArchive("tensor byte ranges overlap");
    }
  }
  if (auto problem = schema_problem(archive); !problem.empty()) {
    throw SchemaError(problem);
  }
  return archive;
}

TensorArchive read_archive_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open archive " + path.string());
  std::vector<char> raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return read_archive(std::as_bytes(std::span<const char>(raw)));
}

void write_archive_file(const TensorArchive& archive, const std::filesystem::path& path) {
  const auto bytes = write_archive(archive);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InvalidInput("cannot write archive " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw InvalidInput("failed writing archive " + path.string());
}

std::string checksum_fnv1a64(std::span<const std::byte> bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (std::byte b : bytes) {
    hash ^= std::to_integer<std::uint64_t>(b);
    hash *= 0x100000001b3ULL;
  }
  char buf[17];
  auto [ptr, ec] = std::to_chars(buf, buf + 16, hash, 16);
  std::string s(buf, ptr);
  return std::string(16 - s.size(), '0') + s;
}

}  // namespace ssmctl
