#pragma once

// Bit-exact container format, CSV output and the PGM debug dump.
//
// Container layout ("TOMOARR1"):
//   bytes 0..7   magic "TOMOARR1"
//   bytes 8..11  u32 little-endian header length
//   header       UTF-8 JSON: kind (image|sinogram), dims, spacings, angle
//                list in integer millidegrees, creator, seed
//   payload      little-endian float32, row-major per the in-memory layout
//
// Angles are stored as integer millidegrees so headers are byte-stable
// across platforms; values quantize to float32 on write.

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "tomo/core.hpp"

namespace tomo {

inline constexpr char kContainerMagic[8] = {'T', 'O', 'M', 'O', 'A', 'R', 'R', '1'};

struct ContainerMeta {
  std::string creator = "tomo";
  long long seed = 0;
};

using ContainerObject = std::variant<ImageGrid, Sinogram>;

namespace detail {

inline void put_u32_le(std::string& out, std::uint32_t v) {
  out.push_back(char(v & 0xff));
  out.push_back(char((v >> 8) & 0xff));
  out.push_back(char((v >> 16) & 0xff));
  out.push_back(char((v >> 24) & 0xff));
}

inline void put_f32_le(std::string& out, float f) {
  std::uint32_t bits;
  std::memcpy(&bits, &f, 4);
  put_u32_le(out, bits);
}

inline std::uint32_t get_u32_le(const unsigned char* p) {
  return std::uint32_t(p[0]) | std::uint32_t(p[1]) << 8 | std::uint32_t(p[2]) << 16 |
         std::uint32_t(p[3]) << 24;
}

inline float get_f32_le(const unsigned char* p) {
  const std::uint32_t bits = get_u32_le(p);
  float f;
  std::memcpy(&f, &bits, 4);
  return f;
}

inline std::vector<std::int64_t> angles_to_mdeg(const AngleSet& a) {
  std::vector<std::int64_t> out(a.size());
  for (int i = 0; i < a.size(); ++i) out[std::size_t(i)] = std::llround(a.deg(i) * 1000.0);
  return out;
}

inline std::string payload_f32(std::span<const double> values, const char* what) {
  std::string out;
  out.reserve(values.size() * 4);
  for (double v : values) {
    const float f = float(v);
    if (!std::isfinite(f))
      throw std::invalid_argument(std::string(what) + ": value not representable as float32");
    put_f32_le(out, f);
  }
  return out;
}

}  // namespace detail

/// Serializes an image or sinogram to the container byte format.
inline std::string container_bytes(const ContainerObject& obj, const ContainerMeta& meta = {}) {
  nlohmann::json header;
  std::string payload;
  if (std::holds_alternative<ImageGrid>(obj)) {
    const auto& img = std::get<ImageGrid>(obj);
    header["kind"] = "image";
    header["n"] = img.size_n();
    header["pixel_size"] = img.pixel_size();
    payload = detail::payload_f32(img.values(), "write_container");
  } else {
    const auto& s = std::get<Sinogram>(obj);
    header["kind"] = "sinogram";
    header["n_detectors"] = s.n_detectors();
    header["n_angles"] = s.n_angles();
    header["detector_spacing"] = s.detector_spacing();
    header["angles_mdeg"] = detail::angles_to_mdeg(s.angles());
    payload = detail::payload_f32(s.values(), "write_container");
  }
  header["creator"] = meta.creator;
  header["seed"] = meta.seed;

  const std::string htext = header.dump();  // keys sorted, byte-deterministic
  std::string out(kContainerMagic, 8);
  detail::put_u32_le(out, std::uint32_t(htext.size()));
  out += htext;
  out += payload;
  return out;
}

inline void write_container(const ContainerObject& obj, const std::string& path,
                            const ContainerMeta& meta = {}) {
  require(!path.empty(), "write_container: empty path");
  const std::string bytes = container_bytes(obj, meta);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("write_container: cannot open '" + path + "'");
  f.write(bytes.data(), std::streamsize(bytes.size()));
  if (!f) throw std::runtime_error("write_container: write failed for '" + path + "'");
}

/// Parses a container file; rejects bad magic, malformed headers, payload
/// size mismatches, trailing bytes and non-finite values.
inline ContainerObject read_container(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("read_container: cannot open '" + path + "'");
  std::string bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());

  auto fail = [&](const std::string& why) -> std::runtime_error {
    return std::runtime_error("read_container: " + why + " in '" + path + "'");
  };
  if (bytes.size() < 12 || std::memcmp(bytes.data(), kContainerMagic, 8) != 0)
    throw fail("bad magic");
  const auto* u = reinterpret_cast<const unsigned char*>(bytes.data());
  const std::uint32_t hlen = detail::get_u32_le(u + 8);
  if (bytes.size() < 12 + std::size_t(hlen)) throw fail("truncated header");

  nlohmann::json header;
  try {
    header = nlohmann::json::parse(bytes.substr(12, hlen));
  } catch (const nlohmann::json::exception&) {
    throw fail("malformed header");
  }

  const std::size_t payload_off = 12 + hlen;
  auto read_values = [&](std::size_t count) {
    if (bytes.size() - payload_off < count * 4) throw fail("truncated payload");
    if (bytes.size() - payload_off > count * 4) throw fail("trailing bytes");
    std::vector<double> vals(count);
    for (std::size_t i = 0; i < count; ++i) {
      const float v = detail::get_f32_le(u + payload_off + i * 4);
      if (!std::isfinite(v)) throw fail("non-finite payload value");
      vals[i] = double(v);
    }
    return vals;
  };

  try {
    const std::string kind = header.at("kind").get<std::string>();
    if (kind == "image") {
      const int n = header.at("n").get<int>();
      const double px = header.at("pixel_size").get<double>();
      if (n <= 0) throw fail("bad dims");
      return ImageGrid(n, px, read_values(std::size_t(n) * std::size_t(n)));
    }
    if (kind == "sinogram") {
      const int nd = header.at("n_detectors").get<int>();
      const int na = header.at("n_angles").get<int>();
      const double ds = header.at("detector_spacing").get<double>();
      const auto mdeg = header.at("angles_mdeg").get<std::vector<std::int64_t>>();
      if (nd <= 0 || na <= 0 || int(mdeg.size()) != na) throw fail("bad dims");
      std::vector<double> deg(mdeg.size());
      for (std::size_t i = 0; i < mdeg.size(); ++i) deg[i] = double(mdeg[i]) / 1000.0;
      return Sinogram(nd, AngleSet(std::move(deg)), ds,
                      read_values(std::size_t(nd) * std::size_t(na)));
    }
    throw fail("unknown kind '" + kind + "'");
  } catch (const nlohmann::json::exception&) {
    throw fail("malformed header");
  } catch (const std::invalid_argument& e) {
    throw fail(std::string("invalid contents (") + e.what() + ")");
  }
}

// ---- CSV (RFC-4180 subset: no quoting needed, LF line endings) ----

inline std::string fmt_fixed(double v, int prec) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", prec, v);
  return buf;
}

inline std::string fmt_sci(double v, int prec) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*e", prec, v);
  return buf;
}

inline void write_csv(std::ostream& os, const std::vector<std::string>& header,
                      const std::vector<std::vector<std::string>>& rows) {
  auto put_row = [&os](const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i > 0) os << ',';
      os << row[i];
    }
    os << '\n';
  };
  put_row(header);
  for (const auto& r : rows) put_row(r);
}

inline void write_csv_file(const std::string& path, const std::vector<std::string>& header,
                           const std::vector<std::vector<std::string>>& rows) {
  require(!path.empty(), "write_csv: empty path");
  std::ofstream f(path, std::ios::binary);  // binary keeps LF endings
  if (!f) throw std::runtime_error("write_csv: cannot open '" + path + "'");
  write_csv(f, header, rows);
  if (!f) throw std::runtime_error("write_csv: write failed for '" + path + "'");
}

/// 16-bit PGM debug dump, values scaled min..max -> 0..65535.
inline void write_pgm16(const ImageGrid& img, const std::string& path) {
  require(!path.empty(), "write_pgm16: empty path");
  const auto& v = img.values();
  const double lo = *std::min_element(v.begin(), v.end());
  const double hi = *std::max_element(v.begin(), v.end());
  const double scale = hi > lo ? 65535.0 / (hi - lo) : 0.0;
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("write_pgm16: cannot open '" + path + "'");
  f << "P5\n" << img.size_n() << ' ' << img.size_n() << "\n65535\n";
  for (double x : v) {
    const auto g = std::uint16_t(std::lround((x - lo) * scale));
    f.put(char(g >> 8));  // PGM is big-endian
    f.put(char(g & 0xff));
  }
  if (!f) throw std::runtime_error("write_pgm16: write failed for '" + path + "'");
}

}  // namespace tomo
