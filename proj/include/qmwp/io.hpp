#pragma once

// Persistence: binary time-tag files, CSV tables, SVG polylines, atomic
// writes and content hashing.
//
// Time-tag file layout:
//   8 bytes   magic "QMWPTT01"
//   n * 9     records, little-endian: u8 channel id, u64 time in fs

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <fmt/format.h>
#include <openssl/evp.h>

#include "qmwp/errors.hpp"
#include "qmwp/link.hpp"

namespace qmwp::io {

inline constexpr std::string_view timetag_magic = "QMWPTT01";
inline constexpr std::size_t timetag_record_size = 9;

static_assert(std::endian::native == std::endian::little, "time-tag codec assumes little-endian host");

/// Writes `content` to `path` via a sibling temporary file and a rename, so a
/// reader never sees a partially written file.
inline void atomic_write(const std::filesystem::path& path, std::string_view content) {
  auto tmp = path;
  tmp += ".partial";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw IoError("write failed: " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot rename into place: " + path.string());
  }
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Creates `dir` if needed and checks that files can be created in it.
inline void ensure_writable_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir))
    throw IoError("cannot create output directory: " + dir.string());
  const auto probe = dir / ".qmwp-write-probe";
  {
    std::ofstream out(probe, std::ios::binary);
    if (!out) throw IoError("output directory is not writable: " + dir.string());
  }
  std::filesystem::remove(probe, ec);
}

inline std::string encode_timetags(const TimeTagStream& s) {
  std::string buf;
  buf.reserve(timetag_magic.size() + s.times.size() * timetag_record_size);
  buf.append(timetag_magic);
  const auto ch = static_cast<std::uint8_t>(s.channel_id);
  for (double t : s.times) {
    if (!(t >= 0.0) || !std::isfinite(t)) throw RecordError("time tag must be finite and >= 0");
    const auto fs = static_cast<std::uint64_t>(std::llround(t * units::fs_per_ps));
    char rec[timetag_record_size];
    rec[0] = static_cast<char>(ch);
    std::memcpy(rec + 1, &fs, sizeof fs);
    buf.append(rec, sizeof rec);
  }
  return buf;
}

/// Decodes a time-tag file. Records of every channel are returned in file
/// order; `channel_id` is taken from the first record.
inline TimeTagStream decode_timetags(std::string_view buf) {
  if (buf.size() < timetag_magic.size() || buf.substr(0, timetag_magic.size()) != timetag_magic)
    throw IoError("not a time-tag file (bad magic)");
  const std::string_view body = buf.substr(timetag_magic.size());
  if (body.size() % timetag_record_size != 0) throw IoError("truncated time-tag file");
  TimeTagStream s;
  const std::size_t n = body.size() / timetag_record_size;
  s.times.reserve(n);
  s.is_dark.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const char* rec = body.data() + i * timetag_record_size;
    std::uint64_t fs = 0;
    std::memcpy(&fs, rec + 1, sizeof fs);
    if (i == 0) s.channel_id = static_cast<std::uint8_t>(rec[0]);
    s.times.push_back(static_cast<double>(fs) / units::fs_per_ps);
  }
  return s;
}

inline void write_timetags(const std::filesystem::path& path, const TimeTagStream& s) {
  atomic_write(path, encode_timetags(s));
}

inline TimeTagStream read_timetags(const std::filesystem::path& path) {
  return decode_timetags(read_file(path));
}

/// CSV builder. fmt's default formatting of doubles is locale-independent
/// and round-trips.
class Csv {
 public:
  explicit Csv(std::string_view header) {
    text_.append(header);
    text_ += '\n';
  }

  template <typename... Ts>
  void row(const Ts&... vals) {
    bool first = true;
    ((text_ += first ? "" : ",", text_ += fmt::format("{}", vals), first = false), ...);
    text_ += '\n';
  }

  const std::string& str() const { return text_; }
  void save(const std::filesystem::path& path) const { atomic_write(path, text_); }

 private:
  std::string text_;
};

inline std::string t3_csv(const T3Stream& t3) {
  std::string out = "nsync,dtime_bin\n";
  out.reserve(out.size() + t3.records.size() * 16);
  for (const auto& r : t3.records) out += fmt::format("{},{}\n", r.nsync, r.dtime_bin);
  return out;
}

/// Minimal line plot. Coordinates are printed with six decimals.
inline std::string svg_polyline(std::span<const double> x, std::span<const double> y,
                                std::string_view title, std::string_view xlabel,
                                std::string_view ylabel, bool log_x = false) {
  constexpr double W = 640, H = 400, L = 70, R = 20, T = 40, B = 50;
  std::vector<double> xs(x.begin(), x.end());
  if (log_x)
    for (auto& v : xs) v = std::log10(v);
  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  bool init = false;
  for (std::size_t i = 0; i < xs.size() && i < y.size(); ++i) {
    if (!std::isfinite(xs[i]) || !std::isfinite(y[i])) continue;
    if (!init) {
      x0 = x1 = xs[i];
      y0 = y1 = y[i];
      init = true;
    }
    x0 = std::min(x0, xs[i]);
    x1 = std::max(x1, xs[i]);
    y0 = std::min(y0, y[i]);
    y1 = std::max(y1, y[i]);
  }
  if (x1 == x0) x1 = x0 + 1;
  if (y1 == y0) y1 = y0 + 1;

  std::string out = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\">\n"
      "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      "<text x=\"{}\" y=\"24\" font-size=\"14\">{}</text>\n"
      "<text x=\"{}\" y=\"{}\" font-size=\"12\">{}</text>\n"
      "<text x=\"12\" y=\"{}\" font-size=\"12\">{}</text>\n"
      "<text x=\"{}\" y=\"{}\" font-size=\"10\">{:.6g}</text>\n"
      "<text x=\"{}\" y=\"{}\" font-size=\"10\">{:.6g}</text>\n"
      "<text x=\"4\" y=\"{}\" font-size=\"10\">{:.6g}</text>\n"
      "<text x=\"4\" y=\"{}\" font-size=\"10\">{:.6g}</text>\n"
      "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n"
      "<polyline fill=\"none\" stroke=\"steelblue\" points=\"",
      W, H, L, title, W / 2, H - 10, xlabel, H / 2, ylabel, L, H - B + 14,
      log_x ? std::pow(10.0, x0) : x0, W - R - 40, H - B + 14, log_x ? std::pow(10.0, x1) : x1,
      H - B, y0, T + 10, y1, L, T, W - L - R, H - T - B);
  for (std::size_t i = 0; i < xs.size() && i < y.size(); ++i) {
    if (!std::isfinite(xs[i]) || !std::isfinite(y[i])) continue;
    const double px = L + (xs[i] - x0) / (x1 - x0) * (W - L - R);
    const double py = H - B - (y[i] - y0) / (y1 - y0) * (H - T - B);
    out += fmt::format("{:.6f},{:.6f} ", px, py);
  }
  out += "\"/>\n</svg>\n";
  return out;
}

inline std::string sha256_hex(std::string_view data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md.data(), &len, EVP_sha256(), nullptr) != 1)
    throw Error("SHA-256 digest failed");
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", md[i]);
  return hex;
}

}  // namespace qmwp::io
