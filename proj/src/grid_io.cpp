#include "parabolic/io.hpp"

#include <bit>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace parabolic::io {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (x == 0.0) return "0";  // folds -0
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

std::uint64_t fnv1a(std::string_view data, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

void write_atomic(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw std::runtime_error("cannot rename into " + path.string() + ": " + ec.message());
}

std::string field_map_csv(const field::IntensityMap& map, const std::string& config_hash) {
  std::ostringstream os;
  const bool rho = map.grid.kind == field::PlaneGrid::Kind::RhoZ;
  os << "# config_hash: " << config_hash << '\n';
  os << (rho ? "rho" : "x")
     << ",z,Ex_re,Ex_im,Ey_re,Ey_im,Ez_re,Ez_im,intensity,relative,valid\n";
  for (std::size_t i = 0; i < map.samples.size(); ++i) {
    const auto& s = map.samples[i];
    const double t = rho ? s.position.rho
                         : (s.position.phi != 0.0 ? -s.position.rho : s.position.rho);
    os << format_double(t) << ',' << format_double(s.position.z);
    for (const auto& c : s.cartesian) os << ',' << format_double(c.real()) << ',' << format_double(c.imag());
    os << ',' << format_double(map.intensity[i]) << ',' << format_double(map.relative[i]) << ','
       << static_cast<int>(map.valid[i]) << '\n';
  }
  return os.str();
}

void write_binary_grid(const std::filesystem::path& path, const std::vector<double>& values,
                       const nlohmann::json& descriptor) {
  std::string bytes(values.size() * sizeof(double), '\0');
  for (std::size_t i = 0; i < values.size(); ++i) {
    auto bits = std::bit_cast<std::uint64_t>(values[i]);
    for (int b = 0; b < 8; ++b) {
      bytes[i * 8 + static_cast<std::size_t>(b)] = static_cast<char>((bits >> (8 * b)) & 0xffU);
    }
  }
  write_atomic(path, bytes);
  nlohmann::json desc = descriptor;
  desc["dtype"] = "float64";
  desc["byte_order"] = "little";
  desc["count"] = values.size();
  desc["file"] = path.filename().string();
  std::filesystem::path side = path;
  side += ".json";
  write_atomic(side, desc.dump(2) + "\n");
}

}  // namespace parabolic::io
