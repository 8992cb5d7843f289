#include "wkb/io.hpp"

#include <json.hpp>

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace wkb {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string csv_field(std::string_view text) {
  if (text.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(text);
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

namespace {

void put_le(std::ostream& out, double x) {
  auto bits = std::bit_cast<std::uint64_t>(x);
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((bits >> (8 * i)) & 0xff);
  out.write(b, 8);
}

double get_le(std::istream& in) {
  unsigned char b[8];
  in.read(reinterpret_cast<char*>(b), 8);
  if (!in) throw std::runtime_error("snapshot: truncated sample data");
  std::uint64_t bits = 0;
  for (int i = 7; i >= 0; --i) bits = (bits << 8) | b[i];
  return std::bit_cast<double>(bits);
}

}  // namespace

void write_snapshot(std::ostream& out, const std::string& name, double time,
                    const ComplexField& field) {
  const ComplexField f = to_physical(field);
  const Grid& g = f.grid();
  nlohmann::ordered_json header;
  header["name"] = name;
  header["time"] = time;
  nlohmann::ordered_json grid;
  grid["dim"] = g.dim();
  grid["points"] = nlohmann::json::array();
  grid["lengths"] = nlohmann::json::array();
  for (int axis = 0; axis < g.dim(); ++axis) {
    grid["points"].push_back(g.points(axis));
    grid["lengths"].push_back(g.length(axis));
  }
  header["grid"] = grid;
  header["count"] = f.size();
  header["encoding"] = "f64le-interleaved";
  out << header.dump() << '\n';
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    put_le(out, f[i].real());
    put_le(out, f[i].imag());
  }
}

std::optional<Snapshot> read_snapshot(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) return std::nullopt;
  const auto header = nlohmann::json::parse(line);
  const auto& grid = header.at("grid");
  const int dim = grid.at("dim").get<int>();
  const auto points = grid.at("points").get<std::vector<int>>();
  const auto lengths = grid.at("lengths").get<std::vector<double>>();
  const Grid g = dim == 1 ? Grid::line(points.at(0), lengths.at(0))
                          : Grid::plane({points.at(0), points.at(1)}, {lengths.at(0), lengths.at(1)});
  const auto count = header.at("count").get<Eigen::Index>();
  if (count != g.size()) throw std::runtime_error("snapshot: sample count does not match grid");
  ArrayXcd values(count);
  for (Eigen::Index i = 0; i < count; ++i) {
    const double re = get_le(in);
    const double im = get_le(in);
    values[i] = Complex(re, im);
  }
  return Snapshot{header.at("name").get<std::string>(), header.at("time").get<double>(),
                  ComplexField(g, std::move(values))};
}

}  // namespace wkb
