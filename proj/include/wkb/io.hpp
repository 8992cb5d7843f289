#pragma once

#include "wkb/grid.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace wkb {

// Shortest text that reads back to the same double ("%.17g"); "nan"/"inf" spelled out.
std::string format_double(double x);

// RFC 4180 field quoting: quoted only when it contains a comma, quote or line break.
std::string csv_field(std::string_view text);

// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t value);

// One binary record: a JSON header line {"name","time","grid":{...},"count"}
// then `count` complex samples as little-endian float64 (re, im) pairs.
void write_snapshot(std::ostream& out, const std::string& name, double time,
                    const ComplexField& field);

struct Snapshot {
  std::string name;
  double time = 0.0;
  ComplexField field;
};

// Reads the next record; empty at a clean end of stream.
std::optional<Snapshot> read_snapshot(std::istream& in);

}  // namespace wkb
