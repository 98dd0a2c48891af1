#include "rossler/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace rossler {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  // Shortest representation that round-trips.
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    double back;
    std::sscanf(buf, "%lf", &back);
    if (back == v) break;
  }
  return buf;
}

void write_crossings_csv(std::ostream& os, const std::vector<Crossing>& crossings) {
  os << crossing_csv_header << '\n';
  for (const Crossing& c : crossings) {
    os << format_double(c.time) << ',' << format_double(c.point.x) << ','
       << format_double(c.point.y) << ',' << format_double(c.point.z) << ','
       << (c.side == SectionSide::U ? 'U' : 'L') << ','
       << format_double(c.transversality) << '\n';
  }
}

void write_front_csv(std::ostream& os, const FrontResult& front) {
  os << polyline_csv_header << '\n';
  for (const ManifoldFront& gen : front.history) {
    int idx = 0;
    for (const RingPoint& pt : gen.ring) {
      os << gen.generation << ',' << idx++ << ',' << format_double(pt.pos.x) << ','
         << format_double(pt.pos.y) << ',' << format_double(pt.pos.z) << '\n';
    }
  }
}

void write_polyline_csv(std::ostream& os, const std::vector<Vec3>& polyline) {
  os << polyline_csv_header << '\n';
  int idx = 0;
  for (const Vec3& q : polyline)
    os << 0 << ',' << idx++ << ',' << format_double(q.x) << ',' << format_double(q.y)
       << ',' << format_double(q.z) << '\n';
}

std::vector<Triangle> read_triangle_soup(std::istream& is) {
  std::vector<Triangle> tris;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    double v[9];
    int got = 0;
    while (got < 9 && (ls >> v[got])) ++got;
    if (got == 0) continue;  // blank / comment line
    if (got != 9)
      throw DomainError("triangle soup: line " + std::to_string(lineno) +
                        " has " + std::to_string(got) + " values, expected 9");
    tris.push_back({{v[0], v[1], v[2]}, {v[3], v[4], v[5]}, {v[6], v[7], v[8]}});
  }
  return tris;
}

std::vector<Triangle> read_triangle_soup_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw DomainError("cannot open surface file: " + path);
  return read_triangle_soup(f);
}

void write_triangle_soup(std::ostream& os, const std::vector<Triangle>& tris) {
  for (const Triangle& t : tris) {
    os << format_double(t.a.x) << ' ' << format_double(t.a.y) << ' '
       << format_double(t.a.z) << ' ' << format_double(t.b.x) << ' '
       << format_double(t.b.y) << ' ' << format_double(t.b.z) << ' '
       << format_double(t.c.x) << ' ' << format_double(t.c.y) << ' '
       << format_double(t.c.z) << '\n';
  }
}

}  // namespace rossler
