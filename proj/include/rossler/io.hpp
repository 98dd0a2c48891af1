#pragma once

// File formats: crossing CSV, polyline CSV, ASCII triangle soup, and the
// deterministic number formatting shared by the CLI outputs.

#include <iosfwd>
#include <string>
#include <vector>

#include "rossler/manifolds.hpp"
#include "rossler/section.hpp"

namespace rossler {

// Shortest round-trippable decimal form; '.' decimal separator regardless
// of locale.
std::string format_double(double v);

inline constexpr const char* crossing_csv_header = "t,x,y,z,side,transversality";

void write_crossings_csv(std::ostream& os, const std::vector<Crossing>& crossings);

inline constexpr const char* polyline_csv_header = "generation,index,x,y,z";

// One row per ring point of each recorded generation.
void write_front_csv(std::ostream& os, const FrontResult& front);

// One row per polyline vertex (generation fixed at 0).
void write_polyline_csv(std::ostream& os, const std::vector<Vec3>& polyline);

// ASCII triangle soup: 9 whitespace-separated floats per line
// (ax ay az bx by bz cx cy cz); '#' starts a comment.
std::vector<Triangle> read_triangle_soup(std::istream& is);
std::vector<Triangle> read_triangle_soup_file(const std::string& path);
void write_triangle_soup(std::ostream& os, const std::vector<Triangle>& tris);

}  // namespace rossler
