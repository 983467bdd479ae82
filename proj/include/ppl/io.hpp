#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "ppl/geometry.hpp"

namespace ppl {

// Shortest round-trip decimal form; empty for NaN.
std::string format_double(double v);

// CSV with header "x,y", one point per row.
void write_pattern_csv(const std::filesystem::path& path, const PointPattern& x);
void write_pattern_csv(std::ostream& out, const PointPattern& x);
PointPattern read_pattern_csv(const std::filesystem::path& path, const Window& w);
PointPattern read_pattern_csv(std::istream& in, const Window& w);

// JSON sidecar {"x_min":..,"x_max":..,"y_min":..,"y_max":..}.
void write_window_json(const std::filesystem::path& path, const Window& w);
Window read_window_json(const std::filesystem::path& path);

}  // namespace ppl
