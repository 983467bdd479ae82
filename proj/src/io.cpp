#include "ppl/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "ppl/error.hpp"
#include "ppl/models.hpp"

namespace ppl {
namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ComputationError("cannot write " + path.string());
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read " + path.string());
  return in;
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& field, std::size_t line) {
  const auto t = trim(field);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    std::ostringstream msg;
    msg << "line " << line << ": cannot parse '" << t << "' as a number";
    throw ValidationError(msg.str());
  }
  return v;
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return {};
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, r.ptr};
}

void write_pattern_csv(std::ostream& out, const PointPattern& x) {
  out << "x,y\n";
  for (const auto& p : x) out << format_double(p.x) << ',' << format_double(p.y) << '\n';
}

void write_pattern_csv(const std::filesystem::path& path, const PointPattern& x) {
  auto out = open_out(path);
  write_pattern_csv(out, x);
}

PointPattern read_pattern_csv(std::istream& in, const Window& w) {
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("pattern file is empty");
  auto header = trim(line);
  // Tolerate a UTF-8 byte order mark and quoted headers.
  if (header.rfind("\xEF\xBB\xBF", 0) == 0) header = header.substr(3);
  if (header != "x,y" && header != "\"x\",\"y\"") {
    throw ValidationError("pattern file must start with the header 'x,y'");
  }
  std::vector<Point> pts;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw ValidationError("line " + std::to_string(lineno) + ": expected two columns");
    }
    pts.push_back({parse_number(line.substr(0, comma), lineno),
                   parse_number(line.substr(comma + 1), lineno)});
  }
  return PointPattern(std::move(pts), w);
}

PointPattern read_pattern_csv(const std::filesystem::path& path, const Window& w) {
  auto in = open_in(path);
  return read_pattern_csv(in, w);
}

void write_window_json(const std::filesystem::path& path, const Window& w) {
  auto out = open_out(path);
  out << to_json(w).dump(2) << '\n';
}

Window read_window_json(const std::filesystem::path& path) {
  auto in = open_in(path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("invalid window JSON: " + std::string(e.what()));
  }
  return parse_window(j);
}

}  // namespace ppl
