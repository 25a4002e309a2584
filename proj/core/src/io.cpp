#include "dipolefield/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <system_error>
#include <vector>

#include <nlohmann/json.hpp>

#include "dipolefield/errors.hpp"

namespace dipolefield::io {
namespace {

using nlohmann::json;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

bool looks_like_json(std::string_view text) {
  const auto t = trim(text.substr(0, std::min<std::size_t>(text.size(), 64)));
  const auto pos = text.find_first_not_of(" \t\r\n");
  return !t.empty() && pos != std::string_view::npos && text[pos] == '{';
}

/// Parsed CSV: metadata map, header, and rows of raw cells.
struct CsvTable {
  std::map<std::string, std::string, std::less<>> meta;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> row_lines;

  std::size_t column(std::string_view name, std::string_view what) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    throw ParseError(std::string(what) + ": missing column '" + std::string(name) + "'");
  }

  std::string_view meta_value(std::string_view key, std::string_view what) const {
    auto it = meta.find(key);
    if (it == meta.end()) throw ParseError(std::string(what) + ": missing metadata key '" + std::string(key) + "'");
    return it->second;
  }
};

std::vector<std::string> split(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.emplace_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

CsvTable parse_csv(std::string_view text, std::string_view what) {
  CsvTable t;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '#') {
      line.remove_prefix(1);
      const auto eq = line.find('=');
      if (eq != std::string_view::npos) t.meta.emplace(std::string(trim(line.substr(0, eq))), std::string(trim(line.substr(eq + 1))));
      continue;
    }
    if (t.header.empty()) {
      t.header = split(line);
      continue;
    }
    auto cells = split(line);
    if (cells.size() != t.header.size()) {
      throw ParseError(std::string(what) + ": line " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                       " fields, header has " + std::to_string(t.header.size()));
    }
    t.rows.push_back(std::move(cells));
    t.row_lines.push_back(line_no);
  }
  if (t.header.empty()) throw ParseError(std::string(what) + ": no header row");
  return t;
}

double to_double(std::string_view cell, std::string_view what, std::string_view column, std::size_t line) {
  double v = 0.0;
  const auto* end = cell.data() + cell.size();
  auto [p, ec] = std::from_chars(cell.data(), end, v);
  if (ec != std::errc() || p != end) {
    // from_chars rejects "inf"/"nan" spellings produced by other tools; retry via strtod.
    std::string copy(cell);
    char* stop = nullptr;
    v = std::strtod(copy.c_str(), &stop);
    if (copy.empty() || stop != copy.c_str() + copy.size()) {
      throw ParseError(std::string(what) + ": column '" + std::string(column) + "' line " + std::to_string(line) +
                       ": invalid number '" + copy + "'");
    }
  }
  return v;
}

std::uint64_t to_u64(std::string_view cell, std::string_view what, std::string_view column, std::size_t line) {
  std::uint64_t v = 0;
  const auto* end = cell.data() + cell.size();
  auto [p, ec] = std::from_chars(cell.data(), end, v);
  if (ec != std::errc() || p != end) {
    throw ParseError(std::string(what) + ": column '" + std::string(column) + "' line " + std::to_string(line) +
                     ": invalid count '" + std::string(cell) + "'");
  }
  return v;
}

void check_uniform(const std::vector<double>& nodes, double min, double step, std::string_view what,
                   std::string_view column) {
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const double want = min + step * static_cast<double>(i);
    if (std::abs(nodes[i] - want) > 1e-9 * std::max(1.0, std::abs(want)) + 1e-9 * std::abs(step)) {
      throw ParseError(std::string(what) + ": column '" + std::string(column) + "' is not a uniform grid at row " +
                       std::to_string(i + 1));
    }
  }
}

OrientationMode mode_from(std::string_view text, std::string_view what) {
  try {
    return parse_orientation_mode(text);
  } catch (const DomainError&) {
    throw ParseError(std::string(what) + ": metadata key 'mode' has unknown value '" + std::string(text) + "'");
  }
}

template <class T>
T json_get(const json& j, const char* key, std::string_view what) {
  if (!j.contains(key)) throw ParseError(std::string(what) + ": missing field '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ParseError(std::string(what) + ": field '" + key + "' has the wrong type");
  }
}

RunningStats stats_from(std::uint64_t count, double mean, double variance) {
  RunningStats s;
  s.merge_moments(count, mean, count > 1 ? variance * static_cast<double>(count - 1) : 0.0);
  return s;
}

}  // namespace

FileFormat parse_file_format(std::string_view text) {
  if (text == "csv") return FileFormat::kCsv;
  if (text == "json") return FileFormat::kJson;
  throw DomainError("unknown format '" + std::string(text) + "' (expected csv or json)");
}

std::string_view to_string(FileFormat format) noexcept { return format == FileFormat::kCsv ? "csv" : "json"; }

std::string format_curve(const DistributionCurve& curve, FileFormat format) {
  const auto& m = curve.meta;
  if (format == FileFormat::kJson) {
    json j;
    j["kind"] = "curve";
    j["mode"] = std::string(to_string(m.mode));
    j["epsilon"] = m.epsilon;
    j["tolerance"] = m.tolerance;
    j["source"] = m.source;
    j["grid"] = {{"min", curve.grid.min}, {"max", curve.grid.max}, {"points", curve.grid.points}};
    std::vector<double> g(curve.grid.points);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = curve.grid.at(i);
    j["g"] = g;
    j["density"] = curve.density;
    return j.dump(1) + "\n";
  }
  std::ostringstream os;
  os << "# dipolefield curve\n"
     << "# mode=" << to_string(m.mode) << "\n"
     << "# epsilon=" << num(m.epsilon) << "\n"
     << "# source=" << m.source << "\n"
     << "# grid_min=" << num(curve.grid.min) << "\n"
     << "# grid_max=" << num(curve.grid.max) << "\n"
     << "# grid_points=" << curve.grid.points << "\n"
     << "# grid_step=" << num(curve.grid.step()) << "\n"
     << "# tolerance=" << num(m.tolerance) << "\n"
     << "g,density\n";
  for (std::size_t i = 0; i < curve.density.size(); ++i) os << num(curve.grid.at(i)) << ',' << num(curve.density[i]) << '\n';
  return os.str();
}

std::string format_histogram(const FieldHistogram& h, FileFormat format) {
  const auto& m = h.meta;
  if (format == FileFormat::kJson) {
    json j;
    j["kind"] = "histogram";
    j["mode"] = std::string(to_string(m.mode));
    j["epsilon"] = m.epsilon;
    j["n_dipoles"] = m.n_dipoles;
    j["realizations"] = h.realizations;
    j["seed"] = m.seed;
    j["source"] = m.source;
    j["underflow"] = h.underflow;
    j["overflow"] = h.overflow;
    j["mean"] = h.field.mean();
    j["variance"] = h.field.variance();
    j["variance_converged"] = h.variance_converged();
    j["angular_mean"] = h.angular.mean();
    j["angular_variance"] = h.angular.variance();
    j["angular_count"] = h.angular.count();
    j["bins"] = {{"min", h.binning.min}, {"max", h.binning.max}, {"count", h.binning.bins}};
    std::vector<double> left(h.binning.bins), right(h.binning.bins), height(h.binning.bins);
    for (std::size_t i = 0; i < h.binning.bins; ++i) {
      left[i] = h.binning.left(i);
      right[i] = h.binning.right(i);
      height[i] = h.normalized_height(i);
    }
    j["bin_left"] = left;
    j["bin_right"] = right;
    j["count"] = h.counts;
    j["normalized_height"] = height;
    return j.dump(1) + "\n";
  }
  std::ostringstream os;
  os << "# dipolefield histogram\n"
     << "# mode=" << to_string(m.mode) << "\n"
     << "# epsilon=" << num(m.epsilon) << "\n"
     << "# n_dipoles=" << m.n_dipoles << "\n"
     << "# realizations=" << h.realizations << "\n"
     << "# seed=" << m.seed << "\n"
     << "# source=" << m.source << "\n"
     << "# bins_min=" << num(h.binning.min) << "\n"
     << "# bins_max=" << num(h.binning.max) << "\n"
     << "# bins=" << h.binning.bins << "\n"
     << "# underflow=" << h.underflow << "\n"
     << "# overflow=" << h.overflow << "\n"
     << "# mean=" << num(h.field.mean()) << "\n"
     << "# variance=" << num(h.field.variance()) << "\n"
     << "# variance_converged=" << (h.variance_converged() ? "true" : "false") << "\n"
     << "# angular_count=" << h.angular.count() << "\n"
     << "# angular_mean=" << num(h.angular.mean()) << "\n"
     << "# angular_variance=" << num(h.angular.variance()) << "\n"
     << "bin_left,bin_right,count,normalized_height\n";
  for (std::size_t i = 0; i < h.binning.bins; ++i) {
    os << num(h.binning.left(i)) << ',' << num(h.binning.right(i)) << ',' << h.counts[i] << ','
       << num(h.normalized_height(i)) << '\n';
  }
  return os.str();
}

std::string format_report(const ComparisonReport& r, FileFormat format) {
  if (format == FileFormat::kJson) {
    json j;
    j["kind"] = "comparison";
    j["verdict"] = r.verdict();
    j["sup_norm"] = r.sup_norm;
    j["max_z"] = r.max_z;
    j["max_z_location"] = r.max_z_location;
    j["chi2"] = r.chi2;
    j["dof"] = r.dof;
    j["chi2_per_dof"] = r.chi2_per_dof();
    j["excluded_bins"] = r.excluded_bins;
    j["uncovered_bins"] = r.uncovered_bins;
    j["threshold"] = r.options.max_z;
    j["chi2_band"] = {r.options.chi2_per_dof_low, r.options.chi2_per_dof_high};
    j["min_expected"] = r.options.min_expected;
    return j.dump(1) + "\n";
  }
  std::ostringstream os;
  os << "# dipolefield comparison\n"
     << "key,value\n"
     << "verdict," << r.verdict() << "\n"
     << "sup_norm," << num(r.sup_norm) << "\n"
     << "max_z," << num(r.max_z) << "\n"
     << "max_z_location," << num(r.max_z_location) << "\n"
     << "chi2," << num(r.chi2) << "\n"
     << "dof," << r.dof << "\n"
     << "chi2_per_dof," << num(r.chi2_per_dof()) << "\n"
     << "excluded_bins," << r.excluded_bins << "\n"
     << "uncovered_bins," << r.uncovered_bins << "\n"
     << "threshold," << num(r.options.max_z) << "\n"
     << "chi2_band_low," << num(r.options.chi2_per_dof_low) << "\n"
     << "chi2_band_high," << num(r.options.chi2_per_dof_high) << "\n"
     << "min_expected," << num(r.options.min_expected) << "\n";
  return os.str();
}

DistributionCurve parse_curve(std::string_view text) {
  constexpr std::string_view what = "curve file";
  DistributionCurve c;
  std::vector<double> g;
  std::optional<double> declared_max;
  if (looks_like_json(text)) {
    json j;
    try {
      j = json::parse(text);
    } catch (const json::parse_error& e) {
      throw ParseError(std::string(what) + ": invalid JSON: " + e.what());
    }
    if (j.value("kind", "") != "curve") throw ParseError(std::string(what) + ": field 'kind' must be \"curve\"");
    c.meta.mode = mode_from(json_get<std::string>(j, "mode", what), what);
    c.meta.epsilon = json_get<double>(j, "epsilon", what);
    c.meta.tolerance = j.value("tolerance", 0.0);
    c.meta.source = j.value("source", std::string("unknown"));
    g = json_get<std::vector<double>>(j, "g", what);
    c.density = json_get<std::vector<double>>(j, "density", what);
    if (j.contains("grid") && j["grid"].is_object() && j["grid"].contains("max") && j["grid"]["max"].is_number()) {
      declared_max = j["grid"]["max"].get<double>();
    }
    if (g.size() != c.density.size()) throw ParseError(std::string(what) + ": fields 'g' and 'density' differ in length");
  } else {
    const auto t = parse_csv(text, what);
    const auto ig = t.column("g", what);
    const auto id = t.column("density", what);
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
      g.push_back(to_double(t.rows[r][ig], what, "g", t.row_lines[r]));
      c.density.push_back(to_double(t.rows[r][id], what, "density", t.row_lines[r]));
    }
    c.meta.mode = mode_from(t.meta_value("mode", what), what);
    c.meta.epsilon = to_double(t.meta_value("epsilon", what), what, "epsilon", 0);
    if (auto it = t.meta.find("tolerance"); it != t.meta.end()) c.meta.tolerance = to_double(it->second, what, "tolerance", 0);
    if (auto it = t.meta.find("source"); it != t.meta.end()) c.meta.source = it->second;
    if (auto it = t.meta.find("grid_max"); it != t.meta.end()) declared_max = to_double(it->second, what, "grid_max", 0);
  }
  if (g.size() < 2) throw ParseError(std::string(what) + ": column 'g' needs at least two rows");
  // The written nodes are min + i * step; the declared max restores the
  // exact grid when it agrees with the last node.
  double max = g.back();
  if (declared_max && std::abs(*declared_max - max) <= 1e-12 * std::max(1.0, std::abs(max))) max = *declared_max;
  c.grid = {g.front(), max, g.size()};
  if (!(c.grid.min < c.grid.max)) throw ParseError(std::string(what) + ": column 'g' must be increasing");
  check_uniform(g, c.grid.min, c.grid.step(), what, "g");
  return c;
}

FieldHistogram parse_histogram(std::string_view text) {
  constexpr std::string_view what = "histogram file";
  FieldHistogram h;
  std::vector<double> left, right;
  std::optional<double> declared_max;
  std::uint64_t realizations = 0;
  double mean = 0.0, variance = 0.0, angular_mean = 0.0, angular_variance = 0.0;
  std::uint64_t angular_count = 0;
  if (looks_like_json(text)) {
    json j;
    try {
      j = json::parse(text);
    } catch (const json::parse_error& e) {
      throw ParseError(std::string(what) + ": invalid JSON: " + e.what());
    }
    if (j.value("kind", "") != "histogram") throw ParseError(std::string(what) + ": field 'kind' must be \"histogram\"");
    h.meta.mode = mode_from(json_get<std::string>(j, "mode", what), what);
    h.meta.epsilon = json_get<double>(j, "epsilon", what);
    h.meta.n_dipoles = json_get<std::uint64_t>(j, "n_dipoles", what);
    h.meta.seed = json_get<std::uint64_t>(j, "seed", what);
    h.meta.source = j.value("source", std::string("simulation"));
    realizations = json_get<std::uint64_t>(j, "realizations", what);
    h.underflow = json_get<std::uint64_t>(j, "underflow", what);
    h.overflow = json_get<std::uint64_t>(j, "overflow", what);
    mean = json_get<double>(j, "mean", what);
    variance = json_get<double>(j, "variance", what);
    angular_mean = j.value("angular_mean", 0.0);
    angular_variance = j.value("angular_variance", 0.0);
    angular_count = j.value("angular_count", std::uint64_t{0});
    left = json_get<std::vector<double>>(j, "bin_left", what);
    right = json_get<std::vector<double>>(j, "bin_right", what);
    h.counts = json_get<std::vector<std::uint64_t>>(j, "count", what);
    if (j.contains("bins") && j["bins"].is_object() && j["bins"].contains("max") && j["bins"]["max"].is_number()) {
      declared_max = j["bins"]["max"].get<double>();
    }
    if (left.size() != h.counts.size() || right.size() != h.counts.size()) {
      throw ParseError(std::string(what) + ": fields 'bin_left', 'bin_right' and 'count' differ in length");
    }
  } else {
    const auto t = parse_csv(text, what);
    const auto il = t.column("bin_left", what);
    const auto ir = t.column("bin_right", what);
    const auto ic = t.column("count", what);
    t.column("normalized_height", what);
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
      left.push_back(to_double(t.rows[r][il], what, "bin_left", t.row_lines[r]));
      right.push_back(to_double(t.rows[r][ir], what, "bin_right", t.row_lines[r]));
      h.counts.push_back(to_u64(t.rows[r][ic], what, "count", t.row_lines[r]));
    }
    auto u64 = [&](std::string_view key) { return to_u64(t.meta_value(key, what), what, key, 0); };
    auto dbl = [&](std::string_view key) { return to_double(t.meta_value(key, what), what, key, 0); };
    h.meta.mode = mode_from(t.meta_value("mode", what), what);
    h.meta.epsilon = dbl("epsilon");
    h.meta.n_dipoles = u64("n_dipoles");
    h.meta.seed = u64("seed");
    if (auto it = t.meta.find("source"); it != t.meta.end()) h.meta.source = it->second;
    realizations = u64("realizations");
    h.underflow = u64("underflow");
    h.overflow = u64("overflow");
    mean = dbl("mean");
    variance = dbl("variance");
    if (auto it = t.meta.find("bins_max"); it != t.meta.end()) declared_max = to_double(it->second, what, "bins_max", 0);
    if (t.meta.count("angular_count")) {
      angular_count = u64("angular_count");
      angular_mean = dbl("angular_mean");
      angular_variance = dbl("angular_variance");
    }
  }
  if (h.counts.size() < 2) throw ParseError(std::string(what) + ": need at least two bins");
  double max = right.back();
  if (declared_max && std::abs(*declared_max - max) <= 1e-12 * std::max(1.0, std::abs(max))) max = *declared_max;
  h.binning = {left.front(), max, h.counts.size()};
  check_uniform(left, h.binning.min, h.binning.width(), what, "bin_left");
  check_uniform(right, h.binning.min + h.binning.width(), h.binning.width(), what, "bin_right");
  std::uint64_t total = h.underflow + h.overflow;
  for (auto c : h.counts) total += c;
  if (total != realizations) {
    throw ParseError(std::string(what) + ": counts plus underflow/overflow (" + std::to_string(total) +
                     ") do not equal 'realizations' (" + std::to_string(realizations) + ")");
  }
  h.realizations = realizations;
  h.field = stats_from(realizations, mean, variance);
  h.angular = stats_from(angular_count, angular_mean, angular_variance);
  return h;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "' for reading");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + tmp.string() + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("failed writing '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace dipolefield::io
