#include "qgt/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <thread>

namespace qgt::sweep {

std::string_view engine_name(Engine e) { return e == Engine::ed ? "ed" : "analytic"; }

Engine parse_engine(std::string_view s) {
  if (s == "analytic") return Engine::analytic;
  if (s == "ed") return Engine::ed;
  throw std::invalid_argument("unknown engine '" + std::string(s) + "' (expected analytic or ed)");
}

std::string_view norm_name(NormKind n) {
  switch (n) {
    case NormKind::frobenius: return "frobenius";
    case NormKind::max_eig: return "max-eig";
    case NormKind::trace: return "trace";
  }
  return "?";
}

NormKind parse_norm(std::string_view s) {
  if (s == "frobenius") return NormKind::frobenius;
  if (s == "max-eig") return NormKind::max_eig;
  if (s == "trace") return NormKind::trace;
  throw std::invalid_argument("unknown norm '" + std::string(s) + "' (expected frobenius, max-eig or trace)");
}

std::string_view part_name(MetricPart p) { return p == MetricPart::delta ? "delta" : "total"; }

MetricPart parse_part(std::string_view s) {
  if (s == "total") return MetricPart::total;
  if (s == "delta") return MetricPart::delta;
  throw std::invalid_argument("unknown metric '" + std::string(s) + "' (expected total or delta)");
}

std::vector<double> Range::values() const {
  std::vector<double> v(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) v[static_cast<std::size_t>(i)] = i == count - 1 ? hi : lo + (hi - lo) * i / (count - 1);
  return v;
}

ConfigError::ConfigError(int line, const std::string& detail, const std::string& source)
    : std::runtime_error((source.empty() ? "" : source + ": ") + (line > 0 ? "line " + std::to_string(line) + ": " : "") +
                         detail),
      line(line),
      detail(detail) {}

void SweepConfig::validate() const {
  const auto fail = [](const std::string& m) { throw ConfigError(0, m); };
  if (engine == Engine::analytic) {
    if (n_sites < 4) fail("N must be at least 4");
    if (n_sites % 2 != 0) fail("N must be even");
  } else if (n_sites < 3 || n_sites > 12) {
    fail("engine=ed needs 3 <= N <= 12");
  }
  for (const Range* r : {&lambda_x, &lambda_y}) {
    if (r->count < 2) fail("scan counts must be at least 2");
    if (!std::isfinite(r->lo) || !std::isfinite(r->hi)) fail("scan window must be finite");
  }
  if (times.empty()) fail("at least one time is needed");
  for (double t : times)
    if (!std::isfinite(t) || t < 0.0) fail("times must be finite and nonnegative");
  if (!std::isfinite(h) || !std::isfinite(point_x) || !std::isfinite(point_y)) fail("couplings must be finite");
  for (double d : offset)
    if (!std::isfinite(d)) fail("quench offset must be finite");
  if (workers < 0) fail("workers must be nonnegative");
  if (!std::isfinite(t_max) || t_max < 0.0) fail("t_max must be finite and nonnegative");
  if (points < 2) fail("points must be at least 2");
  if (!std::isfinite(field) || field < 0.0) fail("field must be finite and nonnegative");
  if (!simd::isa_available(isa)) fail("isa " + std::string(simd::isa_name(isa)) + " is not available on this machine");
}

int SweepConfig::resolved_workers() const {
  if (workers > 0) return workers;
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(std::string_view s) {
  s = trim(s);
  double v = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw std::invalid_argument("expected a number, got '" + std::string(s) + "'");
  return v;
}

template <class Int>
Int to_int(std::string_view s) {
  s = trim(s);
  Int v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw std::invalid_argument("expected an integer, got '" + std::string(s) + "'");
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

Range to_range(std::string_view s) {
  const auto parts = split(s, ':');
  if (parts.size() != 3) throw std::invalid_argument("expected lo:hi:count, got '" + std::string(s) + "'");
  return {to_double(parts[0]), to_double(parts[1]), to_int<int>(parts[2])};
}

std::vector<double> to_list(std::string_view s) {
  std::vector<double> v;
  for (auto item : split(s, ',')) v.push_back(to_double(item));
  return v;
}

using Setter = std::function<void(SweepConfig&, std::string_view)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> m{
      {"run.engine", [](SweepConfig& c, std::string_view v) { c.engine = parse_engine(v); }},
      {"run.norm", [](SweepConfig& c, std::string_view v) { c.norm = parse_norm(v); }},
      {"run.workers", [](SweepConfig& c, std::string_view v) { c.workers = v == "auto" ? 0 : to_int<int>(v); }},
      {"run.output", [](SweepConfig& c, std::string_view v) { c.output = std::string(v); }},
      {"run.isa", [](SweepConfig& c, std::string_view v) { c.isa = simd::parse_isa(v); }},
      {"model.n_sites", [](SweepConfig& c, std::string_view v) { c.n_sites = to_int<int>(v); }},
      {"scan.lambda_x", [](SweepConfig& c, std::string_view v) { c.lambda_x = to_range(v); }},
      {"scan.lambda_y", [](SweepConfig& c, std::string_view v) { c.lambda_y = to_range(v); }},
      {"scan.h", [](SweepConfig& c, std::string_view v) { c.h = to_double(v); }},
      {"scan.times", [](SweepConfig& c, std::string_view v) { c.times = to_list(v); }},
      {"scan.metric", [](SweepConfig& c, std::string_view v) { c.metric = parse_part(v); }},
      {"quench.dlambda_x", [](SweepConfig& c, std::string_view v) { c.offset[0] = to_double(v); }},
      {"quench.dlambda_y", [](SweepConfig& c, std::string_view v) { c.offset[1] = to_double(v); }},
      {"quench.dh", [](SweepConfig& c, std::string_view v) { c.offset[2] = to_double(v); }},
      {"timeseries.lambda_x", [](SweepConfig& c, std::string_view v) { c.point_x = to_double(v); }},
      {"timeseries.lambda_y", [](SweepConfig& c, std::string_view v) { c.point_y = to_double(v); }},
      {"timeseries.direction", [](SweepConfig& c, std::string_view v) { c.direction = parse_coord(v); }},
      {"timeseries.t_max", [](SweepConfig& c, std::string_view v) { c.t_max = to_double(v); }},
      {"timeseries.points", [](SweepConfig& c, std::string_view v) { c.points = to_int<int>(v); }},
      {"timeseries.field", [](SweepConfig& c, std::string_view v) { c.field = to_double(v); }},
      {"timeseries.seed", [](SweepConfig& c, std::string_view v) { c.seed = to_int<std::uint64_t>(v); }},
  };
  return m;
}

const std::set<std::string, std::less<>> kSections{"run", "model", "scan", "quench", "timeseries"};

}  // namespace

SweepConfig load_config(std::string_view text) {
  SweepConfig c;
  std::string section = "run";
  std::set<std::string> seen;
  int line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = text.find('\n', start);
    std::string_view line = text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
    start = end == std::string_view::npos ? text.size() + 1 : end + 1;
    ++line_no;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(line_no, "unterminated section header");
      const auto name = trim(line.substr(1, line.size() - 2));
      if (!kSections.contains(name)) throw ConfigError(line_no, "unknown section [" + std::string(name) + "]");
      section = std::string(name);
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(line_no, "expected key = value");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    const std::string full = section + "." + std::string(key);
    const auto it = setters().find(full);
    if (it == setters().end()) throw ConfigError(line_no, "unknown key '" + std::string(key) + "' in [" + section + "]");
    if (!seen.insert(full).second) throw ConfigError(line_no, "duplicate key '" + std::string(key) + "' in [" + section + "]");
    if (value.empty()) throw ConfigError(line_no, "missing value for '" + std::string(key) + "'");
    try {
      it->second(c, value);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(line_no, e.what());
    }
  }
  c.validate();
  return c;
}

SweepConfig load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read config " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return load_config(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(e.line, e.detail, path);
  }
}

namespace {

std::string num(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string range(const Range& r) { return num(r.lo) + ":" + num(r.hi) + ":" + std::to_string(r.count); }

}  // namespace

std::string emit_config(const SweepConfig& c) {
  std::ostringstream o;
  o << "[run]\n"
    << "engine = " << engine_name(c.engine) << "\n"
    << "norm = " << norm_name(c.norm) << "\n"
    << "workers = " << (c.workers == 0 ? std::string("auto") : std::to_string(c.workers)) << "\n";
  if (!c.output.empty()) o << "output = " << c.output << "\n";
  o << "isa = " << simd::isa_name(c.isa) << "\n"
    << "\n[model]\n"
    << "n_sites = " << c.n_sites << "\n"
    << "\n[scan]\n"
    << "lambda_x = " << range(c.lambda_x) << "\n"
    << "lambda_y = " << range(c.lambda_y) << "\n"
    << "h = " << num(c.h) << "\n"
    << "times = ";
  for (std::size_t i = 0; i < c.times.size(); ++i) o << (i ? ", " : "") << num(c.times[i]);
  o << "\n"
    << "metric = " << part_name(c.metric) << "\n"
    << "\n[quench]\n"
    << "dlambda_x = " << num(c.offset[0]) << "\n"
    << "dlambda_y = " << num(c.offset[1]) << "\n"
    << "dh = " << num(c.offset[2]) << "\n"
    << "\n[timeseries]\n"
    << "lambda_x = " << num(c.point_x) << "\n"
    << "lambda_y = " << num(c.point_y) << "\n"
    << "direction = " << coord_name(c.direction) << "\n"
    << "t_max = " << num(c.t_max) << "\n"
    << "points = " << c.points << "\n"
    << "field = " << num(c.field) << "\n"
    << "seed = " << c.seed << "\n";
  return o.str();
}

}  // namespace qgt::sweep
