#pragma once

// Run configuration for the sweep front end.
//
// Grammar (one statement per line):
//   line     := blank | comment | section | entry
//   comment  := '#' anything
//   section  := '[' name ']'            one of run, model, scan, quench, timeseries
//   entry    := key '=' value [comment]
//   range    := lo ':' hi ':' count     e.g. -2:2:201
//   list     := value {',' value}
// Keys before the first section belong to [run]. Every key is optional and
// may appear once.

#include "qgt/kernels.hpp"
#include "qgt/model.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qgt::sweep {

enum class Engine { analytic, ed };
enum class NormKind { frobenius, max_eig, trace };
/// Which tensor a scan reports: g(0) + Dg(t), or Dg(t) alone.
enum class MetricPart { total, delta };

std::string_view engine_name(Engine e);
Engine parse_engine(std::string_view s);
std::string_view norm_name(NormKind n);
NormKind parse_norm(std::string_view s);
std::string_view part_name(MetricPart p);
MetricPart parse_part(std::string_view s);

/// `count` evenly spaced values from lo to hi inclusive.
struct Range {
  double lo = -2.0;
  double hi = 2.0;
  int count = 201;

  std::vector<double> values() const;
  friend bool operator==(const Range&, const Range&) = default;
};

struct SweepConfig {
  // [run]
  Engine engine = Engine::analytic;
  NormKind norm = NormKind::frobenius;
  int workers = 0;  // 0: hardware concurrency
  std::string output;
  simd::Isa isa = simd::best_isa();
  // [model]
  int n_sites = 500;
  // [scan]
  Range lambda_x{};
  Range lambda_y{};
  double h = 0.0;
  std::vector<double> times{0.0};
  MetricPart metric = MetricPart::total;
  // [quench]
  Vec3 offset{0.0, 0.0, 0.2};
  // [timeseries]
  double point_x = 0.5;
  double point_y = 0.3;
  Coord direction = Coord::h;
  double t_max = 0.0;  // 0: 50 / slowest quenched gap
  int points = 200;
  double field = 0.0;  // strength of the random Z field, 0 disables it
  std::uint64_t seed = 20240601;

  /// Throws ConfigError (line 0) on range violations.
  void validate() const;
  int resolved_workers() const;

  friend bool operator==(const SweepConfig&, const SweepConfig&) = default;
};

/// what() reads "[source: ]line N: detail"; line 0 means a validation error.
struct ConfigError : std::runtime_error {
  ConfigError(int line, const std::string& detail, const std::string& source = {});
  int line;
  std::string detail;
};

SweepConfig load_config(std::string_view text);
SweepConfig load_config_file(const std::string& path);
/// Full config with every key spelled out; load_config(emit_config(c)) == c.
std::string emit_config(const SweepConfig& c);

}  // namespace qgt::sweep
