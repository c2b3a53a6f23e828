#include "qgt/sweep.hpp"

#include "qgt/fermion.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

namespace qgt::sweep {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kSectorGap = 1e-3;

// Runs fn(i) for i in [0, n) on `workers` threads. Each index writes only its
// own slot, so results are independent of scheduling.
template <class Fn>
void parallel_for(std::size_t n, int workers, Fn&& fn) {
  const auto threads = static_cast<std::size_t>(std::max(1, workers));
  if (threads == 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < std::min(threads, n); ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_double(v[i]);
  return s;
}

std::string range_text(const Range& r) {
  return format_double(r.lo) + ":" + format_double(r.hi) + ":" + std::to_string(r.count);
}

void fill(ScanRow& row, const MetricTensor& g, NormKind norm) {
  row.g = {g(0, 0), g(0, 1), g(1, 1), g(0, 2), g(1, 2), g(2, 2)};
  row.norm = block_norm(g, norm);
  row.log10_norm = clipped_log10(row.norm);
}

void fail(ScanRow& row) {
  row.g.fill(kNaN);
  row.norm = row.log10_norm = kNaN;
  row.failed = true;
  row.near_critical = true;
}

std::vector<ScanRow> analytic_point(const SweepConfig& c, const fermion::KGrid& grid, double lx, double ly) {
  std::vector<ScanRow> out(c.times.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = {lx, ly, c.h, c.times[i]};
  try {
    const QuenchSpec q{{lx, ly, c.h, c.n_sites}, c.offset};
    const auto series = fermion::metric_series(grid, q, c.times, {Scaling::per_site, c.isa});
    for (std::size_t i = 0; i < out.size(); ++i) {
      const auto& p = series[i];
      const MetricTensor g = c.metric == MetricPart::total ? p.total() : p.dg;
      fill(out[i], g, c.norm);
      out[i].near_critical = p.g0.near_critical || p.dg.near_critical;
      out[i].min_gap = p.g0.min_gap;
      out[i].min_gap_quenched = p.min_gap_quenched;
    }
  } catch (const std::exception&) {
    for (auto& r : out) fail(r);
  }
  return out;
}

std::vector<ScanRow> ed_point(const SweepConfig& c, double lx, double ly) {
  std::vector<ScanRow> out(c.times.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = {lx, ly, c.h, c.times[i]};
  try {
    const ed::QuenchSystem s({{lx, ly, c.h, c.n_sites}, c.offset});
    const MetricTensor g0 = ed::real_part(s.qgt_quench(0.0), c.n_sites);
    for (std::size_t i = 0; i < out.size(); ++i) {
      MetricTensor g = ed::real_part(s.qgt_quench(c.times[i]), c.n_sites);
      if (c.metric == MetricPart::delta) g += g0.scaled(-1.0);
      fill(out[i], g, c.norm);
      out[i].min_gap = s.initial_spectrum().gap();
      out[i].min_gap_quenched = s.quench_spectrum().gap();
      out[i].near_critical = std::min(out[i].min_gap, out[i].min_gap_quenched) < fermion::kGapFloor;
    }
  } catch (const std::exception&) {
    for (auto& r : out) fail(r);
  }
  return out;
}

}  // namespace

double block_norm(const MetricTensor& g, NormKind kind) {
  const double a = g(0, 0), b = g(0, 1), d = g(1, 1);
  const double mean = 0.5 * (a + d);
  const double r = std::hypot(0.5 * (a - d), b);
  switch (kind) {
    case NormKind::frobenius: return std::sqrt(a * a + 2.0 * b * b + d * d);
    case NormKind::max_eig: return std::abs(mean) + r;
    case NormKind::trace: return std::abs(mean + r) + std::abs(mean - r);
  }
  return kNaN;
}

double clipped_log10(double v) {
  if (std::isnan(v)) return v;
  if (v == 0.0) return -std::numeric_limits<double>::infinity();
  return std::min(std::log10(v), kLogClip);
}

std::vector<ScanRow> run_phase_scan(const SweepConfig& c) {
  c.validate();
  const auto xs = c.lambda_x.values(), ys = c.lambda_y.values();
  const std::size_t n = xs.size() * ys.size();
  std::vector<std::vector<ScanRow>> slots(n);
  std::optional<fermion::KGrid> grid;
  if (c.engine == Engine::analytic) grid.emplace(c.n_sites);

  parallel_for(n, c.resolved_workers(), [&](std::size_t i) {
    const double lx = xs[i / ys.size()], ly = ys[i % ys.size()];
    slots[i] = c.engine == Engine::analytic ? analytic_point(c, *grid, lx, ly) : ed_point(c, lx, ly);
  });

  std::vector<ScanRow> rows;
  rows.reserve(n * c.times.size());
  for (auto& s : slots) rows.insert(rows.end(), s.begin(), s.end());
  std::stable_sort(rows.begin(), rows.end(), [](const ScanRow& a, const ScanRow& b) {
    if (a.t != b.t) return a.t < b.t;
    if (a.lambda_x != b.lambda_x) return a.lambda_x < b.lambda_x;
    return a.lambda_y < b.lambda_y;
  });
  return rows;
}

Table scan_table(const std::vector<ScanRow>& rows) {
  Table t;
  for (const char* name : {"lambda_x", "lambda_y", "h", "t", "g_xx", "g_xy", "g_yy", "g_xh", "g_yh", "g_hh", "norm",
                           "log10_norm"})
    t.columns.push_back({name});
  t.columns.push_back({"near_critical", true});
  t.columns.push_back({"min_gap"});
  t.columns.push_back({"min_gap_quenched"});
  t.columns.push_back({"failed", true});
  for (const auto& r : rows)
    t.add_row({r.lambda_x, r.lambda_y, r.h, r.t, r.g[0], r.g[1], r.g[2], r.g[3], r.g[4], r.g[5], r.norm,
               r.log10_norm, r.near_critical ? 1.0 : 0.0, r.min_gap, r.min_gap_quenched, r.failed ? 1.0 : 0.0});
  return t;
}

Metadata scan_metadata(const SweepConfig& c) {
  Metadata m{{"engine", std::string(engine_name(c.engine))},
             {"norm", std::string(norm_name(c.norm))},
             {"N", std::to_string(c.n_sites)},
             {"quench", join({c.offset.begin(), c.offset.end()})},
             {"h", format_double(c.h)},
             {"lambda_x", range_text(c.lambda_x)},
             {"lambda_y", range_text(c.lambda_y)},
             {"times", join(c.times)},
             {"metric", std::string(part_name(c.metric))},
             {"scaling", "per_site"}};
  if (c.engine == Engine::analytic) m.emplace_back("isa", std::string(simd::isa_name(c.isa)));
  return m;
}

std::vector<int> ridge_argmax(const std::vector<ScanRow>& rows, const SweepConfig& c, double t) {
  const auto xs = c.lambda_x.values(), ys = c.lambda_y.values();
  std::map<double, int> xi, yi;
  for (std::size_t i = 0; i < xs.size(); ++i) xi.emplace(xs[i], static_cast<int>(i));
  for (std::size_t i = 0; i < ys.size(); ++i) yi.emplace(ys[i], static_cast<int>(i));
  std::vector<int> best(xs.size(), -1);
  std::vector<double> top(xs.size(), -std::numeric_limits<double>::infinity());
  for (const auto& r : rows) {
    if (r.t != t || r.failed || std::isnan(r.log10_norm)) continue;
    const auto x = xi.find(r.lambda_x), y = yi.find(r.lambda_y);
    if (x == xi.end() || y == yi.end()) continue;
    const auto col = static_cast<std::size_t>(x->second);
    if (best[col] < 0 || r.log10_norm > top[col] || (r.log10_norm == top[col] && y->second < best[col])) {
      top[col] = r.log10_norm;
      best[col] = y->second;
    }
  }
  return best;
}

double ridge_agreement(const std::vector<int>& a, const std::vector<int>& b, int cells) {
  if (a.size() != b.size() || a.empty()) throw std::invalid_argument("ridge vectors must have the same nonzero length");
  std::size_t same = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] >= 0 && b[i] >= 0 && std::abs(a[i] - b[i]) <= cells) ++same;
  return static_cast<double>(same) / static_cast<double>(a.size());
}

std::vector<double> time_grid(const SweepConfig& c, const dynamics::QuenchSystem* system) {
  if (c.t_max > 0.0) {
    std::vector<double> t(static_cast<std::size_t>(c.points));
    for (int i = 0; i < c.points; ++i) t[static_cast<std::size_t>(i)] = c.t_max * i / (c.points - 1);
    return t;
  }
  if (system) return dynamics::default_time_grid(dynamics::slowest_quench_gap(*system), c.points);
  const QuenchSpec q{{c.point_x, c.point_y, c.h, c.n_sites}, c.offset};
  return dynamics::default_time_grid(fermion::BogoliubovTable(q, fermion::KGrid(c.n_sites)).min_gap(), c.points);
}

TimeSeries run_time_series(const SweepConfig& c) {
  c.validate();
  const QuenchSpec q{{c.point_x, c.point_y, c.h, c.n_sites}, c.offset};
  TimeSeries ts;
  for (const char* name : {"t", "q1", "asymptote", "X", "X_bound", "q", "triangle_lo", "triangle_hi", "drift",
                           "drift_bound", "otoc_rhs"})
    ts.table.columns.push_back({name});
  ts.meta = {{"engine", std::string(engine_name(c.engine))},
             {"N", std::to_string(c.n_sites)},
             {"point", join({c.point_x, c.point_y, c.h})},
             {"quench", join({c.offset.begin(), c.offset.end()})},
             {"direction", std::string(coord_name(c.direction))},
             {"scaling", "raw"}};

  if (c.engine == Engine::analytic) {
    const auto times = time_grid(c, nullptr);
    const auto series = fermion::metric_series(fermion::KGrid(c.n_sites), q, times, {Scaling::raw, c.isa});
    const int mu = index(c.direction);
    ts.meta.emplace_back("q0", format_double(series.front().g0(mu, mu)));
    for (std::size_t i = 0; i < times.size(); ++i)
      ts.table.add_row({times[i], kNaN, kNaN, kNaN, kNaN, series[i].total()(mu, mu), kNaN, kNaN, kNaN, kNaN, kNaN});
    return ts;
  }

  const ed::Vector field = c.field > 0.0 ? dynamics::symmetry_breaking_field(c.n_sites, c.field, c.seed) : ed::Vector{};
  const dynamics::QuenchSystem s(q, field);
  const auto times = time_grid(c, &s);
  auto r = dynamics::equilibration_report(s, c.direction, times);
  ts.meta.insert(ts.meta.end(), {{"field", format_double(c.field)},
                                 {"seed", std::to_string(c.seed)},
                                 {"c_bar", format_double(r.c_bar)},
                                 {"purity", format_double(r.purity)},
                                 {"dh_norm", format_double(r.dh_norm)},
                                 {"q0", format_double(r.q0)},
                                 {"non_resonant", r.non_resonant ? "1" : "0"}});
  for (std::size_t i = 0; i < r.t.size(); ++i)
    ts.table.add_row({r.t[i], r.q1[i], r.asymptote[i], r.x[i], r.x_bound[i], r.q[i], r.triangle_lo[i],
                      r.triangle_hi[i], r.drift[i], r.drift_bound[i], r.otoc_rhs[i]});
  ts.report = std::move(r);
  return ts;
}

CrosscheckResult run_crosscheck(const SweepConfig& c) {
  c.validate();
  if (c.n_sites < 4 || c.n_sites > 10 || c.n_sites % 2 != 0)
    throw std::invalid_argument("crosscheck needs an even N between 4 and 10");
  const auto xs = c.lambda_x.values(), ys = c.lambda_y.values();
  const std::size_t n = xs.size() * ys.size();
  const fermion::KGrid grid(c.n_sites);
  std::vector<std::vector<CrosscheckPoint>> slots(n);

  parallel_for(n, c.resolved_workers(), [&](std::size_t i) {
    const double lx = xs[i / ys.size()], ly = ys[i % ys.size()];
    auto& out = slots[i];
    for (double t : c.times) out.push_back({lx, ly, t, false, kNaN});
    const QuenchSpec q{{lx, ly, c.h, c.n_sites}, c.offset};
    const ed::SpectralDecomposition s0(ed::build_hamiltonian(q.base));
    if (s0.gap() < kSectorGap || ed::parity_expectation(ed::Vector(s0.states().col(0))) < 0.5) return;
    if (fermion::BogoliubovTable(q.base, grid).min_gap() < kSectorGap ||
        fermion::BogoliubovTable(q, grid).min_gap() < kSectorGap)
      return;
    const ed::QuenchSystem s(q);
    const auto series = fermion::metric_series(grid, q, c.times, {Scaling::per_site, c.isa});
    for (std::size_t k = 0; k < c.times.size(); ++k) {
      out[k].matched = true;
      out[k].rel_dev = ed::real_part(s.qgt_quench(c.times[k]), c.n_sites).relative_diff(series[k].total());
    }
  });

  CrosscheckResult r;
  for (auto& s : slots)
    for (auto& p : s) {
      if (p.matched) {
        ++r.matched;
        r.max_rel_dev = std::max(r.max_rel_dev, p.rel_dev);
      } else {
        ++r.skipped;
      }
      r.points.push_back(p);
    }
  std::stable_sort(r.points.begin(), r.points.end(), [](const CrosscheckPoint& a, const CrosscheckPoint& b) {
    if (a.t != b.t) return a.t < b.t;
    if (a.lambda_x != b.lambda_x) return a.lambda_x < b.lambda_x;
    return a.lambda_y < b.lambda_y;
  });
  return r;
}

Table crosscheck_table(const CrosscheckResult& r) {
  Table t;
  t.columns = {{"lambda_x"}, {"lambda_y"}, {"t"}, {"matched", true}, {"rel_dev"}};
  for (const auto& p : r.points) t.add_row({p.lambda_x, p.lambda_y, p.t, p.matched ? 1.0 : 0.0, p.rel_dev});
  return t;
}

}  // namespace qgt::sweep
