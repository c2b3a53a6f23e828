#pragma once

// Phase-diagram scans, equilibration time series and the engine cross-check.
// Grid points are independent work items; results are merged and sorted by
// (t, lambda_x, lambda_y), so output never depends on the worker count.

#include "qgt/config.hpp"
#include "qgt/dynamics.hpp"
#include "qgt/output.hpp"

#include <array>
#include <optional>
#include <vector>

namespace qgt::sweep {

inline constexpr double kLogClip = 12.0;

struct ScanRow {
  double lambda_x = 0.0, lambda_y = 0.0, h = 0.0, t = 0.0;
  std::array<double, 6> g{};  // xx, xy, yy, xh, yh, hh
  double norm = 0.0;
  double log10_norm = 0.0;
  bool near_critical = false;
  double min_gap = 0.0;
  double min_gap_quenched = 0.0;
  bool failed = false;  // point could not be evaluated; numbers are NaN
};

/// Norm of the (lambda_x, lambda_y) block: Frobenius, spectral, or trace (nuclear) norm.
double block_norm(const MetricTensor& g, NormKind kind);
/// log10 clipped above at kLogClip; -inf for zero, NaN stays NaN.
double clipped_log10(double v);

std::vector<ScanRow> run_phase_scan(const SweepConfig& c);

Table scan_table(const std::vector<ScanRow>& rows);
Metadata scan_metadata(const SweepConfig& c);

/// Index along lambda_y of the largest log10_norm in every lambda_x column at
/// time t (failed rows skipped; -1 for a column with no usable row).
std::vector<int> ridge_argmax(const std::vector<ScanRow>& rows, const SweepConfig& c, double t);
/// Fraction of columns whose ridge indices differ by at most `cells`.
double ridge_agreement(const std::vector<int>& a, const std::vector<int>& b, int cells = 1);

struct TimeSeries {
  Metadata meta;
  Table table;
  std::optional<dynamics::EquilibrationReport> report;  // ED engine only
};

/// Columns t, q1, asymptote, X, X_bound, q, triangle_lo, triangle_hi, drift,
/// drift_bound, otoc_rhs (raw, not per site). The analytic engine fills t and q
/// and leaves the ED-only columns NaN.
TimeSeries run_time_series(const SweepConfig& c);
std::vector<double> time_grid(const SweepConfig& c, const dynamics::QuenchSystem* system);

struct CrosscheckPoint {
  double lambda_x = 0.0, lambda_y = 0.0, t = 0.0;
  bool matched = false;
  double rel_dev = 0.0;  // NaN when not matched
};

struct CrosscheckResult {
  std::vector<CrosscheckPoint> points;
  double max_rel_dev = 0.0;
  int matched = 0;
  int skipped = 0;
  bool passed(double tol = 1e-6) const { return matched > 0 && max_rel_dev < tol; }
};

/// Engine vs ED on the scan grid for even 4 <= N <= 10. A point is compared
/// only when the ED ground state is gapped (>= 1e-3) with even parity and both
/// the initial and quenched single-particle gaps are >= 1e-3.
CrosscheckResult run_crosscheck(const SweepConfig& c);
Table crosscheck_table(const CrosscheckResult& r);

}  // namespace qgt::sweep
