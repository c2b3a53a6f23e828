#pragma once

// k-sum kernels of the closed-form Cluster-XY engine.
//
// One kernel call evaluates, for a single manifold point lambda and quench
// lambda + q, the Brillouin-zone sums behind g(0) and Delta g(t) at a batch of
// times. The scalar variant is the reference and follows the closed-form
// expressions term by term (atan2 angles, sin/cos of chi). Vector variants
// reorganise the same sums algebraically and must agree with the reference to
// rounding; see tests/test_kernels.cpp.

#include "qgt/kgrid.hpp"
#include "qgt/model.hpp"

#include <array>
#include <limits>
#include <span>
#include <string_view>

namespace qgt::simd {

enum class Isa { scalar, avx2 };

std::string_view isa_name(Isa isa);
/// Accepts "scalar", "avx2" and "auto" (best available).
Isa parse_isa(std::string_view name);

/// Compiled in and supported by the running CPU.
bool isa_available(Isa isa);
/// Best available variant; resolved once per process.
Isa best_isa();

/// Upper-triangle component order used by every kernel:
/// xx, xy, xh, yy, yh, hh.
inline constexpr std::array<std::array<int, 2>, 6> kPairs{{{0, 0}, {0, 1}, {0, 2}, {1, 1}, {1, 2}, {2, 2}}};

/// Raw (not divided by N) k-sums for one point and one time.
struct MetricSums {
  std::array<double, 6> g0{};  // sum_k d_mu theta_k d_nu theta_k
  std::array<double, 6> dg{};  // sum_k of the four bracketed time-dependent terms
  double min_gap = std::numeric_limits<double>::infinity();
  double min_gap_quenched = std::numeric_limits<double>::infinity();
};

/// Evaluates the sums at `base` (initial couplings) and `quenched` (quench
/// couplings) for every entry of `times`; out.size() must equal times.size().
using MetricKernel = void (*)(const fermion::KGrid& grid, const Vec3& base, const Vec3& quenched,
                              std::span<const double> times, std::span<MetricSums> out);

/// Throws std::invalid_argument if the variant is not available.
MetricKernel metric_kernel(Isa isa);

void metric_sums_scalar(const fermion::KGrid& grid, const Vec3& base, const Vec3& quenched,
                        std::span<const double> times, std::span<MetricSums> out);
#if defined(QGT_HAVE_AVX2_KERNEL)
void metric_sums_avx2(const fermion::KGrid& grid, const Vec3& base, const Vec3& quenched,
                      std::span<const double> times, std::span<MetricSums> out);
/// Four-lane sin/cos used by the AVX2 kernel, exposed for accuracy tests.
void sincos_avx2(std::span<const double> x, std::span<double> s, std::span<double> c);
#endif

}  // namespace qgt::simd
