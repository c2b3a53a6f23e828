#include <doctest.h>

#include "qgt/fermion.hpp"
#include "qgt/kernels.hpp"

#include <cmath>
#include <random>
#include <vector>

using namespace qgt;

TEST_CASE("variant names") {
  CHECK(simd::parse_isa("scalar") == simd::Isa::scalar);
  CHECK(simd::parse_isa("auto") == simd::best_isa());
  CHECK_THROWS_AS(simd::parse_isa("neon"), std::invalid_argument);
  CHECK(simd::isa_available(simd::Isa::scalar));
  CHECK(simd::isa_name(simd::Isa::avx2) == "avx2");
}

#if defined(QGT_HAVE_AVX2_KERNEL)

TEST_CASE("vector sincos against libm") {
  if (!simd::isa_available(simd::Isa::avx2)) return;
  std::mt19937_64 rng(1);
  std::vector<double> x;
  for (double r : {1.0, 10.0, 1e3, 1e5}) {
    std::uniform_real_distribution<double> u(-r, r);
    for (int i = 0; i < 4001; ++i) x.push_back(u(rng));
  }
  for (double v : {0.0, -0.0, 1e-300, M_PI / 4, M_PI / 2, M_PI, 3 * M_PI / 2, -M_PI / 4}) x.push_back(v);
  std::vector<double> s(x.size()), c(x.size());
  simd::sincos_avx2(x, s, c);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double tol = 4e-16 * std::max(1.0, std::abs(x[i]) / 1e3);
    INFO("x = " << x[i]);
    CHECK(std::abs(s[i] - std::sin(x[i])) <= tol);
    CHECK(std::abs(c[i] - std::cos(x[i])) <= tol);
  }
}

TEST_CASE("AVX2 metric sums equal the scalar reference") {
  if (!simd::isa_available(simd::Isa::avx2)) return;
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-2, 2), du(-0.5, 0.5), tu(0, 20);
  for (int n : {4, 6, 8, 10, 14, 50, 102, 500}) {
    const fermion::KGrid grid(n);
    for (int rep = 0; rep < 10; ++rep) {
      const Vec3 base{u(rng), u(rng), u(rng)};
      const Vec3 quenched = rep == 0 ? base : Vec3{base[0] + du(rng), base[1] + du(rng), base[2] + du(rng)};
      std::vector<double> times{0.0, tu(rng), tu(rng), tu(rng), 50.0};
      std::vector<simd::MetricSums> a(times.size()), b(times.size());
      simd::metric_sums_scalar(grid, base, quenched, times, a);
      simd::metric_sums_avx2(grid, base, quenched, times, b);
      for (std::size_t it = 0; it < times.size(); ++it) {
        // Scale by the size of the summands so that cancellations do not
        // dominate the comparison.
        double scale_g0 = 0, scale_dg = 0;
        for (std::size_t p = 0; p < 6; ++p) {
          scale_g0 = std::max(scale_g0, std::abs(a[it].g0[p]));
          scale_dg = std::max(scale_dg, std::abs(a[it].dg[p]));
        }
        for (std::size_t p = 0; p < 6; ++p) {
          INFO("n = " << n << " t = " << times[it] << " pair " << p);
          CHECK(std::abs(a[it].g0[p] - b[it].g0[p]) <= 1e-12 * std::max(1.0, scale_g0));
          CHECK(std::abs(a[it].dg[p] - b[it].dg[p]) <= 1e-12 * std::max(1.0, scale_dg) * (1 + times[it]));
        }
        CHECK(b[it].min_gap == doctest::Approx(a[it].min_gap).epsilon(1e-14));
        CHECK(b[it].min_gap_quenched == doctest::Approx(a[it].min_gap_quenched).epsilon(1e-14));
      }
    }
  }
}

TEST_CASE("exactly critical modes are handled identically") {
  if (!simd::isa_available(simd::Isa::avx2)) return;
  // lambda_x = lambda_y, h = -1 closes the gap at k = pi/2 (on the N = 6 grid).
  const fermion::KGrid grid(6);
  const Vec3 base{0.3, 0.3, -1.0}, quenched{0.3, 0.3, -0.8};
  std::vector<double> times{0.0, 1.0};
  std::vector<simd::MetricSums> a(2), b(2);
  simd::metric_sums_scalar(grid, base, quenched, times, a);
  simd::metric_sums_avx2(grid, base, quenched, times, b);
  for (int it = 0; it < 2; ++it) {
    CHECK(a[it].min_gap < 1e-15);
    for (std::size_t p = 0; p < 6; ++p) {
      CHECK(std::isfinite(b[it].dg[p]));
      CHECK(b[it].g0[p] == doctest::Approx(a[it].g0[p]).epsilon(1e-12));
      CHECK(b[it].dg[p] == doctest::Approx(a[it].dg[p]).epsilon(1e-12));
    }
  }
}

TEST_CASE("engine results do not depend on the variant") {
  if (!simd::isa_available(simd::Isa::avx2)) return;
  const QuenchSpec q{{1.5, 0.5, 0.0, 500}, {0, 0, 0.2}};
  for (double t : {0.0, 1.0, 2.0, 5.0}) {
    const auto s = fermion::metric_total(q, t, {Scaling::per_site, simd::Isa::scalar});
    const auto v = fermion::metric_total(q, t, {Scaling::per_site, simd::Isa::avx2});
    CHECK(v.relative_diff(s) < 1e-12);
  }
}

#endif
