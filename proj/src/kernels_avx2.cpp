// AVX2/FMA variant of the metric k-sum kernel.
//
// Four momenta per lane group. The Bogoliubov angles are never formed: every
// chi dependence of the time-dependent terms is pi-periodic, so it is written
// through cos 2chi and sin 2chi, which follow from (delta, epsilon) by the
// angle-difference identities. Only sin/cos(4 t Delta'_k) need a vector
// transcendental, provided below.

#include "qgt/kernels.hpp"

#include <immintrin.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace qgt::simd {

namespace {

// pi/2 split for FMA Cody-Waite reduction: C1 + C2 + C3 = pi/2 to ~1e-49.
constexpr double kPio2Hi = 1.5707963267948966;
constexpr double kPio2Mid = 6.123233995736766e-17;
constexpr double kPio2Lo = -1.4973849048591698e-33;
constexpr double kTwoOverPi = 0.6366197723675814;

// Minimax polynomials on |r| <= pi/4 (Cephes sin.c).
constexpr double kSin[6] = {1.58962301576546568060e-10, -2.50507477628578072866e-8,
                            2.75573136213857245213e-6,  -1.98412698295895385996e-4,
                            8.33333333332211858878e-3,  -1.66666666666666307295e-1};
constexpr double kCos[6] = {-1.13585365213876817300e-11, 2.08757008419747316778e-9,
                            -2.75573141792967388112e-7,  2.48015872888517045348e-5,
                            -1.38888888888730564116e-3,  4.16666666666665929218e-2};

inline __m256d horner(__m256d z, const double (&c)[6]) {
  __m256d p = _mm256_set1_pd(c[0]);
  for (int i = 1; i < 6; ++i) p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(c[i]));
  return p;
}

inline void sincos4(__m256d x, __m256d& s_out, __m256d& c_out) {
  const __m256d n = _mm256_round_pd(_mm256_mul_pd(x, _mm256_set1_pd(kTwoOverPi)),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(n, _mm256_set1_pd(kPio2Hi), x);
  r = _mm256_fnmadd_pd(n, _mm256_set1_pd(kPio2Mid), r);
  r = _mm256_fnmadd_pd(n, _mm256_set1_pd(kPio2Lo), r);

  const __m256d z = _mm256_mul_pd(r, r);
  const __m256d sin_r = _mm256_fmadd_pd(_mm256_mul_pd(r, z), horner(z, kSin), r);
  const __m256d cos_r = _mm256_fmadd_pd(_mm256_mul_pd(z, z), horner(z, kCos),
                                        _mm256_fnmadd_pd(_mm256_set1_pd(0.5), z, _mm256_set1_pd(1.0)));

  // quadrant q = n mod 4: (sin, cos) of (r + q pi/2)
  const __m256i q = _mm256_cvtepi32_epi64(_mm256_cvtpd_epi32(n));
  const __m256i one = _mm256_set1_epi64x(1), two = _mm256_set1_epi64x(2);
  const __m256d swap = _mm256_castsi256_pd(_mm256_cmpeq_epi64(_mm256_and_si256(q, one), one));
  const __m256d sin_sign = _mm256_castsi256_pd(_mm256_slli_epi64(_mm256_and_si256(q, two), 62));
  const __m256d cos_sign =
      _mm256_castsi256_pd(_mm256_slli_epi64(_mm256_and_si256(_mm256_add_epi64(q, one), two), 62));

  s_out = _mm256_xor_pd(_mm256_blendv_pd(sin_r, cos_r, swap), sin_sign);
  c_out = _mm256_xor_pd(_mm256_blendv_pd(cos_r, sin_r, swap), cos_sign);
}

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

inline double hmin(__m256d v) {
  alignas(32) double a[4];
  _mm256_store_pd(a, v);
  return std::min(std::min(a[0], a[1]), std::min(a[2], a[3]));
}

// Per-momentum quantities shared by all times, for one lane group.
struct Lanes {
  __m256d gap0, gapq;
  __m256d th0[3], thq[3], dq[3];
  __m256d sin2chi, cos2chi;
};

inline void mode_lanes(__m256d sk, __m256d ck, __m256d s2k, __m256d c2k, const Vec3& lam, __m256d& delta,
                       __m256d& eps, __m256d& gap_sq) {
  delta = _mm256_fnmadd_pd(_mm256_set1_pd(lam[0] - lam[1]), sk, s2k);
  eps = _mm256_sub_pd(_mm256_fnmadd_pd(_mm256_set1_pd(lam[0] + lam[1]), ck, c2k), _mm256_set1_pd(lam[2]));
  gap_sq = _mm256_fmadd_pd(delta, delta, _mm256_mul_pd(eps, eps));
}

// Exactly critical lanes get zero gradients like the scalar reference.
inline __m256d safe_reciprocal(__m256d x) {
  const __m256d zero = _mm256_setzero_pd();
  const __m256d is_zero = _mm256_cmp_pd(x, zero, _CMP_EQ_OQ);
  return _mm256_andnot_pd(is_zero, _mm256_div_pd(_mm256_set1_pd(1.0), _mm256_blendv_pd(x, _mm256_set1_pd(1.0), is_zero)));
}

Lanes load_lanes(const double* sk_p, const double* ck_p, const double* s2k_p, const double* c2k_p, const Vec3& base,
                 const Vec3& quenched) {
  const __m256d sk = _mm256_loadu_pd(sk_p), ck = _mm256_loadu_pd(ck_p);
  const __m256d s2k = _mm256_loadu_pd(s2k_p), c2k = _mm256_loadu_pd(c2k_p);
  const __m256d zero = _mm256_setzero_pd(), half = _mm256_set1_pd(-0.5);

  __m256d d0, e0, g0sq, dq_, eq, gqsq;
  mode_lanes(sk, ck, s2k, c2k, base, d0, e0, g0sq);
  mode_lanes(sk, ck, s2k, c2k, quenched, dq_, eq, gqsq);

  Lanes L{};
  L.gap0 = _mm256_sqrt_pd(g0sq);
  L.gapq = _mm256_sqrt_pd(gqsq);
  const __m256d inv0sq = safe_reciprocal(g0sq), invqsq = safe_reciprocal(gqsq);
  const __m256d inv0 = safe_reciprocal(L.gap0), invq = safe_reciprocal(L.gapq);

  // d delta = (-sin k, sin k, 0), d eps = (-cos k, -cos k, -1)
  const __m256d neg_sk = _mm256_sub_pd(zero, sk), neg_ck = _mm256_sub_pd(zero, ck);
  const __m256d gd[3] = {neg_sk, sk, zero};
  const __m256d ge[3] = {neg_ck, neg_ck, _mm256_set1_pd(-1.0)};
  for (int mu = 0; mu < 3; ++mu) {
    // -1/2 (eps d delta - delta d eps) / Delta^2
    L.th0[mu] = _mm256_mul_pd(_mm256_mul_pd(half, _mm256_fmsub_pd(e0, gd[mu], _mm256_mul_pd(d0, ge[mu]))), inv0sq);
    L.thq[mu] = _mm256_mul_pd(_mm256_mul_pd(half, _mm256_fmsub_pd(eq, gd[mu], _mm256_mul_pd(dq_, ge[mu]))), invqsq);
    // (eps d eps + delta d delta) / Delta
    L.dq[mu] = _mm256_mul_pd(_mm256_fmadd_pd(eq, ge[mu], _mm256_mul_pd(dq_, gd[mu])), invq);
  }

  // cos 2theta = eps / Delta, sin 2theta = -delta / Delta
  const __m256d c20 = _mm256_mul_pd(e0, inv0), s20 = _mm256_sub_pd(zero, _mm256_mul_pd(d0, inv0));
  const __m256d c2q = _mm256_mul_pd(eq, invq), s2q = _mm256_sub_pd(zero, _mm256_mul_pd(dq_, invq));
  L.cos2chi = _mm256_fmadd_pd(c20, c2q, _mm256_mul_pd(s20, s2q));
  L.sin2chi = _mm256_fmsub_pd(s20, c2q, _mm256_mul_pd(c20, s2q));
  return L;
}

// Same algebra, one momentum, for the tail of the grid.
void tail_mode(double sk, double ck, double s2k, double c2k, const Vec3& base, const Vec3& quenched,
               std::span<const double> times, std::span<MetricSums> out) {
  auto eval = [&](const Vec3& lam, double& d, double& e, double& gsq) {
    d = s2k - (lam[0] - lam[1]) * sk;
    e = c2k - (lam[0] + lam[1]) * ck - lam[2];
    gsq = d * d + e * e;
  };
  double d0, e0, g0sq, dq, eq, gqsq;
  eval(base, d0, e0, g0sq);
  eval(quenched, dq, eq, gqsq);
  const double gap0 = std::sqrt(g0sq), gapq = std::sqrt(gqsq);
  const double inv0sq = g0sq == 0.0 ? 0.0 : 1.0 / g0sq, invqsq = gqsq == 0.0 ? 0.0 : 1.0 / gqsq;
  const double inv0 = gap0 == 0.0 ? 0.0 : 1.0 / gap0, invq = gapq == 0.0 ? 0.0 : 1.0 / gapq;
  const double gd[3] = {-sk, sk, 0.0}, ge[3] = {-ck, -ck, -1.0};
  double th0[3], thq[3], dgq[3];
  for (int mu = 0; mu < 3; ++mu) {
    th0[mu] = -0.5 * (e0 * gd[mu] - d0 * ge[mu]) * inv0sq;
    thq[mu] = -0.5 * (eq * gd[mu] - dq * ge[mu]) * invqsq;
    dgq[mu] = (eq * ge[mu] + dq * gd[mu]) * invq;
  }
  const double c20 = e0 * inv0, s20 = -d0 * inv0, c2q = eq * invq, s2q = -dq * invq;
  const double cos2chi = c20 * c2q + s20 * s2q, sin2chi = s20 * c2q - c20 * s2q;
  for (std::size_t it = 0; it < times.size(); ++it) {
    const double t = times[it], ph = 4.0 * t * gapq;
    const double sp = std::sin(ph), cp = std::cos(ph);
    const double a = 2.0 - 2.0 * cp - sp * sp * sin2chi * sin2chi;
    const double b = cp - 1.0;
    const double c = -2.0 * t * sp * sin2chi * cos2chi;
    const double d = 4.0 * t * t * sin2chi * sin2chi;
    MetricSums& acc = out[it];
    acc.min_gap = std::min(acc.min_gap, gap0);
    acc.min_gap_quenched = std::min(acc.min_gap_quenched, gapq);
    for (std::size_t p = 0; p < kPairs.size(); ++p) {
      const int mu = kPairs[p][0], nu = kPairs[p][1];
      acc.g0[p] += th0[mu] * th0[nu];
      acc.dg[p] += thq[mu] * thq[nu] * a + (thq[nu] * th0[mu] + thq[mu] * th0[nu]) * b +
                   c * (thq[mu] * dgq[nu] + thq[nu] * dgq[mu]) + d * dgq[mu] * dgq[nu];
    }
  }
}

}  // namespace

void sincos_avx2(std::span<const double> x, std::span<double> s, std::span<double> c) {
  if (s.size() != x.size() || c.size() != x.size()) throw std::invalid_argument("sincos_avx2: size mismatch");
  std::size_t i = 0;
  for (; i + 4 <= x.size(); i += 4) {
    __m256d sv, cv;
    sincos4(_mm256_loadu_pd(x.data() + i), sv, cv);
    _mm256_storeu_pd(s.data() + i, sv);
    _mm256_storeu_pd(c.data() + i, cv);
  }
  if (i < x.size()) {
    alignas(32) double buf[4] = {0, 0, 0, 0}, sb[4], cb[4];
    std::copy(x.begin() + static_cast<std::ptrdiff_t>(i), x.end(), buf);
    __m256d sv, cv;
    sincos4(_mm256_load_pd(buf), sv, cv);
    _mm256_store_pd(sb, sv);
    _mm256_store_pd(cb, cv);
    for (std::size_t j = 0; i + j < x.size(); ++j) {
      s[i + j] = sb[j];
      c[i + j] = cb[j];
    }
  }
}

void metric_sums_avx2(const fermion::KGrid& grid, const Vec3& base, const Vec3& quenched,
                      std::span<const double> times, std::span<MetricSums> out) {
  if (out.size() != times.size()) throw std::invalid_argument("metric kernel: output size mismatch");
  const std::size_t nt = times.size();

  // acc[it * 12 + p]: 6 g0 sums then 6 dg sums
  constexpr std::size_t kSlots = 12;
  std::vector<__m256d> acc(nt * kSlots, _mm256_setzero_pd());
  __m256d min0 = _mm256_set1_pd(std::numeric_limits<double>::infinity());
  __m256d minq = min0;

  const auto sk = grid.sin_k(), ck = grid.cos_k(), s2k = grid.sin_2k(), c2k = grid.cos_2k();
  const std::size_t n = grid.size();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const Lanes L = load_lanes(sk.data() + i, ck.data() + i, s2k.data() + i, c2k.data() + i, base, quenched);
    min0 = _mm256_min_pd(min0, L.gap0);
    minq = _mm256_min_pd(minq, L.gapq);

    const __m256d sin2chi_sq = _mm256_mul_pd(L.sin2chi, L.sin2chi);
    const __m256d sc2chi = _mm256_mul_pd(L.sin2chi, L.cos2chi);
    __m256d g0p[6], tq_tq[6], tq_t0[6], tq_dq[6], dq_dq[6];
    for (std::size_t p = 0; p < kPairs.size(); ++p) {
      const int mu = kPairs[p][0], nu = kPairs[p][1];
      g0p[p] = _mm256_mul_pd(L.th0[mu], L.th0[nu]);
      tq_tq[p] = _mm256_mul_pd(L.thq[mu], L.thq[nu]);
      tq_t0[p] = _mm256_fmadd_pd(L.thq[nu], L.th0[mu], _mm256_mul_pd(L.thq[mu], L.th0[nu]));
      tq_dq[p] = _mm256_fmadd_pd(L.thq[mu], L.dq[nu], _mm256_mul_pd(L.thq[nu], L.dq[mu]));
      dq_dq[p] = _mm256_mul_pd(L.dq[mu], L.dq[nu]);
    }

    for (std::size_t it = 0; it < nt; ++it) {
      const double t = times[it];
      __m256d sp, cp;
      sincos4(_mm256_mul_pd(_mm256_set1_pd(4.0 * t), L.gapq), sp, cp);
      const __m256d a = _mm256_fnmadd_pd(_mm256_mul_pd(sp, sp), sin2chi_sq,
                                         _mm256_fnmadd_pd(_mm256_set1_pd(2.0), cp, _mm256_set1_pd(2.0)));
      const __m256d b = _mm256_sub_pd(cp, _mm256_set1_pd(1.0));
      const __m256d c = _mm256_mul_pd(_mm256_set1_pd(-2.0 * t), _mm256_mul_pd(sp, sc2chi));
      const __m256d d = _mm256_mul_pd(_mm256_set1_pd(4.0 * t * t), sin2chi_sq);
      __m256d* row = acc.data() + it * kSlots;
      for (std::size_t p = 0; p < 6; ++p) {
        row[p] = _mm256_add_pd(row[p], g0p[p]);
        __m256d term = _mm256_mul_pd(tq_tq[p], a);
        term = _mm256_fmadd_pd(tq_t0[p], b, term);
        term = _mm256_fmadd_pd(tq_dq[p], c, term);
        term = _mm256_fmadd_pd(dq_dq[p], d, term);
        row[6 + p] = _mm256_add_pd(row[6 + p], term);
      }
    }
  }

  for (std::size_t it = 0; it < nt; ++it) {
    MetricSums& o = out[it];
    o = MetricSums{};
    const __m256d* row = acc.data() + it * kSlots;
    for (std::size_t p = 0; p < 6; ++p) {
      o.g0[p] = hsum(row[p]);
      o.dg[p] = hsum(row[6 + p]);
    }
    if (i > 0) {
      o.min_gap = hmin(min0);
      o.min_gap_quenched = hmin(minq);
    }
  }
  for (; i < n; ++i) tail_mode(sk[i], ck[i], s2k[i], c2k[i], base, quenched, times, out);
}

}  // namespace qgt::simd
