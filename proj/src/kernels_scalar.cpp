// Scalar reference kernel: the closed-form g(0) and Delta g(t) sums written
// out term by term.

#include "qgt/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qgt::simd {

namespace {

struct Mode {
  double delta, epsilon, gap, theta;
  Vec3 grad_theta, grad_gap;
};

Mode evaluate(const Vec3& lam, double sk, double ck, double s2k, double c2k) {
  Mode m{};
  m.delta = s2k - (lam[0] - lam[1]) * sk;
  m.epsilon = c2k - (lam[0] + lam[1]) * ck - lam[2];
  const double gap_sq = m.delta * m.delta + m.epsilon * m.epsilon;
  m.gap = std::sqrt(gap_sq);
  m.theta = -0.5 * std::atan2(m.delta, m.epsilon);
  if (gap_sq == 0.0) return m;  // exactly critical mode: gradients undefined, left at zero
  const Vec3 gd{-sk, sk, 0.0};
  const Vec3 ge{-ck, -ck, -1.0};
  for (int mu = 0; mu < 3; ++mu) {
    m.grad_theta[mu] = -0.5 * (m.epsilon * gd[mu] - m.delta * ge[mu]) / gap_sq;
    m.grad_gap[mu] = (m.epsilon * ge[mu] + m.delta * gd[mu]) / m.gap;
  }
  return m;
}

}  // namespace

void metric_sums_scalar(const fermion::KGrid& grid, const Vec3& base, const Vec3& quenched,
                        std::span<const double> times, std::span<MetricSums> out) {
  if (out.size() != times.size()) throw std::invalid_argument("metric kernel: output size mismatch");
  for (auto& o : out) o = MetricSums{};

  const auto sk = grid.sin_k(), ck = grid.cos_k(), s2k = grid.sin_2k(), c2k = grid.cos_2k();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Mode m0 = evaluate(base, sk[i], ck[i], s2k[i], c2k[i]);
    const Mode mq = evaluate(quenched, sk[i], ck[i], s2k[i], c2k[i]);

    const double chi = m0.theta - mq.theta;
    const double s = std::sin(chi), c = std::cos(chi);
    const double s2 = s * s, c2 = c * c;

    for (std::size_t it = 0; it < times.size(); ++it) {
      const double t = times[it];
      const double phase = 4.0 * t * mq.gap;
      const double sp = std::sin(phase), cp = std::cos(phase);
      MetricSums& acc = out[it];
      acc.min_gap = std::min(acc.min_gap, m0.gap);
      acc.min_gap_quenched = std::min(acc.min_gap_quenched, mq.gap);
      for (std::size_t p = 0; p < kPairs.size(); ++p) {
        const int mu = kPairs[p][0], nu = kPairs[p][1];
        const double tq_mu = mq.grad_theta[mu], tq_nu = mq.grad_theta[nu];
        const double t0_mu = m0.grad_theta[mu], t0_nu = m0.grad_theta[nu];
        const double dq_mu = mq.grad_gap[mu], dq_nu = mq.grad_gap[nu];

        acc.g0[p] += t0_mu * t0_nu;
        const double term1 = tq_mu * tq_nu * (2.0 - 2.0 * cp - 4.0 * sp * sp * c2 * s2);
        const double term2 = (tq_nu * t0_mu + tq_mu * t0_nu) * (cp - 1.0);
        const double term3 = -4.0 * t * sp * (tq_mu * dq_nu + tq_nu * dq_mu) * c * s * (1.0 - 2.0 * s2);
        const double term4 = 16.0 * t * t * s2 * (1.0 - s2) * dq_mu * dq_nu;
        acc.dg[p] += term1 + term2 + term3 + term4;
      }
    }
  }
}

}  // namespace qgt::simd
