#include "qgt/model.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qgt {

std::string_view coord_name(Coord c) {
  switch (c) {
    case Coord::lambda_x: return "lambda_x";
    case Coord::lambda_y: return "lambda_y";
    case Coord::h: return "h";
  }
  return "?";
}

Coord parse_coord(std::string_view name) {
  if (name == "x" || name == "lambda_x") return Coord::lambda_x;
  if (name == "y" || name == "lambda_y") return Coord::lambda_y;
  if (name == "h") return Coord::h;
  throw std::invalid_argument("unknown coordinate '" + std::string(name) + "' (expected x, y or h)");
}

void require_finite(const ModelParams& p) {
  if (!std::isfinite(p.lambda_x) || !std::isfinite(p.lambda_y) || !std::isfinite(p.h))
    throw std::invalid_argument("model couplings must be finite");
}

MetricTensor& MetricTensor::operator+=(const MetricTensor& o) {
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
  near_critical = near_critical || o.near_critical;
  min_gap = std::min(min_gap, o.min_gap);
  return *this;
}

MetricTensor MetricTensor::scaled(double s) const {
  MetricTensor r = *this;
  for (auto& v : r.c_) v *= s;
  return r;
}

std::array<double, 3> MetricTensor::eigenvalues() const {
  Eigen::Matrix3d m;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m(i, j) = (*this)(i, j);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(m, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  return {ev(0), ev(1), ev(2)};
}

double MetricTensor::frobenius() const {
  double s = 0.0;
  for (double v : c_) s += v * v;
  return std::sqrt(s);
}

double MetricTensor::max_abs_diff(const MetricTensor& o) const {
  double m = 0.0;
  for (std::size_t i = 0; i < c_.size(); ++i) m = std::max(m, std::abs(c_[i] - o.c_[i]));
  return m;
}

double MetricTensor::relative_diff(const MetricTensor& reference) const {
  double num = 0.0;
  for (std::size_t i = 0; i < c_.size(); ++i) {
    const double d = c_[i] - reference.c_[i];
    num += d * d;
  }
  const double den = reference.frobenius();
  return den > 0.0 ? std::sqrt(num) / den : std::sqrt(num);
}

std::string to_string(const MetricTensor& g) {
  std::ostringstream os;
  os.precision(10);
  os << "[";
  for (int i = 0; i < 3; ++i) {
    os << (i ? "; " : "");
    for (int j = 0; j < 3; ++j) os << (j ? ", " : "") << g(i, j);
  }
  os << "]";
  return os.str();
}

}  // namespace qgt
