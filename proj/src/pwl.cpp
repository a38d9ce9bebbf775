#include "soco/pwl.hpp"

#include <algorithm>
#include <limits>

#include <fmt/core.h>

#include "soco/errors.hpp"

namespace soco {

namespace {

constexpr double kConvexityTol = 1e-9;
constexpr double kNonnegTol = 1e-9;

double domain_slack(double lo, double hi) {
  return kDomainTol * std::max({1.0, std::abs(lo), std::abs(hi)});
}

}  // namespace

Seminorm1D::Seminorm1D(double scale) : scale_(scale) {
  if (!(scale >= 0.0) || !std::isfinite(scale)) {
    throw ParameterError(fmt::format("seminorm scale must be >= 0, got {}", scale));
  }
}

PwlConvexFn::PwlConvexFn(std::vector<double> breakpoints,
                         std::vector<double> values)
    : x_(std::move(breakpoints)), v_(std::move(values)) {
  if (x_.empty()) throw StructuralError("piecewise-linear function needs a breakpoint");
  if (x_.size() != v_.size()) {
    throw StructuralError(fmt::format("{} breakpoints but {} values", x_.size(), v_.size()));
  }
  for (std::size_t j = 0; j < x_.size(); ++j) {
    if (!std::isfinite(x_[j]) || !std::isfinite(v_[j])) {
      throw ParameterError("breakpoints and values must be finite");
    }
    if (j > 0 && !(x_[j] > x_[j - 1])) {
      throw StructuralError("breakpoints must be strictly ascending");
    }
    if (v_[j] < -kNonnegTol) {
      throw ParameterError(fmt::format("cost value {} at x={} is negative", v_[j], x_[j]));
    }
  }
  for (std::size_t j = 1; j + 1 < x_.size(); ++j) {
    const double left = slope(j - 1);
    const double right = slope(j);
    if (right < left - kConvexityTol * std::max(1.0, std::abs(left))) {
      throw ParameterError(fmt::format("function is not convex at x={} (slopes {} then {})",
                                       x_[j], left, right));
    }
  }
}

PwlConvexFn PwlConvexFn::trusted(std::vector<double> breakpoints,
                                 std::vector<double> values) {
  PwlConvexFn f;
  f.x_ = std::move(breakpoints);
  f.v_ = std::move(values);
  return f;
}

PwlConvexFn PwlConvexFn::constant(double lo, double hi, double value) {
  if (lo == hi) return PwlConvexFn({lo}, {value});
  return PwlConvexFn({lo, hi}, {value, value});
}

PwlConvexFn PwlConvexFn::affine(double lo, double hi, double value_at_lo,
                                double slope) {
  if (lo == hi) return PwlConvexFn({lo}, {value_at_lo});
  return PwlConvexFn({lo, hi}, {value_at_lo, value_at_lo + slope * (hi - lo)});
}

PwlConvexFn PwlConvexFn::sample(std::vector<double> points,
                                const std::function<double(double)>& f) {
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  std::vector<double> values;
  values.reserve(points.size());
  for (double x : points) values.push_back(f(x));
  return PwlConvexFn(std::move(points), std::move(values));
}

double PwlConvexFn::slope(std::size_t segment) const {
  return (v_[segment + 1] - v_[segment]) / (x_[segment + 1] - x_[segment]);
}

std::size_t PwlConvexFn::locate(double x) const {
  const double slack = domain_slack(lo(), hi());
  if (!(x >= lo() - slack && x <= hi() + slack)) {
    throw DomainError(fmt::format("x={} outside domain [{}, {}]", x, lo(), hi()));
  }
  // Index of the segment containing x; the last segment owns hi.
  const auto it = std::upper_bound(x_.begin(), x_.end(), x);
  const auto idx = static_cast<std::size_t>(it - x_.begin());
  if (idx == 0) return 0;
  return std::min(idx - 1, segments() == 0 ? 0 : segments() - 1);
}

double PwlConvexFn::operator()(double x) const {
  const std::size_t j = locate(x);
  if (segments() == 0) return v_[0];
  const double xc = std::clamp(x, lo(), hi());
  if (xc == x_[j]) return v_[j];
  if (xc == x_[j + 1]) return v_[j + 1];
  const double t = (xc - x_[j]) / (x_[j + 1] - x_[j]);
  return v_[j] + t * (v_[j + 1] - v_[j]);
}

Subgradient PwlConvexFn::subgradient(double x) const {
  const std::size_t j = locate(x);
  if (segments() == 0) return {0.0, 0.0};
  const double xc = std::clamp(x, lo(), hi());
  // Breakpoint hit: left slope comes from the previous segment.
  const auto it = std::lower_bound(x_.begin(), x_.end(), xc);
  if (it != x_.end() && *it == xc) {
    const auto k = static_cast<std::size_t>(it - x_.begin());
    const double left = k == 0 ? slope(0) : slope(k - 1);
    const double right = k == segments() ? slope(k - 1) : slope(k);
    return {left, right};
  }
  const double s = slope(j);
  return {s, s};
}

double PwlConvexFn::min_value() const {
  return *std::min_element(v_.begin(), v_.end());
}

double PwlConvexFn::leftmost_argmin() const {
  return x_[static_cast<std::size_t>(std::min_element(v_.begin(), v_.end()) - v_.begin())];
}

double PwlConvexFn::max_abs_slope() const {
  double m = 0.0;
  for (std::size_t j = 0; j < segments(); ++j) m = std::max(m, std::abs(slope(j)));
  return m;
}

bool PwlConvexFn::same_domain(const PwlConvexFn& other) const {
  const double slack = domain_slack(lo(), hi());
  return std::abs(lo() - other.lo()) <= slack && std::abs(hi() - other.hi()) <= slack;
}

PwlConvexFn PwlConvexFn::simplified(double tol) const {
  if (x_.size() <= 2) return *this;
  std::vector<double> xs{x_.front()};
  std::vector<double> vs{v_.front()};
  for (std::size_t j = 1; j + 1 < x_.size(); ++j) {
    const double left = (v_[j] - vs.back()) / (x_[j] - xs.back());
    const double right = slope(j);
    if (std::abs(right - left) > tol) {
      xs.push_back(x_[j]);
      vs.push_back(v_[j]);
    }
  }
  xs.push_back(x_.back());
  vs.push_back(v_.back());
  return trusted(std::move(xs), std::move(vs));
}

double eval(const PwlConvexFn& f, double x) { return f(x); }

Subgradient subgradient(const PwlConvexFn& f, double x) { return f.subgradient(x); }

}  // namespace soco
