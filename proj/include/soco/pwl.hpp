#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace soco {

/// Seminorm on the real line. Every seminorm on R has the form x -> s|x|.
class Seminorm1D {
 public:
  explicit Seminorm1D(double scale = 1.0);

  double scale() const { return scale_; }
  double operator()(double x) const { return scale_ * std::abs(x); }

 private:
  double scale_;
};

/// Left and right derivatives of a convex function at a point.
struct Subgradient {
  double left;
  double right;

  double mid() const { return 0.5 * (left + right); }
};

/// Convex, nonnegative, piecewise-linear function on a closed interval.
///
/// The function is stored as values at strictly ascending breakpoints that
/// include both ends of the domain; it is linear in between. A degenerate
/// domain (lo == hi) holds a single breakpoint.
class PwlConvexFn {
 public:
  /// Validates ordering, convexity and nonnegativity (each up to a small
  /// floating-point tolerance). Throws StructuralError or ParameterError.
  PwlConvexFn(std::vector<double> breakpoints, std::vector<double> values);

  /// Skips validation. For results of algebra on already-valid functions.
  static PwlConvexFn trusted(std::vector<double> breakpoints,
                             std::vector<double> values);

  static PwlConvexFn constant(double lo, double hi, double value);
  /// x -> value_at_lo + slope * (x - lo).
  static PwlConvexFn affine(double lo, double hi, double value_at_lo,
                            double slope);
  /// Piecewise-linear interpolant of `f` at the given points; the result must
  /// be convex and nonnegative. Points are sorted and deduplicated first.
  static PwlConvexFn sample(std::vector<double> points,
                            const std::function<double(double)>& f);

  double lo() const { return x_.front(); }
  double hi() const { return x_.back(); }
  std::size_t size() const { return x_.size(); }
  std::size_t segments() const { return x_.size() - 1; }
  std::span<const double> breakpoints() const { return x_; }
  std::span<const double> values() const { return v_; }
  double slope(std::size_t segment) const;

  /// Linear interpolation; throws DomainError outside [lo, hi].
  double operator()(double x) const;
  Subgradient subgradient(double x) const;

  double min_value() const;
  /// Leftmost breakpoint attaining the minimum value.
  double leftmost_argmin() const;
  double max_abs_slope() const;

  bool same_domain(const PwlConvexFn& other) const;

  /// Drops interior breakpoints whose slope change is below `tol`.
  PwlConvexFn simplified(double tol = 1e-12) const;

 private:
  PwlConvexFn() = default;
  std::size_t locate(double x) const;

  std::vector<double> x_;
  std::vector<double> v_;
};

/// Tolerance used when testing whether a point lies inside a domain.
inline constexpr double kDomainTol = 1e-12;

double eval(const PwlConvexFn& f, double x);
Subgradient subgradient(const PwlConvexFn& f, double x);

}  // namespace soco
