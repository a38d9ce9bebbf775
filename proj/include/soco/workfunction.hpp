#pragma once

#include <iosfwd>

#include "soco/pwl.hpp"

namespace soco {

/// Pointwise sum on identical domains.
PwlConvexFn pwl_add(const PwlConvexFn& f, const PwlConvexFn& g);

/// x -> min_y f(y) + k|x - y| over the domain of f.
///
/// For convex f this is f with every segment slope clamped to [-k, k],
/// re-integrated outward from the leftmost minimizer. No breakpoints are
/// introduced, so the result stays on f's breakpoint set.
PwlConvexFn infconv_cone(const PwlConvexFn& f, double k);

/// Work function w^t together with the scale k = N(1) of its input norm.
class WorkFunction {
 public:
  /// Throws ParameterError unless fn is k-Lipschitz (up to tolerance).
  WorkFunction(PwlConvexFn fn, double k);

  /// w^0(x) = N(x) = k x on [lo, hi].
  static WorkFunction initial(double lo, double hi, double k);

  const PwlConvexFn& fn() const { return fn_; }
  double norm_scale() const { return k_; }
  double operator()(double x) const { return fn_(x); }

 private:
  struct Unchecked {};
  WorkFunction(Unchecked, PwlConvexFn fn, double k) : fn_(std::move(fn)), k_(k) {}
  friend WorkFunction wf_update(const WorkFunction& w, const PwlConvexFn& c);

  PwlConvexFn fn_;
  double k_;
};

/// w^t = infconv_cone(w^{t-1} + c^t, k), with collinear breakpoints merged.
WorkFunction wf_update(const WorkFunction& w, const PwlConvexFn& c);

/// Leftmost minimizer of Y(x) = w(x) + r k x. Requires |r| < 1.
double wf_argmin_biased(const WorkFunction& w, double r);

/// Y(x) = w(x) + r k x.
double wf_biased_value(const WorkFunction& w, double r, double x);

/// min_x w(x); after T updates this is the optimal dynamic cost under N.
double wf_opt(const WorkFunction& w);

/// CSV dump "x,w" at the breakpoints, with a header row.
void write_wf_csv(std::ostream& out, const WorkFunction& w);

}  // namespace soco
