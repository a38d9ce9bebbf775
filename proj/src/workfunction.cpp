#include "soco/workfunction.hpp"

#include <algorithm>
#include <ostream>
#include <vector>

#include <fmt/core.h>
#include <fmt/ostream.h>

#include "soco/errors.hpp"

namespace soco {

namespace {

constexpr double kMergeTol = 1e-12;
constexpr double kLipschitzTol = 1e-9;

// Breakpoints closer than this (relative) are treated as one.
constexpr double kCoincidentTol = 1e-13;

double flat_tol(double k) { return 1e-12 * std::max(1.0, k); }

}  // namespace

PwlConvexFn pwl_add(const PwlConvexFn& f, const PwlConvexFn& g) {
  if (!f.same_domain(g)) {
    throw StructuralError(fmt::format("cannot add functions on [{}, {}] and [{}, {}]", f.lo(),
                                      f.hi(), g.lo(), g.hi()));
  }
  std::vector<double> xs;
  xs.reserve(f.size() + g.size());
  std::merge(f.breakpoints().begin(), f.breakpoints().end(), g.breakpoints().begin(),
             g.breakpoints().end(), std::back_inserter(xs));
  std::vector<double> merged;
  merged.reserve(xs.size());
  for (double x : xs) {
    if (!merged.empty() && x - merged.back() <= kCoincidentTol * std::max(1.0, std::abs(x))) {
      continue;
    }
    merged.push_back(x);
  }
  // Keep the exact domain end of f.
  merged.back() = f.hi();
  merged.front() = f.lo();
  if (merged.size() >= 2 && merged[merged.size() - 2] >= merged.back()) {
    merged.erase(merged.end() - 2);
  }
  std::vector<double> vs;
  vs.reserve(merged.size());
  for (double x : merged) vs.push_back(f(x) + g(x));
  return PwlConvexFn::trusted(std::move(merged), std::move(vs));
}

PwlConvexFn infconv_cone(const PwlConvexFn& f, double k) {
  if (!(k >= 0.0) || !std::isfinite(k)) {
    throw ParameterError(fmt::format("cone slope k must be >= 0, got {}", k));
  }
  const auto xs = f.breakpoints();
  const auto fv = f.values();
  const std::size_t n = xs.size();
  const auto anchor =
      static_cast<std::size_t>(std::min_element(fv.begin(), fv.end()) - fv.begin());
  std::vector<double> hv(n);
  hv[anchor] = fv[anchor];
  for (std::size_t j = anchor; j + 1 < n; ++j) {
    hv[j + 1] = hv[j] + std::clamp(f.slope(j), -k, k) * (xs[j + 1] - xs[j]);
  }
  for (std::size_t j = anchor; j > 0; --j) {
    hv[j - 1] = hv[j] - std::clamp(f.slope(j - 1), -k, k) * (xs[j] - xs[j - 1]);
  }
  return PwlConvexFn::trusted(std::vector<double>(xs.begin(), xs.end()), std::move(hv));
}

WorkFunction::WorkFunction(PwlConvexFn fn, double k) : fn_(std::move(fn)), k_(k) {
  if (!(k >= 0.0) || !std::isfinite(k)) {
    throw ParameterError(fmt::format("work-function norm scale must be >= 0, got {}", k));
  }
  if (fn_.max_abs_slope() > k * (1.0 + kLipschitzTol) + kLipschitzTol) {
    throw ParameterError(fmt::format("work function has slope {} above its norm scale {}",
                                     fn_.max_abs_slope(), k));
  }
}

WorkFunction WorkFunction::initial(double lo, double hi, double k) {
  return WorkFunction(PwlConvexFn::affine(lo, hi, k * lo, k), k);
}

WorkFunction wf_update(const WorkFunction& w, const PwlConvexFn& c) {
  PwlConvexFn next = infconv_cone(pwl_add(w.fn(), c), w.norm_scale()).simplified(kMergeTol);
  return WorkFunction(WorkFunction::Unchecked{}, std::move(next), w.norm_scale());
}

double wf_argmin_biased(const WorkFunction& w, double r) {
  if (!(r > -1.0 && r < 1.0)) {
    throw ParameterError(fmt::format("bias r must lie in (-1, 1), got {}", r));
  }
  const PwlConvexFn& f = w.fn();
  const double tilt = r * w.norm_scale();
  const double tol = flat_tol(w.norm_scale());
  // Y is convex: its segment slopes are nondecreasing, so the leftmost
  // minimizer is the left end of the first segment that does not descend.
  std::size_t first = 0;
  std::size_t last = f.segments();
  while (first < last) {
    const std::size_t mid = first + (last - first) / 2;
    if (f.slope(mid) + tilt < -tol) {
      first = mid + 1;
    } else {
      last = mid;
    }
  }
  if (first == f.segments()) return f.hi();
  return f.breakpoints()[first];
}

double wf_biased_value(const WorkFunction& w, double r, double x) {
  return w(x) + r * w.norm_scale() * x;
}

double wf_opt(const WorkFunction& w) { return w.fn().min_value(); }

void write_wf_csv(std::ostream& out, const WorkFunction& w) {
  out << "x,w\n";
  const auto xs = w.fn().breakpoints();
  const auto vs = w.fn().values();
  for (std::size_t j = 0; j < xs.size(); ++j) fmt::print(out, "{:.17g},{:.17g}\n", xs[j], vs[j]);
}

}  // namespace soco
