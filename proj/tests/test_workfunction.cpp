#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "soco/algorithms.hpp"
#include "soco/errors.hpp"
#include "soco/harness.hpp"
#include "soco/offline.hpp"
#include "soco/workfunction.hpp"

using namespace soco;

namespace {

// min_y f(y) + k |x - y| over a dense grid of y.
double cone_oracle(const PwlConvexFn& f, double k, double x, int n = 10000) {
  double best = std::numeric_limits<double>::infinity();
  for (int j = 0; j <= n; ++j) {
    const double y = f.lo() + (f.hi() - f.lo()) * j / n;
    best = std::min(best, f(y) + k * std::abs(x - y));
  }
  return best;
}

PwlConvexFn vee() { return PwlConvexFn({0.0, 1.0, 2.0}, {1.0, 0.0, 1.0}); }

}  // namespace

TEST_CASE("pwl_add") {
  const PwlConvexFn f({0.0, 1.0}, {0.0, 1.0});
  const PwlConvexFn g({0.0, 1.0}, {1.0, 0.0});
  const PwlConvexFn h = pwl_add(f, g);
  for (double x : {0.0, 0.3, 1.0}) CHECK(h(x) == doctest::Approx(1.0));

  const PwlConvexFn z = pwl_add(vee(), PwlConvexFn::constant(0.0, 2.0, 0.0));
  for (double x : {0.0, 0.5, 1.0, 1.7}) CHECK(z(x) == vee()(x));

  const PwlConvexFn d = pwl_add(vee(), vee());
  for (double x : {0.0, 0.5, 1.0, 1.7}) CHECK(d(x) == doctest::Approx(2.0 * std::abs(x - 1.0)));

  CHECK_THROWS_AS(pwl_add(f, vee()), StructuralError);
}

TEST_CASE("infconv_cone against the dense oracle") {
  const PwlConvexFn h = infconv_cone(vee(), 0.5);
  for (double x : {0.0, 0.25, 1.0, 1.6, 2.0}) {
    CHECK(h(x) == doctest::Approx(0.5 * std::abs(x - 1.0)));
    CHECK(h(x) == doctest::Approx(cone_oracle(vee(), 0.5, x)).epsilon(1e-6));
  }
  const PwlConvexFn c = PwlConvexFn::constant(0.0, 1.0, 2.0);
  CHECK(infconv_cone(c, 0.7)(0.4) == 2.0);
  const PwlConvexFn flat = infconv_cone(vee(), 0.0);
  for (double x : {0.0, 1.3, 2.0}) CHECK(flat(x) == 0.0);
  CHECK_THROWS_AS(infconv_cone(vee(), -1.0), ParameterError);

  std::mt19937_64 rng(17);
  GeneratorParams gp;
  gp.T = 20;
  gp.grad_bound = 4.0;
  const Instance inst = random_instance(gp, rng);
  for (const auto& f : inst.costs()) {
    for (double k : {0.3, 1.0, 2.5}) {
      const PwlConvexFn g = infconv_cone(f, k);
      CHECK(g.max_abs_slope() <= k + 1e-12);
      for (double x : {0.0, 0.13, 0.5, 0.77, 1.0}) {
        CHECK(g(x) <= f(x) + 1e-12);
        // Grid spacing 1e-4: the oracle overshoots by at most (|f'| + k) * 1e-4.
        CHECK(std::abs(g(x) - cone_oracle(f, k, x)) <= (f.max_abs_slope() + k) * 1e-4 + 1e-12);
      }
    }
  }
}

TEST_CASE("wf_update examples") {
  const WorkFunction w0 = WorkFunction::initial(0.0, 1.0, 1.0);
  CHECK(wf_opt(w0) == 0.0);

  const WorkFunction w1 = wf_update(w0, PwlConvexFn({0.0, 1.0}, {1.0, 0.0}));
  for (double x : {0.0, 0.4, 1.0}) CHECK(w1(x) == doctest::Approx(1.0));
  CHECK(wf_opt(w1) == doctest::Approx(1.0));

  const WorkFunction same = wf_update(w0, PwlConvexFn::constant(0.0, 1.0, 0.0));
  for (double x : {0.0, 0.4, 1.0}) CHECK(same(x) == doctest::Approx(w0(x)));

  const WorkFunction up = wf_update(w0, PwlConvexFn({0.0, 1.0}, {0.0, 1.0}));
  CHECK(up(0.0) == 0.0);
  for (double x : {0.25, 0.5, 1.0}) CHECK(up(x) == doctest::Approx(x));

  // Oracle for the first example: w1(x) = min_y y + (1 - y) + |x - y| = 1.
  for (double x : {0.0, 0.5, 1.0}) {
    CHECK(w1(x) == doctest::Approx(cone_oracle(pwl_add(w0.fn(), PwlConvexFn({0.0, 1.0}, {1.0, 0.0})),
                                               1.0, x)));
  }
  CHECK(wf_opt(WorkFunction::initial(0.5, 1.0, 2.0)) == 1.0);
}

TEST_CASE("wf_argmin_biased") {
  const WorkFunction flat(PwlConvexFn::constant(0.0, 1.0, 1.0), 1.0);
  CHECK(wf_argmin_biased(flat, -0.5) == 1.0);
  CHECK(wf_argmin_biased(flat, 0.5) == 0.0);
  const WorkFunction w0 = WorkFunction::initial(0.0, 1.0, 1.0);
  for (double r : {-0.99, -0.3, 0.0, 0.7}) CHECK(wf_argmin_biased(w0, r) == 0.0);
  CHECK_THROWS_AS(wf_argmin_biased(w0, 1.0), ParameterError);
  CHECK_THROWS_AS(wf_argmin_biased(w0, -1.0), ParameterError);
}

TEST_CASE("work function invariants along random runs") {
  std::mt19937_64 rng(23);
  GeneratorParams gp;
  gp.T = 60;
  const Instance inst = random_instance(gp, rng);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (double theta : {1.0, 3.0}) {
    const RbgTrace trace(inst, theta);
    const double k = theta * inst.norm_scale();
    for (std::size_t t = 1; t <= trace.horizon(); ++t) {
      const WorkFunction& prev = trace.work(t - 1);
      const WorkFunction& cur = trace.work(t);
      CHECK(cur.fn().max_abs_slope() <= k * (1.0 + 1e-9));
      for (int q = 0; q < 10; ++q) {
        const double a = u(rng), b = u(rng);
        CHECK(cur(a) >= prev(a) - 1e-9);
        CHECK(std::abs(cur(a) - cur(b)) <= k * std::abs(a - b) + 1e-9);
        CHECK(cur(0.5 * (a + b)) <= 0.5 * (cur(a) + cur(b)) + 1e-9);
      }
    }
  }
}

TEST_CASE("update agrees with the dense oracle on random instances") {
  std::mt19937_64 rng(29);
  GeneratorParams gp;
  gp.T = 8;
  const Instance inst = random_instance(gp, rng);
  const double k = 1.0;
  WorkFunction w = WorkFunction::initial(0.0, 1.0, k);
  for (std::size_t t = 1; t <= inst.horizon(); ++t) {
    const PwlConvexFn sum = pwl_add(w.fn(), inst.cost(t));
    w = wf_update(w, inst.cost(t));
    for (double x : {0.0, 0.21, 0.5, 0.93, 1.0}) {
      CHECK(std::abs(w(x) - cone_oracle(sum, k, x)) <= (sum.max_abs_slope() + k) * 1e-4 + 1e-12);
    }
  }
}

TEST_CASE("no-move identity at the selected state") {
  std::mt19937_64 rng(31);
  GeneratorParams gp;
  gp.T = 80;
  const Instance inst = random_instance(gp, rng);
  for (double theta : {1.0, 2.0}) {
    const RbgTrace trace(inst, theta);
    for (double r : r_grid(21)) {
      for (double g : trace.no_move_gaps(inst, r)) CHECK(std::abs(g) <= 1e-9);
    }
  }
}

TEST_CASE("wf_opt matches the dynamic optimum under the input norm") {
  std::mt19937_64 rng(37);
  GeneratorParams gp;
  gp.T = 40;
  const Instance inst = random_instance(gp, rng);
  for (double theta : {1.0, 2.0, 5.0}) {
    const RbgTrace trace(inst, theta);
    const double dp = dynamic_opt(inst.with_norm_scale(theta * inst.norm_scale()), 1.0).cost;
    CHECK(wf_opt(trace.final_work()) == doctest::Approx(dp).epsilon(1e-12));
  }
}

TEST_CASE("work function csv dump") {
  std::ostringstream out;
  write_wf_csv(out, WorkFunction::initial(0.0, 1.0, 2.0));
  CHECK(out.str() == "x,w\n0,0\n1,2\n");
}
