#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <span>

#include "soco/algorithms.hpp"
#include "soco/errors.hpp"
#include "soco/harness.hpp"
#include "soco/metrics.hpp"

using namespace soco;

namespace {

Instance constant_instance(std::size_t T, double value) {
  return Instance(0.0, 1.0, Seminorm1D(1.0), 1.0,
                  std::vector<PwlConvexFn>(T, PwlConvexFn::constant(0.0, 1.0, value)));
}

Instance random_small(std::uint64_t seed, std::size_t T) {
  std::mt19937_64 rng(seed);
  GeneratorParams gp;
  gp.T = T;
  return random_instance(gp, rng);
}

// Draws r at every call; deliberately breaks replicability.
class Flaky final : public OnlinePolicy {
 public:
  std::string name() const override { return "flaky"; }
  int schedule() const override { return 0; }
  bool randomized() const override { return true; }
  bool replicable() const override { return false; }
  void reset(const Frame&, std::uint64_t) override {}
  double act() const override { return 0.0; }
  void observe(const PwlConvexFn&) override {}
  std::unique_ptr<OnlinePolicy> clone() const override { return std::make_unique<Flaky>(); }
};

// E_r |x'(r) - x(r)| for r uniform on (-1, 1), where x(r) is the leftmost
// minimizer of w_j + r k x_j. Both choices are constant between crossings of
// the biased lines, so integrating over those cells is exact.
double exact_expected_move(const Grid& g, std::span<const double> w0, std::span<const double> w1,
                           double k) {
  std::vector<double> cuts{-1.0, 1.0};
  for (auto w : {w0, w1}) {
    for (std::size_t i = 0; i < w.size(); ++i) {
      for (std::size_t j = i + 1; j < w.size(); ++j) {
        const double r = (w[i] - w[j]) / (k * (g.state(j) - g.state(i)));
        if (r > -1.0 && r < 1.0) cuts.push_back(r);
      }
    }
  }
  std::sort(cuts.begin(), cuts.end());
  auto pick = [&](std::span<const double> w, double r) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < w.size(); ++j) {
      if (w[j] + r * k * g.state(j) < w[best] + r * k * g.state(best)) best = j;
    }
    return g.state(best);
  };
  double total = 0.0;
  for (std::size_t c = 1; c < cuts.size(); ++c) {
    const double width = cuts[c] - cuts[c - 1];
    if (width <= 0.0) continue;
    const double mid = 0.5 * (cuts[c] + cuts[c - 1]);
    total += width * std::abs(pick(w1, mid) - pick(w0, mid));
  }
  return total / 2.0;
}

}  // namespace

TEST_CASE("ogd_step") {
  OgdState st{0.5, 0.0, 1.0, StepRule::inverse_sqrt(0.25)};
  const PwlConvexFn up({0.0, 1.0}, {0.0, 1.0});
  CHECK(ogd_step(st, up, 1) == doctest::Approx(0.25));

  st.x = 0.1;
  CHECK(ogd_step(st, up, 1) == 0.0);

  const PwlConvexFn vee({0.0, 0.5, 1.0}, {0.5, 0.0, 0.5});
  st.x = 0.5;
  CHECK(ogd_step(st, vee, 3) == 0.5);

  st.rule = StepRule::inverse_linear(2.0);
  st.x = 1.0;
  CHECK(ogd_step(st, up, 2) == doctest::Approx(0.75));
  CHECK_THROWS_AS(ogd_step(st, up, 0), ParameterError);
  CHECK_THROWS_AS(StepRule::inverse_sqrt(0.0), ParameterError);
  CHECK_THROWS_AS(StepRule::inverse_linear(-1.0), ParameterError);
}

TEST_CASE("ogd_run") {
  const Instance inst = random_small(41, 100);
  const StepRule rule = StepRule::inverse_sqrt(0.5);
  const PolicyRun run = ogd_run(inst, rule);
  REQUIRE(run.trajectory.actions.size() == inst.horizon() + 1);
  CHECK(run.trajectory.actions[0] == 0.0);
  for (std::size_t t = 1; t <= inst.horizon(); ++t) {
    const double step = std::abs(run.trajectory.actions[t] - run.trajectory.actions[t - 1]);
    CHECK(step <= rule.eta(t) * inst.grad_bound() + 1e-12);
  }
  const PolicyRun flat = ogd_run(inst.with_norm_scale(0.0), rule);
  CHECK(flat.ledger.switching_total == 0.0);
  CHECK(flat.ledger.operating_total == doctest::Approx(run.ledger.operating_total));
}

TEST_CASE("rbg_run examples") {
  const RbgRun zero = rbg_run(constant_instance(5, 0.0), 1.0, 0.3);
  for (double x : zero.trajectory.actions) CHECK(x == 0.0);
  CHECK(zero.ledger.total == 0.0);

  const Instance one(0.0, 1.0, Seminorm1D(1.0), 1.0, {PwlConvexFn({0.0, 1.0}, {1.0, 0.0})});
  const RbgRun r = rbg_run(one, 1.0, 0.0);
  REQUIRE(r.trajectory.actions.size() == 2);
  // w^1 is flat at 1, so with r = 0 every state ties and the leftmost wins.
  CHECK(r.trajectory.actions[1] == 0.0);
  CHECK(r.ledger.operating_total == 1.0);
  CHECK(r.ledger.switching_total == 0.0);
  // Any negative bias tips the tie to the right end.
  CHECK(rbg_run(one, 1.0, -0.2).trajectory.actions[1] == 1.0);

  CHECK_THROWS_AS(rbg_run(one, 1.0, 1.0), ParameterError);
  CHECK_THROWS_AS(rbg_run(one, 1.0, -1.5), ParameterError);
  CHECK_THROWS_AS(rbg_run(one, 0.5, 0.0), ParameterError);
}

TEST_CASE("rbg trace matches the online policy") {
  const Instance inst = random_small(43, 50);
  const RbgTrace trace(inst, 2.0);
  for (double r : {-0.7, 0.0, 0.45}) {
    RbgPolicy pol(2.0, r);
    const Trajectory online = run_online(pol, inst);
    const auto offline = trace.actions(r);
    REQUIRE(online.actions.size() == offline.size());
    for (std::size_t t = 0; t < offline.size(); ++t) CHECK(online.actions[t] == offline[t]);
    for (double g : trace.step_gaps(inst, r)) CHECK(g >= -1e-9);
  }
}

TEST_CASE("grid") {
  const Grid g(0.0, 1.0, 0.25);
  CHECK(g.size() == 5);
  CHECK(g.state(4) == 1.0);
  CHECK(g.state(2) == 0.5);
  CHECK_THROWS_AS(Grid(0.0, 1.0, 0.3), ParameterError);
  CHECK_THROWS_AS(Grid(0.0, 1.0, 0.0), ParameterError);
}

TEST_CASE("drbg on two states") {
  const Grid g(0.0, 1.0, 1.0);
  const DrbgTrace zero(g, 1.0, 1.0, {{0.0, 0.0}, {0.0, 0.0}});
  for (double r : r_grid(9)) {
    for (double x : zero.actions(r)) CHECK(x == 0.0);
  }
  // A cost of 1 at state 0 lifts w(0) to 1 and ties it with w(1); the bias
  // then decides.
  const DrbgTrace push(g, 1.0, 1.0, {{1.0, 0.0}});
  CHECK(push.actions(0.5).back() == 0.0);
  CHECK(push.actions(-0.5).back() == 1.0);
  CHECK(push.opt() == 1.0);
}

TEST_CASE("drbg agrees with rbg on grid-born instances") {
  std::mt19937_64 rng(47);
  const Instance inst = random_grid_instance(30, 0.0, 0.5, 3, 2.0, 1.0, rng);
  for (double r : r_grid(11)) {
    const DrbgRun d = drbg_run(inst, 1.0, r, 0.5);
    const RbgRun c = rbg_run(inst, 1.0, r);
    REQUIRE(d.trajectory.actions.size() == c.trajectory.actions.size());
    for (std::size_t t = 0; t < d.trajectory.actions.size(); ++t) {
      CHECK(d.trajectory.actions[t] == doctest::Approx(c.trajectory.actions[t]));
    }
  }
}

TEST_CASE("drbg_potential") {
  const Grid g(0.0, 1.0, 0.25);
  const DrbgTrace base(g, 2.0, 1.5, {});
  CHECK(base.potentials().front() == doctest::Approx(0.0));

  const double eps = 0.3;
  const DrbgTrace lifted(g, 2.0, 1.5, {std::vector<double>(g.size(), eps)});
  const auto phi = lifted.potentials();
  CHECK(phi[1] - phi[0] == doctest::Approx(eps / 2.0));
  CHECK_THROWS_AS(drbg_potential(std::vector<double>{}, 0.0, 1.0, 1.0, 1.0), StructuralError);
}

TEST_CASE("epsilon increments") {
  const std::vector<double> cost{0.9, 0.4, 0.0, 0.2, 0.7};
  const auto parts = epsilon_increments(cost, 0.25);
  std::vector<double> sum(cost.size(), 0.0);
  for (const auto& p : parts) {
    double height = 0.0;
    for (double v : p) height = std::max(height, v);
    CHECK(height <= 0.25 + 1e-15);
    // 0/eps pattern, monotone in one direction.
    const bool rising = p.back() > 0.0;
    for (std::size_t j = 1; j < p.size(); ++j) {
      CHECK((p[j] == 0.0 || p[j] == height));
      if (rising) CHECK(p[j] >= p[j - 1]);
      else CHECK(p[j] <= p[j - 1]);
    }
    for (std::size_t j = 0; j < p.size(); ++j) sum[j] += p[j];
  }
  for (std::size_t j = 0; j < cost.size(); ++j) CHECK(sum[j] == doctest::Approx(cost[j]));
  CHECK(epsilon_increments(std::vector<double>(4, 0.0), 0.1).empty());
  CHECK_THROWS_AS(epsilon_increments(cost, 0.0), ParameterError);
}

TEST_CASE("expected switching on an increment stays below the potential increase") {
  std::mt19937_64 rng(53);
  const double s = 1.0, theta = 1.0, delta = 0.1;
  const Instance inst = random_grid_instance(12, 0.0, delta, 11, 2.0, s, rng);
  const Grid g(0.0, 1.0, delta);
  std::vector<std::vector<double>> rounds;
  for (const auto& c : inst.costs()) {
    for (auto& p : epsilon_increments(g.sample(c), 0.01)) rounds.push_back(std::move(p));
  }
  const DrbgTrace trace(g, theta, s, rounds);
  const auto phi = trace.potentials();
  const double k = theta * s;
  for (std::size_t t = 0; t < rounds.size(); ++t) {
    const double expected = exact_expected_move(g, trace.work(t), trace.work(t + 1), k) * s;
    CHECK(expected <= phi[t + 1] - phi[t] + 1e-12);
  }
}

TEST_CASE("online protocol") {
  const Instance inst = random_small(59, 20);
  std::vector<std::unique_ptr<OnlinePolicy>> pols;
  pols.push_back(std::make_unique<OgdPolicy>());
  pols.push_back(std::make_unique<OgdPolicy>(std::nullopt, StepRule::Kind::kInverseLinear));
  pols.push_back(std::make_unique<RbgPolicy>(1.0));
  pols.push_back(std::make_unique<PinPolicy>(7.0));
  pols.push_back(std::make_unique<FollowPolicy>());
  for (auto& p : pols) {
    const Trajectory a = run_online(*p, inst, 99);
    CHECK(a.actions.size() == inst.horizon() + 1);
    CHECK(a.lookahead == p->schedule());
    for (double x : a.actions) CHECK((x >= 0.0 && x <= 1.0));
    auto copy = p->clone();
    const Trajectory b = run_online(*copy, inst, 99);
    CHECK(a.actions == b.actions);
    CHECK(p->replicable());
  }
  CHECK(pols[3]->act() == 1.0);
  CHECK(pols[2]->randomized());
  CHECK_FALSE(RbgPolicy(1.0, 0.2).randomized());

  // Different seeds give different biases for the randomized variant.
  RbgPolicy a(1.0), b(1.0);
  a.reset(frame_of(inst), 1);
  b.reset(frame_of(inst), 2);
  CHECK(a.bias() != b.bias());

  Flaky f;
  CHECK_FALSE(f.replicable());
}
