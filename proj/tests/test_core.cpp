#include <doctest.h>

#include <cmath>
#include <random>

#include <nlohmann/json.hpp>

#include "soco/adversaries.hpp"
#include "soco/errors.hpp"
#include "soco/harness.hpp"
#include "soco/model.hpp"
#include "soco/pwl.hpp"

using namespace soco;

namespace {

PwlConvexFn vee() { return PwlConvexFn({0.0, 1.0, 2.0}, {1.0, 0.0, 1.0}); }

Instance two_round() {
  return Instance(0.0, 1.0, Seminorm1D(1.0), 1.0,
                  {PwlConvexFn({0.0, 1.0}, {0.0, 1.0}), PwlConvexFn({0.0, 1.0}, {1.0, 0.0})});
}

}  // namespace

TEST_CASE("seminorm") {
  CHECK(Seminorm1D(2.0)(-1.5) == 3.0);
  CHECK(Seminorm1D(0.0)(7.0) == 0.0);
  CHECK(Seminorm1D(1.0)(0.0) == 0.0);
  CHECK_THROWS_AS(Seminorm1D(-1.0), ParameterError);
}

TEST_CASE("eval") {
  const PwlConvexFn f = vee();
  CHECK(eval(f, 1.0) == 0.0);
  CHECK(eval(f, 0.5) == doctest::Approx(0.5));
  CHECK(eval(PwlConvexFn::constant(0.0, 1.0, 1.0), 0.3) == 1.0);
  CHECK_THROWS_AS(eval(f, 2.5), DomainError);
  CHECK_THROWS_AS(eval(f, -0.1), DomainError);
}

TEST_CASE("subgradient") {
  const PwlConvexFn f = vee();
  auto g = subgradient(f, 1.0);
  CHECK(g.left == -1.0);
  CHECK(g.right == 1.0);
  g = subgradient(f, 0.5);
  CHECK(g.left == -1.0);
  CHECK(g.right == -1.0);
  g = subgradient(PwlConvexFn::constant(0.0, 1.0, 3.0), 0.4);
  CHECK(g.left == 0.0);
  CHECK(g.right == 0.0);
  // Domain ends reuse the boundary segment.
  CHECK(subgradient(f, 0.0).left == -1.0);
  CHECK(subgradient(f, 2.0).right == 1.0);
  CHECK_THROWS_AS(subgradient(f, 3.0), DomainError);
}

TEST_CASE("construction rejects bad functions") {
  CHECK_THROWS_AS(PwlConvexFn({0.0, 1.0, 2.0}, {0.0, 1.0, 0.0}), ParameterError);
  CHECK_THROWS_AS(PwlConvexFn({0.0, 1.0}, {-1.0, 0.0}), ParameterError);
  CHECK_THROWS_AS(PwlConvexFn({1.0, 0.0}, {0.0, 0.0}), StructuralError);
  CHECK_THROWS_AS(PwlConvexFn({0.0, 1.0}, {0.0}), StructuralError);
  CHECK_THROWS_AS(PwlConvexFn({}, {}), StructuralError);
}

TEST_CASE("random functions are convex with monotone subgradients") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  GeneratorParams gp;
  gp.T = 40;
  const Instance inst = random_instance(gp, rng);
  for (const auto& f : inst.costs()) {
    for (int k = 0; k < 50; ++k) {
      const double a = u(rng), b = u(rng);
      CHECK(f(0.5 * (a + b)) <= 0.5 * (f(a) + f(b)) + 1e-12);
      const double lo = std::min(a, b), hi = std::max(a, b);
      CHECK(f.subgradient(lo).right <= f.subgradient(hi).left + 1e-12);
      CHECK(f.subgradient(lo).left <= f.subgradient(lo).right);
    }
  }
}

TEST_CASE("instance validation") {
  const PwlConvexFn f({0.0, 1.0}, {0.0, 2.0});
  CHECK_THROWS_AS(Instance(-0.5, 1.0, Seminorm1D(1.0), 2.0, {}), ParameterError);
  CHECK_THROWS_AS(Instance(0.0, 2.0, Seminorm1D(1.0), 2.0, {f}), StructuralError);
  CHECK_THROWS_AS(Instance(0.0, 1.0, Seminorm1D(1.0), 1.0, {f}), ParameterError);
  const Instance ok(0.0, 1.0, Seminorm1D(1.0), 2.0, {f});
  CHECK(ok.horizon() == 1);
  CHECK(ok.cost(1)(1.0) == 2.0);
}

TEST_CASE("penalized cost, hand evaluated") {
  const Instance inst = two_round();
  const Trajectory traj{{0.0, 1.0}, 0};
  const CostLedger l = penalized_cost(inst, traj, 1.0, 0);
  CHECK(l.operating_total == 0.0);
  CHECK(l.switching_total == 1.0);
  CHECK(l.total == 1.0);
  // Lookahead 1 needs one more action.
  CHECK_THROWS_AS(penalized_cost(inst, traj, 1.0, 1), StructuralError);
  const CostLedger l1 = penalized_cost(inst, Trajectory{{0.0, 1.0, 1.0}, 1}, 1.0, 1);
  CHECK(l1.operating_total == 1.0);
  CHECK(l1.switching_total == 1.0);
  CHECK_THROWS_AS(penalized_cost(inst, traj, 1.0, 2), ParameterError);
}

TEST_CASE("penalized cost properties") {
  std::mt19937_64 rng(5);
  GeneratorParams gp;
  gp.T = 30;
  gp.norm_scale = 1.5;
  const Instance inst = random_instance(gp, rng);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Trajectory traj{{}, 0};
  for (std::size_t t = 0; t <= gp.T; ++t) traj.actions.push_back(u(rng));

  SUBCASE("standing still costs no switching") {
    const Trajectory still{std::vector<double>(gp.T + 1, 0.0), 0};
    const CostLedger l = penalized_cost(inst, still, 3.0, 0);
    CHECK(l.switching_total == 0.0);
    double oc = 0.0;
    for (const auto& c : inst.costs()) oc += c(0.0);
    CHECK(l.operating_total == doctest::Approx(oc));
  }
  SUBCASE("zero scale leaves operating cost") {
    const Instance flat = inst.with_norm_scale(0.0);
    for (int i = 0; i <= 1; ++i) {
      const CostLedger l = penalized_cost(flat, traj, 2.0, i);
      CHECK(l.total == l.operating_total);
    }
  }
  SUBCASE("monotone in alpha") {
    for (int i = 0; i <= 1; ++i) {
      CHECK(penalized_cost(inst, traj, 1.0, i).total <= penalized_cost(inst, traj, 2.5, i).total);
    }
  }
  SUBCASE("ledger sums") {
    const CostLedger l = penalized_cost(inst, traj, 1.0, 1);
    double oc = 0.0, sc = 0.0;
    for (double v : l.operating) oc += v;
    for (double v : l.switching) sc += v;
    CHECK(l.operating_total == oc);
    CHECK(l.switching_total == sc);
    CHECK(l.total == oc + sc);
  }
}

TEST_CASE("alternating instance at the midpoint") {
  for (double s : {0.5, 1.0, 3.0}) {
    const Instance inst = alternating_instance(1.0, 1.0, s, 10);
    const AdversaryParams p = alternating_params(1.0, 1.0, s);
    const Trajectory mid{std::vector<double>(11, 0.5 / p.abar), 0};
    const double total = penalized_cost(inst, mid, 1.0, 0).total;
    CHECK(total <= (p.a / 2.0 + p.b) * 10.0 + s / 2.0 + 1e-9);
  }
}

TEST_CASE("empty instance") {
  const Instance inst(0.0, 1.0, Seminorm1D(1.0), 1.0, {});
  const CostLedger l = penalized_cost(inst, Trajectory{{0.0}, 0}, 1.0, 0);
  CHECK(l.total == 0.0);
}

TEST_CASE("json round trip") {
  std::mt19937_64 rng(3);
  GeneratorParams gp;
  gp.T = 5;
  const Instance inst = random_instance(gp, rng);
  const nlohmann::json j = inst;
  CHECK(j.at("T") == 5);
  const Instance back = instance_from_json(nlohmann::json::parse(j.dump()));
  REQUIRE(back.horizon() == inst.horizon());
  for (std::size_t t = 1; t <= inst.horizon(); ++t) {
    const auto a = inst.cost(t).values();
    const auto b = back.cost(t).values();
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k) CHECK(a[k] == b[k]);
  }
  CHECK(back.norm_scale() == inst.norm_scale());
  CHECK_THROWS_AS(instance_from_json(nlohmann::json{{"T", 1}}), StructuralError);
}
