#include <doctest.h>

#include <cmath>

#include <nlohmann/json.hpp>

#include "soco/adversaries.hpp"
#include "soco/errors.hpp"

using namespace soco;

namespace {

class Unreplayable final : public OnlinePolicy {
 public:
  std::string name() const override { return "unreplayable"; }
  int schedule() const override { return 0; }
  bool replicable() const override { return false; }
  void reset(const Frame&, std::uint64_t) override {}
  double act() const override { return 0.0; }
  void observe(const PwlConvexFn&) override {}
  std::unique_ptr<OnlinePolicy> clone() const override {
    return std::make_unique<Unreplayable>();
  }
};

}  // namespace

TEST_CASE("cost pair") {
  const AdversaryParams p = alternating_params(1.0, 1.0, 1.0);
  CHECK(p.a == 38.0);
  CHECK(p.b == 0.5);
  const PwlConvexFn f1 = make_f(p, 1);
  const PwlConvexFn f2 = make_f(p, 2);
  CHECK(f1(0.0) == 0.5);
  CHECK(f1(p.hi()) == doctest::Approx(38.5));
  CHECK(f2(0.0) == doctest::Approx(38.5));
  for (double x : {0.0, 0.2, 0.5, 1.0}) CHECK(f1(x) + f2(x) == doctest::Approx(2.0 * p.b + p.a));
  CHECK_THROWS_AS(make_f(p, 3), ParameterError);

  const AdversaryParams c = conditional_params(1.0, 1.0, 1.0);
  CHECK(c.a == 6.0);
  CHECK(c.hi() == 1.0);
  CHECK(abar_of(0.5, 1.0) == 1.0);
  CHECK(abar_of(2.0, 3.0) == 6.0);
  const AdversaryParams seg = segment_params(1.0, 2.0, 3.0);
  CHECK(seg.a == 1.5);
  CHECK(seg.b == 0.0);
  CHECK(seg.hi() == doctest::Approx(1.0 / 6.0));
}

TEST_CASE("alternating instance") {
  const Instance inst = alternating_instance(1.0, 2.0, 1.0, 6);
  const AdversaryParams p = alternating_params(1.0, 2.0, 1.0);
  CHECK(inst.horizon() == 6);
  CHECK(inst.hi() == doctest::Approx(0.5));
  CHECK(inst.grad_bound() == doctest::Approx(p.a * p.abar));
  CHECK(inst.cost(1)(0.0) == p.b);
  CHECK(inst.cost(2)(0.0) == doctest::Approx(p.a + p.b));
}

TEST_CASE("conditional adversary") {
  SUBCASE("pins see a single variant") {
    const auto low = conditional_adversary(PinPolicy(0.0), 1.0, 1.0, 1.0, 12, 8, 5);
    const auto high = conditional_adversary(PinPolicy(1.0), 1.0, 1.0, 1.0, 12, 8, 5);
    CHECK(low.replications == 1);
    for (std::size_t t = 1; t <= 12; ++t) {
      CHECK(low.instance.cost(t)(0.0) == doctest::Approx(6.5));
      CHECK(high.instance.cost(t)(0.0) == doctest::Approx(0.5));
    }
  }
  SUBCASE("every replica pays at least half the slope each round") {
    const double gamma = 1.0, alpha = 1.0, s = 1.0;
    const AdversaryParams p = conditional_params(gamma, alpha, s);
    const std::size_t T = 40;
    std::vector<std::unique_ptr<OnlinePolicy>> pols;
    pols.push_back(std::make_unique<OgdPolicy>());
    pols.push_back(std::make_unique<RbgPolicy>(1.0));
    pols.push_back(std::make_unique<PinPolicy>(0.5));
    for (const auto& pol : pols) {
      const auto tr = conditional_adversary(*pol, gamma, alpha, s, T, 32, 11);
      REQUIRE(tr.replicas.size() == tr.replications);
      REQUIRE(tr.estimates.size() == T);
      double mean_cost = 0.0;
      for (const auto& rep : tr.replicas) {
        REQUIRE(rep.actions.size() == T + 1);
        Trajectory charged = rep;
        charged.lookahead = 0;
        mean_cost += penalized_cost(tr.instance, charged, 0.0, 0).total;
      }
      mean_cost /= static_cast<double>(tr.replicas.size());
      // Each chosen variant costs at least b + a/2 at the replica mean of x^t.
      CHECK(mean_cost >= (p.b + p.a / 2.0) * static_cast<double>(T) - 1e-9);
    }
  }
  CHECK_THROWS_AS(conditional_adversary(Unreplayable(), 1.0, 1.0, 1.0, 5, 4, 1), ProtocolError);
  CHECK_THROWS_AS(conditional_adversary(PinPolicy(0.0), 1.0, 1.0, 1.0, 5, 0, 1), ParameterError);
}

TEST_CASE("replica seeds") {
  const auto a = replica_seeds(7, 5);
  CHECK(a.size() == 5);
  CHECK(a == replica_seeds(7, 5));
  CHECK(a != replica_seeds(8, 5));
}

TEST_CASE("recursion and threshold") {
  CHECK(f_recursion(0.5, 1) == 2.0);
  CHECK(f_recursion(0.5, 2) == 4.0);
  CHECK(f_recursion(0.5, 3) == 8.0);
  CHECK(f_recursion(0.25, 2) == doctest::Approx((1.0 + 0.25 * 4.0 / 3.0) / 0.75));
  CHECK_THROWS_AS(f_recursion(1.0, 2), ParameterError);
  CHECK_THROWS_AS(f_recursion(0.0, 2), ParameterError);
  CHECK_THROWS_AS(f_recursion(0.5, 0), ParameterError);

  CHECK(epsilon_threshold(0.1, 2, 0.5, 1.0) == doctest::Approx(0.0125));
  CHECK(epsilon_threshold(0.2, 1, 0.5, 1.0) == doctest::Approx(0.05));
  CHECK_THROWS_AS(epsilon_threshold(0.1, 2, 1.0, 1.0), ParameterError);
}

TEST_CASE("segment adversary") {
  CHECK(segment_multiplier(1.0, 1.0) == 8);
  CHECK(segment_multiplier(0.3, 1.0) == 3);

  const auto quiet = segment_adversary(PinPolicy(0.0), 1.0, 1.0, 1.0, 50);
  CHECK(quiet.segment_length == 24);
  REQUIRE(quiet.segments.size() == 2);
  for (const auto& seg : quiet.segments) {
    CHECK_FALSE(seg.triggered);
    CHECK(seg.length == 24);
  }
  CHECK(quiet.segments[1].first_round == 25);
  CHECK(quiet.instance.horizon() == 50);
  const AdversaryParams p = segment_params(1.0, 1.0, 1.0);
  // Untriggered segments get variant 2 for M rounds, then variant 1.
  CHECK(quiet.instance.cost(1)(0.0) == doctest::Approx(p.a));
  CHECK(quiet.instance.cost(9)(0.0) == doctest::Approx(0.0));
  // Leftover rounds 49 and 50 get variant 1.
  CHECK(quiet.instance.cost(50)(0.0) == 0.0);
  CHECK(quiet.threshold == doctest::Approx(epsilon_threshold(0.2, 8, 0.5, 1.0)));

  const nlohmann::json j = quiet;
  CHECK(j.at("construction") == "segment");
  CHECK(j.at("segments").size() == 2);
}
