#include "soco/adversaries.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <random>

#include <fmt/core.h>
#include <nlohmann/json.hpp>

#include "soco/errors.hpp"

namespace soco {

namespace {

Frame frame_of(const AdversaryParams& p) {
  return Frame{p.lo(), p.hi(), p.norm_scale, p.a * p.abar};
}

Instance make_instance(const AdversaryParams& p, std::vector<PwlConvexFn> costs) {
  return Instance(p.lo(), p.hi(), Seminorm1D(p.norm_scale), p.a * p.abar, std::move(costs));
}

}  // namespace

void AdversaryParams::validate() const {
  if (!(gamma > 0.0)) throw ParameterError(fmt::format("gamma must be > 0, got {}", gamma));
  if (!(alpha >= 0.0)) throw ParameterError(fmt::format("alpha must be >= 0, got {}", alpha));
  if (!(norm_scale >= 0.0)) {
    throw ParameterError(fmt::format("norm scale must be >= 0, got {}", norm_scale));
  }
  if (!(abar >= 1.0)) throw ParameterError(fmt::format("abar must be >= 1, got {}", abar));
  if (!(a > 0.0)) throw ParameterError(fmt::format("a must be > 0, got {}", a));
  if (!(b >= 0.0)) throw ParameterError(fmt::format("b must be >= 0, got {}", b));
}

double abar_of(double alpha, double s) { return std::max(1.0, scalar_norm(alpha, s)); }

AdversaryParams alternating_params(double gamma, double alpha, double s) {
  AdversaryParams p{gamma, alpha, s, abar_of(alpha, s), 0.0, 0.5};
  p.a = 30.0 * gamma + 2.0 + scalar_norm(6.0, s);
  p.validate();
  return p;
}

AdversaryParams conditional_params(double gamma, double alpha, double s) {
  AdversaryParams p{gamma, alpha, s, 1.0, 0.0, 0.5};
  p.a = 4.0 * gamma * (p.b + scalar_norm(alpha, s));
  p.validate();
  return p;
}

AdversaryParams segment_params(double gamma, double alpha, double s) {
  AdversaryParams p{gamma, alpha, s, abar_of(alpha, s), scalar_norm(0.5, s), 0.0};
  p.validate();
  return p;
}

PwlConvexFn make_f(const AdversaryParams& p, int variant) {
  const double lo = p.lo();
  const double hi = p.hi();
  switch (variant) {
    case 1: return PwlConvexFn({lo, hi}, {p.b, p.b + p.a});
    case 2: return PwlConvexFn({lo, hi}, {p.b + p.a, p.b});
    default: throw ParameterError(fmt::format("cost variant must be 1 or 2, got {}", variant));
  }
}

Instance alternating_instance(double gamma, double alpha, double s, std::size_t T) {
  const AdversaryParams p = alternating_params(gamma, alpha, s);
  if (T < 5) {
    std::clog << fmt::format("warning: alternating instance with T = {} < 5; the bound needs T >= 5\n", T);
  }
  const PwlConvexFn f1 = make_f(p, 1);
  const PwlConvexFn f2 = make_f(p, 2);
  std::vector<PwlConvexFn> costs;
  costs.reserve(T);
  for (std::size_t t = 1; t <= T; ++t) costs.push_back(t % 2 == 1 ? f1 : f2);
  return make_instance(p, std::move(costs));
}

std::vector<std::uint64_t> replica_seeds(std::uint64_t seed, std::size_t replications) {
  std::mt19937_64 gen(seed);
  std::vector<std::uint64_t> seeds(replications);
  for (auto& v : seeds) v = gen();
  return seeds;
}

AdversaryTranscript conditional_adversary(const OnlinePolicy& policy, double gamma, double alpha,
                                          double s, std::size_t T, std::size_t replications,
                                          std::uint64_t seed) {
  if (!policy.replicable()) {
    throw ProtocolError(fmt::format("policy {} cannot be replayed on a fixed cost prefix",
                                    policy.name()));
  }
  if (replications == 0) throw ParameterError("need at least one replica");
  const std::size_t R = policy.randomized() ? replications : 1;
  const AdversaryParams p = conditional_params(gamma, alpha, s);
  const Frame frame = frame_of(p);
  const PwlConvexFn f1 = make_f(p, 1);
  const PwlConvexFn f2 = make_f(p, 2);

  // Replicas advance in lockstep; each sees exactly the prefix the adversary
  // has committed to, so this equals rerunning them on every prefix.
  std::vector<std::unique_ptr<OnlinePolicy>> reps;
  const auto seeds = replica_seeds(seed, R);
  for (std::size_t j = 0; j < R; ++j) {
    reps.push_back(policy.clone());
    reps.back()->reset(frame, seeds[j]);
  }

  AdversaryTranscript tr{"conditional", policy.name(), p, make_instance(p, {}), R, seed,
                         {}, std::vector<Trajectory>(R), {}, 0, 0.0};
  for (auto& traj : tr.replicas) {
    traj.lookahead = policy.schedule();
    traj.actions.reserve(T + 1);
  }
  std::vector<PwlConvexFn> costs;
  costs.reserve(T);
  for (std::size_t t = 1; t <= T + 1; ++t) {
    double sum = 0.0;
    for (std::size_t j = 0; j < R; ++j) {
      const double x = reps[j]->act();
      tr.replicas[j].actions.push_back(x);
      sum += x;
    }
    if (t == T + 1) break;
    const double mean = sum / static_cast<double>(R);
    tr.estimates.push_back(mean);
    const PwlConvexFn& c = mean <= 0.5 ? f2 : f1;
    costs.push_back(c);
    for (auto& rep : reps) rep->observe(c);
  }
  tr.instance = make_instance(p, std::move(costs));
  return tr;
}

double f_recursion(double y, int i) {
  if (!(y > 0.0 && y < 1.0)) {
    throw ParameterError(fmt::format("recursion argument must lie in (0, 1), got {}", y));
  }
  if (i < 1) throw ParameterError(fmt::format("recursion index must be >= 1, got {}", i));
  double sum = 0.0;
  double f = 0.0;
  for (int k = 1; k <= i; ++k) {
    f = (1.0 + y * sum) / (1.0 - y);
    sum += f;
  }
  return f;
}

double epsilon_threshold(double delta, int tau, double a, double s) {
  if (!(a < s)) {
    throw ParameterError(fmt::format("threshold needs a < s, got a = {}, s = {}", a, s));
  }
  if (!(delta > 0.0)) throw ParameterError(fmt::format("delta must be > 0, got {}", delta));
  return delta / (2.0 * f_recursion(a / s, tau));
}

std::size_t segment_multiplier(double alpha, double gamma) {
  const double raw = 8.0 * alpha * gamma;
  const auto m = static_cast<std::size_t>(std::ceil(raw - 1e-12));
  if (std::abs(raw - std::round(raw)) > 1e-12) {
    std::clog << fmt::format("note: segment multiplier 8 alpha gamma = {} rounded up to {}\n", raw, m);
  }
  return std::max<std::size_t>(m, 1);
}

AdversaryTranscript segment_adversary(const OnlinePolicy& policy, double gamma, double alpha,
                                      double s, std::size_t T, std::uint64_t seed) {
  if (!policy.replicable()) {
    throw ProtocolError(fmt::format("policy {} cannot be replayed on a fixed cost prefix",
                                    policy.name()));
  }
  const AdversaryParams p = segment_params(gamma, alpha, s);
  const std::size_t M = segment_multiplier(alpha, gamma);
  const double delta = 1.0 / (5.0 * p.abar);
  const double threshold =
      epsilon_threshold(delta, static_cast<int>(M), p.a, s) * scalar_norm(1.0 / p.abar, s);
  const PwlConvexFn f1 = make_f(p, 1);
  const PwlConvexFn f2 = make_f(p, 2);
  const double move_price = alpha * s;

  auto run = policy.clone();
  run->reset(frame_of(p), seed);
  std::vector<PwlConvexFn> costs;
  costs.reserve(T);
  std::vector<SegmentCase> log;
  double prev = run->act();  // x^1

  auto play = [&](const PwlConvexFn& c) {
    costs.push_back(c);
    run->observe(c);
    const double x = run->act();
    // Lookahead-1 round cost of the policy minus that of the static point 0.
    const double gap = c(x) + move_price * std::abs(x - prev) - c(p.lo());
    prev = x;
    return gap;
  };

  const std::size_t len = 3 * M;
  std::size_t start = 1;
  for (; start + len - 1 <= T; start += len) {
    SegmentCase sc{start, len, false, 0, 0.0};
    double regret = 0.0;
    std::size_t local = 1;
    for (; local <= M; ++local) {
      regret += play(f2);
      if (local < M && regret > threshold) {
        sc.triggered = true;
        sc.trigger_round = local;
        sc.regret_at_trigger = regret;
        ++local;
        break;
      }
    }
    for (; local <= len; ++local) play(f1);
    log.push_back(sc);
  }
  for (; start <= T; ++start) play(f1);

  AdversaryTranscript tr{"segment", policy.name(), p, make_instance(p, std::move(costs)), 1, seed,
                         {}, {}, std::move(log), len, threshold};
  return tr;
}

void to_json(nlohmann::json& j, const AdversaryTranscript& tr) {
  j = nlohmann::json::object();
  j["construction"] = tr.construction;
  j["policy"] = tr.policy;
  j["params"] = {{"gamma", tr.params.gamma}, {"alpha", tr.params.alpha},
                 {"norm_scale", tr.params.norm_scale}, {"abar", tr.params.abar},
                 {"a", tr.params.a}, {"b", tr.params.b}};
  j["instance"] = tr.instance;
  j["replications"] = tr.replications;
  j["seed"] = tr.seed;
  if (!tr.estimates.empty()) j["estimates"] = tr.estimates;
  if (!tr.segments.empty() || tr.segment_length > 0) {
    j["segment_length"] = tr.segment_length;
    j["threshold"] = tr.threshold;
    auto& segs = j["segments"] = nlohmann::json::array();
    for (const auto& sc : tr.segments) {
      segs.push_back({{"first_round", sc.first_round},
                      {"length", sc.length},
                      {"case", sc.triggered ? "a" : "b"},
                      {"trigger_round", sc.trigger_round},
                      {"regret_at_trigger", sc.regret_at_trigger}});
    }
  }
}

}  // namespace soco
