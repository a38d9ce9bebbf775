#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "soco/algorithms.hpp"
#include "soco/model.hpp"

namespace soco {

/// How scalar constants written as seminorms are turned into numbers: a
/// scalar c under a seminorm of scale s is read as c * s.
inline double scalar_norm(double c, double s) { return c * s; }

/// Parameters of the two-function constructions: costs b + a x abar and
/// b + a (1 - x abar) on [0, 1 / abar].
struct AdversaryParams {
  double gamma = 1.0;
  double alpha = 1.0;
  double norm_scale = 1.0;
  double abar = 1.0;
  double a = 1.0;
  double b = 0.0;

  double lo() const { return 0.0; }
  double hi() const { return 1.0 / abar; }
  void validate() const;
};

/// abar = max(1, alpha s).
double abar_of(double alpha, double s);

/// b = 1/2, a = 30 gamma + 2 + 6 s.
AdversaryParams alternating_params(double gamma, double alpha, double s);
/// Domain [0, 1], b = 1/2, a = 4 gamma (b + alpha s).
AdversaryParams conditional_params(double gamma, double alpha, double s);
/// a = s / 2, b = 0.
AdversaryParams segment_params(double gamma, double alpha, double s);

/// Variant 1: b + a x abar. Variant 2: b + a (1 - x abar).
PwlConvexFn make_f(const AdversaryParams& p, int variant);

/// Odd rounds get variant 1, even rounds variant 2. The construction is
/// meant for T >= 5; shorter horizons are generated with a warning.
Instance alternating_instance(double gamma, double alpha, double s, std::size_t T);

struct SegmentCase {
  std::size_t first_round;  // 1-based
  std::size_t length;
  bool triggered;           // case (a)
  std::size_t trigger_round;  // segment-local, 0 when not triggered
  double regret_at_trigger;
};

struct AdversaryTranscript {
  std::string construction;  // "alternating", "conditional" or "segment"
  std::string policy;
  AdversaryParams params;
  Instance instance;
  std::size_t replications = 1;
  std::uint64_t seed = 0;
  /// conditional: the plug-in estimate of E[x^t] behind each round's choice.
  std::vector<double> estimates;
  /// conditional: x^1..x^{T+1} of every replica, in replica order.
  std::vector<Trajectory> replicas;
  /// segment: one entry per segment; leftover rounds are not a segment.
  std::vector<SegmentCase> segments;
  std::size_t segment_length = 0;
  double threshold = 0.0;
};

/// Builds the costs round by round against R seeded replicas of `policy`:
/// variant 2 when the replica mean of x^t is at most 1/2, else variant 1.
/// Deterministic policies use a single replica.
AdversaryTranscript conditional_adversary(const OnlinePolicy& policy, double gamma, double alpha,
                                          double s, std::size_t T, std::size_t replications,
                                          std::uint64_t seed);

/// Seeds of the replicas used by conditional_adversary.
std::vector<std::uint64_t> replica_seeds(std::uint64_t seed, std::size_t replications);

/// f_1(y) = 1 / (1 - y), f_i(y) = (1 + y sum_{j<i} f_j(y)) / (1 - y).
double f_recursion(double y, int i);

/// delta / (2 f_tau(a / s)).
double epsilon_threshold(double delta, int tau, double a, double s);

/// Segment length multiplier M = ceil(8 alpha gamma).
std::size_t segment_multiplier(double alpha, double gamma);

/// Segments of 3M rounds: variant 2 until the policy's running lookahead-1
/// regret against x = 0 exceeds eps(delta, M) s / abar at some local round
/// below M, or until round M; variant 1 afterwards. Rounds past the last
/// full segment get variant 1.
AdversaryTranscript segment_adversary(const OnlinePolicy& policy, double gamma, double alpha,
                                      double s, std::size_t T, std::uint64_t seed = 0);

void to_json(nlohmann::json& j, const AdversaryTranscript& tr);

}  // namespace soco
