#include "soco/model.hpp"

#include <algorithm>
#include <fstream>

#include <fmt/core.h>
#include <nlohmann/json.hpp>

#include "soco/errors.hpp"

namespace soco {

namespace {

constexpr double kGradTol = 1e-9;

}  // namespace

Instance::Instance(double lo, double hi, Seminorm1D norm, double grad_bound,
                   std::vector<PwlConvexFn> costs)
    : lo_(lo), hi_(hi), norm_(norm), grad_bound_(grad_bound), costs_(std::move(costs)) {
  if (!(lo >= 0.0) || !(hi >= lo) || !std::isfinite(hi)) {
    throw ParameterError(fmt::format("domain must satisfy 0 <= lo <= hi, got [{}, {}]", lo, hi));
  }
  if (!(grad_bound >= 0.0) || !std::isfinite(grad_bound)) {
    throw ParameterError(fmt::format("gradient bound must be >= 0, got {}", grad_bound));
  }
  const PwlConvexFn reference = PwlConvexFn::constant(lo, hi, 0.0);
  for (std::size_t t = 0; t < costs_.size(); ++t) {
    if (!costs_[t].same_domain(reference)) {
      throw StructuralError(fmt::format("cost {} has domain [{}, {}], instance has [{}, {}]",
                                        t + 1, costs_[t].lo(), costs_[t].hi(), lo, hi));
    }
    const double steepest = costs_[t].max_abs_slope();
    if (steepest > grad_bound * (1.0 + kGradTol) + kGradTol) {
      throw ParameterError(fmt::format("cost {} has slope {} above gradient bound {}", t + 1,
                                       steepest, grad_bound));
    }
  }
}

Instance Instance::with_norm_scale(double scale) const {
  return Instance(lo_, hi_, Seminorm1D(scale), grad_bound_, costs_);
}

Instance Instance::with_costs_appended(const std::vector<PwlConvexFn>& extra) const {
  std::vector<PwlConvexFn> all = costs_;
  double bound = grad_bound_;
  for (const auto& c : extra) {
    all.push_back(c);
    bound = std::max(bound, c.max_abs_slope());
  }
  return Instance(lo_, hi_, norm_, bound, std::move(all));
}

CostLedger penalized_cost(const Instance& inst, const Trajectory& traj, double alpha, int i) {
  if (i != 0 && i != 1) throw ParameterError(fmt::format("lookahead must be 0 or 1, got {}", i));
  if (!(alpha >= 0.0)) throw ParameterError(fmt::format("alpha must be >= 0, got {}", alpha));
  const std::size_t T = inst.horizon();
  const std::size_t needed = T + static_cast<std::size_t>(i);
  if (traj.actions.size() < needed) {
    throw StructuralError(fmt::format("cost C_{} over {} rounds needs {} actions, trajectory has {}",
                                      i, T, needed, traj.actions.size()));
  }
  CostLedger ledger;
  ledger.operating.reserve(T);
  ledger.switching.reserve(T);
  const double move_price = alpha * inst.norm_scale();
  double previous = Trajectory::start;
  for (std::size_t t = 1; t <= T; ++t) {
    const double x = traj.charged(t, i);
    ledger.operating.push_back(inst.cost(t)(x));
    ledger.switching.push_back(move_price * std::abs(x - previous));
    previous = x;
  }
  for (double v : ledger.operating) ledger.operating_total += v;
  for (double v : ledger.switching) ledger.switching_total += v;
  ledger.total = ledger.operating_total + ledger.switching_total;
  return ledger;
}

void to_json(nlohmann::json& j, const PwlConvexFn& f) {
  j = nlohmann::json{{"breakpoints", std::vector<double>(f.breakpoints().begin(), f.breakpoints().end())},
                     {"values", std::vector<double>(f.values().begin(), f.values().end())}};
}

PwlConvexFn pwl_from_json(const nlohmann::json& j) {
  return PwlConvexFn(j.at("breakpoints").get<std::vector<double>>(),
                     j.at("values").get<std::vector<double>>());
}

void to_json(nlohmann::json& j, const Instance& inst) {
  nlohmann::json costs = nlohmann::json::array();
  for (const auto& c : inst.costs()) costs.push_back(c);
  j = nlohmann::json{{"T", inst.horizon()},       {"lo", inst.lo()},
                     {"hi", inst.hi()},           {"norm_scale", inst.norm_scale()},
                     {"grad_bound", inst.grad_bound()}, {"costs", std::move(costs)}};
}

Instance instance_from_json(const nlohmann::json& j) {
  try {
    std::vector<PwlConvexFn> costs;
    for (const auto& c : j.at("costs")) costs.push_back(pwl_from_json(c));
    const auto T = j.at("T").get<std::size_t>();
    if (T != costs.size()) {
      throw StructuralError(fmt::format("T={} but {} costs listed", T, costs.size()));
    }
    return Instance(j.at("lo").get<double>(), j.at("hi").get<double>(),
                    Seminorm1D(j.at("norm_scale").get<double>()), j.at("grad_bound").get<double>(),
                    std::move(costs));
  } catch (const nlohmann::json::exception& e) {
    throw StructuralError(fmt::format("malformed instance document: {}", e.what()));
  }
}

Instance read_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(fmt::format("cannot open instance file '{}'", path));
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw StructuralError(fmt::format("'{}' is not valid JSON: {}", path, e.what()));
  }
  return instance_from_json(j);
}

void write_instance(const std::string& path, const Instance& inst) {
  std::ofstream out(path);
  if (!out) throw Error(fmt::format("cannot write instance file '{}'", path));
  out << nlohmann::json(inst).dump(2) << '\n';
}

}  // namespace soco
