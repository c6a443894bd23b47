#include "dyngeo/flow.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <stdexcept>
#include <string>

#include "dyngeo/errors.hpp"

namespace dyngeo {

namespace {

constexpr double kWeightSumTolerance = 1e-12;
// Residuals at or below this are treated as saturated during search.
constexpr double kResidualFloor = 1e-13;
constexpr double kWarmStartTolerance = 1e-9;

void check_side(const std::vector<double>& w, const char* side) {
  if (w.empty()) throw std::invalid_argument(std::string("empty ") + side + "-side");
  double total = 0.0;
  for (double x : w) {
    if (!std::isfinite(x) || x < 0.0) {
      throw std::invalid_argument(std::string("negative or non-finite ") + side + "-weight");
    }
    total += x;
  }
  if (std::abs(total - 1.0) > kWeightSumTolerance) {
    throw std::invalid_argument(std::string(side) + "-weights sum to " + std::to_string(total) +
                                ", not 1");
  }
}

}  // namespace

IncompatibilityNetwork::IncompatibilityNetwork(std::vector<double> a_weights,
                                               std::vector<double> b_weights,
                                               std::vector<Arc> arcs)
    : a_weights_(std::move(a_weights)), b_weights_(std::move(b_weights)), arcs_(std::move(arcs)) {
  check_side(a_weights_, "a");
  check_side(b_weights_, "b");
  std::sort(arcs_.begin(), arcs_.end());
  arcs_.erase(std::unique(arcs_.begin(), arcs_.end()), arcs_.end());
  a_arcs_.resize(a_weights_.size());
  b_arcs_.resize(b_weights_.size());
  for (std::size_t k = 0; k < arcs_.size(); ++k) {
    const auto& arc = arcs_[k];
    if (arc.a >= a_weights_.size() || arc.b >= b_weights_.size()) {
      throw std::invalid_argument("arc endpoint out of range");
    }
    a_arcs_[arc.a].push_back(k);
    b_arcs_[arc.b].push_back(k);
  }
  for (std::size_t i = 0; i < a_arcs_.size(); ++i) {
    if (a_arcs_[i].empty()) {
      throw std::invalid_argument("a-node " + std::to_string(i) + " has no incompatible partner");
    }
  }
  for (std::size_t j = 0; j < b_arcs_.size(); ++j) {
    if (b_arcs_[j].empty()) {
      throw std::invalid_argument("b-node " + std::to_string(j) + " has no incompatible partner");
    }
  }
}

IncompatibilityNetwork IncompatibilityNetwork::with_a_weights(std::vector<double> a_weights) const {
  IncompatibilityNetwork out = *this;
  if (a_weights.size() != a_weights_.size()) throw std::invalid_argument("a-weight count changed");
  check_side(a_weights, "a");
  out.a_weights_ = std::move(a_weights);
  return out;
}

IncompatibilityNetwork build_network(std::span<const WeightedSplit> a,
                                     std::span<const WeightedSplit> b) {
  auto normalized = [](std::span<const WeightedSplit> side, const char* name) {
    if (side.empty()) throw std::invalid_argument(std::string("empty ") + name + "-side");
    double total = 0.0;
    for (const auto& ws : side) {
      if (!(ws.length > 0.0)) {
        throw std::invalid_argument(std::string("non-positive squared length on ") + name +
                                    "-side split " + ws.split.to_string());
      }
      total += ws.length;
    }
    std::vector<double> w;
    w.reserve(side.size());
    for (const auto& ws : side) w.push_back(ws.length / total);
    return w;
  };
  std::vector<Arc> arcs;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (!splits_compatible(a[i].split, b[j].split)) arcs.push_back({i, j});
    }
  }
  IncompatibilityNetwork net(normalized(a, "a"), normalized(b, "b"), std::move(arcs));
  for (const auto& ws : a) net.a_splits_.push_back(ws.split);
  for (const auto& ws : b) net.b_splits_.push_back(ws.split);
  return net;
}

double residual_source(const IncompatibilityNetwork& net, const FlowState& f, std::size_t a) {
  return net.a_weight(a) - f.source[a];
}
double residual_forward(const FlowState& f, std::size_t arc) {
  return kMiddleCapacity - f.middle[arc];
}
double residual_backward(const FlowState& f, std::size_t arc) { return f.middle[arc]; }
double residual_sink(const IncompatibilityNetwork& net, const FlowState& f, std::size_t b) {
  return net.b_weight(b) - f.sink[b];
}

void check_flow(const IncompatibilityNetwork& net, const FlowState& f, double tol) {
  auto fail = [](const std::string& what) { throw NumericalError("flow invariant: " + what); };
  if (f.source.size() != net.a_count() || f.sink.size() != net.b_count() ||
      f.middle.size() != net.arcs().size()) {
    fail("flow vector sizes do not match the network");
  }
  for (std::size_t i = 0; i < net.a_count(); ++i) {
    if (f.source[i] < -tol || f.source[i] > net.a_weight(i) + tol) fail("source arc capacity");
    double out = 0.0;
    for (auto k : net.arcs_of_a(i)) out += f.middle[k];
    if (std::abs(out - f.source[i]) > tol) fail("conservation at a-node " + std::to_string(i));
  }
  for (std::size_t j = 0; j < net.b_count(); ++j) {
    if (f.sink[j] < -tol || f.sink[j] > net.b_weight(j) + tol) fail("sink arc capacity");
    double in = 0.0;
    for (auto k : net.arcs_of_b(j)) in += f.middle[k];
    if (std::abs(in - f.sink[j]) > tol) fail("conservation at b-node " + std::to_string(j));
  }
  for (double z : f.middle) {
    if (z < -tol || z > kMiddleCapacity + tol) fail("middle arc capacity");
  }
  double in_total = std::accumulate(f.source.begin(), f.source.end(), 0.0);
  double out_total = std::accumulate(f.sink.begin(), f.sink.end(), 0.0);
  if (std::abs(in_total - f.value) > tol || std::abs(out_total - f.value) > tol) {
    fail("value disagrees with arc totals");
  }
}

namespace {

FlowState zero_flow(const IncompatibilityNetwork& net) {
  FlowState f;
  f.source.assign(net.a_count(), 0.0);
  f.middle.assign(net.arcs().size(), 0.0);
  f.sink.assign(net.b_count(), 0.0);
  return f;
}

void recompute_totals(const IncompatibilityNetwork& net, FlowState& f) {
  std::fill(f.source.begin(), f.source.end(), 0.0);
  std::fill(f.sink.begin(), f.sink.end(), 0.0);
  for (std::size_t k = 0; k < net.arcs().size(); ++k) {
    f.source[net.arcs()[k].a] += f.middle[k];
    f.sink[net.arcs()[k].b] += f.middle[k];
  }
  f.value = std::accumulate(f.source.begin(), f.source.end(), 0.0);
}

// Trims a nearly feasible flow so every bound holds exactly.
std::optional<FlowState> admit_warm_start(const IncompatibilityNetwork& net, FlowState f) {
  try {
    check_flow(net, f, kWarmStartTolerance);
  } catch (const NumericalError&) {
    return std::nullopt;
  }
  for (double& z : f.middle) z = std::clamp(z, 0.0, kMiddleCapacity);
  recompute_totals(net, f);
  for (std::size_t i = 0; i < net.a_count(); ++i) {
    if (f.source[i] > net.a_weight(i) && f.source[i] > 0.0) {
      double scale = net.a_weight(i) / f.source[i];
      for (auto k : net.arcs_of_a(i)) f.middle[k] *= scale;
    }
  }
  recompute_totals(net, f);
  for (std::size_t j = 0; j < net.b_count(); ++j) {
    if (f.sink[j] > net.b_weight(j) && f.sink[j] > 0.0) {
      double scale = net.b_weight(j) / f.sink[j];
      for (auto k : net.arcs_of_b(j)) f.middle[k] *= scale;
    }
  }
  recompute_totals(net, f);
  f.augmentations = 0;
  return f;
}

// Node numbering for searches: a-node i is i, b-node j is na + j.
struct SearchResult {
  std::vector<int> parent_arc;  // arc used to enter the node, -1 if unreached
  std::vector<bool> reached;
  std::optional<std::size_t> sink_b;  // b-node with spare sink capacity
};

SearchResult search(const IncompatibilityNetwork& net, const FlowState& f, bool stop_at_sink) {
  const auto na = net.a_count();
  const auto n = na + net.b_count();
  SearchResult r;
  r.parent_arc.assign(n, -1);
  r.reached.assign(n, false);
  std::deque<std::size_t> queue;
  for (std::size_t i = 0; i < na; ++i) {
    if (residual_source(net, f, i) > kResidualFloor) {
      r.reached[i] = true;
      queue.push_back(i);
    }
  }
  while (!queue.empty()) {
    auto u = queue.front();
    queue.pop_front();
    if (u < na) {
      for (auto k : net.arcs_of_a(u)) {
        auto v = na + net.arcs()[k].b;
        if (r.reached[v] || residual_forward(f, k) <= kResidualFloor) continue;
        r.reached[v] = true;
        r.parent_arc[v] = static_cast<int>(k);
        if (stop_at_sink && residual_sink(net, f, v - na) > kResidualFloor) {
          r.sink_b = v - na;
          return r;
        }
        queue.push_back(v);
      }
    } else {
      for (auto k : net.arcs_of_b(u - na)) {
        auto v = net.arcs()[k].a;
        if (r.reached[v] || residual_backward(f, k) <= kResidualFloor) continue;
        r.reached[v] = true;
        r.parent_arc[v] = static_cast<int>(k);
        queue.push_back(v);
      }
    }
  }
  return r;
}

}  // namespace

FlowState max_flow(const IncompatibilityNetwork& net, const std::optional<FlowState>& warm_start) {
  FlowState f = zero_flow(net);
  if (warm_start) {
    if (auto admitted = admit_warm_start(net, *warm_start)) f = std::move(*admitted);
  }
  const auto na = net.a_count();
  while (true) {
    auto r = search(net, f, true);
    if (!r.sink_b) break;
    // Walk back from the sink end to find the bottleneck, then push.
    std::size_t b = *r.sink_b;
    double amount = residual_sink(net, f, b);
    std::size_t v = na + b;
    std::size_t start = 0;
    while (true) {
      auto k = static_cast<std::size_t>(r.parent_arc[v]);
      if (v >= na) {
        amount = std::min(amount, residual_forward(f, k));
        v = net.arcs()[k].a;
      } else {
        amount = std::min(amount, residual_backward(f, k));
        v = na + net.arcs()[k].b;
      }
      if (v < na && r.parent_arc[v] < 0) {
        start = v;
        break;
      }
    }
    amount = std::min(amount, residual_source(net, f, start));
    v = na + b;
    f.sink[b] += amount;
    while (true) {
      auto k = static_cast<std::size_t>(r.parent_arc[v]);
      if (v >= na) {
        f.middle[k] += amount;
        v = net.arcs()[k].a;
      } else {
        f.middle[k] -= amount;
        v = na + net.arcs()[k].b;
      }
      if (v < na && r.parent_arc[v] < 0) break;
    }
    f.source[start] += amount;
    f.value += amount;
    ++f.augmentations;
  }
  return f;
}

CoverCertificate min_cover(const IncompatibilityNetwork& net, const FlowState& flow) {
  auto r = search(net, flow, false);
  const auto na = net.a_count();
  CoverCertificate cover;
  for (std::size_t i = 0; i < na; ++i) {
    if (!r.reached[i]) {
      cover.c1.push_back(i);
      cover.weight += net.a_weight(i);
    }
  }
  for (std::size_t j = 0; j < net.b_count(); ++j) {
    if (r.reached[na + j]) {
      cover.d2.push_back(j);
      cover.weight += net.b_weight(j);
    }
  }
  return cover;
}

ExtensionResult check_extension(const IncompatibilityNetwork& net, double eps,
                                const std::optional<FlowState>& warm_start) {
  ExtensionResult result;
  result.flow = max_flow(net, warm_start);
  result.cover = min_cover(net, result.flow);
  if (result.flow.value >= 1.0 - eps) return result;

  result.satisfied = false;
  Partition p;
  p.c1 = result.cover.c1;
  p.d2 = result.cover.d2;
  for (std::size_t i = 0, c = 0; i < net.a_count(); ++i) {
    if (c < p.c1.size() && p.c1[c] == i) {
      ++c;
    } else {
      p.c2.push_back(i);
    }
  }
  for (std::size_t j = 0, d = 0; j < net.b_count(); ++j) {
    if (d < p.d2.size() && p.d2[d] == j) {
      ++d;
    } else {
      p.d1.push_back(j);
    }
  }
  if (p.c1.empty() || p.c2.empty() || p.d1.empty() || p.d2.empty()) {
    throw NumericalError("degenerate extension partition: flow value " +
                         std::to_string(result.flow.value) + " < 1 but cover weight " +
                         std::to_string(result.cover.weight));
  }
  result.partition = std::move(p);
  return result;
}

ExtensionResult check_extension(std::span<const WeightedSplit> a, std::span<const WeightedSplit> b,
                                double eps) {
  return check_extension(build_network(a, b), eps);
}

}  // namespace dyngeo
