#pragma once

#include <compare>
#include <optional>
#include <span>
#include <vector>

#include "dyngeo/split.hpp"

namespace dyngeo {

// A split with a length. Which coordinate the length is in (ordinary or
// squared) is up to the caller and documented at each use.
struct WeightedSplit {
  Split split;
  double length;

  bool operator==(const WeightedSplit&) const = default;
};

struct Arc {
  std::size_t a;
  std::size_t b;

  auto operator<=>(const Arc&) const = default;
};

// Capacity of the a->b arcs. Side weights sum to 1, so any value above 1
// never binds.
inline constexpr double kMiddleCapacity = 2.0;

// Weighted bipartite incompatibility graph of one support pair, read as an
// s-t network: s->a with capacity w_a, a->b uncapacitated, b->t with
// capacity w_b.
class IncompatibilityNetwork {
 public:
  // Weights are nonnegative and sum to 1 on each side (to 1e-12); every node
  // has at least one arc. Arcs are sorted and deduplicated.
  IncompatibilityNetwork(std::vector<double> a_weights, std::vector<double> b_weights,
                         std::vector<Arc> arcs);

  std::size_t a_count() const noexcept { return a_weights_.size(); }
  std::size_t b_count() const noexcept { return b_weights_.size(); }
  double a_weight(std::size_t i) const { return a_weights_[i]; }
  double b_weight(std::size_t j) const { return b_weights_[j]; }
  const std::vector<double>& a_weights() const noexcept { return a_weights_; }
  const std::vector<double>& b_weights() const noexcept { return b_weights_; }
  const std::vector<Arc>& arcs() const noexcept { return arcs_; }
  const std::vector<std::size_t>& arcs_of_a(std::size_t i) const { return a_arcs_[i]; }
  const std::vector<std::size_t>& arcs_of_b(std::size_t j) const { return b_arcs_[j]; }

  // Populated by build_network; empty for networks made from bare weights.
  const std::vector<Split>& a_splits() const noexcept { return a_splits_; }
  const std::vector<Split>& b_splits() const noexcept { return b_splits_; }

  // Same arcs, new a-side weights.
  IncompatibilityNetwork with_a_weights(std::vector<double> a_weights) const;

 private:
  friend IncompatibilityNetwork build_network(std::span<const WeightedSplit>,
                                              std::span<const WeightedSplit>);

  std::vector<double> a_weights_;
  std::vector<double> b_weights_;
  std::vector<Arc> arcs_;
  std::vector<std::vector<std::size_t>> a_arcs_;
  std::vector<std::vector<std::size_t>> b_arcs_;
  std::vector<Split> a_splits_;
  std::vector<Split> b_splits_;
};

// `a` and `b` carry SQUARED lengths; weights are each squared length over
// its side's total. Throws std::invalid_argument when a node has no
// incompatible partner (the split belongs to the common set or another
// pair).
IncompatibilityNetwork build_network(std::span<const WeightedSplit> a,
                                     std::span<const WeightedSplit> b);

struct FlowState {
  std::vector<double> source;  // z on s->a
  std::vector<double> middle;  // z on each arc, indexed like network.arcs()
  std::vector<double> sink;    // z on b->t
  double value = 0.0;
  std::size_t augmentations = 0;
};

// Residual capacities r = c - z + z_reverse on the directed residual arcs.
double residual_source(const IncompatibilityNetwork& net, const FlowState& f, std::size_t a);
double residual_forward(const FlowState& f, std::size_t arc);
double residual_backward(const FlowState& f, std::size_t arc);
double residual_sink(const IncompatibilityNetwork& net, const FlowState& f, std::size_t b);

// Throws NumericalError if capacity bounds or conservation fail by more than tol.
void check_flow(const IncompatibilityNetwork& net, const FlowState& f, double tol = 1e-9);

// Shortest augmenting paths (BFS), ties broken by node order. A warm start
// that violates feasibility by more than 1e-9 is discarded and the flow is
// recomputed from zero; smaller violations are trimmed away first.
FlowState max_flow(const IncompatibilityNetwork& net,
                   const std::optional<FlowState>& warm_start = std::nullopt);

struct CoverCertificate {
  std::vector<std::size_t> c1;  // a-nodes in the cover
  std::vector<std::size_t> d2;  // b-nodes in the cover
  double weight = 0.0;
};

// C1 = a-nodes not reachable from s in the residual graph, D2 = b-nodes
// reachable from s. `flow` must be maximum.
CoverCertificate min_cover(const IncompatibilityNetwork& net, const FlowState& flow);

struct Partition {
  std::vector<std::size_t> c1;
  std::vector<std::size_t> d1;
  std::vector<std::size_t> c2;
  std::vector<std::size_t> d2;
};

inline constexpr double kExtensionEpsilon = 1e-10;

struct ExtensionResult {
  bool satisfied = true;
  std::optional<Partition> partition;  // set iff !satisfied
  CoverCertificate cover;
  FlowState flow;
};

// Satisfied iff the max flow is at least 1 - eps. Otherwise returns the
// improving partition (C1, D1), (C2, D2) built from the minimum cover.
ExtensionResult check_extension(const IncompatibilityNetwork& net,
                                double eps = kExtensionEpsilon,
                                const std::optional<FlowState>& warm_start = std::nullopt);
ExtensionResult check_extension(std::span<const WeightedSplit> a,
                                std::span<const WeightedSplit> b,
                                double eps = kExtensionEpsilon);

}  // namespace dyngeo
