#pragma once

#include <limits>
#include <optional>
#include <variant>
#include <vector>

#include "dyngeo/flow.hpp"
#include "dyngeo/geodesic.hpp"
#include "dyngeo/tree.hpp"

namespace dyngeo {

// Straight-line motion of the start point toward fixed target T. The motion
// is linear in SQUARED coordinates: |e|^2 at lambda is
// |e|_{X0}^2 + lambda * d_e with d_e = |e|_{X1}^2 - |e|_{X0}^2. Callers pass
// ordinary-length trees; squaring happens here.
class Segment {
 public:
  // Throws InputError unless x0 and x1 have identical split sets and all
  // three trees share a label set.
  Segment(PhyloTree x0, PhyloTree x1, PhyloTree t);

  const PhyloTree& x0() const noexcept { return x0_; }
  const PhyloTree& x1() const noexcept { return x1_; }
  const PhyloTree& t() const noexcept { return t_; }

  double squared_start(const Split& s) const;
  double squared_end(const Split& s) const;
  double drift(const Split& s) const { return squared_end(s) - squared_start(s); }
  double squared_at(const Split& s, double lambda) const {
    return squared_start(s) + lambda * drift(s);
  }

  // X^lambda in ordinary coordinates.
  PhyloTree point(double lambda) const;

  Segment reversed() const { return Segment(x1_, x0_, t_); }

 private:
  PhyloTree x0_;
  PhyloTree x1_;
  PhyloTree t_;
  SquaredTree sq0_;
  SquaredTree sq1_;
};

struct SweepTolerances {
  double residual_zero = 1e-10;   // flow at or below this marks a bottleneck arc
  double ratio_equality = 1e-8;   // merge precondition
  double event_dedup = 1e-9;      // events closer than this to the current lambda are "now"
};

// ---- (P2) boundaries ------------------------------------------------------

struct P2Coefficients {
  double a = 0.0;
  double b = 0.0;
};

// Constraint between pairs l and l+1 (0-based) written as a*lambda + b >= 0.
P2Coefficients p2_coefficients(const SupportStructure& seq, std::size_t l, const Segment& seg);

struct P2Event {
  std::size_t pair_index;  // merges pairs pair_index and pair_index + 1
  P2Coefficients coefficients;
  double lambda;
};

// Smallest root -b/a over constraints with a < 0 and root in (current, 1].
std::optional<P2Event> next_p2_event(const SupportStructure& seq, const Segment& seg,
                                     double current);

// Replaces pairs l and l+1 with their union. The two ratios must agree to
// `ratio_tolerance` (relative) in the lengths bound to `seq`.
SupportSequence merge_pairs(const SupportSequence& seq, std::size_t l,
                            double ratio_tolerance = 1e-8);

// ---- rescaled parameter for one pair ---------------------------------------

// Per-pair change of parameter that makes the a-weights linear. sum0 and
// sum1 are the pair's A-side totals of squared lengths in X0 and X1.
struct RescaleMap {
  double sum0 = 1.0;
  double sum1 = 1.0;
};

double rescale_lambda(const RescaleMap& map, double scaled);
// Inverse of rescale_lambda.
double scale_lambda(const RescaleMap& map, double lambda);

struct ScaledDrift {
  std::vector<double> start_weights;  // |e|^2_{X0} / sum0
  std::vector<double> end_weights;    // |e|^2_{X1} / sum1
  std::vector<double> drift;          // end - start, sums to zero
  RescaleMap map;
};

ScaledDrift scaled_drift(const PairSplits& pair, const Segment& seg);

// ---- (P3) boundaries: parametric max flow ----------------------------------

struct P3Boundary {
  double scaled_lambda;
  CoverCertificate cover;  // cover for parameters just past the boundary
};
struct P3ReachedEnd {};
using P3Outcome = std::variant<P3ReachedEnd, P3Boundary>;

// Route for part of one supply node's drift: alternating a/b nodes from the
// supply node to a demand node. Node ids: a-node i is i, b-node j is
// a_count + j.
struct AugmentingPath {
  std::size_t supply;
  std::vector<std::size_t> nodes;
  std::vector<std::size_t> arcs;
  double rate;
};

struct BalanceResult {
  bool feasible = true;
  std::vector<std::size_t> pathless;  // supply nodes with unrouted drift
  // Nodes reachable from the super source in the routing residual graph;
  // only meaningful when infeasible.
  std::vector<bool> reachable_a;
  std::vector<bool> reachable_b;
};

// Tracks a saturating flow of one pair's network while the a-weights move
// linearly, w_a(s) = w_a(start) + (s - start) * drift_a, detecting the first
// parameter past which no flow of value 1 exists.
class ParametricFlow {
 public:
  ParametricFlow(IncompatibilityNetwork start_network, std::vector<double> drift, double start,
                 FlowState flow, SweepTolerances tolerances = {}, double end = 1.0);

  double start() const noexcept { return start_; }
  double current() const noexcept { return current_; }
  double end() const noexcept { return end_; }
  const IncompatibilityNetwork& start_network() const noexcept { return net_; }
  const std::vector<double>& drift() const noexcept { return drift_; }
  const std::vector<double>& middle_flow() const noexcept { return z_; }
  const std::vector<AugmentingPath>& paths() const noexcept { return paths_; }
  // Rate of change of each arc's flow under the current paths.
  const std::vector<double>& arc_rates() const noexcept { return rate_; }

  double a_weight_at(std::size_t a, double scaled) const;
  IncompatibilityNetwork network_at(double scaled) const;
  // Flow on the recorded trajectory, for start <= scaled <= current.
  FlowState flow_at(double scaled) const;

  // Drops paths crossing bottleneck arcs, reroutes the unmet drift by BFS
  // and redecomposes the routing into paths.
  BalanceResult balance_paths();

  // Runs the intersection loop from current() to the next boundary or end.
  P3Outcome p3_next_event();

  std::size_t augmentations() const noexcept { return augmentations_; }
  std::size_t iterations() const noexcept { return iterations_; }

 private:
  bool frozen(std::size_t arc) const { return z_[arc] <= tol_.residual_zero; }
  void decompose();
  void record();
  CoverCertificate cover_from(const BalanceResult& bal) const;

  IncompatibilityNetwork net_;
  std::vector<double> drift_;
  double start_;
  double current_;
  double end_;
  SweepTolerances tol_;
  std::vector<double> z_;
  std::vector<double> rate_;
  std::vector<double> routed_supply_;
  std::vector<double> routed_demand_;
  std::vector<AugmentingPath> paths_;
  std::vector<std::pair<double, std::vector<double>>> trajectory_;
  std::optional<P3Outcome> saturated_start_;
  std::size_t augmentations_ = 0;
  std::size_t iterations_ = 0;
};

// Replaces pair l with (C1, D1), (C2, D2) built from a cover of that pair's
// network (indices into its a and b lists). Throws NumericalError when a
// part is empty or the result breaks (P1).
SupportStructure split_pair(const SupportStructure& seq, std::size_t l,
                            const CoverCertificate& cover);

// ---- sweep -----------------------------------------------------------------

enum class EventKind { P2Merge, P3Split };

const char* to_string(EventKind kind);

struct SweepEvent {
  double lambda;
  EventKind kind;
  std::size_t pair_index;      // 0-based index of the pair merged (with the next) or split
  std::vector<Split> cover_a;  // P3: C1
  std::vector<Split> cover_b;  // P3: D2
  double distance_before;
  double distance_after;
  SupportStructure supports_after;
};

struct CertificateInterval {
  double begin;
  double end;
  SupportStructure supports;
};

struct SweepStats {
  std::size_t augmentations = 0;       // all max-flow and routing augmentations
  std::size_t tracker_iterations = 0;  // bottleneck steps across all trackers
};

struct SweepOptions {
  SweepTolerances tolerances;
  // Default 10 * k0 * r, with k0 the initial number of pairs (at least 1).
  std::optional<std::size_t> event_cap;
};

class SweepResult {
 public:
  SweepResult(Segment segment, Geodesic initial) : segment_(std::move(segment)), initial_(std::move(initial)) {}

  const Segment& segment() const noexcept { return segment_; }
  const Geodesic& initial() const noexcept { return initial_; }
  const std::vector<SweepEvent>& events() const noexcept { return events_; }
  const std::vector<CertificateInterval>& intervals() const noexcept { return intervals_; }
  const SweepStats& stats() const noexcept { return stats_; }

  // Certificate of the interval containing lambda (the later one at an event).
  const SupportStructure& structure_at(double lambda) const;
  // That certificate bound to X^lambda and T.
  SupportSequence supports_at(double lambda) const;
  // d(X^lambda, T) in ordinary coordinates.
  double distance_at(double lambda) const;

 private:
  friend SweepResult sweep(const Segment&, const SweepOptions&);

  Segment segment_;
  Geodesic initial_;
  std::vector<SweepEvent> events_;
  std::vector<CertificateInterval> intervals_;
  SweepStats stats_;
};

SweepResult sweep(const Segment& segment, const SweepOptions& options = {});

}  // namespace dyngeo
