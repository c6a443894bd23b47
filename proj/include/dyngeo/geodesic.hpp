#pragma once

#include <string>
#include <vector>

#include "dyngeo/flow.hpp"
#include "dyngeo/tree.hpp"

namespace dyngeo {

// One support pair (A_i, B_i). Lengths are ordinary (unsquared): A-lengths
// come from the start tree, B-lengths from the target.
struct SupportPair {
  std::vector<WeightedSplit> a;
  std::vector<WeightedSplit> b;
  double norm_a = 0.0;
  double norm_b = 0.0;

  static SupportPair make(std::vector<WeightedSplit> a, std::vector<WeightedSplit> b);

  double ratio() const { return norm_a / norm_b; }
  std::vector<WeightedSplit> squared_a() const;
  std::vector<WeightedSplit> squared_b() const;
};

struct SupportSequence {
  std::vector<SupportPair> pairs;
  EdgeClassification classification;

  std::size_t k() const noexcept { return pairs.size(); }
};

// Split-only view of a support sequence, independent of edge lengths.
struct PairSplits {
  std::vector<Split> a;
  std::vector<Split> b;

  bool operator==(const PairSplits&) const = default;
};
using SupportStructure = std::vector<PairSplits>;

SupportStructure structure_of(const SupportSequence& seq);

// Attaches lengths from x (A-sides) and t (B-sides) to a structure.
// Throws InputError if a split is missing from its tree.
SupportSequence bind_supports(const SupportStructure& structure, const PhyloTree& x,
                              const PhyloTree& t);

struct Geodesic {
  PhyloTree x;
  PhyloTree t;
  SupportSequence supports;
  double distance = 0.0;
  // Max-flow augmentations spent computing the certificate.
  std::size_t augmentations = 0;
  // Final maximum flow of each pair's incompatibility network.
  std::vector<FlowState> pair_flows;
};

// Successive splitting from the single pair (onlyX, onlyT): a
// pair that fails the extension check is replaced by (C1,D1),(C2,D2) and
// the first half is rechecked.
Geodesic compute_geodesic(const PhyloTree& x, const PhyloTree& t);

// Norm-of-norms distance for a certificate, using lengths from x and t.
double geodesic_distance(const SupportSequence& seq, const PhyloTree& x, const PhyloTree& t);

// Same formula for an already bound sequence.
double certificate_length(const SupportSequence& seq);

struct P1Violation {
  std::size_t later;    // i
  std::size_t earlier;  // j < i
  Split a;              // from A_i
  Split b;              // from B_j
};

struct P2Violation {
  std::size_t index;  // ratio of pair index exceeds ratio of index + 1
};

struct P3Violation {
  std::size_t index;
  Partition witness;  // indices into the pair's a and b lists
};

struct ValidationReport {
  std::vector<std::string> structural;
  std::vector<P1Violation> p1;
  std::vector<P2Violation> p2;
  std::vector<P3Violation> p3;

  bool ok() const { return structural.empty() && p1.empty() && p2.empty() && p3.empty(); }
};

struct ValidationOptions {
  double p2_relative_tolerance = 1e-10;
  double p3_epsilon = kExtensionEpsilon;
};

// Checks (P1)-(P3) and that the pairs partition the supports of x and t.
// Lengths are taken from x and t, not from `seq`.
ValidationReport validate_supports(const SupportSequence& seq, const PhyloTree& x,
                                   const PhyloTree& t, const ValidationOptions& options = {});

// Leg index l in 0..k for lambda; a lambda on a leg boundary goes to the
// lower leg. Throws InputError outside [0, 1].
std::size_t leg_of(const Geodesic& geo, double lambda);

// Point of the geodesic at parameter lambda. Edges whose length reaches zero
// are dropped.
PhyloTree eval_point(const Geodesic& geo, double lambda);

}  // namespace dyngeo
