#pragma once

#include <map>
#include <optional>
#include <vector>

#include "dyngeo/split.hpp"

namespace dyngeo {

// A point of treespace: a set of pairwise compatible splits with strictly
// positive branch lengths. Immutable after construction.
class PhyloTree {
 public:
  PhyloTree(LabelSet labels, std::map<Split, double> lengths);

  const LabelSet& labels() const noexcept { return labels_; }
  const std::map<Split, double>& edges() const noexcept { return lengths_; }
  std::size_t edge_count() const noexcept { return lengths_.size(); }

  bool has(const Split& split) const { return lengths_.contains(split); }
  std::optional<double> length(const Split& split) const;

  // Same tree with singleton splits and the leaf-0 edge removed.
  PhyloTree without_leaf_edges() const;

  bool same_topology(const PhyloTree& other) const;

  bool operator==(const PhyloTree&) const = default;

 private:
  LabelSet labels_;
  std::map<Split, double> lengths_;
};

// Edge lengths replaced by their squares. Coordinates are nonnegative; the
// interpolation of two squared trees is linear in these coordinates.
class SquaredTree {
 public:
  SquaredTree(LabelSet labels, std::map<Split, double> coords);

  const LabelSet& labels() const noexcept { return labels_; }
  const std::map<Split, double>& coords() const noexcept { return coords_; }

 private:
  LabelSet labels_;
  std::map<Split, double> coords_;
};

SquaredTree square_coords(const PhyloTree& tree);

// Square roots of every coordinate. Zero coordinates drop their split;
// negative coordinates throw InputError.
PhyloTree unsquare_coords(const SquaredTree& tree);

struct CommonEdge {
  Split split;
  double length_x;  // 0 when the split is absent from X
  double length_t;  // 0 when the split is absent from T

  bool operator==(const CommonEdge&) const = default;
};

// Partition of the edges of two trees into the common set C (compatible with
// every edge of the other tree) and the two disjoint supports.
struct EdgeClassification {
  std::vector<CommonEdge> common;
  std::vector<Split> only_x;
  std::vector<Split> only_t;
};

EdgeClassification classify_edges(const PhyloTree& x, const PhyloTree& t);

void require_same_labels(const PhyloTree& x, const PhyloTree& t);

}  // namespace dyngeo
