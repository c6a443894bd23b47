#include "dyngeo/tree.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dyngeo/errors.hpp"

namespace dyngeo {

PhyloTree::PhyloTree(LabelSet labels, std::map<Split, double> lengths)
    : labels_(labels), lengths_(std::move(lengths)) {
  const auto max_edges = 2 * static_cast<std::size_t>(labels_.max_label()) - 1;
  if (lengths_.size() > max_edges) {
    throw InputError("tree has " + std::to_string(lengths_.size()) + " edges, at most " +
                     std::to_string(max_edges) + " possible");
  }
  for (const auto& [split, len] : lengths_) {
    if (split.max_label() != labels_.max_label()) {
      throw InputError("split " + split.to_string() + " does not belong to the tree's label set");
    }
    if (!std::isfinite(len) || len <= 0.0) {
      throw InputError("edge " + split.to_string() + " has non-positive length");
    }
  }
  for (auto i = lengths_.begin(); i != lengths_.end(); ++i) {
    for (auto j = std::next(i); j != lengths_.end(); ++j) {
      if (!splits_compatible(i->first, j->first)) {
        throw InputError("splits " + i->first.to_string() + " and " + j->first.to_string() +
                         " cannot coexist in one tree");
      }
    }
  }
}

std::optional<double> PhyloTree::length(const Split& split) const {
  auto it = lengths_.find(split);
  if (it == lengths_.end()) return std::nullopt;
  return it->second;
}

PhyloTree PhyloTree::without_leaf_edges() const {
  std::map<Split, double> interior;
  for (const auto& [split, len] : lengths_) {
    if (!split.is_leaf_edge()) interior.emplace(split, len);
  }
  return PhyloTree(labels_, std::move(interior));
}

bool PhyloTree::same_topology(const PhyloTree& other) const {
  if (labels_ != other.labels_ || lengths_.size() != other.lengths_.size()) return false;
  for (auto i = lengths_.begin(), j = other.lengths_.begin(); i != lengths_.end(); ++i, ++j) {
    if (i->first != j->first) return false;
  }
  return true;
}

SquaredTree::SquaredTree(LabelSet labels, std::map<Split, double> coords)
    : labels_(labels), coords_(std::move(coords)) {
  for (const auto& [split, c] : coords_) {
    if (!std::isfinite(c)) throw InputError("non-finite squared coordinate at " + split.to_string());
  }
}

SquaredTree square_coords(const PhyloTree& tree) {
  std::map<Split, double> coords;
  for (const auto& [split, len] : tree.edges()) coords.emplace(split, len * len);
  return SquaredTree(tree.labels(), std::move(coords));
}

PhyloTree unsquare_coords(const SquaredTree& tree) {
  std::map<Split, double> lengths;
  for (const auto& [split, c] : tree.coords()) {
    if (c < 0.0) throw InputError("negative squared coordinate at " + split.to_string());
    if (c > 0.0) lengths.emplace(split, std::sqrt(c));
  }
  return PhyloTree(tree.labels(), std::move(lengths));
}

void require_same_labels(const PhyloTree& x, const PhyloTree& t) {
  if (x.labels() != t.labels()) {
    throw InputError("trees have different label sets (r = " +
                     std::to_string(x.labels().max_label()) + " vs r = " +
                     std::to_string(t.labels().max_label()) + ")");
  }
}

EdgeClassification classify_edges(const PhyloTree& x, const PhyloTree& t) {
  require_same_labels(x, t);
  auto compatible_with_all = [](const Split& s, const PhyloTree& other) {
    for (const auto& [o, len] : other.edges()) {
      if (!splits_compatible(s, o)) return false;
    }
    return true;
  };

  EdgeClassification out;
  for (const auto& [split, len] : x.edges()) {
    if (auto lt = t.length(split)) {
      out.common.push_back({split, len, *lt});
    } else if (compatible_with_all(split, t)) {
      out.common.push_back({split, len, 0.0});
    } else {
      out.only_x.push_back(split);
    }
  }
  for (const auto& [split, len] : t.edges()) {
    if (x.has(split)) continue;
    if (compatible_with_all(split, x)) {
      out.common.push_back({split, 0.0, len});
    } else {
      out.only_t.push_back(split);
    }
  }
  std::sort(out.common.begin(), out.common.end(),
            [](const CommonEdge& a, const CommonEdge& b) { return a.split < b.split; });
  return out;
}

}  // namespace dyngeo
