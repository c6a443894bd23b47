#include "dyngeo/random_tree.hpp"

#include <vector>

namespace dyngeo {

PhyloTree random_tree(const LabelSet& labels, Rng& rng, LengthRange range) {
  // Node 0 is leaf 0 and the root; node 1 its neighbour.
  std::vector<int> parent{-1, 0, 1, 1};
  std::vector<int> leaf_label{0, -1, 1, 2};
  for (int leaf = 3; leaf <= labels.max_label(); ++leaf) {
    std::uniform_int_distribution<std::size_t> pick(1, parent.size() - 1);
    auto v = pick(rng);
    int w = static_cast<int>(parent.size());
    parent.push_back(parent[v]);
    leaf_label.push_back(-1);
    parent[v] = w;
    parent.push_back(w);
    leaf_label.push_back(leaf);
  }

  std::vector<std::vector<int>> below(parent.size());
  for (std::size_t v = 1; v < parent.size(); ++v) {
    if (leaf_label[v] <= 0) continue;
    for (int u = static_cast<int>(v); u > 0; u = parent[static_cast<std::size_t>(u)]) {
      below[static_cast<std::size_t>(u)].push_back(leaf_label[v]);
    }
  }
  std::uniform_real_distribution<double> length(range.lo, range.hi);
  std::map<Split, double> lengths;
  for (std::size_t v = 1; v < parent.size(); ++v) {
    lengths.emplace(Split(labels, below[v]), length(rng));
  }
  return PhyloTree(labels, std::move(lengths));
}

PhyloTree redraw_lengths(const PhyloTree& tree, Rng& rng, LengthRange range) {
  std::uniform_real_distribution<double> length(range.lo, range.hi);
  std::map<Split, double> lengths;
  for (const auto& [split, len] : tree.edges()) lengths.emplace(split, length(rng));
  return PhyloTree(tree.labels(), std::move(lengths));
}

}  // namespace dyngeo
