#pragma once

#include <random>

#include "dyngeo/tree.hpp"

namespace dyngeo {

using Rng = std::mt19937_64;

struct LengthRange {
  double lo = 0.5;
  double hi = 2.0;
};

// Binary tree on labels 0..r built by attaching leaves 3..r one at a time to
// a uniformly chosen edge. Every edge, pendant ones included, gets a length
// drawn uniformly from `range`.
PhyloTree random_tree(const LabelSet& labels, Rng& rng, LengthRange range = {});

// Same split set as `tree`, fresh lengths.
PhyloTree redraw_lengths(const PhyloTree& tree, Rng& rng, LengthRange range = {});

}  // namespace dyngeo
