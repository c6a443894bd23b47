#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "dyngeo/tree.hpp"

namespace dyngeo {

struct NewickOptions {
  // When set, the parsed tree must use exactly this label set.
  std::optional<LabelSet> labels;
  // Leaf names that are not decimal integers are looked up here.
  std::map<std::string, int> names;
  // Accept zero branch lengths and contract those edges. Off by default:
  // zero lengths normally signal a bad input file.
  bool allow_zero_lengths = false;
};

// Parses one rooted Newick expression. Degree-2 nodes (a bifurcating root,
// for instance) are suppressed and their edge lengths summed. A labelled
// root with a branch length is read as leaf `label` hanging off the root,
// which is the form serialize_newick emits.
PhyloTree parse_newick(std::string_view text, const NewickOptions& options = {});

// Canonical form rooted at leaf 0: "(...)0:len;" with children ordered by
// their smallest leaf and lengths in shortest round-trip decimal. Absent
// pendant edges are written with length 0.
std::string serialize_newick(const PhyloTree& tree);

PhyloTree read_newick_file(const std::string& path, const NewickOptions& options = {});

}  // namespace dyngeo
