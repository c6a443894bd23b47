#include "dyngeo/newick.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "dyngeo/errors.hpp"

namespace dyngeo {

namespace {

struct Node {
  std::optional<std::string> label;
  std::optional<double> length;
  int parent = -1;
  std::vector<int> children;
};

class NewickReader {
 public:
  explicit NewickReader(std::string_view text) : text_(text) {}

  std::vector<Node> read() {
    skip_space();
    int root = read_node(-1);
    skip_space();
    if (peek() != ';') fail("expected ';' at end of tree");
    ++pos_;
    skip_space();
    if (pos_ != text_.size()) fail("trailing characters after ';'");
    if (root != 0) fail("internal parser error");
    return std::move(nodes_);
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw InputError("newick: " + what + " (at offset " + std::to_string(pos_) + ")");
  }

  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  void skip_space() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else if (c == '[') {
        auto close = text_.find(']', pos_);
        if (close == std::string_view::npos) fail("unterminated comment");
        pos_ = close + 1;
      } else {
        break;
      }
    }
  }

  int read_node(int parent) {
    int id = static_cast<int>(nodes_.size());
    nodes_.push_back(Node{});
    nodes_[id].parent = parent;
    skip_space();
    if (peek() == '(') {
      ++pos_;
      while (true) {
        int child = read_node(id);
        nodes_[id].children.push_back(child);
        skip_space();
        if (peek() == ',') {
          ++pos_;
          continue;
        }
        if (peek() == ')') {
          ++pos_;
          break;
        }
        fail("expected ',' or ')'");
      }
    }
    skip_space();
    std::string label = read_label();
    if (!label.empty()) nodes_[id].label = std::move(label);
    skip_space();
    if (peek() == ':') {
      ++pos_;
      skip_space();
      nodes_[id].length = read_number();
    }
    if (nodes_[id].children.empty() && !nodes_[id].label) fail("leaf without a name");
    return id;
  }

  std::string read_label() {
    std::string out;
    if (peek() == '\'') {
      ++pos_;
      auto close = text_.find('\'', pos_);
      if (close == std::string_view::npos) fail("unterminated quoted label");
      out = std::string(text_.substr(pos_, close - pos_));
      pos_ = close + 1;
      return out;
    }
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '(' || c == ')' || c == ',' || c == ':' || c == ';' || c == '[' ||
          std::isspace(static_cast<unsigned char>(c))) {
        break;
      }
      out += c;
      ++pos_;
    }
    return out;
  }

  double read_number() {
    const char* begin = text_.data() + pos_;
    const char* end = text_.data() + text_.size();
    if (begin != end && *begin == '+') ++begin;
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr == begin) fail("malformed branch length");
    pos_ = static_cast<std::size_t>(ptr - text_.data());
    return value;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::vector<Node> nodes_;
};

int leaf_label(const std::string& name, const NewickOptions& options) {
  if (auto it = options.names.find(name); it != options.names.end()) return it->second;
  int value = 0;
  auto [ptr, ec] = std::from_chars(name.data(), name.data() + name.size(), value);
  if (ec != std::errc() || ptr != name.data() + name.size() || value < 0) {
    throw InputError("newick: leaf name '" + name + "' is not a label number and has no mapping");
  }
  return value;
}

struct UEdge {
  int u;
  int v;
  double length;
  bool alive = true;
};

}  // namespace

PhyloTree parse_newick(std::string_view text, const NewickOptions& options) {
  auto nodes = NewickReader(text).read();

  // A labelled internal root carries the leaf of that name; split it out.
  if (!nodes[0].children.empty() && nodes[0].label) {
    if (!nodes[0].length) {
      throw InputError("newick: missing branch length on root leaf '" + *nodes[0].label + "'");
    }
    Node leaf;
    leaf.label = nodes[0].label;
    leaf.length = nodes[0].length;
    leaf.parent = 0;
    nodes[0].label.reset();
    nodes[0].children.push_back(static_cast<int>(nodes.size()));
    nodes.push_back(std::move(leaf));
  }

  // Undirected edges, one per non-root node.
  std::vector<UEdge> edges;
  std::vector<std::vector<int>> incident(nodes.size());
  std::vector<int> label_of(nodes.size(), -1);
  std::set<int> seen;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto& n = nodes[i];
    if (n.children.empty()) {
      int lab = leaf_label(*n.label, options);
      if (!seen.insert(lab).second) {
        throw InputError("newick: duplicate leaf label " + std::to_string(lab));
      }
      label_of[i] = lab;
    }
    if (i == 0) continue;
    if (!n.length) {
      throw InputError("newick: missing branch length above " +
                       (n.label ? "'" + *n.label + "'" : std::string("an internal node")));
    }
    int e = static_cast<int>(edges.size());
    edges.push_back({n.parent, static_cast<int>(i), *n.length});
    incident[static_cast<std::size_t>(n.parent)].push_back(e);
    incident[i].push_back(e);
  }
  if (nodes.size() == 1) throw InputError("newick: tree has a single leaf");

  if (seen.empty() || *seen.begin() != 0 || *seen.rbegin() != static_cast<int>(seen.size()) - 1) {
    throw InputError("newick: leaf labels must be exactly 0..r");
  }
  LabelSet labels(static_cast<int>(seen.size()) - 1);
  if (options.labels && *options.labels != labels) {
    throw InputError("newick: tree has labels 0.." + std::to_string(labels.max_label()) +
                     ", expected 0.." + std::to_string(options.labels->max_label()));
  }

  // Suppress degree-2 internal nodes by fusing their two edges.
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (label_of[i] >= 0) continue;
    std::vector<int> live;
    for (int e : incident[i]) {
      if (edges[static_cast<std::size_t>(e)].alive) live.push_back(e);
    }
    if (live.size() != 2) continue;
    auto& e1 = edges[static_cast<std::size_t>(live[0])];
    auto& e2 = edges[static_cast<std::size_t>(live[1])];
    int far = e2.u == static_cast<int>(i) ? e2.v : e2.u;
    if (e1.u == static_cast<int>(i)) {
      e1.u = far;
    } else {
      e1.v = far;
    }
    e1.length += e2.length;
    e2.alive = false;
    auto& far_inc = incident[static_cast<std::size_t>(far)];
    std::replace(far_inc.begin(), far_inc.end(), live[1], live[0]);
  }

  // Root at leaf 0 and read each edge's 0-free side.
  int leaf0 = static_cast<int>(std::find(label_of.begin(), label_of.end(), 0) - label_of.begin());
  std::map<Split, double> lengths;
  std::function<std::vector<int>(int, int)> below = [&](int node, int via) {
    std::vector<int> leaves;
    if (label_of[static_cast<std::size_t>(node)] >= 0 && node != leaf0) {
      leaves.push_back(label_of[static_cast<std::size_t>(node)]);
    }
    for (int e : incident[static_cast<std::size_t>(node)]) {
      const auto& edge = edges[static_cast<std::size_t>(e)];
      if (!edge.alive || e == via) continue;
      int next = edge.u == node ? edge.v : edge.u;
      auto sub = below(next, e);
      if (edge.length < 0.0 || (edge.length == 0.0 && !options.allow_zero_lengths)) {
        throw InputError("newick: non-positive branch length " + std::to_string(edge.length));
      }
      if (edge.length > 0.0) lengths.emplace(Split(labels, sub), edge.length);
      leaves.insert(leaves.end(), sub.begin(), sub.end());
    }
    return leaves;
  };
  below(leaf0, -1);

  return PhyloTree(labels, std::move(lengths));
}

namespace {

std::string format_length(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

}  // namespace

std::string serialize_newick(const PhyloTree& tree) {
  const auto& labels = tree.labels();
  const Split everything = Split::full(labels);

  // Interior clusters form a laminar family; each one's parent is the
  // smallest cluster strictly containing it.
  std::vector<Split> clusters;
  for (const auto& [split, len] : tree.edges()) {
    if (split.size() > 1 && split != everything) clusters.push_back(split);
  }
  std::sort(clusters.begin(), clusters.end(),
            [](const Split& a, const Split& b) { return a.size() < b.size(); });

  struct Item {
    int smallest;
    std::string text;
  };
  // Children of cluster i (index clusters.size() is the top level).
  std::vector<std::vector<Item>> children(clusters.size() + 1);
  auto parent_of = [&](auto pred) {
    for (std::size_t j = 0; j < clusters.size(); ++j) {
      if (pred(clusters[j])) return j;
    }
    return clusters.size();
  };
  auto edge_suffix = [&](const Split& s) {
    auto len = tree.length(s);
    return ":" + format_length(len ? *len : 0.0);
  };

  for (int leaf = 1; leaf <= labels.max_label(); ++leaf) {
    auto p = parent_of([&](const Split& c) { return c.contains(leaf); });
    Split single(labels, {leaf});
    children[p].push_back({leaf, std::to_string(leaf) + edge_suffix(single)});
  }
  for (std::size_t i = 0; i < clusters.size(); ++i) {
    auto& kids = children[i];
    std::sort(kids.begin(), kids.end(),
              [](const Item& a, const Item& b) { return a.smallest < b.smallest; });
    std::string text = "(";
    for (std::size_t k = 0; k < kids.size(); ++k) {
      if (k) text += ',';
      text += kids[k].text;
    }
    text += ")" + edge_suffix(clusters[i]);
    const auto& c = clusters[i];
    std::size_t p = clusters.size();
    for (std::size_t j = i + 1; j < clusters.size(); ++j) {
      if (clusters[j].size() > c.size() && c.is_subset_of(clusters[j])) {
        p = j;
        break;
      }
    }
    children[p].push_back({c.smallest(), std::move(text)});
  }

  auto& top = children.back();
  std::sort(top.begin(), top.end(),
            [](const Item& a, const Item& b) { return a.smallest < b.smallest; });
  std::string out = "(";
  for (std::size_t k = 0; k < top.size(); ++k) {
    if (k) out += ',';
    out += top[k].text;
  }
  out += ")0" + edge_suffix(everything) + ";";
  return out;
}

PhyloTree read_newick_file(const std::string& path, const NewickOptions& options) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_newick(buf.str(), options);
}

}  // namespace dyngeo
