#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace dyngeo {

// The leaf labels {0, 1, ..., r}. Label 0 is the outgroup that every split
// is measured against.
class LabelSet {
 public:
  explicit LabelSet(int max_label);

  int max_label() const noexcept { return max_label_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(max_label_) + 1; }

  auto operator<=>(const LabelSet&) const = default;

 private:
  int max_label_;
};

// A bipartition of the label set, stored as the side that does not contain
// label 0. Singletons {i} are leaf edges and the full set {1..r} is the edge
// to leaf 0.
class Split {
 public:
  Split(const LabelSet& labels, std::span<const int> members);
  Split(const LabelSet& labels, std::initializer_list<int> members)
      : Split(labels, std::span<const int>(members.begin(), members.size())) {}

  static Split full(const LabelSet& labels);

  int max_label() const noexcept { return max_label_; }
  LabelSet labels() const { return LabelSet(max_label_); }

  bool contains(int label) const;
  std::size_t size() const;
  int smallest() const;
  std::vector<int> members() const;

  // Singleton splits and the full set are the pendant edges of the tree.
  bool is_leaf_edge() const;

  bool intersects(const Split& other) const;
  bool is_subset_of(const Split& other) const;

  Split united(const Split& other) const;

  std::string to_string() const;

  auto operator<=>(const Split&) const = default;

 private:
  Split(int max_label, std::vector<std::uint64_t> words)
      : max_label_(max_label), words_(std::move(words)) {}

  void require_same_labels(const Split& other) const;

  int max_label_;
  std::vector<std::uint64_t> words_;
};

// Two splits can coexist in one tree iff their 0-free sides are disjoint or
// nested. Throws InputError when the label sets differ.
bool splits_compatible(const Split& s1, const Split& s2);

}  // namespace dyngeo
