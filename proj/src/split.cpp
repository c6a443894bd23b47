#include "dyngeo/split.hpp"

#include <bit>

#include "dyngeo/errors.hpp"

namespace dyngeo {

namespace {

constexpr int kWordBits = 64;

std::size_t word_count(int max_label) {
  return static_cast<std::size_t>(max_label) / kWordBits + 1;
}

}  // namespace

LabelSet::LabelSet(int max_label) : max_label_(max_label) {
  if (max_label < 2) {
    throw InputError("label set needs labels 0..r with r >= 2, got r = " +
                     std::to_string(max_label));
  }
}

Split::Split(const LabelSet& labels, std::span<const int> members)
    : max_label_(labels.max_label()), words_(word_count(labels.max_label()), 0) {
  if (members.empty()) throw InputError("split must be nonempty");
  for (int m : members) {
    if (m == 0) throw InputError("split side must not contain label 0");
    if (m < 0 || m > max_label_) {
      throw InputError("split member " + std::to_string(m) + " outside label set 0.." +
                       std::to_string(max_label_));
    }
    words_[static_cast<std::size_t>(m) / kWordBits] |= std::uint64_t{1} << (m % kWordBits);
  }
}

Split Split::full(const LabelSet& labels) {
  std::vector<int> all;
  for (int i = 1; i <= labels.max_label(); ++i) all.push_back(i);
  return Split(labels, all);
}

bool Split::contains(int label) const {
  if (label < 0 || label > max_label_) return false;
  return (words_[static_cast<std::size_t>(label) / kWordBits] >> (label % kWordBits)) & 1U;
}

std::size_t Split::size() const {
  std::size_t n = 0;
  for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
  return n;
}

int Split::smallest() const {
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if (words_[i] != 0) return static_cast<int>(i) * kWordBits + std::countr_zero(words_[i]);
  }
  return -1;
}

std::vector<int> Split::members() const {
  std::vector<int> out;
  for (int i = 1; i <= max_label_; ++i) {
    if (contains(i)) out.push_back(i);
  }
  return out;
}

bool Split::is_leaf_edge() const {
  auto n = size();
  return n == 1 || n == static_cast<std::size_t>(max_label_);
}

void Split::require_same_labels(const Split& other) const {
  if (max_label_ != other.max_label_) {
    throw InputError("splits over different label sets (r = " + std::to_string(max_label_) +
                     " vs r = " + std::to_string(other.max_label_) + ")");
  }
}

bool Split::intersects(const Split& other) const {
  require_same_labels(other);
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if (words_[i] & other.words_[i]) return true;
  }
  return false;
}

bool Split::is_subset_of(const Split& other) const {
  require_same_labels(other);
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if (words_[i] & ~other.words_[i]) return false;
  }
  return true;
}

Split Split::united(const Split& other) const {
  require_same_labels(other);
  auto words = words_;
  for (std::size_t i = 0; i < words.size(); ++i) words[i] |= other.words_[i];
  return Split(max_label_, std::move(words));
}

std::string Split::to_string() const {
  std::string out = "{";
  bool first = true;
  for (int m : members()) {
    if (!first) out += ',';
    out += std::to_string(m);
    first = false;
  }
  return out + "}";
}

bool splits_compatible(const Split& s1, const Split& s2) {
  return !s1.intersects(s2) || s1.is_subset_of(s2) || s2.is_subset_of(s1);
}

}  // namespace dyngeo
