#include "dyngeo/geodesic.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "dyngeo/errors.hpp"

namespace dyngeo {

namespace {

double norm_of(const std::vector<WeightedSplit>& side) {
  double s = 0.0;
  for (const auto& ws : side) s += ws.length * ws.length;
  return std::sqrt(s);
}

std::vector<WeightedSplit> squared(const std::vector<WeightedSplit>& side) {
  std::vector<WeightedSplit> out;
  out.reserve(side.size());
  for (const auto& ws : side) out.push_back({ws.split, ws.length * ws.length});
  return out;
}

std::vector<WeightedSplit> pick(const std::vector<WeightedSplit>& side,
                                const std::vector<std::size_t>& idx) {
  std::vector<WeightedSplit> out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(side[i]);
  return out;
}

void require_lambda(double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw InputError("lambda must lie in [0, 1], got " + std::to_string(lambda));
  }
}

}  // namespace

SupportPair SupportPair::make(std::vector<WeightedSplit> a, std::vector<WeightedSplit> b) {
  SupportPair p;
  p.a = std::move(a);
  p.b = std::move(b);
  p.norm_a = norm_of(p.a);
  p.norm_b = norm_of(p.b);
  return p;
}

std::vector<WeightedSplit> SupportPair::squared_a() const { return squared(a); }
std::vector<WeightedSplit> SupportPair::squared_b() const { return squared(b); }

SupportStructure structure_of(const SupportSequence& seq) {
  SupportStructure out;
  for (const auto& p : seq.pairs) {
    PairSplits ps;
    for (const auto& ws : p.a) ps.a.push_back(ws.split);
    for (const auto& ws : p.b) ps.b.push_back(ws.split);
    out.push_back(std::move(ps));
  }
  return out;
}

SupportSequence bind_supports(const SupportStructure& structure, const PhyloTree& x,
                              const PhyloTree& t) {
  SupportSequence seq;
  seq.classification = classify_edges(x, t);
  auto lookup = [](const PhyloTree& tree, const Split& s, const char* which) {
    auto len = tree.length(s);
    if (!len) throw InputError(std::string("split ") + s.to_string() + " is not an edge of " + which);
    return WeightedSplit{s, *len};
  };
  for (const auto& ps : structure) {
    std::vector<WeightedSplit> a;
    std::vector<WeightedSplit> b;
    for (const auto& s : ps.a) a.push_back(lookup(x, s, "the start tree"));
    for (const auto& s : ps.b) b.push_back(lookup(t, s, "the target tree"));
    seq.pairs.push_back(SupportPair::make(std::move(a), std::move(b)));
  }
  return seq;
}

Geodesic compute_geodesic(const PhyloTree& x, const PhyloTree& t) {
  Geodesic geo{x, t, {}, 0.0, 0, {}};
  auto& seq = geo.supports;
  seq.classification = classify_edges(x, t);
  const auto& cls = seq.classification;
  if (cls.only_x.empty() != cls.only_t.empty()) {
    throw NumericalError("edge classification left one support empty");
  }
  if (!cls.only_x.empty()) {
    std::vector<WeightedSplit> a;
    std::vector<WeightedSplit> b;
    for (const auto& s : cls.only_x) a.push_back({s, *x.length(s)});
    for (const auto& s : cls.only_t) b.push_back({s, *t.length(s)});
    seq.pairs.push_back(SupportPair::make(std::move(a), std::move(b)));
  }

  std::size_t i = 0;
  while (i < seq.pairs.size()) {
    const auto& pair = seq.pairs[i];
    auto result = check_extension(build_network(pair.squared_a(), pair.squared_b()));
    geo.augmentations += result.flow.augmentations;
    if (result.satisfied) {
      geo.pair_flows.push_back(std::move(result.flow));
      ++i;
      continue;
    }
    const auto& p = *result.partition;
    auto first = SupportPair::make(pick(pair.a, p.c1), pick(pair.b, p.d1));
    auto second = SupportPair::make(pick(pair.a, p.c2), pick(pair.b, p.d2));
    seq.pairs[i] = std::move(first);
    seq.pairs.insert(seq.pairs.begin() + static_cast<std::ptrdiff_t>(i) + 1, std::move(second));
  }
  geo.distance = certificate_length(seq);
  return geo;
}

double certificate_length(const SupportSequence& seq) {
  double total = 0.0;
  for (const auto& p : seq.pairs) {
    double term = p.norm_a + p.norm_b;
    total += term * term;
  }
  for (const auto& c : seq.classification.common) {
    double diff = c.length_x - c.length_t;
    total += diff * diff;
  }
  return std::sqrt(total);
}

double geodesic_distance(const SupportSequence& seq, const PhyloTree& x, const PhyloTree& t) {
  return certificate_length(bind_supports(structure_of(seq), x, t));
}

ValidationReport validate_supports(const SupportSequence& seq, const PhyloTree& x,
                                   const PhyloTree& t, const ValidationOptions& options) {
  ValidationReport report;
  require_same_labels(x, t);
  const auto cls = classify_edges(x, t);

  // Structure: the A's partition onlyX, the B's partition onlyT.
  auto check_cover = [&](const std::vector<Split>& expected, bool a_side, const char* name) {
    std::multiset<Split> seen;
    for (std::size_t i = 0; i < seq.pairs.size(); ++i) {
      const auto& side = a_side ? seq.pairs[i].a : seq.pairs[i].b;
      if (side.empty()) {
        report.structural.push_back(std::string("pair ") + std::to_string(i + 1) + " has an empty " +
                                    name + "-side");
      }
      for (const auto& ws : side) seen.insert(ws.split);
    }
    std::multiset<Split> want(expected.begin(), expected.end());
    if (seen != want) {
      report.structural.push_back(std::string(name) +
                                  "-sides do not partition the tree's incompatible edges");
    }
  };
  check_cover(cls.only_x, true, "A");
  check_cover(cls.only_t, false, "B");
  if (!report.structural.empty()) return report;

  const auto bound = bind_supports(structure_of(seq), x, t);
  const auto& pairs = bound.pairs;

  for (std::size_t i = 0; i < pairs.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      for (const auto& a : pairs[i].a) {
        for (const auto& b : pairs[j].b) {
          if (!splits_compatible(a.split, b.split)) report.p1.push_back({i, j, a.split, b.split});
        }
      }
    }
  }

  for (std::size_t i = 0; i + 1 < pairs.size(); ++i) {
    // ratio_i <= ratio_{i+1}, cross-multiplied.
    double lhs = pairs[i].norm_a * pairs[i + 1].norm_b;
    double rhs = pairs[i + 1].norm_a * pairs[i].norm_b;
    if (lhs - rhs > options.p2_relative_tolerance * std::max(lhs, rhs)) {
      report.p2.push_back({i});
    }
  }

  for (std::size_t i = 0; i < pairs.size(); ++i) {
    try {
      auto result = check_extension(build_network(pairs[i].squared_a(), pairs[i].squared_b()),
                                    options.p3_epsilon);
      if (!result.satisfied) report.p3.push_back({i, *result.partition});
    } catch (const std::invalid_argument& e) {
      report.structural.push_back("pair " + std::to_string(i + 1) + ": " + e.what());
    }
  }
  return report;
}

std::size_t leg_of(const Geodesic& geo, double lambda) {
  require_lambda(lambda);
  std::size_t leg = 0;
  for (const auto& p : geo.supports.pairs) {
    // ratio_i < lambda / (1 - lambda)
    if (p.norm_a * (1.0 - lambda) < lambda * p.norm_b) ++leg;
  }
  return leg;
}

PhyloTree eval_point(const Geodesic& geo, double lambda) {
  const auto leg = leg_of(geo, lambda);
  std::map<Split, double> lengths;
  const auto& pairs = geo.supports.pairs;
  for (std::size_t j = 0; j < pairs.size(); ++j) {
    const auto& p = pairs[j];
    if (j < leg) {
      double factor = (lambda * p.norm_b - (1.0 - lambda) * p.norm_a) / p.norm_b;
      for (const auto& ws : p.b) {
        double len = factor * ws.length;
        if (len > 0.0) lengths.emplace(ws.split, len);
      }
    } else {
      double factor = ((1.0 - lambda) * p.norm_a - lambda * p.norm_b) / p.norm_a;
      for (const auto& ws : p.a) {
        double len = factor * ws.length;
        if (len > 0.0) lengths.emplace(ws.split, len);
      }
    }
  }
  for (const auto& c : geo.supports.classification.common) {
    double len = (1.0 - lambda) * c.length_x + lambda * c.length_t;
    if (len > 0.0) lengths.emplace(c.split, len);
  }
  return PhyloTree(geo.x.labels(), std::move(lengths));
}

}  // namespace dyngeo
