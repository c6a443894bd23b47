#include "oracles.hpp"

#include <algorithm>
#include <cstdint>
#include <cmath>
#include <functional>
#include <limits>
#include <set>
#include <stdexcept>

namespace oracle {

Bipartite from_network(const dyngeo::IncompatibilityNetwork& net) {
  Bipartite g{net.a_weights(), net.b_weights(), {}};
  for (const auto& arc : net.arcs()) g.arcs.emplace_back(arc.a, arc.b);
  return g;
}

double min_cover_weight(const Bipartite& g) {
  const std::size_t na = g.a.size();
  const std::size_t n = na + g.b.size();
  if (n > 24) throw std::invalid_argument("network too large for enumeration");
  double best = std::numeric_limits<double>::infinity();
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    bool covers = true;
    for (const auto& [a, b] : g.arcs) {
      if (!(mask >> a & 1u) && !(mask >> (na + b) & 1u)) {
        covers = false;
        break;
      }
    }
    if (!covers) continue;
    double w = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask >> i & 1u) w += i < na ? g.a[i] : g.b[i - na];
    }
    best = std::min(best, w);
  }
  return best;
}

bool is_cover(const Bipartite& g, const std::vector<std::size_t>& c1,
              const std::vector<std::size_t>& d2) {
  std::set<std::size_t> cs(c1.begin(), c1.end());
  std::set<std::size_t> ds(d2.begin(), d2.end());
  return std::all_of(g.arcs.begin(), g.arcs.end(),
                     [&](const auto& arc) { return cs.count(arc.first) || ds.count(arc.second); });
}

double extension_min_slack(const Bipartite& sq) {
  const std::size_t na = sq.a.size();
  const std::size_t nb = sq.b.size();
  double sum_a = 0.0;
  double sum_b = 0.0;
  for (double x : sq.a) sum_a += x;
  for (double x : sq.b) sum_b += x;
  double best = std::numeric_limits<double>::infinity();
  for (std::uint32_t im = 0; im < (1u << na); ++im) {
    for (std::uint32_t jm = 0; jm < (1u << nb); ++jm) {
      bool independent = true;
      for (const auto& [a, b] : sq.arcs) {
        if ((im >> a & 1u) && (jm >> b & 1u)) {
          independent = false;
          break;
        }
      }
      if (!independent) continue;
      double in_i = 0.0;
      double in_j = 0.0;
      for (std::size_t i = 0; i < na; ++i) {
        if (im >> i & 1u) in_i += sq.a[i];
      }
      for (std::size_t j = 0; j < nb; ++j) {
        if (jm >> j & 1u) in_j += sq.b[j];
      }
      double lhs = (sum_b - in_j) * (sum_a - in_i) - in_j * in_i;
      best = std::min(best, lhs / (sum_a * sum_b));
    }
  }
  return best;
}

bool is_improving_partition(const Bipartite& sq, const dyngeo::Partition& p) {
  if (p.c1.empty() || p.d1.empty() || p.c2.empty() || p.d2.empty()) return false;
  std::set<std::size_t> c2(p.c2.begin(), p.c2.end());
  std::set<std::size_t> d1(p.d1.begin(), p.d1.end());
  for (const auto& [a, b] : sq.arcs) {
    if (c2.count(a) && d1.count(b)) return false;
  }
  auto norm = [](const std::vector<double>& w, const std::vector<std::size_t>& idx) {
    double s = 0.0;
    for (auto i : idx) s += w.at(i);
    return std::sqrt(s);
  };
  return norm(sq.a, p.c1) * norm(sq.b, p.d2) < norm(sq.a, p.c2) * norm(sq.b, p.d1);
}

std::optional<double> first_cover_deficit(const Bipartite& g, const std::vector<double>& drift,
                                          double start, double end, double slack) {
  const std::size_t na = g.a.size();
  std::optional<double> best;
  // For a fixed C1 the cheapest cover adds exactly the b-neighbours of A \ C1.
  for (std::uint32_t cm = 0; cm < (1u << na); ++cm) {
    std::vector<bool> need_b(g.b.size(), false);
    for (const auto& [a, b] : g.arcs) {
      if (!(cm >> a & 1u)) need_b[b] = true;
    }
    double w0 = 0.0;
    double slope = 0.0;
    for (std::size_t i = 0; i < na; ++i) {
      if (cm >> i & 1u) {
        w0 += g.a[i];
        slope += drift[i];
      }
    }
    for (std::size_t j = 0; j < g.b.size(); ++j) {
      if (need_b[j]) w0 += g.b[j];
    }
    if (!(slope < 0.0)) continue;
    double s = start + std::max(0.0, (w0 - 1.0 + slack) / -slope);
    if (s <= end && (!best || s < *best)) best = s;
  }
  return best;
}

namespace {

// Every surjection from n items onto k blocks, as a block label per item.
void surjections(std::size_t n, std::size_t k,
                 const std::function<void(const std::vector<std::size_t>&)>& visit) {
  std::vector<std::size_t> label(n, 0);
  while (true) {
    std::vector<bool> hit(k, false);
    for (auto l : label) hit[l] = true;
    if (std::all_of(hit.begin(), hit.end(), [](bool h) { return h; })) visit(label);
    std::size_t i = 0;
    while (i < n && ++label[i] == k) label[i++] = 0;
    if (i == n) return;
  }
}

}  // namespace

double min_sequence_distance(const dyngeo::PhyloTree& x, const dyngeo::PhyloTree& t) {
  auto cls = dyngeo::classify_edges(x, t);
  double common = 0.0;
  for (const auto& c : cls.common) common += (c.length_x - c.length_t) * (c.length_x - c.length_t);
  const auto& ax = cls.only_x;
  const auto& bt = cls.only_t;
  if (ax.empty() && bt.empty()) return std::sqrt(common);
  if (ax.empty() || bt.empty()) throw std::logic_error("one-sided support");

  std::vector<double> sa;
  std::vector<double> sb;
  for (const auto& s : ax) sa.push_back(*x.length(s) * *x.length(s));
  for (const auto& s : bt) sb.push_back(*t.length(s) * *t.length(s));

  double best = std::numeric_limits<double>::infinity();
  const std::size_t kmax = std::min(ax.size(), bt.size());
  for (std::size_t k = 1; k <= kmax; ++k) {
    surjections(ax.size(), k, [&](const std::vector<std::size_t>& la) {
      surjections(bt.size(), k, [&](const std::vector<std::size_t>& lb) {
        // Later A-blocks must be compatible with earlier B-blocks.
        for (std::size_t i = 0; i < ax.size(); ++i) {
          for (std::size_t j = 0; j < bt.size(); ++j) {
            if (la[i] > lb[j] && !dyngeo::splits_compatible(ax[i], bt[j])) return;
          }
        }
        std::vector<double> na(k, 0.0);
        std::vector<double> nb(k, 0.0);
        for (std::size_t i = 0; i < ax.size(); ++i) na[la[i]] += sa[i];
        for (std::size_t j = 0; j < bt.size(); ++j) nb[lb[j]] += sb[j];
        for (std::size_t l = 0; l + 1 < k; ++l) {
          double lhs = std::sqrt(na[l]) * std::sqrt(nb[l + 1]);
          double rhs = std::sqrt(na[l + 1]) * std::sqrt(nb[l]);
          if (lhs > rhs * (1.0 + 1e-12)) return;
        }
        double total = common;
        for (std::size_t l = 0; l < k; ++l) {
          double term = std::sqrt(na[l]) + std::sqrt(nb[l]);
          total += term * term;
        }
        best = std::min(best, std::sqrt(total));
      });
    });
  }
  return best;
}

}  // namespace oracle
