#include "generators.hpp"

#include <random>

namespace gen {

double uniform(dyngeo::Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

oracle::Bipartite random_bipartite(dyngeo::Rng& rng, std::size_t max_side) {
  std::uniform_int_distribution<std::size_t> side(1, max_side);
  oracle::Bipartite g;
  g.a.resize(side(rng));
  g.b.resize(side(rng));
  const double density = uniform(rng, 0.15, 0.9);
  std::vector<std::vector<bool>> has(g.a.size(), std::vector<bool>(g.b.size(), false));
  for (std::size_t i = 0; i < g.a.size(); ++i) {
    for (std::size_t j = 0; j < g.b.size(); ++j) has[i][j] = uniform(rng, 0.0, 1.0) < density;
  }
  for (std::size_t i = 0; i < g.a.size(); ++i) {
    bool any = false;
    for (std::size_t j = 0; j < g.b.size(); ++j) any = any || has[i][j];
    if (!any) has[i][std::uniform_int_distribution<std::size_t>(0, g.b.size() - 1)(rng)] = true;
  }
  for (std::size_t j = 0; j < g.b.size(); ++j) {
    bool any = false;
    for (std::size_t i = 0; i < g.a.size(); ++i) any = any || has[i][j];
    if (!any) has[std::uniform_int_distribution<std::size_t>(0, g.a.size() - 1)(rng)][j] = true;
  }
  for (std::size_t i = 0; i < g.a.size(); ++i) {
    for (std::size_t j = 0; j < g.b.size(); ++j) {
      if (has[i][j]) g.arcs.emplace_back(i, j);
    }
  }
  auto fill = [&](std::vector<double>& w) {
    double total = 0.0;
    for (double& x : w) total += (x = uniform(rng, 0.05, 1.0));
    for (double& x : w) x /= total;
  };
  fill(g.a);
  fill(g.b);
  return g;
}

dyngeo::IncompatibilityNetwork to_network(const oracle::Bipartite& g) {
  std::vector<dyngeo::Arc> arcs;
  for (const auto& [a, b] : g.arcs) arcs.push_back({a, b});
  return dyngeo::IncompatibilityNetwork(g.a, g.b, std::move(arcs));
}

dyngeo::PhyloTree tree(int r, dyngeo::Rng& rng, dyngeo::LengthRange range) {
  return dyngeo::random_tree(dyngeo::LabelSet(r), rng, range);
}

dyngeo::Segment segment(int r, dyngeo::Rng& rng, dyngeo::LengthRange end_range) {
  auto x0 = tree(r, rng);
  auto x1 = dyngeo::redraw_lengths(x0, rng, end_range);
  auto t = tree(r, rng);
  return dyngeo::Segment(std::move(x0), std::move(x1), std::move(t));
}

}  // namespace gen
