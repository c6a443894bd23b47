#include "dyngeo/dynamic.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <numeric>
#include <tuple>

#include "dyngeo/errors.hpp"

namespace dyngeo {

// ---- Segment ---------------------------------------------------------------

Segment::Segment(PhyloTree x0, PhyloTree x1, PhyloTree t)
    : x0_(std::move(x0)),
      x1_(std::move(x1)),
      t_(std::move(t)),
      sq0_(square_coords(x0_)),
      sq1_(square_coords(x1_)) {
  require_same_labels(x0_, x1_);
  require_same_labels(x0_, t_);
  if (!x0_.same_topology(x1_)) throw InputError("segment must stay in one orthant");
}

double Segment::squared_start(const Split& s) const {
  auto it = sq0_.coords().find(s);
  if (it == sq0_.coords().end()) throw InputError("split " + s.to_string() + " not on the segment");
  return it->second;
}

double Segment::squared_end(const Split& s) const {
  auto it = sq1_.coords().find(s);
  if (it == sq1_.coords().end()) throw InputError("split " + s.to_string() + " not on the segment");
  return it->second;
}

PhyloTree Segment::point(double lambda) const {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw InputError("lambda must lie in [0, 1], got " + std::to_string(lambda));
  }
  std::map<Split, double> coords;
  for (const auto& [split, c0] : sq0_.coords()) {
    coords.emplace(split, c0 + lambda * (sq1_.coords().at(split) - c0));
  }
  return unsquare_coords(SquaredTree(x0_.labels(), std::move(coords)));
}

// ---- (P2) ------------------------------------------------------------------

namespace {

double target_square_sum(const std::vector<Split>& side, const PhyloTree& t) {
  double s = 0.0;
  for (const auto& split : side) {
    double len = *t.length(split);
    s += len * len;
  }
  return s;
}

}  // namespace

P2Coefficients p2_coefficients(const SupportStructure& seq, std::size_t l, const Segment& seg) {
  if (l + 1 >= seq.size()) {
    throw InputError("pair index " + std::to_string(l) + " has no successor (k = " +
                     std::to_string(seq.size()) + ")");
  }
  const double beta_l = target_square_sum(seq[l].b, seg.t());
  const double beta_next = target_square_sum(seq[l + 1].b, seg.t());
  double drift_l = 0.0;
  double drift_next = 0.0;
  double start_l = 0.0;
  double start_next = 0.0;
  for (const auto& s : seq[l].a) {
    drift_l += seg.drift(s);
    start_l += seg.squared_start(s);
  }
  for (const auto& s : seq[l + 1].a) {
    drift_next += seg.drift(s);
    start_next += seg.squared_start(s);
  }
  return {beta_l * drift_next - beta_next * drift_l, beta_l * start_next - beta_next * start_l};
}

std::optional<P2Event> next_p2_event(const SupportStructure& seq, const Segment& seg,
                                     double current) {
  std::optional<P2Event> best;
  for (std::size_t l = 0; l + 1 < seq.size(); ++l) {
    auto c = p2_coefficients(seq, l, seg);
    if (!(c.a < 0.0)) continue;
    double root = -c.b / c.a;
    if (root <= current || root > 1.0) continue;
    if (!best || root < best->lambda) best = P2Event{l, c, root};
  }
  return best;
}

SupportSequence merge_pairs(const SupportSequence& seq, std::size_t l, double ratio_tolerance) {
  if (l + 1 >= seq.pairs.size()) {
    throw InputError("cannot merge pair " + std::to_string(l) + " with a successor (k = " +
                     std::to_string(seq.pairs.size()) + ")");
  }
  const auto& p = seq.pairs[l];
  const auto& q = seq.pairs[l + 1];
  double lhs = p.norm_a * q.norm_b;
  double rhs = q.norm_a * p.norm_b;
  if (std::abs(lhs - rhs) > ratio_tolerance * std::max(lhs, rhs)) {
    throw InputError("pairs " + std::to_string(l) + " and " + std::to_string(l + 1) +
                     " have unequal ratios");
  }
  auto a = p.a;
  a.insert(a.end(), q.a.begin(), q.a.end());
  auto b = p.b;
  b.insert(b.end(), q.b.begin(), q.b.end());
  SupportSequence out;
  out.classification = seq.classification;
  out.pairs = seq.pairs;
  out.pairs[l] = SupportPair::make(std::move(a), std::move(b));
  out.pairs.erase(out.pairs.begin() + static_cast<std::ptrdiff_t>(l) + 1);
  return out;
}

// ---- rescaling ---------------------------------------------------------------

double rescale_lambda(const RescaleMap& map, double scaled) {
  const double c0 = (1.0 - scaled) / map.sum0;
  const double c1 = scaled / map.sum1;
  return c1 / (c0 + c1);
}

double scale_lambda(const RescaleMap& map, double lambda) {
  const double up = lambda * map.sum1;
  return up / (up + (1.0 - lambda) * map.sum0);
}

ScaledDrift scaled_drift(const PairSplits& pair, const Segment& seg) {
  ScaledDrift out;
  double sum0 = 0.0;
  double sum1 = 0.0;
  for (const auto& s : pair.a) {
    sum0 += seg.squared_start(s);
    sum1 += seg.squared_end(s);
  }
  out.map = {sum0, sum1};
  for (const auto& s : pair.a) {
    out.start_weights.push_back(seg.squared_start(s) / sum0);
    out.end_weights.push_back(seg.squared_end(s) / sum1);
    out.drift.push_back(out.end_weights.back() - out.start_weights.back());
  }
  return out;
}

// ---- ParametricFlow ------------------------------------------------------------

ParametricFlow::ParametricFlow(IncompatibilityNetwork start_network, std::vector<double> drift,
                               double start, FlowState flow, SweepTolerances tolerances,
                               double end)
    : net_(std::move(start_network)),
      drift_(std::move(drift)),
      start_(start),
      current_(start),
      end_(end),
      tol_(tolerances),
      z_(std::move(flow.middle)) {
  if (drift_.size() != net_.a_count()) throw std::invalid_argument("drift size mismatch");
  if (z_.size() != net_.arcs().size()) throw std::invalid_argument("flow size mismatch");
  rate_.assign(z_.size(), 0.0);
  routed_supply_.assign(net_.a_count(), 0.0);
  routed_demand_.assign(net_.a_count(), 0.0);
  for (double& z : z_) z = std::max(z, 0.0);
  record();
  if (flow.value < 1.0 - kExtensionEpsilon) {
    // Not saturating: the pair already violates (P3) here.
    FlowState f = flow;
    f.middle = z_;
    saturated_start_ = P3Boundary{start_, min_cover(net_, f)};
  }
}

double ParametricFlow::a_weight_at(std::size_t a, double scaled) const {
  return net_.a_weight(a) + (scaled - start_) * drift_[a];
}

IncompatibilityNetwork ParametricFlow::network_at(double scaled) const {
  std::vector<double> w(net_.a_count());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::max(0.0, a_weight_at(i, scaled));
  double total = std::accumulate(w.begin(), w.end(), 0.0);
  for (double& x : w) x /= total;
  return net_.with_a_weights(std::move(w));
}

void ParametricFlow::record() {
  if (!trajectory_.empty() && trajectory_.back().first == current_) {
    trajectory_.back().second = z_;
  } else {
    trajectory_.emplace_back(current_, z_);
  }
}

FlowState ParametricFlow::flow_at(double scaled) const {
  std::vector<double> z;
  if (scaled <= trajectory_.front().first) {
    z = trajectory_.front().second;
  } else if (scaled >= trajectory_.back().first) {
    z = trajectory_.back().second;
  } else {
    auto hi = std::upper_bound(trajectory_.begin(), trajectory_.end(), scaled,
                               [](double s, const auto& point) { return s < point.first; });
    auto lo = std::prev(hi);
    double t = (scaled - lo->first) / (hi->first - lo->first);
    z.resize(lo->second.size());
    for (std::size_t k = 0; k < z.size(); ++k) {
      z[k] = lo->second[k] + t * (hi->second[k] - lo->second[k]);
    }
  }
  FlowState f;
  f.middle = std::move(z);
  f.source.assign(net_.a_count(), 0.0);
  f.sink.assign(net_.b_count(), 0.0);
  for (std::size_t k = 0; k < f.middle.size(); ++k) {
    f.source[net_.arcs()[k].a] += f.middle[k];
    f.sink[net_.arcs()[k].b] += f.middle[k];
  }
  f.value = std::accumulate(f.source.begin(), f.source.end(), 0.0);
  return f;
}

namespace {

double total_supply(const std::vector<double>& drift) {
  double s = 0.0;
  for (double d : drift) s += std::max(d, 0.0);
  return s;
}

}  // namespace

BalanceResult ParametricFlow::balance_paths() {
  const auto na = net_.a_count();
  const auto nb = net_.b_count();
  const double supply_total = total_supply(drift_);
  const double tiny = 1e-14 * supply_total;
  const double feasibility = 1e-12 * supply_total;

  // Paths that step backward across a bottleneck arc are no longer valid.
  std::vector<AugmentingPath> kept;
  for (auto& path : paths_) {
    bool broken = false;
    for (std::size_t s = 0; s < path.arcs.size(); ++s) {
      if (path.nodes[s] >= na && frozen(path.arcs[s])) broken = true;
    }
    if (!broken) {
      kept.push_back(std::move(path));
      continue;
    }
    for (std::size_t s = 0; s < path.arcs.size(); ++s) {
      rate_[path.arcs[s]] += path.nodes[s] < na ? -path.rate : path.rate;
    }
    routed_supply_[path.supply] -= path.rate;
    routed_demand_[path.nodes.back()] -= path.rate;
  }
  paths_ = std::move(kept);

  auto supply_need = [&](std::size_t a) {
    return drift_[a] > 0.0 ? drift_[a] - routed_supply_[a] : 0.0;
  };
  auto demand_need = [&](std::size_t a) {
    return drift_[a] < 0.0 ? -drift_[a] - routed_demand_[a] : 0.0;
  };

  BalanceResult result;
  std::vector<int> parent(na + nb);
  std::vector<bool> reached(na + nb);
  while (true) {
    std::fill(parent.begin(), parent.end(), -1);
    std::fill(reached.begin(), reached.end(), false);
    std::deque<std::size_t> queue;
    for (std::size_t a = 0; a < na; ++a) {
      if (supply_need(a) > tiny) {
        reached[a] = true;
        queue.push_back(a);
      }
    }
    std::optional<std::size_t> target;
    while (!queue.empty() && !target) {
      auto u = queue.front();
      queue.pop_front();
      if (u < na) {
        for (auto k : net_.arcs_of_a(u)) {
          auto v = na + net_.arcs()[k].b;
          if (reached[v]) continue;
          reached[v] = true;
          parent[v] = static_cast<int>(k);
          queue.push_back(v);
        }
      } else {
        for (auto k : net_.arcs_of_b(u - na)) {
          auto v = net_.arcs()[k].a;
          if (reached[v] || (frozen(k) && rate_[k] <= tiny)) continue;
          reached[v] = true;
          parent[v] = static_cast<int>(k);
          if (demand_need(v) > tiny) {
            target = v;
            break;
          }
          queue.push_back(v);
        }
      }
    }
    if (!target) break;

    // Trace back to the supply node, collecting the bottleneck.
    std::vector<std::size_t> nodes{*target};
    std::vector<std::size_t> arcs;
    double amount = demand_need(*target);
    for (std::size_t v = *target; parent[v] >= 0;) {
      auto k = static_cast<std::size_t>(parent[v]);
      arcs.push_back(k);
      if (v < na) {
        if (frozen(k)) amount = std::min(amount, rate_[k]);
        v = na + net_.arcs()[k].b;
      } else {
        v = net_.arcs()[k].a;
      }
      nodes.push_back(v);
    }
    std::reverse(nodes.begin(), nodes.end());
    std::reverse(arcs.begin(), arcs.end());
    amount = std::min(amount, supply_need(nodes.front()));
    for (std::size_t s = 0; s < arcs.size(); ++s) {
      rate_[arcs[s]] += nodes[s] < na ? amount : -amount;
    }
    routed_supply_[nodes.front()] += amount;
    routed_demand_[nodes.back()] += amount;
    ++augmentations_;
  }

  double unmet = 0.0;
  for (std::size_t a = 0; a < na; ++a) {
    double need = supply_need(a);
    if (need > tiny) {
      unmet += need;
      result.pathless.push_back(a);
    }
  }
  result.feasible = unmet <= feasibility;
  if (!result.feasible) {
    result.reachable_a.assign(reached.begin(), reached.begin() + static_cast<std::ptrdiff_t>(na));
    result.reachable_b.assign(reached.begin() + static_cast<std::ptrdiff_t>(na), reached.end());
  } else {
    result.pathless.clear();
  }
  decompose();
  return result;
}

void ParametricFlow::decompose() {
  const auto na = net_.a_count();
  const double tiny = 1e-15 * std::max(total_supply(drift_), 1e-300);
  auto rem = rate_;
  auto sup = routed_supply_;
  auto dem = routed_demand_;
  std::vector<AugmentingPath> paths;

  // Next hop along positive remaining rate, or none.
  auto next_hop = [&](std::size_t u) -> std::optional<std::pair<std::size_t, std::size_t>> {
    if (u < na) {
      for (auto k : net_.arcs_of_a(u)) {
        if (rem[k] > tiny) return std::pair{k, na + net_.arcs()[k].b};
      }
    } else {
      for (auto k : net_.arcs_of_b(u - na)) {
        if (rem[k] < -tiny) return std::pair{k, net_.arcs()[k].a};
      }
    }
    return std::nullopt;
  };
  auto arc_amount = [&](std::size_t from, std::size_t k) { return from < na ? rem[k] : -rem[k]; };
  auto consume = [&](std::size_t from, std::size_t k, double amount, bool exact) {
    if (exact) {
      rem[k] = 0.0;
    } else {
      rem[k] += from < na ? -amount : amount;
    }
  };

  for (std::size_t a = 0; a < na; ++a) {
    while (sup[a] > tiny) {
      std::vector<std::size_t> nodes{a};
      std::vector<std::size_t> arcs;
      bool dead_end = false;
      while (!(nodes.back() < na && nodes.back() != a && dem[nodes.back()] > tiny)) {
        auto hop = next_hop(nodes.back());
        if (!hop) {
          dead_end = true;
          break;
        }
        auto [k, v] = *hop;
        auto seen = std::find(nodes.begin(), nodes.end(), v);
        if (seen == nodes.end()) {
          nodes.push_back(v);
          arcs.push_back(k);
          continue;
        }
        // Cancel the circulation closed by this hop.
        auto pos = static_cast<std::size_t>(seen - nodes.begin());
        std::vector<std::pair<std::size_t, std::size_t>> cycle;
        for (std::size_t s = pos; s < arcs.size(); ++s) cycle.emplace_back(nodes[s], arcs[s]);
        cycle.emplace_back(nodes.back(), k);
        std::size_t arg = 0;
        for (std::size_t c = 1; c < cycle.size(); ++c) {
          if (arc_amount(cycle[c].first, cycle[c].second) <
              arc_amount(cycle[arg].first, cycle[arg].second)) {
            arg = c;
          }
        }
        double amount = arc_amount(cycle[arg].first, cycle[arg].second);
        for (std::size_t c = 0; c < cycle.size(); ++c) {
          consume(cycle[c].first, cycle[c].second, amount, c == arg);
        }
        nodes.resize(pos + 1);
        arcs.resize(pos);
      }
      if (dead_end) {
        sup[a] = 0.0;
        break;
      }
      double amount = std::min(sup[a], dem[nodes.back()]);
      for (std::size_t s = 0; s < arcs.size(); ++s) {
        amount = std::min(amount, arc_amount(nodes[s], arcs[s]));
      }
      for (std::size_t s = 0; s < arcs.size(); ++s) {
        consume(nodes[s], arcs[s], amount, arc_amount(nodes[s], arcs[s]) == amount);
      }
      sup[a] = sup[a] == amount ? 0.0 : sup[a] - amount;
      dem[nodes.back()] = dem[nodes.back()] == amount ? 0.0 : dem[nodes.back()] - amount;
      paths.push_back({a, std::move(nodes), std::move(arcs), amount});
    }
  }

  // The decomposition is the routing from here on.
  std::fill(rate_.begin(), rate_.end(), 0.0);
  std::fill(routed_supply_.begin(), routed_supply_.end(), 0.0);
  std::fill(routed_demand_.begin(), routed_demand_.end(), 0.0);
  for (const auto& p : paths) {
    for (std::size_t s = 0; s < p.arcs.size(); ++s) {
      rate_[p.arcs[s]] += p.nodes[s] < na ? p.rate : -p.rate;
    }
    routed_supply_[p.supply] += p.rate;
    routed_demand_[p.nodes.back()] += p.rate;
  }
  paths_ = std::move(paths);
}

CoverCertificate ParametricFlow::cover_from(const BalanceResult& bal) const {
  CoverCertificate cover;
  for (std::size_t a = 0; a < net_.a_count(); ++a) {
    if (!bal.reachable_a[a]) {
      cover.c1.push_back(a);
      cover.weight += a_weight_at(a, current_);
    }
  }
  for (std::size_t b = 0; b < net_.b_count(); ++b) {
    if (bal.reachable_b[b]) {
      cover.d2.push_back(b);
      cover.weight += net_.b_weight(b);
    }
  }
  return cover;
}

P3Outcome ParametricFlow::p3_next_event() {
  if (saturated_start_) return *saturated_start_;
  const std::size_t cap = 4 * (z_.size() + 1) * (z_.size() + 1) + 64;
  while (true) {
    auto bal = balance_paths();
    if (!bal.feasible) return P3Boundary{current_, cover_from(bal)};

    double step = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < z_.size(); ++k) {
      if (rate_[k] < 0.0) step = std::min(step, z_[k] / -rate_[k]);
    }
    if (!(current_ + step < end_)) {
      const double last = end_ - current_;
      for (std::size_t k = 0; k < z_.size(); ++k) z_[k] = std::max(0.0, z_[k] + last * rate_[k]);
      current_ = end_;
      record();
      return P3ReachedEnd{};
    }
    for (std::size_t k = 0; k < z_.size(); ++k) {
      z_[k] += step * rate_[k];
      if (rate_[k] < 0.0 && z_[k] <= tol_.residual_zero) z_[k] = 0.0;
      if (z_[k] < 0.0) {
        if (z_[k] < -tol_.residual_zero) {
          throw NumericalError("negative residual " + std::to_string(z_[k]) +
                               " while tracking a (P3) boundary");
        }
        z_[k] = 0.0;
      }
    }
    current_ += step;
    record();
    if (++iterations_ > cap) {
      throw NumericalError("(P3) tracking did not terminate within " + std::to_string(cap) +
                           " bottleneck steps");
    }
  }
}

// ---- split -------------------------------------------------------------------

SupportStructure split_pair(const SupportStructure& seq, std::size_t l,
                            const CoverCertificate& cover) {
  if (l >= seq.size()) throw InputError("pair index out of range");
  const auto& pair = seq[l];
  PairSplits first;
  PairSplits second;
  std::vector<bool> in_c1(pair.a.size(), false);
  std::vector<bool> in_d2(pair.b.size(), false);
  for (auto i : cover.c1) in_c1.at(i) = true;
  for (auto j : cover.d2) in_d2.at(j) = true;
  for (std::size_t i = 0; i < pair.a.size(); ++i) (in_c1[i] ? first.a : second.a).push_back(pair.a[i]);
  for (std::size_t j = 0; j < pair.b.size(); ++j) (in_d2[j] ? second.b : first.b).push_back(pair.b[j]);
  if (first.a.empty() || first.b.empty() || second.a.empty() || second.b.empty()) {
    throw NumericalError("degenerate split of pair " + std::to_string(l) +
                         ": a part would be empty");
  }
  for (const auto& a : second.a) {
    for (const auto& b : first.b) {
      if (!splits_compatible(a, b)) {
        throw NumericalError("split of pair " + std::to_string(l) + " breaks (P1): " +
                             a.to_string() + " crosses " + b.to_string());
      }
    }
  }
  SupportStructure out = seq;
  out[l] = std::move(first);
  out.insert(out.begin() + static_cast<std::ptrdiff_t>(l) + 1, std::move(second));
  return out;
}

const char* to_string(EventKind kind) {
  return kind == EventKind::P2Merge ? "P2Merge" : "P3Split";
}

// ---- SweepResult ---------------------------------------------------------------

const SupportStructure& SweepResult::structure_at(double lambda) const {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw InputError("lambda must lie in [0, 1], got " + std::to_string(lambda));
  }
  auto it = std::upper_bound(intervals_.begin(), intervals_.end(), lambda,
                             [](double x, const CertificateInterval& iv) { return x < iv.begin; });
  return std::prev(it)->supports;
}

SupportSequence SweepResult::supports_at(double lambda) const {
  return bind_supports(structure_at(lambda), segment_.point(lambda), segment_.t());
}

double SweepResult::distance_at(double lambda) const {
  return certificate_length(supports_at(lambda));
}

// ---- sweep ---------------------------------------------------------------------

namespace {

using WarmArcs = std::vector<std::tuple<std::size_t, std::size_t, double>>;

struct LivePair {
  PairSplits splits;
  ScaledDrift scaled;
  std::optional<ParametricFlow> tracker;
  std::optional<P3Boundary> boundary;
  double boundary_lambda = std::numeric_limits<double>::infinity();
};

class SweepEngine {
 public:
  SweepEngine(const Segment& seg, const SweepOptions& options, SweepResult& result,
              SweepStats& stats, std::vector<SweepEvent>& events,
              std::vector<CertificateInterval>& intervals)
      : seg_(seg), opt_(options), result_(result), stats_(stats), events_(events),
        intervals_(intervals) {}

  void run() {
    const auto& geo = result_.initial();
    stats_.augmentations += geo.augmentations;
    for (std::size_t i = 0; i < geo.supports.pairs.size(); ++i) {
      PairSplits ps;
      for (const auto& ws : geo.supports.pairs[i].a) ps.a.push_back(ws.split);
      for (const auto& ws : geo.supports.pairs[i].b) ps.b.push_back(ws.split);
      WarmArcs warm;
      const auto net = build_network(geo.supports.pairs[i].squared_a(),
                                     geo.supports.pairs[i].squared_b());
      for (std::size_t k = 0; k < net.arcs().size(); ++k) {
        warm.emplace_back(net.arcs()[k].a, net.arcs()[k].b, geo.pair_flows[i].middle[k]);
      }
      pairs_.push_back(make_pair(std::move(ps), warm));
    }

    const std::size_t k0 = std::max<std::size_t>(1, pairs_.size());
    const std::size_t cap =
        opt_.event_cap.value_or(10 * k0 * static_cast<std::size_t>(seg_.t().labels().max_label()));
    const double eps = opt_.tolerances.event_dedup;

    intervals_.push_back({0.0, 1.0, structure()});
    double group_lambda = -1.0;
    std::vector<SupportStructure> seen_here;

    while (true) {
      struct Candidate {
        double lambda;
        EventKind kind;
        std::size_t index;
      };
      std::vector<Candidate> candidates;
      const auto current = structure();
      for (std::size_t l = 0; l + 1 < pairs_.size(); ++l) {
        auto c = p2_coefficients(current, l, seg_);
        if (!(c.a < 0.0)) continue;
        double root = -c.b / c.a;
        if (root <= lambda_ + eps) root = lambda_;
        if (root <= 1.0) candidates.push_back({root, EventKind::P2Merge, l});
      }
      for (std::size_t p = 0; p < pairs_.size(); ++p) {
        if (pairs_[p].boundary_lambda <= 1.0) {
          candidates.push_back({std::max(lambda_, pairs_[p].boundary_lambda), EventKind::P3Split, p});
        }
      }
      if (candidates.empty()) break;

      double earliest = candidates.front().lambda;
      for (const auto& c : candidates) earliest = std::min(earliest, c.lambda);
      const Candidate* chosen = nullptr;
      for (const auto& c : candidates) {
        if (c.kind == EventKind::P2Merge && c.lambda <= earliest + eps) {
          chosen = &c;
          break;
        }
      }
      if (!chosen) {
        for (const auto& c : candidates) {
          if (!chosen || c.lambda < chosen->lambda) chosen = &c;
        }
      }

      if (events_.size() >= cap) {
        throw NumericalError("sweep exceeded " + std::to_string(cap) +
                             " events; cycling or numerical breakdown");
      }
      const double at = std::max(lambda_, chosen->lambda);
      if (std::abs(at - group_lambda) > eps) {
        group_lambda = at;
        seen_here.assign(1, current);
      }
      lambda_ = at;
      if (chosen->kind == EventKind::P2Merge) {
        apply_merge(chosen->index);
      } else {
        apply_split(chosen->index);
      }
      auto after = structure();
      if (std::find(seen_here.begin(), seen_here.end(), after) != seen_here.end()) {
        throw NumericalError("sweep revisited a certificate at lambda = " + std::to_string(at));
      }
      seen_here.push_back(after);
      intervals_.back().end = lambda_;
      intervals_.push_back({lambda_, 1.0, std::move(after)});
    }
  }

 private:
  SupportStructure structure() const {
    SupportStructure s;
    for (const auto& p : pairs_) s.push_back(p.splits);
    return s;
  }

  double distance_now() const {
    return certificate_length(bind_supports(structure(), seg_.point(lambda_), seg_.t()));
  }

  LivePair make_pair(PairSplits splits, const WarmArcs& warm) {
    LivePair lp;
    lp.scaled = scaled_drift(splits, seg_);
    const double s0 = scale_lambda(lp.scaled.map, lambda_);

    std::vector<double> aw(splits.a.size());
    for (std::size_t i = 0; i < aw.size(); ++i) {
      aw[i] = std::max(0.0, lp.scaled.start_weights[i] + s0 * lp.scaled.drift[i]);
    }
    const double atotal = std::accumulate(aw.begin(), aw.end(), 0.0);
    for (double& w : aw) w /= atotal;
    std::vector<double> bw;
    for (const auto& s : splits.b) bw.push_back(*seg_.t().length(s) * *seg_.t().length(s));
    const double btotal = std::accumulate(bw.begin(), bw.end(), 0.0);
    for (double& w : bw) w /= btotal;
    std::vector<Arc> arcs;
    for (std::size_t i = 0; i < splits.a.size(); ++i) {
      for (std::size_t j = 0; j < splits.b.size(); ++j) {
        if (!splits_compatible(splits.a[i], splits.b[j])) arcs.push_back({i, j});
      }
    }
    IncompatibilityNetwork net(std::move(aw), std::move(bw), std::move(arcs));

    std::optional<FlowState> start_flow;
    if (!warm.empty()) {
      std::map<std::pair<std::size_t, std::size_t>, std::size_t> index;
      for (std::size_t k = 0; k < net.arcs().size(); ++k) {
        index[{net.arcs()[k].a, net.arcs()[k].b}] = k;
      }
      FlowState f;
      f.middle.assign(net.arcs().size(), 0.0);
      f.source.assign(net.a_count(), 0.0);
      f.sink.assign(net.b_count(), 0.0);
      for (const auto& [a, b, z] : warm) {
        auto it = index.find({a, b});
        if (it != index.end()) f.middle[it->second] += z;
      }
      for (std::size_t k = 0; k < f.middle.size(); ++k) {
        f.source[net.arcs()[k].a] += f.middle[k];
        f.sink[net.arcs()[k].b] += f.middle[k];
      }
      f.value = std::accumulate(f.source.begin(), f.source.end(), 0.0);
      start_flow = std::move(f);
    }
    auto flow = max_flow(net, start_flow);
    stats_.augmentations += flow.augmentations;

    lp.tracker.emplace(std::move(net), lp.scaled.drift, s0, std::move(flow), opt_.tolerances);
    auto outcome = lp.tracker->p3_next_event();
    stats_.augmentations += lp.tracker->augmentations();
    stats_.tracker_iterations += lp.tracker->iterations();
    if (auto* b = std::get_if<P3Boundary>(&outcome)) {
      lp.boundary = *b;
      lp.boundary_lambda = rescale_lambda(lp.scaled.map, b->scaled_lambda);
    }
    lp.splits = std::move(splits);
    return lp;
  }

  double b_square_sum(const std::vector<Split>& side) const {
    return target_square_sum(side, seg_.t());
  }

  void apply_merge(std::size_t l) {
    const double before = distance_now();
    auto& p = pairs_[l];
    auto& q = pairs_[l + 1];
    const auto fp = p.tracker->flow_at(scale_lambda(p.scaled.map, lambda_));
    const auto fq = q.tracker->flow_at(scale_lambda(q.scaled.map, lambda_));
    const double bp = b_square_sum(p.splits.b);
    const double bq = b_square_sum(q.splits.b);
    const double alpha = bp / (bp + bq);

    WarmArcs warm;
    const auto& np = p.tracker->start_network();
    const auto& nq = q.tracker->start_network();
    for (std::size_t k = 0; k < np.arcs().size(); ++k) {
      warm.emplace_back(np.arcs()[k].a, np.arcs()[k].b, alpha * fp.middle[k]);
    }
    for (std::size_t k = 0; k < nq.arcs().size(); ++k) {
      warm.emplace_back(nq.arcs()[k].a + p.splits.a.size(), nq.arcs()[k].b + p.splits.b.size(),
                        (1.0 - alpha) * fq.middle[k]);
    }
    PairSplits merged = p.splits;
    merged.a.insert(merged.a.end(), q.splits.a.begin(), q.splits.a.end());
    merged.b.insert(merged.b.end(), q.splits.b.begin(), q.splits.b.end());

    auto fresh = make_pair(std::move(merged), warm);
    pairs_[l] = std::move(fresh);
    pairs_.erase(pairs_.begin() + static_cast<std::ptrdiff_t>(l) + 1);

    SweepEvent ev{lambda_, EventKind::P2Merge, l, {}, {}, before, distance_now(), structure()};
    events_.push_back(std::move(ev));
  }

  void apply_split(std::size_t l) {
    const double before = distance_now();
    auto& parent = pairs_[l];
    const auto& cover = parent.boundary->cover;
    const auto& tracker = *parent.tracker;
    const double s = parent.boundary->scaled_lambda;
    const auto flow = tracker.flow_at(s);
    const auto& net = tracker.start_network();

    auto next = split_pair(structure(), l, cover);
    PairSplits first = next[l];
    PairSplits second = next[l + 1];

    std::vector<bool> in_c1(parent.splits.a.size(), false);
    std::vector<bool> in_d2(parent.splits.b.size(), false);
    for (auto i : cover.c1) in_c1[i] = true;
    for (auto j : cover.d2) in_d2[j] = true;
    std::vector<std::size_t> a_pos(parent.splits.a.size());
    std::vector<std::size_t> b_pos(parent.splits.b.size());
    double w_c1 = 0.0;
    double w_c2 = 0.0;
    for (std::size_t i = 0, n1 = 0, n2 = 0; i < a_pos.size(); ++i) {
      double w = std::max(0.0, tracker.a_weight_at(i, s));
      if (in_c1[i]) {
        a_pos[i] = n1++;
        w_c1 += w;
      } else {
        a_pos[i] = n2++;
        w_c2 += w;
      }
    }
    for (std::size_t j = 0, n1 = 0, n2 = 0; j < b_pos.size(); ++j) {
      b_pos[j] = in_d2[j] ? n2++ : n1++;
    }
    WarmArcs warm_first;
    WarmArcs warm_second;
    for (std::size_t k = 0; k < net.arcs().size(); ++k) {
      auto [a, b] = net.arcs()[k];
      if (in_c1[a] && !in_d2[b]) {
        warm_first.emplace_back(a_pos[a], b_pos[b], flow.middle[k] / w_c1);
      } else if (!in_c1[a] && in_d2[b]) {
        warm_second.emplace_back(a_pos[a], b_pos[b], flow.middle[k] / w_c2);
      }
    }
    std::vector<Split> cover_a;
    std::vector<Split> cover_b;
    for (auto i : cover.c1) cover_a.push_back(parent.splits.a[i]);
    for (auto j : cover.d2) cover_b.push_back(parent.splits.b[j]);

    auto lp_first = make_pair(std::move(first), warm_first);
    auto lp_second = make_pair(std::move(second), warm_second);
    pairs_[l] = std::move(lp_first);
    pairs_.insert(pairs_.begin() + static_cast<std::ptrdiff_t>(l) + 1, std::move(lp_second));

    SweepEvent ev{lambda_, EventKind::P3Split, l, std::move(cover_a), std::move(cover_b),
                  before, distance_now(), structure()};
    events_.push_back(std::move(ev));
  }

  const Segment& seg_;
  const SweepOptions& opt_;
  SweepResult& result_;
  SweepStats& stats_;
  std::vector<SweepEvent>& events_;
  std::vector<CertificateInterval>& intervals_;
  std::vector<LivePair> pairs_;
  double lambda_ = 0.0;
};

}  // namespace

SweepResult sweep(const Segment& segment, const SweepOptions& options) {
  SweepResult result(segment, compute_geodesic(segment.x0(), segment.t()));
  SweepEngine engine(result.segment_, options, result, result.stats_, result.events_,
                     result.intervals_);
  engine.run();
  return result;
}

}  // namespace dyngeo
