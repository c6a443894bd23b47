// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "dyngeo/dynamic.hpp"
#include "dyngeo/json_io.hpp"
#include "dyngeo/newick.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"
#include "support/schema_check.hpp"

using namespace dyngeo;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
  std::size_t failures = 0;
  std::string first_failure;

  void fail(const std::string& why) {
    pass = false;
    if (failures++ == 0) first_failure = why;
  }
};

double rel_err(double got, double want) {
  return std::abs(got - want) / std::max(1.0, std::abs(want));
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

double elapsed_s(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---- 1 -----------------------------------------------------------------------

Outcome oracle_distance() {
  Outcome out;
  Rng rng(101);
  double worst = 0.0;
  std::size_t multi_pair = 0;
  const int n = 500;
  for (int i = 0; i < n; ++i) {
    int r = 4 + i % 2;
    auto x = gen::tree(r, rng);
    auto t = gen::tree(r, rng);
    auto cls = classify_edges(x, t);
    if (cls.only_x.size() > 4 || cls.only_t.size() > 4) {
      out.fail("generator produced more than 4 incompatible splits");
      continue;
    }
    auto geo = compute_geodesic(x, t);
    if (geo.supports.k() > 1) ++multi_pair;
    double want = oracle::min_sequence_distance(x, t);
    double err = rel_err(geo.distance, want);
    worst = std::max(worst, err);
    if (err > 1e-9) out.fail("pair " + std::to_string(i) + ": " + fmt(geo.distance) + " vs " + fmt(want));
  }
  out.detail = std::to_string(n) + " pairs, " + std::to_string(multi_pair) +
               " with k>1, max rel err " + fmt(worst);
  return out;
}

// ---- 2 -----------------------------------------------------------------------

Outcome duality() {
  Outcome out;
  Rng rng(202);
  double worst = 0.0;
  std::size_t violated = 0;
  const int n = 1000;
  for (int i = 0; i < n; ++i) {
    auto g = gen::random_bipartite(rng, 6);
    auto net = gen::to_network(g);
    auto flow = max_flow(net);
    double cover = oracle::min_cover_weight(g);
    double err = std::abs(flow.value - cover);
    worst = std::max(worst, err);
    if (err > 1e-9) out.fail("network " + std::to_string(i) + ": flow " + fmt(flow.value) + " cover " + fmt(cover));

    // The weights double as squared lengths for the extension inequalities.
    bool eq6 = oracle::extension_min_slack(g) >= -kExtensionEpsilon;
    auto ext = check_extension(net);
    if (ext.satisfied != eq6) out.fail("network " + std::to_string(i) + ": extension disagrees");
    if (!ext.satisfied) {
      ++violated;
      if (!oracle::is_improving_partition(g, *ext.partition)) {
        out.fail("network " + std::to_string(i) + ": returned partition does not improve");
      }
    }
  }
  out.detail = std::to_string(n) + " networks, " + std::to_string(violated) +
               " splittable, max |flow - cover| " + fmt(worst);
  return out;
}

// ---- 3 and 4 -----------------------------------------------------------------

struct SweepCheck {
  Outcome agree;
  Outcome tight;
  std::size_t segments = 0;
  std::size_t events = 0;
  std::size_t p2 = 0;
  std::size_t p3 = 0;
  std::size_t points = 0;
  double worst = 0.0;
  double worst_p2 = 0.0;
  double worst_p3 = 0.0;
};

double pair_flow_value(const SupportStructure& s, std::size_t l, const PhyloTree& x,
                       const PhyloTree& t) {
  auto seq = bind_supports(s, x, t);
  const auto& p = seq.pairs.at(l);
  return max_flow(build_network(p.squared_a(), p.squared_b())).value;
}

void check_point(SweepCheck& c, const SweepResult& res, double lambda, int seg_id) {
  const auto& seg = res.segment();
  auto x = seg.point(lambda);
  double maintained = res.distance_at(lambda);
  double scratch = compute_geodesic(x, seg.t()).distance;
  double err = rel_err(maintained, scratch);
  c.worst = std::max(c.worst, err);
  ++c.points;
  std::string at = "segment " + std::to_string(seg_id) + " lambda " + fmt(lambda);
  if (err > 1e-9) c.agree.fail(at + ": " + fmt(maintained) + " vs scratch " + fmt(scratch));
  auto seq = res.supports_at(lambda);
  if (!validate_supports(seq, x, seg.t()).ok()) c.agree.fail(at + ": certificate invalid");
  for (const auto& p : seq.pairs) {
    if (p.a.size() > 6 || p.b.size() > 6) continue;
    auto g = oracle::from_network(build_network(p.squared_a(), p.squared_b()));
    if (oracle::extension_min_slack(g) < -kExtensionEpsilon) {
      c.agree.fail(at + ": exhaustive extension check finds an improving partition");
    }
  }
}

void check_tightness(SweepCheck& c, const SweepResult& res, int seg_id) {
  const auto& seg = res.segment();
  SupportStructure before = structure_of(res.initial().supports);
  for (const auto& e : res.events()) {
    std::string at = "segment " + std::to_string(seg_id) + " event at " + fmt(e.lambda);
    if (e.kind == EventKind::P2Merge) {
      ++c.p2;
      auto co = p2_coefficients(before, e.pair_index, seg);
      double scale = 0.0;
      double beta_l = 0.0;
      double beta_n = 0.0;
      for (const auto& s : before[e.pair_index].b) beta_l += std::pow(*seg.t().length(s), 2);
      for (const auto& s : before[e.pair_index + 1].b) beta_n += std::pow(*seg.t().length(s), 2);
      for (const auto& s : before[e.pair_index + 1].a) scale += beta_l * seg.squared_at(s, e.lambda);
      for (const auto& s : before[e.pair_index].a) scale += beta_n * seg.squared_at(s, e.lambda);
      double resid = std::abs(co.a * e.lambda + co.b) / scale;
      c.worst_p2 = std::max(c.worst_p2, resid);
      if (resid > 1e-8) c.tight.fail(at + ": P2 residual " + fmt(resid));
    } else {
      ++c.p3;
      double at_event = pair_flow_value(before, e.pair_index, seg.point(e.lambda), seg.t());
      c.worst_p3 = std::max(c.worst_p3, std::abs(at_event - 1.0));
      if (std::abs(at_event - 1.0) > 1e-8) c.tight.fail(at + ": cover weight " + fmt(at_event));
      if (e.lambda + 1e-6 <= 1.0) {
        double past = pair_flow_value(before, e.pair_index, seg.point(e.lambda + 1e-6), seg.t());
        if (!(past < 1.0)) c.tight.fail(at + ": cover weight " + fmt(past) + " past the event");
      }
    }
    before = e.supports_after;
  }
}

SweepCheck sweeps() {
  SweepCheck c;
  Rng rng(303);
  const int n = 200;
  for (int i = 0; i < n; ++i) {
    int r = 5 + i % 4;
    LengthRange end_range = i % 2 == 0 ? LengthRange{} : LengthRange{0.05, 3.0};
    auto seg = gen::segment(r, rng, end_range);
    SweepResult res = [&] {
      try {
        return sweep(seg);
      } catch (const std::exception& e) {
        c.agree.fail("segment " + std::to_string(i) + ": " + e.what());
        throw;
      }
    }();
    ++c.segments;
    c.events += res.events().size();
    for (int g = 0; g < 100; ++g) check_point(c, res, g / 99.0, i);
    for (const auto& e : res.events()) {
      for (double d : {-1e-6, 1e-6}) {
        double l = e.lambda + d;
        if (l >= 0.0 && l <= 1.0) check_point(c, res, l, i);
      }
    }
    check_tightness(c, res, i);
  }
  return c;
}

// ---- 5 -----------------------------------------------------------------------

Outcome worked_example() {
  Outcome out;
  IncompatibilityNetwork net({0.7, 0.3}, {0.6, 0.4}, {{0, 0}, {0, 1}, {1, 1}});
  FlowState f;
  f.middle = {0.6, 0.1, 0.3};
  f.source = {0.7, 0.3};
  f.sink = {0.6, 0.4};
  f.value = 1.0;
  ParametricFlow pf(net, {-1.0, 1.0}, 0.0, f);
  auto outcome = pf.p3_next_event();
  auto* b = std::get_if<P3Boundary>(&outcome);
  if (!b) {
    out.fail("tracker reached the end without a boundary");
    return out;
  }
  if (std::abs(b->scaled_lambda - 0.1) > 1e-10) out.fail("boundary at " + fmt(b->scaled_lambda));
  if (b->cover.c1 != std::vector<std::size_t>{0} || b->cover.d2 != std::vector<std::size_t>{1}) {
    out.fail("cover is not {a1, b2}");
  }
  char buf[128];
  std::snprintf(buf, sizeof buf, "boundary %.12f, |C1|=%zu |D2|=%zu", b->scaled_lambda,
                b->cover.c1.size(), b->cover.d2.size());
  out.detail = buf;
  return out;
}

// ---- 6 -----------------------------------------------------------------------

Outcome metric() {
  Outcome out;
  Rng rng(606);
  double worst_sym = 0.0;
  double worst_tri = 0.0;
  double worst_add = 0.0;
  const int n = 200;
  for (int i = 0; i < n; ++i) {
    int r = 4 + i % 5;
    auto x = gen::tree(r, rng);
    auto y = gen::tree(r, rng);
    auto z = gen::tree(r, rng);
    std::string id = "triple " + std::to_string(i);
    if (compute_geodesic(x, x).distance != 0.0) out.fail(id + ": d(X,X) != 0");
    double dxz = compute_geodesic(x, z).distance;
    double dzx = compute_geodesic(z, x).distance;
    double dxy = compute_geodesic(x, y).distance;
    double dyz = compute_geodesic(y, z).distance;
    worst_sym = std::max(worst_sym, std::abs(dxz - dzx));
    if (std::abs(dxz - dzx) > 1e-12) out.fail(id + ": asymmetric by " + fmt(std::abs(dxz - dzx)));
    double slack = dxy + dyz - dxz;
    worst_tri = std::min(worst_tri, slack);
    if (slack < -1e-9) out.fail(id + ": triangle slack " + fmt(slack));
    auto geo = compute_geodesic(x, z);
    for (int s = 0; s < 20; ++s) {
      double lambda = gen::uniform(rng, 0.0, 1.0);
      auto p = eval_point(geo, lambda);
      double sum = compute_geodesic(x, p).distance + compute_geodesic(p, z).distance;
      double err = std::abs(sum - dxz);
      worst_add = std::max(worst_add, err);
      if (err > 1e-9) out.fail(id + ": additivity off by " + fmt(err) + " at " + fmt(lambda));
    }
  }
  out.detail = std::to_string(n) + " triples, max asymmetry " + fmt(worst_sym) +
               ", min triangle slack " + fmt(worst_tri) + ", max additivity err " + fmt(worst_add);
  return out;
}

// ---- 7 -----------------------------------------------------------------------

Outcome update_advantage() {
  Outcome out;
  cli::BenchConfig config;
  config.leaves = 50;
  config.trials = 50;
  config.seed = 707;
  config.grid = 100;
  auto rows = cli::run_bench(config);
  cli::print_bench_table(config, rows, true, std::cout);
  std::size_t wins = 0;
  for (const auto& r : rows) wins += r.sweep_augmentations <= r.scratch_augmentations;
  if (wins * 10 < rows.size() * 9) out.fail("only " + std::to_string(wins) + " trials");
  out.detail = std::to_string(wins) + "/" + std::to_string(rows.size()) +
               " trials with sweep augmentations <= scratch";
  return out;
}

// ---- 8 -----------------------------------------------------------------------

Outcome round_trip() {
  Outcome out;
  const std::string fx = DYNGEO_FIXTURES;
  const std::vector<std::string> files = {"cone_x.nwk",       "cone_t.nwk",       "nested_x.nwk",
                                          "nested_t.nwk",     "mixed.nwk",        "quoted.nwk",
                                          "rerooted.nwk",     "one_split_x0.nwk", "one_split_x1.nwk",
                                          "one_split_t.nwk"};
  for (const auto& f : files) {
    auto tree = read_newick_file(fx + "/" + f);
    auto text = serialize_newick(tree);
    auto again = parse_newick(text);
    if (again.edges() != tree.edges()) out.fail(f + ": split/length map changed");
    if (serialize_newick(again) != text) out.fail(f + ": serialization not stable");
  }

  schema::Checker checker(DYNGEO_SCHEMAS);
  auto run = [&](std::vector<std::string> args, const std::string& schema_file, int want_code) {
    std::ostringstream o;
    std::ostringstream e;
    int code = cli::run(args, o, e);
    if (code != want_code) {
      out.fail(args[args.size() > 2 ? 2 : 0] + ": exit " + std::to_string(code) + " " + e.str());
      return;
    }
    auto doc = Json::parse(o.str());
    for (const auto& err : checker.check(doc, schema_file)) out.fail(schema_file + " " + err);
  };
  const std::string tmp = std::string(DYNGEO_BINARY_DIR) + "/acceptance_geo.json";
  run({"--format", "json", "distance", fx + "/cone_x.nwk", fx + "/cone_t.nwk"}, "geodesic.schema.json", 0);
  run({"--format", "json", "distance", fx + "/mixed.nwk", fx + "/mixed.nwk"}, "geodesic.schema.json", 0);
  run({"--format", "json", "sweep", fx + "/one_split_x0.nwk", fx + "/one_split_x1.nwk",
       fx + "/one_split_t.nwk", "--samples", "7"},
      "sweep.schema.json", 0);
  run({"--format", "json", "bench", "--leaves", "6", "--trials", "3", "--seed", "5"}, "bench.schema.json", 0);
  {
    std::ostringstream o, e;
    cli::run({"--format", "json", "distance", fx + "/one_split_x0.nwk", fx + "/one_split_t.nwk",
              "--dump-networks", tmp},
             o, e);
    std::ifstream in(tmp);
    auto nets = Json::parse(in);
    if (nets.empty()) out.fail("network dump is empty");
    for (const auto& n : nets) {
      for (const auto& err : checker.check(n, "network.schema.json")) out.fail("network " + err);
    }
    std::ofstream(tmp) << o.str();
  }
  run({"--format", "json", "validate", fx + "/one_split_x0.nwk", fx + "/one_split_t.nwk",
       "--certificate", tmp},
      "validation.schema.json", 0);
  out.detail = std::to_string(files.size()) + " fixtures round-tripped; 6 JSON documents checked";
  return out;
}

}  // namespace

int main() {
  bool all = true;
  auto report = [&](int id, const char* name, const Outcome& o, double seconds, double limit) {
    bool pass = o.pass && (limit <= 0.0 || seconds <= limit);
    all = all && pass;
    std::cout << "criterion " << id << " [" << name << "]: " << (pass ? "PASS" : "FAIL") << " - "
              << o.detail << " (" << fmt(seconds) << " s";
    if (limit > 0.0) std::cout << ", limit " << limit << " s";
    std::cout << ")";
    if (!o.pass) std::cout << "; " << o.failures << " failures, first: " << o.first_failure;
    std::cout << std::endl;
  };
  auto timed = [](auto&& fn) {
    auto t0 = std::chrono::steady_clock::now();
    auto result = fn();
    return std::pair{result, elapsed_s(t0)};
  };

  auto [c1, t1] = timed(oracle_distance);
  report(1, "oracle distance", c1, t1, 60.0);
  auto [c2, t2] = timed(duality);
  report(2, "duality and extension oracle", c2, t2, 30.0);

  SweepCheck sc;
  double t3 = 0.0;
  try {
    auto [s, t] = timed(sweeps);
    sc = std::move(s);
    t3 = t;
  } catch (const std::exception& e) {
    sc.agree.fail(e.what());
    sc.tight.fail("sweep aborted");
  }
  sc.agree.detail = std::to_string(sc.segments) + " segments, " + std::to_string(sc.events) +
                    " events, " + std::to_string(sc.points) + " points, max rel err " + fmt(sc.worst);
  sc.tight.detail = std::to_string(sc.p2) + " P2 events (max residual " + fmt(sc.worst_p2) + "), " +
                    std::to_string(sc.p3) + " P3 events (max |cover - 1| " + fmt(sc.worst_p3) + ")";
  report(3, "sweep vs scratch", sc.agree, t3, 300.0);
  report(4, "event tightness", sc.tight, t3, 0.0);

  auto [c5, t5] = timed(worked_example);
  report(5, "worked parametric example", c5, t5, 0.0);
  auto [c6, t6] = timed(metric);
  report(6, "metric properties", c6, t6, 0.0);
  auto [c7, t7] = timed(update_advantage);
  report(7, "update advantage", c7, t7, 0.0);
  auto [c8, t8] = timed(round_trip);
  report(8, "round trip and schemas", c8, t8, 0.0);

  std::cout << (all ? "ALL CRITERIA PASS" : "SOME CRITERIA FAIL") << std::endl;
  return all ? 0 : 1;
}
