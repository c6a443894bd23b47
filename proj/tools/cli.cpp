#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "dyngeo/errors.hpp"
#include "dyngeo/json_io.hpp"
#include "dyngeo/newick.hpp"
#include "dyngeo/random_tree.hpp"

namespace dyngeo::cli {

namespace {

std::string fixed12(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12f", x);
  return buf;
}

std::string splits_text(const std::vector<Split>& splits) {
  std::string out;
  for (const auto& s : splits) {
    if (!out.empty()) out += ' ';
    out += s.to_string();
  }
  return out;
}

std::string side_text(const std::vector<WeightedSplit>& side) {
  std::vector<Split> splits;
  for (const auto& ws : side) splits.push_back(ws.split);
  return splits_text(splits);
}

struct TreeInputs {
  std::vector<std::string> paths;
  bool interior_only = false;
};

// All trees must share the first tree's label set.
std::vector<PhyloTree> load_trees(const TreeInputs& in) {
  std::vector<PhyloTree> trees;
  NewickOptions options;
  for (const auto& path : in.paths) {
    auto tree = read_newick_file(path, options);
    options.labels = tree.labels();
    trees.push_back(in.interior_only ? tree.without_leaf_edges() : tree);
  }
  return trees;
}

SweepTolerances tolerances_from_env(SweepTolerances tol) {
  if (const char* env = std::getenv("DYNGEO_TOLERANCE")) {
    char* end = nullptr;
    double v = std::strtod(env, &end);
    if (end == env || *end != '\0' || !(v > 0.0)) {
      throw InputError(std::string("DYNGEO_TOLERANCE must be a positive number, got \"") + env +
                       "\"");
    }
    tol.residual_zero = v;
  }
  return tol;
}

void write_json(std::ostream& out, const Json& j) { out << j.dump(2) << '\n'; }

// ---- commands ----------------------------------------------------------------

int cmd_distance(const TreeInputs& in, bool json, const std::string& dump_path,
                 std::ostream& out) {
  auto trees = load_trees(in);
  auto geo = compute_geodesic(trees[0], trees[1]);
  if (!dump_path.empty()) {
    Json nets = Json::array();
    for (std::size_t i = 0; i < geo.supports.pairs.size(); ++i) {
      const auto& p = geo.supports.pairs[i];
      nets.push_back(network_to_json(build_network(p.squared_a(), p.squared_b()),
                                     &geo.pair_flows[i]));
    }
    std::ofstream f(dump_path);
    if (!f) throw InputError("cannot write " + dump_path);
    write_json(f, nets);
  }
  if (json) {
    write_json(out, geodesic_to_json(geo));
    return 0;
  }
  out << fixed12(geo.distance) << '\n';
  out << "k = " << geo.supports.k() << '\n';
  for (std::size_t i = 0; i < geo.supports.pairs.size(); ++i) {
    const auto& p = geo.supports.pairs[i];
    out << "pair " << i + 1 << ": ratio " << fixed12(p.ratio()) << "  A = " << side_text(p.a)
        << "  B = " << side_text(p.b) << '\n';
  }
  return 0;
}

int cmd_eval(const TreeInputs& in, double lambda, std::ostream& out) {
  auto trees = load_trees(in);
  auto geo = compute_geodesic(trees[0], trees[1]);
  out << serialize_newick(eval_point(geo, lambda)) << '\n';
  return 0;
}

int cmd_sweep(const TreeInputs& in, std::size_t samples, std::optional<std::size_t> cap,
              bool json, std::ostream& out) {
  auto trees = load_trees(in);
  SweepOptions options;
  options.tolerances = tolerances_from_env(options.tolerances);
  options.event_cap = cap;
  auto result = sweep(Segment(trees[0], trees[1], trees[2]), options);
  if (json) {
    write_json(out, sweep_to_json(result, samples));
    return 0;
  }
  out << result.events().size() << " events\n";
  for (std::size_t i = 0; i < result.events().size(); ++i) {
    const auto& e = result.events()[i];
    out << "event " << i + 1 << ": lambda " << fixed12(e.lambda) << ' ' << to_string(e.kind)
        << " pair " << e.pair_index + 1;
    if (e.kind == EventKind::P3Split) {
      out << "  C1 = " << splits_text(e.cover_a) << "  D2 = " << splits_text(e.cover_b);
    }
    out << "  distance " << fixed12(e.distance_after) << '\n';
  }
  if (samples > 0) {
    out << "lambda distance\n";
    for (std::size_t i = 0; i < samples; ++i) {
      double lambda = samples == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(samples - 1);
      out << fixed12(lambda) << ' ' << fixed12(result.distance_at(lambda)) << '\n';
    }
  }
  return 0;
}

int cmd_validate(const TreeInputs& in, const std::string& certificate, bool json,
                 std::ostream& out) {
  auto trees = load_trees(in);
  std::ifstream f(certificate);
  if (!f) throw InputError("cannot open " + certificate);
  Json doc;
  try {
    doc = Json::parse(f);
  } catch (const nlohmann::json::exception& e) {
    throw InputError("certificate is not valid JSON: " + std::string(e.what()));
  }
  auto structure = structure_from_json(doc, trees[0].labels());
  auto seq = bind_supports(structure, trees[0], trees[1]);
  auto report = validate_supports(seq, trees[0], trees[1]);
  if (json) {
    write_json(out, validation_to_json(report, structure));
    return report.ok() ? 0 : 1;
  }
  if (report.ok()) {
    out << "PASS\n";
    return 0;
  }
  for (const auto& s : report.structural) out << "FAIL(structure) " << s << '\n';
  for (const auto& v : report.p1) {
    out << "FAIL(P1) pair " << v.later + 1 << " vs earlier pair " << v.earlier + 1 << ": "
        << v.a.to_string() << " crosses " << v.b.to_string() << '\n';
  }
  for (const auto& v : report.p2) {
    out << "FAIL(P2) pairs " << v.index + 1 << " and " << v.index + 2 << '\n';
  }
  for (const auto& v : report.p3) {
    const auto& pair = structure[v.index];
    auto pick = [](const std::vector<Split>& side, const std::vector<std::size_t>& idx) {
      std::vector<Split> out;
      for (auto i : idx) out.push_back(side[i]);
      return splits_text(out);
    };
    out << "FAIL(P3) pair " << v.index + 1 << ": C1 = " << pick(pair.a, v.witness.c1)
        << "  D1 = " << pick(pair.b, v.witness.d1) << "  C2 = " << pick(pair.a, v.witness.c2)
        << "  D2 = " << pick(pair.b, v.witness.d2) << '\n';
  }
  return 1;
}

Json bench_json(const BenchConfig& config, const std::vector<BenchRow>& rows, bool timing) {
  Json items = Json::array();
  std::size_t wins = 0;
  for (const auto& r : rows) {
    Json row = {{"trial", r.trial},
                {"events", r.events},
                {"points", r.points},
                {"sweepAugmentations", r.sweep_augmentations},
                {"scratchAugmentations", r.scratch_augmentations}};
    if (timing) {
      row["sweepMs"] = r.sweep_ms;
      row["scratchMs"] = r.scratch_ms;
    }
    if (r.sweep_augmentations <= r.scratch_augmentations) ++wins;
    items.push_back(std::move(row));
  }
  return {{"format", "dyngeo-bench"},
          {"version", kJsonVersion},
          {"leaves", config.leaves},
          {"trials", config.trials},
          {"seed", config.seed},
          {"rows", std::move(items)},
          {"sweepNoWorse", wins}};
}

}  // namespace

// ---- bench -------------------------------------------------------------------

std::vector<BenchRow> run_bench(const BenchConfig& config) {
  using Clock = std::chrono::steady_clock;
  auto ms_since = [](Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
  };
  const LabelSet labels(config.leaves);
  Rng rng(config.seed);
  std::vector<BenchRow> rows;
  for (std::size_t trial = 0; trial < config.trials; ++trial) {
    auto x0 = random_tree(labels, rng);
    auto x1 = redraw_lengths(x0, rng);
    auto t = random_tree(labels, rng);
    BenchRow row;
    row.trial = trial + 1;

    auto t0 = Clock::now();
    auto result = sweep(Segment(x0, x1, t), config.options);
    for (std::size_t i = 0; i < config.grid; ++i) {
      double lambda = config.grid == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(config.grid - 1);
      (void)result.distance_at(lambda);
    }
    row.sweep_ms = ms_since(t0);
    row.sweep_augmentations = result.stats().augmentations;
    row.events = result.events().size();

    std::vector<double> points;
    for (const auto& e : result.events()) points.push_back(e.lambda);
    for (std::size_t i = 0; i < config.grid; ++i) {
      points.push_back(config.grid == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(config.grid - 1));
    }
    row.points = points.size();
    t0 = Clock::now();
    for (double lambda : points) {
      row.scratch_augmentations += compute_geodesic(result.segment().point(lambda), t).augmentations;
    }
    row.scratch_ms = ms_since(t0);
    rows.push_back(row);
  }
  return rows;
}

void print_bench_table(const BenchConfig& config, const std::vector<BenchRow>& rows,
                       bool timing, std::ostream& out) {
  out << "# leaves=" << config.leaves << " trials=" << config.trials << " seed=" << config.seed
      << " grid=" << config.grid << '\n';
  out << std::left << std::setw(7) << "trial" << std::setw(8) << "events" << std::setw(8)
      << "points" << std::setw(12) << "sweep_aug" << std::setw(13) << "scratch_aug";
  if (timing) out << std::setw(11) << "sweep_ms" << std::setw(11) << "scratch_ms";
  out << '\n';
  std::size_t wins = 0;
  for (const auto& r : rows) {
    out << std::left << std::setw(7) << r.trial << std::setw(8) << r.events << std::setw(8)
        << r.points << std::setw(12) << r.sweep_augmentations << std::setw(13)
        << r.scratch_augmentations;
    if (timing) {
      out << std::fixed << std::setprecision(2) << std::setw(11) << r.sweep_ms << std::setw(11)
          << r.scratch_ms << std::defaultfloat;
    }
    out << '\n';
    if (r.sweep_augmentations <= r.scratch_augmentations) ++wins;
  }
  if (!rows.empty()) {
    out << "sweep_aug <= scratch_aug on " << wins << "/" << rows.size() << " trials\n";
  }
}

// ---- entry point -------------------------------------------------------------

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Geodesics in BHV treespace and their maintenance along a moving endpoint",
               "dyngeo"};
  app.require_subcommand(1);
  std::string format = "text";
  bool interior_only = false;
  app.add_option("--format", format, "Output format")
      ->check(CLI::IsMember({"text", "json"}))
      ->capture_default_str();
  app.add_flag("--interior-only", interior_only, "Ignore pendant (leaf) edges");

  TreeInputs in;
  std::string dump_path;
  auto* distance = app.add_subcommand("distance", "Geodesic distance and support sequence");
  std::string x_path, t_path, x1_path;
  distance->add_option("x", x_path, "Start tree (Newick)")->required()->check(CLI::ExistingFile);
  distance->add_option("t", t_path, "Target tree (Newick)")->required()->check(CLI::ExistingFile);
  distance->add_option("--dump-networks", dump_path,
                       "Write each pair's flow network as JSON to this file");

  auto* eval = app.add_subcommand("eval", "Point of the geodesic at parameter lambda");
  double lambda = 0.0;
  eval->add_option("x", x_path, "Start tree (Newick)")->required()->check(CLI::ExistingFile);
  eval->add_option("t", t_path, "Target tree (Newick)")->required()->check(CLI::ExistingFile);
  eval->add_option("--lambda", lambda, "Parameter in [0, 1]")->required();

  auto* sweep_cmd = app.add_subcommand("sweep", "Maintain the geodesic while X moves from x0 to x1");
  std::size_t samples = 11;
  std::optional<std::size_t> cap;
  sweep_cmd->add_option("x0", x_path, "Segment start (Newick)")->required()->check(CLI::ExistingFile);
  sweep_cmd->add_option("x1", x1_path, "Segment end, same topology (Newick)")
      ->required()
      ->check(CLI::ExistingFile);
  sweep_cmd->add_option("t", t_path, "Fixed target (Newick)")->required()->check(CLI::ExistingFile);
  sweep_cmd->add_option("--samples", samples, "Evenly spaced distance samples")->capture_default_str();
  sweep_cmd->add_option("--event-cap", cap, "Abort after this many events");

  auto* validate = app.add_subcommand("validate", "Check a geodesic certificate");
  std::string certificate;
  validate->add_option("x", x_path, "Start tree (Newick)")->required()->check(CLI::ExistingFile);
  validate->add_option("t", t_path, "Target tree (Newick)")->required()->check(CLI::ExistingFile);
  validate->add_option("--certificate", certificate, "Geodesic JSON")
      ->required()
      ->check(CLI::ExistingFile);

  auto* bench = app.add_subcommand("bench", "Sweep updating versus scratch recomputation");
  BenchConfig config;
  bool no_timing = false;
  bench->add_option("--leaves", config.leaves, "Leaves r (labels 0..r)")->capture_default_str();
  bench->add_option("--trials", config.trials, "Number of random segments")->capture_default_str();
  bench->add_option("--seed", config.seed, "Generator seed")->capture_default_str();
  bench->add_option("--grid", config.grid, "Grid points per trial")->capture_default_str();
  bench->add_flag("--no-timing", no_timing, "Omit wall-clock columns");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  const bool json = format == "json";
  in.interior_only = interior_only;
  try {
    if (*distance) {
      in.paths = {x_path, t_path};
      return cmd_distance(in, json, dump_path, out);
    }
    if (*eval) {
      in.paths = {x_path, t_path};
      return cmd_eval(in, lambda, out);
    }
    if (*sweep_cmd) {
      in.paths = {x_path, x1_path, t_path};
      return cmd_sweep(in, samples, cap, json, out);
    }
    if (*validate) {
      in.paths = {x_path, t_path};
      return cmd_validate(in, certificate, json, out);
    }
    if (*bench) {
      if (config.leaves < 4) throw InputError("bench needs --leaves >= 4");
      config.options.tolerances = tolerances_from_env(config.options.tolerances);
      auto rows = run_bench(config);
      if (json) {
        write_json(out, bench_json(config, rows, !no_timing));
      } else {
        print_bench_table(config, rows, !no_timing, out);
      }
      return 0;
    }
  } catch (const InputError& e) {
    err << "dyngeo: " << e.what() << '\n';
    return 2;
  } catch (const NumericalError& e) {
    err << "dyngeo: numerical failure: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "dyngeo: internal error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace dyngeo::cli
