#include "dyngeo/json_io.hpp"

#include "dyngeo/errors.hpp"

namespace dyngeo {

namespace {

Json side_to_json(const std::vector<WeightedSplit>& side) {
  Json out = Json::array();
  for (const auto& ws : side) out.push_back({{"split", split_to_json(ws.split)}, {"length", ws.length}});
  return out;
}

Json splits_to_json(const std::vector<Split>& splits) {
  Json out = Json::array();
  for (const auto& s : splits) out.push_back(split_to_json(s));
  return out;
}

Json structure_to_json(const SupportStructure& structure) {
  Json out = Json::array();
  for (const auto& p : structure) {
    out.push_back({{"a", splits_to_json(p.a)}, {"b", splits_to_json(p.b)}});
  }
  return out;
}

[[noreturn]] void bad(const std::string& what) {
  throw InputError("certificate: " + what);
}

const Json& field(const Json& j, const char* name) {
  if (!j.is_object() || !j.contains(name)) bad(std::string("missing field \"") + name + "\"");
  return j.at(name);
}

std::vector<Split> side_from_json(const Json& j, const LabelSet& labels) {
  if (!j.is_array() || j.empty()) bad("pair side must be a nonempty array");
  std::vector<Split> out;
  for (const auto& item : j) {
    // Accept both {"split": [...], "length": x} and a bare label array.
    out.push_back(split_from_json(item.is_object() ? field(item, "split") : item, labels));
  }
  return out;
}

}  // namespace

Json split_to_json(const Split& split) {
  Json out = Json::array();
  for (int m : split.members()) out.push_back(m);
  return out;
}

Split split_from_json(const Json& j, const LabelSet& labels) {
  if (!j.is_array() || j.empty()) bad("split must be a nonempty array of labels");
  std::vector<int> members;
  for (const auto& m : j) {
    if (!m.is_number_integer()) bad("split labels must be integers");
    members.push_back(m.get<int>());
  }
  try {
    return Split(labels, members);
  } catch (const std::exception& e) {
    bad(e.what());
  }
}

Json geodesic_to_json(const Geodesic& geo) {
  Json pairs = Json::array();
  Json ratios = Json::array();
  for (const auto& p : geo.supports.pairs) {
    pairs.push_back({{"a", side_to_json(p.a)},
                     {"b", side_to_json(p.b)},
                     {"normA", p.norm_a},
                     {"normB", p.norm_b},
                     {"ratio", p.ratio()}});
    ratios.push_back(p.ratio());
  }
  Json common = Json::array();
  for (const auto& c : geo.supports.classification.common) {
    common.push_back(
        {{"split", split_to_json(c.split)}, {"lengthX", c.length_x}, {"lengthT", c.length_t}});
  }
  return {{"format", "dyngeo-geodesic"},
          {"version", kJsonVersion},
          {"maxLabel", geo.x.labels().max_label()},
          {"distance", geo.distance},
          {"k", geo.supports.k()},
          {"pairs", std::move(pairs)},
          {"common", std::move(common)},
          {"ratios", std::move(ratios)}};
}

SupportStructure structure_from_json(const Json& j, const LabelSet& labels) {
  const auto& format = field(j, "format");
  if (!format.is_string() || format.get<std::string>() != "dyngeo-geodesic") {
    bad("format must be \"dyngeo-geodesic\"");
  }
  const auto& version = field(j, "version");
  if (!version.is_number_integer() || version.get<int>() != kJsonVersion) {
    bad("unsupported version");
  }
  const auto& max_label = field(j, "maxLabel");
  if (!max_label.is_number_integer() || max_label.get<int>() != labels.max_label()) {
    bad("maxLabel does not match the trees");
  }
  const auto& pairs = field(j, "pairs");
  if (!pairs.is_array()) bad("pairs must be an array");
  SupportStructure out;
  for (const auto& p : pairs) {
    out.push_back({side_from_json(field(p, "a"), labels), side_from_json(field(p, "b"), labels)});
  }
  return out;
}

Json validation_to_json(const ValidationReport& report, const SupportStructure& structure) {
  Json p1 = Json::array();
  for (const auto& v : report.p1) {
    p1.push_back({{"later", v.later + 1},
                  {"earlier", v.earlier + 1},
                  {"a", split_to_json(v.a)},
                  {"b", split_to_json(v.b)}});
  }
  Json p2 = Json::array();
  for (const auto& v : report.p2) p2.push_back({{"pairIndex", v.index + 1}});
  Json p3 = Json::array();
  for (const auto& v : report.p3) {
    const auto& pair = structure.at(v.index);
    auto pick = [](const std::vector<Split>& side, const std::vector<std::size_t>& idx) {
      Json out = Json::array();
      for (auto i : idx) out.push_back(split_to_json(side.at(i)));
      return out;
    };
    p3.push_back({{"pairIndex", v.index + 1},
                  {"c1", pick(pair.a, v.witness.c1)},
                  {"d1", pick(pair.b, v.witness.d1)},
                  {"c2", pick(pair.a, v.witness.c2)},
                  {"d2", pick(pair.b, v.witness.d2)}});
  }
  return {{"format", "dyngeo-validation"},
          {"version", kJsonVersion},
          {"ok", report.ok()},
          {"structural", report.structural},
          {"p1", std::move(p1)},
          {"p2", std::move(p2)},
          {"p3", std::move(p3)}};
}

Json network_to_json(const IncompatibilityNetwork& net, const FlowState* flow) {
  auto nodes = [](const std::vector<double>& weights, const std::vector<Split>& splits) {
    Json out = Json::array();
    for (std::size_t i = 0; i < weights.size(); ++i) {
      Json node = {{"index", i}, {"weight", weights[i]}};
      if (i < splits.size()) node["split"] = split_to_json(splits[i]);
      out.push_back(std::move(node));
    }
    return out;
  };
  Json arcs = Json::array();
  for (std::size_t k = 0; k < net.arcs().size(); ++k) {
    Json arc = {{"a", net.arcs()[k].a}, {"b", net.arcs()[k].b}};
    if (flow) arc["flow"] = flow->middle.at(k);
    arcs.push_back(std::move(arc));
  }
  Json out = {{"format", "dyngeo-network"},
              {"version", kJsonVersion},
              {"aNodes", nodes(net.a_weights(), net.a_splits())},
              {"bNodes", nodes(net.b_weights(), net.b_splits())},
              {"arcs", std::move(arcs)}};
  if (flow) {
    out["value"] = flow->value;
    out["sourceFlow"] = flow->source;
    out["sinkFlow"] = flow->sink;
  }
  return out;
}

Json sweep_to_json(const SweepResult& result, std::size_t samples) {
  Json events = Json::array();
  for (const auto& e : result.events()) {
    events.push_back({{"lambda", e.lambda},
                      {"kind", to_string(e.kind)},
                      {"pairIndex", e.pair_index + 1},
                      {"coverA", splits_to_json(e.cover_a)},
                      {"coverB", splits_to_json(e.cover_b)},
                      {"distanceBefore", e.distance_before},
                      {"distanceAfter", e.distance_after}});
  }
  Json certificates = Json::array();
  for (const auto& iv : result.intervals()) {
    certificates.push_back(
        {{"from", iv.begin}, {"to", iv.end}, {"pairs", structure_to_json(iv.supports)}});
  }
  Json rows = Json::array();
  for (std::size_t i = 0; i < samples; ++i) {
    double lambda = samples == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(samples - 1);
    rows.push_back({{"lambda", lambda}, {"distance", result.distance_at(lambda)}});
  }
  return {{"format", "dyngeo-sweep"},
          {"version", kJsonVersion},
          {"maxLabel", result.segment().t().labels().max_label()},
          {"initial", geodesic_to_json(result.initial())},
          {"events", std::move(events)},
          {"certificates", std::move(certificates)},
          {"samples", std::move(rows)},
          {"stats",
           {{"augmentations", result.stats().augmentations},
            {"trackerIterations", result.stats().tracker_iterations}}}};
}

}  // namespace dyngeo
