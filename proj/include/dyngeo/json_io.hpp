#pragma once

#include <cstddef>
#include <optional>

#include "json.hpp"

#include "dyngeo/dynamic.hpp"
#include "dyngeo/flow.hpp"
#include "dyngeo/geodesic.hpp"

namespace dyngeo {

using Json = nlohmann::ordered_json;

inline constexpr int kJsonVersion = 1;

// Splits are written as sorted arrays of the labels on the side away from 0.
Json split_to_json(const Split& split);
Split split_from_json(const Json& j, const LabelSet& labels);

Json geodesic_to_json(const Geodesic& geo);

// Reads the pair structure of a geodesic document. Lengths in the document
// are ignored; callers bind them from trees. Throws InputError when the
// document does not have the expected shape.
SupportStructure structure_from_json(const Json& j, const LabelSet& labels);

Json validation_to_json(const ValidationReport& report, const SupportStructure& structure);

// Debug dump: nodes with weights, arcs, and the flow when given.
Json network_to_json(const IncompatibilityNetwork& net, const FlowState* flow = nullptr);

// Event log, certificate intervals and `samples` evenly spaced distances.
// Pair indices are 1-based.
Json sweep_to_json(const SweepResult& result, std::size_t samples);

}  // namespace dyngeo
