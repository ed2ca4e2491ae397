#pragma once

#include "inference/posterior.hpp"
#include "sim/events.hpp"

#include <json.hpp>
#include <string>

namespace moran {

using Json = nlohmann::ordered_json;

Json model_to_json(const Model& model);
Model model_from_json(const Json& j);

Json init_to_json(const InitialCondition& init);
InitialCondition init_from_json(const Json& j);

Json prior_to_json(const PriorSpec& prior);
PriorSpec prior_from_json(const Json& j);

/// Compact prior syntax used on the command line:
///   gamma:K,THETA | uniform | fps-ones:N | fps:M,a,alpha,beta[,gamma][;M,a,alpha,beta[,gamma]...]
PriorSpec parse_prior(const std::string& text);
std::string format_prior(const PriorSpec& prior);

Json grid_to_json(const GridConfig& grid);
GridConfig grid_from_json(const Json& j);

ProcessKind::Tag parse_process_tag(const std::string& name);
GraphKind parse_graph_kind(const std::string& name);
UpdateRule parse_update_rule(const std::string& name);
Layout::Tag parse_layout_tag(const std::string& name);
Estimator parse_estimator(const std::string& name);
std::string_view to_string(Estimator estimator);

} // namespace moran
