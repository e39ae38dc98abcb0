#pragma once

#include <string>

#include "json.hpp"

#include "contract_forge/continuous.hpp"
#include "contract_forge/discrete.hpp"
#include "contract_forge/model.hpp"

namespace contract_forge::io {

using json = nlohmann::json;

// Instance documents carry every number as a decimal or "p/q" string.
Instance instance_from_json(const json& doc);
Instance load_instance(const std::string& path);

json load_json(const std::string& path);

discrete::DiscreteAllocation allocation_from_json(const json& doc,
                                                  const Instance& inst);
continuous::PiecewiseConstantRule rule_from_json(const json& doc);
discrete::CorrelatedMenu menu_from_json(const json& doc, const Instance& inst);

json violation_to_json(const Violation& v);
json contract_to_json(const Instance& inst, const discrete::Contract& contract);
json rule_to_json(const continuous::PiecewiseConstantRule& rule);
json payments_to_json(const std::vector<std::vector<Rat>>& payments);

json plan_to_json(const Instance& inst, const discrete::DeviationPlan& plan);
discrete::DeviationPlan plan_from_json(const json& doc, const Instance& inst);
json cont_plan_to_json(const continuous::ContinuousDeviationPlan& plan);
continuous::ContinuousDeviationPlan cont_plan_from_json(const json& doc, int pieces,
                                                        int num_actions);

}  // namespace contract_forge::io
