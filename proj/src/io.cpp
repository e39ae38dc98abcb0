#include "contract_forge/io.hpp"

#include <fstream>

namespace contract_forge::io {

namespace {

Rat rational_field(const json& j, const char* what) {
    if (!j.is_string()) {
        throw ParseError(std::string(what) + ": numbers must be decimal strings");
    }
    return parse_rational(j.get<std::string>());
}

std::vector<Rat> rational_array(const json& j, const char* what) {
    if (!j.is_array()) throw ParseError(std::string(what) + ": expected an array");
    std::vector<Rat> out;
    out.reserve(j.size());
    for (const auto& e : j) out.push_back(rational_field(e, what));
    return out;
}

const json& field(const json& doc, const char* name) {
    auto it = doc.find(name);
    if (it == doc.end()) throw ParseError(std::string("missing field '") + name + "'");
    return *it;
}

}  // namespace

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError("invalid JSON in '" + path + "': " + e.what());
    }
    return doc;
}

Instance instance_from_json(const json& doc) {
    if (!doc.is_object()) throw ParseError("instance document must be an object");
    Instance inst;
    inst.gammas = rational_array(field(doc, "gammas"), "gammas");
    inst.rewards = rational_array(field(doc, "rewards"), "rewards");
    const json& dist = field(doc, "dist");
    if (!dist.is_array()) throw ParseError("dist: expected an array of rows");
    for (const auto& row : dist) {
        inst.dist.push_back(rational_array(row, "dist"));
    }
    const json& types = field(doc, "types");
    const std::string kind = field(types, "kind").get<std::string>();
    if (kind == "discrete") {
        DiscreteTypes d;
        d.support = rational_array(field(types, "support"), "types.support");
        d.masses = rational_array(field(types, "masses"), "types.masses");
        inst.types = std::move(d);
    } else if (kind == "uniform") {
        inst.types = UniformTypes{rational_field(field(types, "upper"), "types.upper")};
    } else if (kind == "tabulated") {
        TabulatedTypes t;
        t.grid = rational_array(field(types, "grid"), "types.grid");
        t.cdf = rational_array(field(types, "cdf"), "types.cdf");
        t.pdf = rational_array(field(types, "pdf"), "types.pdf");
        inst.types = std::move(t);
    } else {
        throw ParseError("unknown types.kind '" + kind + "'");
    }
    return inst;
}

Instance load_instance(const std::string& path) {
    return instance_from_json(load_json(path));
}

discrete::DiscreteAllocation allocation_from_json(const json& doc,
                                                  const Instance& inst) {
    const auto* d = std::get_if<DiscreteTypes>(&inst.types);
    if (!d) throw ParseError("discrete allocation supplied for a continuous instance");
    std::vector<Rat> listed = rational_array(field(doc, "types"), "types");
    if (listed != d->support) {
        throw ParseError("allocation types must list the instance support in order");
    }
    const json& actions = field(doc, "actions");
    if (!actions.is_array() || actions.size() != d->support.size()) {
        throw ParseError("actions must list one action per type");
    }
    discrete::DiscreteAllocation alloc;
    for (const auto& a : actions) {
        if (!a.is_number_integer()) throw ParseError("actions must be integers");
        alloc.action.push_back(a.get<int>());
    }
    return alloc;
}

continuous::PiecewiseConstantRule rule_from_json(const json& doc) {
    continuous::PiecewiseConstantRule rule;
    rule.breakpoints = rational_array(field(doc, "breakpoints"), "breakpoints");
    const json& actions = field(doc, "actions");
    if (!actions.is_array()) throw ParseError("actions must be an array");
    for (const auto& a : actions) {
        if (!a.is_number_integer()) throw ParseError("actions must be integers");
        rule.actions.push_back(a.get<int>());
    }
    return rule;
}

discrete::CorrelatedMenu menu_from_json(const json& doc, const Instance& inst) {
    const auto* d = std::get_if<DiscreteTypes>(&inst.types);
    if (!d) throw ParseError("menus need a discrete instance");
    const json& menu = field(doc, "menu");
    if (!menu.is_array() || menu.size() != d->support.size()) {
        throw ParseError("menu must list one lottery per type, in support order");
    }
    discrete::CorrelatedMenu out;
    out.per_type.resize(d->support.size());
    for (size_t i = 0; i < menu.size(); ++i) {
        const json& item = menu[i];
        if (rational_field(field(item, "type"), "menu.type") != d->support[i]) {
            throw ParseError("menu types must match the instance support in order");
        }
        const json& entries = field(item, "entries");
        if (!entries.is_array()) throw ParseError("menu entries must be an array");
        for (const auto& e : entries) {
            discrete::CorrelatedMenu::Entry entry;
            entry.prob = rational_field(field(e, "prob"), "menu.prob");
            const json& action = field(e, "action");
            if (!action.is_number_integer()) throw ParseError("menu action must be an integer");
            entry.action = action.get<int>();
            entry.payments = rational_array(field(e, "payments"), "menu.payments");
            out.per_type[i].push_back(std::move(entry));
        }
    }
    return out;
}

json violation_to_json(const Violation& v) {
    return json{{"assumption", v.assumption}, {"witness", v.witness}, {"detail", v.detail}};
}

json payments_to_json(const std::vector<std::vector<Rat>>& payments) {
    json out = json::array();
    for (const auto& vec : payments) {
        json row = json::array();
        for (const Rat& r : vec) row.push_back(to_string(r));
        out.push_back(std::move(row));
    }
    return out;
}

json contract_to_json(const Instance& inst, const discrete::Contract& contract) {
    const auto& d = std::get<DiscreteTypes>(inst.types);
    json types = json::array();
    for (const Rat& c : d.support) types.push_back(to_string(c));
    return json{{"allocation", json{{"types", types}, {"actions", contract.alloc.action}}},
                {"payments", payments_to_json(contract.payments)}};
}

json rule_to_json(const continuous::PiecewiseConstantRule& rule) {
    json breakpoints = json::array();
    for (const Rat& z : rule.breakpoints) breakpoints.push_back(to_string(z));
    return json{{"breakpoints", breakpoints}, {"actions", rule.actions}};
}

json plan_to_json(const Instance& inst, const discrete::DeviationPlan& plan) {
    const auto& d = std::get<DiscreteTypes>(inst.types);
    json weights = json::array();
    for (int c = 0; c < plan.num_types; ++c) {
        for (int cp = 0; cp < plan.num_types; ++cp) {
            for (int k = 0; k < plan.num_actions; ++k) {
                const Rat& w = plan.at(c, cp, k);
                if (w == 0) continue;
                weights.push_back(json{{"true_type", to_string(d.support[c])},
                                       {"report", to_string(d.support[cp])},
                                       {"action", k},
                                       {"weight", to_string(w)}});
            }
        }
    }
    return json{{"kind", "deviation_plan"}, {"weights", weights}};
}

discrete::DeviationPlan plan_from_json(const json& doc, const Instance& inst) {
    const auto& d = std::get<DiscreteTypes>(inst.types);
    const int k = static_cast<int>(d.support.size());
    discrete::DeviationPlan plan(k, inst.n() + 1);
    auto index_of = [&](const Rat& c) {
        for (int i = 0; i < k; ++i) {
            if (d.support[i] == c) return i;
        }
        throw ParseError("plan references a type outside the support");
    };
    for (const auto& w : field(doc, "weights")) {
        const int c = index_of(rational_field(field(w, "true_type"), "true_type"));
        const int cp = index_of(rational_field(field(w, "report"), "report"));
        const int action = field(w, "action").get<int>();
        if (action < 0 || action > inst.n()) throw ParseError("plan action out of range");
        plan.at(c, cp, action) = rational_field(field(w, "weight"), "weight");
    }
    return plan;
}

json cont_plan_to_json(const continuous::ContinuousDeviationPlan& plan) {
    json weights = json::array();
    for (int side = 0; side < 2; ++side) {
        for (int i = 0; i < plan.pieces; ++i) {
            for (int ip = 0; ip < plan.pieces; ++ip) {
                for (int k = 0; k < plan.num_actions; ++k) {
                    const Rat& w = side == 0 ? plan.r_at(i, ip, k) : plan.l_at(i, ip, k);
                    if (w == 0) continue;
                    weights.push_back(json{{"copy", side == 0 ? "R" : "L"},
                                           {"piece", i},
                                           {"report", ip},
                                           {"action", k},
                                           {"weight", to_string(w)}});
                }
            }
        }
    }
    return json{{"kind", "breakpoint_deviation_plan"}, {"weights", weights}};
}

continuous::ContinuousDeviationPlan cont_plan_from_json(const json& doc, int pieces,
                                                        int num_actions) {
    continuous::ContinuousDeviationPlan plan(pieces, num_actions);
    for (const auto& w : field(doc, "weights")) {
        const std::string copy = field(w, "copy").get<std::string>();
        const int i = field(w, "piece").get<int>();
        const int ip = field(w, "report").get<int>();
        const int k = field(w, "action").get<int>();
        if (i < 0 || i >= pieces || ip < 0 || ip >= pieces || k < 0 || k >= num_actions) {
            throw ParseError("plan index out of range");
        }
        Rat value = rational_field(field(w, "weight"), "weight");
        if (copy == "R") {
            plan.r_at(i, ip, k) = std::move(value);
        } else if (copy == "L") {
            plan.l_at(i, ip, k) = std::move(value);
        } else {
            throw ParseError("plan copy must be R or L");
        }
    }
    return plan;
}

}  // namespace contract_forge::io
