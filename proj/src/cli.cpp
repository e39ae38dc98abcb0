#include "contract_forge/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <optional>

#include "CLI11.hpp"

#include "contract_forge/io.hpp"
#include "contract_forge/lp.hpp"

namespace contract_forge::cli {

namespace {

using io::json;

struct Output {
    std::ostream& out;
    std::ostream& err;
    bool as_json = false;
    std::chrono::steady_clock::time_point started;

    // JSON documents stay byte-deterministic (sorted keys, no timings);
    // wall time is only shown on the human-readable path.
    void emit(const json& doc) {
        if (as_json) {
            out << doc.dump(2) << "\n";
            return;
        }
        print_human(doc, 0);
        const auto elapsed = std::chrono::duration_cast<std::chrono::microseconds>(
            std::chrono::steady_clock::now() - started);
        out << "wall: " << elapsed.count() / 1000.0 << " ms\n";
    }

    void print_human(const json& doc, int depth) {
        const std::string pad(static_cast<size_t>(depth) * 2, ' ');
        for (const auto& [key, value] : doc.items()) {
            if (value.is_object()) {
                out << pad << key << ":\n";
                print_human(value, depth + 1);
            } else if (value.is_array()) {
                out << pad << key << ": " << value.dump() << "\n";
            } else if (value.is_string()) {
                out << pad << key << ": " << value.get<std::string>() << "\n";
            } else {
                out << pad << key << ": " << value.dump() << "\n";
            }
        }
    }
};

json provenance() {
    return json{{"pivots", lp::pivots_performed()}};
}

std::uint64_t resolve_cap(std::optional<std::uint64_t> flag_cap) {
    if (flag_cap) return *flag_cap;
    if (const char* env = std::getenv("CONTRACT_FORGE_CAP")) {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(env, &end, 10);
        if (end && *end == '\0' && v > 0) return v;
    }
    return discrete::kDefaultBruteForceCap;
}

// Loads and validates; on failure writes the document and returns an exit
// code, otherwise fills `inst`.
std::optional<int> load_valid_instance(const std::string& path, const char* command,
                                       Output& output, Instance& inst) {
    inst = io::load_instance(path);
    if (auto violation = validate_instance(inst)) {
        json doc{{"command", command},
                 {"instance", path},
                 {"status", "invalid"},
                 {"violation", io::violation_to_json(*violation)}};
        output.emit(doc);
        return kInvalidInstance;
    }
    return std::nullopt;
}

int cmd_validate(const std::string& path, Output& output) {
    Instance inst;
    if (auto rc = load_valid_instance(path, "validate", output, inst)) return *rc;
    json doc{{"command", "validate"},
             {"instance", path},
             {"status", "ok"},
             {"actions", inst.n() + 1},
             {"outcomes", inst.m() + 1}};
    output.emit(doc);
    return kOk;
}

int check_discrete(const Instance& inst, const json& alloc_doc, json& doc) {
    discrete::DiscreteAllocation alloc = io::allocation_from_json(alloc_doc, inst);
    discrete::MinPaymentResult res = discrete::min_payment_contract(inst, alloc);
    if (auto* priced = std::get_if<discrete::PricedContract>(&res)) {
        doc["status"] = "implementable";
        doc["contract"] = io::contract_to_json(inst, priced->contract);
        doc["expected_payment"] = to_string(priced->expected_payment);
        doc["revenue"] = to_string(priced->revenue);
        return kOk;
    }
    auto& no = std::get<discrete::NotImplementable>(res);
    doc["status"] = "not_implementable";
    doc["certificate"] = io::plan_to_json(inst, no.plan);
    return kNegativeVerdict;
}

int check_continuous(const Instance& inst, const json& rule_doc, json& doc) {
    continuous::PiecewiseConstantRule rule = io::rule_from_json(rule_doc);
    continuous::ContMinPaymentResult res;
    try {
        res = continuous::min_payment_cont(inst, rule);
    } catch (const continuous::NotPiecewiseMonotone& e) {
        doc["status"] = "not_implementable";
        doc["reason"] = std::string("not monotone piecewise constant: ") + e.what();
        return kNegativeVerdict;
    }
    if (auto* priced = std::get_if<continuous::PricedRule>(&res)) {
        doc["status"] = "implementable";
        doc["rule"] = io::rule_to_json(priced->rule);
        doc["payments"] = io::payments_to_json(priced->payments);
        doc["expected_payment"] = to_string(priced->expected_payment);
        doc["revenue"] = to_string(priced->revenue);
        return kOk;
    }
    auto& no = std::get<continuous::ContNotImplementable>(res);
    doc["status"] = "not_implementable";
    doc["rule"] = io::rule_to_json(no.rule);
    doc["certificate"] = io::cont_plan_to_json(no.plan);
    return kNegativeVerdict;
}

int cmd_check(const std::string& instance_path, const std::string& alloc_path,
              Output& output) {
    Instance inst;
    if (auto rc = load_valid_instance(instance_path, "check", output, inst)) return *rc;
    json alloc_doc = io::load_json(alloc_path);
    json doc{{"command", "check"},
             {"instance", instance_path},
             {"allocation", alloc_path}};
    const int rc = is_discrete(inst.types) ? check_discrete(inst, alloc_doc, doc)
                                           : check_continuous(inst, alloc_doc, doc);
    doc["provenance"] = provenance();
    output.emit(doc);
    return rc;
}

int solve_discrete(const Instance& inst, bool oracle, std::uint64_t cap, json& doc) {
    discrete::OptimalContract best = discrete::optimal_contract(inst);
    doc["status"] = "optimal";
    doc["contract"] = io::contract_to_json(inst, best.contract);
    doc["expected_payment"] = to_string(best.expected_payment);
    doc["revenue"] = to_string(best.revenue);
    doc["search"] = json{{"rules_considered", best.rules_considered},
                         {"rules_implementable", best.rules_implementable},
                         {"note", best.search_note}};
    if (oracle) {
        discrete::BruteForceResult oracle_res = discrete::brute_force_optimal(inst, cap);
        if (auto* opt = std::get_if<discrete::OptimalContract>(&oracle_res)) {
            doc["oracle"] = json{{"status", opt->revenue == best.revenue
                                                ? "agrees"
                                                : "disagrees"},
                                 {"revenue", to_string(opt->revenue)},
                                 {"rules_considered", opt->rules_considered}};
        } else {
            auto& cap_hit = std::get<discrete::CapExceeded>(oracle_res);
            doc["oracle"] = json{{"status", "cap_exceeded"}, {"cap", cap_hit.cap}};
        }
    }
    return kOk;
}

int solve_uniform(const Instance& inst, bool detail, json& doc) {
    continuous::UniformOptimalResult res = continuous::uniform_optimal_contract(inst);
    if (auto* violated = std::get_if<continuous::AssumptionViolated>(&res)) {
        doc["status"] = "assumption_violated";
        doc["detail"] = "expected reward of action " + std::to_string(violated->action) +
                        " reaches the top type's cost; the synthesized rule is only "
                        "optimal when every effortful action is unprofitable at c-bar";
        return kInvalidInstance;
    }
    auto& opt = std::get<continuous::UniformOptimal>(res);
    doc["status"] = "optimal";
    doc["rule"] = io::rule_to_json(opt.rule);
    doc["payments"] = io::payments_to_json(opt.payments);
    doc["revenue"] = to_string(opt.revenue);
    doc["virtual_welfare"] = to_string(opt.virtual_welfare);
    doc["top_type_utility"] = to_string(opt.top_type_utility);
    if (detail) {
        json extra{{"virtual_rule", io::rule_to_json(opt.rule)},
                   {"regular", continuous::is_regular(inst.types)},
                   {"dmr", continuous::has_dmr(inst)}};
        if (continuous::has_dmr(inst)) {
            json bps = json::array();
            for (const auto& [z, ratio] : continuous::dmr_breakpoints(inst)) {
                bps.push_back(json{{"breakpoint", to_string(z)},
                                   {"marginal_ratio", to_string(ratio)}});
            }
            extra["dmr_breakpoints"] = bps;
        }
        doc["virtual_detail"] = extra;
    }
    return kOk;
}

int cmd_solve(const std::string& instance_path, bool oracle, bool uniform_detail,
              std::optional<std::uint64_t> cap_flag, Output& output) {
    Instance inst;
    if (auto rc = load_valid_instance(instance_path, "solve", output, inst)) return *rc;
    json doc{{"command", "solve"}, {"instance", instance_path}};
    int rc;
    if (is_discrete(inst.types)) {
        rc = solve_discrete(inst, oracle, resolve_cap(cap_flag), doc);
    } else if (std::holds_alternative<UniformTypes>(inst.types)) {
        rc = solve_uniform(inst, uniform_detail, doc);
    } else {
        doc["status"] = "unsupported_types";
        doc["detail"] =
            "optimal-contract synthesis covers discrete and uniform type spaces; "
            "use `check` to probe rules on tabulated spaces";
        rc = kInvalidInstance;
    }
    doc["provenance"] = provenance();
    output.emit(doc);
    return rc;
}

int cmd_verify_menu(const std::string& instance_path, const std::string& menu_path,
                    Output& output) {
    Instance inst;
    if (auto rc = load_valid_instance(instance_path, "verify-menu", output, inst)) {
        return *rc;
    }
    discrete::CorrelatedMenu menu = io::menu_from_json(io::load_json(menu_path), inst);
    discrete::MenuVerdict verdict = discrete::verify_correlated_menu(inst, menu);
    json doc{{"command", "verify-menu"},
             {"instance", instance_path},
             {"menu", menu_path},
             {"revenue", to_string(verdict.revenue)}};
    int rc = kOk;
    if (verdict.ic()) {
        doc["status"] = "ic";
    } else {
        doc["status"] = "violation";
        const auto& v = *verdict.violation;
        doc["violation"] =
            json{{"kind", v.kind == discrete::MenuViolation::Kind::Disobedience
                              ? "disobedience"
                              : "misreport"},
                 {"type_index", v.type_index},
                 {"report_index", v.report_index},
                 {"entry_index", v.entry_index},
                 {"action", v.action},
                 {"truthful_utility", to_string(v.truthful_utility)},
                 {"deviation_utility", to_string(v.deviation_utility)}};
        rc = kNegativeVerdict;
    }
    doc["provenance"] = provenance();
    output.emit(doc);
    return rc;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"solver for contracts with private per-unit effort costs"};
    app.name("contract-forge");
    bool as_json = false;
    app.add_flag("--json", as_json, "emit a machine-readable result document");

    std::string instance_path, alloc_path, menu_path;
    bool oracle = false, uniform_detail = false;
    std::uint64_t cap_value = 0;

    CLI::App* validate = app.add_subcommand("validate", "validate an instance file");
    validate->add_option("instance", instance_path)->required();

    CLI::App* check = app.add_subcommand(
        "check", "decide whether an allocation rule is implementable");
    check->add_option("instance", instance_path)->required();
    check->add_option("allocation", alloc_path)->required();

    CLI::App* solve = app.add_subcommand("solve", "compute an optimal contract");
    solve->add_option("instance", instance_path)->required();
    solve->add_flag("--oracle", oracle, "cross-check with exhaustive search");
    solve->add_flag("--uniform-virtual", uniform_detail,
                    "include virtual-welfare rule details for uniform types");
    CLI::Option* cap_opt =
        solve->add_option("--cap", cap_value, "exhaustive-search size cap");

    CLI::App* verify = app.add_subcommand("verify-menu",
                                          "verify a correlated randomized menu");
    verify->add_option("instance", instance_path)->required();
    verify->add_option("menu", menu_path)->required();

    app.require_subcommand(1);

    std::vector<const char*> argv;
    argv.push_back("contract-forge");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "argument error: " << e.what() << "\n";
        return kParseError;
    }

    Output output{out, err, as_json, std::chrono::steady_clock::now()};
    lp::reset_pivot_counter();
    try {
        if (validate->parsed()) return cmd_validate(instance_path, output);
        if (check->parsed()) return cmd_check(instance_path, alloc_path, output);
        if (solve->parsed()) {
            std::optional<std::uint64_t> cap;
            if (cap_opt->count() > 0) cap = cap_value;
            return cmd_solve(instance_path, oracle, uniform_detail, cap, output);
        }
        if (verify->parsed()) return cmd_verify_menu(instance_path, menu_path, output);
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << "\n";
        return kParseError;
    } catch (const std::invalid_argument& e) {
        err << "input error: " << e.what() << "\n";
        return kParseError;
    }
    err << "no command given\n";
    return kParseError;
}

}  // namespace contract_forge::cli
