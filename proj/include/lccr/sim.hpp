#pragma once

// Deterministic in-memory failure/repair simulator. A scenario is fully
// determined by (kind, parameters, seed): the codeword is drawn from
// mt19937_64(seed) with symbols taken as rng() % field_order and random node
// picks as rng() % remaining, so identical inputs give identical traces.
//
// "Bandwidth" is symbols moved, as counted by the repair engine; no timing.

#include <cstdint>
#include <map>
#include <random>

#include <json.hpp>

#include "lccr/metrics.hpp"
#include "lccr/repair.hpp"

namespace lccr {

struct Scenario {
    enum class Kind { SingleNode, SingleGroup, AdjacentPair, GroupSet, RandomNodes };
    Kind kind = Kind::SingleNode;
    std::uint64_t seed = 0;
    NodeId node;                 // SingleNode
    int group = 0;               // SingleGroup
    int pair_first = 0;          // AdjacentPair: groups (pair_first, pair_first + 1)
    std::vector<int> groups;     // GroupSet
    int count = 0;               // RandomNodes
};

struct SimResult {
    std::string verdict; // "repaired" | "unrepairable"
    bool oracle_decodable = true;
    TransferLedger ledger;
    Trace trace;
    std::map<std::string, std::string> model; // closed-form values for comparison
};

namespace detail {

inline std::vector<LocalMessage> random_message(const Code& code, std::mt19937_64& rng) {
    std::vector<LocalMessage> msg(code.params().m);
    for (auto& part : msg) {
        part.assign(code.params().r, Block(code.gamma()));
        for (auto& b : part)
            for (auto& s : b) s = static_cast<gf_t>(rng() % code.field().order());
    }
    return msg;
}

inline bool oracle_decodes(const Code& code, const ClusterState& st,
                           const std::vector<LocalMessage>& msg) {
    try {
        return code.decode_full(st) == msg;
    } catch (const Unrecoverable&) {
        return false;
    }
}

} // namespace detail

inline SimResult simulate(const Code& code, const Scenario& scenario) {
    const auto& p = code.params();
    std::mt19937_64 rng(scenario.seed);
    const auto msg = detail::random_message(code, rng);
    auto st = code.encode(msg);
    const auto pristine = st.blocks;

    SimResult result;
    result.verdict = "repaired";
    const auto finish = [&] {
        if (result.verdict == "repaired" && (st.blocks != pristine || !code.verify(st)))
            throw Error("repair completed but the state is not bit-identical");
        return result;
    };

    switch (scenario.kind) {
    case Scenario::Kind::SingleNode: {
        const auto node = scenario.node;
        if (node.group < 0 || node.group >= p.m || node.index < 0 || node.index >= p.group_width())
            throw ScenarioInvalid("node out of range");
        st.erase_node(node.group, node.index);
        result.oracle_decodable = detail::oracle_decodes(code, st, msg);
        if (code.node_kind(node.index) == NodeKind::DistributedParity) {
            result.ledger = repair_node_distributed_parity(code, st, node.group, &result.trace);
            result.model["model_repair_symbols"] =
                std::to_string(2LL * (p.u - 1) * code.gamma());
            result.model["model_node_locality"] = std::to_string(2 * (p.u - 1));
        } else {
            result.ledger = repair_node_msr_part(code, st, node, &result.trace);
            result.model["model_node_locality"] = std::to_string(p.n_local() - 1);
        }
        return finish();
    }
    case Scenario::Kind::SingleGroup: {
        if (scenario.group < 0 || scenario.group >= p.m) throw ScenarioInvalid("group out of range");
        st.erase_group(scenario.group);
        result.oracle_decodable = detail::oracle_decodes(code, st, msg);
        const auto plan = plan_single_group_repair(code, st, scenario.group);
        result.ledger = execute_plan(code, st, plan, &result.trace);
        result.model["model_group_locality"] = "3";
        result.model["model_group_bw_overhead"] =
            group_bw_overhead(Family::Lccr, p.m, p.r, p.u, p.delta).str();
        result.model["model_repair_symbols"] =
            std::to_string(5LL * (p.u - 1) * p.r); // the closed-form S' value
        return finish();
    }
    case Scenario::Kind::AdjacentPair: {
        if (scenario.pair_first < 0 || scenario.pair_first >= p.m)
            throw ScenarioInvalid("group out of range");
        const int a = scenario.pair_first, b = (scenario.pair_first + 1) % p.m;
        st.erase_group(a);
        st.erase_group(b);
        result.oracle_decodable = detail::oracle_decodes(code, st, msg);
        const auto plan = plan_adjacent_pair_repair(code, st, a, b);
        result.ledger = execute_plan(code, st, plan, &result.trace);
        result.model["model_group_locality"] = "4";
        return finish();
    }
    case Scenario::Kind::GroupSet: {
        std::set<int> failed(scenario.groups.begin(), scenario.groups.end());
        for (int g : failed) {
            if (g < 0 || g >= p.m) throw ScenarioInvalid("group out of range");
            st.erase_group(g);
        }
        result.oracle_decodable = detail::oracle_decodes(code, st, msg);
        result.model["max_repairable_groups_bound"] =
            std::to_string(max_repairable_failed_groups_bound(p));
        const auto plan = plan_group_repair(code, st, failed);
        if (!plan) {
            result.verdict = "unrepairable";
            return result;
        }
        result.ledger = execute_plan(code, st, *plan, &result.trace);
        return finish();
    }
    case Scenario::Kind::RandomNodes: {
        if (scenario.count < 0 || scenario.count > p.n_nodes())
            throw ScenarioInvalid("random node count out of range");
        std::vector<int> all(p.n_nodes());
        for (int i = 0; i < p.n_nodes(); ++i) all[i] = i;
        for (int k = 0; k < scenario.count; ++k) {
            const std::size_t j = k + rng() % (all.size() - k);
            std::swap(all[k], all[j]);
            st.erase_node(all[k] / p.group_width(), all[k] % p.group_width());
        }
        result.oracle_decodable = detail::oracle_decodes(code, st, msg);

        const auto pattern = classify_group_failures(code, st);
        // local-part node repairs in surviving groups restore the parity
        // sources group repair relies on; distributed parts whose neighbours
        // are both intact come next so the group chains can run through
        // them; the rest follow once the failed groups are back
        for (int g = 0; g < p.m; ++g)
            if (!pattern.failed_groups.count(g))
                result.ledger += repair_msr_nodes_in_place(code, st, g, &result.trace);
        for (int g = 0; g < p.m; ++g) {
            if (pattern.failed_groups.count(g)) continue;
            const auto [left, right] = code.adjacent_groups(g);
            if (pattern.failed_groups.count(left) || pattern.failed_groups.count(right)) continue;
            bool dist_dead = false;
            for (int t = 0; t < p.delta; ++t) dist_dead = dist_dead || !st.is_alive(g, p.n_local() + t);
            if (dist_dead) result.ledger += repair_node_distributed_parity(code, st, g, &result.trace);
        }
        if (!pattern.failed_groups.empty()) {
            const auto plan = plan_group_repair(code, st, pattern.failed_groups);
            if (!plan) {
                result.verdict = "unrepairable";
                return result;
            }
            result.ledger += execute_plan(code, st, *plan, &result.trace);
        }
        for (int g = 0; g < p.m; ++g) {
            if (pattern.failed_groups.count(g)) continue; // rebuilt by the plan
            bool dist_dead = false;
            for (int t = 0; t < p.delta; ++t) dist_dead = dist_dead || !st.is_alive(g, p.n_local() + t);
            if (dist_dead) result.ledger += repair_node_distributed_parity(code, st, g, &result.trace);
        }
        return finish();
    }
    }
    throw ScenarioInvalid("unknown scenario kind");
}

inline nlohmann::json trace_event_json(const TraceEvent& ev) {
    if (ev.kind == TraceEvent::Kind::Transfer)
        return {{"event", "transfer"},
                {"from_group", ev.from_group},
                {"to_group", ev.to_group},
                {"payload", ev.payload},
                {"symbols", ev.symbols}};
    return {{"event", "compute"}, {"at_group", ev.at_group}, {"action", ev.action}};
}

inline std::string trace_jsonl(const Trace& trace) {
    std::string out;
    for (const auto& ev : trace) {
        out += trace_event_json(ev).dump();
        out += "\n";
    }
    return out;
}

inline nlohmann::json sim_result_json(const SimResult& r) {
    nlohmann::json trace = nlohmann::json::array();
    for (const auto& ev : r.trace) trace.push_back(trace_event_json(ev));
    nlohmann::json model(r.model);
    return {{"verdict", r.verdict},
            {"oracle_decodable", r.oracle_decodable},
            {"ledger",
             {{"symbols_moved", r.ledger.symbols_moved},
              {"groups_contacted", r.ledger.groups_contacted},
              {"nodes_contacted", r.ledger.nodes_contacted}}},
            {"model", model},
            {"trace", trace}};
}

} // namespace lccr
