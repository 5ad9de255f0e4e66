#pragma once

// Repair execution and planning on a ClusterState: single nodes (within the
// local group or by re-summing neighbour parities), one failed group through
// the three-helper chain, two adjacent failed groups through mirrored
// chains, and a general peeling planner for arbitrary group-failure sets.
//
// Accounting conventions, used consistently by every routine here:
//   symbols_moved:    symbols crossing a group boundary or read off helper
//                     nodes for a node repair; intra-group reads during
//                     group repair are free.
//   groups_contacted: distinct groups, other than the one being repaired,
//                     that supply data for it (plans: |helper_groups|).
//   nodes_contacted:  distinct nodes whose stored blocks are read as
//                     transfer sources or helper payloads.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "lccr/code.hpp"
#include "lccr/ledger.hpp"

namespace lccr {

struct FailurePattern {
    std::set<NodeId> failed_nodes; // node-level failures in surviving groups
    std::set<int> failed_groups;   // groups that must be rebuilt as a whole
};

enum class PayloadKind { MsrParityBlocks, SystematicBlocks, RecoveredParity };
enum class ComputeAction { XorParities, DecodeFromParity, ReEncode, RebuildDistributedParity };

inline std::string payload_label(PayloadKind k, int group) {
    switch (k) {
    case PayloadKind::MsrParityBlocks: return "msr_parity(" + std::to_string(group) + ")";
    case PayloadKind::SystematicBlocks: return "systematic(" + std::to_string(group) + ")";
    case PayloadKind::RecoveredParity: return "recovered_parity(" + std::to_string(group) + ")";
    }
    return "?";
}

inline std::string action_label(ComputeAction a) {
    switch (a) {
    case ComputeAction::XorParities: return "xor_parities";
    case ComputeAction::DecodeFromParity: return "decode_from_parity";
    case ComputeAction::ReEncode: return "re_encode";
    case ComputeAction::RebuildDistributedParity: return "rebuild_distributed_parity";
    }
    return "?";
}

struct Step {
    enum class Kind { Transfer, Compute };
    Kind kind = Kind::Transfer;
    // Transfer
    int from_group = -1;
    int to_group = -1;
    PayloadKind payload = PayloadKind::MsrParityBlocks;
    int payload_group = -1;
    long long symbol_count = 0;
    // Compute
    int at_group = -1;
    ComputeAction action = ComputeAction::XorParities;
    int target_group = -1; // XorParities: whose parity is being recovered

    static Step transfer(int from, int to, PayloadKind kind, int payload_group, long long symbols) {
        Step s;
        s.kind = Kind::Transfer;
        s.from_group = from;
        s.to_group = to;
        s.payload = kind;
        s.payload_group = payload_group;
        s.symbol_count = symbols;
        return s;
    }
    static Step compute(int at, ComputeAction action, int target = -1) {
        Step s;
        s.kind = Kind::Compute;
        s.at_group = at;
        s.action = action;
        s.target_group = target < 0 ? at : target;
        return s;
    }
};

struct RepairPlan {
    std::vector<Step> steps;
    std::set<int> helper_groups;
    std::set<int> repaired_groups;

    long long planned_symbols() const {
        long long total = 0;
        for (const auto& s : steps)
            if (s.kind == Step::Kind::Transfer) total += s.symbol_count;
        return total;
    }
};

inline int max_repairable_failed_groups_bound(const CodeParams& p) {
    return p.u + 2 * p.delta - 1;
}

inline FailurePattern classify_group_failures(const Code& code, const ClusterState& st) {
    FailurePattern out;
    const auto& p = code.params();
    for (int g = 0; g < p.m; ++g) {
        int msr_failed = 0;
        for (int i = 0; i < p.n_local(); ++i)
            if (!st.is_alive(g, i)) ++msr_failed;
        if (msr_failed > p.u - 1) {
            out.failed_groups.insert(g);
            continue;
        }
        for (int i = 0; i < p.group_width(); ++i)
            if (!st.is_alive(g, i)) out.failed_nodes.insert({g, i});
    }
    return out;
}

namespace detail {

inline bool range_alive(const ClusterState& st, int g, int from, int to) {
    for (int i = from; i < to; ++i)
        if (!st.is_alive(g, i)) return false;
    return true;
}

} // namespace detail

// Repair one failed node inside the local-code part of its group, using the
// backend's helper protocol on the d lowest-index surviving local nodes.
inline TransferLedger repair_node_msr_part(const Code& code, ClusterState& st, NodeId node,
                                           Trace* trace = nullptr) {
    const auto& p = code.params();
    const LocalCode& lc = code.local_code(node.group);
    if (node.index < 0 || node.index >= p.n_local())
        throw ScenarioInvalid("node is not in the local-code part");
    std::map<int, Block> payloads;
    for (int i = 0; i < p.n_local() && static_cast<int>(payloads.size()) < lc.params().d_helpers; ++i) {
        if (i == node.index || !st.is_alive(node.group, i)) continue;
        payloads[i] = lc.repair_payload(i, st.block(node.group, i), node.index);
    }
    if (static_cast<int>(payloads.size()) < lc.params().d_helpers)
        throw InsufficientHelpers("need " + std::to_string(lc.params().d_helpers) +
                                  " surviving local nodes to repair node " +
                                  std::to_string(node.index) + " of group " +
                                  std::to_string(node.group));
    TransferLedger ledger;
    for (const auto& [idx, payload] : payloads) {
        detail::record(trace, detail::transfer_event(
                                  node.group, node.group,
                                  "helper_payload(" + std::to_string(node.group) + ":" +
                                      std::to_string(idx) + ")",
                                  static_cast<long long>(payload.size())));
        ledger.symbols_moved += static_cast<long long>(payload.size());
        ++ledger.nodes_contacted;
    }
    st.block(node.group, node.index) = lc.repair_node(node.index, payloads);
    st.alive[node.group][node.index] = true;
    detail::record(trace, detail::compute_event(node.group, "repair_node"));
    return ledger;
}

// Rebuild the whole distributed-parity part of `group` by fetching both
// neighbours' local parity blocks and summing them. The bandwidth is
// 2(u-1)*gamma no matter how many of the delta parity nodes actually failed.
inline TransferLedger repair_node_distributed_parity(const Code& code, ClusterState& st, int group,
                                                     Trace* trace = nullptr) {
    const auto& p = code.params();
    if (p.delta == 0) throw ScenarioInvalid("code has no distributed parity part");
    const auto [left, right] = code.adjacent_groups(group);
    for (int h : {left, right})
        if (!detail::range_alive(st, h, p.r, p.n_local()))
            throw NeighborUnavailable("group " + std::to_string(h) +
                                      " is missing local parity blocks");
    TransferLedger ledger;
    const long long parity_symbols = static_cast<long long>(p.u - 1) * code.gamma();
    for (int h : {left, right}) {
        detail::record(trace,
                       detail::transfer_event(h, group, payload_label(PayloadKind::MsrParityBlocks, h),
                                              parity_symbols));
        ledger.symbols_moved += parity_symbols;
        ledger.nodes_contacted += p.u - 1;
    }
    ledger.groups_contacted = 2;
    for (int t = 0; t < p.delta; ++t) {
        Block sum(code.gamma(), 0);
        for (int s = 0; s < code.gamma(); ++s)
            sum[s] = static_cast<gf_t>(st.block(left, p.r + t)[s] ^ st.block(right, p.r + t)[s]);
        st.block(group, p.n_local() + t) = std::move(sum);
        st.alive[group][p.n_local() + t] = true;
    }
    detail::record(trace, detail::compute_event(group, "rebuild_distributed_parity"));
    return ledger;
}

// Restore every failed local-code node of `group` in place: one-by-one
// through the repair protocol while d helpers survive, otherwise by decoding
// the group message from any r survivors and re-encoding.
inline TransferLedger repair_msr_nodes_in_place(const Code& code, ClusterState& st, int group,
                                                Trace* trace = nullptr) {
    const auto& p = code.params();
    const LocalCode& lc = code.local_code(group);
    std::vector<int> dead;
    for (int i = 0; i < p.n_local(); ++i)
        if (!st.is_alive(group, i)) dead.push_back(i);
    if (dead.empty()) return {};
    if (static_cast<int>(dead.size()) > p.u - 1)
        throw InsufficientHelpers("more than u-1 local failures; group must be repaired as a whole");
    TransferLedger ledger;
    if (p.n_local() - static_cast<int>(dead.size()) >= lc.params().d_helpers) {
        for (int idx : dead) ledger += repair_node_msr_part(code, st, {group, idx}, trace);
        return ledger;
    }
    std::map<int, Block> avail;
    for (int i = 0; i < p.n_local() && static_cast<int>(avail.size()) < p.r; ++i)
        if (st.is_alive(group, i)) avail[i] = st.block(group, i);
    const auto msg = lc.decode(avail);
    const auto cw = lc.encode(msg);
    for (const auto& [idx, blk] : avail) {
        detail::record(trace, detail::transfer_event(group, group,
                                                     "helper_payload(" + std::to_string(group) + ":" +
                                                         std::to_string(idx) + ")",
                                                     static_cast<long long>(blk.size())));
        ledger.symbols_moved += static_cast<long long>(blk.size());
        ++ledger.nodes_contacted;
    }
    for (int idx : dead) {
        st.block(group, idx) = cw[idx];
        st.alive[group][idx] = true;
    }
    detail::record(trace, detail::compute_event(group, "decode_and_re_encode"));
    return ledger;
}

namespace detail {

inline void require_group_repair_capable(const CodeParams& p) {
    if (p.delta == 0 || !p.group_repair_capable())
        throw CapabilityMissing("group repair needs u - 1 >= r and delta >= 1 (u = " +
                                std::to_string(p.u) + ", r = " + std::to_string(p.r) +
                                ", delta = " + std::to_string(p.delta) + ")");
    if (p.delta < p.r)
        throw CapabilityMissing("group repair recovers only delta parity blocks per chain; "
                                "needs delta >= r (delta = " + std::to_string(p.delta) +
                                ", r = " + std::to_string(p.r) + ")");
}

// chain that recovers group g's local-code part through helper h = g -/+ 1,
// whose distributed parity is xored with the parity of src = g -/+ 2
inline void emit_chain(const Code& code, RepairPlan& plan, int g, int h, int src) {
    const auto& p = code.params();
    const long long parity_symbols = static_cast<long long>(p.u - 1) * code.gamma();
    const long long recovered_symbols = static_cast<long long>(p.delta) * code.gamma();
    plan.steps.push_back(Step::transfer(src, h, PayloadKind::MsrParityBlocks, src, parity_symbols));
    plan.steps.push_back(Step::compute(h, ComputeAction::XorParities, g));
    plan.steps.push_back(Step::transfer(h, g, PayloadKind::RecoveredParity, g, recovered_symbols));
    plan.steps.push_back(Step::compute(g, ComputeAction::DecodeFromParity));
    plan.steps.push_back(Step::compute(g, ComputeAction::ReEncode));
}

inline void emit_distributed_rebuild(const Code& code, RepairPlan& plan, int g) {
    const auto& p = code.params();
    const auto [left, right] = code.adjacent_groups(g);
    const long long parity_symbols = static_cast<long long>(p.u - 1) * code.gamma();
    plan.steps.push_back(Step::transfer(left, g, PayloadKind::MsrParityBlocks, left, parity_symbols));
    plan.steps.push_back(Step::transfer(right, g, PayloadKind::MsrParityBlocks, right, parity_symbols));
    plan.steps.push_back(Step::compute(g, ComputeAction::RebuildDistributedParity));
}

} // namespace detail

enum class ChainVariant { Left, Right };

// The three-helper repair of one failed group g: the dist parity of a live
// neighbour is stripped down to g's parity with the help of the next group
// over, g decodes its message from that parity, re-encodes, and finally
// rebuilds its own dist parity from both neighbours.
inline RepairPlan plan_single_group_repair(const Code& code, const ClusterState& st, int g,
                                           ChainVariant variant = ChainVariant::Left) {
    const auto& p = code.params();
    detail::require_group_repair_capable(p);
    const int m = p.m;
    const int h = variant == ChainVariant::Left ? (g + m - 1) % m : (g + 1) % m;
    const int src = variant == ChainVariant::Left ? (g + m - 2) % m : (g + 2) % m;
    const auto [left, right] = code.adjacent_groups(g);

    if (!detail::range_alive(st, src, p.r, p.n_local()))
        throw HelperGroupDown("parity source group " + std::to_string(src) + " unavailable");
    if (!detail::range_alive(st, h, p.r, p.n_local()) ||
        !detail::range_alive(st, h, p.n_local(), p.group_width()))
        throw HelperGroupDown("chain helper group " + std::to_string(h) + " unavailable");
    for (int far : {left, right})
        if (!detail::range_alive(st, far, p.r, p.n_local()))
            throw HelperGroupDown("parity neighbour group " + std::to_string(far) + " unavailable");

    RepairPlan plan;
    plan.repaired_groups = {g};
    detail::emit_chain(code, plan, g, h, src);
    detail::emit_distributed_rebuild(code, plan, g);
    plan.helper_groups = {src, h, left, right};
    plan.helper_groups.erase(g);
    return plan;
}

// Fig-9-style repair of two adjacent failed groups: the left group recovers
// through its left chain, the right group through its right chain, and the
// pair exchange their freshly re-encoded parities to rebuild both
// distributed parts. The mutually repaired pair is not counted as helpers.
inline RepairPlan plan_adjacent_pair_repair(const Code& code, const ClusterState& st, int a, int b) {
    const auto& p = code.params();
    detail::require_group_repair_capable(p);
    const int m = p.m;
    if ((a + 1) % m != b) throw ScenarioInvalid("groups are not adjacent in order (a, a+1)");
    const int src_a = (a + m - 2) % m, h_a = (a + m - 1) % m;
    const int src_b = (b + 2) % m, h_b = (b + 1) % m;
    for (int helper : {src_a, h_a, src_b, h_b}) {
        if (helper == a || helper == b)
            throw HelperGroupDown("helper group " + std::to_string(helper) +
                                  " coincides with a failed group; need m >= 4");
        if (!detail::range_alive(st, helper, p.r, p.n_local()))
            throw HelperGroupDown("helper group " + std::to_string(helper) + " unavailable");
    }
    if (!detail::range_alive(st, h_a, p.n_local(), p.group_width()) ||
        !detail::range_alive(st, h_b, p.n_local(), p.group_width()))
        throw HelperGroupDown("chain helper distributed parity unavailable");

    RepairPlan plan;
    plan.repaired_groups = {a, b};
    detail::emit_chain(code, plan, a, h_a, src_a);
    detail::emit_chain(code, plan, b, h_b, src_b);
    detail::emit_distributed_rebuild(code, plan, a);
    detail::emit_distributed_rebuild(code, plan, b);
    plan.helper_groups = {src_a, h_a, src_b, h_b};
    return plan;
}

// General peeling planner. A failed group's local part becomes schedulable
// once one side offers a live neighbour with intact distributed parity plus
// a parity source that is live or already scheduled; distributed parities
// are rebuilt after every local part is back. Returns nullopt when the
// fixpoint leaves some group unscheduled.
inline std::optional<RepairPlan> plan_group_repair(const Code& code, const ClusterState& st,
                                                   const std::set<int>& failed_groups,
                                                   const std::vector<int>* peel_order = nullptr) {
    const auto& p = code.params();
    if (failed_groups.empty()) return RepairPlan{};
    detail::require_group_repair_capable(p);
    const int m = p.m;
    for (int g : failed_groups)
        if (g < 0 || g >= m) throw ScenarioInvalid("failed group index out of range");

    std::vector<int> order;
    if (peel_order) {
        order = *peel_order;
        if (static_cast<int>(order.size()) != m) throw ScenarioInvalid("peel order must list every group");
    } else {
        order.resize(m);
        for (int g = 0; g < m; ++g) order[g] = g;
    }

    const auto msr_available = [&](int g, const std::set<int>& scheduled) {
        if (failed_groups.count(g)) return scheduled.count(g) > 0;
        return detail::range_alive(st, g, p.r, p.n_local());
    };
    const auto dist_intact = [&](int g) {
        return !failed_groups.count(g) &&
               detail::range_alive(st, g, p.n_local(), p.group_width());
    };

    RepairPlan plan;
    plan.repaired_groups = failed_groups;
    std::set<int> scheduled;
    const auto add_helper = [&](int beneficiary, int helper) {
        if (helper != beneficiary) plan.helper_groups.insert(helper);
    };
    bool progress = true;
    while (progress && scheduled.size() < failed_groups.size()) {
        progress = false;
        for (int g : order) {
            if (!failed_groups.count(g) || scheduled.count(g)) continue;
            const int h_left = (g + m - 1) % m, src_left = (g + m - 2) % m;
            const int h_right = (g + 1) % m, src_right = (g + 2) % m;
            int h = -1, src = -1;
            if (dist_intact(h_left) && msr_available(src_left, scheduled)) {
                h = h_left;
                src = src_left;
            } else if (dist_intact(h_right) && msr_available(src_right, scheduled)) {
                h = h_right;
                src = src_right;
            } else {
                continue;
            }
            detail::emit_chain(code, plan, g, h, src);
            add_helper(g, h);
            add_helper(g, src);
            scheduled.insert(g);
            progress = true;
        }
    }
    if (scheduled.size() < failed_groups.size()) return std::nullopt;
    if (p.delta > 0)
        for (int g : failed_groups) {
            const auto [left, right] = code.adjacent_groups(g);
            if (!msr_available(left, scheduled) || !msr_available(right, scheduled)) return std::nullopt;
            detail::emit_distributed_rebuild(code, plan, g);
            add_helper(g, left);
            add_helper(g, right);
        }
    return plan;
}

// Interpret a plan against a state. Each group may read only its own blocks
// and payloads delivered to it by earlier transfers, so the ledger's symbol
// count is the complete data movement by construction.
inline TransferLedger execute_plan(const Code& code, ClusterState& st, const RepairPlan& plan,
                                   Trace* trace = nullptr) {
    const auto& p = code.params();
    const int gam = code.gamma();
    using Mailbox = std::map<std::string, std::vector<Block>>;
    std::vector<Mailbox> mail(p.m);
    TransferLedger ledger;
    ledger.groups_contacted = static_cast<int>(plan.helper_groups.size());
    std::set<std::pair<int, int>> touched_nodes;

    for (const auto& step : plan.steps) {
        if (step.kind == Step::Kind::Transfer) {
            std::vector<Block> payload;
            const std::string label = payload_label(step.payload, step.payload_group);
            if (step.payload == PayloadKind::RecoveredParity) {
                auto it = mail[step.from_group].find(label);
                if (it == mail[step.from_group].end())
                    throw PlanInvalid("transfer of " + label + " before it was computed at group " +
                                      std::to_string(step.from_group));
                payload = it->second;
            } else {
                if (step.from_group != step.payload_group)
                    throw PlanInvalid("group " + std::to_string(step.from_group) +
                                      " does not hold " + label);
                const int from = step.payload == PayloadKind::MsrParityBlocks ? p.r : 0;
                const int to = step.payload == PayloadKind::MsrParityBlocks ? p.n_local() : p.r;
                for (int i = from; i < to; ++i) {
                    if (!st.is_alive(step.from_group, i))
                        throw PlanInvalid("group " + std::to_string(step.from_group) +
                                          " node " + std::to_string(i) + " is not alive");
                    payload.push_back(st.block(step.from_group, i));
                    touched_nodes.insert({step.from_group, i});
                }
            }
            long long size = 0;
            for (const auto& b : payload) size += static_cast<long long>(b.size());
            if (size != step.symbol_count)
                throw PlanInvalid("transfer size mismatch for " + label + ": planned " +
                                  std::to_string(step.symbol_count) + ", actual " +
                                  std::to_string(size));
            mail[step.to_group][label] = std::move(payload);
            ledger.symbols_moved += size;
            detail::record(trace, detail::transfer_event(step.from_group, step.to_group, label, size));
            continue;
        }

        const int at = step.at_group;
        switch (step.action) {
        case ComputeAction::XorParities: {
            const auto [left, right] = code.adjacent_groups(at);
            const int src = step.target_group == right ? left : right;
            const auto it = mail[at].find(payload_label(PayloadKind::MsrParityBlocks, src));
            if (it == mail[at].end())
                throw PlanInvalid("xor_parities at group " + std::to_string(at) +
                                  " is missing the parity of group " + std::to_string(src));
            std::vector<Block> recovered(p.delta, Block(gam, 0));
            for (int t = 0; t < p.delta; ++t) {
                if (!st.is_alive(at, p.n_local() + t))
                    throw PlanInvalid("xor_parities needs the distributed parity of group " +
                                      std::to_string(at));
                for (int s = 0; s < gam; ++s)
                    recovered[t][s] =
                        static_cast<gf_t>(st.block(at, p.n_local() + t)[s] ^ it->second[t][s]);
            }
            mail[at][payload_label(PayloadKind::RecoveredParity, step.target_group)] =
                std::move(recovered);
            break;
        }
        case ComputeAction::DecodeFromParity: {
            const auto it = mail[at].find(payload_label(PayloadKind::RecoveredParity, at));
            if (it == mail[at].end())
                throw PlanInvalid("decode_from_parity at group " + std::to_string(at) +
                                  " has no recovered parity");
            std::map<int, Block> avail;
            for (int t = 0; t < p.delta; ++t) avail[p.r + t] = it->second[t];
            const auto msg = code.local_code(at).decode(avail);
            for (int i = 0; i < p.r; ++i) {
                st.block(at, i) = msg[i];
                st.alive[at][i] = true;
            }
            break;
        }
        case ComputeAction::ReEncode: {
            LocalMessage msg;
            for (int i = 0; i < p.r; ++i) {
                if (!st.is_alive(at, i))
                    throw PlanInvalid("re_encode before the systematic part of group " +
                                      std::to_string(at) + " is restored");
                msg.push_back(st.block(at, i));
            }
            const auto cw = code.local_code(at).encode(msg);
            for (int i = p.r; i < p.n_local(); ++i) {
                st.block(at, i) = cw[i];
                st.alive[at][i] = true;
            }
            break;
        }
        case ComputeAction::RebuildDistributedParity: {
            const auto [left, right] = code.adjacent_groups(at);
            const auto li = mail[at].find(payload_label(PayloadKind::MsrParityBlocks, left));
            const auto ri = mail[at].find(payload_label(PayloadKind::MsrParityBlocks, right));
            if (li == mail[at].end() || ri == mail[at].end())
                throw PlanInvalid("rebuild_distributed_parity at group " + std::to_string(at) +
                                  " is missing a neighbour parity");
            for (int t = 0; t < p.delta; ++t) {
                Block sum(gam, 0);
                for (int s = 0; s < gam; ++s)
                    sum[s] = static_cast<gf_t>(li->second[t][s] ^ ri->second[t][s]);
                st.block(at, p.n_local() + t) = std::move(sum);
                st.alive[at][p.n_local() + t] = true;
            }
            break;
        }
        }
        detail::record(trace, detail::compute_event(at, action_label(step.action)));
    }
    ledger.nodes_contacted = static_cast<long long>(touched_nodes.size());
    return ledger;
}

} // namespace lccr
