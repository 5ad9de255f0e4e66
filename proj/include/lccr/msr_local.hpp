#pragma once

// The baseline layout this code family is measured against: m
// support-disjoint local codes plus delta global parities. A parent
// systematic MDS code of length n_L + delta and dimension r supplies both:
// puncturing it to the first n_L coordinates gives the local code, its last
// delta parity columns give the global parity map, and the global parities
// are those columns applied to the sum of all group messages.
//
// The parent here is the scalar Cauchy backend (gamma = 1); every comparison
// in the toolkit is at symbol/group granularity, which a vector parent would
// not change.

#include <optional>
#include <set>
#include <vector>

#include "lccr/ledger.hpp"
#include "lccr/local_code.hpp"

namespace lccr {

struct MsrLocalParams {
    int m = 0;
    int r = 0;
    int u = 0;
    int delta = 0;
    unsigned field_poly = 0x11D;

    int n_local() const { return r + u - 1; }
    int n_nodes() const { return m * n_local() + delta; }
    int k_blocks() const { return m * r; }
    bool group_repair_capable() const { return delta >= r; }

    void validate() const {
        if (m < 2) throw std::invalid_argument("need m >= 2 groups");
        if (r < 1) throw std::invalid_argument("need r >= 1");
        if (u < 2) throw std::invalid_argument("need u >= 2");
        if (delta < 1) throw std::invalid_argument("need delta >= 1 global parities");
    }
};

// node address: a local node (group, index) or one of the delta global nodes
struct MsrNodeLoc {
    bool global = false;
    int group = 0; // ignored when global
    int index = 0; // local: [0, n_L); global: [0, delta)
};

struct MsrLocalState {
    int m = 0;
    int n_local = 0;
    int delta = 0;
    std::vector<std::vector<Block>> locals; // m x n_L, one symbol each
    std::vector<Block> globals;             // delta
    std::vector<std::vector<bool>> local_alive;
    std::vector<bool> global_alive;

    void erase_local(int g, int i) {
        local_alive[g][i] = false;
        locals[g][i] = {0};
    }
    void erase_global(int t) {
        global_alive[t] = false;
        globals[t] = {0};
    }
    void erase_group(int g) {
        for (int i = 0; i < n_local; ++i) erase_local(g, i);
    }
};

class MsrLocalCode {
public:
    explicit MsrLocalCode(const MsrLocalParams& p,
                          std::optional<Matrix> parent_parity = std::nullopt)
        : params_(validated(p)), field_(p.field_poly),
          parent_(LocalCode::scalar(field_, p.r, p.u + p.delta, std::move(parent_parity))) {
        build_global_generator();
    }

    const MsrLocalParams& params() const { return params_; }
    const Field& field() const { return field_; }
    const LocalCode& parent() const { return parent_; }
    const Matrix& global_generator() const { return generator_; }

    MsrLocalState encode(const std::vector<LocalMessage>& message) const {
        if (static_cast<int>(message.size()) != params_.m)
            throw DimensionMismatch("message must have m group parts");
        MsrLocalState st;
        st.m = params_.m;
        st.n_local = params_.n_local();
        st.delta = params_.delta;
        st.locals.assign(params_.m, {});
        st.local_alive.assign(params_.m, std::vector<bool>(params_.n_local(), true));
        st.global_alive.assign(params_.delta, true);
        LocalMessage sum(params_.r, Block{0});
        for (int g = 0; g < params_.m; ++g) {
            const auto cw = parent_.encode(message[g]);
            st.locals[g].assign(cw.begin(), cw.begin() + params_.n_local());
            for (int i = 0; i < params_.r; ++i) sum[i][0] ^= message[g][i][0];
        }
        const auto sum_cw = parent_.encode(sum);
        st.globals.assign(sum_cw.begin() + params_.n_local(), sum_cw.end());
        return st;
    }

    std::vector<LocalMessage> decode_full(const MsrLocalState& st) const {
        std::vector<std::size_t> cols;
        std::vector<gf_t> rhs;
        for (int g = 0; g < params_.m; ++g)
            for (int i = 0; i < params_.n_local(); ++i)
                if (st.local_alive[g][i]) {
                    cols.push_back(static_cast<std::size_t>(g) * params_.n_local() + i);
                    rhs.push_back(st.locals[g][i][0]);
                }
        for (int t = 0; t < params_.delta; ++t)
            if (st.global_alive[t]) {
                cols.push_back(static_cast<std::size_t>(params_.m) * params_.n_local() + t);
                rhs.push_back(st.globals[t][0]);
            }
        Matrix a(cols.size(), static_cast<std::size_t>(params_.k_blocks()));
        for (std::size_t e = 0; e < cols.size(); ++e)
            for (std::size_t t = 0; t < a.cols; ++t) a.at(e, t) = generator_.at(t, cols[e]);
        auto res = solve_exact(field_, std::move(a), std::move(rhs));
        if (res.status == SolveStatus::Inconsistent)
            throw InconsistentBlocks("surviving blocks are not a codeword restriction");
        if (res.status == SolveStatus::RankDeficient)
            throw Unrecoverable("surviving blocks have rank below the code dimension");
        std::vector<LocalMessage> out(params_.m);
        std::size_t off = 0;
        for (int g = 0; g < params_.m; ++g)
            for (int i = 0; i < params_.r; ++i) out[g].push_back({res.x[off++]});
        return out;
    }

    // Local node: repaired inside its group from r survivors. Global node:
    // the whole global-parity part is recomputed from every group's
    // systematic blocks, mr nodes in total.
    TransferLedger repair_node(MsrLocalState& st, MsrNodeLoc loc, Trace* trace = nullptr) const {
        TransferLedger ledger;
        if (!loc.global) {
            std::map<int, Block> avail;
            for (int i = 0; i < params_.n_local() && static_cast<int>(avail.size()) < params_.r; ++i)
                if (i != loc.index && st.local_alive[loc.group][i]) avail[i] = st.locals[loc.group][i];
            if (static_cast<int>(avail.size()) < params_.r)
                throw InsufficientHelpers("need r surviving nodes in group " +
                                          std::to_string(loc.group));
            const auto msg = punctured_decode(avail);
            const auto cw = parent_.encode(msg);
            for (const auto& [idx, blk] : avail) {
                detail::record(trace, detail::transfer_event(loc.group, loc.group,
                                                             "helper_payload(" +
                                                                 std::to_string(loc.group) + ":" +
                                                                 std::to_string(idx) + ")",
                                                             1));
                ledger.symbols_moved += static_cast<long long>(blk.size());
                ++ledger.nodes_contacted;
            }
            st.locals[loc.group][loc.index] = cw[loc.index];
            st.local_alive[loc.group][loc.index] = true;
            detail::record(trace, detail::compute_event(loc.group, "repair_node"));
            return ledger;
        }
        // global-parity node: repaired as a whole from all m groups
        LocalMessage sum(params_.r, Block{0});
        for (int g = 0; g < params_.m; ++g) {
            for (int i = 0; i < params_.r; ++i) {
                if (!st.local_alive[g][i])
                    throw InsufficientHelpers("systematic node " + std::to_string(i) +
                                              " of group " + std::to_string(g) + " unavailable");
                sum[i][0] ^= st.locals[g][i][0];
            }
            detail::record(trace, detail::transfer_event(g, -1, "systematic(" + std::to_string(g) + ")",
                                                         params_.r));
            ledger.symbols_moved += params_.r;
            ledger.nodes_contacted += params_.r;
        }
        ledger.groups_contacted = params_.m;
        const auto cw = parent_.encode(sum);
        for (int t = 0; t < params_.delta; ++t) {
            st.globals[t] = cw[params_.n_local() + t];
            st.global_alive[t] = true;
        }
        detail::record(trace, detail::compute_event(-1, "rebuild_global_parities"));
        return ledger;
    }

    // One failed group: sum the other groups' messages, peel them off the
    // global parities to isolate the failed group's share, decode, and
    // re-encode the group. Contacts all m - 1 surviving groups plus the
    // global-parity part, which counts as one unit.
    TransferLedger repair_group(MsrLocalState& st, int g, Trace* trace = nullptr) const {
        if (!params_.group_repair_capable())
            throw CapabilityMissing("group repair needs delta >= r (delta = " +
                                    std::to_string(params_.delta) +
                                    ", r = " + std::to_string(params_.r) + ")");
        int failed_groups = 0;
        for (int i = 0; i < params_.m; ++i) {
            bool whole = true;
            for (int j = 0; j < params_.n_local(); ++j) whole = whole && st.local_alive[i][j];
            if (!whole) ++failed_groups;
        }
        if (failed_groups > 1)
            throw MultipleGroupFailures("this construction repairs at most one failed group");

        TransferLedger ledger;
        LocalMessage sum(params_.r, Block{0});
        for (int i = 0; i < params_.m; ++i) {
            if (i == g) continue;
            for (int j = 0; j < params_.r; ++j) {
                if (!st.local_alive[i][j])
                    throw InsufficientHelpers("group " + std::to_string(i) + " unavailable");
                sum[j][0] ^= st.locals[i][j][0];
            }
            detail::record(trace, detail::transfer_event(i, g, "systematic(" + std::to_string(i) + ")",
                                                         params_.r));
            ledger.symbols_moved += params_.r;
            ledger.nodes_contacted += params_.r;
        }
        std::map<int, Block> parity;
        for (int t = 0; t < params_.delta; ++t) {
            if (!st.global_alive[t]) throw InsufficientHelpers("global parity unavailable");
            parity[params_.n_local() + t] = st.globals[t];
        }
        detail::record(trace, detail::transfer_event(-1, g, "global_parities", params_.delta));
        ledger.symbols_moved += params_.delta;
        ledger.nodes_contacted += params_.delta;
        ledger.groups_contacted = params_.m; // m - 1 groups + the global unit

        // strip (sum of others) * P2 off the global parities
        const auto sum_cw = parent_.encode(sum);
        for (int t = 0; t < params_.delta; ++t)
            parity[params_.n_local() + t][0] ^= sum_cw[params_.n_local() + t][0];
        const auto msg = parent_.decode(parity);
        const auto cw = parent_.encode(msg);
        for (int i = 0; i < params_.n_local(); ++i) {
            st.locals[g][i] = cw[i];
            st.local_alive[g][i] = true;
        }
        detail::record(trace, detail::compute_event(g, "decode_and_re_encode"));
        return ledger;
    }

private:
    static MsrLocalParams validated(MsrLocalParams p) {
        p.validate();
        return p;
    }

    // decode a group message from local coordinates of the punctured code
    LocalMessage punctured_decode(const std::map<int, Block>& avail) const {
        return parent_.decode(avail);
    }

    void build_global_generator() {
        const int k = params_.k_blocks();
        const int n = params_.n_nodes();
        const auto& pgen = parent_.parity_generator(); // r x (u - 1 + delta)
        generator_ = Matrix(k, n);
        for (int g = 0; g < params_.m; ++g)
            for (int i = 0; i < params_.r; ++i) {
                const std::size_t row = static_cast<std::size_t>(g) * params_.r + i;
                generator_.at(row, static_cast<std::size_t>(g) * params_.n_local() + i) = 1;
                for (int j = 0; j < params_.u - 1; ++j)
                    generator_.at(row, static_cast<std::size_t>(g) * params_.n_local() + params_.r + j) =
                        pgen.at(i, j);
                for (int t = 0; t < params_.delta; ++t)
                    generator_.at(row, static_cast<std::size_t>(params_.m) * params_.n_local() + t) =
                        pgen.at(i, params_.u - 1 + t);
            }
    }

    MsrLocalParams params_;
    Field field_;
    LocalCode parent_;
    Matrix generator_;
};

} // namespace lccr
