#pragma once

// Transfer accounting shared by the repair engine, the baseline code, and
// the simulator: a ledger of totals plus an optional step-by-step trace.

#include <string>
#include <vector>

namespace lccr {

struct TransferLedger {
    long long symbols_moved = 0;
    int groups_contacted = 0;
    long long nodes_contacted = 0;

    TransferLedger& operator+=(const TransferLedger& o) {
        symbols_moved += o.symbols_moved;
        groups_contacted += o.groups_contacted;
        nodes_contacted += o.nodes_contacted;
        return *this;
    }
};

struct TraceEvent {
    enum class Kind { Transfer, Compute };
    Kind kind = Kind::Transfer;
    int from_group = -1;
    int to_group = -1;
    int at_group = -1;
    std::string payload; // transfer only
    std::string action;  // compute only
    long long symbols = 0;
};

using Trace = std::vector<TraceEvent>;

namespace detail {

inline void record(Trace* trace, TraceEvent ev) {
    if (trace) trace->push_back(std::move(ev));
}

inline TraceEvent transfer_event(int from, int to, std::string payload, long long symbols) {
    TraceEvent ev;
    ev.kind = TraceEvent::Kind::Transfer;
    ev.from_group = from;
    ev.to_group = to;
    ev.payload = std::move(payload);
    ev.symbols = symbols;
    return ev;
}

inline TraceEvent compute_event(int at, std::string action) {
    TraceEvent ev;
    ev.kind = TraceEvent::Kind::Compute;
    ev.at_group = at;
    ev.action = std::move(action);
    return ev;
}

} // namespace detail

} // namespace lccr
