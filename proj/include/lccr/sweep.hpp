#pragma once

// Enumerate every valid (m, r, u, delta) at a fixed code length and formula
// distance for each family, evaluate the cost model on each tuple, and emit
// the table as CSV. Re-running a sweep is byte-identical.

#include <cstdio>
#include <fstream>
#include <ostream>
#include <set>
#include <vector>

#include "lccr/errors.hpp"
#include "lccr/metrics.hpp"

namespace lccr {

struct SweepSpec {
    int n = 120;
    int d_min = 16;
    std::set<Family> families = {Family::Lccr, Family::MsrLocal, Family::MbrLocal};
    int min_m = 3;
    int min_r = 2;
    int min_u = 3;
    int min_delta = 1;
    bool require_group_repairable = false;

    void validate() const {
        if (n < 1 || d_min < 2) throw std::domain_error("need n >= 1 and d_min >= 2");
        if (min_m < 1 || min_r < 1 || min_u < 2 || min_delta < 0)
            throw std::domain_error("sweep minimums out of range");
    }
};

struct ParamTuple {
    int m = 0, r = 0, u = 0, delta = 0;
    bool operator==(const ParamTuple& o) const {
        return m == o.m && r == o.r && u == o.u && delta == o.delta;
    }
    bool operator<(const ParamTuple& o) const {
        if (m != o.m) return m < o.m;
        if (r != o.r) return r < o.r;
        if (u != o.u) return u < o.u;
        return delta < o.delta;
    }
};

// All integer solutions of the family's length/distance constraints:
//   LCCR:      delta = u - 1,  u + 2*delta = d_min,  m * (r + u - 1 + delta) = n
//   baselines: u + delta = d_min,  m * (r + u - 1) + delta = n
// sorted by (m, r).
inline std::vector<ParamTuple> enumerate_params(const SweepSpec& spec, Family family) {
    spec.validate();
    std::vector<ParamTuple> out;
    const auto admit = [&](int m, int r, int u, int delta) {
        if (m < spec.min_m || r < spec.min_r || u < spec.min_u || delta < spec.min_delta) return;
        if (spec.require_group_repairable) {
            const bool capable = family == Family::Lccr ? u - 1 >= r : delta >= r;
            if (!capable) return;
        }
        out.push_back({m, r, u, delta});
    };
    if (family == Family::Lccr) {
        if ((spec.d_min + 2) % 3 == 0) {
            const int u = (spec.d_min + 2) / 3;
            const int delta = u - 1;
            const int width = u - 1 + delta;
            for (int m = 1; m <= spec.n; ++m) {
                if (spec.n % m != 0) continue;
                const int r = spec.n / m - width;
                if (r >= 1) admit(m, r, u, delta);
            }
        }
    } else {
        for (int u = 2; u < spec.d_min; ++u) {
            const int delta = spec.d_min - u;
            for (int m = 1; m <= spec.n; ++m) {
                if ((spec.n - delta) % m != 0) continue;
                const int r = (spec.n - delta) / m - (u - 1);
                if (r >= 1) admit(m, r, u, delta);
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

inline std::vector<MetricsRow> run_sweep(const SweepSpec& spec) {
    std::vector<MetricsRow> rows;
    for (Family family : {Family::Lccr, Family::MsrLocal, Family::MbrLocal}) {
        if (!spec.families.count(family)) continue;
        for (const auto& t : enumerate_params(spec, family))
            rows.push_back(make_metrics_row(family, t.m, t.r, t.u, t.delta));
    }
    return rows;
}

// decimal with 6 significant digits, trailing zeros kept
inline std::string format_decimal(const Rational& v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%#.6g", v.to_double());
    return buf;
}

inline constexpr const char* kCsvHeader =
    "family,m,r,u,delta,n,d_min,storage_overhead,node_locality,node_bw_overhead,"
    "group_locality,group_bw_overhead,group_repairable";

inline void emit_csv(const std::vector<MetricsRow>& rows, std::ostream& os) {
    os << kCsvHeader << "\n";
    for (const auto& row : rows) {
        os << family_name(row.family) << ',' << row.m << ',' << row.r << ',' << row.u << ','
           << row.delta << ',' << row.n << ',' << row.d_min << ','
           << format_decimal(row.storage_overhead) << ',' << format_decimal(row.node_locality)
           << ',' << format_decimal(row.node_bw_overhead) << ','
           << format_decimal(Rational(row.group_locality)) << ','
           << format_decimal(row.group_bw_overhead) << ','
           << (row.group_repairable ? "true" : "false") << "\n";
    }
}

inline void emit_csv_file(const std::vector<MetricsRow>& rows, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open " + path + " for writing");
    emit_csv(rows, os);
    if (!os.good()) throw IoError("short write to " + path);
}

} // namespace lccr
