#pragma once

// Closed-form cost model for the three code families, evaluated as exact
// rationals. These are the analytic counterparts of what the simulator
// measures; where the two disagree (see README, "model vs measured") both
// values are reported side by side rather than reconciled.

#include <stdexcept>
#include <string>

#include "lccr/rational.hpp"

namespace lccr {

enum class Family { Lccr, MsrLocal, MbrLocal };

inline const char* family_name(Family f) {
    switch (f) {
    case Family::Lccr: return "LCCR";
    case Family::MsrLocal: return "MSR_LOCAL";
    case Family::MbrLocal: return "MBR_LOCAL";
    }
    return "?";
}

struct TradeoffPoint {
    Rational per_node_storage;  // Gamma
    Rational repair_bandwidth;  // chi = d * S
    bool operator==(const TradeoffPoint& o) const {
        return per_node_storage == o.per_node_storage && repair_bandwidth == o.repair_bandwidth;
    }
};

namespace detail {

inline void require(bool ok, const char* what) {
    if (!ok) throw std::domain_error(what);
}

inline void check_family_params(int m, int r, int u, int delta) {
    require(m >= 1, "need m >= 1");
    require(r >= 1, "need r >= 1");
    require(u >= 2, "need u >= 2");
    require(delta >= 0, "need delta >= 0");
}

} // namespace detail

// minimum-storage point: (M/k, M d / (k (d - k + 1)))
inline TradeoffPoint msr_point(long long file_size, long long k, long long d) {
    detail::require(k >= 1, "need k >= 1");
    detail::require(k <= d, "need k <= d");
    detail::require(file_size >= 1, "need positive file size");
    return {Rational(file_size, k), Rational(file_size * d, k * (d - k + 1))};
}

// minimum-bandwidth point: storage equals repair bandwidth, 2Md/(2kd - k^2 + k)
inline TradeoffPoint mbr_point(long long file_size, long long k, long long d) {
    detail::require(k >= 1, "need k >= 1");
    detail::require(k <= d, "need k <= d");
    detail::require(file_size >= 1, "need positive file size");
    const Rational v(2 * file_size * d, 2 * k * d - k * k + k);
    return {v, v};
}

inline Rational storage_overhead(Family family, int m, int r, int u, int delta) {
    detail::check_family_params(m, r, u, delta);
    const long long nl = r + u - 1;
    switch (family) {
    case Family::Lccr:
        return Rational(nl + delta, r);
    case Family::MsrLocal:
        return (Rational(nl) + Rational(delta, m)) / r;
    case Family::MbrLocal:
        return (Rational(nl) + Rational(delta, m)) * 2 * (r + u - 2) /
               (Rational(r) * (r + 2 * u - 3));
    }
    throw std::domain_error("unknown family");
}

// extra storage of the minimum-bandwidth variant over the minimum-storage
// one: 2(r + u - 2) / (r + 2u - 3), strictly above 1 for r >= 2, u >= 3
inline Rational gamma_factor(int r, int u) {
    detail::require(r >= 2, "gamma factor needs r >= 2");
    detail::require(u >= 3, "gamma factor needs u >= 3");
    return Rational(2 * (r + u - 2), r + 2 * u - 3);
}

inline Rational node_locality(Family family, int m, int r, int u, int delta) {
    detail::check_family_params(m, r, u, delta);
    const long long nl = r + u - 1;
    switch (family) {
    case Family::Lccr:
        return Rational((nl - 1) * nl + 2LL * (u - 1) * delta, nl + delta);
    case Family::MsrLocal:
    case Family::MbrLocal:
        return Rational((nl - 1) * nl + static_cast<long long>(r) * delta) /
               (Rational(nl) + Rational(delta, m));
    }
    throw std::domain_error("unknown family");
}

inline Rational node_bw_overhead(Family family, int m, int r, int u, int delta) {
    detail::check_family_params(m, r, u, delta);
    const long long nl = r + u - 1;
    switch (family) {
    case Family::Lccr:
        return Rational(nl * nl * (nl - 1), static_cast<long long>(r) * r * (u - 1)) +
               Rational(2LL * (u - 1) * (u - 1), r);
    case Family::MsrLocal:
        return Rational(nl * nl * (nl - 1), static_cast<long long>(r) * r * (u - 1)) + delta;
    case Family::MbrLocal:
        return Rational(2 * nl * (nl - 1), static_cast<long long>(r) * (r + 2 * u - 3)) + delta;
    }
    throw std::domain_error("unknown family");
}

inline int group_locality(Family family, int m) {
    detail::require(m >= 1, "need m >= 1");
    return family == Family::Lccr ? 3 : m;
}

inline Rational group_bw_overhead(Family family, int m, int r, int u, int delta) {
    detail::check_family_params(m, r, u, delta);
    switch (family) {
    case Family::Lccr:
        return Rational(5LL * (u - 1), r);
    case Family::MsrLocal:
        return Rational(delta, r) + m + 1;
    case Family::MbrLocal:
        return Rational(2LL * delta * (r + u - 2), static_cast<long long>(r) * (r + 2 * u - 3)) +
               m + 1;
    }
    throw std::domain_error("unknown family");
}

inline int d_min_formula(Family family, int u, int delta) {
    detail::require(u >= 2, "need u >= 2");
    detail::require(delta >= 0, "need delta >= 0");
    return family == Family::Lccr ? u + 2 * delta : u + delta;
}

inline int n_formula(Family family, int m, int r, int u, int delta) {
    detail::check_family_params(m, r, u, delta);
    const int nl = r + u - 1;
    return family == Family::Lccr ? m * (nl + delta) : m * nl + delta;
}

struct MetricsRow {
    Family family = Family::Lccr;
    int m = 0, r = 0, u = 0, delta = 0;
    int n = 0;
    int d_min = 0;
    Rational storage_overhead;
    Rational node_locality;
    Rational node_bw_overhead;
    int group_locality = 0;
    Rational group_bw_overhead;
    bool group_repairable = false;
};

inline MetricsRow make_metrics_row(Family family, int m, int r, int u, int delta) {
    MetricsRow row;
    row.family = family;
    row.m = m;
    row.r = r;
    row.u = u;
    row.delta = delta;
    row.n = n_formula(family, m, r, u, delta);
    row.d_min = d_min_formula(family, u, delta);
    row.storage_overhead = storage_overhead(family, m, r, u, delta);
    row.node_locality = node_locality(family, m, r, u, delta);
    row.node_bw_overhead = node_bw_overhead(family, m, r, u, delta);
    row.group_locality = group_locality(family, m);
    row.group_bw_overhead = group_bw_overhead(family, m, r, u, delta);
    row.group_repairable = family == Family::Lccr ? u - 1 >= r : delta >= r;
    return row;
}

inline bool validate_row(const MetricsRow& row) {
    return row.n == n_formula(row.family, row.m, row.r, row.u, row.delta) &&
           row.d_min == d_min_formula(row.family, row.u, row.delta);
}

} // namespace lccr
