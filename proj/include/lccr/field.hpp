#pragma once

// Arithmetic over GF(2^w), w in {1,2,4,8}. Elements are uint8_t values in
// [0, 2^w); addition is XOR. Multiplication goes through log/antilog tables
// for w = 8 and direct shift-and-reduce for the tiny fields; the
// shift-and-reduce path stays available as a reference for cross-checking.

#include <array>
#include <cassert>
#include <cstdint>
#include <string>

#include "lccr/errors.hpp"

namespace lccr {

using gf_t = std::uint8_t;

namespace detail {

// degree of a GF(2) polynomial given as a bitmask, -1 for the zero polynomial
inline int poly_degree(unsigned p) {
    int d = -1;
    while (p) { ++d; p >>= 1; }
    return d;
}

// remainder of carry-less division a mod b over GF(2)[x]
inline unsigned poly_mod(unsigned a, unsigned b) {
    const int db = poly_degree(b);
    for (int da = poly_degree(a); da >= db; da = poly_degree(a))
        a ^= b << (da - db);
    return a;
}

// exhaustive divisor test; fine for degree <= 8
inline bool poly_irreducible(unsigned p, int degree) {
    for (int d = 1; d < degree; ++d)
        for (unsigned q = 1u << d; q < (2u << d); ++q)
            if (poly_mod(p, q) == 0) return false;
    return true;
}

} // namespace detail

class Field {
public:
    // width is deduced from the degree of the reduction polynomial,
    // e.g. 0x3 -> GF(2), 0x7 -> GF(4), 0x13 -> GF(16), 0x11D -> GF(256)
    explicit Field(unsigned reduction_poly)
        : poly_(reduction_poly), width_(detail::poly_degree(reduction_poly)) {
        if (width_ != 1 && width_ != 2 && width_ != 4 && width_ != 8)
            throw std::invalid_argument("field width must be 1, 2, 4 or 8 bits, got poly 0x" +
                                        to_hex(reduction_poly));
        if (!detail::poly_irreducible(poly_, static_cast<int>(width_)))
            throw std::invalid_argument("reduction polynomial 0x" + to_hex(reduction_poly) +
                                        " is reducible");
        if (width_ == 8) build_tables();
    }

    static Field gf2()   { return Field(0x3); }
    static Field gf4()   { return Field(0x7); }
    static Field gf16()  { return Field(0x13); }
    static Field gf256() { return Field(0x11D); }

    unsigned width() const { return width_; }
    unsigned poly() const { return poly_; }
    unsigned order() const { return 1u << width_; }
    bool contains(unsigned v) const { return v < order(); }

    gf_t add(gf_t a, gf_t b) const { return a ^ b; }
    gf_t sub(gf_t a, gf_t b) const { return a ^ b; }

    gf_t mul(gf_t a, gf_t b) const {
        assert(contains(a) && contains(b));
        if (width_ != 8) return mul_shift_reduce(a, b);
        if (a == 0 || b == 0) return 0;
        return exp_[log_[a] + log_[b]];
    }

    // reference multiplication: carry-less product reduced mod poly
    gf_t mul_shift_reduce(gf_t a, gf_t b) const {
        assert(contains(a) && contains(b));
        unsigned acc = 0, x = a;
        for (unsigned y = b; y; y >>= 1) {
            if (y & 1) acc ^= x;
            x <<= 1;
            if (x & order()) x ^= poly_;
        }
        return static_cast<gf_t>(acc);
    }

    gf_t inv(gf_t a) const {
        if (a == 0) throw ZeroInverse("zero has no multiplicative inverse");
        if (width_ == 8) return exp_[255 - log_[a]];
        for (unsigned b = 1; b < order(); ++b)
            if (mul(a, static_cast<gf_t>(b)) == 1) return static_cast<gf_t>(b);
        throw ZeroInverse("no inverse found; field tables corrupt");
    }

    gf_t div(gf_t a, gf_t b) const { return mul(a, inv(b)); }

    gf_t pow(gf_t a, unsigned e) const {
        gf_t r = 1;
        for (gf_t x = a; e; e >>= 1) {
            if (e & 1) r = mul(r, x);
            x = mul(x, x);
        }
        return r;
    }

    bool operator==(const Field& o) const { return poly_ == o.poly_; }
    bool operator!=(const Field& o) const { return !(*this == o); }

private:
    static std::string to_hex(unsigned v) {
        static const char* digits = "0123456789ABCDEF";
        std::string s;
        do { s.insert(s.begin(), digits[v & 0xF]); v >>= 4; } while (v);
        return s;
    }

    void build_tables() {
        // find a generator of the multiplicative group, then tabulate powers
        for (unsigned g = 2; g < 256; ++g) {
            unsigned v = 1, period = 0;
            do { v = mul_shift_reduce(static_cast<gf_t>(v), static_cast<gf_t>(g)); ++period; }
            while (v != 1 && period <= 255);
            if (period != 255) continue;
            v = 1;
            for (unsigned i = 0; i < 255; ++i) {
                exp_[i] = static_cast<gf_t>(v);
                log_[v] = static_cast<gf_t>(i);
                v = mul_shift_reduce(static_cast<gf_t>(v), static_cast<gf_t>(g));
            }
            for (unsigned i = 255; i < 510; ++i) exp_[i] = exp_[i - 255];
            return;
        }
        throw std::invalid_argument("no multiplicative generator found; polynomial not irreducible?");
    }

    unsigned poly_;
    unsigned width_;
    std::array<gf_t, 510> exp_{};
    std::array<gf_t, 256> log_{};
};

} // namespace lccr
