#pragma once

// The assembled code: m local groups laid out side by side, where group g
// holds its own systematic and parity blocks followed by delta distributed
// parity blocks, each the sum of the corresponding parity blocks of the two
// adjacent groups. Groups and nodes are 0-indexed; group g's neighbours are
// (g-1) mod m and (g+1) mod m.

#include <cstdint>
#include <string>
#include <vector>

#include "lccr/local_code.hpp"

namespace lccr {

enum class NodeKind { Systematic, MsrParity, DistributedParity };

struct NodeId {
    int group = 0;
    int index = 0;
    bool operator==(const NodeId& o) const { return group == o.group && index == o.index; }
    bool operator<(const NodeId& o) const {
        return group != o.group ? group < o.group : index < o.index;
    }
};

struct CodeParams {
    int m = 0;     // group count
    int r = 0;     // information nodes per group
    int u = 0;     // local block distance
    int delta = 0; // distributed parity nodes per group
    Backend backend = Backend::Scalar;
    unsigned field_poly = 0x11D;

    int n_local() const { return r + u - 1; }
    int group_width() const { return n_local() + delta; }
    int n_nodes() const { return m * group_width(); }
    int k_blocks() const { return m * r; }
    bool full_interleaving() const { return delta == u - 1; }
    bool group_repair_capable() const { return u - 1 >= r; }

    void validate() const {
        if (m < 3) throw std::invalid_argument("need m >= 3 groups");
        if (r < 1) throw std::invalid_argument("need r >= 1");
        if (u < 2) throw std::invalid_argument("need u >= 2");
        if (delta < 0 || delta > u - 1)
            throw std::invalid_argument("need 0 <= delta <= u - 1; each group has only u - 1 "
                                        "parity blocks to interleave");
    }
};

struct ClusterState {
    int m = 0;
    int width = 0;
    int gamma = 0;
    std::vector<std::vector<Block>> blocks; // [m][width]
    std::vector<std::vector<bool>> alive;   // [m][width]

    ClusterState() = default;
    ClusterState(int m_, int width_, int gamma_)
        : m(m_), width(width_), gamma(gamma_),
          blocks(m_, std::vector<Block>(width_, Block(gamma_, 0))),
          alive(m_, std::vector<bool>(width_, true)) {}

    Block& block(int g, int i) { return blocks[g][i]; }
    const Block& block(int g, int i) const { return blocks[g][i]; }
    bool is_alive(int g, int i) const { return alive[g][i]; }

    void erase_node(int g, int i) {
        alive[g][i] = false;
        blocks[g][i].assign(gamma, 0);
    }
    void erase_group(int g) {
        for (int i = 0; i < width; ++i) erase_node(g, i);
    }
    bool all_alive() const {
        for (const auto& row : alive)
            for (bool a : row)
                if (!a) return false;
        return true;
    }
};

class Code {
public:
    explicit Code(const CodeParams& p)
        : params_(validated(p)), field_(p.field_poly),
          locals_(make_group_local_codes(field_, p.backend, p.m, p.r, p.u)) {
        build_global_generator();
    }

    const CodeParams& params() const { return params_; }
    const Field& field() const { return field_; }
    const LocalCode& local_code(int g) const { return locals_[g]; }
    int gamma() const { return locals_[0].params().gamma; }
    int k_symbols() const { return params_.k_blocks() * gamma(); }

    NodeKind node_kind(int index) const {
        if (index < params_.r) return NodeKind::Systematic;
        if (index < params_.n_local()) return NodeKind::MsrParity;
        return NodeKind::DistributedParity;
    }

    std::pair<int, int> adjacent_groups(int g) const {
        const int m = params_.m;
        return {(g + m - 1) % m, (g + 1) % m};
    }

    ClusterState encode(const std::vector<LocalMessage>& message) const {
        if (static_cast<int>(message.size()) != params_.m)
            throw DimensionMismatch("message must have m group parts");
        ClusterState st(params_.m, params_.group_width(), gamma());
        std::vector<std::vector<Block>> parity(params_.m);
        for (int g = 0; g < params_.m; ++g) {
            const auto codeword = locals_[g].encode(message[g]);
            for (int i = 0; i < params_.n_local(); ++i) st.block(g, i) = codeword[i];
            parity[g].assign(codeword.begin() + params_.r, codeword.end());
        }
        for (int g = 0; g < params_.m; ++g) {
            const auto [left, right] = adjacent_groups(g);
            for (int t = 0; t < params_.delta; ++t) {
                Block& dst = st.block(g, params_.n_local() + t);
                for (int s = 0; s < gamma(); ++s)
                    dst[s] = field_.add(parity[left][t][s], parity[right][t][s]);
            }
        }
        return st;
    }

    std::vector<LocalMessage> systematic_message(const ClusterState& st) const {
        std::vector<LocalMessage> msg(params_.m);
        for (int g = 0; g < params_.m; ++g)
            for (int i = 0; i < params_.r; ++i) msg[g].push_back(st.block(g, i));
        return msg;
    }

    bool verify(const ClusterState& st) const {
        if (!st.all_alive()) return false;
        const auto fresh = encode(systematic_message(st));
        return fresh.blocks == st.blocks;
    }

    // K_symbols x (n * gamma) scalar generator; block-column layout matches
    // the group/node order of ClusterState.
    const Matrix& global_generator() const { return generator_; }

    std::vector<LocalMessage> decode_full(const ClusterState& st) const;

    // minimum number of nonzero node blocks over all nonzero codewords,
    // by exhaustive message enumeration
    int min_distance_bruteforce() const {
        const double bits = static_cast<double>(k_symbols()) * field_.width();
        if (bits > 24)
            throw TooLarge("message space exceeds 2^24; " + std::to_string(k_symbols()) +
                           " symbols over GF(" + std::to_string(field_.order()) + ")");
        const std::uint64_t q = field_.order();
        std::uint64_t total = 1;
        for (int i = 0; i < k_symbols(); ++i) total *= q;
        const int g = gamma();
        int best = params_.n_nodes() + 1;
        std::vector<gf_t> msg(k_symbols(), 0);
        for (std::uint64_t counter = 1; counter < total; ++counter) {
            std::uint64_t c = counter;
            for (int i = 0; i < k_symbols(); ++i) {
                msg[i] = static_cast<gf_t>(c % q);
                c /= q;
            }
            const auto codeword = vec_mat(field_, msg, generator_);
            int weight = 0;
            for (int node = 0; node < params_.n_nodes(); ++node) {
                for (int s = 0; s < g; ++s)
                    if (codeword[static_cast<std::size_t>(node) * g + s] != 0) {
                        ++weight;
                        break;
                    }
            }
            if (weight < best) best = weight;
        }
        return best;
    }

private:
    static CodeParams validated(CodeParams p) {
        p.validate();
        return p;
    }

    std::size_t column_of(int group, int node, int sym) const {
        return (static_cast<std::size_t>(group) * params_.group_width() + node) * gamma() + sym;
    }

    void build_global_generator() {
        const int g = gamma();
        const int k = k_symbols();
        generator_ = Matrix(k, static_cast<std::size_t>(params_.n_nodes()) * g);
        for (int grp = 0; grp < params_.m; ++grp) {
            const std::size_t row0 = static_cast<std::size_t>(grp) * params_.r * g;
            const Matrix& pexp = locals_[grp].parity_generator();
            for (int i = 0; i < params_.r * g; ++i) {
                // systematic part of the own group
                generator_.at(row0 + i, column_of(grp, i / g, i % g)) = 1;
                // parity part of the own group
                for (std::size_t j = 0; j < pexp.cols; ++j)
                    generator_.at(row0 + i, column_of(grp, params_.r + static_cast<int>(j) / g,
                                                      static_cast<int>(j) % g)) = pexp.at(i, j);
                // the first delta parity blocks feed both neighbours'
                // distributed parity
                const auto [left, right] = adjacent_groups(grp);
                for (int j = 0; j < params_.delta * g; ++j) {
                    const gf_t v = pexp.at(i, j);
                    generator_.at(row0 + i, column_of(left, params_.n_local() + j / g, j % g)) ^= v;
                    generator_.at(row0 + i, column_of(right, params_.n_local() + j / g, j % g)) ^= v;
                }
            }
        }
    }

    CodeParams params_;
    Field field_;
    std::vector<LocalCode> locals_;
    Matrix generator_;
};

// Erasure decoder for one fixed aliveness pattern, reusable across stripes:
// the K independent equations are selected and inverted once, so decoding a
// stripe is a matrix-vector product plus a consistency pass.
class StripeDecoder {
public:
    StripeDecoder(const Code& code, const std::vector<std::vector<bool>>& alive)
        : field_(code.field()), k_(code.k_symbols()) {
        const auto& p = code.params();
        const auto& gen = code.global_generator();
        const int gam = code.gamma();
        std::vector<std::size_t> cols;
        for (int grp = 0; grp < p.m; ++grp)
            for (int i = 0; i < p.group_width(); ++i) {
                if (!alive[grp][i]) continue;
                for (int s = 0; s < gam; ++s)
                    cols.push_back((static_cast<std::size_t>(grp) * p.group_width() + i) * gam + s);
            }
        rows_ = Matrix(cols.size(), static_cast<std::size_t>(k_));
        for (std::size_t e = 0; e < cols.size(); ++e)
            for (std::size_t t = 0; t < rows_.cols; ++t) rows_.at(e, t) = gen.at(t, cols[e]);

        // pick K independent equations by elimination on a scratch copy
        Matrix scratch = rows_;
        std::vector<std::size_t> pivot_rows;
        std::vector<bool> used(scratch.rows, false);
        for (std::size_t col = 0; col < scratch.cols; ++col) {
            std::size_t piv = scratch.rows;
            for (std::size_t r = 0; r < scratch.rows; ++r)
                if (!used[r] && scratch.at(r, col) != 0) {
                    piv = r;
                    break;
                }
            if (piv == scratch.rows) continue;
            used[piv] = true;
            pivot_rows.push_back(piv);
            const gf_t scale = field_.inv(scratch.at(piv, col));
            for (std::size_t j = 0; j < scratch.cols; ++j)
                scratch.at(piv, j) = field_.mul(scratch.at(piv, j), scale);
            for (std::size_t r = 0; r < scratch.rows; ++r) {
                if (r == piv) continue;
                const gf_t factor = scratch.at(r, col);
                if (factor == 0) continue;
                for (std::size_t j = 0; j < scratch.cols; ++j)
                    scratch.at(r, j) ^= field_.mul(factor, scratch.at(piv, j));
            }
        }
        if (static_cast<int>(pivot_rows.size()) < k_)
            throw Unrecoverable("surviving blocks have rank below the code dimension");
        selected_ = std::move(pivot_rows);
        Matrix square(k_, k_);
        for (int i = 0; i < k_; ++i)
            for (int j = 0; j < k_; ++j) square.at(i, j) = rows_.at(selected_[i], j);
        solver_ = mat_inv(field_, square);
    }

    // surviving symbols in group-major node order; returns the message symbols
    std::vector<gf_t> decode(std::span<const gf_t> surviving) const {
        if (surviving.size() != rows_.rows)
            throw DimensionMismatch("surviving symbol count does not match the aliveness pattern");
        std::vector<gf_t> x(k_, 0);
        for (int i = 0; i < k_; ++i) {
            const gf_t b = surviving[selected_[i]];
            if (b == 0) continue;
            for (int j = 0; j < k_; ++j) x[j] ^= field_.mul(solver_.at(j, i), b);
        }
        for (std::size_t e = 0; e < rows_.rows; ++e) {
            gf_t acc = 0;
            for (int j = 0; j < k_; ++j) acc ^= field_.mul(rows_.at(e, j), x[j]);
            if (acc != surviving[e])
                throw InconsistentBlocks("surviving blocks are not a codeword restriction");
        }
        return x;
    }

private:
    Field field_;
    int k_;
    Matrix rows_;
    Matrix solver_;
    std::vector<std::size_t> selected_;
};

inline std::vector<LocalMessage> Code::decode_full(const ClusterState& st) const {
    StripeDecoder decoder(*this, st.alive);
    std::vector<gf_t> surviving;
    for (int grp = 0; grp < params_.m; ++grp)
        for (int i = 0; i < params_.group_width(); ++i) {
            if (!st.is_alive(grp, i)) continue;
            const Block& b = st.block(grp, i);
            surviving.insert(surviving.end(), b.begin(), b.end());
        }
    const auto x = decoder.decode(surviving);
    std::vector<LocalMessage> out(params_.m);
    std::size_t off = 0;
    const int g = gamma();
    for (int grp = 0; grp < params_.m; ++grp)
        for (int i = 0; i < params_.r; ++i) {
            out[grp].emplace_back(x.begin() + off, x.begin() + off + g);
            off += g;
        }
    return out;
}

} // namespace lccr
