#pragma once

// The constituent local code: a systematic vector code with generator
// [I | P] over n_L = r + u - 1 nodes, reconstructible from any r nodes, with
// single-node exact repair from d helpers at beta symbols each.
//
// Two interchangeable backends:
//   Scalar       : gamma = 1, P is a Cauchy matrix, repair degenerates to
//                   decode-from-r-nodes (d = r, beta = 1). Cheap enough for
//                   exhaustive verification over tiny fields.
//   ProductMatrix: d = 2r - 2, gamma = r - 1, beta = 1. The classic
//                   product-matrix minimum-storage construction (message
//                   packed into two symmetric matrices, Vandermonde encoding
//                   rows), precoded so the first r nodes hold the message
//                   verbatim. Requires u >= r so that d <= n_L - 1.

#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "lccr/errors.hpp"
#include "lccr/field.hpp"
#include "lccr/matrix.hpp"

namespace lccr {

using Block = std::vector<gf_t>;         // gamma symbols, one node's share
using LocalMessage = std::vector<Block>; // r blocks

enum class Backend { Scalar, ProductMatrix };

inline const char* backend_name(Backend b) {
    return b == Backend::Scalar ? "scalar" : "product-matrix";
}

struct LocalCodeParams {
    int r = 0;         // information node count
    int u = 0;         // n_L - r + 1; block-level distance of the local code
    int n_local = 0;   // r + u - 1
    int gamma = 0;     // symbols per node
    int d_helpers = 0; // repair degree
    int beta = 0;      // symbols downloaded per helper
    Backend backend = Backend::Scalar;

    int message_symbols() const { return r * gamma; }
    int parity_nodes() const { return u - 1; }
};

namespace detail {

// flatten blocks into one symbol vector (block-major)
inline std::vector<gf_t> flatten(const std::vector<Block>& blocks) {
    std::vector<gf_t> out;
    for (const auto& b : blocks) out.insert(out.end(), b.begin(), b.end());
    return out;
}

inline std::vector<Block> unflatten(std::span<const gf_t> flat, int gamma) {
    std::vector<Block> out;
    for (std::size_t i = 0; i < flat.size(); i += gamma)
        out.emplace_back(flat.begin() + i, flat.begin() + i + gamma);
    return out;
}

} // namespace detail

class LocalCode {
public:
    // Scalar backend. The parity matrix defaults to the Cauchy matrix on
    // supports {0..r-1} x {r+support_offset .. r+support_offset+u-2}; pass an
    // explicit r x (u-1) matrix to pin a particular code.
    static LocalCode scalar(const Field& f, int r, int u,
                            std::optional<Matrix> parity = std::nullopt,
                            int support_offset = 0) {
        validate_ru(r, u);
        LocalCode lc(f);
        lc.params_ = {r, u, r + u - 1, 1, r, 1, Backend::Scalar};
        if (parity) {
            if (parity->rows != static_cast<std::size_t>(r) ||
                parity->cols != static_cast<std::size_t>(u - 1))
                throw DimensionMismatch("scalar parity matrix must be r x (u-1)");
            lc.parity_ = std::move(*parity);
        } else if (r == 1 && static_cast<unsigned>(u) > f.order()) {
            // no room for a cauchy support, but for r = 1 the all-ones row
            // is MDS over any field (every entry nonzero)
            lc.parity_ = Matrix(1, u - 1);
            for (auto& v : lc.parity_.data) v = 1;
        } else {
            if (static_cast<unsigned>(r + support_offset + u - 1) > f.order())
                throw BadSupport("field too small for cauchy support: need " +
                                 std::to_string(r + support_offset + u - 1) + " elements in GF(" +
                                 std::to_string(f.order()) + ")");
            std::vector<gf_t> xs(r), ys(u - 1);
            for (int i = 0; i < r; ++i) xs[i] = static_cast<gf_t>(i);
            for (int j = 0; j < u - 1; ++j) ys[j] = static_cast<gf_t>(r + support_offset + j);
            lc.parity_ = cauchy_matrix(f, xs, ys);
        }
        lc.build_generator();
        return lc;
    }

    static LocalCode product_matrix(const Field& f, int r, int u) {
        validate_ru(r, u);
        if (r < 2) throw std::invalid_argument("product-matrix backend needs r >= 2");
        if (u < r) throw std::invalid_argument("product-matrix backend needs u >= r so that d <= n_L - 1");
        LocalCode lc(f);
        const int alpha = r - 1;
        lc.params_ = {r, u, r + u - 1, alpha, 2 * r - 2, 1, Backend::ProductMatrix};
        lc.choose_supports();
        lc.build_pm_generator();
        return lc;
    }

    const LocalCodeParams& params() const { return params_; }
    const Field& field() const { return field_; }

    // rGamma x (u-1)Gamma scalar map from flattened message to flattened parity
    const Matrix& parity_generator() const { return parity_; }
    // rGamma x n_L*Gamma systematic generator [I | P]
    const Matrix& generator() const { return generator_; }

    std::vector<Block> encode(const LocalMessage& msg) const {
        check_message(msg);
        const auto flat = detail::flatten(msg);
        const auto parity = vec_mat(field_, flat, parity_);
        std::vector<Block> out = msg;
        auto pblocks = detail::unflatten(parity, params_.gamma);
        out.insert(out.end(), pblocks.begin(), pblocks.end());
        return out;
    }

    LocalMessage decode(const std::map<int, Block>& available) const {
        if (static_cast<int>(available.size()) < params_.r)
            throw InsufficientBlocks("decode needs at least " + std::to_string(params_.r) +
                                     " blocks, got " + std::to_string(available.size()));
        const int g = params_.gamma;
        Matrix a(available.size() * g, params_.message_symbols());
        std::vector<gf_t> b;
        std::size_t row = 0;
        for (const auto& [idx, block] : available) {
            check_block(idx, block);
            for (int s = 0; s < g; ++s, ++row) {
                for (std::size_t t = 0; t < a.cols; ++t)
                    a.at(row, t) = generator_.at(t, static_cast<std::size_t>(idx) * g + s);
                b.push_back(block[s]);
            }
        }
        auto res = solve_exact(field_, std::move(a), std::move(b));
        if (res.status == SolveStatus::Inconsistent)
            throw InconsistentBlocks("available blocks are not a codeword restriction");
        if (res.status == SolveStatus::RankDeficient)
            throw InsufficientBlocks("available blocks do not determine the message");
        return detail::unflatten(res.x, g);
    }

    LocalMessage decode_from_parity(const std::vector<Block>& parity_blocks) const {
        if (params_.u - 1 < params_.r)
            throw CapabilityMissing("decode from parity needs u - 1 >= r (u = " +
                                    std::to_string(params_.u) + ", r = " + std::to_string(params_.r) + ")");
        if (static_cast<int>(parity_blocks.size()) != params_.parity_nodes())
            throw DimensionMismatch("expected u - 1 parity blocks");
        std::map<int, Block> avail;
        for (int j = 0; j < params_.parity_nodes(); ++j) avail[params_.r + j] = parity_blocks[j];
        return decode(avail);
    }

    // what helper `helper` sends toward failed node `failed` (beta symbols)
    Block repair_payload(int helper, const Block& content, int failed) const {
        check_block(helper, content);
        check_index(failed);
        if (params_.backend == Backend::Scalar) return content;
        gf_t acc = 0;
        for (int s = 0; s < params_.gamma; ++s)
            acc ^= field_.mul(content[s], field_.pow(supports_[failed], static_cast<unsigned>(s)));
        return {acc};
    }

    Block repair_node(int failed, const std::map<int, Block>& helper_payloads) const {
        check_index(failed);
        if (static_cast<int>(helper_payloads.size()) != params_.d_helpers)
            throw WrongHelperCount("repair needs exactly " + std::to_string(params_.d_helpers) +
                                   " helpers, got " + std::to_string(helper_payloads.size()));
        if (helper_payloads.count(failed))
            throw WrongHelperCount("failed node cannot serve as its own helper");
        for (const auto& [idx, payload] : helper_payloads) {
            check_index(idx);
            if (static_cast<int>(payload.size()) != params_.beta)
                throw DimensionMismatch("helper payload must carry beta symbols");
        }
        if (params_.backend == Backend::Scalar) {
            LocalMessage msg = decode(helper_payloads);
            const auto flat = detail::flatten(msg);
            Block out(params_.gamma);
            for (int s = 0; s < params_.gamma; ++s) {
                gf_t acc = 0;
                const std::size_t col = static_cast<std::size_t>(failed) * params_.gamma + s;
                for (std::size_t t = 0; t < flat.size(); ++t)
                    acc ^= field_.mul(flat[t], generator_.at(t, col));
                out[s] = acc;
            }
            return out;
        }
        return pm_repair(failed, helper_payloads);
    }

private:
    explicit LocalCode(const Field& f) : field_(f) {}

    static void validate_ru(int r, int u) {
        if (r < 1) throw std::invalid_argument("local code needs r >= 1");
        if (u < 2) throw std::invalid_argument("local code needs u >= 2");
    }

    void check_message(const LocalMessage& msg) const {
        if (static_cast<int>(msg.size()) != params_.r)
            throw DimensionMismatch("message must have r blocks");
        for (const auto& b : msg)
            if (static_cast<int>(b.size()) != params_.gamma)
                throw DimensionMismatch("message block must have gamma symbols");
    }

    void check_index(int idx) const {
        if (idx < 0 || idx >= params_.n_local)
            throw DimensionMismatch("node index out of range: " + std::to_string(idx));
    }

    void check_block(int idx, const Block& b) const {
        check_index(idx);
        if (static_cast<int>(b.size()) != params_.gamma)
            throw DimensionMismatch("block must have gamma symbols");
    }

    void build_generator() {
        const int k = params_.message_symbols();
        const int n = params_.n_local * params_.gamma;
        generator_ = Matrix(k, n);
        for (int i = 0; i < k; ++i) generator_.at(i, i) = 1;
        for (int i = 0; i < k; ++i)
            for (std::size_t j = 0; j < parity_.cols; ++j)
                generator_.at(i, k + j) = parity_.at(i, j);
    }

    // Vandermonde supports: node i encodes with row (1, x_i, ..., x_i^{d-1});
    // the last alpha columns equal lambda_i = x_i^alpha times the first
    // alpha, so the x_i must additionally have distinct alpha-th powers.
    void choose_supports() {
        const int alpha = params_.gamma;
        std::vector<bool> lambda_used(field_.order(), false);
        supports_.clear();
        for (unsigned v = 1; v < field_.order() && static_cast<int>(supports_.size()) < params_.n_local; ++v) {
            const gf_t lam = field_.pow(static_cast<gf_t>(v), static_cast<unsigned>(alpha));
            if (lambda_used[lam]) continue;
            lambda_used[lam] = true;
            supports_.push_back(static_cast<gf_t>(v));
        }
        if (static_cast<int>(supports_.size()) < params_.n_local)
            throw BadSupport("field too small for product-matrix supports: need " +
                             std::to_string(params_.n_local) + " usable elements");
    }

    // node i's raw content: psi_i * M(theta), with M = [S1; S2] symmetric
    std::vector<gf_t> pm_encode_raw(std::span<const gf_t> theta) const {
        const int alpha = params_.gamma;
        const int d = 2 * alpha;
        Matrix m(d, alpha);
        std::size_t off = 0;
        for (int half = 0; half < 2; ++half)
            for (int i = 0; i < alpha; ++i)
                for (int j = i; j < alpha; ++j, ++off) {
                    m.at(half * alpha + i, j) = theta[off];
                    m.at(half * alpha + j, i) = theta[off];
                }
        std::vector<gf_t> out;
        out.reserve(static_cast<std::size_t>(params_.n_local) * alpha);
        for (int node = 0; node < params_.n_local; ++node) {
            const gf_t x = supports_[node];
            for (int c = 0; c < alpha; ++c) {
                gf_t acc = 0;
                for (int t = 0; t < d; ++t)
                    acc ^= field_.mul(field_.pow(x, static_cast<unsigned>(t)), m.at(t, c));
                out.push_back(acc);
            }
        }
        return out;
    }

    void build_pm_generator() {
        const int k = params_.message_symbols();
        // T maps raw message-matrix entries to the first r nodes' content;
        // inverting it makes the code systematic.
        Matrix t(k, k);
        for (int j = 0; j < k; ++j) {
            std::vector<gf_t> theta(k, 0);
            theta[j] = 1;
            const auto raw = pm_encode_raw(theta);
            for (int c = 0; c < k; ++c) t.at(j, c) = raw[c];
        }
        const Matrix t_inv = mat_inv(field_, t);

        const int n = params_.n_local * params_.gamma;
        generator_ = Matrix(k, n);
        for (int j = 0; j < k; ++j) {
            std::vector<gf_t> msg(k, 0);
            msg[j] = 1;
            const auto theta = vec_mat(field_, msg, t_inv);
            const auto raw = pm_encode_raw(theta);
            for (int c = 0; c < n; ++c) generator_.at(j, c) = raw[c];
        }
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j)
                assert(generator_.at(i, j) == (i == j ? 1 : 0));

        parity_ = Matrix(k, n - k);
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < n - k; ++j) parity_.at(i, j) = generator_.at(i, k + j);
    }

    Block pm_repair(int failed, const std::map<int, Block>& payloads) const {
        const int alpha = params_.gamma;
        const int d = params_.d_helpers;
        Matrix psi(d, d);
        std::vector<gf_t> rhs;
        int row = 0;
        for (const auto& [idx, payload] : payloads) {
            const gf_t x = supports_[idx];
            for (int t = 0; t < d; ++t) psi.at(row, t) = field_.pow(x, static_cast<unsigned>(t));
            rhs.push_back(payload[0]);
            ++row;
        }
        auto res = solve_exact(field_, std::move(psi), std::move(rhs));
        if (res.status != SolveStatus::Ok)
            throw InconsistentBlocks("helper payloads do not determine the lost block");
        // res.x = M phi_f^T; content = (S1 phi_f)^T + lambda_f (S2 phi_f)^T
        const gf_t lambda = field_.pow(supports_[failed], static_cast<unsigned>(alpha));
        Block out(alpha);
        for (int c = 0; c < alpha; ++c)
            out[c] = res.x[c] ^ field_.mul(lambda, res.x[alpha + c]);
        return out;
    }

    Field field_;
    LocalCodeParams params_;
    Matrix parity_;            // rGamma x (u-1)Gamma
    Matrix generator_;         // [I | parity_]
    std::vector<gf_t> supports_; // product-matrix x_i, one per node
};

// Per-group local codes for an m-group code. Groups get disjoint Cauchy
// column supports when the field is big enough, otherwise they share one
// parity matrix (nothing downstream requires distinctness).
inline std::vector<LocalCode> make_group_local_codes(const Field& f, Backend backend, int m, int r,
                                                     int u) {
    std::vector<LocalCode> codes;
    codes.reserve(m);
    if (backend == Backend::ProductMatrix) {
        codes.assign(m, LocalCode::product_matrix(f, r, u));
        return codes;
    }
    const bool disjoint = static_cast<unsigned>(r) + static_cast<unsigned>(m) * (u - 1) <= f.order();
    for (int g = 0; g < m; ++g)
        codes.push_back(LocalCode::scalar(f, r, u, std::nullopt, disjoint ? g * (u - 1) : 0));
    return codes;
}

} // namespace lccr
