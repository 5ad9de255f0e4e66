#pragma once

// On-disk formats and file-level operations.
//
// A file is split into stripes of K message symbols (zero-padded at the
// tail, true byte length kept in the manifest), each stripe is encoded
// independently, and node (g, i) stores its gamma symbols of every stripe
// concatenated in one chunk file:
//
//   chunk header, little-endian, 14 bytes:
//     magic "LCCR" | version u8 = 1 | group u16 | node u16 | kind u8 |
//     payload_symbols u32
//   payload: one byte per symbol (ceil(w/8) = 1 for w <= 8)
//
// The manifest is JSON: field, params, stripe count, original length, and
// one entry per chunk with a CRC-32C of the whole chunk file.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <span>

#include <json.hpp>

#include "lccr/code.hpp"
#include "lccr/repair.hpp"

namespace lccr {

inline std::uint32_t crc32c(std::span<const unsigned char> data) {
    static const auto table = [] {
        std::array<std::uint32_t, 256> t{};
        for (std::uint32_t i = 0; i < 256; ++i) {
            std::uint32_t c = i;
            for (int k = 0; k < 8; ++k) c = (c >> 1) ^ (0x82F63B78u & (0u - (c & 1)));
            t[i] = c;
        }
        return t;
    }();
    std::uint32_t crc = 0xFFFFFFFFu;
    for (unsigned char b : data) crc = (crc >> 8) ^ table[(crc ^ b) & 0xFF];
    return crc ^ 0xFFFFFFFFu;
}

// file bytes <-> field symbols; sub-byte widths pack low bits first
inline std::vector<gf_t> bytes_to_symbols(std::span<const unsigned char> bytes, unsigned width) {
    std::vector<gf_t> out;
    if (width == 8) {
        out.assign(bytes.begin(), bytes.end());
        return out;
    }
    const unsigned per_byte = 8 / width;
    const gf_t mask = static_cast<gf_t>((1u << width) - 1);
    out.reserve(bytes.size() * per_byte);
    for (unsigned char b : bytes)
        for (unsigned j = 0; j < per_byte; ++j) out.push_back(static_cast<gf_t>(b >> (j * width)) & mask);
    return out;
}

inline std::vector<unsigned char> symbols_to_bytes(std::span<const gf_t> symbols, unsigned width) {
    if (width == 8) return {symbols.begin(), symbols.end()};
    const unsigned per_byte = 8 / width;
    std::vector<unsigned char> out(symbols.size() / per_byte, 0);
    for (std::size_t i = 0; i < out.size(); ++i)
        for (unsigned j = 0; j < per_byte; ++j)
            out[i] |= static_cast<unsigned char>(symbols[i * per_byte + j] << (j * width));
    return out;
}

struct ChunkRef {
    std::string file;
    int group = 0;
    int node = 0;
    NodeKind kind = NodeKind::Systematic;
    std::uint32_t crc = 0;
};

struct Manifest {
    int format_version = 1;
    std::string family = "lccr";
    unsigned field_width = 8;
    unsigned field_poly = 0x11D;
    int m = 0, r = 0, u = 0, delta = 0, gamma = 1;
    Backend backend = Backend::Scalar;
    std::uint64_t stripe_count = 0;
    std::uint64_t original_length_bytes = 0;
    std::vector<ChunkRef> chunks;

    CodeParams code_params() const {
        return {.m = m, .r = r, .u = u, .delta = delta, .backend = backend, .field_poly = field_poly};
    }
};

inline const char* node_kind_name(NodeKind k) {
    switch (k) {
    case NodeKind::Systematic: return "systematic";
    case NodeKind::MsrParity: return "msr_parity";
    case NodeKind::DistributedParity: return "distributed_parity";
    }
    return "?";
}

inline NodeKind node_kind_from_name(const std::string& s) {
    if (s == "systematic") return NodeKind::Systematic;
    if (s == "msr_parity") return NodeKind::MsrParity;
    if (s == "distributed_parity") return NodeKind::DistributedParity;
    throw IoError("unknown node kind in manifest: " + s);
}

inline std::string to_hex32(std::uint32_t v) {
    char buf[9];
    std::snprintf(buf, sizeof buf, "%08x", v);
    return buf;
}

inline nlohmann::json manifest_to_json(const Manifest& m) {
    nlohmann::json chunks = nlohmann::json::array();
    for (const auto& c : m.chunks)
        chunks.push_back({{"file", c.file},
                          {"group", c.group},
                          {"node", c.node},
                          {"kind", node_kind_name(c.kind)},
                          {"crc32c", to_hex32(c.crc)}});
    return {{"format_version", m.format_version},
            {"family", m.family},
            {"field", {{"width_bits", m.field_width}, {"reduction_poly", m.field_poly}}},
            {"params",
             {{"m", m.m},
              {"r", m.r},
              {"u", m.u},
              {"delta", m.delta},
              {"gamma", m.gamma},
              {"backend", backend_name(m.backend)}}},
            {"stripe_count", m.stripe_count},
            {"original_length_bytes", m.original_length_bytes},
            {"chunks", chunks}};
}

inline Manifest manifest_from_json(const nlohmann::json& j) {
    Manifest m;
    m.format_version = j.at("format_version").get<int>();
    if (m.format_version != 1) throw IoError("unsupported manifest format version");
    m.family = j.at("family").get<std::string>();
    m.field_width = j.at("field").at("width_bits").get<unsigned>();
    m.field_poly = j.at("field").at("reduction_poly").get<unsigned>();
    const auto& p = j.at("params");
    m.m = p.at("m").get<int>();
    m.r = p.at("r").get<int>();
    m.u = p.at("u").get<int>();
    m.delta = p.at("delta").get<int>();
    m.gamma = p.at("gamma").get<int>();
    const std::string backend = p.at("backend").get<std::string>();
    if (backend == "scalar")
        m.backend = Backend::Scalar;
    else if (backend == "product-matrix")
        m.backend = Backend::ProductMatrix;
    else
        throw IoError("unknown backend in manifest: " + backend);
    m.stripe_count = j.at("stripe_count").get<std::uint64_t>();
    m.original_length_bytes = j.at("original_length_bytes").get<std::uint64_t>();
    for (const auto& c : j.at("chunks")) {
        ChunkRef ref;
        ref.file = c.at("file").get<std::string>();
        ref.group = c.at("group").get<int>();
        ref.node = c.at("node").get<int>();
        ref.kind = node_kind_from_name(c.at("kind").get<std::string>());
        ref.crc = static_cast<std::uint32_t>(std::stoul(c.at("crc32c").get<std::string>(), nullptr, 16));
        m.chunks.push_back(std::move(ref));
    }
    return m;
}

inline void save_manifest(const Manifest& m, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open " + path + " for writing");
    os << manifest_to_json(m).dump(2) << "\n";
    if (!os.good()) throw IoError("short write to " + path);
}

inline Manifest load_manifest(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open manifest " + path);
    nlohmann::json j;
    try {
        is >> j;
    } catch (const nlohmann::json::exception& e) {
        throw IoError("malformed manifest " + path + ": " + e.what());
    }
    return manifest_from_json(j);
}

namespace detail {

constexpr std::size_t kChunkHeaderSize = 14;

inline void put_u16(std::vector<unsigned char>& v, std::uint16_t x) {
    v.push_back(static_cast<unsigned char>(x & 0xFF));
    v.push_back(static_cast<unsigned char>(x >> 8));
}
inline void put_u32(std::vector<unsigned char>& v, std::uint32_t x) {
    for (int i = 0; i < 4; ++i) v.push_back(static_cast<unsigned char>((x >> (8 * i)) & 0xFF));
}

inline std::vector<unsigned char> chunk_bytes(int group, int node, NodeKind kind,
                                              std::span<const gf_t> symbols) {
    std::vector<unsigned char> out{'L', 'C', 'C', 'R', 1};
    put_u16(out, static_cast<std::uint16_t>(group));
    put_u16(out, static_cast<std::uint16_t>(node));
    out.push_back(static_cast<unsigned char>(kind));
    put_u32(out, static_cast<std::uint32_t>(symbols.size()));
    out.insert(out.end(), symbols.begin(), symbols.end());
    return out;
}

struct ParsedChunk {
    int group = 0;
    int node = 0;
    NodeKind kind = NodeKind::Systematic;
    std::vector<gf_t> symbols;
};

inline ParsedChunk parse_chunk(std::span<const unsigned char> bytes, const std::string& name) {
    if (bytes.size() < kChunkHeaderSize || bytes[0] != 'L' || bytes[1] != 'C' || bytes[2] != 'C' ||
        bytes[3] != 'R')
        throw IoError("chunk " + name + " has a malformed header");
    if (bytes[4] != 1) throw IoError("chunk " + name + " has an unsupported version");
    ParsedChunk c;
    c.group = bytes[5] | (bytes[6] << 8);
    c.node = bytes[7] | (bytes[8] << 8);
    c.kind = static_cast<NodeKind>(bytes[9]);
    const std::uint32_t n = bytes[10] | (bytes[11] << 8) | (bytes[12] << 16) |
                            (static_cast<std::uint32_t>(bytes[13]) << 24);
    if (bytes.size() != kChunkHeaderSize + n)
        throw IoError("chunk " + name + " payload length mismatch");
    c.symbols.assign(bytes.begin() + kChunkHeaderSize, bytes.end());
    return c;
}

inline std::vector<unsigned char> read_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open " + path);
    return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::string& path, std::span<const unsigned char> bytes) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open " + path + " for writing");
    os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!os.good()) throw IoError("short write to " + path);
}

inline std::string chunk_name(int group, int node) {
    return "chunk_g" + std::to_string(group) + "_n" + std::to_string(node) + ".bin";
}

} // namespace detail

inline Manifest encode_file(const Code& code, std::span<const unsigned char> input,
                            const std::string& out_dir,
                            const std::string& manifest_name = "manifest.json") {
    namespace fs = std::filesystem;
    const auto& p = code.params();
    fs::create_directories(out_dir);

    Manifest manifest;
    manifest.field_width = code.field().width();
    manifest.field_poly = code.field().poly();
    manifest.m = p.m;
    manifest.r = p.r;
    manifest.u = p.u;
    manifest.delta = p.delta;
    manifest.gamma = code.gamma();
    manifest.backend = p.backend;
    manifest.original_length_bytes = input.size();

    auto symbols = bytes_to_symbols(input, code.field().width());
    const std::size_t k = static_cast<std::size_t>(code.k_symbols());
    manifest.stripe_count = (symbols.size() + k - 1) / k;
    symbols.resize(manifest.stripe_count * k, 0);

    if (manifest.stripe_count > 0) {
        const int gam = code.gamma();
        // per-node symbol streams, all stripes concatenated
        std::vector<std::vector<gf_t>> streams(
            static_cast<std::size_t>(p.n_nodes()),
            std::vector<gf_t>());
        for (std::uint64_t s = 0; s < manifest.stripe_count; ++s) {
            std::vector<LocalMessage> msg(p.m);
            std::size_t off = s * k;
            for (int g = 0; g < p.m; ++g)
                for (int i = 0; i < p.r; ++i) {
                    msg[g].emplace_back(symbols.begin() + off, symbols.begin() + off + gam);
                    off += gam;
                }
            const auto st = code.encode(msg);
            for (int g = 0; g < p.m; ++g)
                for (int i = 0; i < p.group_width(); ++i) {
                    auto& stream = streams[static_cast<std::size_t>(g) * p.group_width() + i];
                    const Block& b = st.block(g, i);
                    stream.insert(stream.end(), b.begin(), b.end());
                }
        }
        for (int g = 0; g < p.m; ++g)
            for (int i = 0; i < p.group_width(); ++i) {
                const auto kind = code.node_kind(i);
                const auto bytes = detail::chunk_bytes(
                    g, i, kind, streams[static_cast<std::size_t>(g) * p.group_width() + i]);
                const std::string name = detail::chunk_name(g, i);
                detail::write_file((fs::path(out_dir) / name).string(), bytes);
                manifest.chunks.push_back({name, g, i, kind, crc32c(bytes)});
            }
    }
    save_manifest(manifest, (fs::path(out_dir) / manifest_name).string());
    return manifest;
}

// chunk streams keyed by (group, node); nullopt for missing or failed chunks
using ChunkStreams = std::vector<std::vector<std::optional<std::vector<gf_t>>>>;

inline ChunkStreams load_chunks(const Code& code, const Manifest& manifest, const std::string& dir) {
    namespace fs = std::filesystem;
    const auto& p = code.params();
    ChunkStreams streams(p.m, std::vector<std::optional<std::vector<gf_t>>>(p.group_width()));
    for (const auto& ref : manifest.chunks) {
        const auto path = fs::path(dir) / ref.file;
        if (!fs::exists(path)) continue;
        auto bytes = detail::read_file(path.string());
        if (crc32c(bytes) != ref.crc)
            throw ChecksumMismatch("chunk " + ref.file + " fails its checksum");
        auto parsed = detail::parse_chunk(bytes, ref.file);
        if (parsed.group != ref.group || parsed.node != ref.node)
            throw IoError("chunk " + ref.file + " does not match its manifest entry");
        streams[parsed.group][parsed.node] = std::move(parsed.symbols);
    }
    return streams;
}

inline std::vector<unsigned char> decode_file(const Code& code, const Manifest& manifest,
                                              const std::string& dir) {
    const auto& p = code.params();
    if (manifest.stripe_count == 0) return {};
    const auto streams = load_chunks(code, manifest, dir);
    const int gam = code.gamma();

    std::vector<std::vector<bool>> alive(p.m, std::vector<bool>(p.group_width(), false));
    for (int g = 0; g < p.m; ++g)
        for (int i = 0; i < p.group_width(); ++i)
            alive[g][i] = streams[g][i].has_value() &&
                          streams[g][i]->size() == manifest.stripe_count * gam;
    StripeDecoder decoder(code, alive);

    std::vector<gf_t> message;
    message.reserve(manifest.stripe_count * code.k_symbols());
    std::vector<gf_t> surviving;
    for (std::uint64_t s = 0; s < manifest.stripe_count; ++s) {
        surviving.clear();
        for (int g = 0; g < p.m; ++g)
            for (int i = 0; i < p.group_width(); ++i) {
                if (!alive[g][i]) continue;
                const auto& stream = *streams[g][i];
                surviving.insert(surviving.end(), stream.begin() + s * gam,
                                 stream.begin() + (s + 1) * gam);
            }
        const auto x = decoder.decode(surviving);
        message.insert(message.end(), x.begin(), x.end());
    }
    auto bytes = symbols_to_bytes(message, code.field().width());
    bytes.resize(manifest.original_length_bytes);
    return bytes;
}

struct FileRepairResult {
    std::string verdict;      // "repaired" | "unrepairable"
    bool oracle_decodable = true;
    std::uint64_t stripes = 0;
    TransferLedger per_stripe_ledger;
    Trace plan_trace; // identical for every stripe
};

// Repair chunks of whole failed groups (listed and/or missing on disk) and
// rewrite the restored chunk files. The plan is computed once; every stripe
// replays it, so the reported ledger is per stripe.
inline FileRepairResult repair_file_groups(const Code& code, const Manifest& manifest,
                                           const std::string& dir,
                                           const std::set<int>& failed_groups) {
    namespace fs = std::filesystem;
    const auto& p = code.params();
    auto streams = load_chunks(code, manifest, dir);
    const int gam = code.gamma();

    std::set<int> failed = failed_groups;
    for (int g = 0; g < p.m; ++g)
        for (int i = 0; i < p.group_width(); ++i)
            if (!streams[g][i].has_value() ||
                streams[g][i]->size() != manifest.stripe_count * gam)
                failed.insert(g);

    FileRepairResult result;
    result.stripes = manifest.stripe_count;
    if (manifest.stripe_count == 0 || failed.empty()) {
        result.verdict = "repaired";
        return result;
    }

    // plan against a skeleton state carrying only aliveness
    ClusterState skeleton(p.m, p.group_width(), gam);
    for (int g : failed) skeleton.erase_group(g);
    auto plan = plan_group_repair(code, skeleton, failed);

    {
        std::vector<std::vector<bool>> alive(p.m, std::vector<bool>(p.group_width(), true));
        for (int g : failed) alive[g].assign(p.group_width(), false);
        try {
            StripeDecoder probe(code, alive);
            result.oracle_decodable = true;
        } catch (const Unrecoverable&) {
            result.oracle_decodable = false;
        }
    }
    if (!plan) {
        result.verdict = "unrepairable";
        return result;
    }

    std::vector<std::vector<std::vector<gf_t>>> restored(
        p.m, std::vector<std::vector<gf_t>>(p.group_width()));
    for (std::uint64_t s = 0; s < manifest.stripe_count; ++s) {
        ClusterState st(p.m, p.group_width(), gam);
        for (int g = 0; g < p.m; ++g)
            for (int i = 0; i < p.group_width(); ++i) {
                if (failed.count(g)) {
                    st.erase_node(g, i);
                    continue;
                }
                const auto& stream = *streams[g][i];
                st.block(g, i).assign(stream.begin() + s * gam, stream.begin() + (s + 1) * gam);
            }
        Trace* trace = s == 0 ? &result.plan_trace : nullptr;
        result.per_stripe_ledger = execute_plan(code, st, *plan, trace);
        for (int g : failed)
            for (int i = 0; i < p.group_width(); ++i) {
                const Block& b = st.block(g, i);
                restored[g][i].insert(restored[g][i].end(), b.begin(), b.end());
            }
    }
    for (int g : failed)
        for (int i = 0; i < p.group_width(); ++i) {
            const auto bytes = detail::chunk_bytes(g, i, code.node_kind(i), restored[g][i]);
            detail::write_file((fs::path(dir) / detail::chunk_name(g, i)).string(), bytes);
        }
    result.verdict = "repaired";
    return result;
}

// Repair one node's chunk: the local-part protocol inside its group, or the
// neighbour-sum rebuild for a distributed-parity node (which rewrites the
// group's whole distributed-parity part).
inline FileRepairResult repair_file_node(const Code& code, const Manifest& manifest,
                                         const std::string& dir, NodeId node) {
    namespace fs = std::filesystem;
    const auto& p = code.params();
    if (node.group < 0 || node.group >= p.m || node.index < 0 || node.index >= p.group_width())
        throw ScenarioInvalid("node out of range");
    auto streams = load_chunks(code, manifest, dir);
    const int gam = code.gamma();

    FileRepairResult result;
    result.stripes = manifest.stripe_count;
    result.verdict = "repaired";
    if (manifest.stripe_count == 0) return result;

    const bool dist = code.node_kind(node.index) == NodeKind::DistributedParity;
    std::vector<int> rebuilt_nodes;
    if (dist)
        for (int t = 0; t < p.delta; ++t) rebuilt_nodes.push_back(p.n_local() + t);
    else
        rebuilt_nodes.push_back(node.index);

    std::vector<std::vector<gf_t>> restored(rebuilt_nodes.size());
    for (std::uint64_t s = 0; s < manifest.stripe_count; ++s) {
        ClusterState st(p.m, p.group_width(), gam);
        for (int g = 0; g < p.m; ++g)
            for (int i = 0; i < p.group_width(); ++i) {
                const auto& stream = streams[g][i];
                if (!stream.has_value() || stream->size() != manifest.stripe_count * gam ||
                    (g == node.group && i == node.index)) {
                    st.erase_node(g, i);
                    continue;
                }
                st.block(g, i).assign(stream->begin() + s * gam, stream->begin() + (s + 1) * gam);
            }
        Trace* trace = s == 0 ? &result.plan_trace : nullptr;
        result.per_stripe_ledger = dist
                                       ? repair_node_distributed_parity(code, st, node.group, trace)
                                       : repair_node_msr_part(code, st, node, trace);
        for (std::size_t k = 0; k < rebuilt_nodes.size(); ++k) {
            const Block& b = st.block(node.group, rebuilt_nodes[k]);
            restored[k].insert(restored[k].end(), b.begin(), b.end());
        }
    }
    for (std::size_t k = 0; k < rebuilt_nodes.size(); ++k) {
        const int i = rebuilt_nodes[k];
        const auto bytes = detail::chunk_bytes(node.group, i, code.node_kind(i), restored[k]);
        detail::write_file((fs::path(dir) / detail::chunk_name(node.group, i)).string(), bytes);
    }
    return result;
}

} // namespace lccr
