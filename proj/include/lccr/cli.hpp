#pragma once

// Command-line surface. Subcommands: encode, decode, repair, simulate,
// sweep, mindist, verify. Machine-readable results go to stdout as JSON
// (sweep emits CSV, mindist a bare number); human-readable notes go to
// stderr. Exit codes: 0 success, 1 domain error (e.g. unrepairable),
// 2 usage error.

#include <filesystem>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "lccr/sim.hpp"
#include "lccr/storage.hpp"
#include "lccr/sweep.hpp"

namespace lccr::cli {

namespace detail {

inline unsigned parse_poly(const std::string& s) {
    try {
        return static_cast<unsigned>(std::stoul(s, nullptr, 0));
    } catch (const std::exception&) {
        throw CLI::ValidationError("--field-poly", "not a number: " + s);
    }
}

inline Backend parse_backend(const std::string& s) {
    if (s == "scalar") return Backend::Scalar;
    if (s == "product-matrix") return Backend::ProductMatrix;
    throw CLI::ValidationError("--backend", "must be scalar or product-matrix");
}

inline std::vector<int> parse_int_list(const std::string& s) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        out.push_back(std::stoi(item));
    }
    return out;
}

inline NodeId parse_node(const std::string& s) {
    const auto colon = s.find(':');
    if (colon == std::string::npos)
        throw CLI::ValidationError("--failed-node", "expected group:index, got " + s);
    return {std::stoi(s.substr(0, colon)), std::stoi(s.substr(colon + 1))};
}

inline nlohmann::json ledger_json(const TransferLedger& ledger) {
    return {{"symbols_moved", ledger.symbols_moved},
            {"groups_contacted", ledger.groups_contacted},
            {"nodes_contacted", ledger.nodes_contacted}};
}

inline nlohmann::json trace_json(const Trace& trace) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& ev : trace) arr.push_back(trace_event_json(ev));
    return arr;
}

struct CodeFlags {
    int m = 0, r = 0, u = 0, delta = 0;
    std::string backend = "scalar";
    std::string poly = "0x11D";

    void attach(CLI::App* app) {
        app->add_option("--m", m, "group count")->required();
        app->add_option("--r", r, "information nodes per group")->required();
        app->add_option("--u", u, "local code block distance")->required();
        app->add_option("--delta", delta, "distributed parity nodes per group")->required();
        app->add_option("--backend", backend, "local code backend")
            ->check(CLI::IsMember({"scalar", "product-matrix"}));
        app->add_option("--field-poly", poly, "reduction polynomial, e.g. 0x11D");
    }

    Code make() const {
        return Code({.m = m,
                     .r = r,
                     .u = u,
                     .delta = delta,
                     .backend = parse_backend(backend),
                     .field_poly = parse_poly(poly)});
    }
};

} // namespace detail

inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"LCCR erasure-code toolkit: local groups with interleaved distributed parity"};
    app.require_subcommand(1);

    // encode
    auto* encode = app.add_subcommand("encode", "encode a file into chunks + manifest");
    detail::CodeFlags encode_flags;
    encode_flags.attach(encode);
    std::string encode_input, encode_out, encode_manifest = "manifest.json";
    encode->add_option("input", encode_input, "input file")->required();
    encode->add_option("--out", encode_out, "output directory")->required();
    encode->add_option("--manifest", encode_manifest, "manifest file name");

    // decode
    auto* decode = app.add_subcommand("decode", "recover the original file from chunks");
    std::string decode_manifest, decode_out;
    decode->add_option("--manifest", decode_manifest, "manifest path")->required();
    decode->add_option("--out", decode_out, "output file")->required();

    // repair
    auto* repair = app.add_subcommand("repair", "restore failed chunks in place");
    std::string repair_manifest, repair_groups, repair_node;
    repair->add_option("--manifest", repair_manifest, "manifest path")->required();
    repair->add_option("--failed-groups", repair_groups, "comma-separated group ids");
    repair->add_option("--failed-node", repair_node, "group:index");

    // simulate
    auto* simulate_cmd = app.add_subcommand("simulate", "run a failure scenario in memory");
    detail::CodeFlags sim_flags;
    sim_flags.attach(simulate_cmd);
    std::uint64_t sim_seed = 0;
    std::string sim_groups, sim_node, sim_out;
    int sim_random_nodes = -1;
    simulate_cmd->add_option("--seed", sim_seed, "scenario seed");
    simulate_cmd->add_option("--failed-groups", sim_groups, "comma-separated group ids");
    simulate_cmd->add_option("--failed-node", sim_node, "group:index");
    simulate_cmd->add_option("--random-nodes", sim_random_nodes, "erase N seeded random nodes");
    simulate_cmd->add_option("--out", sim_out, "write the trace as JSONL to this file");

    // sweep
    auto* sweep_cmd = app.add_subcommand("sweep", "emit the metric table for fixed n, d_min");
    int sweep_n = 120, sweep_dmin = 16;
    std::string sweep_families = "lccr,msr-local,mbr-local", sweep_out;
    bool sweep_repairable = false;
    sweep_cmd->add_option("--n", sweep_n, "code length");
    sweep_cmd->add_option("--dmin", sweep_dmin, "formula minimum distance");
    sweep_cmd->add_option("--families", sweep_families, "comma-separated family list");
    sweep_cmd->add_flag("--require-group-repairable", sweep_repairable,
                        "keep only group-repair-capable tuples");
    sweep_cmd->add_option("--out", sweep_out, "also write the CSV to this file");

    // mindist
    auto* mindist = app.add_subcommand("mindist", "brute-force block-level minimum distance");
    detail::CodeFlags mindist_flags;
    mindist_flags.attach(mindist);

    // verify
    auto* verify = app.add_subcommand("verify", "check chunk checksums and codeword validity");
    std::string verify_manifest;
    verify->add_option("--manifest", verify_manifest, "manifest path")->required();

    std::reverse(args.begin(), args.end()); // CLI11 consumes back to front
    try {
        app.parse(args);
    } catch (const CLI::CallForHelp& e) {
        app.exit(e, out, err);
        return 0;
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return 2;
    }

    try {
        if (encode->parsed()) {
            const auto bytes = lccr::detail::read_file(encode_input);
            const Code code = encode_flags.make();
            const auto manifest = encode_file(code, bytes, encode_out, encode_manifest);
            nlohmann::json summary;
            summary["manifest"] = (std::filesystem::path(encode_out) / encode_manifest).string();
            summary["stripes"] = manifest.stripe_count;
            summary["chunks"] = manifest.chunks.size();
            summary["bytes"] = manifest.original_length_bytes;
            out << summary.dump() << "\n";
            return 0;
        }
        if (decode->parsed()) {
            const auto manifest = load_manifest(decode_manifest);
            const Code code(manifest.code_params());
            const auto dir = std::filesystem::path(decode_manifest).parent_path().string();
            const auto bytes = decode_file(code, manifest, dir.empty() ? "." : dir);
            lccr::detail::write_file(decode_out, bytes);
            out << nlohmann::json{{"out", decode_out}, {"bytes", bytes.size()}}.dump() << "\n";
            return 0;
        }
        if (repair->parsed()) {
            const auto manifest = load_manifest(repair_manifest);
            const Code code(manifest.code_params());
            const auto dir_path = std::filesystem::path(repair_manifest).parent_path().string();
            const auto dir = dir_path.empty() ? "." : dir_path;
            FileRepairResult result;
            if (!repair_node.empty()) {
                result = repair_file_node(code, manifest, dir, detail::parse_node(repair_node));
            } else {
                const auto ids = detail::parse_int_list(repair_groups);
                result = repair_file_groups(code, manifest, dir, {ids.begin(), ids.end()});
            }
            out << nlohmann::json{{"verdict", result.verdict},
                                  {"oracle_decodable", result.oracle_decodable},
                                  {"stripes", result.stripes},
                                  {"per_stripe_ledger", detail::ledger_json(result.per_stripe_ledger)},
                                  {"trace", detail::trace_json(result.plan_trace)}}
                       .dump()
                << "\n";
            return result.verdict == "repaired" ? 0 : 1;
        }
        if (simulate_cmd->parsed()) {
            const Code code = sim_flags.make();
            Scenario scenario;
            scenario.seed = sim_seed;
            const int sources = int(!sim_node.empty()) + int(!sim_groups.empty()) +
                                int(sim_random_nodes >= 0);
            if (sources != 1) {
                err << "simulate needs exactly one of --failed-node, --failed-groups, "
                       "--random-nodes\n";
                return 2;
            }
            if (!sim_node.empty()) {
                scenario.kind = Scenario::Kind::SingleNode;
                scenario.node = detail::parse_node(sim_node);
            } else if (sim_random_nodes >= 0) {
                scenario.kind = Scenario::Kind::RandomNodes;
                scenario.count = sim_random_nodes;
            } else {
                auto ids = detail::parse_int_list(sim_groups);
                if (ids.size() == 1) {
                    scenario.kind = Scenario::Kind::SingleGroup;
                    scenario.group = ids[0];
                } else if (ids.size() == 2 &&
                           (ids[0] + 1) % code.params().m == ids[1] % code.params().m) {
                    scenario.kind = Scenario::Kind::AdjacentPair;
                    scenario.pair_first = ids[0];
                } else {
                    scenario.kind = Scenario::Kind::GroupSet;
                    scenario.groups = std::move(ids);
                }
            }
            const auto result = simulate(code, scenario);
            out << sim_result_json(result).dump() << "\n";
            if (!sim_out.empty()) {
                std::ofstream os(sim_out, std::ios::binary);
                if (!os) throw IoError("cannot open " + sim_out + " for writing");
                os << trace_jsonl(result.trace);
            }
            return result.verdict == "repaired" ? 0 : 1;
        }
        if (sweep_cmd->parsed()) {
            SweepSpec spec;
            spec.n = sweep_n;
            spec.d_min = sweep_dmin;
            spec.require_group_repairable = sweep_repairable;
            spec.families.clear();
            std::stringstream ss(sweep_families);
            std::string name;
            while (std::getline(ss, name, ',')) {
                if (name == "lccr")
                    spec.families.insert(Family::Lccr);
                else if (name == "msr-local" || name == "msr_local")
                    spec.families.insert(Family::MsrLocal);
                else if (name == "mbr-local" || name == "mbr_local")
                    spec.families.insert(Family::MbrLocal);
                else {
                    err << "unknown family: " << name << "\n";
                    return 2;
                }
            }
            const auto rows = run_sweep(spec);
            emit_csv(rows, out);
            if (!sweep_out.empty()) emit_csv_file(rows, sweep_out);
            return 0;
        }
        if (mindist->parsed()) {
            const Code code = mindist_flags.make();
            out << code.min_distance_bruteforce() << "\n";
            return 0;
        }
        if (verify->parsed()) {
            const auto manifest = load_manifest(verify_manifest);
            const Code code(manifest.code_params());
            const auto dir_path = std::filesystem::path(verify_manifest).parent_path().string();
            const auto dir = dir_path.empty() ? "." : dir_path;
            const auto streams = load_chunks(code, manifest, dir);
            for (const auto& ref : manifest.chunks)
                if (!streams[ref.group][ref.node].has_value())
                    throw IoError("chunk " + ref.file + " is missing");
            const auto& p = code.params();
            const int gam = code.gamma();
            for (std::uint64_t s = 0; s < manifest.stripe_count; ++s) {
                ClusterState st(p.m, p.group_width(), gam);
                for (int g = 0; g < p.m; ++g)
                    for (int i = 0; i < p.group_width(); ++i)
                        st.block(g, i).assign(streams[g][i]->begin() + s * gam,
                                              streams[g][i]->begin() + (s + 1) * gam);
                if (!code.verify(st))
                    throw InconsistentBlocks("stripe " + std::to_string(s) +
                                             " is not a valid codeword");
            }
            out << nlohmann::json{{"ok", true}, {"stripes", manifest.stripe_count}}.dump() << "\n";
            return 0;
        }
    } catch (const Error& e) {
        out << nlohmann::json{{"error", e.what()}}.dump() << "\n";
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        out << nlohmann::json{{"error", e.what()}}.dump() << "\n";
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::domain_error& e) {
        out << nlohmann::json{{"error", e.what()}}.dump() << "\n";
        err << "error: " << e.what() << "\n";
        return 1;
    }
    err << "no subcommand\n";
    return 2;
}

} // namespace lccr::cli
