#include <catch2/catch_amalgamated.hpp>

#include <iostream>
#include <random>

#include "lccr/repair.hpp"

using namespace lccr;

namespace {

std::vector<LocalMessage> random_cluster_message(const Code& code, std::mt19937& rng) {
    std::vector<LocalMessage> msg(code.params().m);
    for (auto& part : msg) {
        part.assign(code.params().r, Block(code.gamma()));
        for (auto& b : part)
            for (auto& s : b) s = static_cast<gf_t>(rng() % code.field().order());
    }
    return msg;
}

Code tiny_gf2(int m) {
    return Code({.m = m, .r = 1, .u = 2, .delta = 1, .backend = Backend::Scalar, .field_poly = 0x3});
}

Code sweep_code() { // the n = 120 point with group repair capability
    return Code({.m = 8, .r = 5, .u = 6, .delta = 5, .backend = Backend::Scalar, .field_poly = 0x11D});
}

} // namespace

TEST_CASE("classify group failures by the u-1 threshold") {
    std::mt19937 rng(1);
    Code code({.m = 4, .r = 2, .u = 3, .delta = 2, .backend = Backend::Scalar, .field_poly = 0x11D});
    const auto st0 = code.encode(random_cluster_message(code, rng));

    auto st = st0;
    st.erase_node(1, 0);
    auto pat = classify_group_failures(code, st);
    CHECK(pat.failed_groups.empty());
    CHECK(pat.failed_nodes == std::set<NodeId>{{1, 0}});

    st = st0;
    for (int i : {0, 1, 2}) st.erase_node(1, i); // three of n_L = 4 local nodes
    pat = classify_group_failures(code, st);
    CHECK(pat.failed_groups == std::set<int>{1});
    CHECK(pat.failed_nodes.empty());

    st = st0;
    for (int g = 0; g < 4; ++g) st.erase_node(g, g); // spread one per group
    pat = classify_group_failures(code, st);
    CHECK(pat.failed_groups.empty());
    CHECK(pat.failed_nodes.size() == 4);
}

TEST_CASE("local-part node repair ledgers per backend") {
    std::mt19937 rng(2);

    Code scalar({.m = 4, .r = 3, .u = 4, .delta = 3, .backend = Backend::Scalar, .field_poly = 0x11D});
    auto st = scalar.encode(random_cluster_message(scalar, rng));
    const auto original = st.blocks;
    st.erase_node(2, 1);
    auto ledger = repair_node_msr_part(scalar, st, {2, 1});
    CHECK(st.blocks == original);
    CHECK(ledger.symbols_moved == 3); // r * gamma
    CHECK(ledger.nodes_contacted == 3);
    CHECK(ledger.groups_contacted == 0);

    Code pm({.m = 4, .r = 3, .u = 4, .delta = 3, .backend = Backend::ProductMatrix, .field_poly = 0x11D});
    auto pst = pm.encode(random_cluster_message(pm, rng));
    const auto poriginal = pst.blocks;
    pst.erase_node(0, 4);
    ledger = repair_node_msr_part(pm, pst, {0, 4});
    CHECK(pst.blocks == poriginal);
    CHECK(ledger.symbols_moved == 4); // d * beta = 2 * gamma
    CHECK(ledger.nodes_contacted == 4);
}

TEST_CASE("node repair fails without enough helpers") {
    std::mt19937 rng(3);
    Code pm({.m = 4, .r = 3, .u = 4, .delta = 3, .backend = Backend::ProductMatrix, .field_poly = 0x11D});
    auto st = pm.encode(random_cluster_message(pm, rng));
    st.erase_node(0, 0);
    st.erase_node(0, 1);
    st.erase_node(0, 2); // 3 survivors < d = 4
    CHECK_THROWS_AS(repair_node_msr_part(pm, st, {0, 0}), InsufficientHelpers);

    // but the in-place path decodes from r = 3 survivors and restores all
    auto st2 = pm.encode(random_cluster_message(pm, rng));
    const auto original = st2.blocks;
    st2.erase_node(0, 0);
    st2.erase_node(0, 1);
    st2.erase_node(0, 2);
    auto ledger = repair_msr_nodes_in_place(pm, st2, 0);
    CHECK(st2.blocks == original);
    CHECK(ledger.symbols_moved == 6); // r * gamma
}

TEST_CASE("distributed parity repair: whole part, fixed cost") {
    std::mt19937 rng(4);
    Code code = sweep_code();
    auto st = code.encode(random_cluster_message(code, rng));
    const auto original = st.blocks;
    const int nl = code.params().n_local();

    SECTION("single failed parity node") {
        st.erase_node(3, nl + 2);
        Trace trace;
        auto ledger = repair_node_distributed_parity(code, st, 3, &trace);
        CHECK(st.blocks == original);
        CHECK(ledger.symbols_moved == 2 * (6 - 1) * 1);
        CHECK(ledger.groups_contacted == 2);
        CHECK(ledger.nodes_contacted == 2 * (6 - 1));
    }
    SECTION("all delta parity nodes failed: same ledger") {
        for (int t = 0; t < code.params().delta; ++t) st.erase_node(3, nl + t);
        auto ledger = repair_node_distributed_parity(code, st, 3);
        CHECK(st.blocks == original);
        CHECK(ledger.symbols_moved == 10);
        CHECK(ledger.groups_contacted == 2);
    }
    SECTION("neighbour parity down") {
        st.erase_node(3, nl);
        st.erase_node(2, code.params().r); // parity node of the left neighbour
        CHECK_THROWS_AS(repair_node_distributed_parity(code, st, 3), NeighborUnavailable);
    }
}

TEST_CASE("distributed parity repair, hand-checked tiny example") {
    Code code = tiny_gf2(3);
    auto st = code.encode({{{1}}, {{0}}, {{0}}});
    st.erase_node(1, 2);
    auto ledger = repair_node_distributed_parity(code, st, 1);
    CHECK(st.block(1, 2) == Block{1}); // p(0) + p(2) = 1 + 0
    CHECK(ledger.symbols_moved == 2);
}

TEST_CASE("single group repair: three helpers, 4(u-1)*gamma symbols, exact") {
    std::mt19937 rng(5);
    Code code = sweep_code();
    auto st = code.encode(random_cluster_message(code, rng));
    const auto original = st.blocks;
    st.erase_group(3);

    auto plan = plan_single_group_repair(code, st, 3);
    CHECK(plan.helper_groups == std::set<int>{1, 2, 4});
    CHECK(plan.planned_symbols() == 4 * 5 * 1);

    Trace trace;
    auto ledger = execute_plan(code, st, plan, &trace);
    CHECK(st.blocks == original);
    CHECK(code.verify(st));
    CHECK(ledger.symbols_moved == 20);
    CHECK(ledger.groups_contacted == 3);

    long long traced = 0;
    for (const auto& ev : trace)
        if (ev.kind == TraceEvent::Kind::Transfer) traced += ev.symbols;
    CHECK(traced == ledger.symbols_moved);
}

TEST_CASE("single group repair via the right chain") {
    std::mt19937 rng(6);
    Code code = sweep_code();
    auto st = code.encode(random_cluster_message(code, rng));
    const auto original = st.blocks;
    st.erase_group(0);
    auto plan = plan_single_group_repair(code, st, 0, ChainVariant::Right);
    CHECK(plan.helper_groups == std::set<int>{1, 2, 7});
    execute_plan(code, st, plan);
    CHECK(st.blocks == original);
}

TEST_CASE("single group repair at m = 3 collapses to two helper groups") {
    std::mt19937 rng(7);
    Code code({.m = 3, .r = 1, .u = 2, .delta = 1, .backend = Backend::Scalar, .field_poly = 0x3});
    auto st = code.encode(random_cluster_message(code, rng));
    const auto original = st.blocks;
    st.erase_group(1);
    auto plan = plan_single_group_repair(code, st, 1);
    CHECK(plan.helper_groups.size() == 2); // g-2 coincides with g+1
    execute_plan(code, st, plan);
    CHECK(st.blocks == original);
}

TEST_CASE("group repair preconditions") {
    std::mt19937 rng(8);
    // u - 1 < r: not group repair capable
    Code incapable({.m = 4, .r = 3, .u = 3, .delta = 2, .backend = Backend::Scalar, .field_poly = 0x11D});
    auto st = incapable.encode(random_cluster_message(incapable, rng));
    st.erase_group(1);
    CHECK_THROWS_AS(plan_single_group_repair(incapable, st, 1), CapabilityMissing);

    // helper group down
    Code code = sweep_code();
    auto st2 = code.encode(random_cluster_message(code, rng));
    st2.erase_group(3);
    st2.erase_group(2);
    CHECK_THROWS_AS(plan_single_group_repair(code, st2, 3), HelperGroupDown);
}

TEST_CASE("stale plan fails after an extra failure") {
    std::mt19937 rng(9);
    Code code = sweep_code();
    auto st = code.encode(random_cluster_message(code, rng));
    st.erase_group(3);
    auto plan = plan_single_group_repair(code, st, 3);
    st.erase_node(2, code.params().r); // lose a parity node the plan reads
    CHECK_THROWS_AS(execute_plan(code, st, plan), PlanInvalid);
}

TEST_CASE("adjacent pair repair: four helpers, 8(u-1)*gamma symbols, exact") {
    std::mt19937 rng(10);
    Code code = sweep_code();
    auto st = code.encode(random_cluster_message(code, rng));
    const auto original = st.blocks;
    st.erase_group(4);
    st.erase_group(5);
    auto plan = plan_adjacent_pair_repair(code, st, 4, 5);
    CHECK(plan.helper_groups == std::set<int>{2, 3, 6, 7});
    CHECK(plan.planned_symbols() == 8 * 5 * 1);
    auto ledger = execute_plan(code, st, plan);
    CHECK(st.blocks == original);
    CHECK(code.verify(st));
    CHECK(ledger.groups_contacted == 4);
    CHECK(ledger.symbols_moved == 40);
}

TEST_CASE("adjacent pair repair with coinciding helpers at small m") {
    std::mt19937 rng(101);
    for (int m : {4, 5}) {
        Code code({.m = m, .r = 1, .u = 2, .delta = 1, .backend = Backend::Scalar, .field_poly = 0x3});
        auto st = code.encode(random_cluster_message(code, rng));
        const auto original = st.blocks;
        st.erase_group(0);
        st.erase_group(1);
        auto plan = plan_adjacent_pair_repair(code, st, 0, 1);
        CHECK(plan.helper_groups.size() == (m == 4 ? 2 : 3));
        execute_plan(code, st, plan);
        REQUIRE(st.blocks == original);
    }
    // m = 3: the helper indices collapse onto the failed pair
    Code three({.m = 3, .r = 1, .u = 2, .delta = 1, .backend = Backend::Scalar, .field_poly = 0x3});
    auto st = three.encode(random_cluster_message(three, rng));
    st.erase_group(0);
    st.erase_group(1);
    CHECK_THROWS_AS(plan_adjacent_pair_repair(three, st, 0, 1), HelperGroupDown);
}

TEST_CASE("two non-adjacent failed groups: two independent plans of locality 3") {
    std::mt19937 rng(11);
    Code code = sweep_code();
    auto st = code.encode(random_cluster_message(code, rng));
    const auto original = st.blocks;
    st.erase_group(1);
    st.erase_group(5);
    for (int g : {1, 5}) {
        auto plan = plan_single_group_repair(code, st, g);
        CHECK(plan.helper_groups.size() == 3);
        execute_plan(code, st, plan);
    }
    CHECK(st.blocks == original);
}

TEST_CASE("three consecutive failed groups are unrepairable, planner and oracle agree") {
    std::mt19937 rng(12);
    Code code = tiny_gf2(7);
    const auto msg = random_cluster_message(code, rng);
    auto st = code.encode(msg);
    for (int g : {2, 3, 4}) st.erase_group(g);
    CHECK_FALSE(plan_group_repair(code, st, {2, 3, 4}).has_value());
    CHECK_THROWS_AS(code.decode_full(st), Unrecoverable);
}

TEST_CASE("alternating failed groups at m = 6 are unrepairable; m = 7 repairs") {
    std::mt19937 rng(13);
    Code six = tiny_gf2(6);
    auto st6 = six.encode(random_cluster_message(six, rng));
    for (int g : {0, 2, 4}) st6.erase_group(g);
    CHECK_FALSE(plan_group_repair(six, st6, {0, 2, 4}).has_value());
    CHECK_THROWS_AS(six.decode_full(st6), Unrecoverable);

    Code seven = tiny_gf2(7);
    const auto msg = random_cluster_message(seven, rng);
    auto st7 = seven.encode(msg);
    const auto original = st7.blocks;
    for (int g : {0, 2, 4}) st7.erase_group(g);
    auto plan = plan_group_repair(seven, st7, {0, 2, 4});
    REQUIRE(plan.has_value());
    CHECK(plan->helper_groups.size() >= 5);
    CHECK(plan->helper_groups.size() <= 9);
    execute_plan(seven, st7, *plan);
    CHECK(st7.blocks == original);
}

TEST_CASE("peeling soundness, exhaustive over all subsets at m = 5") {
    std::mt19937 rng(14);
    Code code = tiny_gf2(5);
    const auto msg = random_cluster_message(code, rng);
    const auto pristine = code.encode(msg);
    int oracle_only = 0;
    for (unsigned mask = 0; mask < (1u << 5); ++mask) {
        std::set<int> failed;
        auto st = pristine;
        for (int g = 0; g < 5; ++g)
            if (mask & (1u << g)) {
                failed.insert(g);
                st.erase_group(g);
            }
        auto plan = plan_group_repair(code, st, failed);
        bool oracle_ok = true;
        try {
            if (code.decode_full(st) != msg) oracle_ok = false;
        } catch (const Unrecoverable&) {
            oracle_ok = false;
        }
        if (plan) {
            execute_plan(code, st, *plan);
            REQUIRE(st.blocks == pristine.blocks);
            REQUIRE(oracle_ok); // planner-accepted implies decodable
        } else if (oracle_ok) {
            ++oracle_only; // peeling may be incomplete; report, not fail
        }
    }
    if (oracle_only > 0)
        std::cerr << "finding: " << oracle_only
                  << " patterns decodable by rank but not by peeling at m = 5\n";
    CHECK(oracle_only >= 0);
}

TEST_CASE("peeling verdict does not depend on the sweep order") {
    std::mt19937 rng(15);
    Code code = tiny_gf2(7);
    auto st = code.encode(random_cluster_message(code, rng));
    const auto pristine = st.blocks;
    std::vector<int> order{0, 1, 2, 3, 4, 5, 6};
    for (unsigned mask = 0; mask < (1u << 7); mask += 3) {
        std::set<int> failed;
        auto damaged = st;
        for (int g = 0; g < 7; ++g)
            if (mask & (1u << g)) {
                failed.insert(g);
                damaged.erase_group(g);
            }
        const bool base = plan_group_repair(code, damaged, failed).has_value();
        for (int trial = 0; trial < 4; ++trial) {
            std::shuffle(order.begin(), order.end(), rng);
            auto plan = plan_group_repair(code, damaged, failed, &order);
            REQUIRE(plan.has_value() == base);
            if (plan) {
                auto copy = damaged;
                execute_plan(code, copy, *plan);
                REQUIRE(copy.blocks == pristine);
            }
        }
    }
}

TEST_CASE("repairable-group-count bound") {
    CHECK(max_repairable_failed_groups_bound({.m = 4, .r = 1, .u = 2, .delta = 1}) == 3);
    CHECK(max_repairable_failed_groups_bound({.m = 4, .r = 5, .u = 6, .delta = 5}) == 15);
}

TEST_CASE("empty failure set yields an empty plan") {
    std::mt19937 rng(16);
    Code code = tiny_gf2(5);
    auto st = code.encode(random_cluster_message(code, rng));
    auto plan = plan_group_repair(code, st, {});
    REQUIRE(plan.has_value());
    CHECK(plan->steps.empty());
    CHECK(execute_plan(code, st, *plan).symbols_moved == 0);
}
