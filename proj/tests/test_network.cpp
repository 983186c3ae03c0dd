#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <sstream>

#include "nct/network.hpp"

using namespace nct;

namespace {

// s ={2 parallel}=> u ={2 parallel}=> r
Network relay_net() {
    return Network::build({"s", "u", "r"}, {{0, 1, 0}, {0, 1, 1}, {1, 2, 0}, {1, 2, 1}}, "s",
                          "r", true);
}

// s->u (e0), s->v (e1), u->v (e2), u->r (e3), v->r (e4)
Network diamond_net() {
    return Network::build({"s", "u", "v", "r"},
                          {{0, 1, 0}, {0, 2, 0}, {1, 2, 0}, {1, 3, 0}, {2, 3, 0}}, "s", "r",
                          true);
}

} // namespace

TEST_CASE("build validation") {
    CHECK_THROWS_AS(Network::build({"s", "r"}, {{0, 1, 0}, {0, 1, 0}}, "s", "r", true),
                    UsageError); // duplicate triple
    CHECK_THROWS_AS(Network::build({"s", "r"}, {{0, 0, 0}}, "s", "r", true), UsageError);
    CHECK_THROWS_AS(Network::build({"s", "a", "r"}, {{0, 1, 0}, {1, 0, 0}}, "s", "r", true),
                    UsageError); // cycle + receiver unreachable
    // a node that cannot reach the receiver
    CHECK_THROWS_AS(
        Network::build({"s", "a", "b", "r"}, {{0, 1, 0}, {1, 3, 0}, {0, 2, 0}}, "s", "r", true),
        UsageError);
    // source out-degree != receiver in-degree
    CHECK_THROWS_AS(Network::build({"s", "a", "r"}, {{0, 1, 0}, {0, 1, 1}, {1, 2, 0}}, "s", "r",
                                   true),
                    UsageError);
}

TEST_CASE("min cut") {
    CHECK(min_cut(relay_net()) == 2);
    Network chain = Network::build({"s", "a", "r"}, {{0, 1, 0}, {1, 2, 0}}, "s", "r", true);
    CHECK(min_cut(chain) == 1);
    Network dia = Network::build({"s", "a", "b", "r"},
                                 {{0, 1, 0}, {0, 2, 0}, {1, 3, 0}, {2, 3, 0}}, "s", "r", true);
    CHECK(min_cut(dia) == 2);
}

TEST_CASE("flow rank on the diamond") {
    Network net = diamond_net();
    // e1 and e2 both drain through v's single outgoing edge
    CHECK(flow_rank(net, {1, 2}) == 1);
    // e0 and e4 ride edge-disjoint paths
    CHECK(flow_rank(net, {0, 4}) == 2);
    for (int e = 0; e < 5; ++e) CHECK(flow_rank(net, {e}) == 1);
    CHECK(flow_rank(net, {}) == 0);
    CHECK(flow_rank(net, {1, 1, 1}) == 1); // duplicates collapse
}

TEST_CASE("flow independence") {
    Network net = diamond_net();
    CHECK_FALSE(flow_independent(net, {{1}, {2}}));
    CHECK(flow_independent(net, {{0}, {4}}));
    CHECK(flow_independent(net, {{}, {3}}));
}

TEST_CASE("extended set") {
    Network net = diamond_net();
    CHECK(extended_set(net, {1}) == std::vector<int>({1, 2, 4}));
    CHECK(extended_set(net, {}) == std::vector<int>());
    // the receiver's full in-cut extends to everything
    std::vector<int> all = extended_set(net, {3, 4});
    CHECK(all == std::vector<int>({0, 1, 2, 3, 4}));
}

TEST_CASE("extended set properties on random networks") {
    Rng rng(31);
    for (int trial = 0; trial < 25; ++trial) {
        Rng trng = rng.derive(trial);
        NetworkParams params;
        params.nodes = 5 + trng.below(5);
        params.capacity = 2 + trng.below(2);
        params.profile = ConnectivityProfile::weak();
        Network net = random_network(params, trng);

        std::vector<int> set;
        for (std::size_t e = 0; e < net.edge_count(); ++e) {
            if (trng.below(4) == 0) set.push_back(static_cast<int>(e));
        }
        int base = flow_rank(net, set);
        std::vector<int> ext = extended_set(net, set);

        CHECK(std::includes(ext.begin(), ext.end(), set.begin(), set.end()));
        CHECK(flow_rank(net, ext) == base);
        CHECK(extended_set(net, ext) == ext);

        // scan order must not matter
        std::vector<int> order(net.edge_count());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
        std::reverse(order.begin(), order.end());
        CHECK(extended_set_ordered(net, set, order) == ext);
        for (int swaps = 0; swaps < 3; ++swaps) {
            std::size_t a = trng.below(order.size()), b = trng.below(order.size());
            std::swap(order[a], order[b]);
        }
        CHECK(extended_set_ordered(net, set, order) == ext);

        // monotone and subadditive
        std::vector<int> super = set;
        if (!ext.empty()) super.push_back(ext.front());
        int sup_rank = flow_rank(net, super);
        CHECK(base <= sup_rank);
        CHECK(sup_rank <= base + flow_rank(net, {ext.empty() ? 0 : ext.front()}));

        CHECK(min_cut(net) == flow_rank(net, net.out_edges(net.source())));
    }
}

TEST_CASE("source flow rank") {
    Network net = diamond_net();
    CHECK(source_flow_rank(net, {3, 4}) == 2);
    CHECK(source_flow_rank(net, {0, 2}) == 1); // e2 can only be fed through e0
    CHECK(source_flow_rank(net, {0}) == 1);
}

TEST_CASE("profiles") {
    CHECK(check_profile(relay_net(), ConnectivityProfile::weak()).ok);
    Network chain = Network::build({"s", "a", "r"}, {{0, 1, 0}, {1, 2, 0}}, "s", "r", true);
    ProfileCheck pc = check_profile(chain, ConnectivityProfile::weak());
    CHECK_FALSE(pc.ok);
    CHECK(pc.violations.size() == 1);
    CHECK_FALSE(check_profile(relay_net(), ConnectivityProfile::strong(1)).ok);
}

TEST_CASE("random networks satisfy their requested shape") {
    Rng rng(7);
    for (int trial = 0; trial < 40; ++trial) {
        Rng trng = rng.derive(trial);
        NetworkParams params;
        params.nodes = 4 + trng.below(9);
        params.capacity = 2 + trng.below(3);
        int mode = static_cast<int>(trng.below(3));
        int z = 1;
        if (mode == 0) params.profile = ConnectivityProfile::weak();
        if (mode == 1) {
            z = 1 + static_cast<int>(trng.below(1));
            params.capacity = std::max(params.capacity, 2 * z + 1);
            params.profile = ConnectivityProfile::strong(z);
        }
        if (mode == 2) {
            params.capacity = std::max(params.capacity, 2 * z);
            params.profile = ConnectivityProfile::locate_adv(z);
        }
        Network net = random_network(params, trng);
        CHECK(static_cast<int>(net.node_count()) == params.nodes);
        CHECK(net.capacity() == params.capacity);
        CHECK(min_cut(net) == params.capacity);
        CHECK(check_profile(net, params.profile).ok);
    }
}

TEST_CASE("random network generation is deterministic") {
    NetworkParams params;
    params.nodes = 8;
    params.capacity = 3;
    Rng a(12), b(12);
    CHECK(random_network(params, a) == random_network(params, b));
}

TEST_CASE("infeasible parameters fail fast") {
    NetworkParams params;
    params.nodes = 5;
    params.capacity = 2;
    params.profile = ConnectivityProfile::strong(1); // needs C >= 3
    Rng rng(1);
    CHECK_THROWS_AS(random_network(params, rng), GenerationError);
}

TEST_CASE("file round trip") {
    Network net = diamond_net();
    std::ostringstream out;
    write_network(out, net);
    std::istringstream in(out.str());
    Network back = read_network(in);
    CHECK(back == net);
}

TEST_CASE("file format accepts comments and implicit parallel indices") {
    std::istringstream in("# fixture\n"
                          "node s\nnode u\nnode r\n"
                          "source s\nreceiver r\n"
                          "edge s u\nedge s u\n"
                          "edge u r 0\nedge u r 1\n");
    Network net = read_network(in);
    CHECK(net.edge_count() == 4);
    CHECK(net.find_edge("s", "u", 1) >= 0);
    CHECK(net.capacity() == 2);
}

TEST_CASE("edge names parse back") {
    Network net = diamond_net();
    for (std::size_t e = 0; e < net.edge_count(); ++e) {
        CHECK(net.find_edge(net.edge_name(e)) == static_cast<int>(e));
    }
    CHECK(net.find_edge("u->nope#0") == -1);
}
