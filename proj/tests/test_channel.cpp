#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "nct/channel.hpp"
#include "nct/codes.hpp"
#include "nct/network.hpp"

using namespace nct;

namespace {

Network relay_net() {
    return Network::build({"s", "u", "r"}, {{0, 1, 0}, {0, 1, 1}, {1, 2, 0}, {1, 2, 1}}, "s",
                          "r", true);
}

CodingAssignment relay_assignment(const Network& net, const Field& f) {
    std::map<std::pair<int, int>, FieldElement> beta;
    beta[{0, 2}] = FieldElement(1, f);
    beta[{1, 2}] = FieldElement(2, f);
    beta[{0, 3}] = FieldElement(1, f);
    beta[{1, 3}] = FieldElement(1, f);
    return manual_assignment(net, f, std::move(beta), FieldMatrix::identity(2, f));
}

Network diamond_net() {
    return Network::build({"s", "u", "v", "r"},
                          {{0, 1, 0}, {0, 2, 0}, {1, 2, 0}, {1, 3, 0}, {2, 3, 0}}, "s", "r",
                          true);
}

struct RandomSetup {
    Network net;
    CodingAssignment asg;
    IrvTable irv;
};

RandomSetup random_setup(Rng& rng, int nodes = 7, int capacity = 3) {
    NetworkParams params;
    params.nodes = nodes;
    params.capacity = capacity;
    params.profile = ConnectivityProfile::weak();
    Field f;
    RandomSetup s{random_network(params, rng), {}, {}};
    s.asg = assign_rlnc(s.net, derive_codebook(CodebookKind::Weak, rng.next(), f));
    s.irv = compute_irvs(s.net, s.asg);
    return s;
}

} // namespace

TEST_CASE("make_message") {
    Field f;
    Rng rng(1);
    FieldMatrix x = make_message(2, 4, f, rng);
    CHECK(x.at(0, 0).value() == 1);
    CHECK(x.at(0, 1).value() == 0);
    CHECK(x.at(1, 0).value() == 0);
    CHECK(x.at(1, 1).value() == 1);
    CHECK_THROWS_AS(make_message(2, 2, f, rng), UsageError);
}

TEST_CASE("single-symbol probe through the relay with an injected error") {
    Field f;
    Network net = relay_net();
    CodingAssignment asg = relay_assignment(net, f);
    FieldMatrix x(2, 1, f);
    x.set(0, 0, FieldElement(1, f));
    x.set(1, 0, FieldElement(2, f));
    std::map<int, FieldVector> packets;
    packets.emplace(0, FieldVector({2}, f));
    Rng rng(3);
    GenerationTrace trace = transmit(net, asg, x, ErrorModel::adversarial(packets), rng);
    CHECK(trace.Y.at(0, 0).value() == 7);
    CHECK(trace.Y.at(1, 0).value() == 5);
    CHECK(trace.truth().error_edges == std::vector<int>{0});
}

TEST_CASE("no errors means Y = T X") {
    Field f;
    Rng rng(9);
    RandomSetup s = random_setup(rng);
    FieldMatrix x = make_message(s.net.capacity(), 24, f, rng);
    GenerationTrace trace = transmit(s.net, s.asg, x, ErrorModel::none(), rng);
    CHECK(trace.Y == s.irv.transfer() * x);
    CHECK(trace.truth().error_edges.empty());
}

TEST_CASE("erasing the receiver's whole in-cut zeroes Y") {
    Field f;
    Rng rng(9);
    RandomSetup s = random_setup(rng);
    FieldMatrix x = make_message(s.net.capacity(), 16, f, rng);
    ErrorModel model = ErrorModel::erasure_adversarial(s.net.in_edges(s.net.receiver()));
    GenerationTrace trace = transmit(s.net, s.asg, x, model, rng);
    CHECK(trace.Y.is_zero());
}

TEST_CASE("received matrix decomposes through the injected packets exactly") {
    Field f;
    Rng rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        Rng trng = rng.derive(trial);
        RandomSetup s = random_setup(trng);
        int c = s.net.capacity();
        FieldMatrix x = make_message(c, 20, f, trng);
        ErrorModel model;
        switch (trial % 4) {
        case 0:
            model = ErrorModel::random_errors(0.3, 1 + trng.below(3));
            break;
        case 1: {
            std::vector<int> edges{static_cast<int>(trng.below(s.net.edge_count()))};
            model = uniform_adversary(edges, 20, f, trng);
            break;
        }
        case 2:
            model = ErrorModel::erasure_random(0.3);
            break;
        default:
            model = ErrorModel::delay({static_cast<int>(trng.below(s.net.edge_count()))},
                                      make_message(c, 20, f, trng));
        }
        GenerationTrace trace = transmit(s.net, s.asg, x, model, trng);
        const GroundTruth& gt = trace.truth();
        FieldMatrix lhs = trace.Y - s.irv.transfer() * x;
        FieldMatrix rhs(c, 20, f);
        for (const auto& [e, z] : gt.injected) {
            for (int i = 0; i < c; ++i) {
                FieldVector row = rhs.row(i);
                row.axpy(s.irv.theta[e][i], z);
                rhs.set_row(i, row);
            }
        }
        CHECK(lhs == rhs);
        CHECK(rank(lhs) <= gt.error_edges.size());
    }
}

TEST_CASE("genie decoding thresholds") {
    Field f;
    Rng rng(12);
    RandomSetup s = random_setup(rng, 7, 3); // C = 3
    FieldMatrix x = make_message(3, 12, f, rng);

    GenerationTrace clean = transmit(s.net, s.asg, x, ErrorModel::none(), rng);
    CHECK(genie_decode(clean).has_value());

    std::vector<int> one{0};
    GenerationTrace adv1 = transmit(s.net, s.asg, x, uniform_adversary(one, 12, f, rng), rng);
    CHECK(genie_decode(adv1).has_value()); // 2*1+1 <= 3

    std::vector<int> two{0, 1};
    GenerationTrace adv2 = transmit(s.net, s.asg, x, uniform_adversary(two, 12, f, rng), rng);
    CHECK_FALSE(genie_decode(adv2).has_value()); // 2*2+1 > 3

    GenerationTrace era2 =
        transmit(s.net, s.asg, x, ErrorModel::erasure_adversarial(two), rng);
    CHECK(genie_decode(era2).has_value()); // 2+1 <= 3
}

TEST_CASE("error_matrix splits the payload residue") {
    Field f;
    Rng rng(13);
    RandomSetup s = random_setup(rng);
    int c = s.net.capacity();
    FieldMatrix x = make_message(c, 24, f, rng);
    GenerationTrace clean = transmit(s.net, s.asg, x, ErrorModel::none(), rng);
    CHECK(error_matrix(clean, x).is_zero());

    FieldMatrix probe(c, 2, f);
    GenerationTrace bad(probe, GroundTruth{}, ErrorModel::Kind::None, "manual", 0);
    CHECK_THROWS_AS(error_matrix(bad, probe), UsageError);
}

TEST_CASE("single random error edge leaves its IRV line in the payload residue") {
    Field f;
    Rng rng(14);
    int hits = 0, trials = 40;
    for (int trial = 0; trial < trials; ++trial) {
        Rng trng = rng.derive(trial);
        RandomSetup s = random_setup(trng);
        int c = s.net.capacity();
        FieldMatrix x = make_message(c, 64 * c, f, trng);
        int edge = static_cast<int>(trng.below(s.net.edge_count()));
        // force a nonzero sparse packet on exactly one edge
        FieldVector z(64 * c, f);
        z.set(trng.below(64 * c), trng.sample_nonzero(f));
        std::map<int, FieldVector> packets;
        packets.emplace(edge, z);
        GenerationTrace trace = transmit(s.net, s.asg, x, ErrorModel::adversarial(packets), trng);
        FieldMatrix zr = error_matrix(trace, x);
        if (s.irv.theta[edge].is_zero()) continue;
        if (rank(zr) == 1 && col_space_contains(zr, s.irv.theta[edge])) ++hits;
    }
    CHECK(hits >= trials - 2); // only header-position packets can miss
}

TEST_CASE("payload residue spans the failing IRVs at realistic rates") {
    // C = 3, n = 192: the guarantee is at least 1 - p_span with
    // p_span = 1 - (1 - z/q)(1 - 2 C^2 / (n - C)).
    Field f;
    Rng rng(15);
    const int trials = 100;
    int good = 0;
    for (int trial = 0; trial < trials; ++trial) {
        Rng trng = rng.derive(trial);
        RandomSetup s = random_setup(trng, 7, 3);
        FieldMatrix x = make_message(3, 192, f, trng);
        GenerationTrace trace(FieldMatrix(), GroundTruth{}, ErrorModel::Kind::None, "", 0);
        ErrorModel model = ErrorModel::random_errors(2.0 / s.net.edge_count(), 1);
        for (int redraw = 0; redraw < 200; ++redraw) {
            trace = transmit(s.net, s.asg, x, model, trng);
            if (trace.truth().error_edges.size() <= 2) break;
        }
        FieldMatrix zr = error_matrix(trace, x);
        FieldMatrix theta = s.irv.irm(trace.truth().error_edges);
        bool equal = rank(zr) == rank(theta) && rank(zr.hstack(theta)) == rank(theta);
        if (equal) ++good;
    }
    double p_span = 1.0 - (1.0 - 2.0 / Field::kDefaultModulus) * (1.0 - 2.0 * 9.0 / 189.0);
    CHECK(good >= static_cast<int>(trials * (1.0 - p_span)));
}

TEST_CASE("erasures with full source flow expose exactly the IRV span") {
    Field f;
    Rng rng(16);
    int good = 0, trials = 60;
    for (int trial = 0; trial < trials; ++trial) {
        Rng trng = rng.derive(trial);
        RandomSetup s = random_setup(trng, 7, 3);
        std::vector<int> erased;
        for (int scan = 0; scan < 100 && erased.empty(); ++scan) {
            int a = static_cast<int>(trng.below(s.net.edge_count()));
            int b = static_cast<int>(trng.below(s.net.edge_count()));
            if (a == b) continue;
            if (source_flow_rank(s.net, {a, b}) == 2) erased = {a, b};
        }
        if (erased.empty()) continue;
        FieldMatrix x = make_message(3, 32, f, trng);
        GenerationTrace trace =
            transmit(s.net, s.asg, x, ErrorModel::erasure_adversarial(erased), trng);
        FieldMatrix zhat = trace.Y - s.irv.transfer() * x;
        FieldMatrix theta = s.irv.irm(trace.truth().error_edges);
        if (rank(zhat) == rank(theta) && rank(zhat.hstack(theta)) == rank(theta)) ++good;
    }
    CHECK(good >= trials - 2);
}

TEST_CASE("confusion attack lands inside the decoy span") {
    Field f;
    Network net = diamond_net();
    std::map<std::pair<int, int>, FieldElement> beta;
    beta[{0, 2}] = FieldElement(2, f);
    beta[{0, 3}] = FieldElement(3, f);
    beta[{1, 4}] = FieldElement(2, f);
    beta[{2, 4}] = FieldElement(1, f);
    CodingAssignment asg = manual_assignment(net, f, beta, FieldMatrix::identity(2, f));
    IrvTable irv = compute_irvs(net, asg);
    Rng rng(18);
    FieldMatrix x = make_message(2, 8, f, rng);

    // e1 (s->v) and e2 (u->v) share the line through the bottleneck edge
    ErrorModel attack = confusion_attack(net, asg, {1}, {2}, x);
    GenerationTrace trace = transmit(net, asg, x, attack, rng);
    FieldMatrix zhat = trace.Y - irv.transfer() * x;
    CHECK_FALSE(zhat.is_zero());
    FieldMatrix span2 = irv.irm({2});
    for (std::size_t j = 0; j < zhat.cols(); ++j) {
        CHECK(col_space_contains(span2, zhat.col(j)));
    }

    // flow-independent pair: spans meet trivially, no attack exists
    CHECK_THROWS_AS(confusion_attack(net, asg, {0}, {4}, x), AttackInfeasibleError);
}

TEST_CASE("delayed edges carry the previous generation") {
    Field f;
    Network net = diamond_net();
    std::map<std::pair<int, int>, FieldElement> beta;
    beta[{0, 2}] = FieldElement(2, f);
    beta[{0, 3}] = FieldElement(3, f);
    beta[{1, 4}] = FieldElement(2, f);
    beta[{2, 4}] = FieldElement(1, f);
    CodingAssignment asg = manual_assignment(net, f, beta, FieldMatrix::identity(2, f));
    IrvTable irv = compute_irvs(net, asg);
    Rng rng(19);
    FieldMatrix x_prev = make_message(2, 8, f, rng);
    FieldMatrix x = make_message(2, 8, f, rng);
    // delay edge e3 = (u, r): the receiver's first row is u's stale packet
    GenerationTrace trace = transmit(net, asg, x, ErrorModel::delay({3}, x_prev), rng);
    FieldVector stale = irv.ghat[3];
    FieldVector want(8, f);
    for (std::size_t j = 0; j < 8; ++j) {
        FieldElement acc(0, f);
        for (std::size_t i = 0; i < 2; ++i) acc += stale[i] * x_prev.at(i, j);
        want.set(j, acc);
    }
    CHECK(trace.Y.row(0) == want);
}

TEST_CASE("hide_node erases a node's inputs") {
    Network net = diamond_net();
    ErrorModel m = hide_node(net, net.node_index("v"));
    CHECK(m.kind == ErrorModel::Kind::ErasureAdversarial);
    CHECK(m.edges == net.in_edges(net.node_index("v")));
    CHECK_THROWS_AS(hide_node(net, net.source()), UsageError);
}

TEST_CASE("ground truth is unreadable under seal") {
    Field f;
    Rng rng(20);
    RandomSetup s = random_setup(rng);
    FieldMatrix x = make_message(s.net.capacity(), 12, f, rng);
    GenerationTrace trace = transmit(s.net, s.asg, x, ErrorModel::none(), rng);
    CHECK_NOTHROW(trace.truth());
    {
        GroundTruthSeal seal;
        CHECK_THROWS_AS(trace.truth(), UsageError);
    }
    CHECK_NOTHROW(trace.truth());
}

TEST_CASE("model validation") {
    CHECK_THROWS_AS(ErrorModel::random_errors(1.5), UsageError);
    CHECK_THROWS_AS(ErrorModel::random_errors(0.1, 0), UsageError);
    Field f;
    std::map<int, FieldVector> zero_packet;
    zero_packet.emplace(0, FieldVector(4, f));
    CHECK_THROWS_AS(ErrorModel::adversarial(zero_packet), UsageError);
}
