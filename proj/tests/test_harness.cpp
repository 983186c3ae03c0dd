#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sstream>

#include "nct/harness.hpp"

using namespace nct;

namespace {

ExperimentConfig quick_cfg(const std::string& experiment) {
    ExperimentConfig cfg;
    cfg.experiment = experiment;
    cfg.nodes = 7;
    cfg.capacity = 3;
    cfg.n = 24;
    cfg.trials = 3;
    cfg.seed = 5;
    return cfg;
}

} // namespace

TEST_CASE("config parsing") {
    std::istringstream in("# comment\n"
                          "q = 7\n"
                          "nodes = 9\n"
                          "scheme = nrsc\n"
                          "experiment = locate-random-rs\n"
                          "p_f = 0.25\n"
                          "seed = 99\n");
    ExperimentConfig cfg = parse_config(in);
    CHECK(cfg.q == 7);
    CHECK(cfg.nodes == 9);
    CHECK(cfg.scheme == Scheme::Nrsc);
    CHECK(cfg.kind() == ExperimentKind::LocateRandomRs);
    CHECK(cfg.p_f == doctest::Approx(0.25));
    CHECK(cfg.seed == 99);

    std::istringstream bad("nodes 9\n");
    CHECK_THROWS_AS(parse_config(bad), UsageError);
    std::istringstream unknown("nonsense = 1\n");
    CHECK_THROWS_AS(parse_config(unknown), UsageError);
    std::istringstream badval("nodes = many\n");
    CHECK_THROWS_AS(parse_config(badval), UsageError);
}

TEST_CASE("config validation catches incompatibilities before running") {
    ExperimentConfig cfg = quick_cfg("locate-adversary-rs");
    cfg.scheme = Scheme::RlncWeak; // needs nrsc
    CHECK_THROWS_AS(cfg.validate(), UsageError);

    ExperimentConfig cfg2 = quick_cfg("locate-adversary-rlnc");
    cfg2.scheme = Scheme::RlncStrong;
    cfg2.z = 2;
    cfg2.capacity = 3; // 2z+1 > C
    cfg2.profile = "locate-adv";
    CHECK_THROWS_AS(cfg2.validate(), UsageError);

    ExperimentConfig cfg3 = quick_cfg("topo-random-rlnc");
    cfg3.scheme = Scheme::RlncStrong; // needs weak kind
    CHECK_THROWS_AS(cfg3.validate(), UsageError);

    ExperimentConfig cfg4 = quick_cfg("locate-random-rlnc");
    cfg4.n = 2; // n <= C
    CHECK_THROWS_AS(cfg4.validate(), UsageError);
}

TEST_CASE("zero trials produce an empty summary") {
    ExperimentConfig cfg = quick_cfg("locate-random-rlnc");
    cfg.trials = 0;
    ExperimentResult res = run_experiment(cfg);
    CHECK(res.records.empty());
    CHECK(res.summary.trials == 0);
    CHECK(res.summary.success_rate() == 0.0);
}

TEST_CASE("records replay byte-identically from the master seed") {
    ExperimentConfig cfg = quick_cfg("locate-random-rlnc");
    ExperimentResult a = run_experiment(cfg);
    ExperimentResult b = run_experiment(cfg);
    std::ostringstream sa, sb, ja, jb;
    write_records(sa, a, "text");
    write_records(sb, b, "text");
    CHECK(sa.str() == sb.str());
    write_records(ja, a, "json-lines");
    write_records(jb, b, "json-lines");
    CHECK(ja.str() == jb.str());
    CHECK(ja.str().find("millis") == std::string::npos);
}

TEST_CASE("thread count does not change results") {
    ExperimentConfig cfg = quick_cfg("locate-random-rlnc");
    cfg.trials = 6;
    ExperimentResult serial = run_experiment(cfg);
    cfg.threads = 3;
    ExperimentResult parallel = run_experiment(cfg);
    std::ostringstream a, b;
    write_records(a, serial, "json-lines");
    write_records(b, parallel, "json-lines");
    CHECK(a.str() == b.str());
}

TEST_CASE("per-trial seeds are stable") {
    CHECK(trial_seed(1, 0) == trial_seed(1, 0));
    CHECK(trial_seed(1, 0) != trial_seed(1, 1));
    CHECK(trial_seed(1, 0) != trial_seed(2, 0));
}

TEST_CASE("every experiment kind runs end to end") {
    for (const char* name : {"locate-adversary-rlnc", "locate-random-rlnc",
                             "locate-adversary-rs", "locate-random-rs", "topo-random-rlnc",
                             "topo-adv-rlnc", "find-topo-rs", "erasure-locate", "erasure-irv",
                             "delay-locate"}) {
        ExperimentConfig cfg = quick_cfg(name);
        cfg.trials = 2;
        ExperimentKind kind = cfg.kind();
        if (kind == ExperimentKind::LocateAdversaryRlnc) {
            cfg.scheme = Scheme::RlncStrong;
            cfg.profile = "locate-adv";
            cfg.z = 1;
        } else if (kind == ExperimentKind::LocateAdversaryRs) {
            cfg.scheme = Scheme::Nrsc;
            cfg.profile = "degrees";
            cfg.min_out_degree = 2;
            cfg.min_in_degree = 1;
            cfg.z = 1;
        } else if (kind == ExperimentKind::LocateRandomRs ||
                   kind == ExperimentKind::FindTopoRs) {
            cfg.scheme = Scheme::Nrsc;
            cfg.t = 4;
        } else if (kind == ExperimentKind::TopoRandomRlnc) {
            cfg.t = 60;
            cfg.n = 64;
            cfg.sparsity = 2;
        } else if (kind == ExperimentKind::TopoAdvRlnc) {
            cfg.scheme = Scheme::RlncStrong;
            cfg.profile = "strong";
            cfg.z = 1;
            cfg.nodes = 6;
            cfg.candidate_count = 4;
        } else if (kind == ExperimentKind::DelayLocate) {
            cfg.z = 1;
        }
        ExperimentResult res = run_experiment(cfg);
        CHECK(res.records.size() == 2);
    }
}

TEST_CASE("bundles round-trip through the text format") {
    ExperimentConfig cfg = quick_cfg("locate-random-rlnc");
    cfg.t = 3;
    TraceBundle bundle = simulate_bundle(cfg);
    std::ostringstream out;
    write_bundle(out, bundle, true);
    std::istringstream in(out.str());
    TraceBundle back = read_bundle(in);

    CHECK(back.q == bundle.q);
    CHECK(back.capacity == bundle.capacity);
    CHECK(back.scheme == bundle.scheme);
    CHECK(back.traces.size() == bundle.traces.size());
    REQUIRE(back.known_network.has_value());
    CHECK(*back.known_network == *bundle.known_network);
    for (std::size_t g = 0; g < bundle.traces.size(); ++g) {
        CHECK(back.traces[g].Y == bundle.traces[g].Y);
        CHECK(back.traces[g].truth().X == bundle.traces[g].truth().X);
        CHECK(back.traces[g].truth().error_edges == bundle.traces[g].truth().error_edges);
    }
    CHECK(back.has_ground_truth);

    // identical content when rewritten
    std::ostringstream again;
    write_bundle(again, back, true);
    CHECK(again.str() == out.str());
}

TEST_CASE("bundles without ground truth refuse decoding-layer algorithms") {
    ExperimentConfig cfg = quick_cfg("locate-random-rlnc");
    cfg.t = 2;
    TraceBundle bundle = simulate_bundle(cfg);
    std::ostringstream out;
    write_bundle(out, bundle, false);
    std::istringstream in(out.str());
    TraceBundle blind = read_bundle(in);
    CHECK_FALSE(blind.has_ground_truth);
    CHECK_THROWS_AS(run_on_bundle(blind, "random-rlnc"), UsageError);
}

TEST_CASE("run_on_bundle reproduces the harness outcome") {
    SUBCASE("random rlnc localization") {
        ExperimentConfig cfg = quick_cfg("locate-random-rlnc");
        cfg.t = 1;
        TraceBundle bundle = simulate_bundle(cfg);
        TomographyReport report = run_on_bundle(bundle, "random-rlnc");
        CHECK(report.kind == "edge-set");
        CHECK(report.success);
    }
    SUBCASE("nrsc adversary localization") {
        ExperimentConfig cfg = quick_cfg("locate-adversary-rs");
        cfg.scheme = Scheme::Nrsc;
        cfg.profile = "degrees";
        cfg.min_out_degree = 2;
        cfg.min_in_degree = 1;
        cfg.z = 1;
        cfg.error = "adversarial";
        cfg.t = 1;
        TraceBundle bundle = simulate_bundle(cfg);
        TomographyReport report = run_on_bundle(bundle, "adversary-rs");
        CHECK(report.success);
    }
    SUBCASE("erasures") {
        ExperimentConfig cfg = quick_cfg("erasure-locate");
        cfg.error = "erasure-adversarial";
        cfg.z = 1;
        cfg.t = 1;
        TraceBundle bundle = simulate_bundle(cfg);
        TomographyReport report = run_on_bundle(bundle, "erasures");
        CHECK(report.kind == "edge-set");
    }
    SUBCASE("irv lines report carries the dependence estimate") {
        ExperimentConfig cfg = quick_cfg("topo-random-rlnc");
        cfg.t = 6;
        cfg.error = "random";
        TraceBundle bundle = simulate_bundle(cfg);
        TomographyReport report = run_on_bundle(bundle, "irv");
        CHECK(report.kind == "lines");
        CHECK(report.diagnostics.count("independence_estimate") == 1);
    }
    SUBCASE("unknown algorithm") {
        ExperimentConfig cfg = quick_cfg("locate-random-rlnc");
        cfg.t = 1;
        TraceBundle bundle = simulate_bundle(cfg);
        CHECK_THROWS_AS(run_on_bundle(bundle, "nonsense"), UsageError);
    }
}

TEST_CASE("receiver locality mirrors the network's ports") {
    Rng rng(3);
    NetworkParams params;
    params.nodes = 7;
    params.capacity = 3;
    Network net = random_network(params, rng);
    ReceiverLocality rloc = receiver_locality(net, 2);
    CHECK(rloc.capacity() == 3);
    CHECK(rloc.receiver == "r");
    CHECK(rloc.source == "s");
    for (std::size_t j = 0; j < rloc.in_edges.size(); ++j) {
        const Edge& e = net.edge(net.in_edges(net.receiver())[j]);
        CHECK(net.label(e.tail) == rloc.in_edges[j].first);
        CHECK(e.parallel == rloc.in_edges[j].second);
    }
}
