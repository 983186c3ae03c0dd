#include "nct/suites.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "nct/channel.hpp"
#include "nct/codes.hpp"
#include "nct/errors.hpp"
#include "nct/harness.hpp"
#include "nct/matrix.hpp"
#include "nct/network.hpp"
#include "nct/rscode.hpp"
#include "nct/tomography.hpp"

namespace nct::suites {

namespace {

using Clock = std::chrono::steady_clock;

struct Check {
    bool ok = true;
    std::ostringstream detail;

    void require(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            if (detail.tellp() > 0) detail << "; ";
            detail << what;
        }
    }
};

Network two_relay_parallel_net() {
    // s ={e1,e2}=> u ={e3,e4}=> r, parallel edges on both hops.
    return Network::build({"s", "u", "r"},
                          {{0, 1, 0}, {0, 1, 1}, {1, 2, 0}, {1, 2, 1}}, "s", "r", true);
}

CodingAssignment two_relay_assignment(const Network& net, const Field& f) {
    std::map<std::pair<int, int>, FieldElement> beta;
    beta[{0, 2}] = FieldElement(1, f);
    beta[{1, 2}] = FieldElement(2, f);
    beta[{0, 3}] = FieldElement(1, f);
    beta[{1, 3}] = FieldElement(1, f);
    return manual_assignment(net, f, std::move(beta), FieldMatrix::identity(2, f));
}

Network diamond_relay_net() {
    // s -> u (e1), s -> v (e2), u -> v (e3), u -> r (e4), v -> r (e5).
    return Network::build({"s", "u", "v", "r"},
                          {{0, 1, 0}, {0, 2, 0}, {1, 2, 0}, {1, 3, 0}, {2, 3, 0}}, "s", "r",
                          true);
}

CodingAssignment diamond_relay_assignment(const Network& net, const Field& f) {
    std::map<std::pair<int, int>, FieldElement> beta;
    beta[{0, 2}] = FieldElement(2, f); // e1 through u to e3
    beta[{0, 3}] = FieldElement(3, f); // e1 through u to e4
    beta[{1, 4}] = FieldElement(2, f); // e2 through v to e5
    beta[{2, 4}] = FieldElement(1, f); // e3 through v to e5
    return manual_assignment(net, f, std::move(beta), FieldMatrix::identity(2, f));
}

SuiteResult finish(const std::string& name, Check& check, Clock::time_point start,
                   double limit_seconds) {
    SuiteResult r;
    r.name = name;
    r.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    r.limit_seconds = limit_seconds;
    if (limit_seconds > 0 && r.seconds > limit_seconds) {
        check.require(false, "runtime " + std::to_string(r.seconds) + "s over budget");
    }
    r.passed = check.ok;
    r.detail = check.detail.str();
    if (r.passed && r.detail.empty()) r.detail = "ok";
    return r;
}

// Single-edge error on a two-relay coded network: the receiver pins the
// erroneous edge from one observation.
SuiteResult suite_toy_locate(std::uint64_t) {
    auto start = Clock::now();
    Check check;
    Field f;
    Network net = two_relay_parallel_net();
    CodingAssignment asg = two_relay_assignment(net, f);
    IrvTable irv = compute_irvs(net, asg);

    check.require(irv.theta[0].raw() == std::vector<std::uint32_t>({1, 1}), "theta(e1)");
    check.require(irv.theta[1].raw() == std::vector<std::uint32_t>({2, 1}), "theta(e2)");
    check.require(irv.theta[2].raw() == std::vector<std::uint32_t>({1, 0}), "theta(e3)");
    check.require(irv.theta[3].raw() == std::vector<std::uint32_t>({0, 1}), "theta(e4)");

    FieldMatrix x(2, 1, f);
    x.set(0, 0, FieldElement(1, f));
    x.set(1, 0, FieldElement(2, f));
    std::map<int, FieldVector> packets;
    packets.emplace(0, FieldVector({2}, f));
    ErrorModel model = ErrorModel::adversarial(std::move(packets));
    Rng rng(1);
    GenerationTrace trace = transmit(net, asg, x, model, rng);
    check.require(trace.Y.at(0, 0).value() == 7 && trace.Y.at(1, 0).value() == 5,
                  "received vector");

    FieldMatrix zhat = trace.Y - irv.transfer() * x;
    check.require(zhat.at(0, 0).value() == 2 && zhat.at(1, 0).value() == 2, "error vector");

    std::vector<int> located = locate_adversary_rlnc(zhat, net, irv, 1); // warm
    auto t0 = Clock::now();
    located = locate_adversary_rlnc(zhat, net, irv, 1);
    double ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
    check.require(located == std::vector<int>{0}, "located edge");
    check.require(ms < 1.0, "localization took " + std::to_string(ms) + "ms");
    check.detail << "Y=[7,5], residue=[2,2], edge e1, " << ms << "ms";
    return finish("toy-locate", check, start, 0);
}

// The diamond relay's IRV table, all five edges, exact values.
SuiteResult suite_irv_table(std::uint64_t) {
    auto start = Clock::now();
    Check check;
    Field f;
    Network net = diamond_relay_net();
    IrvTable irv = compute_irvs(net, diamond_relay_assignment(net, f));
    const std::vector<std::vector<std::uint32_t>> want = {
        {3, 2}, {0, 2}, {0, 1}, {1, 0}, {0, 1}};
    for (std::size_t e = 0; e < want.size(); ++e) {
        check.require(irv.theta[e].raw() == want[e], "theta(e" + std::to_string(e + 1) + ")");
    }
    check.detail << "5 edges exact";
    return finish("irv-table", check, start, 0);
}

// For every edge of a coded network, projecting its IRV through the
// receiver-port power matrix must reproduce its own power column.
SuiteResult suite_nrsc_identity(std::uint64_t seed) {
    auto start = Clock::now();
    Check check;
    Field f;
    Rng rng(seed);
    int failures = 0, nets = 0, edges_checked = 0;
    for (int trial = 0; trial < 100; ++trial) {
        Rng trng = rng.derive(trial);
        int d = 2 + static_cast<int>(trng.below(3)); // 2..4
        NetworkParams params;
        params.nodes = 5 + static_cast<int>(trng.below(11)); // 5..15
        params.capacity = d + static_cast<int>(trng.below(3));
        params.profile = ConnectivityProfile::degrees(d, 1);
        Network net = random_network(params, trng);
        IdTable ids(net.labels(), 1 + net.capacity(), trng.next(), f);
        IrvTable irv = compute_irvs(net, assign_nrsc(net, ids));
        std::vector<FieldElement> port_ids;
        for (int ei : net.in_edges(net.receiver())) port_ids.push_back(ids.edge_id(net, ei));
        FieldMatrix phi_in = vandermonde(port_ids, d);
        ++nets;
        for (std::size_t e = 0; e < net.edge_count(); ++e) {
            ++edges_checked;
            FieldVector lhs = phi_in * irv.theta[e];
            FieldVector rhs = virv(ids.edge_id(net, static_cast<int>(e)), d);
            if (lhs != rhs) ++failures;
        }
    }
    check.require(failures == 0, std::to_string(failures) + " identity failures");
    check.detail << nets << " networks, " << edges_checked << " edges exact";
    return finish("nrsc-identity", check, start, 10.0);
}

ExperimentConfig base_cfg(std::uint64_t seed) {
    ExperimentConfig cfg;
    cfg.seed = seed;
    return cfg;
}

// Sparse-decoding adversary localization is exact for d = 2z.
SuiteResult suite_rs_locate(std::uint64_t seed) {
    auto start = Clock::now();
    Check check;
    int successes = 0, trials = 0;
    for (int z : {1, 2}) {
        ExperimentConfig cfg = base_cfg(seed + z);
        cfg.experiment = "locate-adversary-rs";
        cfg.scheme = Scheme::Nrsc;
        cfg.profile = "degrees";
        cfg.min_out_degree = 2 * z;
        cfg.min_in_degree = 1;
        cfg.z = z;
        cfg.capacity = 2 * z + 1 + (z == 1 ? 1 : 0);
        cfg.nodes = z == 1 ? 9 : 8;
        cfg.n = 24;
        cfg.trials = 100;
        ExperimentResult res = run_experiment(cfg);
        successes += res.summary.successes;
        trials += res.summary.trials;
    }
    check.require(successes == trials,
                  std::to_string(trials - successes) + " of " + std::to_string(trials) +
                      " trials missed the planted set");
    check.detail << successes << "/" << trials << " exact recoveries";
    return finish("rs-locate", check, start, 30.0);
}

// Random-error localization agrees with the extended-set oracle.
SuiteResult suite_rlnc_random_locate(std::uint64_t seed) {
    auto start = Clock::now();
    Check check;
    int successes = 0, trials = 0;
    for (int c : {2, 3, 4}) {
        ExperimentConfig cfg = base_cfg(seed + c);
        cfg.experiment = "locate-random-rlnc";
        cfg.scheme = Scheme::RlncWeak;
        cfg.profile = "weak";
        cfg.capacity = c;
        cfg.nodes = 8;
        cfg.n = 64 * c;
        cfg.sparsity = 2;
        cfg.trials = c == 2 ? 66 : 67;
        ExperimentResult res = run_experiment(cfg);
        successes += res.summary.successes;
        trials += res.summary.trials;
    }
    double rate = static_cast<double>(successes) / trials;
    check.require(rate >= 0.99, "success rate " + std::to_string(rate) + " below 0.99");
    check.detail << successes << "/" << trials << " matched the extended set";
    return finish("rlnc-random-locate", check, start, 60.0);
}

// Full topology round trip under random errors.
SuiteResult suite_topo_roundtrip(std::uint64_t seed) {
    auto start = Clock::now();
    Check check;
    ExperimentConfig cfg = base_cfg(seed);
    cfg.experiment = "topo-random-rlnc";
    cfg.scheme = Scheme::RlncWeak;
    cfg.profile = "weak";
    cfg.nodes = 10;
    cfg.capacity = 3;
    cfg.n = 96;
    cfg.sparsity = 2;
    cfg.t = 0; // sized from the dependence estimate
    cfg.trials = 50;
    ExperimentResult res = run_experiment(cfg);
    double rate = res.summary.success_rate();
    check.require(rate >= 0.95, "recovery rate " + std::to_string(rate) + " below 0.95");
    check.detail << res.summary.successes << "/" << res.summary.trials << " exact graphs";
    return finish("topo-roundtrip", check, start, 300.0);
}

// Transform-distance matching against an explicit candidate list.
SuiteResult suite_topo_candidates(std::uint64_t seed) {
    auto start = Clock::now();
    Check check;
    ExperimentConfig cfg = base_cfg(seed);
    cfg.experiment = "topo-adv-rlnc";
    cfg.scheme = Scheme::RlncStrong;
    cfg.profile = "strong";
    cfg.z = 1;
    cfg.capacity = 3;
    cfg.nodes = 6;
    cfg.n = 16;
    cfg.candidate_count = 10;
    cfg.trials = 50;
    ExperimentResult res = run_experiment(cfg);
    check.require(res.summary.successes == res.summary.trials,
                  std::to_string(res.summary.trials - res.summary.successes) +
                      " trials picked a wrong graph");
    check.detail << res.summary.successes << "/" << res.summary.trials << " correct picks";
    return finish("topo-candidates", check, start, 120.0);
}

// Different graphs under one strong codebook keep their transforms far
// apart in rank distance.
SuiteResult suite_rank_distance(std::uint64_t seed) {
    auto start = Clock::now();
    Check check;
    Field f;
    Rng rng(seed);
    int ok = 0, total = 50;
    for (int trial = 0; trial < total; ++trial) {
        Rng trng = rng.derive(trial);
        int z = 1 + static_cast<int>(trng.below(2));
        NetworkParams params;
        params.nodes = 6 + static_cast<int>(trng.below(3));
        params.capacity = 2 * z + 1 + static_cast<int>(trng.below(2));
        params.profile = ConnectivityProfile::strong(z);
        Network a = random_network(params, trng);
        Network b = random_network(params, trng);
        int guard = 0;
        while (a == b && guard++ < 20) b = random_network(params, trng);
        Codebook cb = derive_codebook(CodebookKind::Strong, trng.next(), f);
        FieldMatrix ta = transfer_matrix(a, assign_rlnc(a, cb));
        FieldMatrix tb = transfer_matrix(b, assign_rlnc(b, cb));
        if (rank(ta - tb) >= static_cast<std::size_t>(2 * z + 1)) ++ok;
    }
    check.require(ok == total, std::to_string(total - ok) + " pairs too close in rank");
    check.detail << ok << "/" << total << " pairs at distance >= 2z+1";
    return finish("rank-distance", check, start, 0);
}

// Exhaustive sparse-recovery round trip on small fields.
SuiteResult suite_rs_roundtrip(std::uint64_t) {
    auto start = Clock::now();
    Check check;
    long long cases = 0, failures = 0;
    for (std::uint32_t q : {7u, 13u}) {
        Field f(q);
        for (std::size_t l1 = 2; l1 <= 6; ++l1) {
            for (std::size_t l2 = l1 + 1; l2 <= std::min<std::size_t>(10, q - 1); ++l2) {
                std::vector<FieldElement> locators;
                for (std::size_t i = 1; i <= l2; ++i) locators.push_back(FieldElement(i, f));
                RsParitySpec spec(locators, l1);
                std::size_t zmax = l1 / 2;
                // Every support of every weight up to zmax, every value tuple.
                std::vector<std::size_t> support(zmax);
                for (std::size_t w = 0; w <= zmax; ++w) {
                    std::vector<std::size_t> idx(w);
                    for (std::size_t i = 0; i < w; ++i) idx[i] = i;
                    bool more = true;
                    while (more) {
                        std::vector<std::uint32_t> vals(w, 1);
                        bool vmore = true;
                        while (vmore) {
                            SparseVector b;
                            for (std::size_t i = 0; i < w; ++i) {
                                b.entries.emplace_back(idx[i], FieldElement(vals[i], f));
                            }
                            ++cases;
                            auto got = rs_decode(spec, rs_syndrome(spec, b), zmax);
                            if (!got || !(*got == b)) ++failures;
                            vmore = false;
                            for (std::size_t i = 0; i < w; ++i) {
                                if (++vals[i] < q) {
                                    vmore = true;
                                    break;
                                }
                                vals[i] = 1;
                            }
                        }
                        more = false;
                        for (std::size_t i = w; i-- > 0;) {
                            if (idx[i] + (w - i) < l2) {
                                ++idx[i];
                                for (std::size_t j = i + 1; j < w; ++j) idx[j] = idx[j - 1] + 1;
                                more = true;
                                break;
                            }
                        }
                    }
                }
                (void)support;
            }
        }
    }
    check.require(failures == 0, std::to_string(failures) + " round-trip failures");
    check.detail << cases << " sparse vectors round-tripped";
    return finish("rs-roundtrip", check, start, 30.0);
}

// Erasures: span identity, extended-set localization, and header-difference
// line recovery.
SuiteResult suite_erasure(std::uint64_t seed) {
    auto start = Clock::now();
    Check check;
    ExperimentConfig cfg = base_cfg(seed);
    cfg.experiment = "erasure-locate";
    cfg.scheme = Scheme::RlncWeak;
    cfg.profile = "weak";
    cfg.nodes = 8;
    cfg.capacity = 3;
    cfg.n = 48;
    cfg.z = 2;
    cfg.trials = 100;
    ExperimentResult res = run_experiment(cfg);
    double rate = res.summary.success_rate();
    check.require(rate >= 0.99, "locate rate " + std::to_string(rate) + " below 0.99");

    ExperimentConfig icfg = base_cfg(seed + 1);
    icfg.experiment = "erasure-irv";
    icfg.scheme = Scheme::RlncWeak;
    icfg.profile = "weak";
    icfg.nodes = 8;
    icfg.capacity = 3;
    icfg.n = 48;
    icfg.trials = 60;
    ExperimentResult ires = run_experiment(icfg);
    double irate = ires.summary.success_rate();
    check.require(irate >= 0.95, "line recovery rate " + std::to_string(irate) + " below 0.95");
    check.detail << res.summary.successes << "/" << res.summary.trials << " located, "
                 << ires.summary.successes << "/" << ires.summary.trials << " line recoveries";
    return finish("erasure", check, start, 0);
}

// Negative controls: no false edges from repeated-failure topology
// detection, and the confusion attack always lands between two
// indistinguishable explanations.
SuiteResult suite_negative_controls(std::uint64_t seed) {
    auto start = Clock::now();
    Check check;

    ExperimentConfig cfg = base_cfg(seed);
    cfg.experiment = "find-topo-rs";
    cfg.scheme = Scheme::Nrsc;
    cfg.profile = "weak";
    cfg.nodes = 8;
    cfg.capacity = 3;
    cfg.n = 24;
    cfg.t = 6;
    cfg.trials = 1000;
    ExperimentResult res = run_experiment(cfg);
    double false_edges = res.summary.diagnostics["false_edges"];
    double q = static_cast<double>(Field::kDefaultModulus);
    double bound = 10.0 * cfg.nodes * cfg.nodes * cfg.t * cfg.t / q * cfg.trials;
    check.require(false_edges <= std::max(0.0, std::floor(bound)),
                  std::to_string(false_edges) + " false edges (bound " +
                      std::to_string(bound) + ")");

    Field f;
    Rng rng(seed + 7);
    int constructed = 0, ambiguous = 0;
    int scan = 0;
    while (constructed < 30 && scan++ < 400) {
        Rng trng = rng.derive(scan);
        NetworkParams params;
        params.nodes = 5 + static_cast<int>(trng.below(3));
        params.capacity = 2;
        params.profile = ConnectivityProfile::degrees(1, 1);
        Network net = random_network(params, trng);
        int e1 = -1, e2 = -1;
        for (std::size_t a = 0; a < net.edge_count() && e1 < 0; ++a) {
            for (std::size_t b = a + 1; b < net.edge_count(); ++b) {
                std::vector<int> pair{static_cast<int>(a), static_cast<int>(b)};
                if (flow_rank(net, pair) == 1) {
                    e1 = static_cast<int>(a);
                    e2 = static_cast<int>(b);
                    break;
                }
            }
        }
        if (e1 < 0) continue;
        Codebook cb = derive_codebook(CodebookKind::Weak, trng.next(), f);
        CodingAssignment asg = assign_rlnc(net, cb);
        IrvTable irv = compute_irvs(net, asg);
        FieldMatrix x = make_message(net.capacity(), 24, f, trng);
        ErrorModel attack;
        try {
            attack = confusion_attack(net, asg, {e1}, {e2}, x);
        } catch (const AttackInfeasibleError&) {
            continue;
        }
        ++constructed;
        GenerationTrace trace = transmit(net, asg, x, attack, trng);
        FieldMatrix zhat = trace.Y - irv.transfer() * x;
        FieldMatrix span1 = col_space_basis(irv.irm({e1}));
        FieldMatrix span2 = col_space_basis(irv.irm({e2}));
        bool both = !zhat.is_zero();
        for (std::size_t j = 0; j < zhat.cols() && both; ++j) {
            both = col_space_contains(span1, zhat.col(j)) &&
                   col_space_contains(span2, zhat.col(j));
        }
        bool consistent = false;
        try {
            std::vector<int> out = locate_adversary_rlnc(zhat, net, irv, 1);
            consistent = out.size() == 1;
            for (int e : out) {
                consistent = consistent && col_space_contains(span1, irv.theta[e]) &&
                             col_space_contains(span2, irv.theta[e]);
            }
        } catch (const ModelViolationError&) {
            consistent = false;
        }
        if (both && consistent) ++ambiguous;
    }
    check.require(constructed >= 30, "only constructed " + std::to_string(constructed) +
                                         " confusion cases");
    check.require(ambiguous == constructed,
                  std::to_string(constructed - ambiguous) + " cases failed to confuse");
    check.detail << "0 false edges over " << cfg.trials << " trials, " << ambiguous << "/"
                 << constructed << " confusion cases ambiguous";
    return finish("negative-controls", check, start, 0);
}

} // namespace

std::vector<std::string> suite_names() {
    return {"toy-locate",   "irv-table",        "nrsc-identity",  "rs-locate",
            "rlnc-random-locate", "topo-roundtrip", "topo-candidates", "rank-distance",
            "rs-roundtrip", "erasure",          "negative-controls"};
}

SuiteResult run_suite(const std::string& name, std::uint64_t seed) {
    if (name == "toy-locate") return suite_toy_locate(seed);
    if (name == "irv-table") return suite_irv_table(seed);
    if (name == "nrsc-identity") return suite_nrsc_identity(seed);
    if (name == "rs-locate") return suite_rs_locate(seed);
    if (name == "rlnc-random-locate") return suite_rlnc_random_locate(seed);
    if (name == "topo-roundtrip") return suite_topo_roundtrip(seed);
    if (name == "topo-candidates") return suite_topo_candidates(seed);
    if (name == "rank-distance") return suite_rank_distance(seed);
    if (name == "rs-roundtrip") return suite_rs_roundtrip(seed);
    if (name == "erasure") return suite_erasure(seed);
    if (name == "negative-controls") return suite_negative_controls(seed);
    throw UsageError("unknown suite: " + name);
}

std::vector<SuiteResult> run_all(std::uint64_t seed) {
    std::vector<SuiteResult> out;
    for (const auto& name : suite_names()) out.push_back(run_suite(name, seed));
    return out;
}

} // namespace nct::suites
