#include "nct/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <thread>

#include "nct/errors.hpp"
#include "nct/rscode.hpp"

namespace nct {

namespace {

using json = nlohmann::json;

struct SchemeInstance {
    std::optional<Codebook> cb;
    std::optional<IdTable> ids;
    CodingAssignment asg;
    IrvTable irv;
    int table_parallel = 1;
};

int observed_parallel(const Network& net) {
    int p = 1;
    for (const Edge& e : net.edges()) p = std::max(p, e.parallel + 1);
    return p;
}

SchemeInstance instantiate_scheme(const Network& net, Scheme scheme, const Field& f,
                                  std::uint64_t seed, int max_parallel) {
    SchemeInstance si;
    si.table_parallel = std::max(max_parallel, observed_parallel(net));
    switch (scheme) {
    case Scheme::RlncWeak:
        si.cb = derive_codebook(CodebookKind::Weak, seed, f);
        si.asg = assign_rlnc(net, *si.cb);
        break;
    case Scheme::RlncStrong:
        si.cb = derive_codebook(CodebookKind::Strong, seed, f);
        si.asg = assign_rlnc(net, *si.cb);
        break;
    case Scheme::Nrsc:
        si.ids.emplace(net.labels(), si.table_parallel, seed, f);
        si.asg = assign_nrsc(net, *si.ids);
        break;
    }
    si.irv = compute_irvs(net, si.asg);
    return si;
}

double effective_pf(const ExperimentConfig& cfg, const Network& net) {
    if (cfg.p_f >= 0.0) return cfg.p_f;
    double edges = static_cast<double>(net.edge_count());
    return std::min(0.9, std::max(0.02, (net.capacity() - 1) / std::max(1.0, edges)));
}

// One generation the receiver can decode: redraw while the error count is
// outside the correctable regime.
GenerationTrace successful_generation(const Network& net, const CodingAssignment& asg,
                                      const FieldMatrix& x, const ErrorModel& model, Rng& rng,
                                      const std::string& scheme, int gen, std::size_t max_z) {
    for (int tries = 0; tries < 500; ++tries) {
        GenerationTrace trace = transmit(net, asg, x, model, rng, gen, scheme);
        if (trace.truth().error_edges.size() <= max_z) return trace;
    }
    throw ModelViolationError("could not draw a decodable generation; lower p_f");
}

std::vector<int> sample_distinct_edges(const Network& net, int count, Rng& rng) {
    if (count > static_cast<int>(net.edge_count())) {
        throw UsageError("more planted edges requested than edges exist");
    }
    std::vector<int> all(net.edge_count());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
    std::vector<int> out;
    for (int i = 0; i < count; ++i) {
        std::size_t j = rng.below(all.size());
        out.push_back(all[j]);
        all.erase(all.begin() + j);
    }
    std::sort(out.begin(), out.end());
    return out;
}

json edge_names_json(const Network& net, const std::vector<int>& edges) {
    json arr = json::array();
    std::vector<int> sorted = edges;
    std::sort(sorted.begin(), sorted.end());
    for (int e : sorted) arr.push_back(net.edge_name(e));
    return arr;
}

json ref_names_json(const std::vector<EdgeRef>& refs) {
    json arr = json::array();
    for (const auto& r : refs) arr.push_back(r.tail + "->" + r.head + "#" + std::to_string(r.parallel));
    return arr;
}

struct TrialEnv {
    Field field;
    Network net;
    SchemeInstance si;
    ReceiverLocality rloc;
    Rng msg_rng, chan_rng, misc_rng;
    double p_f = 0.0;
    std::uint64_t scheme_seed = 0;
};

TrialEnv make_env(const ExperimentConfig& cfg, std::uint64_t seed,
                  const std::optional<Network>& fixed_net) {
    TrialEnv env{Field(cfg.q),
                 Network::build({"s", "r"}, {{0, 1, 0}}, "s", "r", true),
                 SchemeInstance{},
                 ReceiverLocality{},
                 Rng(0),
                 Rng(0),
                 Rng(0)};
    Rng root(mix64(seed));
    Rng net_rng = root.derive(1);
    env.msg_rng = root.derive(2);
    env.chan_rng = root.derive(3);
    env.misc_rng = root.derive(4);
    env.scheme_seed = root.derive(5).next();
    if (fixed_net) {
        env.net = *fixed_net;
    } else {
        NetworkParams params;
        params.nodes = cfg.nodes;
        params.capacity = cfg.capacity;
        params.profile = cfg.connectivity();
        env.net = random_network(params, net_rng);
    }
    env.si = instantiate_scheme(env.net, cfg.scheme, env.field, env.scheme_seed,
                                cfg.max_parallel);
    env.rloc = receiver_locality(env.net, env.si.table_parallel);
    env.p_f = effective_pf(cfg, env.net);
    return env;
}

TomographyCaps caps_of(const ExperimentConfig& cfg) {
    TomographyCaps caps;
    caps.max_candidate_graphs = cfg.max_candidate_graphs;
    caps.max_support_subsets = cfg.max_support_subsets;
    return caps;
}

// ---- individual experiments ------------------------------------------------

TrialRecord trial_locate_adversary_rlnc(const ExperimentConfig& cfg, TrialEnv& env) {
    TrialRecord rec;
    const Field& f = env.field;
    int c = env.net.capacity();
    std::vector<int> planted = sample_distinct_edges(env.net, cfg.z, env.misc_rng);
    ErrorModel model = uniform_adversary(planted, cfg.n, f, env.chan_rng);
    FieldMatrix x = make_message(c, cfg.n, f, env.msg_rng);
    GenerationTrace trace = transmit(env.net, env.si.asg, x, model, env.chan_rng, 0,
                                     to_string(cfg.scheme));
    auto decoded = genie_decode(trace);
    if (!decoded) {
        rec.detail = "undecodable";
        return rec;
    }
    FieldMatrix zhat = trace.Y - env.si.irv.transfer() * *decoded;
    std::vector<int> out;
    try {
        GroundTruthSeal seal;
        out = locate_adversary_rlnc(zhat, env.net, env.si.irv, cfg.z, caps_of(cfg));
    } catch (const ModelViolationError& e) {
        rec.detail = e.what();
        rec.payload["truth"] = edge_names_json(env.net, trace.truth().error_edges);
        return rec;
    }
    std::vector<int> truth = trace.truth().error_edges;
    std::sort(truth.begin(), truth.end());
    rec.success = out == truth;
    rec.payload["truth"] = edge_names_json(env.net, truth);
    rec.payload["output"] = edge_names_json(env.net, out);
    return rec;
}

TrialRecord trial_locate_random_rlnc(const ExperimentConfig& cfg, TrialEnv& env) {
    TrialRecord rec;
    int c = env.net.capacity();
    ErrorModel model = ErrorModel::random_errors(env.p_f, cfg.sparsity);
    FieldMatrix x = make_message(c, cfg.n, env.field, env.msg_rng);
    GenerationTrace trace = successful_generation(env.net, env.si.asg, x, model, env.chan_rng,
                                                  to_string(cfg.scheme), 0, c - 1);
    auto decoded = genie_decode(trace);
    FieldMatrix zr = error_matrix(trace, *decoded);
    std::vector<int> out;
    {
        GroundTruthSeal seal;
        out = locate_random_rlnc(zr, env.net, env.si.irv);
    }
    std::vector<int> expect = extended_set(env.net, trace.truth().error_edges);
    rec.success = out == expect;
    rec.payload["truth"] = edge_names_json(env.net, trace.truth().error_edges);
    rec.payload["expected"] = edge_names_json(env.net, expect);
    rec.payload["output"] = edge_names_json(env.net, out);
    return rec;
}

TrialRecord trial_locate_adversary_rs(const ExperimentConfig& cfg, TrialEnv& env) {
    TrialRecord rec;
    const Field& f = env.field;
    int c = env.net.capacity();
    int d = 2 * cfg.z;
    std::vector<int> planted = sample_distinct_edges(env.net, cfg.z, env.misc_rng);
    ErrorModel model = uniform_adversary(planted, cfg.n, f, env.chan_rng);
    FieldMatrix x = make_message(c, cfg.n, f, env.msg_rng);
    GenerationTrace trace = transmit(env.net, env.si.asg, x, model, env.chan_rng, 0, "nrsc");
    auto decoded = genie_decode(trace);
    if (!decoded) {
        rec.detail = "undecodable";
        return rec;
    }
    std::vector<EdgeRef> out;
    try {
        GroundTruthSeal seal;
        out = locate_adversary_rs(*decoded, trace.Y, *env.si.ids, d, env.rloc);
    } catch (const ModelViolationError& e) {
        rec.detail = e.what();
        rec.payload["truth"] = edge_names_json(env.net, trace.truth().error_edges);
        return rec;
    }
    std::vector<EdgeRef> expect = edge_refs(env.net, trace.truth().error_edges);
    rec.success = out == expect;
    rec.payload["truth"] = ref_names_json(expect);
    rec.payload["output"] = ref_names_json(out);
    return rec;
}

TrialRecord trial_locate_random_rs(const ExperimentConfig& cfg, TrialEnv& env) {
    TrialRecord rec;
    int c = env.net.capacity();
    int d = cfg.connectivity().min_out_degree;
    ErrorModel model = ErrorModel::random_errors(env.p_f, cfg.sparsity);
    FieldMatrix x = make_message(c, cfg.n, env.field, env.msg_rng);
    std::size_t max_z = std::min<std::size_t>(c - 1, d > 0 ? d - 1 : 0);
    GenerationTrace trace = successful_generation(env.net, env.si.asg, x, model, env.chan_rng,
                                                  "nrsc", 0, max_z);
    auto decoded = genie_decode(trace);
    std::vector<EdgeRef> out;
    {
        GroundTruthSeal seal;
        out = locate_random_rs(*decoded, trace.Y, *env.si.ids, d, env.rloc);
    }
    std::vector<EdgeRef> expect = edge_refs(env.net, trace.truth().error_edges);
    rec.success = out == expect;
    rec.payload["truth"] = ref_names_json(expect);
    rec.payload["output"] = ref_names_json(out);
    return rec;
}

std::vector<FieldMatrix> decoded_error_matrices(const ExperimentConfig& cfg, TrialEnv& env,
                                                int generations) {
    std::vector<FieldMatrix> zrs;
    int c = env.net.capacity();
    ErrorModel model = ErrorModel::random_errors(env.p_f, cfg.sparsity);
    for (int g = 0; g < generations; ++g) {
        FieldMatrix x = make_message(c, cfg.n, env.field, env.msg_rng);
        GenerationTrace trace = successful_generation(env.net, env.si.asg, x, model,
                                                      env.chan_rng, to_string(cfg.scheme), g,
                                                      c - 1);
        auto decoded = genie_decode(trace);
        zrs.push_back(error_matrix(trace, *decoded));
    }
    return zrs;
}

int auto_generations(const ExperimentConfig& cfg, const TrialEnv& env, double dependence_est) {
    double edges = std::max<double>(3, env.net.edge_count());
    double denom = env.p_f * std::max(0.2, dependence_est);
    int t = static_cast<int>(std::ceil(4.0 * std::log(edges) / denom));
    return std::clamp(t, 24, 600);
}

TrialRecord trial_topo_random_rlnc(const ExperimentConfig& cfg, TrialEnv& env) {
    TrialRecord rec;
    int pilot = 16;
    std::vector<FieldMatrix> zrs = decoded_error_matrices(cfg, env, pilot);
    std::vector<FieldMatrix> nonzero;
    for (const auto& m : zrs) {
        if (!m.is_zero()) nonzero.push_back(m);
    }
    double est = nonzero.size() >= 2 ? estimate_dependence(nonzero) : 1.0;
    int t = cfg.t > 0 ? cfg.t : auto_generations(cfg, env, est);
    while (static_cast<int>(zrs.size()) < t) {
        auto more = decoded_error_matrices(cfg, env, 1);
        zrs.push_back(std::move(more[0]));
    }
    Network recovered = env.net; // placeholder; replaced below
    {
        GroundTruthSeal seal;
        CandidateLines cand = find_irv(zrs);
        recovered = find_topo(cand, *env.si.cb, env.net.labels(), env.rloc);
        rec.payload["candidate_lines"] = cand.size();
    }
    rec.success = recovered.strict() && recovered == env.net;
    rec.payload["generations"] = t;
    rec.payload["dependence_estimate"] = est;
    rec.payload["recovered_edges"] = recovered.edge_count();
    rec.payload["true_edges"] = env.net.edge_count();
    rec.detail = rec.success ? "" : "graph mismatch";
    return rec;
}

TrialRecord trial_topo_adv_rlnc(const ExperimentConfig& cfg, TrialEnv& env,
                                const ExperimentConfig& base_cfg) {
    TrialRecord rec;
    const Field& f = env.field;
    int c = env.net.capacity();
    // Candidate list: the true network hidden among independently drawn
    // decoys of the same shape.
    std::vector<Network> candidates;
    NetworkParams params;
    params.nodes = cfg.nodes;
    params.capacity = cfg.capacity;
    params.profile = cfg.connectivity();
    Rng decoy_rng = env.misc_rng.derive(100);
    while (static_cast<int>(candidates.size()) < cfg.candidate_count - 1) {
        Rng r = decoy_rng.derive(candidates.size());
        Network g = random_network(params, r);
        if (g == env.net) continue;
        bool dup = false;
        for (const auto& other : candidates) dup = dup || other == g;
        if (!dup) candidates.push_back(std::move(g));
    }
    std::size_t true_pos = env.misc_rng.below(candidates.size() + 1);
    candidates.insert(candidates.begin() + true_pos, env.net);

    FieldMatrix x = make_message(c, cfg.n, f, env.msg_rng);
    ErrorModel model = ErrorModel::none();
    if (cfg.z > 0) {
        std::vector<int> planted = sample_distinct_edges(env.net, cfg.z, env.misc_rng);
        if (env.misc_rng.below(2) == 0) {
            model = uniform_adversary(planted, cfg.n, f, env.chan_rng);
        } else {
            const Network& decoy = candidates[true_pos == 0 ? 1 : 0];
            CodingAssignment decoy_asg = assign_rlnc(decoy, *env.si.cb);
            FieldMatrix t_decoy = transfer_matrix(decoy, decoy_asg);
            FieldMatrix t_true = env.si.irv.transfer();
            ErrorModel first = decoy_align_attack(env.net, env.si.asg, planted[0], t_true,
                                                  t_decoy, cfg.n, env.chan_rng);
            std::map<int, FieldVector> packets = first.packets;
            for (std::size_t i = 1; i < planted.size(); ++i) {
                ErrorModel extra = uniform_adversary({planted[i]}, cfg.n, f, env.chan_rng);
                packets.insert(extra.packets.begin(), extra.packets.end());
            }
            model = ErrorModel::adversarial(std::move(packets));
        }
    }
    GenerationTrace trace = transmit(env.net, env.si.asg, x, model, env.chan_rng, 0,
                                     to_string(cfg.scheme));
    FieldMatrix t_e = trace.Y.col_slice(0, c);
    (void)base_cfg;
    try {
        GroundTruthSeal seal;
        Network got = topo_adv_rlnc(t_e, *env.si.cb, env.net.labels(), cfg.z, &candidates,
                                    cfg.connectivity(), env.rloc, caps_of(cfg));
        rec.success = got == env.net;
    } catch (const ModelViolationError& e) {
        rec.detail = e.what();
        return rec;
    }
    rec.payload["candidates"] = candidates.size();
    rec.payload["true_position"] = true_pos;
    return rec;
}

TrialRecord trial_find_topo_rs(const ExperimentConfig& cfg, TrialEnv& env) {
    TrialRecord rec;
    int t = cfg.t > 0 ? cfg.t : 24;
    std::vector<FieldMatrix> zrs;
    std::vector<std::vector<int>> failed;
    int c = env.net.capacity();
    ErrorModel model = ErrorModel::random_errors(env.p_f, cfg.sparsity);
    for (int g = 0; g < t; ++g) {
        FieldMatrix x = make_message(c, cfg.n, env.field, env.msg_rng);
        GenerationTrace trace = successful_generation(env.net, env.si.asg, x, model,
                                                      env.chan_rng, "nrsc", g, c - 1);
        auto decoded = genie_decode(trace);
        zrs.push_back(error_matrix(trace, *decoded));
        failed.push_back(trace.truth().error_edges);
    }
    std::size_t skipped = 0;
    std::vector<EdgeRef> out;
    {
        GroundTruthSeal seal;
        out = find_topo_rs(zrs, *env.si.ids, env.rloc, &skipped);
    }
    std::set<EdgeRef> true_edges;
    for (std::size_t e = 0; e < env.net.edge_count(); ++e) {
        auto refs = edge_refs(env.net, {static_cast<int>(e)});
        true_edges.insert(refs[0]);
    }
    int false_edges = 0;
    for (const auto& r : out) {
        if (!true_edges.count(r)) ++false_edges;
    }
    // Edges failing in two generations with flow-independent co-failures are
    // the ones the scheme promises to expose.
    std::set<int> eligible;
    for (std::size_t i = 0; i < failed.size(); ++i) {
        for (std::size_t j = i + 1; j < failed.size(); ++j) {
            for (int e : failed[i]) {
                if (std::find(failed[j].begin(), failed[j].end(), e) == failed[j].end()) continue;
                std::vector<int> rest_i, rest_j;
                for (int a : failed[i]) {
                    if (a != e) rest_i.push_back(a);
                }
                for (int a : failed[j]) {
                    if (a != e) rest_j.push_back(a);
                }
                if (flow_independent(env.net, {{e}, rest_i, rest_j})) eligible.insert(e);
            }
        }
    }
    std::set<EdgeRef> out_set(out.begin(), out.end());
    int recovered = 0;
    for (int e : eligible) {
        if (out_set.count(edge_refs(env.net, {e})[0])) ++recovered;
    }
    rec.success = false_edges == 0;
    rec.payload["false_edges"] = false_edges;
    rec.payload["eligible"] = eligible.size();
    rec.payload["recovered_eligible"] = recovered;
    rec.payload["skipped_zero_ratio"] = skipped;
    rec.payload["output"] = ref_names_json(out);
    return rec;
}

std::vector<int> sample_erasure_set(const Network& net, int count, Rng& rng, bool source_flow) {
    for (int tries = 0; tries < 400; ++tries) {
        std::vector<int> set = sample_distinct_edges(net, count, rng);
        if (!source_flow) return set;
        if (source_flow_rank(net, set) == static_cast<int>(set.size())) return set;
    }
    throw ModelViolationError("no erasure set satisfies the source max-flow condition");
}

TrialRecord trial_erasure_locate(const ExperimentConfig& cfg, TrialEnv& env) {
    TrialRecord rec;
    int c = env.net.capacity();
    int zmax = std::min<int>(cfg.z > 0 ? cfg.z : c - 1, c - 1);
    int count = 1 + static_cast<int>(env.misc_rng.below(std::max(1, zmax)));
    std::vector<int> erased = sample_erasure_set(env.net, count, env.misc_rng, true);
    ErrorModel model = ErrorModel::erasure_adversarial(erased);
    FieldMatrix x = make_message(c, cfg.n, env.field, env.msg_rng);
    GenerationTrace trace = transmit(env.net, env.si.asg, x, model, env.chan_rng, 0,
                                     to_string(cfg.scheme));
    auto decoded = genie_decode(trace);
    if (!decoded) {
        rec.detail = "undecodable";
        return rec;
    }
    std::vector<int> out;
    {
        GroundTruthSeal seal;
        out = locate_erasures(trace.Y, *decoded, env.net, env.si.irv);
    }
    const std::vector<int>& actual = trace.truth().error_edges;
    FieldMatrix zhat = trace.Y - env.si.irv.transfer() * x;
    FieldMatrix theta = env.si.irv.irm(actual);
    bool span_equal = rank(zhat) == rank(theta) && rank(zhat.hstack(theta)) == rank(theta);
    std::vector<int> expect = extended_set(env.net, actual);
    rec.success = span_equal && out == expect;
    rec.payload["truth"] = edge_names_json(env.net, actual);
    rec.payload["expected"] = edge_names_json(env.net, expect);
    rec.payload["output"] = edge_names_json(env.net, out);
    rec.payload["span_equal"] = span_equal;
    return rec;
}

TrialRecord trial_erasure_irv(const ExperimentConfig& cfg, TrialEnv& env) {
    TrialRecord rec;
    int c = env.net.capacity();
    // Two flow-independent single-edge erasures plus a clean generation.
    std::vector<int> pair;
    for (int tries = 0; tries < 400 && pair.empty(); ++tries) {
        std::vector<int> p = sample_distinct_edges(env.net, 2, env.misc_rng);
        if (flow_independent(env.net, {{p[0]}, {p[1]}}) &&
            source_flow_rank(env.net, p) == 2) {
            pair = p;
        }
    }
    if (pair.empty()) {
        rec.detail = "no flow-independent pair found";
        return rec;
    }
    std::vector<FieldMatrix> received;
    for (int g = 0; g < 3; ++g) {
        ErrorModel model = g == 0   ? ErrorModel::erasure_adversarial({pair[0]})
                           : g == 1 ? ErrorModel::erasure_adversarial({pair[1]})
                                    : ErrorModel::none();
        FieldMatrix x = make_message(c, cfg.n, env.field, env.msg_rng);
        received.push_back(
            transmit(env.net, env.si.asg, x, model, env.chan_rng, g, to_string(cfg.scheme)).Y);
    }
    CandidateLines cand;
    {
        GroundTruthSeal seal;
        cand = find_irv_erasure(received);
    }
    bool a = !env.si.irv.theta[pair[0]].is_zero() &&
             cand.contains(canonical_line(env.si.irv.theta[pair[0]]));
    bool b = !env.si.irv.theta[pair[1]].is_zero() &&
             cand.contains(canonical_line(env.si.irv.theta[pair[1]]));
    rec.success = a && b;
    rec.payload["lines"] = cand.size();
    rec.payload["first_found"] = a;
    rec.payload["second_found"] = b;
    return rec;
}

TrialRecord trial_delay_locate(const ExperimentConfig& cfg, TrialEnv& env) {
    TrialRecord rec;
    int c = env.net.capacity();
    int count = std::min<int>(cfg.z > 0 ? cfg.z : 1, c - 1);
    if (count < 1) count = 1;
    std::vector<int> delayed = sample_erasure_set(env.net, count, env.misc_rng, true);
    FieldMatrix x_prev = make_message(c, cfg.n, env.field, env.msg_rng);
    FieldMatrix x = make_message(c, cfg.n, env.field, env.msg_rng);
    ErrorModel model = ErrorModel::delay(delayed, x_prev);
    GenerationTrace trace = transmit(env.net, env.si.asg, x, model, env.chan_rng, 1,
                                     to_string(cfg.scheme));
    auto decoded = genie_decode(trace);
    if (!decoded) {
        rec.detail = "undecodable";
        return rec;
    }
    FieldMatrix delayed_mat = trace.Y - env.si.irv.transfer() * *decoded;
    std::vector<int> out;
    {
        GroundTruthSeal seal;
        out = locate_delays(delayed_mat, env.net, env.si.irv);
    }
    std::vector<int> expect = extended_set(env.net, trace.truth().error_edges);
    rec.success = out == expect;
    rec.payload["truth"] = edge_names_json(env.net, trace.truth().error_edges);
    rec.payload["expected"] = edge_names_json(env.net, expect);
    rec.payload["output"] = edge_names_json(env.net, out);
    return rec;
}

TrialRecord run_trial(const ExperimentConfig& cfg, int index,
                      const std::optional<Network>& fixed_net) {
    std::uint64_t seed = trial_seed(cfg.seed, index);
    auto start = std::chrono::steady_clock::now();
    TrialEnv env = make_env(cfg, seed, fixed_net);
    TrialRecord rec;
    switch (cfg.kind()) {
    case ExperimentKind::LocateAdversaryRlnc:
        rec = trial_locate_adversary_rlnc(cfg, env);
        break;
    case ExperimentKind::LocateRandomRlnc:
        rec = trial_locate_random_rlnc(cfg, env);
        break;
    case ExperimentKind::LocateAdversaryRs:
        rec = trial_locate_adversary_rs(cfg, env);
        break;
    case ExperimentKind::LocateRandomRs:
        rec = trial_locate_random_rs(cfg, env);
        break;
    case ExperimentKind::TopoRandomRlnc:
        rec = trial_topo_random_rlnc(cfg, env);
        break;
    case ExperimentKind::TopoAdvRlnc:
        rec = trial_topo_adv_rlnc(cfg, env, cfg);
        break;
    case ExperimentKind::FindTopoRs:
        rec = trial_find_topo_rs(cfg, env);
        break;
    case ExperimentKind::ErasureLocate:
        rec = trial_erasure_locate(cfg, env);
        break;
    case ExperimentKind::ErasureIrv:
        rec = trial_erasure_irv(cfg, env);
        break;
    case ExperimentKind::DelayLocate:
        rec = trial_delay_locate(cfg, env);
        break;
    }
    auto stop = std::chrono::steady_clock::now();
    rec.index = index;
    rec.seed = seed;
    rec.millis = std::chrono::duration<double, std::milli>(stop - start).count();
    rec.payload["trial"] = index;
    rec.payload["seed"] = seed;
    rec.payload["success"] = rec.success;
    if (!rec.detail.empty()) rec.payload["detail"] = rec.detail;
    return rec;
}

} // namespace

std::string to_string(Scheme s) {
    switch (s) {
    case Scheme::RlncWeak:
        return "rlnc-weak";
    case Scheme::RlncStrong:
        return "rlnc-strong";
    case Scheme::Nrsc:
        return "nrsc";
    }
    return "rlnc-weak";
}

Scheme scheme_from_string(const std::string& s) {
    if (s == "rlnc-weak") return Scheme::RlncWeak;
    if (s == "rlnc-strong") return Scheme::RlncStrong;
    if (s == "nrsc") return Scheme::Nrsc;
    throw UsageError("unknown scheme: " + s);
}

std::string to_string(ExperimentKind k) {
    switch (k) {
    case ExperimentKind::LocateAdversaryRlnc:
        return "locate-adversary-rlnc";
    case ExperimentKind::LocateRandomRlnc:
        return "locate-random-rlnc";
    case ExperimentKind::LocateAdversaryRs:
        return "locate-adversary-rs";
    case ExperimentKind::LocateRandomRs:
        return "locate-random-rs";
    case ExperimentKind::TopoRandomRlnc:
        return "topo-random-rlnc";
    case ExperimentKind::TopoAdvRlnc:
        return "topo-adv-rlnc";
    case ExperimentKind::FindTopoRs:
        return "find-topo-rs";
    case ExperimentKind::ErasureLocate:
        return "erasure-locate";
    case ExperimentKind::ErasureIrv:
        return "erasure-irv";
    case ExperimentKind::DelayLocate:
        return "delay-locate";
    }
    return "locate-random-rlnc";
}

ExperimentKind experiment_from_string(const std::string& s) {
    for (int k = 0; k <= static_cast<int>(ExperimentKind::DelayLocate); ++k) {
        if (to_string(static_cast<ExperimentKind>(k)) == s) {
            return static_cast<ExperimentKind>(k);
        }
    }
    throw UsageError("unknown experiment: " + s);
}

ConnectivityProfile ExperimentConfig::connectivity() const {
    if (profile == "weak") return ConnectivityProfile::weak();
    if (profile == "strong") return ConnectivityProfile::strong(z);
    if (profile == "locate-adv") return ConnectivityProfile::locate_adv(std::max(1, z));
    if (profile == "degrees") {
        return ConnectivityProfile::degrees(std::max(1, min_out_degree),
                                            std::max(1, min_in_degree));
    }
    throw UsageError("unknown profile: " + profile);
}

void ExperimentConfig::validate() const {
    Field field_check(q);
    if (nodes < 2) throw UsageError("config: nodes must be >= 2");
    if (capacity < 1) throw UsageError("config: capacity must be >= 1");
    if (n <= capacity) throw UsageError("config: block length n must exceed capacity");
    if (trials < 0) throw UsageError("config: trials must be >= 0");
    if (t < 0) throw UsageError("config: t must be >= 0");
    if (sparsity < 1) throw UsageError("config: sparsity must be >= 1");
    if (p_f > 1.0) throw UsageError("config: p_f must be <= 1");
    if (threads < 1) throw UsageError("config: threads must be >= 1");
    if (max_parallel < 1) throw UsageError("config: max_parallel must be >= 1");
    connectivity(); // validates the profile string
    ExperimentKind k = kind();
    auto need_scheme = [&](std::initializer_list<Scheme> allowed, const char* why) {
        for (Scheme s : allowed) {
            if (scheme == s) return;
        }
        throw UsageError(std::string("config: experiment ") + experiment + " requires " + why);
    };
    switch (k) {
    case ExperimentKind::LocateAdversaryRlnc:
        need_scheme({Scheme::RlncWeak, Scheme::RlncStrong}, "an rlnc scheme");
        if (z < 1) throw UsageError("config: adversarial localization needs z >= 1");
        if (2 * z + 1 > capacity) throw UsageError("config: need 2z+1 <= capacity");
        if (connectivity().min_out_degree < 2 * z) {
            throw UsageError("config: profile must give out-degree >= 2z");
        }
        break;
    case ExperimentKind::LocateRandomRlnc:
        need_scheme({Scheme::RlncWeak, Scheme::RlncStrong}, "an rlnc scheme");
        break;
    case ExperimentKind::LocateAdversaryRs:
        need_scheme({Scheme::Nrsc}, "the nrsc scheme");
        if (z < 1) throw UsageError("config: adversarial localization needs z >= 1");
        if (2 * z + 1 > capacity) throw UsageError("config: need 2z+1 <= capacity");
        if (connectivity().min_out_degree < 2 * z) {
            throw UsageError("config: profile must give out-degree >= 2z");
        }
        break;
    case ExperimentKind::LocateRandomRs:
        need_scheme({Scheme::Nrsc}, "the nrsc scheme");
        if (connectivity().min_out_degree < 2) {
            throw UsageError("config: profile must give out-degree >= 2");
        }
        break;
    case ExperimentKind::TopoRandomRlnc:
        need_scheme({Scheme::RlncWeak}, "the rlnc-weak scheme");
        if (connectivity().min_out_degree < 2) {
            throw UsageError("config: profile must give out-degree >= 2");
        }
        break;
    case ExperimentKind::TopoAdvRlnc:
        need_scheme({Scheme::RlncStrong}, "the rlnc-strong scheme");
        if (z < 0) throw UsageError("config: z must be >= 0");
        if (2 * z + 1 > capacity) throw UsageError("config: need 2z+1 <= capacity");
        if (candidate_count < 1) throw UsageError("config: candidate_count must be >= 1");
        break;
    case ExperimentKind::FindTopoRs:
        need_scheme({Scheme::Nrsc}, "the nrsc scheme");
        if (connectivity().min_out_degree < 2) {
            throw UsageError("config: profile must give out-degree >= 2");
        }
        break;
    case ExperimentKind::ErasureLocate:
    case ExperimentKind::ErasureIrv:
        need_scheme({Scheme::RlncWeak, Scheme::RlncStrong}, "an rlnc scheme");
        break;
    case ExperimentKind::DelayLocate:
        need_scheme({Scheme::RlncWeak, Scheme::RlncStrong}, "an rlnc scheme");
        if (z > capacity - 1) throw UsageError("config: delayed edge count must be < capacity");
        break;
    }
}

ExperimentConfig parse_config(std::istream& in) {
    ExperimentConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        std::istringstream ls(line);
        std::string key, eq, value;
        if (!(ls >> key)) continue;
        if (!(ls >> eq) || eq != "=" || !(ls >> value)) {
            throw UsageError("config line " + std::to_string(lineno) + ": expected 'key = value'");
        }
        try {
            if (key == "q") cfg.q = static_cast<std::uint32_t>(std::stoul(value));
            else if (key == "nodes") cfg.nodes = std::stoi(value);
            else if (key == "capacity") cfg.capacity = std::stoi(value);
            else if (key == "profile") cfg.profile = value;
            else if (key == "min_out_degree") cfg.min_out_degree = std::stoi(value);
            else if (key == "min_in_degree") cfg.min_in_degree = std::stoi(value);
            else if (key == "scheme") cfg.scheme = scheme_from_string(value);
            else if (key == "error") cfg.error = value;
            else if (key == "p_f") cfg.p_f = std::stod(value);
            else if (key == "z") cfg.z = std::stoi(value);
            else if (key == "sparsity") cfg.sparsity = std::stoi(value);
            else if (key == "n") cfg.n = std::stoi(value);
            else if (key == "t") cfg.t = std::stoi(value);
            else if (key == "trials") cfg.trials = std::stoi(value);
            else if (key == "seed") cfg.seed = std::stoull(value);
            else if (key == "threads") cfg.threads = std::stoi(value);
            else if (key == "max_candidate_graphs") cfg.max_candidate_graphs = std::stoull(value);
            else if (key == "max_support_subsets") cfg.max_support_subsets = std::stoull(value);
            else if (key == "max_parallel") cfg.max_parallel = std::stoi(value);
            else if (key == "candidate_count") cfg.candidate_count = std::stoi(value);
            else if (key == "experiment") cfg.experiment = value;
            else if (key == "network_file") cfg.network_file = value;
            else if (key == "audit_ground_truth") cfg.audit_ground_truth = value == "true" || value == "1";
            else if (key == "expose_topology") cfg.expose_topology = value == "true" || value == "1";
            else throw UsageError("config: unknown key '" + key + "'");
        } catch (const std::invalid_argument&) {
            throw UsageError("config line " + std::to_string(lineno) + ": bad value for " + key);
        } catch (const std::out_of_range&) {
            throw UsageError("config line " + std::to_string(lineno) + ": value out of range");
        }
    }
    return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open config file: " + path);
    return parse_config(in);
}

std::uint64_t trial_seed(std::uint64_t master_seed, int trial_index) {
    return mix64(hash_combine(mix64(master_seed), static_cast<std::uint64_t>(trial_index)));
}

ReceiverLocality receiver_locality(const Network& net, int max_parallel) {
    ReceiverLocality rloc;
    rloc.source = net.label(net.source());
    rloc.receiver = net.label(net.receiver());
    for (int ei : net.in_edges(net.receiver())) {
        const Edge& e = net.edge(ei);
        rloc.in_edges.emplace_back(net.label(e.tail), e.parallel);
    }
    rloc.max_parallel = std::max(max_parallel, observed_parallel(net));
    return rloc;
}

std::vector<EdgeRef> edge_refs(const Network& net, const std::vector<int>& edges) {
    std::vector<EdgeRef> out;
    out.reserve(edges.size());
    for (int e : edges) {
        const Edge& edge = net.edge(e);
        out.push_back({net.label(edge.tail), net.label(edge.head), edge.parallel});
    }
    std::sort(out.begin(), out.end());
    return out;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    std::optional<Network> fixed;
    if (!cfg.network_file.empty()) fixed = read_network_file(cfg.network_file);

    ExperimentResult result;
    result.records.resize(cfg.trials);
    if (cfg.threads <= 1 || cfg.trials <= 1) {
        for (int i = 0; i < cfg.trials; ++i) result.records[i] = run_trial(cfg, i, fixed);
    } else {
        std::atomic<int> next{0};
        auto worker = [&]() {
            while (true) {
                int i = next.fetch_add(1);
                if (i >= cfg.trials) return;
                result.records[i] = run_trial(cfg, i, fixed);
            }
        };
        std::vector<std::thread> pool;
        for (int w = 0; w < cfg.threads; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    result.summary.trials = cfg.trials;
    for (const auto& rec : result.records) {
        result.summary.successes += rec.success ? 1 : 0;
        result.summary.total_millis += rec.millis;
        if (rec.payload.contains("dependence_estimate")) {
            result.summary.diagnostics["dependence_estimate_sum"] +=
                rec.payload["dependence_estimate"].get<double>();
        }
        if (rec.payload.contains("false_edges")) {
            result.summary.diagnostics["false_edges"] +=
                rec.payload["false_edges"].get<double>();
        }
    }
    return result;
}

void write_records(std::ostream& out, const ExperimentResult& result, const std::string& format,
                   bool include_timings) {
    if (format == "json-lines") {
        for (const auto& rec : result.records) {
            json j = rec.payload;
            if (include_timings) j["millis"] = rec.millis;
            out << j.dump() << "\n";
        }
        json s;
        s["summary"] = {{"trials", result.summary.trials},
                        {"successes", result.summary.successes},
                        {"rate", result.summary.success_rate()}};
        if (include_timings) s["summary"]["millis"] = result.summary.total_millis;
        out << s.dump() << "\n";
        return;
    }
    if (format != "text") throw UsageError("unknown record format: " + format);
    for (const auto& rec : result.records) {
        out << "trial " << rec.index << " seed " << rec.seed << " success "
            << (rec.success ? 1 : 0);
        if (!rec.detail.empty()) out << " detail \"" << rec.detail << "\"";
        if (include_timings) out << " millis " << rec.millis;
        out << "\n";
    }
    out << "summary trials " << result.summary.trials << " successes "
        << result.summary.successes << " rate " << result.summary.success_rate() << "\n";
}

namespace {

ErrorModel::Kind error_kind_from_string(const std::string& s) {
    if (s == "none") return ErrorModel::Kind::None;
    if (s == "random") return ErrorModel::Kind::Random;
    if (s == "adversarial") return ErrorModel::Kind::Adversarial;
    if (s == "erasure-random") return ErrorModel::Kind::ErasureRandom;
    if (s == "erasure-adversarial") return ErrorModel::Kind::ErasureAdversarial;
    if (s == "delay") return ErrorModel::Kind::Delay;
    throw UsageError("unknown error kind: " + s);
}

void write_matrix_rows(std::ostream& out, const FieldMatrix& m) {
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            out << (j ? " " : "") << m.at(i, j).value();
        }
        out << "\n";
    }
}

FieldMatrix read_matrix_rows(std::istream& in, std::size_t rows, std::size_t cols,
                             const Field& f) {
    FieldMatrix m(rows, cols, f);
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) {
            std::uint64_t v;
            if (!(in >> v)) throw UsageError("trace bundle: truncated matrix");
            m.set(i, j, FieldElement(v, f));
        }
    }
    std::string rest;
    std::getline(in, rest);
    return m;
}

} // namespace

TraceBundle simulate_bundle(const ExperimentConfig& cfg) {
    cfg.validate();
    std::optional<Network> fixed;
    if (!cfg.network_file.empty()) fixed = read_network_file(cfg.network_file);
    TrialEnv env = make_env(cfg, trial_seed(cfg.seed, 0), fixed);
    const Field& f = env.field;
    int c = env.net.capacity();
    int t = cfg.t > 0 ? cfg.t : 4;

    TraceBundle bundle;
    bundle.q = cfg.q;
    bundle.capacity = c;
    bundle.n = cfg.n;
    bundle.scheme = cfg.scheme;
    bundle.error_kind = cfg.error;
    bundle.z = cfg.z;
    bundle.rs_depth = cfg.scheme == Scheme::Nrsc
                          ? (cfg.error == "adversarial" ? 2 * cfg.z
                                                        : cfg.connectivity().min_out_degree)
                          : 0;
    bundle.codebook_seed = env.scheme_seed;
    bundle.id_seed = env.scheme_seed;
    bundle.id_max_parallel = env.si.table_parallel;
    bundle.node_labels = env.net.labels();
    bundle.rloc = env.rloc;
    if (cfg.expose_topology) bundle.known_network = env.net;
    bundle.has_ground_truth = true;
    bundle.truth_network = env.net;

    std::vector<int> planted;
    if (cfg.error == "adversarial") {
        planted = sample_distinct_edges(env.net, cfg.z, env.misc_rng);
    } else if (cfg.error == "erasure-adversarial" || cfg.error == "delay") {
        planted = sample_erasure_set(env.net, std::max(1, std::min(cfg.z, c - 1)),
                                     env.misc_rng, true);
    }
    FieldMatrix x_prev = make_message(c, cfg.n, f, env.msg_rng);
    for (int g = 0; g < t; ++g) {
        FieldMatrix x = make_message(c, cfg.n, f, env.msg_rng);
        ErrorModel model = ErrorModel::none();
        if (cfg.error == "random") {
            model = ErrorModel::random_errors(env.p_f, cfg.sparsity);
        } else if (cfg.error == "adversarial") {
            model = uniform_adversary(planted, cfg.n, f, env.chan_rng);
        } else if (cfg.error == "erasure-random") {
            model = ErrorModel::erasure_random(env.p_f);
        } else if (cfg.error == "erasure-adversarial") {
            model = ErrorModel::erasure_adversarial(planted);
        } else if (cfg.error == "delay") {
            model = ErrorModel::delay(planted, x_prev);
        } else if (cfg.error != "none") {
            throw UsageError("unknown error kind: " + cfg.error);
        }
        std::size_t max_z = cfg.error == "adversarial" ? env.net.edge_count() : c - 1;
        bundle.traces.push_back(successful_generation(env.net, env.si.asg, x, model,
                                                      env.chan_rng, to_string(cfg.scheme), g,
                                                      max_z));
        x_prev = x;
    }
    return bundle;
}

void write_bundle(std::ostream& out, const TraceBundle& bundle, bool include_ground_truth) {
    out << "bundle q " << bundle.q << " capacity " << bundle.capacity << " n " << bundle.n
        << " t " << bundle.traces.size() << " scheme " << to_string(bundle.scheme) << " error "
        << bundle.error_kind << " z " << bundle.z << " depth " << bundle.rs_depth << "\n";
    out << "codebook-seed " << bundle.codebook_seed << "\n";
    out << "id-seed " << bundle.id_seed << " max-parallel " << bundle.id_max_parallel << "\n";
    for (const auto& l : bundle.node_labels) out << "label " << l << "\n";
    out << "source " << bundle.rloc.source << "\n";
    out << "receiver " << bundle.rloc.receiver << "\n";
    for (const auto& [tail, par] : bundle.rloc.in_edges) {
        out << "rport " << tail << " " << par << "\n";
    }
    if (bundle.known_network) {
        out << "known-network-begin\n";
        write_network(out, *bundle.known_network);
        out << "known-network-end\n";
    }
    for (const auto& trace : bundle.traces) {
        out << "generation " << trace.generation << "\n";
        out << "Y\n";
        write_matrix_rows(out, trace.Y);
        if (include_ground_truth && bundle.has_ground_truth) {
            const GroundTruth& gt = trace.truth();
            out << "truth-begin\n";
            out << "X\n";
            write_matrix_rows(out, gt.X);
            for (const auto& [e, z] : gt.injected) {
                out << "injected";
                if (bundle.truth_network) {
                    out << " " << bundle.truth_network->edge_name(e);
                } else {
                    out << " edge" << e;
                }
                out << " " << e;
                for (std::size_t j = 0; j < z.size(); ++j) out << " " << z[j].value();
                out << "\n";
            }
            out << "truth-end\n";
        }
        out << "generation-end\n";
    }
    if (include_ground_truth && bundle.truth_network) {
        out << "truth-network-begin\n";
        write_network(out, *bundle.truth_network);
        out << "truth-network-end\n";
    }
    out << "end\n";
}

TraceBundle read_bundle(std::istream& in) {
    TraceBundle bundle;
    std::string line;
    if (!std::getline(in, line)) throw UsageError("trace bundle: empty input");
    {
        std::istringstream hs(line);
        std::string kw, key, scheme;
        hs >> kw;
        if (kw != "bundle") throw UsageError("trace bundle: missing header");
        std::size_t t = 0;
        while (hs >> key) {
            if (key == "q") hs >> bundle.q;
            else if (key == "capacity") hs >> bundle.capacity;
            else if (key == "n") hs >> bundle.n;
            else if (key == "t") hs >> t;
            else if (key == "scheme") { hs >> scheme; bundle.scheme = scheme_from_string(scheme); }
            else if (key == "error") hs >> bundle.error_kind;
            else if (key == "z") hs >> bundle.z;
            else if (key == "depth") hs >> bundle.rs_depth;
        }
    }
    Field f(bundle.q);
    ErrorModel::Kind kind = error_kind_from_string(bundle.error_kind);
    std::string net_text;
    bool in_known = false, in_truth_net = false;
    std::string truth_net_text;
    int cur_gen = -1;
    std::optional<FieldMatrix> cur_y;
    GroundTruth cur_truth;
    bool cur_has_truth = false;

    while (std::getline(in, line)) {
        if (line == "end") break;
        if (line == "known-network-begin") { in_known = true; net_text.clear(); continue; }
        if (line == "known-network-end") {
            in_known = false;
            std::istringstream ns(net_text);
            bundle.known_network = read_network(ns);
            continue;
        }
        if (line == "truth-network-begin") { in_truth_net = true; truth_net_text.clear(); continue; }
        if (line == "truth-network-end") {
            in_truth_net = false;
            std::istringstream ns(truth_net_text);
            bundle.truth_network = read_network(ns);
            continue;
        }
        if (in_known) { net_text += line + "\n"; continue; }
        if (in_truth_net) { truth_net_text += line + "\n"; continue; }

        std::istringstream ls(line);
        std::string kw;
        if (!(ls >> kw)) continue;
        if (kw == "codebook-seed") ls >> bundle.codebook_seed;
        else if (kw == "id-seed") {
            std::string mp;
            ls >> bundle.id_seed >> mp >> bundle.id_max_parallel;
        } else if (kw == "label") {
            std::string l;
            ls >> l;
            bundle.node_labels.push_back(l);
        } else if (kw == "source") ls >> bundle.rloc.source;
        else if (kw == "receiver") ls >> bundle.rloc.receiver;
        else if (kw == "rport") {
            std::string tail;
            int par;
            ls >> tail >> par;
            bundle.rloc.in_edges.emplace_back(tail, par);
        } else if (kw == "generation") {
            ls >> cur_gen;
            cur_truth = GroundTruth{};
            cur_has_truth = false;
            cur_y.reset();
        } else if (kw == "Y") {
            cur_y = read_matrix_rows(in, bundle.capacity, bundle.n, f);
        } else if (kw == "truth-begin") {
            cur_has_truth = true;
        } else if (kw == "X") {
            cur_truth.X = read_matrix_rows(in, bundle.capacity, bundle.n, f);
        } else if (kw == "injected") {
            std::string name;
            int e;
            ls >> name >> e;
            FieldVector z(bundle.n, f);
            for (int j = 0; j < bundle.n; ++j) {
                std::uint64_t v;
                ls >> v;
                z.set(j, FieldElement(v, f));
            }
            cur_truth.error_edges.push_back(e);
            cur_truth.injected.emplace(e, z);
        } else if (kw == "truth-end") {
        } else if (kw == "generation-end") {
            if (!cur_y) throw UsageError("trace bundle: generation without Y");
            bundle.has_ground_truth = bundle.has_ground_truth || cur_has_truth;
            bundle.traces.emplace_back(*cur_y, cur_truth, kind,
                                       to_string(bundle.scheme), cur_gen);
        }
    }
    bundle.rloc.max_parallel = std::max(bundle.rloc.max_parallel, bundle.id_max_parallel);
    return bundle;
}

TomographyReport run_on_bundle(const TraceBundle& bundle, const std::string& algorithm,
                               const TomographyCaps& caps,
                               const std::vector<Network>* candidates) {
    TomographyReport report;
    report.algorithm = algorithm;
    Field f(bundle.q);
    if (bundle.traces.empty()) throw UsageError("trace bundle has no generations");

    auto need_truth = [&]() {
        if (!bundle.has_ground_truth) {
            throw UsageError("bundle lacks ground truth; the decoding-layer stand-in "
                             "cannot recover the message");
        }
    };
    auto decode = [&](const GenerationTrace& trace) {
        need_truth();
        auto x = genie_decode(trace);
        if (!x) throw ModelViolationError("generation beyond the correctable regime");
        return *x;
    };
    auto rlnc_view = [&]() {
        if (!bundle.known_network) {
            throw UsageError("algorithm needs the receiver-side topology; bundle has none");
        }
        CodebookKind kind = bundle.scheme == Scheme::RlncStrong ? CodebookKind::Strong
                                                                : CodebookKind::Weak;
        Codebook cb = derive_codebook(kind, bundle.codebook_seed, f);
        CodingAssignment asg = assign_rlnc(*bundle.known_network, cb);
        return std::make_pair(asg, compute_irvs(*bundle.known_network, asg));
    };
    auto truth_edges = [&](const GenerationTrace& trace) {
        std::vector<int> e = trace.truth().error_edges;
        std::sort(e.begin(), e.end());
        return e;
    };
    auto set_edges = [&](const Network& net, const std::vector<int>& edges) {
        for (int e : edges) report.recovered_edges.push_back(net.edge_name(e));
    };

    if (algorithm == "adversary-rlnc" || algorithm == "random-rlnc" ||
        algorithm == "erasures" || algorithm == "delays") {
        auto [asg, irv] = rlnc_view();
        const Network& net = *bundle.known_network;
        const GenerationTrace& trace = bundle.traces.front();
        FieldMatrix x = decode(trace);
        std::vector<int> out;
        {
            GroundTruthSeal seal;
            if (algorithm == "adversary-rlnc") {
                FieldMatrix zhat = trace.Y - irv.transfer() * x;
                out = locate_adversary_rlnc(zhat, net, irv, bundle.z, caps);
            } else if (algorithm == "random-rlnc") {
                out = locate_random_rlnc(error_matrix(trace, x), net, irv);
            } else if (algorithm == "erasures") {
                out = locate_erasures(trace.Y, x, net, irv);
            } else {
                FieldMatrix residue = trace.Y - irv.transfer() * x;
                out = locate_delays(residue, net, irv);
            }
        }
        report.kind = "edge-set";
        set_edges(net, out);
        if (bundle.has_ground_truth) {
            std::vector<int> truth = truth_edges(trace);
            std::vector<int> expect = algorithm == "adversary-rlnc"
                                          ? truth
                                          : extended_set(net, truth);
            report.success = out == expect;
            report.diagnostics["truth_edges"] = static_cast<double>(truth.size());
        }
        return report;
    }

    if (algorithm == "adversary-rs" || algorithm == "random-rs") {
        if (bundle.scheme != Scheme::Nrsc) throw UsageError("algorithm requires an nrsc bundle");
        IdTable ids(bundle.node_labels, bundle.id_max_parallel, bundle.id_seed, f);
        const GenerationTrace& trace = bundle.traces.front();
        FieldMatrix x = decode(trace);
        std::vector<EdgeRef> out;
        {
            GroundTruthSeal seal;
            out = algorithm == "adversary-rs"
                      ? locate_adversary_rs(x, trace.Y, ids, bundle.rs_depth, bundle.rloc)
                      : locate_random_rs(x, trace.Y, ids, bundle.rs_depth, bundle.rloc);
        }
        report.kind = "edge-set";
        for (const auto& r : out) {
            report.recovered_edges.push_back(r.tail + "->" + r.head + "#" +
                                             std::to_string(r.parallel));
        }
        if (bundle.has_ground_truth && bundle.truth_network) {
            auto expect = edge_refs(*bundle.truth_network, truth_edges(trace));
            report.success = out == expect;
        }
        return report;
    }

    if (algorithm == "irv" || algorithm == "irv-erasure" || algorithm == "rand-rlnc" ||
        algorithm == "rs") {
        std::vector<FieldMatrix> zrs;
        std::vector<FieldMatrix> ys;
        for (const auto& trace : bundle.traces) {
            ys.push_back(trace.Y);
            if (algorithm != "irv-erasure") zrs.push_back(error_matrix(trace, decode(trace)));
        }
        if (algorithm == "irv" || algorithm == "irv-erasure") {
            CandidateLines cand;
            double dep = 0.0;
            {
                GroundTruthSeal seal;
                cand = algorithm == "irv" ? find_irv(zrs) : find_irv_erasure(ys);
                std::vector<FieldMatrix> nonzero;
                const auto& mats = algorithm == "irv" ? zrs : ys;
                (void)mats;
                for (const auto& m : zrs) {
                    if (!m.is_zero()) nonzero.push_back(m);
                }
                dep = nonzero.size() >= 2 ? estimate_dependence(nonzero) : 1.0;
            }
            report.kind = "lines";
            report.success = true;
            report.diagnostics["candidate_lines"] = static_cast<double>(cand.size());
            if (algorithm == "irv") report.diagnostics["independence_estimate"] = dep;
            return report;
        }
        if (algorithm == "rand-rlnc") {
            if (bundle.scheme != Scheme::RlncWeak) {
                throw UsageError("topology recovery requires an rlnc-weak bundle");
            }
            Codebook cb = derive_codebook(CodebookKind::Weak, bundle.codebook_seed, f);
            Network recovered = [&]() {
                GroundTruthSeal seal;
                CandidateLines cand = find_irv(zrs);
                return find_topo(cand, cb, bundle.node_labels, bundle.rloc);
            }();
            report.kind = "topology";
            report.recovered_network = recovered;
            for (std::size_t i = 0; i < recovered.edge_count(); ++i) {
                report.recovered_edges.push_back(recovered.edge_name(i));
            }
            if (bundle.truth_network) report.success = recovered == *bundle.truth_network;
            return report;
        }
        // algorithm == "rs"
        if (bundle.scheme != Scheme::Nrsc) throw UsageError("algorithm requires an nrsc bundle");
        IdTable ids(bundle.node_labels, bundle.id_max_parallel, bundle.id_seed, f);
        std::size_t skipped = 0;
        std::vector<EdgeRef> out;
        {
            GroundTruthSeal seal;
            out = find_topo_rs(zrs, ids, bundle.rloc, &skipped);
        }
        report.kind = "edge-set";
        for (const auto& r : out) {
            report.recovered_edges.push_back(r.tail + "->" + r.head + "#" +
                                             std::to_string(r.parallel));
        }
        report.diagnostics["skipped_zero_ratio"] = static_cast<double>(skipped);
        if (bundle.truth_network) {
            std::set<EdgeRef> truth;
            for (std::size_t i = 0; i < bundle.truth_network->edge_count(); ++i) {
                truth.insert(edge_refs(*bundle.truth_network, {static_cast<int>(i)})[0]);
            }
            int false_edges = 0;
            for (const auto& r : out) {
                if (!truth.count(r)) ++false_edges;
            }
            report.diagnostics["false_edges"] = false_edges;
            report.success = false_edges == 0;
        }
        return report;
    }

    if (algorithm == "adv-rlnc") {
        if (bundle.scheme != Scheme::RlncStrong) {
            throw UsageError("transform matching requires an rlnc-strong bundle");
        }
        if (!candidates) {
            throw UsageError("transform matching needs an explicit candidate list");
        }
        Codebook cb = derive_codebook(CodebookKind::Strong, bundle.codebook_seed, f);
        const GenerationTrace& trace = bundle.traces.front();
        FieldMatrix t_e = trace.Y.col_slice(0, bundle.capacity);
        Network got = [&]() {
            GroundTruthSeal seal;
            return topo_adv_rlnc(t_e, cb, bundle.node_labels, bundle.z, candidates,
                                 ConnectivityProfile::strong(bundle.z), bundle.rloc, caps);
        }();
        report.kind = "topology";
        report.recovered_network = got;
        for (std::size_t i = 0; i < got.edge_count(); ++i) {
            report.recovered_edges.push_back(got.edge_name(i));
        }
        if (bundle.truth_network) report.success = got == *bundle.truth_network;
        return report;
    }

    throw UsageError("unknown algorithm: " + algorithm);
}

void write_report(std::ostream& out, const TomographyReport& report, const std::string& format) {
    if (format == "json-lines") {
        json j;
        j["kind"] = report.kind;
        j["algorithm"] = report.algorithm;
        j["success"] = report.success;
        j["recovered_edges"] = report.recovered_edges;
        for (const auto& [k, v] : report.diagnostics) j["diagnostics"][k] = v;
        out << j.dump() << "\n";
        return;
    }
    if (format != "text") throw UsageError("unknown report format: " + format);
    out << "report kind=" << report.kind << " alg=" << report.algorithm
        << " success=" << (report.success ? 1 : 0) << "\n";
    for (const auto& e : report.recovered_edges) out << "edge " << e << "\n";
    for (const auto& [k, v] : report.diagnostics) out << "diag " << k << " " << v << "\n";
    if (report.recovered_network) {
        out << "network-begin\n";
        write_network(out, *report.recovered_network);
        out << "network-end\n";
    }
}

} // namespace nct
