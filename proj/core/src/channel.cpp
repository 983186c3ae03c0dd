#include "nct/channel.hpp"

#include <algorithm>

#include "nct/errors.hpp"

namespace nct {

namespace {

thread_local int g_seal_depth = 0;

double uniform01(Rng& rng) {
    return static_cast<double>(rng.below(1ULL << 53)) / 9007199254740992.0;
}

// x(e) for every edge of an error-free generation carrying message x.
std::vector<FieldVector> propagate_clean(const Network& net, const CodingAssignment& asg,
                                         const FieldMatrix& x) {
    std::size_t n = x.cols();
    const Field f = asg.field;
    std::vector<FieldVector> pkt(net.edge_count(), FieldVector(n, f));
    FieldMatrix sx = asg.source_mixing * x;
    for (int v : net.topo_order()) {
        if (v == net.receiver()) continue;
        if (v == net.source()) {
            const auto& outs = net.out_edges(v);
            for (std::size_t i = 0; i < outs.size(); ++i) pkt[outs[i]] = sx.row(i);
            continue;
        }
        for (int eout : net.out_edges(v)) {
            FieldVector acc(n, f);
            for (int ein : net.in_edges(v)) {
                acc.axpy(asg.beta_at(ein, eout), pkt[ein]);
            }
            pkt[eout] = acc;
        }
    }
    return pkt;
}

FieldVector sparse_random_packet(std::size_t n, int sparsity, const Field& f, Rng& rng) {
    FieldVector z(n, f);
    std::vector<std::size_t> pos;
    while (pos.size() < static_cast<std::size_t>(sparsity)) {
        std::size_t p = rng.below(n);
        if (std::find(pos.begin(), pos.end(), p) == pos.end()) pos.push_back(p);
    }
    for (std::size_t p : pos) z.set(p, rng.sample(f));
    return z;
}

} // namespace

ErrorModel ErrorModel::none() {
    return {};
}

ErrorModel ErrorModel::random_errors(double p_f, int sparsity) {
    if (p_f < 0.0 || p_f > 1.0) throw UsageError("random_errors: p_f outside [0,1]");
    if (sparsity < 1) throw UsageError("random_errors: sparsity must be >= 1");
    ErrorModel m;
    m.kind = Kind::Random;
    m.edge_probability = p_f;
    m.sparsity = sparsity;
    return m;
}

ErrorModel ErrorModel::adversarial(std::map<int, FieldVector> packets) {
    ErrorModel m;
    m.kind = Kind::Adversarial;
    for (const auto& [e, z] : packets) {
        if (z.is_zero()) throw UsageError("adversarial: declared packet is zero");
        m.edges.push_back(e);
    }
    m.packets = std::move(packets);
    return m;
}

ErrorModel ErrorModel::erasure_random(double p_f) {
    if (p_f < 0.0 || p_f > 1.0) throw UsageError("erasure_random: p_f outside [0,1]");
    ErrorModel m;
    m.kind = Kind::ErasureRandom;
    m.edge_probability = p_f;
    return m;
}

ErrorModel ErrorModel::erasure_adversarial(std::vector<int> edges) {
    ErrorModel m;
    m.kind = Kind::ErasureAdversarial;
    m.edges = std::move(edges);
    return m;
}

ErrorModel ErrorModel::delay(std::vector<int> edges, FieldMatrix previous_message) {
    ErrorModel m;
    m.kind = Kind::Delay;
    m.edges = std::move(edges);
    m.previous_message = std::move(previous_message);
    return m;
}

GroundTruthSeal::GroundTruthSeal() {
    ++g_seal_depth;
}

GroundTruthSeal::~GroundTruthSeal() {
    --g_seal_depth;
}

bool GroundTruthSeal::sealed() {
    return g_seal_depth > 0;
}

const GroundTruth& GenerationTrace::truth() const {
    if (GroundTruthSeal::sealed()) {
        throw UsageError("ground truth accessed under seal (tomography phase)");
    }
    return truth_;
}

FieldMatrix make_message(std::size_t c, std::size_t n, const Field& f, Rng& rng) {
    if (n <= c) throw UsageError("make_message: block length must exceed C");
    FieldMatrix x(c, n, f);
    for (std::size_t i = 0; i < c; ++i) {
        x.set(i, i, FieldElement(1, f));
        for (std::size_t j = c; j < n; ++j) x.set(i, j, rng.sample(f));
    }
    return x;
}

GenerationTrace transmit(const Network& net, const CodingAssignment& asg, const FieldMatrix& x,
                         const ErrorModel& model, Rng& rng, int generation,
                         const std::string& scheme) {
    const Field f = asg.field;
    if (x.modulus() != f.modulus()) throw UsageError("transmit: message field mismatch");
    std::size_t c = net.in_edges(net.receiver()).size();
    if (x.rows() != net.out_edges(net.source()).size()) {
        throw UsageError("transmit: message rows must match source out-degree");
    }
    std::size_t n = x.cols();

    for (int e : model.edges) {
        if (e < 0 || e >= static_cast<int>(net.edge_count())) {
            throw UsageError("transmit: model references an edge outside the network");
        }
    }
    for (const auto& [e, z] : model.packets) {
        if (z.size() != n) throw UsageError("transmit: adversarial packet length != n");
    }

    std::vector<FieldVector> prev;
    if (model.kind == ErrorModel::Kind::Delay) {
        if (model.previous_message.rows() != x.rows() || model.previous_message.cols() != n) {
            throw UsageError("transmit: previous message shape mismatch");
        }
        prev = propagate_clean(net, asg, model.previous_message);
    }

    std::vector<char> declared(net.edge_count(), 0);
    for (int e : model.edges) declared[e] = 1;

    std::vector<FieldVector> received(net.edge_count(), FieldVector(n, f)); // y(e)
    GroundTruth truth;
    truth.X = x;
    FieldMatrix sx = asg.source_mixing * x;

    for (int v : net.topo_order()) {
        if (v == net.receiver()) continue;
        const auto& outs = net.out_edges(v);
        std::vector<FieldVector> sent; // x(e) per out edge
        sent.reserve(outs.size());
        if (v == net.source()) {
            for (std::size_t i = 0; i < outs.size(); ++i) sent.push_back(sx.row(i));
        } else {
            for (int eout : outs) {
                FieldVector acc(n, f);
                for (int ein : net.in_edges(v)) {
                    acc.axpy(asg.beta_at(ein, eout), received[ein]);
                }
                sent.push_back(acc);
            }
        }
        for (std::size_t i = 0; i < outs.size(); ++i) {
            int e = outs[i];
            FieldVector z(n, f);
            switch (model.kind) {
            case ErrorModel::Kind::None:
                break;
            case ErrorModel::Kind::Random:
                if (uniform01(rng) < model.edge_probability) {
                    z = sparse_random_packet(n, model.sparsity, f, rng);
                }
                break;
            case ErrorModel::Kind::Adversarial:
                if (auto it = model.packets.find(e); it != model.packets.end()) z = it->second;
                break;
            case ErrorModel::Kind::ErasureRandom:
                if (uniform01(rng) < model.edge_probability) z = FieldVector(n, f) - sent[i];
                break;
            case ErrorModel::Kind::ErasureAdversarial:
                if (declared[e]) z = FieldVector(n, f) - sent[i];
                break;
            case ErrorModel::Kind::Delay:
                if (declared[e]) z = prev[e] - sent[i];
                break;
            }
            received[e] = sent[i] + z;
            if (!z.is_zero()) {
                truth.error_edges.push_back(e);
                truth.injected.emplace(e, z);
            }
        }
    }

    const auto& rin = net.in_edges(net.receiver());
    FieldMatrix y(c, n, f);
    for (std::size_t j = 0; j < rin.size(); ++j) y.set_row(j, received[rin[j]]);
    return GenerationTrace(std::move(y), std::move(truth), model.kind, scheme, generation);
}

std::optional<FieldMatrix> genie_decode(const GenerationTrace& trace) {
    const GroundTruth& t = trace.truth();
    std::size_t z = t.error_edges.size();
    std::size_t c = trace.Y.rows();
    bool ok;
    if (trace.model_kind == ErrorModel::Kind::Adversarial) {
        ok = 2 * z + 1 <= c;
    } else {
        ok = z + 1 <= c || z == 0;
    }
    if (!ok) return std::nullopt;
    return t.X;
}

FieldMatrix error_matrix(const GenerationTrace& trace, const FieldMatrix& x_decoded) {
    std::size_t c = trace.Y.rows();
    std::size_t n = trace.Y.cols();
    if (x_decoded.rows() != c || x_decoded.cols() != n || n <= c) {
        throw UsageError("error_matrix: invalid column split");
    }
    for (std::size_t i = 0; i < c; ++i) {
        for (std::size_t j = 0; j < c; ++j) {
            std::uint32_t want = i == j ? 1 : 0;
            if (x_decoded.at(i, j).value() != want) {
                throw UsageError("error_matrix: decoded message lacks the identity header");
            }
        }
    }
    FieldMatrix y_h = trace.Y.col_slice(0, c);
    FieldMatrix y_m = trace.Y.col_slice(c, n);
    FieldMatrix m = x_decoded.col_slice(c, n);
    return y_m - y_h * m;
}

ErrorModel confusion_attack(const Network& net, const CodingAssignment& asg,
                            const std::vector<int>& e1_set, const std::vector<int>& e2_set,
                            const FieldMatrix& x) {
    IrvTable irv = compute_irvs(net, asg);
    FieldMatrix theta1 = irv.irm(e1_set);
    FieldMatrix theta2 = irv.irm(e2_set);
    FieldMatrix shared = col_space_intersect(theta1, theta2);
    if (shared.cols() == 0) {
        throw AttackInfeasibleError("confusion_attack: IRV spans intersect trivially");
    }
    FieldVector w = shared.col(0);
    auto coeffs = solve(theta1, w);
    if (!coeffs) {
        throw AttackInfeasibleError("confusion_attack: shared vector not expressible");
    }
    // Every injected packet is a multiple of one carrier row, so the error
    // matrix is w * carrier, inside both spans.
    FieldVector carrier = x.row(0);
    std::map<int, FieldVector> packets;
    for (std::size_t i = 0; i < e1_set.size(); ++i) {
        FieldElement a = (*coeffs)[i];
        if (a.is_zero()) continue;
        packets.emplace(e1_set[i], carrier.scaled(a));
    }
    if (packets.empty()) {
        throw AttackInfeasibleError("confusion_attack: attack degenerates to no injection");
    }
    return ErrorModel::adversarial(std::move(packets));
}

ErrorModel uniform_adversary(const std::vector<int>& edges, std::size_t n, const Field& f,
                             Rng& rng) {
    std::map<int, FieldVector> packets;
    for (int e : edges) {
        FieldVector z(n, f);
        while (z.is_zero()) {
            for (std::size_t j = 0; j < n; ++j) z.set(j, rng.sample(f));
        }
        packets.emplace(e, z);
    }
    return ErrorModel::adversarial(std::move(packets));
}

ErrorModel decoy_align_attack(const Network& net, const CodingAssignment& asg, int edge,
                              const FieldMatrix& transfer_true,
                              const FieldMatrix& transfer_decoy, std::size_t n, Rng& rng) {
    IrvTable irv = compute_irvs(net, asg);
    const FieldVector& theta = irv.theta[edge];
    FieldMatrix diff = transfer_decoy - transfer_true;
    const Field f = asg.field;
    std::size_t c = theta.size();
    // Zero out one row of the decoy difference: pick i with theta_i != 0 and
    // a nonzero difference row, inject g = theta_i^-1 * diff_row_i on the
    // packet header.
    for (std::size_t i = 0; i < c; ++i) {
        if (theta[i].is_zero()) continue;
        FieldVector row = diff.row(i);
        if (row.is_zero()) continue;
        FieldVector z(n, f);
        FieldElement scale = theta[i].inv();
        for (std::size_t j = 0; j < c && j < n; ++j) z.set(j, scale * row[j]);
        if (!z.is_zero()) {
            std::map<int, FieldVector> packets;
            packets.emplace(edge, std::move(z));
            return ErrorModel::adversarial(std::move(packets));
        }
    }
    return uniform_adversary({edge}, n, f, rng);
}

ErrorModel hide_node(const Network& net, int node) {
    if (node == net.source() || node == net.receiver()) {
        throw UsageError("hide_node: cannot hide the source or receiver");
    }
    return ErrorModel::erasure_adversarial(net.in_edges(node));
}

} // namespace nct
