#include "nct/codes.hpp"

#include <algorithm>
#include <ostream>
#include <set>

#include "nct/errors.hpp"

namespace nct {

namespace {

constexpr std::uint64_t kWeakTag = 0x77656b636f646562ULL;
constexpr std::uint64_t kStrongTag = 0x7374726f6e676362ULL;
constexpr std::uint64_t kSourceTag = 0x737263206d697820ULL;
constexpr std::uint64_t kIdTag = 0x6964207461626c65ULL;

std::uint64_t chain(std::uint64_t h, const std::uint64_t* key, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) h = hash_combine(h, key[i]);
    return h;
}

// Uniform residue from a key, by rejection over mixed counter values.
std::uint32_t prf_residue(std::uint64_t state, std::uint32_t q) {
    std::uint64_t limit = UINT64_MAX - UINT64_MAX % q;
    for (std::uint64_t ctr = 0;; ++ctr) {
        std::uint64_t x = mix64(state + ctr);
        if (x < limit) return static_cast<std::uint32_t>(x % q);
    }
}

} // namespace

Codebook::Codebook(CodebookKind kind, std::uint64_t seed, const Field& field)
    : kind_(kind), seed_(seed), field_(field) {}

Codebook derive_codebook(CodebookKind kind, std::uint64_t seed, const Field& field) {
    return Codebook(kind, seed, field);
}

FieldElement Codebook::derive(const std::uint64_t* key, std::size_t n) const {
    std::uint64_t h = chain(mix64(seed_), key, n);
    return FieldElement(prf_residue(h, field_.modulus()), field_);
}

FieldElement Codebook::weak_entry(const std::string& v, const std::string& u,
                                  const std::string& w, int in_parallel,
                                  int out_parallel) const {
    const std::uint64_t key[] = {kWeakTag,        hash_label(v),
                                 hash_label(u),   hash_label(w),
                                 static_cast<std::uint64_t>(in_parallel),
                                 static_cast<std::uint64_t>(out_parallel)};
    return derive(key, 6);
}

FieldElement Codebook::strong_entry(const std::string& v, const std::string& u,
                                    const std::string& w, const std::string& w_other,
                                    int in_parallel, int out_parallel,
                                    int other_parallel) const {
    const std::uint64_t key[] = {kStrongTag,
                                 hash_label(v),
                                 hash_label(u),
                                 hash_label(w),
                                 hash_label(w_other),
                                 static_cast<std::uint64_t>(in_parallel),
                                 static_cast<std::uint64_t>(out_parallel),
                                 static_cast<std::uint64_t>(other_parallel)};
    return derive(key, 8);
}

FieldElement Codebook::source_entry(const std::string& head, int out_parallel, int row) const {
    const std::uint64_t key[] = {kSourceTag, hash_label(head),
                                 static_cast<std::uint64_t>(out_parallel),
                                 static_cast<std::uint64_t>(row)};
    return derive(key, 4);
}

IdTable::IdTable(std::vector<std::string> node_labels, int max_parallel, std::uint64_t seed,
                 const Field& field)
    : labels_(std::move(node_labels)), max_parallel_(max_parallel), seed_(seed), field_(field) {
    if (max_parallel_ < 1) throw UsageError("IdTable: max_parallel must be >= 1");
    std::sort(labels_.begin(), labels_.end());
    labels_.erase(std::unique(labels_.begin(), labels_.end()), labels_.end());
    std::size_t universe = labels_.size() * (labels_.size() - 1) * max_parallel_;
    if (universe >= field_.modulus()) {
        throw UsageError("IdTable: field too small for " + std::to_string(universe) +
                         " distinct nonzero ids");
    }
    std::set<std::uint32_t> used;
    for (const auto& u : labels_) {
        for (const auto& v : labels_) {
            if (u == v) continue;
            for (int k = 0; k < max_parallel_; ++k) {
                std::uint64_t h = mix64(seed_);
                const std::uint64_t key[] = {kIdTag, hash_label(u), hash_label(v),
                                             static_cast<std::uint64_t>(k)};
                h = chain(h, key, 4);
                // Zero and collisions are resampled with a derived subkey.
                std::uint32_t value;
                for (std::uint64_t attempt = 0;; ++attempt) {
                    value = prf_residue(hash_combine(h, attempt), field_.modulus());
                    if (value != 0 && used.insert(value).second) break;
                }
                index_[{u, v, k}] = static_cast<int>(universe_.size());
                universe_.push_back({u, v, k});
                ids_.push_back(FieldElement(value, field_));
            }
        }
    }
}

int IdTable::index_of(const std::string& u, const std::string& v, int parallel) const {
    auto it = index_.find({u, v, parallel});
    return it == index_.end() ? -1 : it->second;
}

FieldElement IdTable::id(const std::string& u, const std::string& v, int parallel) const {
    int i = index_of(u, v, parallel);
    if (i < 0) {
        throw UsageError("IdTable: no id for pair " + u + "->" + v + "#" +
                         std::to_string(parallel));
    }
    return ids_[i];
}

FieldElement IdTable::edge_id(const Network& net, int edge_index) const {
    const Edge& e = net.edge(edge_index);
    return id(net.label(e.tail), net.label(e.head), e.parallel);
}

FieldVector virv(FieldElement id, std::size_t depth) {
    if (id.is_zero()) throw UsageError("virv: zero id");
    FieldVector v(depth, id.field());
    FieldElement p = id;
    for (std::size_t i = 0; i < depth; ++i) {
        v.set(i, p);
        p = p * id;
    }
    return v;
}

FieldElement CodingAssignment::beta_at(int in_edge, int out_edge) const {
    auto it = beta.find({in_edge, out_edge});
    if (it == beta.end()) {
        throw UsageError("assignment has no coefficient for edge pair (" +
                         std::to_string(in_edge) + ", " + std::to_string(out_edge) + ")");
    }
    return it->second;
}

CodingAssignment assign_rlnc(const Network& net, const Codebook& cb) {
    CodingAssignment asg;
    asg.scheme = CodingAssignment::Scheme::Rlnc;
    asg.field = cb.field();
    for (int v = 0; v < static_cast<int>(net.node_count()); ++v) {
        if (v == net.source() || v == net.receiver()) continue;
        const std::string& vl = net.label(v);
        for (int ein : net.in_edges(v)) {
            const Edge& ie = net.edge(ein);
            const std::string& ul = net.label(ie.tail);
            for (int eout : net.out_edges(v)) {
                const Edge& oe = net.edge(eout);
                const std::string& wl = net.label(oe.head);
                FieldElement b(0, cb.field());
                if (cb.kind() == CodebookKind::Weak) {
                    b = cb.weak_entry(vl, ul, wl, ie.parallel, oe.parallel);
                } else {
                    for (int other : net.out_edges(v)) {
                        const Edge& oo = net.edge(other);
                        b += cb.strong_entry(vl, ul, wl, net.label(oo.head), ie.parallel,
                                             oe.parallel, oo.parallel);
                    }
                }
                asg.beta[{ein, eout}] = b;
            }
        }
    }
    int c = net.capacity();
    asg.source_mixing = FieldMatrix(c, c, cb.field());
    const auto& souts = net.out_edges(net.source());
    for (int i = 0; i < c; ++i) {
        const Edge& e = net.edge(souts[i]);
        for (int j = 0; j < c; ++j) {
            asg.source_mixing.set(i, j, cb.source_entry(net.label(e.head), e.parallel, j));
        }
    }
    return asg;
}

CodingAssignment assign_nrsc(const Network& net, const IdTable& ids) {
    CodingAssignment asg;
    asg.scheme = CodingAssignment::Scheme::Nrsc;
    asg.field = ids.field();
    for (int v = 0; v < static_cast<int>(net.node_count()); ++v) {
        if (v == net.source() || v == net.receiver()) continue;
        const auto& outs = net.out_edges(v);
        std::size_t d = outs.size();
        std::vector<FieldElement> out_ids;
        out_ids.reserve(d);
        for (int eout : outs) out_ids.push_back(ids.edge_id(net, eout));
        FieldMatrix phi_out_inv;
        try {
            phi_out_inv = invert(vandermonde(out_ids, d));
        } catch (const Error&) {
            throw UsageError("assign_nrsc: outgoing ids at node " + net.label(v) +
                             " are not distinct and nonzero");
        }
        for (int ein : net.in_edges(v)) {
            FieldVector b = phi_out_inv * virv(ids.edge_id(net, ein), d);
            for (std::size_t i = 0; i < d; ++i) {
                asg.beta[{ein, outs[i]}] = b[i];
            }
        }
    }
    // Source rows are premixed so that an error-free network delivers
    // X through the Vandermonde structure of the source's outgoing ids.
    int c = net.capacity();
    std::vector<FieldElement> src_ids;
    for (int eout : net.out_edges(net.source())) src_ids.push_back(ids.edge_id(net, eout));
    try {
        asg.source_mixing = invert(vandermonde(src_ids, c));
    } catch (const Error&) {
        throw UsageError("assign_nrsc: source outgoing ids are not distinct and nonzero");
    }
    return asg;
}

CodingAssignment manual_assignment(const Network& net, const Field& field,
                                   std::map<std::pair<int, int>, FieldElement> beta,
                                   FieldMatrix source_mixing) {
    CodingAssignment asg;
    asg.scheme = CodingAssignment::Scheme::Manual;
    asg.field = field;
    asg.beta = std::move(beta);
    asg.source_mixing = std::move(source_mixing);
    int c = net.capacity();
    if (static_cast<int>(asg.source_mixing.rows()) != c ||
        static_cast<int>(asg.source_mixing.cols()) != c) {
        throw UsageError("manual_assignment: source mixing must be C x C");
    }
    for (int v = 0; v < static_cast<int>(net.node_count()); ++v) {
        if (v == net.source() || v == net.receiver()) continue;
        for (int ein : net.in_edges(v)) {
            for (int eout : net.out_edges(v)) {
                if (!asg.beta.count({ein, eout})) {
                    throw UsageError("manual_assignment: missing beta for " +
                                     net.edge_name(ein) + " through " + net.label(v) +
                                     " to " + net.edge_name(eout));
                }
            }
        }
    }
    return asg;
}

FieldMatrix IrvTable::irm(const std::vector<int>& edge_set) const {
    std::vector<FieldVector> cols;
    cols.reserve(edge_set.size());
    for (int e : edge_set) cols.push_back(theta[e]);
    if (cols.empty()) return FieldMatrix(receiver_in.size(), 0, field);
    return FieldMatrix::from_columns(cols, field);
}

FieldMatrix IrvTable::transfer() const {
    std::vector<FieldVector> rows;
    rows.reserve(receiver_in.size());
    for (int e : receiver_in) rows.push_back(ghat[e]);
    return FieldMatrix::from_rows(rows, field);
}

IrvTable compute_irvs(const Network& net, const CodingAssignment& asg) {
    IrvTable table;
    table.field = asg.field;
    const Field f = asg.field;
    std::size_t c = net.in_edges(net.receiver()).size();
    table.theta.assign(net.edge_count(), FieldVector(c, f));
    table.ghat.assign(net.edge_count(), FieldVector(c, f));
    table.receiver_in = net.in_edges(net.receiver());
    table.source_out = net.out_edges(net.source());

    // theta: unit columns on the receiver's in-edges, then backwards; the
    // IRV of an edge is determined by the out-edges of its head.
    const auto& topo = net.topo_order();
    for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
        int w = *it;
        if (w == net.receiver()) {
            for (std::size_t j = 0; j < table.receiver_in.size(); ++j) {
                FieldVector unit(c, f);
                unit.set(j, FieldElement(1, f));
                table.theta[table.receiver_in[j]] = unit;
            }
            continue;
        }
        if (w == net.source()) continue;
        for (int ein : net.in_edges(w)) {
            FieldVector acc(c, f);
            for (int eout : net.out_edges(w)) {
                acc.axpy(asg.beta_at(ein, eout), table.theta[eout]);
            }
            table.theta[ein] = acc;
        }
    }

    // ghat: source rows are the mixing rows, then forwards.
    for (int v : topo) {
        if (v == net.receiver()) continue;
        if (v == net.source()) {
            for (std::size_t i = 0; i < table.source_out.size(); ++i) {
                table.ghat[table.source_out[i]] = asg.source_mixing.row(i);
            }
            continue;
        }
        for (int eout : net.out_edges(v)) {
            FieldVector acc(c, f);
            for (int ein : net.in_edges(v)) {
                acc.axpy(asg.beta_at(ein, eout), table.ghat[ein]);
            }
            table.ghat[eout] = acc;
        }
    }
    return table;
}

FieldMatrix transfer_matrix(const Network& net, const CodingAssignment& asg) {
    IrvTable table = compute_irvs(net, asg);
    return table.irm(net.out_edges(net.source())) * asg.source_mixing;
}

void write_assignment(std::ostream& out, const Network& net, const CodingAssignment& asg) {
    for (const auto& [key, value] : asg.beta) {
        const Edge& ie = net.edge(key.first);
        out << "beta " << net.edge_name(key.first) << " " << net.label(ie.head) << " "
            << net.edge_name(key.second) << " " << value.value() << "\n";
    }
    for (std::size_t i = 0; i < asg.source_mixing.rows(); ++i) {
        for (std::size_t j = 0; j < asg.source_mixing.cols(); ++j) {
            out << "smix " << i << " " << j << " " << asg.source_mixing.at(i, j).value()
                << "\n";
        }
    }
}

} // namespace nct
