#include "nct/tomography.hpp"

#include <algorithm>
#include <queue>

#include "nct/errors.hpp"
#include "nct/rscode.hpp"

namespace nct {

namespace {

// T with rows ordered by the receiver's known ports when the graph carries
// exactly those in-edges; the graph's own edge order otherwise.
FieldMatrix transfer_by_ports(const Network& g, const CodingAssignment& asg,
                              const ReceiverLocality& rloc) {
    IrvTable table = compute_irvs(g, asg);
    const auto& rin = g.in_edges(g.receiver());
    if (rin.size() == rloc.in_edges.size()) {
        std::vector<FieldVector> rows;
        rows.reserve(rloc.in_edges.size());
        bool all = true;
        for (const auto& [tail, par] : rloc.in_edges) {
            int ei = g.find_edge(tail, rloc.receiver, par);
            if (ei < 0) {
                all = false;
                break;
            }
            rows.push_back(table.ghat[ei]);
        }
        if (all) return FieldMatrix::from_rows(rows, asg.field);
    }
    return table.transfer();
}

std::size_t count_combinations(std::size_t n, std::size_t k, std::size_t cap) {
    std::size_t c = 1;
    for (std::size_t i = 1; i <= k; ++i) {
        c = c * (n - i + 1) / i;
        if (c > cap) return cap + 1;
    }
    return c;
}

bool next_combination(std::vector<std::size_t>& idx, std::size_t n) {
    std::size_t k = idx.size();
    for (std::size_t i = k; i-- > 0;) {
        if (idx[i] + (k - i) < n) {
            ++idx[i];
            for (std::size_t j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
            return true;
        }
    }
    return false;
}

// Partially recovered topology, grown edge by edge. Everything is keyed by
// labels because the true node indexing is unknown to the receiver.
struct PartialGraph {
    struct PEdge {
        std::string tail, head;
        int parallel;
    };

    const Codebook* cb = nullptr;
    ReceiverLocality rloc;
    std::vector<std::string> nodes;
    std::set<std::string> node_set;
    std::vector<PEdge> edges;
    std::set<std::tuple<std::string, std::string, int>> edge_keys;
    std::map<std::string, std::vector<int>> out, in;
    std::map<std::tuple<std::string, std::string, int>, FieldVector> theta;

    void add_node(const std::string& l) {
        if (node_set.insert(l).second) nodes.push_back(l);
    }

    void add_edge(const std::string& t, const std::string& h, int k) {
        edge_keys.insert({t, h, k});
        out[t].push_back(static_cast<int>(edges.size()));
        in[h].push_back(static_cast<int>(edges.size()));
        edges.push_back({t, h, k});
    }

    bool has_edge(const std::string& t, const std::string& h, int k) const {
        return edge_keys.count({t, h, k}) > 0;
    }

    bool reachable(const std::string& from, const std::string& to) const {
        if (from == to) return true;
        std::set<std::string> seen{from};
        std::queue<std::string> q;
        q.push(from);
        while (!q.empty()) {
            std::string u = q.front();
            q.pop();
            auto it = out.find(u);
            if (it == out.end()) continue;
            for (int ei : it->second) {
                const std::string& h = edges[ei].head;
                if (h == to) return true;
                if (seen.insert(h).second) q.push(h);
            }
        }
        return false;
    }

    std::vector<std::string> topo_order() const {
        std::map<std::string, int> indeg;
        for (const auto& n : nodes) indeg[n] = 0;
        for (const auto& e : edges) indeg[e.head]++;
        std::queue<std::string> q;
        for (const auto& n : nodes) {
            if (indeg[n] == 0) q.push(n);
        }
        std::vector<std::string> order;
        std::map<std::string, std::vector<std::string>> heads;
        for (const auto& e : edges) heads[e.tail].push_back(e.head);
        while (!q.empty()) {
            std::string u = q.front();
            q.pop();
            order.push_back(u);
            for (const auto& h : heads[u]) {
                if (--indeg[h] == 0) q.push(h);
            }
        }
        return order;
    }

    // IRV the codebook implies for an incoming edge (u, v, k), given the
    // current out-edges of v.
    FieldVector candidate_theta(const std::string& u, const std::string& v, int k) const {
        std::size_t c = rloc.in_edges.size();
        FieldVector acc(c, cb->field());
        auto it = out.find(v);
        if (it == out.end()) return acc;
        for (int ei : it->second) {
            const PEdge& oe = edges[ei];
            acc.axpy(cb->weak_entry(v, u, oe.head, k, oe.parallel),
                     theta.at({oe.tail, oe.head, oe.parallel}));
        }
        return acc;
    }

    void recompute_theta() {
        theta.clear();
        std::size_t c = rloc.in_edges.size();
        const Field f = cb->field();
        for (std::size_t j = 0; j < rloc.in_edges.size(); ++j) {
            FieldVector unit(c, f);
            unit.set(j, FieldElement(1, f));
            theta[{rloc.in_edges[j].first, rloc.receiver, rloc.in_edges[j].second}] = unit;
        }
        std::vector<std::string> order = topo_order();
        for (auto it = order.rbegin(); it != order.rend(); ++it) {
            const std::string& w = *it;
            if (w == rloc.receiver) continue;
            auto ins = in.find(w);
            if (ins == in.end()) continue;
            for (int ei : ins->second) {
                const PEdge& e = edges[ei];
                theta[{e.tail, e.head, e.parallel}] = candidate_theta(e.tail, e.head, e.parallel);
            }
        }
    }

    std::size_t out_rank(const std::string& v) const {
        auto it = out.find(v);
        if (it == out.end() || it->second.empty()) return 0;
        std::vector<FieldVector> cols;
        for (int ei : it->second) {
            cols.push_back(theta.at({edges[ei].tail, edges[ei].head, edges[ei].parallel}));
        }
        return rank(FieldMatrix::from_columns(cols, cb->field()));
    }
};

} // namespace

void CandidateLines::add(const LineRep& line, std::pair<int, int> provenance) {
    lines_.insert(line);
    provenance_[line].push_back(provenance);
}

const std::vector<std::pair<int, int>>& CandidateLines::provenance(const LineRep& line) const {
    static const std::vector<std::pair<int, int>> empty;
    auto it = provenance_.find(line);
    return it == provenance_.end() ? empty : it->second;
}

CandidateLines find_irv(const std::vector<FieldMatrix>& error_matrices) {
    CandidateLines out;
    if (error_matrices.size() < 2) return out;
    std::vector<FieldMatrix> bases;
    bases.reserve(error_matrices.size());
    for (const auto& m : error_matrices) bases.push_back(col_space_basis(m));
    for (std::size_t i = 0; i < bases.size(); ++i) {
        for (std::size_t j = i + 1; j < bases.size(); ++j) {
            FieldMatrix shared = col_space_intersect(bases[i], bases[j]);
            if (shared.cols() == 0) continue;
            FieldMatrix basis = col_space_basis(shared);
            if (basis.cols() == 1) {
                out.add(canonical_line(basis.col(0)),
                        {static_cast<int>(i), static_cast<int>(j)});
            }
        }
    }
    return out;
}

CandidateLines find_irv_erasure(const std::vector<FieldMatrix>& received) {
    if (received.size() < 2) return {};
    std::size_t c = received[0].rows();
    std::vector<FieldMatrix> diffs;
    for (std::size_t i = 0; i < received.size(); ++i) {
        for (std::size_t j = i + 1; j < received.size(); ++j) {
            FieldMatrix d = received[i].col_slice(0, c) - received[j].col_slice(0, c);
            if (!d.is_zero()) diffs.push_back(std::move(d));
        }
    }
    return find_irv(diffs);
}

double estimate_dependence(const std::vector<FieldMatrix>& error_matrices) {
    if (error_matrices.size() < 2) {
        throw UsageError("estimate_dependence: need at least two traces");
    }
    std::vector<FieldMatrix> bases;
    bases.reserve(error_matrices.size());
    for (const auto& m : error_matrices) bases.push_back(col_space_basis(m));
    std::size_t independent = 0, total = 0;
    for (std::size_t i = 0; i < bases.size(); ++i) {
        for (std::size_t j = i + 1; j < bases.size(); ++j) {
            ++total;
            if (col_space_intersect(bases[i], bases[j]).cols() == 0) ++independent;
        }
    }
    return static_cast<double>(independent) / static_cast<double>(total);
}

Network find_topo(const CandidateLines& candidates, const Codebook& cb,
                  const std::vector<std::string>& node_labels, const ReceiverLocality& rloc) {
    if (cb.kind() != CodebookKind::Weak) {
        throw UsageError("find_topo: weak-kind codebook required");
    }
    PartialGraph g;
    g.cb = &cb;
    g.rloc = rloc;
    g.add_node(rloc.receiver);
    for (const auto& [tail, par] : rloc.in_edges) {
        g.add_node(tail);
        g.add_edge(tail, rloc.receiver, par);
    }
    g.add_node(rloc.source);
    g.recompute_theta();

    std::vector<std::string> universe = node_labels;
    std::sort(universe.begin(), universe.end());

    bool grew = true;
    while (grew) {
        grew = false;
        std::vector<std::string> order = g.topo_order();
        std::reverse(order.begin(), order.end()); // descending topological rank
        for (const std::string& v : order) {
            if (v == rloc.source || v == rloc.receiver) continue;
            if (g.out_rank(v) < 2) continue; // rank-one span cannot witness new edges
            for (const std::string& u : universe) {
                if (u == v || u == rloc.receiver) continue;
                for (int k = 0; k < rloc.max_parallel; ++k) {
                    if (g.has_edge(u, v, k)) continue;
                    if (g.node_set.count(u) && g.reachable(v, u)) continue; // would close a cycle
                    FieldVector th = g.candidate_theta(u, v, k);
                    if (th.is_zero()) continue;
                    if (!candidates.contains(canonical_line(th))) continue;
                    g.add_node(u);
                    g.add_edge(u, v, k);
                    g.recompute_theta();
                    grew = true;
                }
            }
        }
    }

    std::map<std::string, int> index;
    std::vector<std::string> labels = g.nodes;
    std::sort(labels.begin(), labels.end());
    for (std::size_t i = 0; i < labels.size(); ++i) index[labels[i]] = static_cast<int>(i);
    std::vector<Edge> edges;
    for (const auto& e : g.edges) edges.push_back({index[e.tail], index[e.head], e.parallel});
    try {
        return Network::build(labels, edges, rloc.source, rloc.receiver, true);
    } catch (const UsageError&) {
        return Network::build(labels, edges, rloc.source, rloc.receiver, false);
    }
}

Network topo_adv_rlnc(const FieldMatrix& transfer_polluted, const Codebook& cb,
                      const std::vector<std::string>& node_labels, int z,
                      const std::vector<Network>* explicit_candidates,
                      const ConnectivityProfile& profile, const ReceiverLocality& rloc,
                      const TomographyCaps& caps) {
    if (cb.kind() != CodebookKind::Strong) {
        throw UsageError("topo_adv_rlnc: strong-kind codebook required");
    }
    std::size_t c = transfer_polluted.rows();
    if (transfer_polluted.cols() != c) throw UsageError("topo_adv_rlnc: T_e must be square");

    auto matches = [&](const Network& g) {
        if (g.capacity() != static_cast<int>(c)) return false;
        CodingAssignment asg = assign_rlnc(g, cb);
        FieldMatrix t = transfer_by_ports(g, asg, rloc);
        return rank(t - transfer_polluted) <= static_cast<std::size_t>(z);
    };

    if (explicit_candidates) {
        for (const Network& g : *explicit_candidates) {
            if (matches(g)) return g;
        }
        throw ModelViolationError("topo_adv_rlnc: no candidate graph within rank distance");
    }

    // Enumerate graphs over the label set: subsets of the feasible ordered
    // pairs, receiver ports pinned to what the receiver knows.
    std::vector<std::string> labels = node_labels;
    std::sort(labels.begin(), labels.end());
    std::vector<std::pair<std::string, std::string>> pairs;
    for (const auto& u : labels) {
        for (const auto& v : labels) {
            if (u == v || u == rloc.receiver || v == rloc.source || v == rloc.receiver) continue;
            pairs.emplace_back(u, v);
        }
    }
    std::size_t bits = pairs.size();
    if (bits >= 63 || (1ULL << bits) > caps.max_candidate_graphs) {
        throw ScaleCapError("topo_adv_rlnc: enumeration over " + std::to_string(bits) +
                            " possible edges exceeds the candidate cap");
    }

    std::vector<Network> found;
    for (std::uint64_t mask = 0; mask < (1ULL << bits); ++mask) {
        std::set<std::string> used{rloc.source, rloc.receiver};
        std::vector<std::tuple<std::string, std::string, int>> raw;
        for (std::size_t b = 0; b < bits; ++b) {
            if (mask & (1ULL << b)) {
                raw.emplace_back(pairs[b].first, pairs[b].second, 0);
                used.insert(pairs[b].first);
                used.insert(pairs[b].second);
            }
        }
        for (const auto& [tail, par] : rloc.in_edges) {
            raw.emplace_back(tail, rloc.receiver, par);
            used.insert(tail);
        }
        std::vector<std::string> sub(used.begin(), used.end());
        std::map<std::string, int> index;
        for (std::size_t i = 0; i < sub.size(); ++i) index[sub[i]] = static_cast<int>(i);
        std::vector<Edge> edges;
        for (const auto& [t, h, k] : raw) edges.push_back({index[t], index[h], k});
        try {
            Network g = Network::build(sub, edges, rloc.source, rloc.receiver, true);
            if (g.capacity() != static_cast<int>(c)) continue;
            if (!check_profile(g, profile).ok) continue;
            found.push_back(std::move(g));
        } catch (const UsageError&) {
            continue;
        }
    }
    std::stable_sort(found.begin(), found.end(), [](const Network& a, const Network& b) {
        if (a.edge_count() != b.edge_count()) return a.edge_count() < b.edge_count();
        std::vector<std::string> ea, eb;
        for (std::size_t i = 0; i < a.edge_count(); ++i) ea.push_back(a.edge_name(i));
        for (std::size_t i = 0; i < b.edge_count(); ++i) eb.push_back(b.edge_name(i));
        std::sort(ea.begin(), ea.end());
        std::sort(eb.begin(), eb.end());
        return ea < eb;
    });
    for (const Network& g : found) {
        if (matches(g)) return g;
    }
    throw ModelViolationError("topo_adv_rlnc: no enumerated graph within rank distance");
}

std::vector<int> locate_adversary_rlnc(const FieldMatrix& error_mat, const Network& net,
                                       const IrvTable& irv, int z_max,
                                       const TomographyCaps& caps) {
    if (z_max < 0) throw UsageError("locate_adversary_rlnc: negative z_max");
    if (error_mat.is_zero()) return {};

    std::size_t ne = net.edge_count();
    std::size_t total = 0;
    for (int k = 1; k <= z_max; ++k) {
        total += count_combinations(ne, k, caps.max_support_subsets);
        if (total > caps.max_support_subsets) {
            throw ScaleCapError("locate_adversary_rlnc: subset search space exceeds cap");
        }
    }

    std::set<int> located;
    for (std::size_t ci : independent_columns(error_mat)) {
        FieldVector col = error_mat.col(ci);
        bool explained = false;
        for (int k = 1; k <= z_max && !explained; ++k) {
            std::vector<std::size_t> idx(k);
            for (int i = 0; i < k; ++i) idx[i] = i;
            do {
                std::vector<int> subset(idx.begin(), idx.end());
                if (col_space_contains(irv.irm(subset), col)) {
                    located.insert(subset.begin(), subset.end());
                    explained = true;
                    break;
                }
            } while (next_combination(idx, ne));
        }
        if (!explained) {
            throw ModelViolationError(
                "locate_adversary_rlnc: a column is not explained by <= z_max IRVs");
        }
    }
    return {located.begin(), located.end()};
}

std::vector<int> locate_random_rlnc(const FieldMatrix& error_mat_payload, const Network& net,
                                    const IrvTable& irv) {
    std::vector<int> out;
    if (error_mat_payload.is_zero()) return out;
    FieldMatrix basis = col_space_basis(error_mat_payload);
    for (std::size_t e = 0; e < net.edge_count(); ++e) {
        if (irv.theta[e].is_zero()) continue;
        if (col_space_contains(basis, irv.theta[e])) out.push_back(static_cast<int>(e));
    }
    return out;
}

namespace {

FieldMatrix rs_residual(const FieldMatrix& x, const FieldMatrix& y, const IdTable& ids, int d,
                        const ReceiverLocality& rloc) {
    if (d < 1) throw UsageError("rs localization: depth must be positive");
    if (static_cast<std::size_t>(d) > x.rows()) {
        throw UsageError("rs localization: depth exceeds message rows");
    }
    std::vector<FieldElement> port_ids;
    port_ids.reserve(rloc.in_edges.size());
    for (const auto& [tail, par] : rloc.in_edges) {
        port_ids.push_back(ids.id(tail, rloc.receiver, par));
    }
    FieldMatrix phi_in = vandermonde(port_ids, d);
    return phi_in * y - x.row_slice(0, d);
}

} // namespace

std::vector<EdgeRef> locate_adversary_rs(const FieldMatrix& x, const FieldMatrix& y,
                                         const IdTable& ids, int d,
                                         const ReceiverLocality& rloc) {
    FieldMatrix l = rs_residual(x, y, ids, d, rloc);
    RsParitySpec spec(ids.all_ids(), d);
    std::set<std::size_t> support;
    for (std::size_t j = 0; j < l.cols(); ++j) {
        FieldVector col = l.col(j);
        if (col.is_zero()) continue;
        auto b = rs_decode(spec, col, d / 2);
        if (!b) {
            throw ModelViolationError(
                "locate_adversary_rs: a residual column does not sparse-decode");
        }
        for (const auto& [idx, val] : b->entries) support.insert(idx);
    }
    std::vector<EdgeRef> out;
    for (std::size_t idx : support) {
        const auto& p = ids.pair_at(idx);
        out.push_back({p.tail, p.head, p.parallel});
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<EdgeRef> locate_random_rs(const FieldMatrix& x, const FieldMatrix& y,
                                      const IdTable& ids, int d, const ReceiverLocality& rloc) {
    FieldMatrix l = rs_residual(x, y, ids, d, rloc);
    std::vector<EdgeRef> out;
    if (l.is_zero()) return out;
    FieldMatrix basis = col_space_basis(l);
    for (std::size_t idx = 0; idx < ids.universe_size(); ++idx) {
        if (col_space_contains(basis, virv(ids.id_at(idx), d))) {
            const auto& p = ids.pair_at(idx);
            out.push_back({p.tail, p.head, p.parallel});
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<EdgeRef> find_topo_rs(const std::vector<FieldMatrix>& error_matrices,
                                  const IdTable& ids, const ReceiverLocality& rloc,
                                  std::size_t* skipped_zero_ratio) {
    std::size_t skipped = 0;
    std::set<EdgeRef> found;
    if (error_matrices.size() >= 2) {
        std::vector<FieldElement> port_ids;
        for (const auto& [tail, par] : rloc.in_edges) {
            port_ids.push_back(ids.id(tail, rloc.receiver, par));
        }
        FieldMatrix phi2 = vandermonde(port_ids, 2);
        std::vector<FieldMatrix> bases;
        bases.reserve(error_matrices.size());
        for (const auto& m : error_matrices) bases.push_back(col_space_basis(m));
        for (std::size_t i = 0; i < bases.size(); ++i) {
            for (std::size_t j = i + 1; j < bases.size(); ++j) {
                FieldMatrix shared = col_space_basis(col_space_intersect(bases[i], bases[j]));
                if (shared.cols() != 1) continue;
                FieldVector hv = phi2 * shared.col(0);
                if (hv[0].is_zero()) {
                    // Ratio undefined; a true edge line cannot land here
                    // under nonzero ids, so this only drops noise.
                    ++skipped;
                    continue;
                }
                FieldElement ratio = hv[1] * hv[0].inv();
                for (std::size_t idx = 0; idx < ids.universe_size(); ++idx) {
                    if (ids.id_at(idx) == ratio) {
                        const auto& p = ids.pair_at(idx);
                        found.insert({p.tail, p.head, p.parallel});
                    }
                }
            }
        }
    }
    if (skipped_zero_ratio) *skipped_zero_ratio = skipped;
    return {found.begin(), found.end()};
}

std::vector<int> locate_erasures(const FieldMatrix& y, const FieldMatrix& x, const Network& net,
                                 const IrvTable& irv) {
    FieldMatrix residue = y - irv.transfer() * x;
    return locate_delays(residue, net, irv);
}

std::vector<int> locate_delays(const FieldMatrix& delayed_mat, const Network& net,
                               const IrvTable& irv) {
    return locate_random_rlnc(delayed_mat, net, irv);
}

} // namespace nct
