#include "nct/network.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <queue>
#include <set>
#include <sstream>

#include "nct/errors.hpp"

namespace nct {

namespace {

// Arc-list max-flow with BFS augmenting paths. Unit capacities and desk-size
// graphs; exactness is what matters here.
struct FlowGraph {
    struct Arc {
        int to;
        int cap;
        int rev;
    };

    explicit FlowGraph(int n) : adj(n) {}

    void add_arc(int from, int to, int cap) {
        adj[from].push_back({to, cap, static_cast<int>(adj[to].size())});
        adj[to].push_back({from, 0, static_cast<int>(adj[from].size()) - 1});
    }

    int max_flow(int s, int t) {
        int total = 0;
        while (true) {
            std::vector<std::pair<int, int>> prev(adj.size(), {-1, -1});
            std::queue<int> q;
            q.push(s);
            prev[s] = {s, -1};
            while (!q.empty() && prev[t].first == -1) {
                int u = q.front();
                q.pop();
                for (std::size_t i = 0; i < adj[u].size(); ++i) {
                    const Arc& a = adj[u][i];
                    if (a.cap > 0 && prev[a.to].first == -1) {
                        prev[a.to] = {u, static_cast<int>(i)};
                        q.push(a.to);
                    }
                }
            }
            if (prev[t].first == -1) break;
            for (int v = t; v != s;) {
                auto [u, i] = prev[v];
                adj[u][i].cap -= 1;
                adj[adj[u][i].to][adj[u][i].rev].cap += 1;
                v = u;
            }
            ++total;
        }
        return total;
    }

    std::vector<std::vector<Arc>> adj;
};

std::vector<int> dedupe_sorted(std::vector<int> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

} // namespace

ConnectivityProfile ConnectivityProfile::weak() {
    return {Kind::Weak, 2, 1, 0};
}

ConnectivityProfile ConnectivityProfile::strong(int z) {
    if (z < 0) throw UsageError("strong profile: negative z");
    return {Kind::Strong, 2 * z + 1, 2 * z + 1, z};
}

ConnectivityProfile ConnectivityProfile::locate_adv(int z) {
    if (z < 1) throw UsageError("locate-adv profile: z must be positive");
    return {Kind::LocateAdv, 2 * z, 1, z};
}

ConnectivityProfile ConnectivityProfile::degrees(int min_out, int min_in) {
    if (min_out < 0 || min_in < 0) throw UsageError("profile degrees must be nonnegative");
    return {Kind::Weak, min_out, min_in, 0};
}

Network Network::build(std::vector<std::string> labels, std::vector<Edge> edges,
                       const std::string& source, const std::string& receiver,
                       bool strict) {
    Network net;
    net.labels_ = std::move(labels);
    net.edges_ = std::move(edges);
    net.strict_ = strict;

    for (std::size_t i = 0; i < net.labels_.size(); ++i) {
        if (!net.index_.emplace(net.labels_[i], static_cast<int>(i)).second) {
            throw UsageError("duplicate node label: " + net.labels_[i]);
        }
    }
    auto si = net.index_.find(source);
    auto ri = net.index_.find(receiver);
    if (si == net.index_.end()) throw UsageError("source node not declared: " + source);
    if (ri == net.index_.end()) throw UsageError("receiver node not declared: " + receiver);
    net.source_ = si->second;
    net.receiver_ = ri->second;
    if (net.source_ == net.receiver_) throw UsageError("source equals receiver");

    int n = static_cast<int>(net.labels_.size());
    net.out_.resize(n);
    net.in_.resize(n);
    std::set<std::tuple<int, int, int>> seen;
    for (std::size_t i = 0; i < net.edges_.size(); ++i) {
        const Edge& e = net.edges_[i];
        if (e.tail < 0 || e.tail >= n || e.head < 0 || e.head >= n) {
            throw UsageError("edge references unknown node");
        }
        if (e.tail == e.head) throw UsageError("self-loop at " + net.labels_[e.tail]);
        if (!seen.insert({e.tail, e.head, e.parallel}).second) {
            throw UsageError("duplicate edge " + net.edge_name(i));
        }
        net.out_[e.tail].push_back(static_cast<int>(i));
        net.in_[e.head].push_back(static_cast<int>(i));
    }

    // Kahn; rejects cycles.
    std::vector<int> indeg(n, 0);
    for (const Edge& e : net.edges_) indeg[e.head]++;
    std::queue<int> q;
    for (int v = 0; v < n; ++v) {
        if (indeg[v] == 0) q.push(v);
    }
    while (!q.empty()) {
        int v = q.front();
        q.pop();
        net.topo_.push_back(v);
        for (int ei : net.out_[v]) {
            if (--indeg[net.edges_[ei].head] == 0) q.push(net.edges_[ei].head);
        }
    }
    if (net.topo_.size() != static_cast<std::size_t>(n)) {
        throw UsageError("network contains a cycle");
    }

    if (!strict) {
        net.capacity_ = static_cast<int>(net.in_[net.receiver_].size());
        return net;
    }

    if (!net.in_[net.source_].empty()) throw UsageError("source has incoming edges");
    if (!net.out_[net.receiver_].empty()) throw UsageError("receiver has outgoing edges");
    for (int v = 0; v < n; ++v) {
        if (v != net.source_ && net.in_[v].empty()) {
            throw UsageError("node " + net.labels_[v] + " has no incoming edge");
        }
    }

    // Every node must have a path to the receiver.
    std::vector<char> reach(n, 0);
    std::queue<int> rq;
    rq.push(net.receiver_);
    reach[net.receiver_] = 1;
    while (!rq.empty()) {
        int v = rq.front();
        rq.pop();
        for (int ei : net.in_[v]) {
            int u = net.edges_[ei].tail;
            if (!reach[u]) {
                reach[u] = 1;
                rq.push(u);
            }
        }
    }
    for (int v = 0; v < n; ++v) {
        if (!reach[v]) throw UsageError("node " + net.labels_[v] + " cannot reach the receiver");
    }

    int c = static_cast<int>(net.out_[net.source_].size());
    if (static_cast<int>(net.in_[net.receiver_].size()) != c) {
        throw UsageError("source out-degree and receiver in-degree differ");
    }
    net.capacity_ = c;
    if (min_cut(net) != c) {
        throw UsageError("min-cut does not equal source out-degree");
    }
    return net;
}

int Network::node_index(const std::string& label) const {
    auto it = index_.find(label);
    return it == index_.end() ? -1 : it->second;
}

std::string Network::edge_name(std::size_t i) const {
    const Edge& e = edges_[i];
    return labels_[e.tail] + "->" + labels_[e.head] + "#" + std::to_string(e.parallel);
}

int Network::find_edge(const std::string& tail, const std::string& head, int parallel) const {
    int t = node_index(tail), h = node_index(head);
    if (t < 0 || h < 0) return -1;
    for (int ei : out_[t]) {
        if (edges_[ei].head == h && edges_[ei].parallel == parallel) return ei;
    }
    return -1;
}

int Network::find_edge(const std::string& name) const {
    auto arrow = name.find("->");
    if (arrow == std::string::npos) return -1;
    auto hashpos = name.rfind('#');
    std::string tail = name.substr(0, arrow);
    std::string head;
    int parallel = 0;
    if (hashpos == std::string::npos || hashpos < arrow) {
        head = name.substr(arrow + 2);
    } else {
        head = name.substr(arrow + 2, hashpos - arrow - 2);
        parallel = std::stoi(name.substr(hashpos + 1));
    }
    return find_edge(tail, head, parallel);
}

bool Network::operator==(const Network& o) const {
    if (labels_.size() != o.labels_.size() || edges_.size() != o.edges_.size()) return false;
    if (label(source_) != o.label(o.source_) || label(receiver_) != o.label(o.receiver_)) {
        return false;
    }
    std::set<std::string> a, b;
    for (const auto& l : labels_) a.insert(l);
    for (const auto& l : o.labels_) b.insert(l);
    if (a != b) return false;
    std::set<std::tuple<std::string, std::string, int>> ea, eb;
    for (const Edge& e : edges_) ea.insert({labels_[e.tail], labels_[e.head], e.parallel});
    for (const Edge& e : o.edges_) eb.insert({o.labels_[e.tail], o.labels_[e.head], e.parallel});
    return ea == eb;
}

int min_cut(const Network& net) {
    FlowGraph g(static_cast<int>(net.node_count()));
    for (const Edge& e : net.edges()) g.add_arc(e.tail, e.head, 1);
    return g.max_flow(net.source(), net.receiver());
}

int flow_rank(const Network& net, const std::vector<int>& edge_set) {
    std::vector<int> set = dedupe_sorted(edge_set);
    if (set.empty()) return 0;
    int n = static_cast<int>(net.node_count());
    int mids = static_cast<int>(set.size());
    int super = n + mids;
    FlowGraph g(super + 1);
    std::vector<char> split(net.edge_count(), 0);
    for (int i = 0; i < mids; ++i) {
        int ei = set[i];
        if (ei < 0 || ei >= static_cast<int>(net.edge_count())) {
            throw UsageError("flow_rank: edge index out of range");
        }
        split[ei] = 1;
        const Edge& e = net.edge(ei);
        g.add_arc(e.tail, n + i, 1); // upstream half
        g.add_arc(n + i, e.head, 1); // downstream half
        g.add_arc(super, n + i, 1);  // forced entry
    }
    for (std::size_t ei = 0; ei < net.edge_count(); ++ei) {
        if (!split[ei]) g.add_arc(net.edge(ei).tail, net.edge(ei).head, 1);
    }
    return g.max_flow(super, net.receiver());
}

int source_flow_rank(const Network& net, const std::vector<int>& edge_set) {
    std::vector<int> set = dedupe_sorted(edge_set);
    if (set.empty()) return 0;
    int n = static_cast<int>(net.node_count());
    int mids = static_cast<int>(set.size());
    int sink = n + mids;
    FlowGraph g(sink + 1);
    std::vector<char> split(net.edge_count(), 0);
    for (int i = 0; i < mids; ++i) {
        int ei = set[i];
        if (ei < 0 || ei >= static_cast<int>(net.edge_count())) {
            throw UsageError("source_flow_rank: edge index out of range");
        }
        split[ei] = 1;
        const Edge& e = net.edge(ei);
        g.add_arc(e.tail, n + i, 1);
        g.add_arc(n + i, e.head, 1);
        g.add_arc(n + i, sink, 1);
    }
    for (std::size_t ei = 0; ei < net.edge_count(); ++ei) {
        if (!split[ei]) g.add_arc(net.edge(ei).tail, net.edge(ei).head, 1);
    }
    return g.max_flow(net.source(), sink);
}

bool flow_independent(const Network& net, const std::vector<std::vector<int>>& sets) {
    std::vector<int> all;
    int sum = 0;
    for (const auto& s : sets) {
        sum += flow_rank(net, s);
        all.insert(all.end(), s.begin(), s.end());
    }
    return flow_rank(net, all) == sum;
}

std::vector<int> extended_set_ordered(const Network& net, const std::vector<int>& edge_set,
                                      const std::vector<int>& scan_order) {
    std::vector<int> result = dedupe_sorted(edge_set);
    if (result.empty()) return {};
    int base = flow_rank(net, result);
    std::vector<char> member(net.edge_count(), 0);
    for (int e : result) member[e] = 1;
    bool changed = true;
    while (changed) {
        changed = false;
        for (int e : scan_order) {
            if (member[e]) continue;
            std::vector<int> probe = result;
            probe.push_back(e);
            if (flow_rank(net, probe) == base) {
                result.push_back(e);
                member[e] = 1;
                changed = true;
            }
        }
    }
    return dedupe_sorted(result);
}

std::vector<int> extended_set(const Network& net, const std::vector<int>& edge_set) {
    std::vector<int> order(net.edge_count());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    return extended_set_ordered(net, edge_set, order);
}

ProfileCheck check_profile(const Network& net, const ConnectivityProfile& profile) {
    ProfileCheck out;
    for (int v = 0; v < static_cast<int>(net.node_count()); ++v) {
        if (v == net.source() || v == net.receiver()) continue;
        int od = static_cast<int>(net.out_edges(v).size());
        int id = static_cast<int>(net.in_edges(v).size());
        if (od < profile.min_out_degree) {
            out.ok = false;
            out.violations.push_back("node " + net.label(v) + " out-degree " +
                                     std::to_string(od) + " < " +
                                     std::to_string(profile.min_out_degree));
        }
        if (id < profile.min_in_degree) {
            out.ok = false;
            out.violations.push_back("node " + net.label(v) + " in-degree " +
                                     std::to_string(id) + " < " +
                                     std::to_string(profile.min_in_degree));
        }
    }
    return out;
}

Network random_network(const NetworkParams& params, Rng& rng) {
    int m = params.nodes - 2;
    int c = params.capacity;
    if (params.nodes < 2 || c < 1) throw UsageError("random_network: need >= 2 nodes, C >= 1");
    int min_out = std::max(1, params.profile.min_out_degree);
    int min_in = std::max(1, params.profile.min_in_degree);
    if (m > 0 && (min_out > c || min_in > c)) {
        throw GenerationError("random_network: profile degrees exceed capacity C=" +
                              std::to_string(c));
    }

    std::vector<std::string> labels;
    labels.push_back("s");
    for (int i = 1; i <= m; ++i) labels.push_back("v" + std::to_string(i));
    labels.push_back("r");

    for (int attempt = 0; attempt < params.max_retries; ++attempt) {
        std::vector<Edge> edges;
        auto add_edge = [&](int t, int h) {
            int par = 0;
            for (const Edge& e : edges) {
                if (e.tail == t && e.head == h) par = std::max(par, e.parallel + 1);
            }
            edges.push_back({t, h, par});
        };

        if (m == 0) {
            for (int i = 0; i < c; ++i) add_edge(0, 1);
            return Network::build(labels, edges, "s", "r", true);
        }

        int s = 0, r = m + 1; // internal nodes are 1..m
        std::vector<int> want_out(m + 2, 0), to_r(m + 2, 0);
        for (int i = 1; i <= m; ++i) {
            want_out[i] = min_out + static_cast<int>(rng.below(params.max_extra_out + 1));
        }
        // The last internal node can only point at r; it takes that many of
        // r's C incoming slots, the rest are spread over the others.
        want_out[m] = std::min(want_out[m], c);
        if (m == 1) want_out[1] = c;
        to_r[m] = want_out[m];
        int remaining = c - to_r[m];
        for (int k = 0; k < remaining; ++k) {
            int i = 1 + static_cast<int>(rng.below(m - 1 > 0 ? m - 1 : 1));
            to_r[i] += 1;
        }
        for (int i = 1; i < m; ++i) want_out[i] = std::max(want_out[i], to_r[i]);

        std::vector<int> indeg(m + 2, 0);
        for (int i = 1; i <= m; ++i) {
            for (int k = 0; k < to_r[i]; ++k) add_edge(i, r);
            int forward = want_out[i] - to_r[i]; // zero for the last internal node
            for (int k = 0; k < forward; ++k) {
                int j = i + 1 + static_cast<int>(rng.below(m - i));
                add_edge(i, j);
                indeg[j] += 1;
            }
        }
        // Top up in-degrees. Only the source can feed v1.
        for (int i = 2; i <= m; ++i) {
            while (indeg[i] < min_in) {
                int j = 1 + static_cast<int>(rng.below(i - 1));
                add_edge(j, i);
                indeg[i] += 1;
            }
        }
        int s_budget = c;
        int need_v1 = min_in;
        if (need_v1 > s_budget) continue;
        for (int k = 0; k < need_v1; ++k) add_edge(s, 1);
        s_budget -= need_v1;
        indeg[1] += need_v1;
        for (int k = 0; k < s_budget; ++k) {
            int i = 1 + static_cast<int>(rng.below(m));
            add_edge(s, i);
            indeg[i] += 1;
        }

        try {
            Network net = Network::build(labels, edges, "s", "r", true);
            if (!check_profile(net, params.profile).ok) continue;
            return net;
        } catch (const UsageError&) {
            continue;
        }
    }
    throw GenerationError("random_network: no feasible network after " +
                          std::to_string(params.max_retries) + " attempts");
}

Network read_network(std::istream& in, bool strict) {
    std::vector<std::string> labels;
    std::set<std::string> label_set;
    std::vector<std::tuple<std::string, std::string, int>> raw_edges;
    std::map<std::pair<std::string, std::string>, int> auto_parallel;
    std::string source, receiver, line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        std::istringstream ls(line);
        std::string kw;
        if (!(ls >> kw)) continue;
        if (kw == "node") {
            std::string l;
            if (!(ls >> l)) throw UsageError("network file: node line missing label");
            if (label_set.insert(l).second) labels.push_back(l);
        } else if (kw == "edge") {
            std::string t, h;
            if (!(ls >> t >> h)) throw UsageError("network file: edge line needs tail and head");
            int k;
            if (!(ls >> k)) k = auto_parallel[{t, h}];
            auto_parallel[{t, h}] = k + 1;
            raw_edges.emplace_back(t, h, k);
        } else if (kw == "source") {
            if (!(ls >> source)) throw UsageError("network file: source line missing label");
        } else if (kw == "receiver") {
            if (!(ls >> receiver)) throw UsageError("network file: receiver line missing label");
        } else {
            throw UsageError("network file: unknown keyword '" + kw + "'");
        }
    }
    if (source.empty() || receiver.empty()) {
        throw UsageError("network file: source and receiver are required");
    }
    std::map<std::string, int> index;
    for (std::size_t i = 0; i < labels.size(); ++i) index[labels[i]] = static_cast<int>(i);
    std::vector<Edge> edges;
    for (const auto& [t, h, k] : raw_edges) {
        auto ti = index.find(t), hi = index.find(h);
        if (ti == index.end()) throw UsageError("network file: undeclared node " + t);
        if (hi == index.end()) throw UsageError("network file: undeclared node " + h);
        edges.push_back({ti->second, hi->second, k});
    }
    return Network::build(labels, edges, source, receiver, strict);
}

void write_network(std::ostream& out, const Network& net) {
    for (const auto& l : net.labels()) out << "node " << l << "\n";
    out << "source " << net.label(net.source()) << "\n";
    out << "receiver " << net.label(net.receiver()) << "\n";
    for (const Edge& e : net.edges()) {
        out << "edge " << net.label(e.tail) << " " << net.label(e.head) << " " << e.parallel
            << "\n";
    }
}

Network read_network_file(const std::string& path, bool strict) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open network file: " + path);
    return read_network(in, strict);
}

void write_network_file(const std::string& path, const Network& net) {
    std::ofstream out(path);
    if (!out) throw UsageError("cannot write network file: " + path);
    write_network(out, net);
}

} // namespace nct
