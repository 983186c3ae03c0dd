#ifndef NCT_NETWORK_HPP
#define NCT_NETWORK_HPP

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "nct/field.hpp"

namespace nct {

/// Directed edge (tail, head, parallel index). Node values are indices into
/// the owning network's label table; parallel edges between the same node
/// pair are distinguished by `parallel`.
struct Edge {
    int tail = -1;
    int head = -1;
    int parallel = 0;

    bool operator==(const Edge& o) const {
        return tail == o.tail && head == o.head && parallel == o.parallel;
    }
};

/// Degree requirements a network must meet for a tomography scheme to apply.
struct ConnectivityProfile {
    enum class Kind { Weak, Strong, LocateAdv };

    Kind kind = Kind::Weak;
    int min_out_degree = 2;
    int min_in_degree = 1;
    int z = 0; // failure budget the profile was built for, when applicable

    /// Every internal node has out-degree >= 2.
    static ConnectivityProfile weak();
    /// Every internal node has in- and out-degree >= 2z+1.
    static ConnectivityProfile strong(int z);
    /// Every internal node has out-degree >= 2z; with acyclicity this makes
    /// every set of 2z edges flow-independent.
    static ConnectivityProfile locate_adv(int z);
    /// Explicit degree floors (used e.g. to force min out-degree d).
    static ConnectivityProfile degrees(int min_out, int min_in);
};

/// Acyclic network with a single source and receiver. Edge capacities are
/// one symbol per use; bigger capacities are modeled as parallel edges.
/// Immutable once built.
class Network {
  public:
    /// Strict construction enforces: acyclicity, source first / receiver
    /// last in some topological order, every node reaches the receiver, and
    /// out-degree(source) == in-degree(receiver) == min-cut == capacity.
    /// Non-strict (used for partially recovered graphs) checks acyclicity
    /// only.
    static Network build(std::vector<std::string> labels, std::vector<Edge> edges,
                         const std::string& source, const std::string& receiver,
                         bool strict = true);

    std::size_t node_count() const { return labels_.size(); }
    std::size_t edge_count() const { return edges_.size(); }
    const std::vector<Edge>& edges() const { return edges_; }
    const Edge& edge(std::size_t i) const { return edges_[i]; }

    int source() const { return source_; }
    int receiver() const { return receiver_; }
    int capacity() const { return capacity_; } // min-cut, when strict

    const std::string& label(int node) const { return labels_[node]; }
    const std::vector<std::string>& labels() const { return labels_; }
    int node_index(const std::string& label) const; // -1 when absent

    /// Edge indices leaving / entering a node, in edge-list order. The
    /// in-edges of the receiver fix the row order of everything the
    /// receiver observes.
    const std::vector<int>& out_edges(int node) const { return out_[node]; }
    const std::vector<int>& in_edges(int node) const { return in_[node]; }

    /// Nodes in a topological order (source first, receiver last).
    const std::vector<int>& topo_order() const { return topo_; }

    bool strict() const { return strict_; }

    std::string edge_name(std::size_t i) const;
    /// Parses "tail->head#k" against this network's labels; -1 if unknown.
    int find_edge(const std::string& name) const;
    int find_edge(const std::string& tail, const std::string& head, int parallel) const;

    bool operator==(const Network& o) const;

  private:
    Network() = default;

    std::vector<std::string> labels_;
    std::map<std::string, int> index_;
    std::vector<Edge> edges_;
    std::vector<std::vector<int>> out_, in_;
    std::vector<int> topo_;
    int source_ = -1;
    int receiver_ = -1;
    int capacity_ = 0;
    bool strict_ = true;
};

/// Unit-capacity max-flow from source to receiver.
int min_cut(const Network& net);

/// Max-flow to the receiver when each edge of `edge_set` must be the first
/// hop of its flow path: every listed edge is split at a midpoint fed by a
/// virtual unit-capacity source edge.
int flow_rank(const Network& net, const std::vector<int>& edge_set);

/// Upstream analog: max-flow from the source where each listed edge drains
/// into a virtual sink, i.e. the number of edge-disjoint source paths that
/// can be pushed through the listed edges.
int source_flow_rank(const Network& net, const std::vector<int>& edge_set);

/// flow_rank(union) == sum of flow_rank(parts).
bool flow_independent(const Network& net, const std::vector<std::vector<int>>& sets);

/// The unique maximal superset of `edge_set` with the same flow rank.
std::vector<int> extended_set(const Network& net, const std::vector<int>& edge_set);
/// Same, scanning candidate edges in the given order (order must not matter;
/// exposed for the property test that checks exactly that).
std::vector<int> extended_set_ordered(const Network& net, const std::vector<int>& edge_set,
                                      const std::vector<int>& scan_order);

struct ProfileCheck {
    bool ok = true;
    std::vector<std::string> violations;
};

ProfileCheck check_profile(const Network& net, const ConnectivityProfile& profile);

struct NetworkParams {
    int nodes = 6;     // total, including source and receiver
    int capacity = 2;  // C
    ConnectivityProfile profile = ConnectivityProfile::weak();
    int max_extra_out = 1; // random extra out-edges per internal node
    int max_retries = 400;
};

/// Random layered DAG satisfying the profile; deterministic per rng state.
Network random_network(const NetworkParams& params, Rng& rng);

/// Text format: "node <label>", "edge <tail> <head> [k]", "source <label>",
/// "receiver <label>", '#' comments.
Network read_network(std::istream& in, bool strict = true);
void write_network(std::ostream& out, const Network& net);
Network read_network_file(const std::string& path, bool strict = true);
void write_network_file(const std::string& path, const Network& net);

} // namespace nct

#endif
