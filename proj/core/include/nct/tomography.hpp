#ifndef NCT_TOMOGRAPHY_HPP
#define NCT_TOMOGRAPHY_HPP

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "nct/channel.hpp"
#include "nct/codes.hpp"
#include "nct/matrix.hpp"
#include "nct/network.hpp"

namespace nct {

/// Deduplicated one-dimensional subspaces harvested from trace pairs, with
/// the (i, j) pairs that produced each line.
class CandidateLines {
  public:
    void add(const LineRep& line, std::pair<int, int> provenance);
    bool contains(const LineRep& line) const { return lines_.count(line) > 0; }
    std::size_t size() const { return lines_.size(); }
    const std::set<LineRep>& lines() const { return lines_; }
    const std::vector<std::pair<int, int>>& provenance(const LineRep& line) const;

  private:
    std::set<LineRep> lines_;
    std::map<LineRep, std::vector<std::pair<int, int>>> provenance_;
};

/// What the receiver knows about its own neighborhood: its label, the
/// source label, and its in-edges as (tail label, parallel index) in row
/// order. Everything here is receiver-observable.
struct ReceiverLocality {
    std::string source;
    std::string receiver;
    std::vector<std::pair<std::string, int>> in_edges;
    int max_parallel = 1; // parallel indices to scan when proposing edges

    int capacity() const { return static_cast<int>(in_edges.size()); }
};

struct TomographyCaps {
    std::size_t max_candidate_graphs = 1u << 20; // graph enumeration budget
    std::size_t max_support_subsets = 2000000;   // minimal-explanation search budget
};

/// An edge named by labels rather than indices, for algorithms that run
/// without a known topology.
struct EdgeRef {
    std::string tail, head;
    int parallel = 0;

    bool operator<(const EdgeRef& o) const {
        return std::tie(tail, head, parallel) < std::tie(o.tail, o.head, o.parallel);
    }
    bool operator==(const EdgeRef& o) const {
        return tail == o.tail && head == o.head && parallel == o.parallel;
    }
};

struct TomographyReport {
    std::string kind; // "topology" | "edge-set" | "lines"
    std::string algorithm;
    std::vector<std::string> recovered_edges;
    std::optional<Network> recovered_network;
    std::map<std::string, double> diagnostics;
    bool success = false; // meaningful only when ground truth was available
};

/// All rank-one pairwise intersections of the column spaces of per-trace
/// error matrices, canonicalized and deduplicated.
CandidateLines find_irv(const std::vector<FieldMatrix>& error_matrices);

/// Erasure variant: feeds pairwise header differences Y(i)_h - Y(j)_h of
/// the received matrices through the same intersection machinery.
CandidateLines find_irv_erasure(const std::vector<FieldMatrix>& received);

/// Fraction of trace pairs whose error-matrix column spaces intersect only
/// in {0}; an estimate of how often independent generations stay
/// flow-independent, used to size the number of generations.
double estimate_dependence(const std::vector<FieldMatrix>& error_matrices);

/// Grow the topology from the receiver outward: starting from the known
/// in-edges, repeatedly propose incoming edges (u, v, k) for nodes already
/// placed, compute the IRV the codebook would give that edge, and accept it
/// when its line is among the candidates. Accepted edges trigger a full IRV
/// recomputation. Returns the fixpoint graph (strict when it validates,
/// otherwise partial).
Network find_topo(const CandidateLines& candidates, const Codebook& cb,
                  const std::vector<std::string>& node_labels, const ReceiverLocality& rloc);

/// Pick the candidate graph whose transform matrix is within rank z of the
/// polluted transform T_e. With an explicit candidate list the given order
/// is respected; otherwise all graphs over the node labels satisfying the
/// profile are enumerated (edge count, then lexicographic edge list),
/// subject to caps.
Network topo_adv_rlnc(const FieldMatrix& transfer_polluted, const Codebook& cb,
                      const std::vector<std::string>& node_labels, int z,
                      const std::vector<Network>* explicit_candidates,
                      const ConnectivityProfile& profile, const ReceiverLocality& rloc,
                      const TomographyCaps& caps = {});

/// Minimal-cardinality IRV explanations, one per independent column of the
/// error matrix, united. Exact recovery needs every 2z edges of the network
/// flow-independent.
std::vector<int> locate_adversary_rlnc(const FieldMatrix& error_mat, const Network& net,
                                       const IrvTable& irv, int z_max,
                                       const TomographyCaps& caps = {});

/// Every edge whose IRV lies in the column space of the payload residue;
/// equals the extended set of the failing edges with high probability.
std::vector<int> locate_random_rlnc(const FieldMatrix& error_mat_payload, const Network& net,
                                    const IrvTable& irv);

/// Sparse-decode each column of L = Phi(In(r), d) Y - X_d against the
/// parity spec over all node-pair ids; exact under distinct ids when the
/// corrupted edge count is at most d/2. Throws ModelViolationError when a
/// column does not decode.
std::vector<EdgeRef> locate_adversary_rs(const FieldMatrix& x, const FieldMatrix& y,
                                         const IdTable& ids, int d,
                                         const ReceiverLocality& rloc);

/// Random-error variant: every node pair whose depth-d power column lies in
/// col(L).
std::vector<EdgeRef> locate_random_rs(const FieldMatrix& x, const FieldMatrix& y,
                                      const IdTable& ids, int d, const ReceiverLocality& rloc);

/// Topology from repeated failures: for each rank-one pairwise intersection
/// <h> of error-matrix column spaces, accept the node pair whose id equals
/// h2/h1 where [h1, h2]^T = Phi(In(r), 2) h. Candidates with h1 = 0 are
/// skipped and counted.
std::vector<EdgeRef> find_topo_rs(const std::vector<FieldMatrix>& error_matrices,
                                  const IdTable& ids, const ReceiverLocality& rloc,
                                  std::size_t* skipped_zero_ratio = nullptr);

/// Erasure localization on the full error matrix Y - T X.
std::vector<int> locate_erasures(const FieldMatrix& y, const FieldMatrix& x, const Network& net,
                                 const IrvTable& irv);

/// Delay localization: the delayed-packet matrix plays the erasure matrix.
std::vector<int> locate_delays(const FieldMatrix& delayed_mat, const Network& net,
                               const IrvTable& irv);

} // namespace nct

#endif
