#ifndef NCT_CODES_HPP
#define NCT_CODES_HPP

#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "nct/matrix.hpp"
#include "nct/network.hpp"

namespace nct {

enum class CodebookKind { Weak, Strong };

/// Receiver-known per-node randomness from which every local coding
/// coefficient is drawn. Entries are a keyed deterministic expansion of the
/// seed, so any party holding the seed reproduces any entry on demand.
///
/// Weak kind: the coefficient from edge (u,v,i) to (v,w,j) is the single
/// entry keyed (v; u,w,i,j). Strong kind: it is the sum of entries keyed
/// (v; u,w,w',i,j,j') over the actual outgoing edges (v,w',j'), so removing
/// any outgoing edge of v perturbs all coefficients at v.
class Codebook {
  public:
    Codebook(CodebookKind kind, std::uint64_t seed, const Field& field);

    CodebookKind kind() const { return kind_; }
    std::uint64_t seed() const { return seed_; }
    Field field() const { return field_; }

    FieldElement weak_entry(const std::string& v, const std::string& u, const std::string& w,
                            int in_parallel, int out_parallel) const;
    FieldElement strong_entry(const std::string& v, const std::string& u, const std::string& w,
                              const std::string& w_other, int in_parallel, int out_parallel,
                              int other_parallel) const;
    /// Source mixing coefficient for the source edge toward `head` (parallel
    /// index `out_parallel`) applied to message row `row`.
    FieldElement source_entry(const std::string& head, int out_parallel, int row) const;

  private:
    FieldElement derive(const std::uint64_t* key, std::size_t n) const;

    CodebookKind kind_;
    std::uint64_t seed_;
    Field field_;
};

Codebook derive_codebook(CodebookKind kind, std::uint64_t seed, const Field& field);

/// Public node-pair identifiers: one nonzero element of GF(q) per ordered
/// node pair and parallel slot, pairwise distinct. Deterministic given
/// (seed, node labels, max_parallel): zero draws and collisions are
/// resampled with derived subkeys, so every party materializes the same
/// table. The enumeration order doubles as the column order of the sparse
/// parity-check matrix used for decoding.
class IdTable {
  public:
    struct PairRef {
        std::string tail, head;
        int parallel = 0;
    };

    IdTable(std::vector<std::string> node_labels, int max_parallel, std::uint64_t seed,
            const Field& field);

    std::uint64_t seed() const { return seed_; }
    Field field() const { return field_; }
    int max_parallel() const { return max_parallel_; }
    const std::vector<std::string>& node_labels() const { return labels_; }

    std::size_t universe_size() const { return universe_.size(); }
    const PairRef& pair_at(std::size_t idx) const { return universe_[idx]; }
    FieldElement id_at(std::size_t idx) const { return ids_[idx]; }

    int index_of(const std::string& u, const std::string& v, int parallel) const; // -1 if absent
    FieldElement id(const std::string& u, const std::string& v, int parallel) const;
    FieldElement edge_id(const Network& net, int edge_index) const;

    /// All ids in universe order (locator list for sparse decoding).
    const std::vector<FieldElement>& all_ids() const { return ids_; }

  private:
    std::vector<std::string> labels_;
    int max_parallel_;
    std::uint64_t seed_;
    Field field_;
    std::vector<PairRef> universe_;
    std::vector<FieldElement> ids_;
    std::map<std::tuple<std::string, std::string, int>, int> index_;
};

/// Power column [id, id^2, ..., id^depth]^T of a nonzero id.
FieldVector virv(FieldElement id, std::size_t depth);

/// Local coding coefficients for one network: beta(e, v, e') for every
/// adjacent edge pair, plus the source mixing matrix applied to the message
/// rows before they leave the source.
struct CodingAssignment {
    enum class Scheme { Rlnc, Nrsc, Manual };

    Scheme scheme = Scheme::Manual;
    Field field;
    std::map<std::pair<int, int>, FieldElement> beta; // (in edge, out edge) -> coefficient
    FieldMatrix source_mixing;                        // C x C

    FieldElement beta_at(int in_edge, int out_edge) const;
};

CodingAssignment assign_rlnc(const Network& net, const Codebook& cb);
CodingAssignment assign_nrsc(const Network& net, const IdTable& ids);

/// Hand-specified coefficients (worked examples, attacks on fixed nets).
CodingAssignment manual_assignment(const Network& net, const Field& field,
                                   std::map<std::pair<int, int>, FieldElement> beta,
                                   FieldMatrix source_mixing);

/// Impulse response vector theta(e) (response at the receiver to a unit
/// injection on e) and global encoding vector ghat(e) (the packet carried by
/// e is ghat(e) * X) for every edge.
struct IrvTable {
    Field field;
    std::vector<FieldVector> theta; // per edge, length C
    std::vector<FieldVector> ghat;  // per edge, length C
    std::vector<int> receiver_in;   // edge indices; fixes the receiver's row order
    std::vector<int> source_out;

    /// Theta(E'): columns are the IRVs of the given edges, in given order.
    FieldMatrix irm(const std::vector<int>& edge_set) const;
    /// Overall transform T with Y = T X on an error-free generation.
    FieldMatrix transfer() const;
};

IrvTable compute_irvs(const Network& net, const CodingAssignment& asg);

/// T via the source side: Theta(Out(s)) * S. Equal to IrvTable::transfer();
/// both routes are exercised by tests.
FieldMatrix transfer_matrix(const Network& net, const CodingAssignment& asg);

/// Text export: "beta <tail-edge> <node> <head-edge> <value>" lines plus
/// "smix <row> <col> <value>" lines for the source mixing matrix.
void write_assignment(std::ostream& out, const Network& net, const CodingAssignment& asg);

} // namespace nct

#endif
