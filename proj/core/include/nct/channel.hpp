#ifndef NCT_CHANNEL_HPP
#define NCT_CHANNEL_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nct/codes.hpp"
#include "nct/matrix.hpp"
#include "nct/network.hpp"

namespace nct {

/// What goes wrong during one generation. Edges are indices into the network
/// the model is built against.
struct ErrorModel {
    enum class Kind { None, Random, Adversarial, ErasureRandom, ErasureAdversarial, Delay };

    Kind kind = Kind::None;
    double edge_probability = 0.0;        // per-edge failure probability
    int sparsity = 1;                     // random symbol positions per error packet
    std::vector<int> edges;               // declared edges (adversarial kinds, delay)
    std::map<int, FieldVector> packets;   // adversarial injected packets
    FieldMatrix previous_message;         // message of the prior generation (delay)

    static ErrorModel none();
    static ErrorModel random_errors(double p_f, int sparsity = 1);
    static ErrorModel adversarial(std::map<int, FieldVector> packets);
    static ErrorModel erasure_random(double p_f);
    static ErrorModel erasure_adversarial(std::vector<int> edges);
    static ErrorModel delay(std::vector<int> edges, FieldMatrix previous_message);
};

/// Per-generation ground truth. Tomography code must never consume this;
/// see GroundTruthSeal.
struct GroundTruth {
    FieldMatrix X;
    std::vector<int> error_edges;        // edges whose injected packet was nonzero
    std::map<int, FieldVector> injected; // the nonzero packets
};

/// While any seal object is alive, GenerationTrace::truth() throws. The
/// harness seals traces for the duration of a tomography call so nothing on
/// that path can read ground truth; comparisons happen after unsealing.
class GroundTruthSeal {
  public:
    GroundTruthSeal();
    ~GroundTruthSeal();
    GroundTruthSeal(const GroundTruthSeal&) = delete;
    GroundTruthSeal& operator=(const GroundTruthSeal&) = delete;
    static bool sealed();
};

class GenerationTrace {
  public:
    GenerationTrace(FieldMatrix y, GroundTruth truth, ErrorModel::Kind model_kind,
                    std::string scheme, int generation)
        : Y(std::move(y)), generation(generation), scheme(std::move(scheme)),
          model_kind(model_kind), truth_(std::move(truth)) {}

    FieldMatrix Y;
    int generation = 0;
    std::string scheme;
    ErrorModel::Kind model_kind = ErrorModel::Kind::None;

    const GroundTruth& truth() const;

  private:
    GroundTruth truth_;
};

/// Message matrix [I_C | uniform payload]; requires n > C.
FieldMatrix make_message(std::size_t c, std::size_t n, const Field& f, Rng& rng);

/// One generation through the network: packets propagate in topological
/// order, each edge adds its model-determined packet, and the receiver
/// stacks what arrives on its in-edges.
GenerationTrace transmit(const Network& net, const CodingAssignment& asg, const FieldMatrix& x,
                         const ErrorModel& model, Rng& rng, int generation = 0,
                         const std::string& scheme = "manual");

/// Stand-in for the network error-correction layer: returns the true
/// message when the trace is within the correctable regime (2z+1 <= C
/// adversarial, z+1 <= C otherwise), nullopt when not.
std::optional<FieldMatrix> genie_decode(const GenerationTrace& trace);

/// Z_r = Y_m - Y_h M for a decoded message [I | M]; the receiver-observable
/// payload residue.
FieldMatrix error_matrix(const GenerationTrace& trace, const FieldMatrix& x_decoded);

/// Adversarial model on (a subset of) e1_set whose error matrix lies in the
/// span of the IRVs of e2_set, making the two sets indistinguishable to the
/// receiver. Throws AttackInfeasibleError when the spans only share {0}.
ErrorModel confusion_attack(const Network& net, const CodingAssignment& asg,
                            const std::vector<int>& e1_set, const std::vector<int>& e2_set,
                            const FieldMatrix& x);

/// Uniform nonzero packets on the given edges.
ErrorModel uniform_adversary(const std::vector<int>& edges, std::size_t n, const Field& f,
                             Rng& rng);

/// Header-targeted packet on one edge that aligns the polluted transform
/// toward a decoy transform (drops the rank distance by one where possible).
ErrorModel decoy_align_attack(const Network& net, const CodingAssignment& asg, int edge,
                              const FieldMatrix& transfer_true,
                              const FieldMatrix& transfer_decoy, std::size_t n, Rng& rng);

/// Zero-injection hiding: erase every input of a node so the receiver never
/// sees evidence the node exists.
ErrorModel hide_node(const Network& net, int node);

} // namespace nct

#endif
