#ifndef NCT_HARNESS_HPP
#define NCT_HARNESS_HPP

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nct/channel.hpp"
#include "nct/codes.hpp"
#include "nct/network.hpp"
#include "nct/tomography.hpp"

namespace nct {

enum class Scheme { RlncWeak, RlncStrong, Nrsc };

std::string to_string(Scheme s);
Scheme scheme_from_string(const std::string& s);

enum class ExperimentKind {
    LocateAdversaryRlnc,
    LocateRandomRlnc,
    LocateAdversaryRs,
    LocateRandomRs,
    TopoRandomRlnc,
    TopoAdvRlnc,
    FindTopoRs,
    ErasureLocate,
    ErasureIrv,
    DelayLocate,
};

std::string to_string(ExperimentKind k);
ExperimentKind experiment_from_string(const std::string& s);

/// Flat key-value experiment description; see parse_config for the file
/// syntax. validate() runs every cross-field compatibility check before a
/// single trial is allowed to start.
struct ExperimentConfig {
    std::uint32_t q = Field::kDefaultModulus;
    int nodes = 8;
    int capacity = 3;
    std::string profile = "weak"; // weak | strong | locate-adv | degrees
    int min_out_degree = -1;      // used by profile=degrees
    int min_in_degree = -1;
    Scheme scheme = Scheme::RlncWeak;
    std::string error = "random"; // none | random | adversarial | erasure-random |
                                  // erasure-adversarial | delay
    double p_f = -1.0;            // < 0 means "derive from capacity and edge count"
    int z = 1;
    int sparsity = 1;
    int n = 64;
    int t = 0; // 0 means "let the harness size it"
    int trials = 10;
    std::uint64_t seed = 1;
    int threads = 1;
    std::size_t max_candidate_graphs = 1u << 20;
    std::size_t max_support_subsets = 2000000;
    int max_parallel = 2;
    int candidate_count = 10; // decoy graphs for transform matching
    std::string experiment = "locate-random-rlnc";
    std::string network_file;
    bool audit_ground_truth = true;
    bool expose_topology = true; // copy the network into the receiver view of
                                 // trace bundles (localization needs it)

    ExperimentKind kind() const { return experiment_from_string(experiment); }
    ConnectivityProfile connectivity() const;
    void validate() const;
};

ExperimentConfig parse_config(std::istream& in);
ExperimentConfig parse_config_file(const std::string& path);

struct TrialRecord {
    int index = 0;
    std::uint64_t seed = 0;
    bool success = false;
    double millis = 0.0; // excluded from canonical serialization
    std::string detail;
    nlohmann::json payload; // deterministic: truth summary + outputs
};

struct ExperimentSummary {
    int trials = 0;
    int successes = 0;
    double total_millis = 0.0;
    std::map<std::string, double> diagnostics;

    double success_rate() const { return trials == 0 ? 0.0 : double(successes) / trials; }
};

struct ExperimentResult {
    std::vector<TrialRecord> records;
    ExperimentSummary summary;
};

ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// "text" or "json-lines". Timings are omitted unless asked for, so the
/// serialized records are a pure function of (config, seed).
void write_records(std::ostream& out, const ExperimentResult& result, const std::string& format,
                   bool include_timings = false);
void write_report(std::ostream& out, const TomographyReport& report, const std::string& format);

/// Everything one simulation run leaves behind: the receiver-observable
/// setup, per-generation traces, and (unless suppressed) ground truth.
struct TraceBundle {
    std::uint32_t q = Field::kDefaultModulus;
    int capacity = 0;
    int n = 0;
    Scheme scheme = Scheme::RlncWeak;
    std::string error_kind = "random";
    int z = 0;
    int rs_depth = 0; // d used by the sparse-decoding localizers
    std::uint64_t codebook_seed = 0;
    std::uint64_t id_seed = 0;
    int id_max_parallel = 1;
    std::vector<std::string> node_labels;
    ReceiverLocality rloc;
    std::optional<Network> known_network; // receiver-side topology, when exposed
    std::vector<GenerationTrace> traces;
    bool has_ground_truth = false;
    std::optional<Network> truth_network;
};

/// Run the configured simulation and collect its bundle.
TraceBundle simulate_bundle(const ExperimentConfig& cfg);

void write_bundle(std::ostream& out, const TraceBundle& bundle, bool include_ground_truth);
TraceBundle read_bundle(std::istream& in);

/// Run one algorithm against a trace bundle, emulating the receiver: only
/// the bundle's receiver view is consumed, plus the decoding layer stand-in
/// (which needs the ground-truth section). Algorithms: adversary-rlnc,
/// random-rlnc, adversary-rs, random-rs, erasures, delays, irv, irv-erasure,
/// rand-rlnc (topology), rs (topology), adv-rlnc (topology; needs explicit
/// candidates).
TomographyReport run_on_bundle(const TraceBundle& bundle, const std::string& algorithm,
                               const TomographyCaps& caps = {},
                               const std::vector<Network>* candidates = nullptr);

/// Derived per-trial seed; trials are independently replayable.
std::uint64_t trial_seed(std::uint64_t master_seed, int trial_index);

/// Receiver locality of a known network (its ports and label knowledge).
ReceiverLocality receiver_locality(const Network& net, int max_parallel);

std::vector<EdgeRef> edge_refs(const Network& net, const std::vector<int>& edges);

} // namespace nct

#endif
