// Command-line front end: simulate generations, run the estimation and
// localization algorithms over trace bundles or multi-trial experiments,
// generate network fixtures, and run the acceptance suites.

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>

#include "CLI11.hpp"

#include "nct/errors.hpp"
#include "nct/harness.hpp"
#include "nct/network.hpp"
#include "nct/suites.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitModelViolation = 2;
constexpr int kExitScaleCap = 3;

std::ostream& open_out(std::ofstream& file, const std::string& path) {
    if (path.empty()) return std::cout;
    file.open(path);
    if (!file) throw nct::UsageError("cannot open output file: " + path);
    return file;
}

nct::ExperimentConfig load_config(const std::string& path, std::uint64_t seed_override,
                                  bool has_seed) {
    nct::ExperimentConfig cfg =
        path.empty() ? nct::ExperimentConfig{} : nct::parse_config_file(path);
    if (has_seed) cfg.seed = seed_override;
    return cfg;
}

std::vector<nct::Network> load_candidates(const std::string& list_path) {
    std::ifstream in(list_path);
    if (!in) throw nct::UsageError("cannot open candidate list: " + list_path);
    std::vector<nct::Network> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        out.push_back(nct::read_network_file(line));
    }
    if (out.empty()) throw nct::UsageError("candidate list is empty: " + list_path);
    return out;
}

struct AlgArgs {
    std::string alg;
    std::string config_path;
    std::string traces_path;
    std::string candidates_path;
    std::string out_path;
    std::string format = "text";
    std::uint64_t seed = 0;
    bool has_seed = false;
    bool timings = false;
};

// Algorithms run either over a recorded trace bundle or, with a config, as
// a seeded multi-trial experiment.
int run_alg_command(const AlgArgs& args, const std::string& experiment_name) {
    std::ofstream file;
    std::ostream& out = open_out(file, args.out_path);
    if (!args.traces_path.empty()) {
        std::ifstream in(args.traces_path);
        if (!in) throw nct::UsageError("cannot open trace bundle: " + args.traces_path);
        nct::TraceBundle bundle = nct::read_bundle(in);
        nct::TomographyCaps caps;
        if (!args.config_path.empty()) {
            nct::ExperimentConfig cfg = nct::parse_config_file(args.config_path);
            caps.max_candidate_graphs = cfg.max_candidate_graphs;
            caps.max_support_subsets = cfg.max_support_subsets;
        }
        std::vector<nct::Network> candidates;
        const std::vector<nct::Network>* cand_ptr = nullptr;
        if (!args.candidates_path.empty()) {
            candidates = load_candidates(args.candidates_path);
            cand_ptr = &candidates;
        }
        nct::TomographyReport report = nct::run_on_bundle(bundle, args.alg, caps, cand_ptr);
        nct::write_report(out, report, args.format);
        return kExitOk;
    }
    nct::ExperimentConfig cfg = load_config(args.config_path, args.seed, args.has_seed);
    cfg.experiment = experiment_name;
    nct::ExperimentResult result = nct::run_experiment(cfg);
    nct::write_records(out, result, args.format, args.timings);
    return kExitOk;
}

std::string experiment_for(const std::string& subcommand, const std::string& alg) {
    if (subcommand == "locate") {
        if (alg == "adversary-rlnc") return "locate-adversary-rlnc";
        if (alg == "random-rlnc") return "locate-random-rlnc";
        if (alg == "adversary-rs") return "locate-adversary-rs";
        if (alg == "random-rs") return "locate-random-rs";
        if (alg == "erasures") return "erasure-locate";
        if (alg == "delays") return "delay-locate";
        throw nct::UsageError("unknown locate algorithm: " + alg);
    }
    if (alg == "rand-rlnc") return "topo-random-rlnc";
    if (alg == "adv-rlnc") return "topo-adv-rlnc";
    if (alg == "rs") return "find-topo-rs";
    if (alg == "irv" || alg == "irv-erasure") {
        throw nct::UsageError("algorithm " + alg + " runs over --traces only");
    }
    throw nct::UsageError("unknown topo algorithm: " + alg);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Linear-network-coding tomography simulator"};
    app.require_subcommand(1);

    AlgArgs sim;
    bool no_ground_truth = false;
    auto* simulate = app.add_subcommand("simulate", "emit generation traces for a config");
    simulate->add_option("--config", sim.config_path, "experiment config file");
    simulate->add_option("--seed", sim.seed, "master seed override")
        ->each([&](const std::string&) { sim.has_seed = true; });
    simulate->add_option("--out", sim.out_path, "output file (default stdout)");
    simulate->add_flag("--no-ground-truth", no_ground_truth,
                       "omit the test-only ground-truth sections");

    AlgArgs gen;
    bool gen_check = false;
    auto* gen_net = app.add_subcommand("gen-net", "generate a network fixture");
    gen_net->add_option("--config", gen.config_path, "experiment config file");
    gen_net->add_option("--seed", gen.seed, "master seed override")
        ->each([&](const std::string&) { gen.has_seed = true; });
    gen_net->add_option("--out", gen.out_path, "output file (default stdout)");
    gen_net->add_flag("--check", gen_check, "also verify the connectivity profile");

    AlgArgs topo;
    auto* topo_cmd = app.add_subcommand("topo", "topology estimation algorithms");
    topo_cmd->add_option("--alg", topo.alg, "rand-rlnc | adv-rlnc | rs | irv | irv-erasure")
        ->required();
    topo_cmd->add_option("--traces", topo.traces_path, "trace bundle to consume");
    topo_cmd->add_option("--config", topo.config_path, "experiment config file");
    topo_cmd->add_option("--candidates", topo.candidates_path,
                         "file listing candidate network files (adv-rlnc)");
    topo_cmd->add_option("--seed", topo.seed, "master seed override")
        ->each([&](const std::string&) { topo.has_seed = true; });
    topo_cmd->add_option("--out", topo.out_path, "output file (default stdout)");
    topo_cmd->add_option("--format", topo.format, "text | json-lines");
    topo_cmd->add_flag("--timings", topo.timings, "include timings in records");

    AlgArgs loc;
    auto* locate_cmd = app.add_subcommand("locate", "failure localization algorithms");
    locate_cmd
        ->add_option("--alg", loc.alg,
                     "adversary-rlnc | random-rlnc | adversary-rs | random-rs | erasures | delays")
        ->required();
    locate_cmd->add_option("--traces", loc.traces_path, "trace bundle to consume");
    locate_cmd->add_option("--config", loc.config_path, "experiment config file");
    locate_cmd->add_option("--seed", loc.seed, "master seed override")
        ->each([&](const std::string&) { loc.has_seed = true; });
    locate_cmd->add_option("--out", loc.out_path, "output file (default stdout)");
    locate_cmd->add_option("--format", loc.format, "text | json-lines");
    locate_cmd->add_flag("--timings", loc.timings, "include timings in records");

    std::string bench_suite = "all";
    std::string bench_out;
    std::uint64_t bench_seed = 20260809;
    auto* bench = app.add_subcommand("bench", "acceptance suites");
    bench->add_option("--suite", bench_suite, "suite name or 'all'");
    bench->add_option("--seed", bench_seed, "suite seed");
    bench->add_option("--out", bench_out, "output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (simulate->parsed()) {
            nct::ExperimentConfig cfg = load_config(sim.config_path, sim.seed, sim.has_seed);
            nct::TraceBundle bundle = nct::simulate_bundle(cfg);
            std::ofstream file;
            std::ostream& out = open_out(file, sim.out_path);
            nct::write_bundle(out, bundle, !no_ground_truth);
            return kExitOk;
        }
        if (gen_net->parsed()) {
            nct::ExperimentConfig cfg = load_config(gen.config_path, gen.seed, gen.has_seed);
            nct::NetworkParams params;
            params.nodes = cfg.nodes;
            params.capacity = cfg.capacity;
            params.profile = cfg.connectivity();
            nct::Rng rng(nct::trial_seed(cfg.seed, 0));
            nct::Network net = nct::random_network(params, rng);
            std::ofstream file;
            std::ostream& out = open_out(file, gen.out_path);
            nct::write_network(out, net);
            if (gen_check) {
                nct::ProfileCheck pc = nct::check_profile(net, params.profile);
                out << "# profile " << (pc.ok ? "ok" : "violated") << "\n";
                for (const auto& v : pc.violations) out << "# violation " << v << "\n";
            }
            return kExitOk;
        }
        if (topo_cmd->parsed()) {
            if (!topo.traces_path.empty() &&
                (topo.alg == "irv" || topo.alg == "irv-erasure" || topo.alg == "rand-rlnc" ||
                 topo.alg == "rs" || topo.alg == "adv-rlnc")) {
                return run_alg_command(topo, "");
            }
            return run_alg_command(topo, experiment_for("topo", topo.alg));
        }
        if (locate_cmd->parsed()) {
            if (!loc.traces_path.empty()) return run_alg_command(loc, "");
            return run_alg_command(loc, experiment_for("locate", loc.alg));
        }
        if (bench->parsed()) {
            std::ofstream file;
            std::ostream& out = open_out(file, bench_out);
            std::vector<nct::suites::SuiteResult> results;
            if (bench_suite == "all") {
                results = nct::suites::run_all(bench_seed);
            } else {
                results.push_back(nct::suites::run_suite(bench_suite, bench_seed));
            }
            bool all_ok = true;
            for (const auto& r : results) {
                out << (r.passed ? "[PASS] " : "[FAIL] ") << r.name << ": " << r.detail
                    << " (" << r.seconds << "s";
                if (r.limit_seconds > 0) out << " / " << r.limit_seconds << "s budget";
                out << ")\n";
                all_ok = all_ok && r.passed;
            }
            out << (all_ok ? "all suites passed" : "some suites FAILED") << "\n";
            return all_ok ? kExitOk : kExitModelViolation;
        }
    } catch (const nct::ScaleCapError& e) {
        std::cerr << "scale error: " << e.what() << "\n";
        return kExitScaleCap;
    } catch (const nct::ModelViolationError& e) {
        std::cerr << "model violation: " << e.what() << "\n";
        return kExitModelViolation;
    } catch (const nct::AttackInfeasibleError& e) {
        std::cerr << "model violation: " << e.what() << "\n";
        return kExitModelViolation;
    } catch (const nct::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
