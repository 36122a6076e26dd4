#include <cstdio>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "holoq/noise.hpp"
#include "holoq/oracle.hpp"
#include "holoq/pipeline.hpp"

namespace {

using namespace holoq;

constexpr int kExitConfig = 2;
constexpr int kExitPrecision = 3;
constexpr int kExitInternal = 4;

struct CliOptions {
  std::string config_path;
  std::string out_dir;  // overrides config when set
  std::uint64_t seed = 0;
  bool seed_set = false;
  int workers = 0;
};

RunConfig load_config(const CliOptions& opt) {
  RunConfig cfg = parse_config_file(opt.config_path);
  if (opt.seed_set) cfg.master_seed = opt.seed;
  if (!opt.out_dir.empty()) cfg.out_dir = opt.out_dir;
  return cfg;
}

int effective_workers(const CliOptions& opt) {
  if (opt.workers > 0) return opt.workers;
  const unsigned hc = std::thread::hardware_concurrency();
  return hc ? static_cast<int>(hc) : 1;
}

void check_manifest(const RunConfig& cfg) {
  const std::string path = cfg.out_dir + "/manifest.json";
  const std::uint64_t recorded = manifest_config_hash(read_text_file(path));
  if (recorded != config_hash(cfg)) {
    throw config_error("config mismatch: manifest in " + cfg.out_dir +
                       " was produced by a different configuration.\n--- current config ---\n" +
                       canonical_config(cfg));
  }
}

void write_manifest(const RunConfig& cfg, int workers, const std::vector<std::string>& outputs) {
  write_text_file(cfg.out_dir + "/manifest.json", manifest_json(cfg, workers, outputs));
}

int cmd_build(const CliOptions& opt) {
  const RunConfig cfg = load_config(opt);
  const BuildArtifacts art = build_artifacts(cfg);

  const auto validation = validate(art.holo);
  if (!validation.ok()) {
    std::cerr << "internal: scheduled circuit failed validation: "
              << validation.violations.front().message << "\n";
    return kExitInternal;
  }

  ensure_dir(cfg.out_dir);
  std::vector<std::string> outputs = {"circuit_holo.txt", "schedule.txt", "resources.txt"};
  write_circuit_file(art.holo, cfg.out_dir + "/circuit_holo.txt");
  write_text_file(cfg.out_dir + "/schedule.txt", schedule_report(art.scheduled.schedule));
  write_text_file(cfg.out_dir + "/resources.txt",
                  resource_report_text(art.resources, art.native));
  if (art.flat) {
    write_circuit_file(*art.flat, cfg.out_dir + "/circuit_flat.txt");
    outputs.push_back("circuit_flat.txt");
  }
  write_manifest(cfg, effective_workers(opt), outputs);

  std::cout << "qubits " << art.resources.qubits << " two_qubit_gates "
            << art.resources.two_qubit_gates << " measurements " << art.resources.measurements
            << " ms_native_tq " << art.native.ms_native_tq << "\n";
  return 0;
}

int cmd_simulate(const CliOptions& opt) {
  const RunConfig cfg = load_config(opt);
  const BuildArtifacts art = build_artifacts(cfg);
  const int workers = effective_workers(opt);
  const SimulationOutput sim = simulate_run(cfg, art.holo, workers);

  ensure_dir(cfg.out_dir);
  write_text_file(cfg.out_dir + "/shots.txt", serialize_shot_lines(sim.lines));
  write_text_file(cfg.out_dir + "/herald.txt", herald_stats_text(sim.herald, cfg.noise));
  write_circuit_file(art.holo, cfg.out_dir + "/circuit_holo.txt");
  write_manifest(cfg, workers, {"shots.txt", "herald.txt", "circuit_holo.txt"});

  std::cout << "shots " << sim.herald.shots << " heralded " << sim.herald.heralded
            << " discard_fraction " << sim.herald.discard_fraction << "\n";
  return 0;
}

int cmd_oracle(const CliOptions& opt) {
  const RunConfig cfg = load_config(opt);
  ensure_dir(cfg.out_dir);
  const CorrelatorTable table = theory_table(cfg);
  write_correlator_csv(table, cfg.out_dir + "/oracle.csv");
  write_correlator_csv(bin_symmetry(table), cfg.out_dir + "/oracle_binned.csv");
  if (cfg.bulk_compare) {
    const CorrelatorTable bulk = theory_table(cfg, /*left_pad_cells=*/8);
    write_correlator_csv(bulk, cfg.out_dir + "/oracle_bulk.csv");
    double max_diff = 0.0;
    for (const auto& e : table.entries) {
      for (const auto& b : bulk.entries)
        if (b.r == e.r && b.t == e.t) max_diff = std::max(max_diff, std::abs(b.value - e.value));
    }
    std::cout << "bulk_vs_window max |delta C| = " << max_diff << "\n";
  }
  std::cout << "oracle entries " << table.entries.size() << "\n";
  return 0;
}

int cmd_estimate(const CliOptions& opt) {
  const RunConfig cfg = load_config(opt);
  check_manifest(cfg);
  const auto lines = parse_shot_lines(read_text_file(cfg.out_dir + "/shots.txt"));

  std::vector<ShotLine> kept;
  bool filtered = false;
  for (const auto& l : lines) {
    if (l.herald < 0)
      kept.push_back(l);
    else {
      filtered = true;
      if (l.herald == 0) kept.push_back(l);
    }
  }
  const ShotMatrix matrix = ShotMatrix::from_lines(kept, cfg.two_L, filtered);
  const CorrelatorTable table = estimate_correlators(matrix, window_of(cfg), cfg.t);
  write_correlator_csv(table, cfg.out_dir + "/estimate.csv");
  write_correlator_csv(bin_symmetry(table), cfg.out_dir + "/estimate_binned.csv");
  std::cout << "kept " << kept.size() << " of " << lines.size() << " shots; entries "
            << table.entries.size() << "\n";
  return 0;
}

int cmd_compare(const CliOptions& opt) {
  const RunConfig cfg = load_config(opt);
  check_manifest(cfg);

  CorrelatorTable expt;
  try {
    expt = read_correlator_csv(cfg.out_dir + "/estimate.csv");
  } catch (const std::runtime_error&) {
    const int rc = cmd_estimate(opt);
    if (rc != 0) return rc;
    expt = read_correlator_csv(cfg.out_dir + "/estimate.csv");
  }
  CorrelatorTable theory;
  try {
    theory = read_correlator_csv(cfg.out_dir + "/oracle.csv");
  } catch (const std::runtime_error&) {
    theory = theory_table(cfg);
    write_correlator_csv(theory, cfg.out_dir + "/oracle.csv");
    write_correlator_csv(bin_symmetry(theory), cfg.out_dir + "/oracle_binned.csv");
  }

  const CompareSummary summary = compare_tables(expt, theory);
  write_text_file(cfg.out_dir + "/compare.csv", compare_csv(summary));
  write_text_file(cfg.out_dir + "/histogram.csv", histogram_csv(summary));
  write_text_file(cfg.out_dir + "/heatmap.csv",
                  heatmap_csv(bin_symmetry(expt), bin_symmetry(theory)));
  std::ostringstream sum;
  sum << "entries " << summary.total_entries << "\n";
  sum << "mean_epsilon " << summary.mean_epsilon << "\n";
  sum << "entries_within_3 " << summary.entries_within_3 << "\n";
  sum << "division_errors " << summary.errors.invalid_count << "\n";
  write_text_file(cfg.out_dir + "/summary.txt", sum.str());
  std::cout << sum.str();
  return 0;
}

int cmd_report(const CliOptions& opt, const std::string& reference_path) {
  const RunConfig cfg = load_config(opt);
  std::ostringstream os;
  os << "t qubits tq_ms reference_qubits reference_sq reference_tq\n";
  // Reference fixture rows: t qubits sq tq pct_leaked
  struct Ref {
    int t, qubits;
    long sq, tq;
    double leaked;
  };
  std::vector<Ref> refs;
  {
    std::istringstream is(read_text_file(reference_path));
    std::string line;
    while (std::getline(is, line)) {
      if (line.empty() || line[0] == '#') continue;
      std::istringstream ls(line);
      Ref r{};
      if (ls >> r.t >> r.qubits >> r.sq >> r.tq >> r.leaked) refs.push_back(r);
    }
  }
  bool qubits_match = true;
  for (const auto& ref : refs) {
    RunConfig c = cfg;
    c.t = ref.t;
    const BuildArtifacts art = build_artifacts(c);
    os << ref.t << " " << art.resources.qubits << " " << art.native.ms_native_tq << " "
       << ref.qubits << " " << ref.sq << " " << ref.tq << "\n";
    if (art.resources.qubits != ref.qubits) qubits_match = false;
  }
  os << "qubit_row_match " << (qubits_match ? "yes" : "no") << "\n";
  ensure_dir(cfg.out_dir);
  write_text_file(cfg.out_dir + "/report.txt", os.str());
  std::cout << os.str();
  return qubits_match ? 0 : kExitInternal;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"holographic kicked-Ising circuit toolkit"};
  app.require_subcommand(1);

  CliOptions opt;
  app.add_option("--config", opt.config_path, "run configuration file")->required();
  app.add_option("--seed", opt.seed, "override sampling.master_seed")
      ->each([&](const std::string&) { opt.seed_set = true; });
  app.add_option("--workers", opt.workers, "worker threads (default: cores)");
  app.add_option("--out", opt.out_dir, "override output.dir");

  auto* build = app.add_subcommand("build", "compile circuits and reports");
  auto* simulate = app.add_subcommand("simulate", "sample shot records");
  auto* oracle = app.add_subcommand("oracle", "compute the reference correlator table");
  auto* estimate = app.add_subcommand("estimate", "estimate correlators from shots");
  auto* compare = app.add_subcommand("compare", "normalized-error comparison");
  auto* report = app.add_subcommand("report", "resource table against the reference fixture");
  std::string reference_path = "data/reference_counts.txt";
  report->add_option("--reference", reference_path, "reference resource fixture");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    if (build->parsed()) return cmd_build(opt);
    if (simulate->parsed()) return cmd_simulate(opt);
    if (oracle->parsed()) return cmd_oracle(opt);
    if (estimate->parsed()) return cmd_estimate(opt);
    if (compare->parsed()) return cmd_compare(opt);
    if (report->parsed()) return cmd_report(opt, reference_path);
  } catch (const config_error& e) {
    std::cerr << "config error";
    if (e.line_number > 0) std::cerr << " (line " << e.line_number << ")";
    if (!e.field.empty()) std::cerr << " [" << e.field << "]";
    std::cerr << ": " << e.what() << "\n";
    return kExitConfig;
  } catch (const configuration_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const precision_error& e) {
    std::cerr << "precision error: " << e.what() << "\n";
    return kExitPrecision;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::length_error& e) {
    std::cerr << "size error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return 0;
}
