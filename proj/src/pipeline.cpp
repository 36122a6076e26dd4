#include "holoq/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "holoq/noise.hpp"
#include "holoq/oracle.hpp"

#include <json.hpp>

namespace holoq {

namespace {
std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}
}  // namespace

BuildArtifacts build_artifacts(const RunConfig& config) {
  BuildArtifacts art;
  const SdkiParams params = params_of(config);
  const SolvableMps mps = mps_of(config);

  art.scheduled = schedule(params, mps, config.num_slices, config.temporal_boundary);
  Circuit holo = art.scheduled.circuit;
  if (config.swap_factor_enabled) {
    art.swap_result = swap_factor(holo);
    holo = art.swap_result.circuit;
  }
  if (config.gadget != GadgetChoice::Off) {
    // The bond register travels the whole circuit without reset; it is the
    // one qubit whose leakage survives to the end, so it gets the gadget.
    int bond_wire = 0;
    if (config.swap_factor_enabled) bond_wire = art.swap_result.wire_permutation[0];
    holo = leakage_gadget(holo, bond_wire,
                          config.gadget == GadgetChoice::Qnd ? GadgetMode::Qnd
                                                             : GadgetMode::Destructive);
  }
  art.holo = std::move(holo);
  art.resources = count_resources(art.holo);
  art.native = native_gate_count(art.holo);

  try {
    art.flat = flat_reference_circuit(params, mps, config.num_slices, config.temporal_boundary);
  } catch (const std::length_error&) {
    art.flat.reset();  // over the engine cap; expected at experiment scale
  }
  return art;
}

SimulationOutput simulate_run(const RunConfig& config, const Circuit& holo, int workers) {
  SimulationOutput out;
  out.records = run_shots(holo, config.shots, config.master_seed, workers,
                          make_noise_factory(config.noise), config.noise.leaked_readout_bit);
  out.lines.reserve(out.records.size());
  for (const auto& r : out.records)
    out.lines.push_back(shot_line_of(r, holo.site_of_bit, config.two_L));
  out.herald.shots = out.records.size();
  for (const auto& r : out.records)
    if (r.herald > 0) ++out.herald.heralded;
  out.herald.discard_fraction =
      out.records.empty()
          ? 0.0
          : static_cast<double>(out.herald.heralded) / static_cast<double>(out.records.size());
  return out;
}

CorrelatorTable theory_table(const RunConfig& config, int left_pad_cells) {
  const SdkiParams params = params_of(config);
  const SolvableMps mps = mps_of(config);
  WindowSpec window = window_of(config);
  TebdConfig tebd = config.tebd;
  if (left_pad_cells > 0) {
    // Bulk variant: shift the whole window right so the chain boundary sits
    // left_pad_cells away from every averaged site.
    window.j_min += 2 * left_pad_cells;
    window.two_L += 2 * left_pad_cells;
    if (tebd.l_sites > 0) tebd.l_sites += 2 * left_pad_cells;
    SdkiParams shifted = params;
    shifted.two_L = window.two_L;
    auto result = tebd_correlators(shifted, InitialState::solvable(mps), tebd, window,
                                   PauliAxis::X, PauliAxis::X, config.temporal_boundary);
    for (auto& e : result.table.entries) e.t = params.t;
    return result.table;
  }
  return tebd_correlators(params, InitialState::solvable(mps), tebd, window, PauliAxis::X,
                          PauliAxis::X, config.temporal_boundary)
      .table;
}

CompareSummary compare_tables(const CorrelatorTable& expt, const CorrelatorTable& theory) {
  CompareSummary s;
  s.errors = normalized_errors(expt, theory);
  s.mean_epsilon = s.errors.mean_epsilon;
  s.histogram.assign(CompareSummary::kBins, 0);
  for (const auto& e : s.errors.entries) {
    if (!e.valid) continue;
    ++s.total_entries;
    if (e.epsilon <= 3.0) ++s.entries_within_3;
    const int bin =
        std::min(CompareSummary::kBins - 1, static_cast<int>(e.epsilon / CompareSummary::kBinWidth));
    ++s.histogram[bin];
  }
  return s;
}

std::string compare_csv(const CompareSummary& summary) {
  std::ostringstream os;
  os << "r,t,c_expt,c_theory,stderr,epsilon\n";
  for (const auto& e : summary.errors.entries) {
    os << e.r << "," << e.t << "," << fmt(e.c_expt) << "," << fmt(e.c_theory) << ","
       << fmt(e.stderr_) << ",";
    if (e.valid)
      os << fmt(e.epsilon);
    else
      os << "division-error";
    os << "\n";
  }
  return os.str();
}

std::string histogram_csv(const CompareSummary& summary) {
  std::ostringstream os;
  os << "bin_lo,bin_hi,count\n";
  for (int b = 0; b < CompareSummary::kBins; ++b) {
    const double lo = b * CompareSummary::kBinWidth;
    if (b + 1 == CompareSummary::kBins)
      os << fmt(lo) << ",inf," << summary.histogram[b] << "\n";
    else
      os << fmt(lo) << "," << fmt(lo + CompareSummary::kBinWidth) << "," << summary.histogram[b]
         << "\n";
  }
  return os.str();
}

std::string heatmap_csv(const CorrelatorTable& expt_binned, const CorrelatorTable& theory_binned) {
  std::ostringstream os;
  os << "side,r_lo,r_hi,t,value\n";
  auto emit = [&](const CorrelatorTable& table, const char* side, int sign) {
    for (const auto& e : table.entries) {
      const int r_lo = e.r;
      const int r_hi = e.binned ? e.r + 1 : e.r;
      os << side << "," << sign * r_lo << "," << sign * r_hi << "," << e.t << "," << fmt(e.value)
         << "\n";
    }
  };
  emit(theory_binned, "theory", -1);
  emit(expt_binned, "experiment", +1);
  return os.str();
}

void ensure_dir(const std::string& path) { std::filesystem::create_directories(path); }

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << content;
}

std::string read_text_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for reading: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string manifest_json(const RunConfig& config, int workers,
                          const std::vector<std::string>& outputs) {
  nlohmann::ordered_json j;
  j["format"] = "holoq-manifest-v1";
  j["config_hash"] = config_hash(config);
  j["config"] = canonical_config(config);
  j["rng"] = {{"algorithm", RandomStream::algorithm_name()},
              {"master_seed", config.master_seed},
              {"shot_seed_derivation", "splitmix64(master + golden*(index+1))"}};
  j["workers"] = workers;
  j["outputs"] = outputs;
  j["version"] = "0.1.0";
  return j.dump(2) + "\n";
}

std::uint64_t manifest_config_hash(const std::string& manifest_text) {
  const auto j = nlohmann::json::parse(manifest_text);
  return j.at("config_hash").get<std::uint64_t>();
}

std::string resource_report_text(const ResourceReport& resources, const NativeGateReport& native) {
  std::ostringstream os;
  os << "qubits " << resources.qubits << "\n";
  os << "single_qubit_gates " << resources.single_qubit_gates << "\n";
  os << "two_qubit_gates " << resources.two_qubit_gates << "\n";
  os << "measurements " << resources.measurements << "\n";
  os << "resets " << resources.resets << "\n";
  os << "ms_native_tq " << native.ms_native_tq << "\n";
  os << "sq_rotation_estimate " << native.sq_rotation_estimate << "\n";
  os << "tq_by_class";
  for (long c : native.tq_by_class) os << " " << c;
  os << "\n";
  return os.str();
}

std::string herald_stats_text(const HeraldStats& stats, const NoiseParams& noise) {
  std::ostringstream os;
  os << "shots " << stats.shots << "\n";
  os << "heralded " << stats.heralded << "\n";
  os << "discard_fraction " << fmt(stats.discard_fraction) << "\n";
  os << "p_depol_tq " << fmt(noise.p_depol_tq) << "\n";
  os << "p_leak_tq " << fmt(noise.p_leak_tq) << "\n";
  os << "p_leak_meas_crosstalk " << fmt(noise.p_leak_meas_crosstalk) << "\n";
  os << "p_leak_reset_crosstalk " << fmt(noise.p_leak_reset_crosstalk) << "\n";
  return os.str();
}

}  // namespace holoq
