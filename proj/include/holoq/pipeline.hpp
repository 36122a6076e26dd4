#pragma once

#include <optional>
#include <string>
#include <vector>

#include "holoq/config.hpp"
#include "holoq/estimator.hpp"
#include "holoq/schedule.hpp"

namespace holoq {

/// Everything `build` produces in memory; file emission is separate.
struct BuildArtifacts {
  ScheduleResult scheduled;           // before rewrites
  Circuit holo;                       // after optional swap-factor + gadget
  std::optional<Circuit> flat;        // absent when over the engine cap
  SwapFactorResult swap_result;       // valid when swap factoring is on
  ResourceReport resources;
  NativeGateReport native;
};

BuildArtifacts build_artifacts(const RunConfig& config);

struct HeraldStats {
  std::uint64_t shots = 0;
  std::uint64_t heralded = 0;
  double discard_fraction = 0.0;
};

struct SimulationOutput {
  std::vector<ShotRecord> records;
  std::vector<ShotLine> lines;
  HeraldStats herald;
};

SimulationOutput simulate_run(const RunConfig& config, const Circuit& holo, int workers);

/// TEBD reference table for the configured window (optionally a bulk variant
/// with the left boundary pushed away by `left_pad_cells`).
CorrelatorTable theory_table(const RunConfig& config, int left_pad_cells = 0);

struct CompareSummary {
  ErrorTable errors;
  double mean_epsilon = 0.0;
  long total_entries = 0;
  long entries_within_3 = 0;
  std::vector<long> histogram;  // epsilon in bins of 0.25, last = overflow
  static constexpr double kBinWidth = 0.25;
  static constexpr int kBins = 21;  // 0..5 plus overflow
};

CompareSummary compare_tables(const CorrelatorTable& expt, const CorrelatorTable& theory);

std::string histogram_csv(const CompareSummary& summary);
std::string compare_csv(const CompareSummary& summary);
/// Mirrored heatmap rows: theory entries at negative r, experiment at
/// positive r, both symmetry-binned.
std::string heatmap_csv(const CorrelatorTable& expt_binned, const CorrelatorTable& theory_binned);

// ---- run directory I/O ----

void ensure_dir(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

std::string manifest_json(const RunConfig& config, int workers,
                          const std::vector<std::string>& outputs);
/// Extracts the config hash recorded in a manifest written by manifest_json.
std::uint64_t manifest_config_hash(const std::string& manifest_text);

std::string resource_report_text(const ResourceReport& resources, const NativeGateReport& native);
std::string herald_stats_text(const HeraldStats& stats, const NoiseParams& noise);

}  // namespace holoq
