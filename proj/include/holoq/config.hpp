#pragma once

#include <cstdint>
#include <string>

#include "holoq/noise.hpp"
#include "holoq/oracle.hpp"
#include "holoq/sdki.hpp"

namespace holoq {

struct config_error : std::runtime_error {
  config_error(std::string msg, int line = 0, std::string field = {})
      : std::runtime_error(std::move(msg)), line_number(line), field(std::move(field)) {}
  int line_number = 0;
  std::string field;
};

enum class GadgetChoice { Destructive, Qnd, Off };

/// One structured config file drives a whole run; no environment variables,
/// so the manifest echo is complete.  model.h and model.t must be set
/// explicitly; every other key defaults to the reference experiment
/// (h=0.2, K=(0.3,0.5,1.25), 32 sites, 16 slices, 1000 shots).
struct RunConfig {
  // [model]
  double h = 0.2;
  int t = 6;
  int two_L = 32;
  // [mps]
  double kx = 0.3, ky = 0.5, kz = 1.25;
  std::string w_file;  // overrides kicks when set
  // [schedule]
  int num_slices = 16;
  bool swap_factor_enabled = true;
  bool temporal_boundary = true;
  GadgetChoice gadget = GadgetChoice::Destructive;
  // [noise]
  NoiseParams noise;
  // [sampling]
  std::uint64_t shots = 1000;
  std::uint64_t master_seed = 1;
  // [oracle]
  TebdConfig tebd;
  bool bulk_compare = false;
  // [output]
  std::string out_dir = "out";

  void validate() const;
};

RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::string& path);

/// Canonical key-sorted round-trippable echo of the config.
std::string canonical_config(const RunConfig& config);

/// FNV-1a 64 over the canonical echo.
std::uint64_t config_hash(const RunConfig& config);

SdkiParams params_of(const RunConfig& config);
SolvableMps mps_of(const RunConfig& config);
WindowSpec window_of(const RunConfig& config);

MatX read_unitary_file(const std::string& path);
void write_unitary_file(const MatX& w, const std::string& path);

}  // namespace holoq
