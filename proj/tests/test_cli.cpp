// End-to-end exercises of the command-line binary: exit codes, output files,
// determinism across reruns and worker counts.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

int failures = 0;
int checks = 0;

void expect(bool ok, const std::string& what) {
  ++checks;
  if (!ok) {
    ++failures;
    std::cerr << "FAIL: " << what << "\n";
  }
}

int run(const std::string& args) {
  const std::string cmd = std::string(HOLOQ_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write(const fs::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  f << text;
}

}  // namespace

int main() {
  const fs::path work = fs::temp_directory_path() / "holoq_cli_test";
  fs::remove_all(work);
  fs::create_directories(work);

  const fs::path cfg = work / "run.ini";
  write(cfg, "[model]\nh = 0.2\nt = 2\ntwo_l = 8\n"
             "[schedule]\nnum_slices = 4\n"
             "[sampling]\nshots = 200\nmaster_seed = 7\n"
             "[oracle]\nmax_bond = 64\n"
             "[output]\ndir = " + (work / "out").string() + "\n");

  // build
  expect(run("--config " + cfg.string() + " build") == 0, "build exits 0");
  expect(fs::exists(work / "out/circuit_holo.txt"), "holo circuit written");
  expect(fs::exists(work / "out/circuit_flat.txt"), "flat circuit written at desk scale");
  expect(fs::exists(work / "out/schedule.txt"), "schedule report written");
  expect(fs::exists(work / "out/resources.txt"), "resource report written");
  expect(fs::exists(work / "out/manifest.json"), "manifest written");

  // simulate twice with different worker counts: byte-identical shots
  expect(run("--config " + cfg.string() + " --workers 1 simulate") == 0, "simulate exits 0");
  const std::string shots1 = slurp(work / "out/shots.txt");
  expect(run("--config " + cfg.string() + " --workers 4 simulate") == 0, "simulate again");
  const std::string shots4 = slurp(work / "out/shots.txt");
  expect(!shots1.empty() && shots1 == shots4, "shots independent of worker count");

  // noiseless herald: zero discard fraction
  const std::string herald = slurp(work / "out/herald.txt");
  expect(herald.find("discard_fraction 0\n") != std::string::npos,
         "noiseless run discards nothing");

  // estimate + compare
  expect(run("--config " + cfg.string() + " estimate") == 0, "estimate exits 0");
  expect(run("--config " + cfg.string() + " compare") == 0, "compare exits 0");
  for (const char* f : {"estimate.csv", "estimate_binned.csv", "oracle.csv", "compare.csv",
                        "histogram.csv", "heatmap.csv", "summary.txt"})
    expect(fs::exists(work / "out" / f), std::string(f) + " written");

  // CSV determinism under re-run
  const std::string est1 = slurp(work / "out/estimate.csv");
  expect(run("--config " + cfg.string() + " estimate") == 0, "estimate re-run");
  expect(est1 == slurp(work / "out/estimate.csv"), "estimate CSV is byte-stable");

  // seed override changes shots
  expect(run("--config " + cfg.string() + " --seed 8 simulate") == 0, "seed override accepted");
  expect(slurp(work / "out/shots.txt") != shots1, "different seed, different shots");
  // restore the original seed's outputs for the remaining checks
  expect(run("--config " + cfg.string() + " simulate") == 0, "restore seed-7 shots");

  // zero-shot run: empty stream, valid manifest
  const fs::path cfg0 = work / "zero.ini";
  write(cfg0, "[model]\nh = 0.2\nt = 0\ntwo_l = 8\n"
              "[schedule]\nnum_slices = 4\n[sampling]\nshots = 0\n"
              "[output]\ndir = " + (work / "zero_out").string() + "\n");
  expect(run("--config " + cfg0.string() + " simulate") == 0, "zero-shot run exits 0");
  expect(slurp(work / "zero_out/shots.txt").empty(), "zero-shot stream is empty");
  expect(fs::exists(work / "zero_out/manifest.json"), "zero-shot manifest exists");

  // config errors exit 2 and name the field
  const fs::path bad = work / "bad.ini";
  write(bad, "[model]\nt = 2\n");
  expect(run("--config " + bad.string() + " build") == 2, "missing h exits 2");
  {
    const std::string cmd = std::string(HOLOQ_CLI_PATH) + " --config " + bad.string() +
                            " build 2> " + (work / "err.txt").string();
    std::system(cmd.c_str());
    expect(slurp(work / "err.txt").find("model.h") != std::string::npos,
           "error message names model.h");
  }
  write(bad, "[model]\nh = 0.2\nt = 2\ntwo_l = 8\n[schedule]\nnum_slices = 4\nmystery = 1\n");
  expect(run("--config " + bad.string() + " build") == 2, "unknown key exits 2");

  // compare against a mismatched manifest: exit 2
  const fs::path cfg_mismatch = work / "mismatch.ini";
  write(cfg_mismatch, "[model]\nh = 0.2\nt = 1\ntwo_l = 8\n"
                      "[schedule]\nnum_slices = 4\n[sampling]\nshots = 200\nmaster_seed = 7\n"
                      "[output]\ndir = " + (work / "out").string() + "\n");
  expect(run("--config " + cfg_mismatch.string() + " compare") == 2,
         "cross-t comparison refused with exit 2");

  // usage error
  expect(run("") == 2, "missing subcommand exits 2");

  if (failures == 0) std::printf("all %d cli checks passed\n", checks);
  return failures == 0 ? 0 : 1;
}
