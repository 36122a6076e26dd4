#include <doctest.h>

#include <cmath>
#include <random>

#include "holoq/estimator.hpp"
#include "holoq/noise.hpp"
#include "holoq/oracle.hpp"
#include "holoq/schedule.hpp"

using namespace holoq;

namespace {

ShotMatrix constant_shots(int n, int two_L, std::int8_t value) {
  ShotMatrix m;
  m.two_L = two_L;
  m.rows.assign(n, std::vector<std::int8_t>(two_L, value));
  return m;
}

ShotMatrix iid_shots(int n, int two_L, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  ShotMatrix m;
  m.two_L = two_L;
  for (int i = 0; i < n; ++i) {
    std::vector<std::int8_t> row(two_L);
    for (auto& x : row) x = (gen() & 1) ? 1 : -1;
    m.rows.push_back(std::move(row));
  }
  return m;
}

}  // namespace

TEST_CASE("window spec reproduces the averaging convention") {
  const WindowSpec w = WindowSpec::defaults_for(32);
  CHECK(w.j_min == 9);
  CHECK(w.j_max(0) == 30);
  CHECK(w.j_max(4) == 26);
  CHECK(w.j_max(5) == 24);
  CHECK(w.max_r() == 20);
  CHECK(w.empty_for(21));
  // every pair stays inside the window
  for (int r = 0; r <= w.max_r(); ++r)
    for (const auto& [j, k] : w.pairs(r)) {
      CHECK(j >= 9);
      CHECK(k <= 32);
      CHECK((k - j == r || k - j == r + 1));
    }
  const WindowSpec small = WindowSpec::defaults_for(8);
  CHECK(small.j_min == 1);
}

TEST_CASE("all-plus shots give C = 1 with zero stderr") {
  const auto table = estimate_correlators(constant_shots(50, 8, 1), WindowSpec::defaults_for(8), 0);
  for (const auto& e : table.entries) {
    CHECK(e.value == doctest::Approx(1.0));
    CHECK(e.stderr_ == doctest::Approx(0.0));
  }
}

TEST_CASE("iid uniform shots estimate zero within 3 standard errors almost always") {
  const auto table =
      estimate_correlators(iid_shots(10000, 32, 99), WindowSpec::defaults_for(32), 0);
  int outliers = 0;
  int checked = 0;
  for (const auto& e : table.entries) {
    if (e.r == 0) continue;  // the delta=0 term is identically 1 at r=0
    ++checked;
    if (std::abs(e.value) > 3 * e.stderr_) ++outliers;
  }
  CHECK(checked >= 19);
  CHECK(outliers <= 1);  // >= 99% within 3 sigma, a touch of slack
}

TEST_CASE("estimates are bounded by construction") {
  const auto table = estimate_correlators(iid_shots(200, 16, 5), WindowSpec::defaults_for(16), 0);
  for (const auto& e : table.entries) {
    CHECK(e.value <= 1.0);
    CHECK(e.value >= -1.0);
  }
}

TEST_CASE("stderr halves when the shot count quadruples") {
  int within = 0;
  const int reps = 50;
  for (int rep = 0; rep < reps; ++rep) {
    const auto small = estimate_correlators(iid_shots(500, 8, 1000 + rep),
                                            WindowSpec::defaults_for(8), 0);
    const auto large = estimate_correlators(iid_shots(2000, 8, 5000 + rep),
                                            WindowSpec::defaults_for(8), 0);
    const double ratio = small.find(2, 0)->stderr_ / large.find(2, 0)->stderr_;
    if (std::abs(ratio - 2.0) < 0.3) ++within;  // 15%
  }
  CHECK(within >= 40);  // statistical check, dominant fraction within 15%
}

TEST_CASE("estimator needs at least two shots") {
  CHECK_THROWS_AS(estimate_correlators(constant_shots(1, 8, 1), WindowSpec::defaults_for(8), 0),
                  std::invalid_argument);
}

TEST_CASE("estimator is unbiased against the exact oracle (t=1, reduced scale)") {
  const auto mps = SolvableMps::from_kicks(0.3, 0.5, 1.25);
  SdkiParams p{0.2, 1, 8};
  const WindowSpec w = WindowSpec::defaults_for(8);
  const auto holo = schedule(p, mps, 4);
  TebdConfig cfg;
  cfg.max_bond = 64;
  const auto oracle = tebd_correlators(p, InitialState::solvable(mps), cfg, w);

  const int runs = 200;
  const int n_s = 1000;
  std::map<int, double> sum, sumsq;
  for (int run = 0; run < runs; ++run) {
    const auto shots = run_shots(holo.circuit, n_s, derive_shot_seed(31337, run), 2);
    const auto est = estimate_correlators(
        ShotMatrix::from_records(shots, holo.circuit.site_of_bit, 8, false), w, 1);
    for (const auto& e : est.entries) {
      sum[e.r] += e.value;
      sumsq[e.r] += e.value * e.value;
    }
  }
  for (const auto& e : oracle.table.entries) {
    const double mean = sum[e.r] / runs;
    const double var = sumsq[e.r] / runs - mean * mean;
    const double sem = std::sqrt(var / runs);
    CHECK(std::abs(mean - e.value) < 3.0 * std::max(sem, 1e-12));
  }
}

TEST_CASE("bin_symmetry merges r in {2j, 2j+1} and passes r = 0, 1 through") {
  CorrelatorTable table;
  table.entries.push_back({'x', 'x', 0, 2, 0.9, 0.01, 4, false});
  table.entries.push_back({'x', 'x', 1, 2, 0.5, 0.01, 4, false});
  table.entries.push_back({'x', 'x', 2, 2, 0.3, 0.03, 4, false});
  table.entries.push_back({'x', 'x', 3, 2, 0.1, 0.04, 4, false});
  const auto binned = bin_symmetry(table);
  REQUIRE(binned.entries.size() == 3);
  const auto* pair = binned.find(2, 2);
  REQUIRE(pair != nullptr);
  CHECK(pair->value == doctest::Approx(0.2));
  CHECK(pair->stderr_ == doctest::Approx(0.025));  // quadrature over the bin
  CHECK(pair->n_terms == 8);
  CHECK(pair->binned);
  CHECK_FALSE(binned.find(0, 2)->binned);
  CHECK_FALSE(binned.find(1, 2)->binned);

  CHECK_THROWS_AS(bin_symmetry(binned), std::invalid_argument);  // idempotence guard

  const CorrelatorTable empty;
  CHECK(bin_symmetry(empty).entries.empty());
}

TEST_CASE("binning is lossless on the symmetric t=0 oracle table") {
  const auto mps = SolvableMps::from_kicks(0.3, 0.5, 1.25);
  SdkiParams p{0.2, 0, 12};
  const WindowSpec w = WindowSpec::defaults_for(12);
  TebdConfig cfg;
  const auto table = tebd_correlators(p, InitialState::solvable(mps), cfg, w).table;
  // two-site unit cell: bin partners carry equal values at t=0
  for (const auto& e : table.entries) {
    if (e.r < 2 || e.r % 2 != 0) continue;
    const auto* partner = table.find(e.r + 1, e.t);
    if (partner) CHECK(std::abs(e.value - partner->value) < 1e-10);
  }
  const auto binned = bin_symmetry(table);
  for (const auto& e : binned.entries)
    if (e.binned) CHECK(std::abs(e.value - table.find(e.r, e.t)->value) < 1e-10);
}

TEST_CASE("shot lines round-trip and feed the matrix") {
  std::vector<ShotLine> lines(3);
  for (int i = 0; i < 3; ++i) {
    lines[i].index = i;
    lines[i].herald = i % 2;
    lines[i].site_bits = {1, 0, 0, 1};
    lines[i].seed = 1000 + i;
  }
  lines[2].herald = -1;
  const std::string text = serialize_shot_lines(lines);
  const auto parsed = parse_shot_lines(text);
  REQUIRE(parsed.size() == 3);
  CHECK(parsed[1].herald == 1);
  CHECK(parsed[2].herald == -1);
  CHECK(parsed[0].site_bits == lines[0].site_bits);
  CHECK(serialize_shot_lines(parsed) == text);

  const auto matrix = ShotMatrix::from_lines(parsed, 4, false);
  CHECK(matrix.rows[0][0] == -1);
  CHECK(matrix.rows[0][1] == 1);
}
