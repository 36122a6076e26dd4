#include <doctest.h>

#include <cmath>
#include <random>

#include "holoq/noise.hpp"
#include "holoq/schedule.hpp"
#include "holoq/sdki.hpp"

using namespace holoq;

namespace {

Mat2 random_u2(std::mt19937_64& gen) {
  std::normal_distribution<> d;
  Mat2 a;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) a(i, j) = Cx(d(gen), d(gen));
  const Eigen::HouseholderQR<Mat2> qr(a);
  Mat2 q = qr.householderQ();
  const Mat2 r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < 2; ++i) q.col(i) *= r(i, i) / std::abs(r(i, i));
  return q;
}

// Runs the gadget tail on a prepared state; returns (herald bit, final
// 2-wire statevector if both live and unleaked).
struct GadgetRun {
  int herald = -1;
  SimState state;
};

GadgetRun run_gadget_on(const Mat2& prep, bool leak_target, GadgetMode mode,
                        std::uint64_t seed) {
  Circuit base;
  base.push(Instruction::allocate(0));
  base.push(Instruction::gate1(0, prep));
  const Circuit full = leakage_gadget(base, 0, mode);
  GadgetRun run{-1, SimState(full.num_classical_bits, seed)};
  std::size_t idx = 0;
  for (; idx < base.instructions.size(); ++idx) run.state.execute(full.instructions[idx]);
  if (leak_target) run.state.leak(0);
  for (; idx < full.instructions.size(); ++idx) run.state.execute(full.instructions[idx]);
  run.herald = run.state.classical_bits()[*full.herald_bit];
  return run;
}

}  // namespace

TEST_CASE("gadget heralds leakage with certainty, both statuses, 200 random states") {
  std::mt19937_64 gen(5);
  for (int k = 0; k < 100; ++k) {
    const Mat2 prep = random_u2(gen);
    for (bool leaked : {false, true}) {
      const auto run = run_gadget_on(prep, leaked, GadgetMode::Destructive, 1000 + k);
      CHECK(run.herald == (leaked ? 1 : 0));
    }
  }
}

TEST_CASE("destructive gadget applies exactly sigma_z to an unleaked target") {
  std::mt19937_64 gen(6);
  for (int k = 0; k < 20; ++k) {
    const Mat2 prep = random_u2(gen);
    auto run = run_gadget_on(prep, false, GadgetMode::Destructive, 50 + k);
    const VecX final_state = run.state.statevector({0, 1});
    VecX expect(4);
    const Eigen::Vector2cd psi = prep.col(0);  // prep applied to |0>
    const Eigen::Vector2cd zpsi = pauli_z() * psi;
    expect << zpsi(0), 0.0, zpsi(1), 0.0;  // ancilla ends in |0>
    CHECK(equal_up_to_phase(final_state, expect, 1e-12));
  }
}

TEST_CASE("qnd gadget restores the unleaked target state") {
  std::mt19937_64 gen(7);
  for (int k = 0; k < 20; ++k) {
    const Mat2 prep = random_u2(gen);
    auto run = run_gadget_on(prep, false, GadgetMode::Qnd, 90 + k);
    const VecX final_state = run.state.statevector({0, 1});
    VecX expect(4);
    const Eigen::Vector2cd psi = prep.col(0);
    expect << psi(0), 0.0, psi(1), 0.0;
    CHECK(equal_up_to_phase(final_state, expect, 1e-12));
  }
  // |+> in, |+> out
  auto plus = run_gadget_on(hadamard(), false, GadgetMode::Qnd, 321);
  const VecX v = plus.state.statevector({0, 1});
  CHECK(std::abs(v(0) - v(2)) < 1e-12);
}

TEST_CASE("zero noise parameters reproduce the noiseless stream bit for bit") {
  const auto mps = SolvableMps::from_kicks(0.3, 0.5, 1.25);
  SdkiParams p{0.2, 2, 8};
  const Circuit circuit = leakage_gadget(schedule(p, mps, 4).circuit, 0, GadgetMode::Destructive);
  NoiseParams zero;
  for (std::uint64_t seed : {5ull, 99ull}) {
    NoiseModel model(zero);
    const ShotRecord noisy = run_shot(circuit, seed, &model);
    const ShotRecord clean = run_shot(circuit, seed);
    CHECK(noisy.classical_bits == clean.classical_bits);
    REQUIRE(noisy.outcomes.size() == clean.outcomes.size());
    for (std::size_t i = 0; i < noisy.outcomes.size(); ++i)
      CHECK(noisy.outcomes[i].bit == clean.outcomes[i].bit);
  }
}

TEST_CASE("p_leak_tq = 1 leaks both participants with certainty") {
  Circuit c;
  c.push(Instruction::allocate(0));
  c.push(Instruction::allocate(1));
  c.push(Instruction::gate2(0, 1, ms_gate()));
  NoiseParams params;
  params.p_leak_tq = 1.0;
  NoiseModel model(params);
  const ShotRecord rec = run_shot(c, 3, &model);
  REQUIRE(rec.leaked_wires.size() == 2);
}

TEST_CASE("depolarizing-only noise never heralds") {
  const auto mps = SolvableMps::from_kicks(0.3, 0.5, 1.25);
  SdkiParams p{0.2, 1, 8};
  const Circuit circuit = leakage_gadget(schedule(p, mps, 4).circuit, 0, GadgetMode::Destructive);
  NoiseParams params;
  params.p_depol_tq = 0.05;
  const auto shots = run_shots(circuit, 500, 11, 2, make_noise_factory(params));
  const auto sel = post_select(shots);
  CHECK(sel.discard_fraction == 0.0);
  CHECK(sel.kept.size() == shots.size());
}

TEST_CASE("measurement and reset crosstalk leak spectators") {
  Circuit c;
  c.add_classical_bit();
  c.push(Instruction::allocate(0));
  c.push(Instruction::allocate(1));
  c.push(Instruction::measure(0, 0, Basis::Z));
  NoiseParams params;
  params.p_leak_meas_crosstalk = 1.0;
  NoiseModel model(params);
  const ShotRecord rec = run_shot(c, 5, &model);
  REQUIRE(rec.leaked_wires.size() == 1);
  CHECK(rec.leaked_wires[0].index == 1);  // spectator, not the measured wire
}

TEST_CASE("bond leak fraction matches the analytic binomial model") {
  const auto mps = SolvableMps::from_kicks(0.3, 0.5, 1.25);
  SdkiParams p{0.2, 2, 8};
  const auto built = schedule(p, mps, 4);
  const Circuit circuit = leakage_gadget(built.circuit, 0, GadgetMode::Destructive);
  const int n_pre = built.schedule.total_cells;  // W gates touching the bond
  const double leak_p = 0.02;
  NoiseParams params;
  params.p_leak_tq = leak_p;
  const std::uint64_t n_shots = 20000;
  const auto shots = run_shots(circuit, n_shots, 2718, 2, make_noise_factory(params));
  const auto sel = post_select(shots);
  const double q_pre = 1.0 - std::pow(1.0 - leak_p, n_pre);
  const double expect =
      (1.0 - leak_p) * (1.0 - leak_p) * (q_pre + (1.0 - q_pre) * leak_p * 0.5);
  const double sigma = std::sqrt(expect * (1.0 - expect) / static_cast<double>(n_shots));
  CHECK(std::abs(sel.discard_fraction - expect) < 3.0 * sigma);
}

TEST_CASE("post_select keeps unheralded shots unchanged") {
  ShotRecord a;
  a.shot_index = 0;
  a.herald = 0;
  a.classical_bits = {0, 1, 0};
  a.seed = 42;
  ShotRecord b = a;
  b.shot_index = 1;
  b.herald = 1;
  const auto sel = post_select({a, b});
  CHECK(sel.discard_fraction == doctest::Approx(0.5));
  REQUIRE(sel.kept.size() == 1);
  CHECK(sel.kept[0].classical_bits == a.classical_bits);
  CHECK(sel.kept[0].seed == a.seed);

  const auto none = post_select({a, a});
  CHECK(none.discard_fraction == 0.0);
  const auto all = post_select({b, b});
  CHECK(all.discard_fraction == 1.0);
  CHECK(all.kept.empty());

  ShotRecord missing;
  missing.herald = -1;
  CHECK_THROWS_AS(post_select({missing}), std::invalid_argument);
}

TEST_CASE("post_select of an empty stream") {
  const auto sel = post_select({});
  CHECK(sel.discard_fraction == 0.0);
  CHECK(sel.kept.empty());
}

TEST_CASE("noise params validation") {
  NoiseParams bad;
  bad.p_leak_tq = 1.5;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}
