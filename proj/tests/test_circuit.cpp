#include <doctest.h>

#include <random>

#include "holoq/circuit.hpp"
#include "holoq/sdki.hpp"

using namespace holoq;

namespace {

Mat2 random_u2(std::mt19937_64& gen) {
  std::normal_distribution<> n;
  Mat2 a;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) a(i, j) = Cx(n(gen), n(gen));
  const Eigen::HouseholderQR<Mat2> qr(a);
  Mat2 q = qr.householderQ();
  Mat2 r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < 2; ++i) q.col(i) *= r(i, i) / std::abs(r(i, i));
  return q;
}

}  // namespace

TEST_CASE("validate: empty circuit gives an empty report") {
  Circuit c;
  CHECK(validate(c).ok());
}

TEST_CASE("validate flags a non-unitary gate") {
  Circuit c;
  Mat2 bad;
  bad << 1, 0, 0, 2;
  c.push(Instruction::gate1(0, bad));
  const auto report = validate(c);
  REQUIRE(report.violations.size() == 1);
  CHECK(report.violations[0].message.find("non-unitary") != std::string::npos);
}

TEST_CASE("validate flags use-after-reset and undeclared classical bits") {
  Circuit c;
  c.push(Instruction::allocate(0));
  c.push(Instruction::reset(0));
  c.push(Instruction::gate1(0, hadamard()));
  c.push(Instruction::measure(0, 3, Basis::Z));  // bit 3 never declared
  const auto report = validate(c);
  REQUIRE(report.violations.size() >= 2);
  bool saw_reset = false, saw_bit = false;
  for (const auto& v : report.violations) {
    if (v.message.find("after reset") != std::string::npos) saw_reset = true;
    if (v.message.find("undeclared classical bit") != std::string::npos) saw_bit = true;
  }
  CHECK(saw_reset);
  CHECK(saw_bit);
}

TEST_CASE("count_resources tallies instruction kinds") {
  Circuit c;
  c.push(Instruction::gate2(0, 1, ms_gate()));
  const auto r = count_resources(c);
  CHECK(r.qubits == 2);
  CHECK(r.two_qubit_gates == 1);
  CHECK(r.single_qubit_gates == 0);
  CHECK(r.measurements == 0);
  CHECK(r.resets == 0);
}

TEST_CASE("count_resources rejects malformed circuits") {
  Circuit c;
  Mat2 bad;
  bad << 1, 0, 0, 2;
  c.push(Instruction::gate1(0, bad));
  CHECK_THROWS_AS(count_resources(c), std::invalid_argument);
}

TEST_CASE("count_resources is invariant under classical bit relabeling") {
  Circuit c;
  c.add_classical_bit();
  c.add_classical_bit();
  c.push(Instruction::allocate(0));
  c.push(Instruction::gate1(0, hadamard()));
  c.push(Instruction::measure(0, 0, Basis::Z));
  c.push(Instruction::measure(0, 1, Basis::X));
  const auto before = count_resources(c);
  // swap the two classical bit targets
  Circuit d = c;
  for (auto& in : d.instructions)
    if (in.cbit >= 0) in.cbit = 1 - in.cbit;
  CHECK(count_resources(d) == before);
}

TEST_CASE("reset+allocate bumps the generation and keeps prior counts") {
  Circuit c;
  c.add_classical_bit();
  c.push(Instruction::allocate(0));
  c.push(Instruction::gate1(0, hadamard()));
  c.push(Instruction::measure(0, 0, Basis::Z));
  const auto before = count_resources(c);
  CHECK(qubit_id_of_targets(c, 1)[0].generation == 0);

  c.push(Instruction::reset(0));
  c.push(Instruction::allocate(0));
  c.push(Instruction::gate1(0, hadamard()));
  const auto after = count_resources(c);
  CHECK(after.single_qubit_gates == before.single_qubit_gates + 1);
  CHECK(after.measurements == before.measurements);
  CHECK(qubit_id_of_targets(c, c.instructions.size() - 1)[0].generation == 1);
  CHECK(validate(c).ok());
}

TEST_CASE("unitary_of: single Hadamard") {
  Circuit c;
  c.push(Instruction::gate1(0, hadamard()));
  CHECK(max_abs_diff(unitary_of(c), MatX(hadamard())) < 1e-15);
}

TEST_CASE("unitary_of: two MS gates give sigma_z x sigma_z up to phase") {
  Circuit c;
  c.push(Instruction::gate2(0, 1, ms_gate()));
  c.push(Instruction::gate2(0, 1, ms_gate()));
  CHECK(equal_up_to_phase(unitary_of(c), kron(pauli_z(), pauli_z()), 1e-12));
}

TEST_CASE("unitary_of matches a manual matrix product on a random 4-gate circuit") {
  std::mt19937_64 gen(42);
  Circuit c;
  MatX ref = MatX::Identity(8, 8);
  auto expand1 = [](int wire, const Mat2& m) {
    MatX out = MatX::Identity(1, 1);
    for (int w = 0; w < 3; ++w) out = kron(out, w == wire ? MatX(m) : MatX(Mat2::Identity()));
    return out;
  };
  for (int k = 0; k < 4; ++k) {
    if (k % 2 == 0) {
      const Mat2 u = random_u2(gen);
      const int wire = static_cast<int>(gen() % 3);
      c.push(Instruction::gate1(wire, u));
      ref = expand1(wire, u) * ref;
    } else {
      const Mat4 u = sdki_gate(0.3 + k).matrix;
      const int a = k == 1 ? 0 : 1;
      c.push(Instruction::gate2(a, a + 1, u));
      MatX expanded = (a == 0) ? kron(MatX(u), MatX(Mat2::Identity()))
                               : kron(MatX(Mat2::Identity()), MatX(u));
      ref = expanded * ref;
    }
  }
  CHECK(max_abs_diff(unitary_of(c), ref) < 1e-12);
}

TEST_CASE("unitary_of rejects measurements and enforces the size cap") {
  Circuit c;
  c.add_classical_bit();
  c.push(Instruction::measure(0, 0, Basis::Z));
  CHECK_THROWS_AS(unitary_of(c), std::invalid_argument);

  Circuit big;
  big.push(Instruction::gate2(0, 15, ms_gate()));
  CHECK_THROWS_AS(unitary_of(big), std::length_error);
}

TEST_CASE("unitary_of of a measurement-free circuit is unitary") {
  std::mt19937_64 gen(5);
  Circuit c;
  for (int k = 0; k < 6; ++k) {
    c.push(Instruction::gate1(static_cast<int>(gen() % 3), random_u2(gen)));
    c.push(Instruction::gate2(static_cast<int>(gen() % 2), 2, sdki_gate(0.1 * k).matrix));
  }
  CHECK(unitarity_defect(unitary_of(c)) < 1e-10);
}

TEST_CASE("serialization round-trips bit-exactly") {
  Circuit c;
  c.add_classical_bit(3);
  c.add_classical_bit();
  c.herald_bit = 1;
  c.global_phase = std::exp(Cx(0, 0.25));
  c.push(Instruction::allocate(0));
  c.push(Instruction::allocate(1));
  auto g = sdki_gate(0.2);
  auto in = Instruction::gate2(0, 1, g.matrix, "layer 1");
  in.du_tag = g.tag();
  c.push(in);
  c.push(Instruction::gate1(0, hadamard()));
  c.push(Instruction::measure(0, 0, Basis::X));
  c.push(Instruction::reset(0));
  c.push(Instruction::cond_gate1(1, pauli_z(), 1, 0));

  const std::string text = serialize(c);
  const Circuit back = parse_circuit(text);
  CHECK(serialize(back) == text);
  REQUIRE(back.instructions.size() == c.instructions.size());
  CHECK(back.num_classical_bits == 2);
  CHECK(back.site_of_bit[0] == 3);
  REQUIRE(back.herald_bit.has_value());
  CHECK(*back.herald_bit == 1);
  CHECK(std::abs(back.global_phase - c.global_phase) == 0.0);
  const auto& g2 = back.instructions[2];
  REQUIRE(g2.du_tag.has_value());
  CHECK(max_abs_diff(g2.u2, g.matrix) == 0.0);
  CHECK(max_abs_diff(g2.du_tag->u_plus, g.u_plus) == 0.0);
}
