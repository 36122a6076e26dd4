#include "holoq/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace holoq {

namespace {

constexpr double kUnitaryTol = 1e-12;

void apply_gate1_raw(Cx* data, std::size_t n, int bit, const Mat2& m) {
  const std::size_t step = std::size_t{1} << bit;
  for (std::size_t base = 0; base < n; base += 2 * step) {
    for (std::size_t i = base; i < base + step; ++i) {
      const Cx a0 = data[i], a1 = data[i + step];
      data[i] = m(0, 0) * a0 + m(0, 1) * a1;
      data[i + step] = m(1, 0) * a0 + m(1, 1) * a1;
    }
  }
}

void apply_gate2_raw(Cx* data, std::size_t n, int bit_hi, int bit_lo, const Mat4& m) {
  const std::size_t mh = std::size_t{1} << bit_hi;
  const std::size_t ml = std::size_t{1} << bit_lo;
  for (std::size_t i = 0; i < n; ++i) {
    if (i & (mh | ml)) continue;
    const Cx a00 = data[i], a01 = data[i | ml], a10 = data[i | mh], a11 = data[i | mh | ml];
    data[i] = m(0, 0) * a00 + m(0, 1) * a01 + m(0, 2) * a10 + m(0, 3) * a11;
    data[i | ml] = m(1, 0) * a00 + m(1, 1) * a01 + m(1, 2) * a10 + m(1, 3) * a11;
    data[i | mh] = m(2, 0) * a00 + m(2, 1) * a01 + m(2, 2) * a10 + m(2, 3) * a11;
    data[i | mh | ml] = m(3, 0) * a00 + m(3, 1) * a01 + m(3, 2) * a10 + m(3, 3) * a11;
  }
}

}  // namespace

Instruction Instruction::gate1(int q, const Mat2& m, std::string label) {
  Instruction in;
  in.kind = InstrKind::Gate1;
  in.q0 = q;
  in.u1 = m;
  in.label = std::move(label);
  return in;
}

Instruction Instruction::gate2(int a, int b, const Mat4& m, std::string label) {
  Instruction in;
  in.kind = InstrKind::Gate2;
  in.q0 = a;
  in.q1 = b;
  in.u2 = m;
  in.label = std::move(label);
  return in;
}

Instruction Instruction::measure(int q, int cbit, Basis basis) {
  Instruction in;
  in.kind = InstrKind::Measure;
  in.q0 = q;
  in.cbit = cbit;
  in.basis = basis;
  return in;
}

Instruction Instruction::reset(int q) {
  Instruction in;
  in.kind = InstrKind::Reset;
  in.q0 = q;
  return in;
}

Instruction Instruction::allocate(int q) {
  Instruction in;
  in.kind = InstrKind::Allocate;
  in.q0 = q;
  return in;
}

Instruction Instruction::cond_gate1(int q, const Mat2& m, int cbit, int cond_value) {
  Instruction in;
  in.kind = InstrKind::CondGate1;
  in.q0 = q;
  in.cbit = cbit;
  in.cond_value = cond_value;
  in.u1 = m;
  return in;
}

int Circuit::add_classical_bit(int site) {
  site_of_bit.push_back(site);
  return num_classical_bits++;
}

void Circuit::push(Instruction instr) { instructions.push_back(std::move(instr)); }

int Circuit::num_wires() const {
  int n = 0;
  for (const auto& in : instructions) {
    n = std::max(n, in.q0 + 1);
    n = std::max(n, in.q1 + 1);
  }
  return n;
}

namespace {

// Wires never explicitly allocated anywhere in the circuit are treated as
// live from circuit start; wires with an Allocate must live inside
// Allocate..Reset windows.
std::set<int> wires_live_from_start(const Circuit& c) {
  std::set<int> allocated;
  for (const auto& in : c.instructions)
    if (in.kind == InstrKind::Allocate) allocated.insert(in.q0);
  std::set<int> from_start;
  for (const auto& in : c.instructions) {
    for (int q : {in.q0, in.q1})
      if (q >= 0 && !allocated.count(q)) from_start.insert(q);
  }
  return from_start;
}

}  // namespace

int Circuit::max_live_qubits() const {
  std::set<int> live = wires_live_from_start(*this);
  int peak = static_cast<int>(live.size());
  for (const auto& in : instructions) {
    if (in.kind == InstrKind::Allocate) live.insert(in.q0);
    if (in.kind == InstrKind::Reset) live.erase(in.q0);
    peak = std::max(peak, static_cast<int>(live.size()));
  }
  return peak;
}

ValidationReport validate(const Circuit& circuit) {
  ValidationReport report;
  auto flag = [&](std::size_t i, std::string msg) {
    report.violations.push_back({i, std::move(msg)});
  };

  std::set<int> live = wires_live_from_start(circuit);
  std::set<int> ever_live = live;

  for (std::size_t i = 0; i < circuit.instructions.size(); ++i) {
    const auto& in = circuit.instructions[i];
    auto require_live = [&](int q) {
      if (live.count(q)) return;
      if (ever_live.count(q))
        flag(i, "use after reset of wire q" + std::to_string(q));
      else
        flag(i, "use before allocate of wire q" + std::to_string(q));
    };
    switch (in.kind) {
      case InstrKind::Allocate:
        if (live.count(in.q0)) flag(i, "allocate of live wire q" + std::to_string(in.q0));
        live.insert(in.q0);
        ever_live.insert(in.q0);
        break;
      case InstrKind::Gate1:
        require_live(in.q0);
        if (unitarity_defect(in.u1) > kUnitaryTol) flag(i, "non-unitary single-qubit gate");
        break;
      case InstrKind::CondGate1:
        require_live(in.q0);
        if (unitarity_defect(in.u1) > kUnitaryTol) flag(i, "non-unitary single-qubit gate");
        if (in.cbit < 0 || in.cbit >= circuit.num_classical_bits)
          flag(i, "undeclared classical bit c" + std::to_string(in.cbit));
        if (in.cond_value != 0 && in.cond_value != 1) flag(i, "condition value must be 0 or 1");
        break;
      case InstrKind::Gate2:
        if (in.q0 == in.q1) flag(i, "two-qubit gate with repeated target");
        require_live(in.q0);
        require_live(in.q1);
        if (unitarity_defect(in.u2) > kUnitaryTol) flag(i, "non-unitary two-qubit gate");
        break;
      case InstrKind::Measure:
        require_live(in.q0);
        if (in.cbit < 0 || in.cbit >= circuit.num_classical_bits)
          flag(i, "undeclared classical bit c" + std::to_string(in.cbit));
        break;
      case InstrKind::Reset:
        require_live(in.q0);
        live.erase(in.q0);
        break;
    }
  }
  return report;
}

ResourceReport count_resources(const Circuit& circuit) {
  const auto report = validate(circuit);
  if (!report.ok()) {
    throw std::invalid_argument("count_resources on malformed circuit: " +
                                report.violations.front().message);
  }
  ResourceReport r;
  r.qubits = circuit.max_live_qubits();
  for (const auto& in : circuit.instructions) {
    switch (in.kind) {
      case InstrKind::Gate1:
      case InstrKind::CondGate1: ++r.single_qubit_gates; break;
      case InstrKind::Gate2: ++r.two_qubit_gates; break;
      case InstrKind::Measure: ++r.measurements; break;
      case InstrKind::Reset: ++r.resets; break;
      case InstrKind::Allocate: break;
    }
  }
  return r;
}

MatX unitary_of(const Circuit& circuit, int max_qubits) {
  const int n = circuit.num_wires();
  if (n > max_qubits)
    throw std::length_error("unitary_of: " + std::to_string(n) + " wires exceeds cap of " +
                            std::to_string(max_qubits));
  const std::size_t dim = std::size_t{1} << n;
  MatX u = MatX::Identity(dim, dim) * circuit.global_phase;
  auto bit_of = [&](int wire) { return n - 1 - wire; };
  for (const auto& in : circuit.instructions) {
    switch (in.kind) {
      case InstrKind::Allocate:
        break;  // wire exists in the full space throughout
      case InstrKind::Gate1:
        for (std::size_t c = 0; c < dim; ++c)
          apply_gate1_raw(u.col(c).data(), dim, bit_of(in.q0), in.u1);
        break;
      case InstrKind::Gate2:
        for (std::size_t c = 0; c < dim; ++c)
          apply_gate2_raw(u.col(c).data(), dim, bit_of(in.q0), bit_of(in.q1), in.u2);
        break;
      case InstrKind::Measure:
      case InstrKind::Reset:
      case InstrKind::CondGate1:
        throw std::invalid_argument("unitary_of: circuit contains non-unitary instructions");
    }
  }
  return u;
}

std::vector<QubitId> qubit_id_of_targets(const Circuit& circuit, std::size_t instr_index) {
  std::map<int, int> gen;
  for (std::size_t i = 0; i < instr_index && i < circuit.instructions.size(); ++i) {
    const auto& in = circuit.instructions[i];
    if (in.kind == InstrKind::Reset) ++gen[in.q0];
  }
  std::vector<QubitId> out;
  const auto& in = circuit.instructions.at(instr_index);
  for (int q : {in.q0, in.q1})
    if (q >= 0) out.push_back({q, gen.count(q) ? gen[q] : 0});
  return out;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Complex entry as "<re><+/-><|im|>i", 17 significant digits per part.
std::string format_cx(Cx v) {
  std::string s = format_double(v.real());
  s += (v.imag() < 0 || (v.imag() == 0 && std::signbit(v.imag()))) ? "-" : "+";
  s += format_double(std::abs(v.imag()));
  s += "i";
  return s;
}

Cx parse_cx(const std::string& tok) {
  if (tok.empty() || tok.back() != 'i')
    throw std::invalid_argument("bad complex token: " + tok);
  // Split at the last sign that is not part of an exponent.
  std::size_t split = std::string::npos;
  for (std::size_t i = tok.size() - 1; i > 0; --i) {
    const char c = tok[i];
    if ((c == '+' || c == '-') && tok[i - 1] != 'e' && tok[i - 1] != 'E') {
      split = i;
      break;
    }
  }
  if (split == std::string::npos) throw std::invalid_argument("bad complex token: " + tok);
  const double re = std::stod(tok.substr(0, split));
  const double im = std::stod(tok.substr(split, tok.size() - 1 - split));
  return {re, im};
}

void emit_mat(std::ostream& os, const MatX& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) os << " " << format_cx(m(i, j));
}

template <typename Mat>
Mat read_mat(std::istringstream& is, int rows, int cols) {
  Mat m(rows, cols);
  std::string tok;
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) {
      if (!(is >> tok)) throw std::invalid_argument("truncated matrix");
      m(i, j) = parse_cx(tok);
    }
  return m;
}

}  // namespace

std::string serialize(const Circuit& circuit) {
  std::ostringstream os;
  os << "holoq-circuit v1\n";
  os << "nc " << circuit.num_classical_bits << "\n";
  os << "phase " << format_cx(circuit.global_phase) << "\n";
  for (std::size_t b = 0; b < circuit.site_of_bit.size(); ++b)
    if (circuit.site_of_bit[b] >= 0) os << "site c" << b << " " << circuit.site_of_bit[b] << "\n";
  if (circuit.herald_bit) os << "herald c" << *circuit.herald_bit << "\n";
  for (const auto& in : circuit.instructions) {
    switch (in.kind) {
      case InstrKind::Allocate:
        os << "alloc q" << in.q0;
        break;
      case InstrKind::Gate1:
        os << "gate1 q" << in.q0;
        emit_mat(os, in.u1);
        break;
      case InstrKind::Gate2:
        os << "gate2 q" << in.q0 << " q" << in.q1;
        emit_mat(os, in.u2);
        break;
      case InstrKind::Measure:
        os << "measure q" << in.q0 << " c" << in.cbit << " "
           << (in.basis == Basis::Z ? "Z" : "X");
        break;
      case InstrKind::Reset:
        os << "reset q" << in.q0;
        break;
      case InstrKind::CondGate1:
        os << "cgate1 q" << in.q0 << " c" << in.cbit << " " << in.cond_value;
        emit_mat(os, in.u1);
        break;
    }
    if (!in.label.empty()) os << " #" << in.label;
    os << "\n";
    if (in.du_tag) {
      os << "dutag " << format_double(in.du_tag->J);
      emit_mat(os, in.du_tag->u_plus);
      emit_mat(os, in.du_tag->u_minus);
      emit_mat(os, in.du_tag->v_plus);
      emit_mat(os, in.du_tag->v_minus);
      os << "\n";
    }
  }
  return os.str();
}

Circuit parse_circuit(const std::string& text) {
  Circuit c;
  std::istringstream lines(text);
  std::string line;
  std::size_t lineno = 0;
  auto fail = [&](const std::string& msg) {
    throw std::invalid_argument("circuit parse error at line " + std::to_string(lineno) + ": " + msg);
  };
  auto parse_ref = [&](const std::string& tok, char prefix) {
    if (tok.size() < 2 || tok[0] != prefix) fail("expected " + std::string(1, prefix) + "<n>, got " + tok);
    return std::stoi(tok.substr(1));
  };

  if (!std::getline(lines, line)) fail("empty input");
  ++lineno;
  if (line != "holoq-circuit v1") fail("bad header");

  int max_site_bit = -1;
  std::vector<std::pair<int, int>> site_labels;
  while (std::getline(lines, line)) {
    ++lineno;
    std::string label;
    if (auto pos = line.find(" #"); pos != std::string::npos) {
      label = line.substr(pos + 2);
      line = line.substr(0, pos);
    }
    if (line.empty()) continue;
    std::istringstream is(line);
    std::string cmd, tok;
    is >> cmd;
    if (cmd == "nc") {
      is >> c.num_classical_bits;
      c.site_of_bit.assign(c.num_classical_bits, -1);
    } else if (cmd == "phase") {
      is >> tok;
      c.global_phase = parse_cx(tok);
    } else if (cmd == "site") {
      is >> tok;
      int bit = parse_ref(tok, 'c');
      int site;
      is >> site;
      site_labels.emplace_back(bit, site);
      max_site_bit = std::max(max_site_bit, bit);
    } else if (cmd == "herald") {
      is >> tok;
      c.herald_bit = parse_ref(tok, 'c');
    } else if (cmd == "alloc") {
      is >> tok;
      c.push(Instruction::allocate(parse_ref(tok, 'q')));
    } else if (cmd == "gate1") {
      is >> tok;
      int q = parse_ref(tok, 'q');
      auto in = Instruction::gate1(q, read_mat<Mat2>(is, 2, 2), label);
      c.push(in);
    } else if (cmd == "gate2") {
      is >> tok;
      int a = parse_ref(tok, 'q');
      is >> tok;
      int b = parse_ref(tok, 'q');
      c.push(Instruction::gate2(a, b, read_mat<Mat4>(is, 4, 4), label));
    } else if (cmd == "dutag") {
      if (c.instructions.empty() || c.instructions.back().kind != InstrKind::Gate2)
        fail("dutag must follow gate2");
      DualUnitaryTag tag;
      is >> tag.J;
      tag.u_plus = read_mat<Mat2>(is, 2, 2);
      tag.u_minus = read_mat<Mat2>(is, 2, 2);
      tag.v_plus = read_mat<Mat2>(is, 2, 2);
      tag.v_minus = read_mat<Mat2>(is, 2, 2);
      c.instructions.back().du_tag = tag;
    } else if (cmd == "measure") {
      is >> tok;
      int q = parse_ref(tok, 'q');
      is >> tok;
      int cbit = parse_ref(tok, 'c');
      is >> tok;
      if (tok != "Z" && tok != "X") fail("bad basis " + tok);
      c.push(Instruction::measure(q, cbit, tok == "Z" ? Basis::Z : Basis::X));
    } else if (cmd == "reset") {
      is >> tok;
      c.push(Instruction::reset(parse_ref(tok, 'q')));
    } else if (cmd == "cgate1") {
      is >> tok;
      int q = parse_ref(tok, 'q');
      is >> tok;
      int cbit = parse_ref(tok, 'c');
      int val;
      is >> val;
      c.push(Instruction::cond_gate1(q, read_mat<Mat2>(is, 2, 2), cbit, val));
    } else {
      fail("unknown directive " + cmd);
    }
    if (is.fail() && !is.eof()) fail("malformed line");
  }
  if (max_site_bit >= c.num_classical_bits)
    throw std::invalid_argument("site label references undeclared classical bit");
  for (auto [bit, site] : site_labels) c.site_of_bit[bit] = site;
  return c;
}

void write_circuit_file(const Circuit& circuit, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << serialize(circuit);
}

Circuit read_circuit_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for reading: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_circuit(ss.str());
}

}  // namespace holoq
