#include "holoq/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace holoq {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  std::size_t b = s.find_last_not_of(" \t\r");
  if (a == std::string::npos) return {};
  return s.substr(a, b - a + 1);
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct KeyValue {
  std::string value;
  int line = 0;
};

}  // namespace

void RunConfig::validate() const {
  if (t < 0) throw config_error("model.t must be non-negative", 0, "model.t");
  if (two_L <= 0 || two_L % 2 != 0)
    throw config_error("model.two_l must be even and positive", 0, "model.two_l");
  if (num_slices <= 0) throw config_error("schedule.num_slices must be positive", 0,
                                          "schedule.num_slices");
  if (two_L != 2 * num_slices)
    throw config_error("model.two_l must equal 2*schedule.num_slices", 0, "schedule.num_slices");
  try {
    noise.validate();
  } catch (const std::exception& e) {
    throw config_error(std::string("noise: ") + e.what(), 0, "noise");
  }
  if (tebd.max_bond < 2) throw config_error("oracle.max_bond too small", 0, "oracle.max_bond");
  if (tebd.svd_cutoff < 0) throw config_error("oracle.svd_cutoff negative", 0,
                                              "oracle.svd_cutoff");
}

RunConfig parse_config_text(const std::string& text) {
  RunConfig cfg;
  std::map<std::string, KeyValue> kv;
  std::istringstream is(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (auto pos = line.find('#'); pos != std::string::npos) line = line.substr(0, pos);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw config_error("unterminated section header at line " + std::to_string(lineno),
                           lineno, line);
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw config_error("expected key = value at line " + std::to_string(lineno), lineno, line);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (section.empty())
      throw config_error("key outside any [section] at line " + std::to_string(lineno), lineno,
                         key);
    const std::string full = section + "." + key;
    if (kv.count(full))
      throw config_error("duplicate key " + full + " at line " + std::to_string(lineno), lineno,
                         full);
    kv[full] = {value, lineno};
  }

  std::set<std::string> consumed;
  auto take = [&](const std::string& full) -> const KeyValue* {
    auto it = kv.find(full);
    if (it == kv.end()) return nullptr;
    consumed.insert(full);
    return &it->second;
  };
  auto parse_double = [&](const std::string& full, double& out) {
    if (const auto* v = take(full)) {
      try {
        std::size_t used = 0;
        out = std::stod(v->value, &used);
        if (used != v->value.size()) throw std::invalid_argument("trailing characters");
      } catch (const std::exception&) {
        throw config_error("bad number for " + full + " at line " + std::to_string(v->line),
                           v->line, full);
      }
    }
  };
  auto parse_int = [&](const std::string& full, auto& out) {
    if (const auto* v = take(full)) {
      try {
        std::size_t used = 0;
        const long long parsed = std::stoll(v->value, &used);
        if (used != v->value.size()) throw std::invalid_argument("trailing characters");
        out = static_cast<std::decay_t<decltype(out)>>(parsed);
      } catch (const std::exception&) {
        throw config_error("bad integer for " + full + " at line " + std::to_string(v->line),
                           v->line, full);
      }
    }
  };
  auto parse_u64 = [&](const std::string& full, std::uint64_t& out) {
    if (const auto* v = take(full)) {
      try {
        std::size_t used = 0;
        out = std::stoull(v->value, &used);
        if (used != v->value.size()) throw std::invalid_argument("trailing characters");
      } catch (const std::exception&) {
        throw config_error("bad integer for " + full + " at line " + std::to_string(v->line),
                           v->line, full);
      }
    }
  };
  auto parse_bool = [&](const std::string& full, bool& out) {
    if (const auto* v = take(full)) {
      if (v->value == "true" || v->value == "on" || v->value == "1")
        out = true;
      else if (v->value == "false" || v->value == "off" || v->value == "0")
        out = false;
      else
        throw config_error("bad boolean for " + full + " at line " + std::to_string(v->line),
                           v->line, full);
    }
  };
  auto parse_string = [&](const std::string& full, std::string& out) {
    if (const auto* v = take(full)) out = v->value;
  };

  // model.h and model.t are required; everything else has defaults.
  if (!kv.count("model.h")) throw config_error("missing required field model.h", 0, "model.h");
  if (!kv.count("model.t")) throw config_error("missing required field model.t", 0, "model.t");

  parse_double("model.h", cfg.h);
  parse_int("model.t", cfg.t);
  parse_int("model.two_l", cfg.two_L);
  parse_double("mps.kx", cfg.kx);
  parse_double("mps.ky", cfg.ky);
  parse_double("mps.kz", cfg.kz);
  parse_string("mps.w_file", cfg.w_file);
  parse_int("schedule.num_slices", cfg.num_slices);
  parse_bool("schedule.swap_factor", cfg.swap_factor_enabled);
  parse_bool("schedule.temporal_boundary", cfg.temporal_boundary);
  if (const auto* v = take("schedule.gadget")) {
    if (v->value == "destructive")
      cfg.gadget = GadgetChoice::Destructive;
    else if (v->value == "qnd")
      cfg.gadget = GadgetChoice::Qnd;
    else if (v->value == "off")
      cfg.gadget = GadgetChoice::Off;
    else
      throw config_error("schedule.gadget must be destructive|qnd|off (line " +
                             std::to_string(v->line) + ")",
                         v->line, "schedule.gadget");
  }
  parse_double("noise.p_depol_tq", cfg.noise.p_depol_tq);
  parse_double("noise.p_leak_tq", cfg.noise.p_leak_tq);
  parse_double("noise.p_leak_meas_crosstalk", cfg.noise.p_leak_meas_crosstalk);
  parse_double("noise.p_leak_reset_crosstalk", cfg.noise.p_leak_reset_crosstalk);
  parse_int("noise.leaked_readout_bit", cfg.noise.leaked_readout_bit);
  parse_u64("sampling.shots", cfg.shots);
  parse_u64("sampling.master_seed", cfg.master_seed);
  parse_int("oracle.max_bond", cfg.tebd.max_bond);
  parse_double("oracle.svd_cutoff", cfg.tebd.svd_cutoff);
  parse_int("oracle.l_sites", cfg.tebd.l_sites);
  parse_int("oracle.padding_cells", cfg.tebd.padding_cells);
  parse_bool("oracle.exact_mode", cfg.tebd.exact_mode);
  parse_bool("oracle.bulk_compare", cfg.bulk_compare);
  parse_string("output.dir", cfg.out_dir);

  for (const auto& [key, v] : kv)
    if (!consumed.count(key))
      throw config_error("unknown key " + key + " at line " + std::to_string(v.line), v.line, key);

  cfg.validate();
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw config_error("cannot open config file: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config_text(ss.str());
}

std::string canonical_config(const RunConfig& c) {
  std::ostringstream os;
  os << "[model]\n";
  os << "h = " << fmt(c.h) << "\n";
  os << "t = " << c.t << "\n";
  os << "two_l = " << c.two_L << "\n";
  os << "[mps]\n";
  os << "kx = " << fmt(c.kx) << "\nky = " << fmt(c.ky) << "\nkz = " << fmt(c.kz) << "\n";
  if (!c.w_file.empty()) os << "w_file = " << c.w_file << "\n";
  os << "[schedule]\n";
  os << "num_slices = " << c.num_slices << "\n";
  os << "swap_factor = " << (c.swap_factor_enabled ? "true" : "false") << "\n";
  os << "temporal_boundary = " << (c.temporal_boundary ? "true" : "false") << "\n";
  os << "gadget = "
     << (c.gadget == GadgetChoice::Destructive ? "destructive"
                                               : c.gadget == GadgetChoice::Qnd ? "qnd" : "off")
     << "\n";
  os << "[noise]\n";
  os << "p_depol_tq = " << fmt(c.noise.p_depol_tq) << "\n";
  os << "p_leak_tq = " << fmt(c.noise.p_leak_tq) << "\n";
  os << "p_leak_meas_crosstalk = " << fmt(c.noise.p_leak_meas_crosstalk) << "\n";
  os << "p_leak_reset_crosstalk = " << fmt(c.noise.p_leak_reset_crosstalk) << "\n";
  os << "leaked_readout_bit = " << c.noise.leaked_readout_bit << "\n";
  os << "[sampling]\n";
  os << "shots = " << c.shots << "\n";
  os << "master_seed = " << c.master_seed << "\n";
  os << "[oracle]\n";
  os << "max_bond = " << c.tebd.max_bond << "\n";
  os << "svd_cutoff = " << fmt(c.tebd.svd_cutoff) << "\n";
  os << "l_sites = " << c.tebd.l_sites << "\n";
  os << "padding_cells = " << c.tebd.padding_cells << "\n";
  os << "exact_mode = " << (c.tebd.exact_mode ? "true" : "false") << "\n";
  os << "bulk_compare = " << (c.bulk_compare ? "true" : "false") << "\n";
  os << "[output]\n";
  os << "dir = " << c.out_dir << "\n";
  return os.str();
}

std::uint64_t config_hash(const RunConfig& config) {
  const std::string text = canonical_config(config);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

SdkiParams params_of(const RunConfig& config) { return {config.h, config.t, config.two_L}; }

SolvableMps mps_of(const RunConfig& config) {
  if (!config.w_file.empty()) return SolvableMps::from_unitary(read_unitary_file(config.w_file));
  return SolvableMps::from_kicks(config.kx, config.ky, config.kz);
}

WindowSpec window_of(const RunConfig& config) { return WindowSpec::defaults_for(config.two_L); }

MatX read_unitary_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw config_error("cannot open unitary file: " + path);
  std::vector<std::vector<Cx>> rows;
  std::string line;
  while (std::getline(f, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::vector<Cx> row;
    double re, im;
    while (ls >> re >> im) row.emplace_back(re, im);
    if (!row.empty()) rows.push_back(std::move(row));
  }
  if (rows.empty()) throw config_error("empty unitary file: " + path);
  const std::size_t n = rows.size();
  MatX w(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i].size() != n)
      throw config_error("unitary file is not square: " + path);
    for (std::size_t j = 0; j < n; ++j) w(i, j) = rows[i][j];
  }
  return w;
}

void write_unitary_file(const MatX& w, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  for (Eigen::Index i = 0; i < w.rows(); ++i) {
    for (Eigen::Index j = 0; j < w.cols(); ++j) {
      if (j) f << " ";
      f << fmt(w(i, j).real()) << " " << fmt(w(i, j).imag());
    }
    f << "\n";
  }
}

}  // namespace holoq
