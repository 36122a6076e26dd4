#include "holoq/correlators.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace holoq {

int WindowSpec::max_r() const {
  int r = 0;
  while (!empty_for(r + 1)) ++r;
  return r;
}

std::vector<std::pair<int, int>> WindowSpec::pairs(int r) const {
  std::vector<std::pair<int, int>> out;
  for (int j = j_min; j <= j_max(r); ++j)
    for (int delta = 0; delta <= 1; ++delta) out.emplace_back(j, j + r + delta);
  return out;
}

WindowSpec WindowSpec::defaults_for(int two_L) {
  WindowSpec w;
  w.two_L = two_L;
  w.j_min = (two_L == 32) ? 9 : 1;
  return w;
}

const CorrelatorEntry* CorrelatorTable::find(int r, int t) const {
  for (const auto& e : entries)
    if (e.r == r && e.t == t) return &e;
  return nullptr;
}

bool CorrelatorTable::any_binned() const {
  return std::any_of(entries.begin(), entries.end(), [](const auto& e) { return e.binned; });
}

CorrelatorTable bin_symmetry(const CorrelatorTable& table) {
  if (table.any_binned())
    throw std::invalid_argument("bin_symmetry: table is already binned");
  CorrelatorTable out;
  out.omitted = table.omitted;
  // key: (alpha, beta, t, bin id); bin id -1/-2 for the unbinned r=0/1 rows
  std::map<std::tuple<char, char, int, int>, std::vector<const CorrelatorEntry*>> groups;
  for (const auto& e : table.entries) {
    const int bin = (e.r <= 1) ? -1 - e.r : e.r / 2;
    groups[{e.alpha, e.beta, e.t, bin}].push_back(&e);
  }
  for (const auto& [key, members] : groups) {
    CorrelatorEntry agg = *members.front();
    if (std::get<3>(key) < 0) {
      out.entries.push_back(agg);  // r = 0, 1 reported unbinned
      continue;
    }
    double value = 0.0, var = 0.0;
    long n_terms = 0;
    for (const auto* e : members) {
      value += e->value;
      var += e->stderr_ * e->stderr_;
      n_terms += e->n_terms;
    }
    const double m = static_cast<double>(members.size());
    agg.value = value / m;
    agg.stderr_ = std::sqrt(var) / m;
    agg.n_terms = n_terms;
    agg.r = members.front()->r - members.front()->r % 2;  // bin labeled by even member
    agg.binned = true;
    out.entries.push_back(agg);
  }
  std::sort(out.entries.begin(), out.entries.end(), [](const auto& a, const auto& b) {
    return std::tie(a.t, a.alpha, a.beta, a.r) < std::tie(b.t, b.alpha, b.beta, b.r);
  });
  return out;
}

ErrorTable normalized_errors(const CorrelatorTable& expt, const CorrelatorTable& theory) {
  ErrorTable out;
  double sum = 0.0;
  for (const auto& e : expt.entries) {
    const CorrelatorEntry* th = nullptr;
    for (const auto& cand : theory.entries)
      if (cand.alpha == e.alpha && cand.beta == e.beta && cand.r == e.r && cand.t == e.t &&
          cand.binned == e.binned) {
        th = &cand;
        break;
      }
    if (!th)
      throw std::invalid_argument("normalized_errors: theory table lacks entry r=" +
                                  std::to_string(e.r) + " t=" + std::to_string(e.t));
    ErrorEntry err;
    err.r = e.r;
    err.t = e.t;
    err.c_expt = e.value;
    err.c_theory = th->value;
    err.stderr_ = e.stderr_;
    if (e.stderr_ > 0.0) {
      err.epsilon = std::abs(e.value - th->value) / e.stderr_;
      err.valid = true;
      sum += err.epsilon;
      ++out.valid_count;
    } else {
      err.epsilon = std::numeric_limits<double>::quiet_NaN();
      err.valid = false;
      ++out.invalid_count;
    }
    out.entries.push_back(err);
  }
  out.mean_epsilon = out.valid_count ? sum / static_cast<double>(out.valid_count) : 0.0;
  return out;
}

namespace {
std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}
}  // namespace

std::string correlator_csv(const CorrelatorTable& table) {
  std::ostringstream os;
  os << "alpha,beta,r,t,value,stderr,n_terms,binned\n";
  for (const auto& e : table.entries)
    os << e.alpha << "," << e.beta << "," << e.r << "," << e.t << "," << fmt(e.value) << ","
       << fmt(e.stderr_) << "," << e.n_terms << "," << (e.binned ? 1 : 0) << "\n";
  for (const auto& o : table.omitted)
    os << "# omitted r=" << o.r << " t=" << o.t << ": " << o.reason << "\n";
  return os.str();
}

CorrelatorTable parse_correlator_csv(const std::string& text) {
  CorrelatorTable table;
  std::istringstream is(text);
  std::string line;
  bool header = true;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      if (line != "alpha,beta,r,t,value,stderr,n_terms,binned")
        throw std::invalid_argument("bad correlator CSV header: " + line);
      header = false;
      continue;
    }
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    CorrelatorEntry e;
    int binned = 0;
    if (!(ls >> e.alpha >> e.beta >> e.r >> e.t >> e.value >> e.stderr_ >> e.n_terms >> binned))
      throw std::invalid_argument("bad correlator CSV row: " + line);
    e.binned = binned != 0;
    table.entries.push_back(e);
  }
  return table;
}

void write_correlator_csv(const CorrelatorTable& table, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << correlator_csv(table);
}

CorrelatorTable read_correlator_csv(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for reading: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_correlator_csv(ss.str());
}

}  // namespace holoq
