#include "holoq/estimator.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace holoq {

ShotLine shot_line_of(const ShotRecord& record, const std::vector<int>& site_of_bit,
                      int num_sites) {
  ShotLine line;
  line.index = record.shot_index;
  line.herald = record.herald;
  line.seed = record.seed;
  line.site_bits.assign(num_sites, 0);
  std::vector<bool> seen(num_sites + 1, false);
  for (std::size_t bit = 0; bit < site_of_bit.size(); ++bit) {
    const int site = site_of_bit[bit];
    if (site <= 0) continue;
    if (site > num_sites) throw std::invalid_argument("site label beyond window");
    if (seen[site]) throw std::invalid_argument("duplicate site label");
    seen[site] = true;
    line.site_bits[site - 1] = record.classical_bits.at(bit);
  }
  for (int s = 1; s <= num_sites; ++s)
    if (!seen[s])
      throw std::invalid_argument("no measurement labeled for site " + std::to_string(s));
  return line;
}

std::string serialize_shot_lines(const std::vector<ShotLine>& lines) {
  std::ostringstream os;
  for (const auto& l : lines) {
    os << l.index << " ";
    if (l.herald < 0)
      os << "-";
    else
      os << l.herald;
    os << " ";
    for (auto b : l.site_bits) os << static_cast<int>(b);
    os << " " << l.seed << "\n";
  }
  return os.str();
}

std::vector<ShotLine> parse_shot_lines(const std::string& text) {
  std::vector<ShotLine> lines;
  std::istringstream is(text);
  std::string row;
  while (std::getline(is, row)) {
    if (row.empty()) continue;
    std::istringstream ls(row);
    ShotLine l;
    std::string herald, bits;
    if (!(ls >> l.index >> herald >> bits >> l.seed))
      throw std::invalid_argument("bad shot line: " + row);
    l.herald = (herald == "-") ? -1 : std::stoi(herald);
    for (char c : bits) {
      if (c != '0' && c != '1') throw std::invalid_argument("bad outcome bit in: " + row);
      l.site_bits.push_back(c == '1');
    }
    lines.push_back(std::move(l));
  }
  return lines;
}

ShotMatrix ShotMatrix::from_lines(const std::vector<ShotLine>& lines, int two_L,
                                  bool herald_filtered) {
  ShotMatrix m;
  m.two_L = two_L;
  m.herald_filtered = herald_filtered;
  for (const auto& l : lines) {
    if (static_cast<int>(l.site_bits.size()) != two_L)
      throw std::invalid_argument("shot has " + std::to_string(l.site_bits.size()) +
                                  " sites, expected " + std::to_string(two_L));
    std::vector<std::int8_t> row(two_L);
    for (int s = 0; s < two_L; ++s) row[s] = l.site_bits[s] ? -1 : 1;
    m.rows.push_back(std::move(row));
  }
  return m;
}

ShotMatrix ShotMatrix::from_records(const std::vector<ShotRecord>& records,
                                    const std::vector<int>& site_of_bit, int two_L,
                                    bool herald_filtered) {
  std::vector<ShotLine> lines;
  lines.reserve(records.size());
  for (const auto& r : records) lines.push_back(shot_line_of(r, site_of_bit, two_L));
  return from_lines(lines, two_L, herald_filtered);
}

CorrelatorTable estimate_correlators(const ShotMatrix& shots, const WindowSpec& window, int t) {
  if (shots.num_shots() < 2)
    throw std::invalid_argument("estimator needs at least two shots for a standard error");
  if (shots.two_L != window.two_L)
    throw std::invalid_argument("window size does not match shot matrix");
  const double n_s = static_cast<double>(shots.num_shots());

  CorrelatorTable table;
  for (int r = 0; r <= window.max_r(); ++r) {
    if (window.empty_for(r)) {
      table.omitted.push_back({r, t, "empty averaging window"});
      continue;
    }
    const auto pairs = window.pairs(r);
    double mean = 0.0, m2 = 0.0;
    long count = 0;
    for (const auto& row : shots.rows) {
      int acc = 0;
      for (const auto& [j, k] : pairs) acc += row[j - 1] * row[k - 1];
      const double s_n = static_cast<double>(acc) / static_cast<double>(pairs.size());
      // Welford accumulation of the per-shot statistic.
      ++count;
      const double d = s_n - mean;
      mean += d / static_cast<double>(count);
      m2 += d * (s_n - mean);
    }
    const double var = m2 / (n_s - 1.0);
    CorrelatorEntry e;
    e.alpha = 'x';
    e.beta = 'x';
    e.r = r;
    e.t = t;
    e.value = mean;
    e.stderr_ = std::sqrt(std::max(0.0, var) / n_s);
    e.n_terms = static_cast<long>(pairs.size());
    table.entries.push_back(e);
  }
  return table;
}

}  // namespace holoq
