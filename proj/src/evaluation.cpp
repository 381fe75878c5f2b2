#include "acqbench/evaluation.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace acqbench::eval {

namespace {

// Relative size under which the deviation of the differences is treated as exactly zero, so
// that constant differences like 0.7 - 0.6 vs 0.6 - 0.5 still count as degenerate.
constexpr double kDegenerateSd = 1e-12;

std::string fmt(double v, const char* spec = "%.6g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

}  // namespace

void AccuracyTable::validate() const {
  if (acc.empty()) throw std::invalid_argument("accuracy table '" + strategy + "' has no rounds");
  const std::size_t n = acc.front().size();
  for (const auto& row : acc) {
    if (row.size() != n) throw std::invalid_argument("accuracy table '" + strategy + "' is not rectangular");
    for (double v : row)
      if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("accuracy table '" + strategy + "' has a value outside [0,1]");
  }
}

double t_score(std::span<const double> a_i, std::span<const double> a_j) {
  if (a_i.size() != a_j.size()) throw std::invalid_argument("t_score: accuracy rows differ in length");
  const std::size_t n = a_i.size();
  if (n < 2) throw std::invalid_argument("t_score: needs at least 2 paired samples");
  std::vector<double> d(n);
  double mean = 0.0;
  for (std::size_t l = 0; l < n; ++l) {
    d[l] = a_i[l] - a_j[l];
    mean += d[l];
  }
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double v : d) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  double scale = 0.0;
  for (double v : d) scale = std::max(scale, std::abs(v));
  if (sd <= kDegenerateSd * std::max(1.0, scale)) {
    if (mean > 0.0) return std::numeric_limits<double>::infinity();
    if (mean < 0.0) return -std::numeric_limits<double>::infinity();
    return 0.0;
  }
  return std::sqrt(static_cast<double>(n)) * mean / sd;
}

double winning_rate(const AccuracyTable& a_i, const AccuracyTable& a_j, double critical) {
  a_i.validate();
  a_j.validate();
  if (a_i.rounds() != a_j.rounds() || a_i.seeds() != a_j.seeds())
    throw std::invalid_argument("winning_rate: tables '" + a_i.strategy + "' and '" + a_j.strategy + "' differ in shape");
  std::size_t wins = 0;
  for (std::size_t r = 0; r < a_i.rounds(); ++r)
    if (t_score(a_i.acc[r], a_j.acc[r]) > critical) ++wins;
  return static_cast<double>(wins) / static_cast<double>(a_i.rounds());
}

WinningRateMatrix heatmap(const std::vector<AccuracyTable>& tables, double critical) {
  if (tables.size() < 2) throw std::invalid_argument("heatmap: needs at least 2 strategies");
  for (const auto& t : tables) {
    t.validate();
    if (t.rounds() != tables.front().rounds() || t.seeds() != tables.front().seeds())
      throw std::invalid_argument("heatmap: table '" + t.strategy + "' is incongruent with '" + tables.front().strategy + "'");
  }
  const std::size_t k = tables.size();
  WinningRateMatrix m;
  m.critical = critical;
  m.win.assign(k, std::vector<double>(k, 0.0));
  m.row_average.assign(k, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    m.strategies.push_back(tables[i].strategy);
    for (std::size_t j = 0; j < k; ++j)
      if (i != j) m.win[i][j] = winning_rate(tables[i], tables[j], critical);
    double sum = 0.0;
    for (std::size_t j = 0; j < k; ++j)
      if (i != j) sum += m.win[i][j];
    m.row_average[i] = sum / static_cast<double>(k - 1);
  }
  return m;
}

std::string heatmap_csv(const WinningRateMatrix& m) {
  std::ostringstream out;
  out << "strategy";
  for (const auto& s : m.strategies) out << ',' << csv_field(s);
  out << ",row_average\n";
  for (std::size_t i = 0; i < m.strategies.size(); ++i) {
    out << csv_field(m.strategies[i]);
    for (double v : m.win[i]) out << ',' << fmt(v);
    out << ',' << fmt(m.row_average[i]) << '\n';
  }
  return out.str();
}

std::string heatmap_svg(const WinningRateMatrix& m) {
  const std::size_t k = m.strategies.size();
  const int cell = 56;
  const int label_w = 220;
  const int top = 170;
  const int width = label_w + static_cast<int>(k + 1) * cell + 20;
  const int height = top + static_cast<int>(k) * cell + 40;

  // White (0) to dark blue (1).
  auto colour = [](double v) {
    const int r = static_cast<int>(std::lround(255 - 205 * v));
    const int g = static_cast<int>(std::lround(255 - 155 * v));
    const int b = static_cast<int>(std::lround(255 - 55 * v));
    char buf[16];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
    return std::string(buf);
  };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"10\" y=\"20\" font-size=\"13\">winning rate (t &gt; " << fmt(m.critical, "%.3f") << ")</text>\n";
  for (std::size_t j = 0; j <= k; ++j) {
    const int x = label_w + static_cast<int>(j) * cell + cell / 2;
    const std::string name = j < k ? m.strategies[j] : std::string("row average");
    out << "<text transform=\"translate(" << x << "," << top - 8 << ") rotate(-60)\">" << xml_escape(name) << "</text>\n";
  }
  for (std::size_t i = 0; i < k; ++i) {
    const int y = top + static_cast<int>(i) * cell;
    out << "<text x=\"" << label_w - 6 << "\" y=\"" << y + cell / 2 + 4 << "\" text-anchor=\"end\">"
        << xml_escape(m.strategies[i]) << "</text>\n";
    for (std::size_t j = 0; j <= k; ++j) {
      const double v = j < k ? m.win[i][j] : m.row_average[i];
      const int x = label_w + static_cast<int>(j) * cell + (j == k ? 8 : 0);
      out << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cell << "\" height=\"" << cell << "\" fill=\""
          << colour(v) << "\" stroke=\"#888\"/>\n";
      out << "<text x=\"" << x + cell / 2 << "\" y=\"" << y + cell / 2 + 4 << "\" text-anchor=\"middle\" fill=\""
          << (v > 0.6 ? "white" : "black") << "\">" << fmt(100.0 * v, "%.0f") << "</text>\n";
    }
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace acqbench::eval
