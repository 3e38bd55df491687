#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <set>

#include "ias/csv.hpp"
#include "ias/errors.hpp"
#include "ias/experiments.hpp"

namespace ias {
namespace {

std::optional<double> parse_number(const std::string& text) {
  if (text.empty()) return std::nullopt;
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  return std::nullopt;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  return v.size() % 2 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

const std::set<std::string>& identifier_columns() {
  static const std::set<std::string> ids{"graph", "scm", "dataset", "run"};
  return ids;
}

}  // namespace

WilsonInterval wilson_interval(double successes, double trials, double z) {
  if (trials <= 0.0) return {0.0, 1.0};
  const double p = successes / trials;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / trials;
  const double centre = (p + z2 / (2.0 * trials)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / trials + z2 / (4.0 * trials * trials)) / denom;
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

void summarize(std::istream& in, std::ostream& out, const std::optional<std::string>& nest_by) {
  CsvReader reader(in);
  std::vector<std::string> header;
  if (!reader.next(header) || header.empty() || header.front() != "cell_id") {
    throw ParseError("result table must start with a cell_id column");
  }
  std::optional<std::size_t> nest_column;
  if (nest_by) {
    const auto it = std::find(header.begin(), header.end(), *nest_by);
    if (it == header.end()) throw ArgumentError("no column named '" + *nest_by + "'");
    nest_column = static_cast<std::size_t>(it - header.begin());
  }

  // cell -> rows, in first-seen cell order.
  std::vector<std::string> cells;
  std::map<std::string, std::vector<std::vector<std::string>>> rows;
  std::vector<std::string> fields;
  while (reader.next(fields)) {
    if (fields.size() == 1 && fields[0].empty()) continue;
    if (fields.size() != header.size()) throw ParseError("result row has " + std::to_string(fields.size()) + " fields");
    auto& bucket = rows[fields[0]];
    if (bucket.empty()) cells.push_back(fields[0]);
    bucket.push_back(fields);
  }

  // A column is a metric when every non-empty entry is numeric and it varies
  // inside at least one cell.
  std::vector<std::size_t> metrics;
  for (std::size_t c = 1; c < header.size(); ++c) {
    if (identifier_columns().contains(header[c]) || (nest_column && c == *nest_column)) continue;
    bool numeric = true;
    bool varies = false;
    for (const auto& cell : cells) {
      std::optional<std::string> first;
      for (const auto& r : rows[cell]) {
        if (r[c].empty()) continue;
        if (!parse_number(r[c])) numeric = false;
        if (!first) first = r[c];
        else if (*first != r[c]) varies = true;
      }
    }
    if (numeric && varies) metrics.push_back(c);
  }

  out << "cell_id,metric,count,mean,median,ci_low,ci_high\n";
  for (const auto& cell : cells) {
    for (std::size_t c : metrics) {
      std::vector<double> values;
      if (nest_column) {
        std::map<std::string, std::pair<double, std::size_t>> groups;
        std::vector<std::string> order;
        for (const auto& r : rows[cell]) {
          const auto v = parse_number(r[c]);
          if (!v) continue;
          auto [it, fresh] = groups.try_emplace(r[*nest_column], 0.0, 0);
          if (fresh) order.push_back(r[*nest_column]);
          it->second.first += *v;
          ++it->second.second;
        }
        for (const auto& key : order) values.push_back(groups[key].first / static_cast<double>(groups[key].second));
      } else {
        for (const auto& r : rows[cell]) {
          if (const auto v = parse_number(r[c])) values.push_back(*v);
        }
      }
      if (values.empty()) continue;
      double sum = 0.0;
      bool binary = true;
      for (double v : values) {
        sum += v;
        binary = binary && (v == 0.0 || v == 1.0);
      }
      const double count = static_cast<double>(values.size());
      std::string low;
      std::string high;
      if (binary) {
        const auto ci = wilson_interval(sum, count);
        low = format_double(ci.low);
        high = format_double(ci.high);
      }
      out << csv_escape(cell) << ',' << csv_escape(header[c]) << ',' << values.size() << ','
          << format_double(sum / count) << ',' << format_double(median(values)) << ',' << low << ',' << high << '\n';
    }
  }
}

}  // namespace ias
