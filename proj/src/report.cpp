#include "hallucorrect/report.h"

#include <cmath>
#include <iomanip>
#include <sstream>

#include "hallucorrect/errors.h"
#include "hallucorrect/text_util.h"

namespace hallucorrect {

std::string column_header(Column c) {
  switch (c) {
    case Column::kNed:
      return "NED";
    case Column::kSem:
      return "Sem.";
    case Column::kEnt:
      return "Ent.";
    case Column::kNeu:
      return "Neu.";
    case Column::kCon:
      return "Con.";
    case Column::kOverall:
      return "Overall";
    case Column::kFactual:
      return "Factual.";
    case Column::kRelev:
      return "Relev.";
  }
  return "";
}

bool lower_is_better(Column c) { return c == Column::kNed || c == Column::kCon; }

double column_value(const AggregateRow& row, Column c) {
  switch (c) {
    case Column::kNed:
      return row.ned;
    case Column::kSem:
      return row.sem;
    case Column::kEnt:
      return row.nli.entailment;
    case Column::kNeu:
      return row.nli.neutral;
    case Column::kCon:
      return row.nli.contradiction;
    case Column::kOverall:
      return row.geval.overall;
    case Column::kFactual:
      return row.geval.factuality;
    case Column::kRelev:
      return row.geval.relevance;
  }
  return 0.0;
}

AggregateRow aggregate(const std::vector<MetricReport>& reports, const AggregateRow& meta) {
  if (reports.empty()) throw Error(ErrorCode::kEmptyInput, "cannot aggregate zero reports");
  AggregateRow row = meta;
  row.n = reports.size();
  row.ned = row.sem = 0.0;
  row.nli = {};
  row.geval = {};
  for (const auto& r : reports) {
    row.ned += r.ned;
    row.sem += r.sem;
    row.nli.entailment += r.nli.entailment;
    row.nli.neutral += r.nli.neutral;
    row.nli.contradiction += r.nli.contradiction;
    row.geval.overall += r.geval.overall;
    row.geval.factuality += r.geval.factuality;
    row.geval.relevance += r.geval.relevance;
  }
  const double n = static_cast<double>(reports.size());
  row.ned /= n;
  row.sem /= n;
  row.nli.entailment /= n;
  row.nli.neutral /= n;
  row.nli.contradiction /= n;
  row.geval.overall /= n;
  row.geval.factuality /= n;
  row.geval.relevance /= n;
  if (row.label.empty()) row.label = default_label(row);
  return row;
}

AggregateRow combine(const std::vector<AggregateRow>& shards) {
  if (shards.empty()) throw Error(ErrorCode::kEmptyInput, "cannot combine zero shards");
  AggregateRow row = shards.front();
  std::size_t total = 0;
  for (const auto& s : shards) total += s.n;
  if (total == 0) throw Error(ErrorCode::kEmptyInput, "shards hold no reports");
  const double n = static_cast<double>(total);
  auto mean = [&](auto field) {
    double acc = 0.0;
    for (const auto& s : shards) acc += field(s) * static_cast<double>(s.n);
    return acc / n;
  };
  row.n = total;
  row.ned = mean([](const AggregateRow& s) { return s.ned; });
  row.sem = mean([](const AggregateRow& s) { return s.sem; });
  row.nli.entailment = mean([](const AggregateRow& s) { return s.nli.entailment; });
  row.nli.neutral = mean([](const AggregateRow& s) { return s.nli.neutral; });
  row.nli.contradiction = mean([](const AggregateRow& s) { return s.nli.contradiction; });
  row.geval.overall = mean([](const AggregateRow& s) { return s.geval.overall; });
  row.geval.factuality = mean([](const AggregateRow& s) { return s.geval.factuality; });
  row.geval.relevance = mean([](const AggregateRow& s) { return s.geval.relevance; });
  return row;
}

namespace {

// Half-up at a fixed number of decimals, tolerant of binary representation
// error right at the half.
long long half_up(double value, int decimals) {
  const double scaled = value * std::pow(10.0, decimals);
  return static_cast<long long>(std::floor(scaled + 0.5 + 1e-9));
}

}  // namespace

std::string display_percent(double value) { return std::to_string(half_up(value, 2)); }

std::string display_decimal(double value) {
  auto hundredths = half_up(value, 2);
  std::ostringstream out;
  if (hundredths < 0) {
    out << '-';
    hundredths = -hundredths;
  }
  out << hundredths / 100 << '.' << std::setw(2) << std::setfill('0') << hundredths % 100;
  return out.str();
}

std::string display_value(Column c, double value) {
  return c == Column::kNed ? display_decimal(value) : display_percent(value);
}

std::string default_label(const AggregateRow& row) {
  std::string label = to_string(row.system) + "/" + to_string(row.evidence_source);
  if (row.engine) label += "/" + to_string(*row.engine);
  if (row.mode) label += "/" + to_string(*row.mode);
  return label;
}

std::vector<std::array<bool, 8>> best_marks(const std::vector<AggregateRow>& rows) {
  std::vector<std::array<bool, 8>> marks(rows.size());
  for (std::size_t j = 0; j < kColumns.size(); ++j) {
    const auto col = kColumns[j];
    if (rows.empty()) break;
    double best = column_value(rows.front(), col);
    for (const auto& r : rows) {
      double v = column_value(r, col);
      best = lower_is_better(col) ? std::min(best, v) : std::max(best, v);
    }
    for (std::size_t i = 0; i < rows.size(); ++i) marks[i][j] = column_value(rows[i], col) == best;
  }
  return marks;
}

TableFormat parse_table_format(const std::string& s) {
  auto v = to_lower_ascii(trim(s));
  if (v == "text" || v == "txt") return TableFormat::kText;
  if (v == "csv") return TableFormat::kCsv;
  if (v == "tsv") return TableFormat::kTsv;
  throw Error(ErrorCode::kInvalidArgument, "unknown table format '" + s + "'");
}

namespace {

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string render_table(const std::vector<AggregateRow>& rows, TableFormat format) {
  auto marks = best_marks(rows);
  std::vector<std::vector<std::string>> cells;
  std::vector<std::string> header{"Run", "n"};
  for (auto c : kColumns) header.push_back(column_header(c));
  cells.push_back(header);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::vector<std::string> line{rows[i].label.empty() ? default_label(rows[i]) : rows[i].label,
                                  std::to_string(rows[i].n)};
    for (std::size_t j = 0; j < kColumns.size(); ++j) {
      auto v = display_value(kColumns[j], column_value(rows[i], kColumns[j]));
      line.push_back(marks[i][j] ? v + "*" : v);
    }
    cells.push_back(std::move(line));
  }

  std::ostringstream out;
  if (format == TableFormat::kText) {
    std::vector<std::size_t> width(header.size(), 0);
    for (const auto& line : cells) {
      for (std::size_t j = 0; j < line.size(); ++j) width[j] = std::max(width[j], utf8_to_u32(line[j]).size());
    }
    for (const auto& line : cells) {
      std::string text;
      for (std::size_t j = 0; j < line.size(); ++j) {
        auto pad = std::string(width[j] - utf8_to_u32(line[j]).size(), ' ');
        text += j == 0 ? line[j] + pad : "  " + pad + line[j];
      }
      out << text << '\n';
    }
    out << "(* best in column; NED and Con. lower is better, others higher)\n";
    return out.str();
  }
  const char sep = format == TableFormat::kCsv ? ',' : '\t';
  for (const auto& line : cells) {
    for (std::size_t j = 0; j < line.size(); ++j) {
      if (j) out << sep;
      out << (format == TableFormat::kCsv ? csv_cell(line[j]) : line[j]);
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace hallucorrect
