#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "hallucorrect/types.h"

namespace hallucorrect {

enum class Column { kNed, kSem, kEnt, kNeu, kCon, kOverall, kFactual, kRelev };

inline constexpr std::array<Column, 8> kColumns{Column::kNed,  Column::kSem,     Column::kEnt,     Column::kNeu,
                                                Column::kCon,  Column::kOverall, Column::kFactual, Column::kRelev};

std::string column_header(Column c);
// NED and contradiction are better when lower; every other column when higher.
bool lower_is_better(Column c);
double column_value(const AggregateRow& row, Column c);

// Means of every field. `meta` supplies label/system/source/engine/mode.
// Throws Error{kEmptyInput} for no reports.
AggregateRow aggregate(const std::vector<MetricReport>& reports, const AggregateRow& meta = {});

// Weighted (by n) mean of shard rows; metadata comes from the first shard.
AggregateRow combine(const std::vector<AggregateRow>& shards);

// Half-up rounding of value*100 to an integer, as text ("95").
std::string display_percent(double value);
// Two decimals, half-up ("0.14").
std::string display_decimal(double value);
std::string display_value(Column c, double value);

std::string default_label(const AggregateRow& row);

// marks[i][j]: row i holds the best value of column j. Raw means are
// compared; exact ties mark every tied row.
std::vector<std::array<bool, 8>> best_marks(const std::vector<AggregateRow>& rows);

enum class TableFormat { kText, kCsv, kTsv };
TableFormat parse_table_format(const std::string& s);

// One row per input row, columns NED, Sem., Ent., Neu., Con., Overall,
// Factual., Relev.; best values carry a trailing '*'.
std::string render_table(const std::vector<AggregateRow>& rows, TableFormat format = TableFormat::kText);

}  // namespace hallucorrect
