#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hallucorrect/types.h"

namespace hallucorrect {

struct MalformedRow {
  std::size_t row = 0;  // 1-based position in the file
  std::string message;
};

struct IngestResult {
  std::vector<SummaryRecord> records;
  std::vector<MalformedRow> malformed;
  std::size_t rows_read = 0;
  std::size_t filtered_out = 0;
};

/// Loads a SummEdits file (a JSON array, or one object per line).
///
/// SummEdits rows map as seed_summary -> gold_summary, summary ->
/// input_summary, doc -> source_article, domain -> domain_tag and
/// label (1 = factual) -> is_factual. Rows already in SummaryRecord form
/// are read as they are. Rows that fail to map or validate, or repeat an
/// id, are reported with their row number and skipped. `domain` keeps
/// only rows with that tag. Throws Error{kNotFound} or Error{kParse} when
/// the file itself is missing or not JSON.
IngestResult load_summedits(const std::filesystem::path& path, const std::optional<std::string>& domain = "news");
IngestResult parse_summedits(const std::string& text, const std::optional<std::string>& domain = "news");

std::vector<SummaryRecord> read_records_jsonl(const std::filesystem::path& path);
void write_records_jsonl(const std::filesystem::path& path, const std::vector<SummaryRecord>& records);

// Digest of the records' canonical serialisation, in order.
std::string dataset_digest(const std::vector<SummaryRecord>& records);

std::string read_file(const std::filesystem::path& path);
// Writes through a temporary file and rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace hallucorrect
