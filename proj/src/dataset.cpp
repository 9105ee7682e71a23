#include "hallucorrect/dataset.h"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include "hallucorrect/digest.h"
#include "hallucorrect/errors.h"
#include "hallucorrect/serialize.h"
#include "hallucorrect/text_util.h"
#include "hallucorrect/validate.h"

namespace hallucorrect {

namespace {

using nlohmann::json;

std::optional<std::string> string_field(const json& row, std::initializer_list<const char*> keys) {
  for (const char* k : keys) {
    auto it = row.find(k);
    if (it == row.end() || it->is_null()) continue;
    if (it->is_string()) return it->get<std::string>();
    if (it->is_number_integer()) return std::to_string(it->get<long long>());
    throw Error(ErrorCode::kParse, std::string("field '") + k + "' is not text");
  }
  return std::nullopt;
}

SummaryRecord map_row(const json& row, std::size_t row_number) {
  if (!row.is_object()) throw Error(ErrorCode::kParse, "row is not an object");
  SummaryRecord r;
  if (row.contains("gold_summary") || row.contains("input_summary")) {
    try {
      r = row.get<SummaryRecord>();
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kParse, e.what());
    }
    return r;
  }
  auto domain = string_field(row, {"domain", "domain_tag"}).value_or("news");
  r.id = string_field(row, {"id", "sample_id", "summary_id"}).value_or(domain + "-" + std::to_string(row_number));
  r.gold_summary = string_field(row, {"seed_summary"}).value_or("");
  r.input_summary = string_field(row, {"summary"}).value_or("");
  r.source_article = string_field(row, {"doc", "document", "article"});
  r.domain_tag = domain;
  if (auto it = row.find("label"); it != row.end() && !it->is_null()) {
    if (it->is_boolean()) {
      r.is_factual = it->get<bool>();
    } else if (it->is_number()) {
      r.is_factual = it->get<double>() == 1.0;
    } else {
      throw Error(ErrorCode::kParse, "label is not 0/1");
    }
  }
  return r;
}

// A JSON array, or one object per nonblank line. Unparseable lines become
// discarded placeholders so row numbers stay aligned.
void split_rows(const std::string& text, std::vector<json>& parsed, std::vector<MalformedRow>& malformed) {
  auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '[') {
    json all = parse_json(text);
    if (!all.is_array()) throw Error(ErrorCode::kParse, "dataset is not a JSON array");
    for (auto& row : all) parsed.push_back(std::move(row));
    return;
  }
  std::size_t row = 0;
  for (const auto& line : split_lines(text)) {
    if (trim(line).empty()) continue;
    ++row;
    try {
      parsed.push_back(parse_json(line));
    } catch (const Error& e) {
      malformed.push_back({row, e.what()});
      parsed.emplace_back(json::value_t::discarded);
    }
  }
}

}  // namespace

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kNotFound, "cannot read " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  static std::atomic<unsigned> counter{0};
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp" + std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id())) + "-" +
         std::to_string(counter++);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kInvalidArgument, "cannot write " + tmp.string());
    out << content;
    if (!out) throw Error(ErrorCode::kInvalidArgument, "short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

IngestResult parse_summedits(const std::string& text, const std::optional<std::string>& domain) {
  IngestResult result;
  std::vector<json> rows;
  split_rows(text, rows, result.malformed);
  result.rows_read = rows.size();
  std::set<std::string> seen;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::size_t row_number = i + 1;
    if (rows[i].is_discarded()) continue;
    try {
      auto record = map_row(rows[i], row_number);
      if (domain && record.domain_tag != *domain) {
        ++result.filtered_out;
        continue;
      }
      auto problems = validate(record);
      if (!problems.empty()) {
        result.malformed.push_back({row_number, join(problems, "; ")});
        continue;
      }
      if (!seen.insert(record.id).second) {
        result.malformed.push_back({row_number, "duplicate id " + record.id});
        continue;
      }
      result.records.push_back(std::move(record));
    } catch (const Error& e) {
      result.malformed.push_back({row_number, e.what()});
    }
  }
  std::sort(result.malformed.begin(), result.malformed.end(),
            [](const MalformedRow& a, const MalformedRow& b) { return a.row < b.row; });
  return result;
}

IngestResult load_summedits(const std::filesystem::path& path, const std::optional<std::string>& domain) {
  return parse_summedits(read_file(path), domain);
}

std::vector<SummaryRecord> read_records_jsonl(const std::filesystem::path& path) {
  std::vector<SummaryRecord> out;
  std::size_t row = 0;
  for (const auto& line : split_lines(read_file(path))) {
    ++row;
    if (trim(line).empty()) continue;
    try {
      out.push_back(deserialize<SummaryRecord>(line));
    } catch (const Error& e) {
      throw Error(ErrorCode::kParse, path.string() + ":" + std::to_string(row) + ": " + e.what());
    }
  }
  return out;
}

void write_records_jsonl(const std::filesystem::path& path, const std::vector<SummaryRecord>& records) {
  std::string text;
  for (const auto& r : records) text += serialize(r) + "\n";
  write_file_atomic(path, text);
}

std::string dataset_digest(const std::vector<SummaryRecord>& records) {
  std::string text;
  for (const auto& r : records) text += serialize(r) + "\n";
  return sha256_hex(text);
}

}  // namespace hallucorrect
