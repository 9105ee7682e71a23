#include "hallucorrect/runner.h"

#include <atomic>
#include <chrono>
#include <mutex>
#include <sstream>
#include <thread>

#include <spdlog/spdlog.h>

#include "hallucorrect/dataset.h"
#include "hallucorrect/digest.h"
#include "hallucorrect/errors.h"
#include "hallucorrect/metrics.h"
#include "hallucorrect/serialize.h"
#include "hallucorrect/text_util.h"
#include "hallucorrect/validate.h"

namespace hallucorrect {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Runs fn(i) for i in [0, n) on up to `workers` threads.
void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn) {
  workers = std::max<std::size_t>(1, std::min(workers, n));
  std::atomic<std::size_t> next{0};
  auto loop = [&] {
    for (auto i = next++; i < n; i = next++) fn(i);
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(loop);
  loop();
  for (auto& t : pool) t.join();
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

fs::path RunPaths::record(const std::string& id) const { return records() / (record_file_stem(id) + ".json"); }

std::string record_file_stem(const std::string& id) {
  std::string stem;
  bool changed = false;
  for (unsigned char c : id) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.') {
      stem += static_cast<char>(c);
    } else {
      stem += '_';
      changed = true;
    }
  }
  if (stem.empty() || stem.front() == '.') changed = true;
  if (stem.size() > 80) {
    stem.resize(80);
    changed = true;
  }
  if (changed) stem += "-" + sha256_hex(id).substr(0, 8);
  return stem;
}

std::string compute_run_id(const PipelineConfig& config, const std::string& dataset_digest) {
  std::string id = to_string(config.system) + "-" + to_string(config.evidence_source);
  if (config.engine) id += "-" + to_string(*config.engine);
  if (config.mode) id += "-" + to_string(*config.mode);
  auto digest = sha256_hex(serialize(config) + "\n" + dataset_digest);
  return id + "-" + digest.substr(0, 12);
}

RecordResult load_record_result(const fs::path& path) { return deserialize<RecordResult>(read_file(path)); }

RunManifest load_manifest(const fs::path& run_dir) {
  RunPaths paths{run_dir};
  if (!fs::exists(paths.manifest())) throw Error(ErrorCode::kNotFound, "no run at " + run_dir.string());
  return deserialize<RunManifest>(read_file(paths.manifest()));
}

RunManifest run_batch(CorrectionPipeline& pipeline, const std::vector<SummaryRecord>& records,
                      const PipelineConfig& config, const RunOptions& options) {
  auto problems = validate(config);
  auto dataset_problems = validate(records);
  problems.insert(problems.end(), dataset_problems.begin(), dataset_problems.end());
  if (!problems.empty()) throw Error(ErrorCode::kConfig, join(problems, "; "));

  const auto start = std::chrono::steady_clock::now();
  RunManifest manifest;
  manifest.dataset_digest = dataset_digest(records);
  manifest.run_id = options.run_id.value_or(compute_run_id(config, manifest.dataset_digest));
  manifest.config = config;
  manifest.record_count = records.size();

  RunPaths paths{options.runs_dir / manifest.run_id};
  fs::create_directories(paths.records());
  if (fs::exists(paths.config())) {
    auto previous = deserialize<PipelineConfig>(read_file(paths.config()));
    if (!(previous == config)) {
      throw Error(ErrorCode::kConfig, "run " + manifest.run_id + " was made with a different configuration");
    }
  }
  write_file_atomic(paths.config(), to_text(json(config), 2) + "\n");
  write_records_jsonl(paths.dataset(), records);

  std::vector<char> ok(records.size(), 0);
  std::vector<double> seconds(records.size(), 0.0);
  std::atomic<std::size_t> reused{0};
  parallel_for(records.size(), options.workers, [&](std::size_t i) {
    const auto& record = records[i];
    auto path = paths.record(record.id);
    if (fs::exists(path)) {
      try {
        auto previous = load_record_result(path);
        if (previous.succeeded && previous.record_id == record.id) {
          ok[i] = 1;
          ++reused;
          return;
        }
      } catch (const Error& e) {
        spdlog::warn("ignoring unreadable result {}: {}", path.string(), e.what());
      }
    }
    const auto t0 = std::chrono::steady_clock::now();
    auto result = pipeline.run_record(record, config);
    seconds[i] = seconds_since(t0);
    ok[i] = result.succeeded ? 1 : 0;
    write_file_atomic(path, to_text(json(result), 2) + "\n");
  });

  for (std::size_t i = 0; i < records.size(); ++i) {
    (ok[i] ? manifest.succeeded : manifest.failed).push_back(records[i].id);
    manifest.record_seconds_total += seconds[i];
  }
  manifest.wall_seconds = seconds_since(start);
  write_file_atomic(paths.manifest(), to_text(json(manifest), 2) + "\n");
  spdlog::info("run {}: {} succeeded ({} reused), {} failed", manifest.run_id, manifest.succeeded.size(),
               reused.load(), manifest.failed.size());
  return manifest;
}

RecordMetrics score_output(Evaluator& evaluator, const std::string& record_id, const std::string& output,
                           const std::string& gold) {
  if (!evaluator.embedder || !evaluator.nli || !evaluator.judge) {
    throw Error(ErrorCode::kConfig, "evaluation needs an embedder, an NLI provider and a judge");
  }
  RecordMetrics m;
  m.report.record_id = record_id;
  m.report.ned = ned(output, gold);
  m.report.sem = semantic_similarity(*evaluator.embedder, output, gold);
  auto nli = nli_scores(*evaluator.nli, output, gold);
  m.report.nli = nli.triple;
  m.nli_premise_truncated = nli.premise_truncated;
  m.report.geval = evaluator.judge->all_aspects(gold, output);
  return m;
}

EvaluationResult evaluate_run(const fs::path& run_dir, Evaluator& evaluator) {
  RunPaths paths{run_dir};
  auto manifest = load_manifest(run_dir);
  auto records = read_records_jsonl(paths.dataset());

  EvaluationResult result;
  std::vector<std::pair<const SummaryRecord*, std::string>> todo;
  for (const auto& record : records) {
    auto path = paths.record(record.id);
    if (!fs::exists(path)) {
      result.skipped.push_back(record.id);
      continue;
    }
    auto rr = load_record_result(path);
    if (!rr.succeeded || !rr.response) {
      result.skipped.push_back(record.id);
      continue;
    }
    todo.emplace_back(&record, rr.response->text);
  }
  if (todo.empty()) throw Error(ErrorCode::kEmptyInput, "run " + manifest.run_id + " has no succeeded records");

  std::vector<RecordMetrics> scored(todo.size());
  std::exception_ptr failure;
  std::mutex failure_mu;
  parallel_for(todo.size(), evaluator.workers, [&](std::size_t i) {
    try {
      scored[i] = score_output(evaluator, todo[i].first->id, todo[i].second, todo[i].first->gold_summary);
    } catch (...) {
      std::lock_guard lock(failure_mu);
      if (!failure) failure = std::current_exception();
    }
  });
  if (failure) std::rethrow_exception(failure);

  std::string lines;
  for (const auto& m : scored) {
    result.reports.push_back(m.report);
    json j = m.report;
    j["nli_premise_truncated"] = m.nli_premise_truncated;
    lines += to_text(j) + "\n";
  }
  fs::create_directories(paths.metrics());
  write_file_atomic(paths.metric_records(), lines);

  AggregateRow meta;
  meta.system = manifest.config.system;
  meta.evidence_source = manifest.config.evidence_source;
  meta.engine = manifest.config.engine;
  meta.mode = manifest.config.mode;
  meta.label = manifest.run_id;
  result.aggregate = aggregate(result.reports, meta);
  write_file_atomic(paths.aggregate(), to_text(json(result.aggregate), 2) + "\n");
  write_file_atomic(paths.report_text(), render_table({result.aggregate}, TableFormat::kText));
  write_file_atomic(paths.report_csv(), render_table({result.aggregate}, TableFormat::kCsv));
  return result;
}

AggregateRow load_aggregate(const fs::path& run_dir) {
  RunPaths paths{run_dir};
  if (!fs::exists(paths.aggregate())) {
    throw Error(ErrorCode::kNotFound, "run at " + run_dir.string() + " has not been evaluated");
  }
  return deserialize<AggregateRow>(read_file(paths.aggregate()));
}

std::string report_runs(const std::vector<fs::path>& run_dirs, TableFormat format) {
  std::vector<AggregateRow> rows;
  for (const auto& dir : run_dirs) rows.push_back(load_aggregate(dir));
  return render_table(rows, format);
}

std::string render_trace(const RecordResult& result) {
  std::ostringstream out;
  out << "record " << result.record_id << ": " << (result.succeeded ? "succeeded" : "failed") << "\n";
  if (!result.succeeded) out << "error: " << result.error << "\n";
  if (!result.response) return out.str();
  const auto& r = *result.response;
  out << "system: " << to_string(r.system) << "\n";
  std::size_t n = 0;
  for (const auto& t : r.trace) {
    out << "\n=== [" << ++n << "] " << to_string(t.stage);
    if (!t.timestamp.empty()) out << " @ " << t.timestamp;
    out << " ===\n";
    out << "--- input ---\n" << t.prompt << "\n";
    out << "--- output ---\n" << t.raw_output << "\n";
    if (!t.parsed.is_null()) out << "--- parsed ---\n" << to_text(t.parsed, 2) << "\n";
    for (const auto& note : t.notes) out << "note: " << note << "\n";
  }
  out << "\n=== final ===\n" << r.text << "\n";
  return out.str();
}

}  // namespace hallucorrect
