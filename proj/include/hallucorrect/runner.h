#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hallucorrect/embedding.h"
#include "hallucorrect/geval.h"
#include "hallucorrect/nli.h"
#include "hallucorrect/pipeline.h"
#include "hallucorrect/report.h"
#include "hallucorrect/types.h"

namespace hallucorrect {

// Output tree of one run:
//   <runs>/<run_id>/manifest.json, config.json, dataset.jsonl,
//   records/<record>.json, metrics/records.jsonl, metrics/aggregate.json,
//   report.txt, report.csv
struct RunPaths {
  std::filesystem::path root;
  std::filesystem::path manifest() const { return root / "manifest.json"; }
  std::filesystem::path config() const { return root / "config.json"; }
  std::filesystem::path dataset() const { return root / "dataset.jsonl"; }
  std::filesystem::path records() const { return root / "records"; }
  std::filesystem::path record(const std::string& id) const;
  std::filesystem::path metrics() const { return root / "metrics"; }
  std::filesystem::path metric_records() const { return metrics() / "records.jsonl"; }
  std::filesystem::path aggregate() const { return metrics() / "aggregate.json"; }
  std::filesystem::path report_text() const { return root / "report.txt"; }
  std::filesystem::path report_csv() const { return root / "report.csv"; }
};

// File-name-safe form of a record id; distinct ids stay distinct.
std::string record_file_stem(const std::string& id);

// "<system>-<source>[-<engine>-<mode>]-<digest prefix>" where the digest
// covers the config and the dataset.
std::string compute_run_id(const PipelineConfig& config, const std::string& dataset_digest);

struct RunOptions {
  std::filesystem::path runs_dir = "runs";
  std::size_t workers = 4;
  std::optional<std::string> run_id;  // overrides the computed id
};

/// Processes every record through the pipeline with a bounded worker pool
/// and persists one result file per record. Records that already have a
/// succeeded result are not processed again. Throws only for configuration
/// problems; record failures land in the manifest.
RunManifest run_batch(CorrectionPipeline& pipeline, const std::vector<SummaryRecord>& records,
                      const PipelineConfig& config, const RunOptions& options);

RecordResult load_record_result(const std::filesystem::path& path);
RunManifest load_manifest(const std::filesystem::path& run_dir);

struct Evaluator {
  std::shared_ptr<Embedder> embedder;
  std::shared_ptr<NliProvider> nli;
  std::shared_ptr<GevalJudge> judge;
  std::size_t workers = 4;
};

struct RecordMetrics {
  MetricReport report;
  bool nli_premise_truncated = false;
};

// All four metric families for one output against its gold summary. The
// judge sees the gold summary as the input.
RecordMetrics score_output(Evaluator& evaluator, const std::string& record_id, const std::string& output,
                           const std::string& gold);

struct EvaluationResult {
  std::vector<MetricReport> reports;
  AggregateRow aggregate;
  std::vector<std::string> skipped;  // failed or missing records
};

// Scores every succeeded record of a run and writes metrics/ and the
// report files. Throws Error{kNotFound} when the run does not exist and
// Error{kEmptyInput} when it has no succeeded records.
EvaluationResult evaluate_run(const std::filesystem::path& run_dir, Evaluator& evaluator);

AggregateRow load_aggregate(const std::filesystem::path& run_dir);

// Comparison table over evaluated runs.
std::string report_runs(const std::vector<std::filesystem::path>& run_dirs, TableFormat format = TableFormat::kText);

// Human-readable rendering of one record's trace.
std::string render_trace(const RecordResult& result);

}  // namespace hallucorrect
