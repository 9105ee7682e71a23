#include <cstdio>
#include <iostream>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "hallucorrect/dataset.h"
#include "hallucorrect/http.h"
#include "hallucorrect/llm_backends.h"
#include "hallucorrect/providers.h"
#include "hallucorrect/runner.h"
#include "hallucorrect/serialize.h"
#include "hallucorrect/text_util.h"
#include "hallucorrect/validate.h"

using namespace hallucorrect;
namespace fs = std::filesystem;

namespace {

struct Common {
  std::string runs_dir = "runs";
  std::string cache_dir = ".hc-cache";
  std::string log_level = "info";
};

struct IngestArgs {
  std::string input;
  std::string output;
  std::string domain = "news";
  bool include_factual = false;
};

struct RunArgs {
  std::string dataset;
  std::string config_file;
  std::optional<std::string> system, source, engine, mode, backend, selection;
  std::optional<int> max_questions, top_n, chunk_size, chunk_overlap;
  std::optional<double> temperature;
  std::size_t workers = 4;
  std::optional<std::size_t> limit;
  std::optional<std::string> run_id;
  std::string domain = "news";
  bool include_factual = false;
  std::optional<std::string> fixture_dir;
  std::string fixture_mode = "record";
  double search_rate = 1.0;
  std::size_t max_failed = 0;
  bool no_cache = false;
};

struct EvalArgs {
  std::vector<std::string> runs;
  std::string embedder = "hashing";
  std::string nli = "lexical";
  std::optional<std::string> judge_backend;
  std::size_t workers = 4;
};

struct ReportArgs {
  std::vector<std::string> runs;
  std::string format = "text";
  std::optional<std::string> output;
};

struct ReplayArgs {
  std::string run;
  std::optional<std::string> record;
  bool json = false;
};

// A bare id resolves under the runs directory; anything that exists as a
// path is taken as is.
fs::path resolve_run(const Common& common, const std::string& run) {
  fs::path p(run);
  if (fs::exists(p / "manifest.json")) return p;
  return fs::path(common.runs_dir) / run;
}

std::vector<SummaryRecord> load_dataset(const std::string& path, const std::string& domain, bool include_factual,
                                        std::optional<std::size_t> limit) {
  auto ingest = load_summedits(path, domain.empty() || domain == "all" ? std::nullopt : std::optional(domain));
  for (const auto& m : ingest.malformed) spdlog::warn("row {}: {}", m.row, m.message);
  std::vector<SummaryRecord> out;
  for (auto& r : ingest.records) {
    if (!include_factual && r.is_factual == true) continue;
    out.push_back(std::move(r));
    if (limit && out.size() >= *limit) break;
  }
  spdlog::info("{} rows read, {} malformed, {} outside domain, {} records selected", ingest.rows_read,
               ingest.malformed.size(), ingest.filtered_out, out.size());
  return out;
}

int cmd_ingest(const IngestArgs& a) {
  auto records = load_dataset(a.input, a.domain, a.include_factual, std::nullopt);
  write_records_jsonl(a.output, records);
  std::cout << records.size() << " records written to " << a.output << "\n";
  return 0;
}

PipelineConfig build_config(const RunArgs& a) {
  PipelineConfig c;
  if (!a.config_file.empty()) c = deserialize<PipelineConfig>(read_file(a.config_file));
  if (a.system) c.system = parse_system(*a.system);
  if (a.source) c.evidence_source = parse_source_kind(*a.source);
  if (a.engine) c.engine = parse_engine(*a.engine);
  if (a.mode) c.mode = parse_mode(*a.mode);
  if (a.backend) c.llm_backend = *a.backend;
  if (a.selection) c.selection = parse_selection(*a.selection);
  if (a.max_questions) c.max_questions = *a.max_questions;
  if (a.top_n) c.top_n = *a.top_n;
  if (a.chunk_size) c.chunk_size = *a.chunk_size;
  if (a.chunk_overlap) c.chunk_overlap = *a.chunk_overlap;
  if (a.temperature) c.temperature = *a.temperature;
  if (c.evidence_source != SourceKind::kSearch) {
    c.engine.reset();
    c.mode.reset();
  }
  auto problems = validate(c);
  if (!problems.empty()) throw Error(ErrorCode::kConfig, join(problems, "; "));
  return c;
}

int cmd_run(const Common& common, const RunArgs& a) {
  auto config = build_config(a);
  auto records = load_dataset(a.dataset, a.domain, a.include_factual, a.limit);
  auto http = make_http_client();
  auto cache = fs::path(common.cache_dir);

  GatewayOptions go;
  go.use_cache = !a.no_cache;
  if (go.use_cache) go.cache_dir = cache / "llm";
  auto gateway = std::make_shared<LlmGateway>(go);
  gateway->register_backend(config.llm_backend, make_backend(config.llm_backend, http));

  std::shared_ptr<EvidenceRetriever> retriever;
  if (config.evidence_source != SourceKind::kInternal) {
    auto mode = parse_fixture_mode(a.fixture_mode);
    std::optional<fs::path> fixtures = a.fixture_dir ? std::optional<fs::path>(*a.fixture_dir) : std::nullopt;
    if (!fixtures && mode != FixtureMode::kLive) fixtures = cache;
    SearchOptions so;
    so.fixture_dir = fixtures;
    so.mode = mode;
    so.requests_per_second = a.search_rate;
    FetchOptions fo;
    fo.fixture_dir = fixtures;
    fo.mode = mode;
    std::shared_ptr<SearchService> search;
    std::shared_ptr<PageFetcher> fetcher;
    std::shared_ptr<Embedder> embedder;
    if (config.evidence_source == SourceKind::kSearch) {
      search = make_search_service(http, so);
      if (config.mode == RetrievalMode::kFullArticle) {
        fetcher = std::make_shared<PageFetcher>(http, fo);
        embedder = make_embedder(env("HC_RETRIEVAL_EMBEDDER").value_or("hashing"), http, cache / "embeddings");
      }
    }
    retriever = std::make_shared<EvidenceRetriever>(search, fetcher, embedder);
  }

  CorrectionPipeline pipeline(gateway, retriever);
  RunOptions ro;
  ro.runs_dir = common.runs_dir;
  ro.workers = a.workers;
  ro.run_id = a.run_id;
  auto manifest = run_batch(pipeline, records, config, ro);
  std::cout << (fs::path(common.runs_dir) / manifest.run_id).string() << "\n"
            << manifest.succeeded.size() << " succeeded, " << manifest.failed.size() << " failed\n";
  return manifest.failed.size() <= a.max_failed ? 0 : 1;
}

int cmd_evaluate(const Common& common, const EvalArgs& a) {
  auto http = make_http_client();
  auto cache = fs::path(common.cache_dir);
  int status = 0;
  for (const auto& run : a.runs) {
    auto dir = resolve_run(common, run);
    auto manifest = load_manifest(dir);
    auto judge_id = a.judge_backend.value_or(manifest.config.llm_backend);
    auto gateway = std::make_shared<LlmGateway>(GatewayOptions{cache / "llm", true, {}, 4});
    gateway->register_backend(judge_id, make_backend(judge_id, http));
    Evaluator ev;
    ev.embedder = make_embedder(a.embedder, http, cache / "embeddings");
    ev.nli = make_nli(a.nli, http);
    ev.judge = std::make_shared<GevalJudge>(gateway, judge_id);
    ev.workers = a.workers;
    auto result = evaluate_run(dir, ev);
    if (!result.skipped.empty()) {
      spdlog::warn("{}: {} records skipped (failed or missing)", manifest.run_id, result.skipped.size());
      status = 1;
    }
    std::cout << render_table({result.aggregate}, TableFormat::kText);
  }
  return status;
}

int cmd_report(const Common& common, const ReportArgs& a) {
  std::vector<fs::path> dirs;
  for (const auto& r : a.runs) dirs.push_back(resolve_run(common, r));
  auto table = report_runs(dirs, parse_table_format(a.format));
  if (a.output) {
    write_file_atomic(*a.output, table);
  } else {
    std::cout << table;
  }
  return 0;
}

int cmd_replay(const Common& common, const ReplayArgs& a) {
  auto dir = resolve_run(common, a.run);
  auto manifest = load_manifest(dir);
  RunPaths paths{dir};
  std::vector<std::string> ids;
  if (a.record) {
    ids.push_back(*a.record);
  } else {
    ids = manifest.succeeded;
    ids.insert(ids.end(), manifest.failed.begin(), manifest.failed.end());
  }
  for (const auto& id : ids) {
    auto result = load_record_result(paths.record(id));
    std::cout << (a.json ? to_text(nlohmann::json(result), 2) + "\n" : render_trace(result)) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Self-correction of hallucinated summaries with verification questions and retrieved evidence"};
  app.require_subcommand(1);
  Common common;
  app.add_option("--runs-dir", common.runs_dir, "Directory holding run outputs")->capture_default_str();
  app.add_option("--cache-dir", common.cache_dir, "Completion, embedding and fixture cache")->capture_default_str();
  app.add_option("--log-level", common.log_level, "trace, debug, info, warn, error")->capture_default_str();

  IngestArgs ingest;
  auto* ingest_cmd = app.add_subcommand("ingest", "Convert a SummEdits file into records");
  ingest_cmd->add_option("input", ingest.input, "SummEdits JSON or JSONL file")->required();
  ingest_cmd->add_option("-o,--output", ingest.output, "Records JSONL to write")->required();
  ingest_cmd->add_option("--domain", ingest.domain, "Domain tag to keep, or 'all'")->capture_default_str();
  ingest_cmd->add_flag("--include-factual", ingest.include_factual, "Keep rows labelled factual");

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Correct every record of a dataset");
  run_cmd->add_option("dataset", run.dataset, "SummEdits file or records JSONL")->required();
  run_cmd->add_option("--config", run.config_file, "JSON pipeline config; flags override it");
  run_cmd->add_option("--system", run.system)->check(CLI::IsMember({"cove", "rarr"}));
  run_cmd->add_option("--source", run.source)->check(CLI::IsMember({"internal", "gold", "gold_article", "search"}));
  run_cmd->add_option("--engine", run.engine)->check(CLI::IsMember({"google", "bing", "ddg", "duckduckgo"}));
  run_cmd->add_option("--mode", run.mode)->check(CLI::IsMember({"snippets", "full", "full_article"}));
  run_cmd->add_option("--selection", run.selection, "pooled or per_article passage selection");
  run_cmd->add_option("--backend", run.backend, "openai:<model>, together:<model>, compat:<model>, script:<path>");
  run_cmd->add_option("--workers", run.workers)->capture_default_str()->check(CLI::PositiveNumber);
  run_cmd->add_option("--max-questions", run.max_questions)->check(CLI::PositiveNumber);
  run_cmd->add_option("--top-n", run.top_n)->check(CLI::PositiveNumber);
  run_cmd->add_option("--chunk-size", run.chunk_size)->check(CLI::PositiveNumber);
  run_cmd->add_option("--chunk-overlap", run.chunk_overlap)->check(CLI::NonNegativeNumber);
  run_cmd->add_option("--temperature", run.temperature)->check(CLI::NonNegativeNumber);
  run_cmd->add_option("--limit", run.limit, "Process only the first N selected records");
  run_cmd->add_option("--run-id", run.run_id, "Override the content-derived run id");
  run_cmd->add_option("--domain", run.domain, "Domain tag to keep, or 'all'")->capture_default_str();
  run_cmd->add_flag("--include-factual", run.include_factual, "Also run rows labelled factual");
  run_cmd->add_option("--fixture-dir", run.fixture_dir, "Search/page fixture directory (default: cache dir)");
  run_cmd->add_option("--fixture-mode", run.fixture_mode, "live, record or replay")
      ->capture_default_str()
      ->check(CLI::IsMember({"live", "record", "replay"}));
  run_cmd->add_option("--search-rate", run.search_rate, "Search requests per second per engine")->capture_default_str();
  run_cmd->add_option("--max-failed", run.max_failed, "Failed records tolerated before a nonzero exit")
      ->capture_default_str();
  run_cmd->add_flag("--no-cache", run.no_cache, "Bypass the completion cache");

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("evaluate", "Score a run against gold summaries");
  eval_cmd->add_option("runs", eval.runs, "Run ids or directories")->required();
  eval_cmd->add_option("--embedder", eval.embedder, "hashing[:dim] or http:<model>")->capture_default_str();
  eval_cmd->add_option("--nli", eval.nli, "lexical or http")->capture_default_str();
  eval_cmd->add_option("--judge-backend", eval.judge_backend, "Judge model id (default: the run's backend)");
  eval_cmd->add_option("--workers", eval.workers)->capture_default_str()->check(CLI::PositiveNumber);

  ReportArgs report;
  auto* report_cmd = app.add_subcommand("report", "Comparison table over evaluated runs");
  report_cmd->add_option("runs", report.runs, "Run ids or directories")->required();
  report_cmd->add_option("--format", report.format)->capture_default_str()->check(CLI::IsMember({"text", "csv", "tsv"}));
  report_cmd->add_option("-o,--output", report.output, "Write the table to a file");

  ReplayArgs replay;
  auto* replay_cmd = app.add_subcommand("replay", "Print the stored trace of a run's records");
  replay_cmd->add_option("run", replay.run, "Run id or directory")->required();
  replay_cmd->add_option("record", replay.record, "Record id (default: all)");
  replay_cmd->add_flag("--json", replay.json, "Print the raw result JSON");

  CLI11_PARSE(app, argc, argv);
  spdlog::set_default_logger(spdlog::stderr_color_mt("hc"));
  spdlog::set_level(spdlog::level::from_str(common.log_level));

  try {
    if (*ingest_cmd) return cmd_ingest(ingest);
    if (*run_cmd) return cmd_run(common, run);
    if (*eval_cmd) return cmd_evaluate(common, eval);
    if (*report_cmd) return cmd_report(common, report);
    if (*replay_cmd) return cmd_replay(common, replay);
  } catch (const Error& e) {
    std::fprintf(stderr, "error (%s): %s\n", to_string(e.code()), e.what());
    return e.code() == ErrorCode::kConfig || e.code() == ErrorCode::kInvalidArgument ? 2 : 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 0;
}
