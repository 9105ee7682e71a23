#include <fstream>

#include <gtest/gtest.h>

#include "hallucorrect/dataset.h"
#include "hallucorrect/metrics.h"
#include "hallucorrect/runner.h"
#include "hallucorrect/serialize.h"
#include "test_support.h"

using namespace hallucorrect;
using hc_test::TempDir;

namespace {

constexpr const char* kBackend = "script:law";

std::vector<SummaryRecord> sample() {
  return load_summedits(hc_test::fixture_dir() / "summedits" / "news_sample.json").records;
}

PipelineConfig rarr_config() {
  PipelineConfig c;
  c.system = System::kRarr;
  c.llm_backend = kBackend;
  return c;
}

// LawBackend that fails every prompt mentioning `poison`.
struct Bench {
  explicit Bench(int k = 2, int d = 0, std::string poison = "") {
    law = std::make_shared<hc_test::LawBackend>(k, d);
    gateway = std::make_shared<LlmGateway>(hc_test::fast_gateway_options());
    gateway->register_backend(kBackend, std::make_shared<FunctionBackend>([this, poison](const CompletionRequest& r) {
                                if (!poison.empty() && r.prompt.find(poison) != std::string::npos) {
                                  throw Error(ErrorCode::kAuthentication, "injected failure");
                                }
                                return law->complete(r);
                              }));
    pipeline = std::make_unique<CorrectionPipeline>(gateway, nullptr, [] { return std::string("T"); });
  }
  std::shared_ptr<hc_test::LawBackend> law;
  std::shared_ptr<LlmGateway> gateway;
  std::unique_ptr<CorrectionPipeline> pipeline;
};

Evaluator offline_evaluator(const std::string& judge_reply = "Score: 10") {
  auto gateway = std::make_shared<LlmGateway>(hc_test::fast_gateway_options());
  gateway->register_backend("judge", std::make_shared<FunctionBackend>(
                                         [judge_reply](const CompletionRequest&) { return judge_reply; }));
  Evaluator e;
  e.embedder = std::make_shared<HashingEmbedder>();
  e.nli = std::make_shared<LexicalNliProvider>();
  e.judge = std::make_shared<GevalJudge>(gateway, "judge");
  e.workers = 2;
  return e;
}

RunManifest without_timing(RunManifest m) {
  m.wall_seconds = 0;
  m.record_seconds_total = 0;
  return m;
}

}  // namespace

// ---- ingestion ----

TEST(Ingest, NewsFixtureHasThreeRecords) {
  auto result = load_summedits(hc_test::fixture_dir() / "summedits" / "news_sample.json");
  ASSERT_EQ(result.records.size(), 3u);
  EXPECT_TRUE(result.malformed.empty());
  EXPECT_EQ(result.rows_read, 3u);
  const auto& webb = result.records[0];
  EXPECT_EQ(webb.id, "news-webb");
  EXPECT_EQ(webb.domain_tag, "news");
  EXPECT_EQ(webb.is_factual, false);
  EXPECT_NE(webb.input_summary.find("biologists"), std::string::npos);
  EXPECT_NE(webb.gold_summary.find("astronomers"), std::string::npos);
  ASSERT_TRUE(webb.source_article);
}

TEST(Ingest, MalformedRowsReportedAndSkipped) {
  const std::string jsonl =
      R"({"id":"a","domain":"news","seed_summary":"Gold A.","summary":"Input A.","doc":"Doc A.","label":0})" "\n"
      R"({"id":"b","domain":"news","summary":"No gold here.","doc":"Doc B.","label":0})" "\n"
      "this is not json\n"
      R"({"id":"c","domain":"podcast","seed_summary":"Gold C.","summary":"Input C.","label":0})" "\n"
      R"({"id":"a","domain":"news","seed_summary":"Dup.","summary":"Dup.","label":0})" "\n"
      R"({"id":"d","domain":"news","seed_summary":"Gold D.","summary":"Input D.","label":1})" "\n";
  auto result = parse_summedits(jsonl);
  ASSERT_EQ(result.records.size(), 2u);
  EXPECT_EQ(result.records[0].id, "a");
  EXPECT_EQ(result.records[1].id, "d");
  EXPECT_EQ(result.records[1].is_factual, true);
  EXPECT_EQ(result.filtered_out, 1u);
  ASSERT_EQ(result.malformed.size(), 3u);
  EXPECT_EQ(result.malformed[0].row, 2u);
  EXPECT_EQ(result.malformed[1].row, 3u);
  EXPECT_EQ(result.malformed[2].row, 5u);

  auto everything = parse_summedits(jsonl, std::nullopt);
  EXPECT_EQ(everything.records.size(), 3u);
}

TEST(Ingest, MissingFileAndRoundTrip) {
  EXPECT_THROW(load_summedits("/nonexistent/summedits.json"), Error);
  TempDir dir;
  auto records = sample();
  write_records_jsonl(dir.path() / "d.jsonl", records);
  EXPECT_EQ(read_records_jsonl(dir.path() / "d.jsonl"), records);
  EXPECT_EQ(dataset_digest(records), dataset_digest(read_records_jsonl(dir.path() / "d.jsonl")));
  auto reordered = records;
  std::swap(reordered[0], reordered[1]);
  EXPECT_NE(dataset_digest(records), dataset_digest(reordered));
}

// ---- run ----

TEST(Run, ThreeRecordsSucceed) {
  TempDir dir;
  Bench bench;
  auto records = sample();
  RunOptions options{dir.path(), 2, std::nullopt};
  auto manifest = run_batch(*bench.pipeline, records, rarr_config(), options);
  EXPECT_EQ(manifest.succeeded, (std::vector<std::string>{"news-webb", "news-ozy", "news-budget"}));
  EXPECT_TRUE(manifest.failed.empty());
  EXPECT_EQ(manifest.record_count, 3u);
  EXPECT_EQ(manifest.run_id, compute_run_id(rarr_config(), dataset_digest(records)));
  RunPaths paths{dir.path() / manifest.run_id};
  EXPECT_TRUE(std::filesystem::exists(paths.manifest()));
  EXPECT_TRUE(std::filesystem::exists(paths.config()));
  EXPECT_EQ(read_records_jsonl(paths.dataset()), records);
  for (const auto& r : records) {
    auto result = load_record_result(paths.record(r.id));
    EXPECT_TRUE(result.succeeded);
    EXPECT_EQ(result.response->text, r.input_summary);
  }
  EXPECT_EQ(without_timing(load_manifest(paths.root)), without_timing(manifest));
  EXPECT_EQ(bench.law->calls.load(), 3 * 3);
}

TEST(Run, ResumeReprocessesOnlyMissingRecord) {
  TempDir dir;
  Bench bench;
  auto records = sample();
  RunOptions options{dir.path(), 2, std::nullopt};
  auto first = run_batch(*bench.pipeline, records, rarr_config(), options);
  RunPaths paths{dir.path() / first.run_id};
  std::filesystem::remove(paths.record("news-ozy"));
  int before = bench.law->calls.load();
  auto second = run_batch(*bench.pipeline, records, rarr_config(), options);
  EXPECT_EQ(bench.law->calls.load() - before, 3);
  EXPECT_EQ(without_timing(second), without_timing(first));
  // Nothing left to do: a third run issues no completions.
  run_batch(*bench.pipeline, records, rarr_config(), options);
  EXPECT_EQ(bench.law->calls.load() - before, 3);
}

TEST(Run, RerunManifestIsByteIdenticalModuloTiming) {
  TempDir a, b;
  auto records = sample();
  Bench one, two;
  auto m1 = run_batch(*one.pipeline, records, rarr_config(), {a.path(), 1, std::nullopt});
  auto m2 = run_batch(*two.pipeline, records, rarr_config(), {b.path(), 3, std::nullopt});
  EXPECT_EQ(serialize(without_timing(m1)), serialize(without_timing(m2)));
}

TEST(Run, InjectedFailureIsolatedToItsRecord) {
  TempDir dir;
  auto records = sample();
  Bench bench(2, 0, records[1].input_summary);
  auto manifest = run_batch(*bench.pipeline, records, rarr_config(), {dir.path(), 3, std::nullopt});
  EXPECT_EQ(manifest.succeeded, (std::vector<std::string>{records[0].id, records[2].id}));
  EXPECT_EQ(manifest.failed, (std::vector<std::string>{records[1].id}));
  EXPECT_EQ(manifest.succeeded.size() + manifest.failed.size(), manifest.record_count);
  auto failed = load_record_result(RunPaths{dir.path() / manifest.run_id}.record(records[1].id));
  EXPECT_FALSE(failed.succeeded);
  EXPECT_NE(failed.error.find("injected failure"), std::string::npos);

  // A healthy rerun retries only the failed record.
  Bench healthy;
  auto again = run_batch(*healthy.pipeline, records, rarr_config(), {dir.path(), 3, std::nullopt});
  EXPECT_EQ(again.failed.size(), 0u);
  EXPECT_EQ(healthy.law->calls.load(), 3);
}

TEST(Run, ConfigurationErrorsAbort) {
  TempDir dir;
  Bench bench;
  auto records = sample();
  auto bad = rarr_config();
  bad.max_questions = 0;
  EXPECT_THROW(run_batch(*bench.pipeline, records, bad, {dir.path(), 1, std::nullopt}), Error);

  auto manifest = run_batch(*bench.pipeline, records, rarr_config(), {dir.path(), 1, std::string("fixed")});
  EXPECT_EQ(manifest.run_id, "fixed");
  auto other = rarr_config();
  other.top_n = 3;
  try {
    run_batch(*bench.pipeline, records, other, {dir.path(), 1, std::string("fixed")});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConfig);
  }
}

TEST(Run, RunIdsAndRecordStems) {
  auto c = rarr_config();
  auto id = compute_run_id(c, "digest");
  EXPECT_TRUE(id.starts_with("rarr-internal-"));
  c.evidence_source = SourceKind::kSearch;
  c.engine = Engine::kBing;
  c.mode = RetrievalMode::kSnippets;
  EXPECT_TRUE(compute_run_id(c, "digest").starts_with("rarr-search-bing-snippets-"));
  EXPECT_NE(compute_run_id(c, "digest"), compute_run_id(c, "other"));
  EXPECT_EQ(record_file_stem("news-webb"), "news-webb");
  EXPECT_NE(record_file_stem("a/b"), record_file_stem("a_b"));
  EXPECT_EQ(record_file_stem("a/b").find('/'), std::string::npos);
}

// ---- evaluate ----

TEST(Evaluate, PerfectOutputs) {
  TempDir dir;
  auto records = sample();
  for (auto& r : records) r.input_summary = r.gold_summary;
  Bench bench;
  auto manifest = run_batch(*bench.pipeline, records, rarr_config(), {dir.path(), 2, std::nullopt});
  auto evaluator = offline_evaluator();
  auto result = evaluate_run(dir.path() / manifest.run_id, evaluator);
  EXPECT_EQ(result.reports.size(), 3u);
  EXPECT_DOUBLE_EQ(result.aggregate.ned, 0.0);
  EXPECT_NEAR(result.aggregate.sem, 1.0, 1e-6);
  EXPECT_DOUBLE_EQ(result.aggregate.geval.factuality, 1.0);
  EXPECT_EQ(result.aggregate.label, manifest.run_id);
  EXPECT_EQ(result.aggregate.n, 3u);
}

TEST(Evaluate, PassThroughMatchesIndependentMeans) {
  TempDir dir;
  auto records = sample();
  Bench bench;
  auto manifest = run_batch(*bench.pipeline, records, rarr_config(), {dir.path(), 2, std::nullopt});
  auto evaluator = offline_evaluator("Score: 7");
  auto run_dir = dir.path() / manifest.run_id;
  auto result = evaluate_run(run_dir, evaluator);

  double ned_sum = 0, sem_sum = 0;
  HashingEmbedder embedder;
  for (const auto& r : records) {
    ned_sum += hc_test::dp_ned(r.input_summary, r.gold_summary);
    auto v = embedder.embed({r.input_summary, r.gold_summary});
    sem_sum += hc_test::plain_cosine(v[0], v[1]);
  }
  EXPECT_NEAR(result.aggregate.ned, ned_sum / 3, 1e-9);
  EXPECT_NEAR(result.aggregate.sem, sem_sum / 3, 1e-9);
  EXPECT_NEAR(result.aggregate.geval.overall, 6.0 / 9.0, 1e-9);

  RunPaths paths{run_dir};
  std::ifstream lines(paths.metric_records());
  std::string line;
  int count = 0;
  while (std::getline(lines, line)) {
    if (!line.empty()) ++count;
  }
  EXPECT_EQ(count, 3);
  EXPECT_EQ(load_aggregate(run_dir), result.aggregate);
  EXPECT_TRUE(std::filesystem::exists(paths.report_text()));
  EXPECT_TRUE(std::filesystem::exists(paths.report_csv()));

  // Pure function of persisted outputs: evaluating again gives the same bytes.
  auto first_metrics = read_file(paths.metric_records());
  evaluate_run(run_dir, evaluator);
  EXPECT_EQ(read_file(paths.metric_records()), first_metrics);
}

TEST(Evaluate, FailedRecordsSkippedMissingRunRejected) {
  TempDir dir;
  auto records = sample();
  Bench bench(2, 0, records[0].input_summary);
  auto manifest = run_batch(*bench.pipeline, records, rarr_config(), {dir.path(), 2, std::nullopt});
  auto evaluator = offline_evaluator();
  auto result = evaluate_run(dir.path() / manifest.run_id, evaluator);
  EXPECT_EQ(result.reports.size(), 2u);
  EXPECT_EQ(result.skipped, (std::vector<std::string>{records[0].id}));
  try {
    evaluate_run(dir.path() / "no-such-run", evaluator);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNotFound);
  }
}

// ---- report ----

TEST(ReportRuns, LowerNedMarkedBest) {
  TempDir dir;
  auto records = sample();
  auto perfect = records;
  for (auto& r : perfect) r.input_summary = r.gold_summary;
  Bench a, b;
  auto ma = run_batch(*a.pipeline, records, rarr_config(), {dir.path(), 2, std::string("pass-through")});
  auto mb = run_batch(*b.pipeline, perfect, rarr_config(), {dir.path(), 2, std::string("perfect")});
  auto evaluator = offline_evaluator();
  evaluate_run(dir.path() / ma.run_id, evaluator);
  evaluate_run(dir.path() / mb.run_id, evaluator);
  auto csv = report_runs({dir.path() / ma.run_id, dir.path() / mb.run_id}, TableFormat::kCsv);
  auto lines = split_lines(csv);
  ASSERT_EQ(lines.size(), 3u);
  EXPECT_TRUE(lines[1].starts_with("pass-through,3,"));
  EXPECT_TRUE(lines[2].starts_with("perfect,3,0.00*,"));
  auto single = split_lines(report_runs({dir.path() / ma.run_id}, TableFormat::kCsv));
  EXPECT_EQ(std::count(single[1].begin(), single[1].end(), '*'), 8);
}

TEST(Replay, TraceRendering) {
  TempDir dir;
  Bench bench(2, 1);
  auto manifest = run_batch(*bench.pipeline, sample(), rarr_config(), {dir.path(), 1, std::nullopt});
  auto result = load_record_result(RunPaths{dir.path() / manifest.run_id}.record("news-webb"));
  auto text = render_trace(result);
  EXPECT_NE(text.find("generate_questions"), std::string::npos);
  EXPECT_NE(text.find("refine"), std::string::npos);
  EXPECT_NE(text.find("[fixed 1]"), std::string::npos);
}
