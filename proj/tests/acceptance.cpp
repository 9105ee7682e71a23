// Acceptance checks: one PASS/FAIL/SKIP line per criterion. Exit status is
// nonzero when any criterion fails.
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include <spdlog/spdlog.h>

#include "hallucorrect/dataset.h"
#include "hallucorrect/geval.h"
#include "hallucorrect/http.h"
#include "hallucorrect/llm_backends.h"
#include "hallucorrect/metrics.h"
#include "hallucorrect/nli.h"
#include "hallucorrect/passages.h"
#include "hallucorrect/providers.h"
#include "hallucorrect/report.h"
#include "hallucorrect/runner.h"
#include "hallucorrect/serialize.h"
#include "test_support.h"

using namespace hallucorrect;
namespace fs = std::filesystem;

namespace {

enum class Verdict { kPass, kFail, kSkip };

struct Outcome {
  Verdict verdict = Verdict::kPass;
  std::string detail;
};

struct Check {
  std::string name;
  double time_limit_s;  // 0 = none
  std::function<Outcome()> run;
};

Outcome pass(std::string d) { return {Verdict::kPass, std::move(d)}; }
Outcome fail(std::string d) { return {Verdict::kFail, std::move(d)}; }
Outcome skip(std::string d) { return {Verdict::kSkip, std::move(d)}; }

std::string fmt_num(double v, int prec = 6) {
  std::ostringstream os;
  os.precision(prec);
  os << v;
  return os.str();
}

Outcome ned_oracle() {
  const std::vector<std::string> alphabet{"a", "b", "c", "d", " ", "é", "ß", "中"};
  std::mt19937 rng(20240101);
  auto text = [&] {
    std::string s;
    int n = std::uniform_int_distribution<int>(0, 30)(rng);
    for (int i = 0; i < n; ++i) s += alphabet[std::uniform_int_distribution<std::size_t>(0, alphabet.size() - 1)(rng)];
    return s;
  };
  int mismatches = 0;
  for (int i = 0; i < 1000; ++i) {
    auto a = text(), b = text();
    if (ned(a, b) != hc_test::dp_ned(a, b)) ++mismatches;
  }
  if (ned("kitten", "sitting") != 3.0 / 7.0) return fail("kitten/sitting = " + fmt_num(ned("kitten", "sitting")));
  if (ned("abc", "abc") != 0.0 || ned("", "abc") != 1.0 || ned("", "") != 0.0) return fail("identity/empty cases");
  if (mismatches) return fail(std::to_string(mismatches) + " of 1000 pairs differ from the DP oracle");
  return pass("1000 pairs exact; kitten/sitting = 3/7");
}

Outcome topk_oracle() {
  std::mt19937 rng(77);
  int mismatches = 0, tie_instances = 0;
  for (int inst = 0; inst < 500; ++inst) {
    int dim = std::uniform_int_distribution<int>(1, 16)(rng);
    int n = std::uniform_int_distribution<int>(1, 50)(rng);
    int k = std::uniform_int_distribution<int>(1, 8)(rng);
    bool ties = inst % 3 == 0;
    std::uniform_int_distribution<int> coarse(-2, 2);
    std::normal_distribution<double> g;
    auto vec = [&] {
      std::vector<double> v(dim);
      bool nonzero = false;
      while (!nonzero) {
        for (auto& x : v) x = ties ? coarse(rng) : g(rng);
        for (double x : v) nonzero |= x != 0;
      }
      return v;
    };
    auto q = vec();
    std::vector<Chunk> chunks;
    std::vector<int> positions(n);
    for (int i = 0; i < n; ++i) positions[i] = i;
    std::shuffle(positions.begin(), positions.end(), rng);
    for (int i = 0; i < n; ++i) {
      Chunk c;
      c.text = "chunk" + std::to_string(i);
      c.position = positions[i];
      // Tie instances reuse a few vectors so many scores coincide exactly.
      c.embedding = (ties && i > 0 && i % 2 == 0) ? *chunks[i / 2].embedding : vec();
      chunks.push_back(std::move(c));
    }
    tie_instances += ties;
    auto expected = hc_test::brute_top_k(q, chunks, k);
    auto got = select_top_passages(q, chunks, k);
    bool same = got.size() == expected.size();
    for (std::size_t i = 0; same && i < got.size(); ++i) same = got[i].text == chunks[expected[i]].text;
    mismatches += !same;
  }
  if (mismatches) return fail(std::to_string(mismatches) + " of 500 instances differ");
  return pass("500 instances exact (" + std::to_string(tie_instances) + " with ties)");
}

struct LawRig {
  LawRig(int k, int d) : law(std::make_shared<hc_test::LawBackend>(k, d)) {
    gateway = std::make_shared<LlmGateway>(hc_test::fast_gateway_options());
    gateway->register_backend("law", law);
    pipeline = std::make_unique<CorrectionPipeline>(gateway, nullptr, [] { return std::string("T"); });
  }
  std::shared_ptr<hc_test::LawBackend> law;
  std::shared_ptr<LlmGateway> gateway;
  std::unique_ptr<CorrectionPipeline> pipeline;
};

PipelineConfig law_config(System s) {
  PipelineConfig c;
  c.system = s;
  c.llm_backend = "law";
  return c;
}

Outcome call_count_laws() {
  SummaryRecord rec{"r", "gold", "input", std::nullopt, "news", false};
  int checked = 0;
  for (int k = 1; k <= 5; ++k) {
    LawRig cove(k, 0);
    cove.pipeline->run_pipeline(rec, law_config(System::kCove));
    if (cove.law->calls != k + 2) return fail("cove k=" + std::to_string(k) + " used " + std::to_string(cove.law->calls));
    ++checked;
    for (int d = 0; d <= k; ++d) {
      LawRig rarr(k, d);
      rarr.pipeline->run_pipeline(rec, law_config(System::kRarr));
      if (rarr.law->calls != k + 1 + d) {
        return fail("rarr k=" + std::to_string(k) + " d=" + std::to_string(d) + " used " +
                    std::to_string(rarr.law->calls));
      }
      ++checked;
    }
  }
  return pass(std::to_string(checked) + " (system, k, d) combinations");
}

Outcome rarr_identity() {
  std::mt19937 rng(5);
  const std::vector<std::string> words{"The", "council", "approved", "€5m", "budget", "on", "Monday", "naïve", "  ", "\n"};
  for (int t = 0; t < 50; ++t) {
    std::string summary;
    int n = std::uniform_int_distribution<int>(1, 25)(rng);
    for (int i = 0; i < n; ++i) summary += words[std::uniform_int_distribution<std::size_t>(0, words.size() - 1)(rng)] + " ";
    summary = "S" + summary + "end.";
    LawRig rig(1 + t % 5, 0);
    SummaryRecord rec{"r" + std::to_string(t), "gold", summary, std::nullopt, "news", false};
    auto out = rig.pipeline->run_pipeline(rec, law_config(System::kRarr));
    if (out.text != summary) return fail("trace " + std::to_string(t) + " changed the input");
  }
  return pass("50 traces byte-identical to input");
}

struct GoldenRun {
  std::map<std::string, std::string> files;
  std::size_t succeeded = 0;
};

GoldenRun golden_run(const fs::path& runs_dir) {
  auto fixtures = hc_test::fixture_dir();
  auto gateway = std::make_shared<LlmGateway>(hc_test::fast_gateway_options(true));
  gateway->register_backend("script", ScriptedBackend::from_file(fixtures / "golden" / "llm_script.json"));
  SearchOptions so;
  so.fixture_dir = fixtures / "golden";
  so.mode = FixtureMode::kReplay;
  so.requests_per_second = 0;
  auto retriever = std::make_shared<EvidenceRetriever>(std::make_shared<SearchService>(so), nullptr, nullptr);
  CorrectionPipeline pipeline(gateway, retriever, [] { return std::string("2024-01-01T00:00:00Z"); });
  PipelineConfig config;
  config.system = System::kRarr;
  config.llm_backend = "script";
  config.evidence_source = SourceKind::kSearch;
  config.engine = Engine::kDdg;
  config.mode = RetrievalMode::kSnippets;
  auto records = load_summedits(fixtures / "summedits" / "news_sample.json").records;
  auto manifest = run_batch(pipeline, records, config, {runs_dir, 2, std::nullopt});

  Evaluator ev;
  ev.embedder = std::make_shared<HashingEmbedder>();
  ev.nli = std::make_shared<LexicalNliProvider>();
  ev.judge = std::make_shared<GevalJudge>(gateway, "script");
  evaluate_run(runs_dir / manifest.run_id, ev);

  GoldenRun out;
  out.succeeded = manifest.succeeded.size();
  RunPaths paths{runs_dir / manifest.run_id};
  for (const auto& r : records) out.files["records/" + r.id] = read_file(paths.record(r.id));
  out.files["metrics/records.jsonl"] = read_file(paths.metric_records());
  out.files["metrics/aggregate.json"] = read_file(paths.aggregate());
  out.files["report.csv"] = read_file(paths.report_csv());
  return out;
}

Outcome golden_determinism() {
  hc_test::TempDir a, b;
  auto first = golden_run(a.path());
  auto second = golden_run(b.path());
  if (first.succeeded != 3) return fail(std::to_string(first.succeeded) + " of 3 records succeeded");
  for (const auto& [name, bytes] : first.files) {
    if (second.files[name] != bytes) return fail(name + " differs between runs");
  }
  if (first.files["records/news-webb"].find("allowed astronomers to peer") == std::string::npos) {
    return fail("webb record lacks the expected two-step correction");
  }
  return pass(std::to_string(first.files.size()) + " artifacts byte-identical across reruns");
}

Outcome nli_contract() {
  LexicalNliProvider nli;
  const std::vector<std::pair<std::string, std::string>> pairs{
      {"The cat sat.", "The cat sat."},
      {"The budget is 5 million.", "The budget is 7 million."},
      {"He was not charged with fraud.", "He was charged with fraud."},
      {"Astronomers used the new image.", "Biologists used an old image."},
      {"x", "y"},
  };
  double worst = 0;
  for (const auto& [p, h] : pairs) {
    for (int swap = 0; swap < 2; ++swap) {
      auto t = swap ? nli_scores(nli, h, p).triple : nli_scores(nli, p, h).triple;
      worst = std::max(worst, std::abs(t.entailment + t.neutral + t.contradiction - 1.0));
    }
  }
  if (worst > 1e-6) return fail("triple sum off by " + fmt_num(worst));
  const std::string premise = "The cat sat on the mat in the kitchen while the dog slept by the door.";
  const std::string hypothesis = "The cat sat on the mat.";
  auto forward = nli_scores(nli, premise, hypothesis).triple;
  auto backward = nli_scores(nli, hypothesis, premise).triple;
  if (forward == backward) return fail("swapping premise and hypothesis left the triple unchanged");
  if (!(forward.entailment > backward.entailment)) return fail("entailment not higher with the longer premise");
  return pass("max |sum-1| = " + fmt_num(worst) + "; ent " + fmt_num(forward.entailment, 4) + " vs swapped " +
              fmt_num(backward.entailment, 4));
}

Outcome geval_normalisation() {
  std::vector<std::pair<std::string, double>> cases{{"Score: 1", 0.0}, {"Score: 7", 0.6667}, {"Score: 10", 1.0}};
  std::string detail;
  for (const auto& [reply, expected] : cases) {
    auto gateway = std::make_shared<LlmGateway>(hc_test::fast_gateway_options());
    gateway->register_backend("judge",
                              std::make_shared<FunctionBackend>([reply](const CompletionRequest&) { return reply; }));
    GevalJudge judge(gateway, "judge");
    double got = judge.geval(GevalAspect::kFactuality, "input", "output");
    if (std::abs(got - expected) > 1e-4) return fail(reply + " -> " + fmt_num(got));
    detail += fmt_num(got, 4) + " ";
  }
  return pass("{1,7,10} -> " + detail);
}

Outcome alignment() {
  auto rows = alignment_report({{"rarr", 0.68}, {"cove", 0.54}}, {{"rarr", 0.65}, {"cove", 0.52}});
  std::map<std::string, double> diff;
  for (const auto& r : rows) diff[r.method] = r.diff;
  if (diff["rarr"] != 0.03 || diff["cove"] != 0.02) {
    return fail("rarr " + fmt_num(diff["rarr"], 17) + ", cove " + fmt_num(diff["cove"], 17));
  }
  return pass("rarr 0.03, cove 0.02");
}

Outcome ingestion() {
  auto fixture = load_summedits(hc_test::fixture_dir() / "summedits" / "news_sample.json");
  if (fixture.records.size() != 3) return fail("fixture subset gave " + std::to_string(fixture.records.size()));
  std::optional<fs::path> full;
  if (auto p = env("HC_SUMMEDITS_NEWS")) full = *p;
  else if (fs::exists(fs::path(HC_SOURCE_DIR) / "data" / "summedits_news.json"))
    full = fs::path(HC_SOURCE_DIR) / "data" / "summedits_news.json";
  if (!full) return skip("fixture subset = 3 records; full news subset not present (set HC_SUMMEDITS_NEWS)");
  auto all = load_summedits(*full);
  if (all.records.size() != 819) {
    return fail(std::to_string(all.records.size()) + " records, " + std::to_string(all.malformed.size()) +
                " malformed");
  }
  return pass("819 records from " + full->string());
}

Outcome report_marks() {
  AggregateRow a, b;
  a.label = "a";
  b.label = "b";
  a.n = b.n = 10;
  a.ned = 0.14, b.ned = 0.51;
  a.sem = 0.95, b.sem = 0.80;
  a.nli = {0.49, 0.30, 0.21};
  b.nli = {0.40, 0.45, 0.15};
  a.geval = {0.70, 0.70, 0.90};
  b.geval = {0.75, 0.70, 0.80};
  auto marks = best_marks({a, b});
  // columns: NED Sem Ent Neu Con Overall Factual Relev
  std::array<bool, 8> want_a{true, true, true, false, false, false, true, true};
  std::array<bool, 8> want_b{false, false, false, true, true, true, true, false};
  if (marks[0] != want_a || marks[1] != want_b) return fail("best-marking mismatch");
  auto single = best_marks({a});
  for (bool m : single[0]) {
    if (!m) return fail("single row not best everywhere");
  }
  auto csv = split_lines(render_table({a, b}, TableFormat::kCsv));
  if (csv.size() != 3 || csv[1] != "a,10,0.14*,95*,49*,30,21,70,70*,90*") return fail("rendered row: " + csv.at(1));
  return pass("NED/Con. min, others max, ties on Factual. marked twice");
}

Outcome map_reduce() {
  std::mt19937 rng(100);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<MetricReport> all;
  for (int i = 0; i < 100; ++i) {
    MetricReport r;
    r.record_id = std::to_string(i);
    r.ned = u(rng);
    r.sem = 2 * u(rng) - 1;
    double x = u(rng), y = u(rng), z = u(rng);
    r.nli = {x / (x + y + z), y / (x + y + z), z / (x + y + z)};
    r.geval = {u(rng), u(rng), u(rng)};
    all.push_back(r);
  }
  auto whole = aggregate(all);
  auto merged = combine({aggregate({all.begin(), all.begin() + 50}), aggregate({all.begin() + 50, all.end()})});
  double worst = 0;
  for (auto c : kColumns) worst = std::max(worst, std::abs(column_value(whole, c) - column_value(merged, c)));
  if (merged.n != 100 || worst > 1e-12) return fail("max deviation " + fmt_num(worst));
  return pass("max deviation " + fmt_num(worst));
}

Outcome live_smoke() {
  auto backend = env("HC_LIVE_BACKEND");
  auto dataset = env("HC_SUMMEDITS_NEWS");
  if (!backend || !dataset) return skip("set HC_LIVE_BACKEND and HC_SUMMEDITS_NEWS to run");
  auto http = make_http_client();
  auto gateway = std::make_shared<LlmGateway>();
  gateway->register_backend(*backend, make_backend(*backend, http));
  SearchOptions so;
  so.mode = FixtureMode::kLive;
  auto retriever = std::make_shared<EvidenceRetriever>(make_search_service(http, so), nullptr, nullptr);
  CorrectionPipeline pipeline(gateway, retriever);
  PipelineConfig config;
  config.system = System::kRarr;
  config.llm_backend = *backend;
  config.evidence_source = SourceKind::kSearch;
  config.engine = Engine::kDdg;
  config.mode = RetrievalMode::kSnippets;
  auto records = load_summedits(*dataset).records;
  std::vector<SummaryRecord> ten;
  for (const auto& r : records) {
    if (r.is_factual != true && ten.size() < 10) ten.push_back(r);
  }
  hc_test::TempDir dir;
  auto manifest = run_batch(pipeline, ten, config, {dir.path(), 2, std::nullopt});
  if (manifest.succeeded.size() < 8) return fail(std::to_string(manifest.succeeded.size()) + " of 10 succeeded");
  Evaluator ev;
  ev.embedder = std::make_shared<HashingEmbedder>();
  ev.nli = std::make_shared<LexicalNliProvider>();
  ev.judge = std::make_shared<GevalJudge>(gateway, *backend);
  auto result = evaluate_run(dir.path() / manifest.run_id, ev);
  auto table = split_lines(render_table({result.aggregate}, TableFormat::kCsv));
  if (table.size() != 2) return fail("malformed report");
  return pass(std::to_string(manifest.succeeded.size()) + " of 10 succeeded");
}

}  // namespace

int main() {
  spdlog::set_level(spdlog::level::warn);
  const std::vector<Check> checks{
      {"edit-distance-oracle", 5, ned_oracle},
      {"top-k-selection-oracle", 5, topk_oracle},
      {"call-count-laws", 1, call_count_laws},
      {"rarr-no-edit-identity", 1, rarr_identity},
      {"golden-trace-determinism", 10, golden_determinism},
      {"nli-contract", 0, nli_contract},
      {"geval-normalisation", 0, geval_normalisation},
      {"alignment-arithmetic", 0, alignment},
      {"dataset-ingestion-819", 0, ingestion},
      {"report-best-marking", 0, report_marks},
      {"map-reduce-aggregation", 0, map_reduce},
      {"live-smoke-run (optional)", 0, live_smoke},
  };
  int failures = 0;
  for (const auto& check : checks) {
    auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = check.run();
    } catch (const std::exception& e) {
      outcome = fail(std::string("exception: ") + e.what());
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (outcome.verdict == Verdict::kPass && check.time_limit_s > 0 && secs > check.time_limit_s) {
      outcome = fail("took " + fmt_num(secs, 3) + " s, limit " + fmt_num(check.time_limit_s) + " s");
    }
    const char* tag = outcome.verdict == Verdict::kPass ? "PASS" : outcome.verdict == Verdict::kFail ? "FAIL" : "SKIP";
    std::printf("%s  %-28s %7.3fs  %s\n", tag, check.name.c_str(), secs, outcome.detail.c_str());
    failures += outcome.verdict == Verdict::kFail;
  }
  std::fflush(stdout);
  return failures == 0 ? 0 : 1;
}
