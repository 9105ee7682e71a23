#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "hallucorrect/embedding.h"
#include "hallucorrect/geval.h"
#include "hallucorrect/metrics.h"
#include "hallucorrect/nli.h"
#include "hallucorrect/report.h"
#include "hallucorrect/validate.h"
#include "test_support.h"

using namespace hallucorrect;

// ---- edit distance ----

TEST(Ned, Examples) {
  EXPECT_DOUBLE_EQ(ned("abc", "abc"), 0.0);
  EXPECT_DOUBLE_EQ(ned("", "abc"), 1.0);
  EXPECT_DOUBLE_EQ(ned("", ""), 0.0);
  EXPECT_DOUBLE_EQ(ned("kitten", "sitting"), hc_test::dp_ned("kitten", "sitting"));
  EXPECT_NEAR(ned("kitten", "sitting"), 0.4286, 1e-4);
  // Code points, not bytes: one substitution over three characters.
  EXPECT_DOUBLE_EQ(ned("café", "cafe"), 0.25);
}

TEST(Ned, MatchesFullMatrixOracle) {
  const std::vector<std::string> alphabet{"a", "b", "c", " ", "é", "ü", "x"};
  std::mt19937 rng(31337);
  auto random_text = [&] {
    int len = std::uniform_int_distribution<int>(0, 30)(rng);
    std::string s;
    for (int i = 0; i < len; ++i) s += alphabet[std::uniform_int_distribution<std::size_t>(0, alphabet.size() - 1)(rng)];
    return s;
  };
  for (int i = 0; i < 1000; ++i) {
    auto a = random_text(), b = random_text();
    double d = ned(a, b);
    ASSERT_DOUBLE_EQ(d, hc_test::dp_ned(a, b)) << a << " | " << b;
    ASSERT_DOUBLE_EQ(d, ned(b, a));
    ASSERT_GE(d, 0.0);
    ASSERT_LE(d, 1.0);
    ASSERT_DOUBLE_EQ(ned(a, a), 0.0);
  }
}

// ---- semantic similarity ----

TEST(Semantic, SelfAndSymmetry) {
  HashingEmbedder e;
  EXPECT_NEAR(semantic_similarity(e, "The council approved the budget.", "The council approved the budget."), 1.0, 1e-6);
  EXPECT_DOUBLE_EQ(semantic_similarity(e, "alpha beta", "beta gamma"), semantic_similarity(e, "beta gamma", "alpha beta"));
  EXPECT_THROW(semantic_similarity(e, "", "x"), Error);
}

TEST(Semantic, ParaphrasesOutscoreUnrelated) {
  struct Case {
    std::string a, paraphrase, unrelated;
  };
  const std::vector<Case> cases{
      {"The city council approved the new budget on Tuesday.", "On Tuesday the city council approved a new budget.",
       "Astronomers photographed a distant galaxy cluster."},
      {"Webb captured a new image of Pandora's Cluster.", "A new image of Pandora's Cluster was captured by Webb.",
       "The mayor opened a public library downtown."},
      {"Carlos Watson was charged with fraud.", "Fraud charges were filed against Carlos Watson.",
       "Heavy rain flooded several roads overnight."},
      {"The company reported record quarterly profits.", "Record profits were reported by the company this quarter.",
       "The football team lost its opening match."},
      {"Scientists discovered water ice on the moon.", "Water ice on the moon was discovered by scientists.",
       "The bakery raised the price of bread."},
      {"The president signed the climate bill into law.", "The climate bill was signed into law by the president.",
       "A new smartphone model goes on sale next week."},
      {"Heavy snow closed schools across the state.", "Schools across the state closed because of heavy snow.",
       "The museum acquired a rare medieval manuscript."},
      {"The central bank raised interest rates again.", "Interest rates were raised again by the central bank.",
       "The orchestra performed a new symphony."},
      {"Wildfires forced thousands to evacuate their homes.", "Thousands evacuated their homes because of wildfires.",
       "The software update fixes a login bug."},
      {"The airline cancelled hundreds of flights.", "Hundreds of flights were cancelled by the airline.",
       "The chef won an award for her seafood dishes."},
  };
  HashingEmbedder e;
  for (const auto& c : cases) {
    EXPECT_GT(semantic_similarity(e, c.a, c.paraphrase), semantic_similarity(e, c.a, c.unrelated)) << c.a;
  }
}

// ---- NLI ----

namespace {

class RecordingNli : public NliProvider {
 public:
  std::string id() const override { return "recording"; }
  std::size_t max_premise_words() const override { return 3; }
  NliTriple classify(const std::string& premise, const std::string& hypothesis) override {
    seen_premise = premise;
    seen_hypothesis = hypothesis;
    return {2.0, 1.0, 1.0};
  }
  std::string seen_premise, seen_hypothesis;
};

double sum(const NliTriple& t) { return t.entailment + t.neutral + t.contradiction; }

}  // namespace

TEST(Nli, TriplesSumToOne) {
  LexicalNliProvider nli;
  const std::vector<std::pair<std::string, std::string>> pairs{
      {"The cat sat.", "The cat sat."},
      {"The budget is 5 million.", "The budget is 7 million."},
      {"He was not charged.", "He was charged."},
      {"Completely unrelated words here.", "Astronomers use the telescope."},
      {"a", "b"},
  };
  for (const auto& [p, h] : pairs) {
    auto r = nli_scores(nli, p, h);
    EXPECT_NEAR(sum(r.triple), 1.0, 1e-6);
    auto report = MetricReport{"x", 0, 0, r.triple, {}};
    EXPECT_TRUE(validate(report).empty());
  }
}

TEST(Nli, IdenticalTextIsEntailed) {
  LexicalNliProvider nli;
  auto t = nli_scores(nli, "The cat sat.", "The cat sat.").triple;
  EXPECT_GT(t.entailment, t.neutral);
  EXPECT_GT(t.entailment, t.contradiction);
  // Frozen regression value: full coverage, no conflict.
  double z = std::exp(3.0) + std::exp(1.0) + std::exp(-0.5);
  EXPECT_NEAR(t.entailment, std::exp(3.0) / z, 1e-9);
  EXPECT_NEAR(t.neutral, std::exp(1.0) / z, 1e-9);
  EXPECT_NEAR(t.contradiction, std::exp(-0.5) / z, 1e-9);
}

TEST(Nli, OrientationMatters) {
  LexicalNliProvider nli;
  const std::string longer = "The cat sat on the mat in the kitchen while the dog slept by the door.";
  const std::string shorter = "The cat sat on the mat.";
  auto forward = nli_scores(nli, longer, shorter).triple;
  auto backward = nli_scores(nli, shorter, longer).triple;
  EXPECT_NE(forward, backward);
  EXPECT_GT(forward.entailment, backward.entailment);
}

TEST(Nli, ConflictsRaiseContradiction) {
  LexicalNliProvider nli;
  auto same = nli_scores(nli, "The budget is 5 million dollars.", "The budget is 5 million dollars.").triple;
  auto number = nli_scores(nli, "The budget is 5 million dollars.", "The budget is 7 million dollars.").triple;
  auto negated = nli_scores(nli, "Watson was not charged with fraud.", "Watson was charged with fraud.").triple;
  EXPECT_GT(number.contradiction, same.contradiction);
  EXPECT_GT(negated.contradiction, same.contradiction);
}

TEST(Nli, PremiseTruncatedHypothesisKept) {
  RecordingNli nli;
  auto r = nli_scores(nli, "one two three four five", "the whole hypothesis stays intact");
  EXPECT_TRUE(r.premise_truncated);
  EXPECT_EQ(nli.seen_premise, "one two three");
  EXPECT_EQ(nli.seen_hypothesis, "the whole hypothesis stays intact");
  EXPECT_NEAR(r.triple.entailment, 0.5, 1e-12);
  EXPECT_FALSE(nli_scores(nli, "short premise", "h").premise_truncated);
  EXPECT_THROW(nli_scores(nli, " ", "h"), Error);
  EXPECT_THROW(nli_scores(nli, "p", ""), Error);
}

TEST(Nli, HttpProviderParsesLabels) {
  auto http = std::make_shared<hc_test::FakeHttp>();
  int calls = 0;
  http->handler = [&](const HttpRequest& r) {
    ++calls;
    auto body = nlohmann::json::parse(r.body);
    EXPECT_EQ(body["inputs"]["text"], "premise text");
    EXPECT_EQ(body["inputs"]["text_pair"], "hypothesis text");
    return HttpResponse{200,
                        R"([[{"label":"CONTRADICTION","score":0.1},{"label":"NEUTRAL","score":0.2},)"
                        R"({"label":"ENTAILMENT","score":0.7}]])",
                        "application/json"};
  };
  HttpNliProvider nli(http, "https://nli.test/model");
  auto t = nli_scores(nli, "premise text", "hypothesis text").triple;
  EXPECT_NEAR(t.entailment, 0.7, 1e-12);
  EXPECT_NEAR(t.contradiction, 0.1, 1e-12);
  nli_scores(nli, "premise text", "hypothesis text");
  EXPECT_EQ(calls, 1);
  EXPECT_THROW(parse_nli_labels(nlohmann::json::parse(R"([{"label":"ENTAILMENT","score":1}])")), Error);
}

// ---- G-Eval ----

namespace {

std::shared_ptr<LlmGateway> judge_gateway(std::vector<std::string> replies, std::vector<std::string>* prompts) {
  auto gateway = std::make_shared<LlmGateway>(hc_test::fast_gateway_options());
  auto index = std::make_shared<std::size_t>(0);
  gateway->register_backend("judge", std::make_shared<FunctionBackend>([=](const CompletionRequest& r) {
                              if (prompts) prompts->push_back(r.prompt);
                              return replies.at((*index)++ % replies.size());
                            }));
  return gateway;
}

}  // namespace

TEST(Geval, ScaleEndpointsAndMidpoint) {
  for (auto [reply, expected] : std::vector<std::pair<std::string, double>>{{"10", 1.0}, {"1", 0.0}, {"7", 6.0 / 9.0}}) {
    GevalJudge judge(judge_gateway({reply}, nullptr), "judge");
    EXPECT_NEAR(judge.geval(GevalAspect::kFactuality, "input", "output"), expected, 1e-12) << reply;
  }
  GevalJudge judge(judge_gateway({"7"}, nullptr), "judge");
  EXPECT_NEAR(judge.geval(GevalAspect::kOverall, "i", "o"), 0.6667, 1e-4);
}

TEST(Geval, NormalisationIsMonotone) {
  for (int s = 1; s < 10; ++s) EXPECT_LT(normalize_judge_score(s), normalize_judge_score(s + 1));
  EXPECT_DOUBLE_EQ(normalize_judge_score(1), 0.0);
  EXPECT_DOUBLE_EQ(normalize_judge_score(10), 1.0);
}

TEST(Geval, ScoreParsing) {
  EXPECT_EQ(parse_judge_score("Reasoning...\nScore: 8"), 8);
  EXPECT_EQ(parse_judge_score("Step 1 ok. Step 2 ok.\nScore: 6/10"), 6);
  EXPECT_EQ(parse_judge_score(R"({"score": 9, "reason": "fine"})"), 9);
  EXPECT_EQ(parse_judge_score("  4 "), 4);
  EXPECT_FALSE(parse_judge_score("no number at all"));
  EXPECT_FALSE(parse_judge_score("Score: 11"));
  EXPECT_FALSE(parse_judge_score("Score: 0"));
}

TEST(Geval, PromptsCarryInputAndOutput) {
  std::vector<std::string> prompts;
  GevalJudge judge(judge_gateway({"Score: 5"}, &prompts), "judge");
  auto triple = judge.all_aspects("GOLD TEXT", "CANDIDATE TEXT");
  EXPECT_NEAR(triple.factuality, 4.0 / 9.0, 1e-12);
  ASSERT_EQ(prompts.size(), 3u);
  for (const auto& p : prompts) {
    EXPECT_NE(p.find("GOLD TEXT"), std::string::npos);
    EXPECT_NE(p.find("CANDIDATE TEXT"), std::string::npos);
  }
  EXPECT_NE(prompts[0], prompts[1]);
  EXPECT_NE(prompts[1], prompts[2]);
}

TEST(Geval, RetryOnceThenFail) {
  std::vector<std::string> prompts;
  GevalJudge judge(judge_gateway({"It is pretty good.", "Score: 4"}, &prompts), "judge");
  auto out = judge.judge(GevalAspect::kRelevance, "i", "o");
  EXPECT_EQ(out.raw, 4);
  EXPECT_EQ(out.calls, 2);
  ASSERT_EQ(prompts.size(), 2u);
  EXPECT_TRUE(prompts[1].starts_with(prompts[0]));

  GevalJudge never(judge_gateway({"no idea"}, nullptr), "judge");
  try {
    never.judge(GevalAspect::kFactuality, "i", "o");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParse);
  }
}

TEST(Geval, AspectNames) {
  EXPECT_EQ(parse_geval_aspect("factuality"), GevalAspect::kFactuality);
  EXPECT_EQ(to_string(GevalAspect::kRelevance), "relevance");
  EXPECT_THROW(parse_geval_aspect("fluency"), Error);
}

// ---- aggregation and display ----

namespace {

MetricReport report(std::string id, double ned_value, double sem = 0.5) {
  MetricReport r;
  r.record_id = std::move(id);
  r.ned = ned_value;
  r.sem = sem;
  r.nli = {0.5, 0.3, 0.2};
  r.geval = {0.6, 0.7, 0.8};
  return r;
}

MetricReport random_report(std::mt19937& rng, int i) {
  std::uniform_real_distribution<double> u(0, 1);
  MetricReport r;
  r.record_id = "r" + std::to_string(i);
  r.ned = u(rng);
  r.sem = u(rng) * 2 - 1;
  double a = u(rng), b = u(rng), c = u(rng);
  r.nli = {a / (a + b + c), b / (a + b + c), c / (a + b + c)};
  r.geval = {u(rng), u(rng), u(rng)};
  return r;
}

void expect_rows_near(const AggregateRow& a, const AggregateRow& b) {
  EXPECT_EQ(a.n, b.n);
  for (auto c : kColumns) EXPECT_NEAR(column_value(a, c), column_value(b, c), 1e-12) << column_header(c);
}

}  // namespace

TEST(Aggregate, MeansAndIdentity) {
  auto row = aggregate({report("a", 0.2), report("b", 0.4)});
  EXPECT_NEAR(row.ned, 0.3, 1e-12);
  EXPECT_EQ(row.n, 2u);
  auto single = aggregate({report("a", 0.25, 0.9)});
  EXPECT_DOUBLE_EQ(single.ned, 0.25);
  EXPECT_DOUBLE_EQ(single.sem, 0.9);
  EXPECT_EQ(single.nli, (NliTriple{0.5, 0.3, 0.2}));
  EXPECT_EQ(single.geval, (GevalTriple{0.6, 0.7, 0.8}));
  try {
    aggregate({});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyInput);
  }
}

TEST(Aggregate, ShardsCombineToWhole) {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    int n = std::uniform_int_distribution<int>(2, 40)(rng);
    std::vector<MetricReport> all;
    for (int i = 0; i < n; ++i) all.push_back(random_report(rng, i));
    int cut = std::uniform_int_distribution<int>(1, n - 1)(rng);
    std::vector<MetricReport> left(all.begin(), all.begin() + cut), right(all.begin() + cut, all.end());
    expect_rows_near(combine({aggregate(left), aggregate(right)}), aggregate(all));
  }
}

TEST(Display, HalfUpPercentAndDecimals) {
  EXPECT_EQ(display_percent(0.949), "95");
  EXPECT_EQ(display_percent(0.945), "95");
  EXPECT_EQ(display_percent(0.944), "94");
  EXPECT_EQ(display_percent(0.49), "49");
  EXPECT_EQ(display_percent(1.0), "100");
  EXPECT_EQ(display_percent(0.0), "0");
  EXPECT_EQ(display_decimal(0.14), "0.14");
  EXPECT_EQ(display_decimal(0.135), "0.14");
  EXPECT_EQ(display_value(Column::kNed, 0.2), "0.20");
  EXPECT_EQ(display_value(Column::kSem, 0.949), "95");
}

TEST(Report, ColumnOrderAndBestMarks) {
  std::vector<std::string> headers;
  for (auto c : kColumns) headers.push_back(column_header(c));
  EXPECT_EQ(headers, (std::vector<std::string>{"NED", "Sem.", "Ent.", "Neu.", "Con.", "Overall", "Factual.", "Relev."}));

  AggregateRow a = aggregate({report("x", 0.1, 0.9)});
  a.label = "A";
  AggregateRow b = aggregate({report("x", 0.3, 0.9)});
  b.label = "B";
  auto marks = best_marks({a, b});
  EXPECT_TRUE(marks[0][0]);   // lower NED wins
  EXPECT_FALSE(marks[1][0]);
  EXPECT_TRUE(marks[0][1]);   // exact tie on Sem. marks both
  EXPECT_TRUE(marks[1][1]);

  auto csv = render_table({a, b}, TableFormat::kCsv);
  auto lines = split_lines(csv);
  ASSERT_GE(lines.size(), 3u);
  EXPECT_EQ(lines[0], "Run,n,NED,Sem.,Ent.,Neu.,Con.,Overall,Factual.,Relev.");
  EXPECT_EQ(lines[1], "A,1,0.10*,90*,50*,30*,20*,60*,70*,80*");
  EXPECT_EQ(lines[2], "B,1,0.30,90*,50*,30*,20*,60*,70*,80*");
  auto tsv = render_table({a}, TableFormat::kTsv);
  EXPECT_EQ(split_lines(tsv)[0], "Run\tn\tNED\tSem.\tEnt.\tNeu.\tCon.\tOverall\tFactual.\tRelev.");
  auto text = render_table({a, b});
  EXPECT_NE(text.find("Overall"), std::string::npos);
  EXPECT_EQ(parse_table_format("csv"), TableFormat::kCsv);
  EXPECT_THROW(parse_table_format("xml"), Error);
}

// ---- correlation and alignment ----

namespace {

double oracle_pearson(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= x.size();
  my /= y.size();
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace

TEST(Pearson, Examples) {
  std::vector<double> x{1, 2, 3, 4}, y{2, 4, 5, 9}, neg{-1, -2, -3, -4};
  EXPECT_NEAR(pearson(x, x), 1.0, 1e-12);
  EXPECT_NEAR(pearson(x, neg), -1.0, 1e-12);
  // Covariance formula by hand: 11 / sqrt(5 * 26).
  EXPECT_NEAR(pearson(x, y), 11.0 / std::sqrt(130.0), 1e-12);
  EXPECT_NEAR(pearson(x, y), oracle_pearson(x, y), 1e-12);
}

TEST(Pearson, Errors) {
  std::vector<double> x{1, 2, 3}, flat{2, 2, 2}, two{1, 2}, one{1};
  try {
    pearson(x, flat);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDegenerateVariance);
  }
  EXPECT_THROW(pearson(x, two), Error);
  EXPECT_THROW(pearson(one, one), Error);
}

TEST(Pearson, AffineInvariantAndMatchesOracle) {
  std::mt19937 rng(3);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 200; ++trial) {
    int n = std::uniform_int_distribution<int>(2, 30)(rng);
    std::vector<double> x(n), y(n), ax(n);
    for (int i = 0; i < n; ++i) {
      x[i] = g(rng);
      y[i] = 0.5 * x[i] + g(rng);
    }
    double scale = std::exp(g(rng)), shift = g(rng) * 10;
    for (int i = 0; i < n; ++i) ax[i] = scale * x[i] + shift;
    double r = pearson(x, y);
    ASSERT_NEAR(r, oracle_pearson(x, y), 1e-9);
    ASSERT_NEAR(pearson(ax, y), r, 1e-9);
    ASSERT_GE(r, -1.0);
    ASSERT_LE(r, 1.0);
  }
}

TEST(Alignment, DiffsRoundedToTwoDecimals) {
  auto rows = alignment_report({{"cove", 0.54}, {"rarr", 0.68}, {"same", 0.5}},
                               {{"cove", 0.52}, {"rarr", 0.65}, {"same", 0.5}});
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0].method, "cove");
  EXPECT_DOUBLE_EQ(rows[0].diff, 0.02);
  EXPECT_EQ(rows[1].method, "rarr");
  EXPECT_DOUBLE_EQ(rows[1].diff, 0.03);
  EXPECT_DOUBLE_EQ(rows[2].diff, 0.0);
  EXPECT_THROW(alignment_report({{"cove", 0.5}}, {{"rarr", 0.5}}), Error);
}
