#include "hallucorrect/nli.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

#include "hallucorrect/errors.h"
#include "hallucorrect/serialize.h"
#include "hallucorrect/text_util.h"

namespace hallucorrect {

namespace {

const std::set<std::string>& stopwords() {
  static const std::set<std::string> words{"a",    "an",   "the",  "of",   "to",   "in",   "on",   "at",
                                           "and",  "or",   "is",   "are",  "was",  "were", "be",   "been",
                                           "it",   "its",  "for",  "with", "by",   "as",   "that", "this",
                                           "from", "has",  "have", "had",  "will", "would"};
  return words;
}

const std::set<std::string>& negations() {
  static const std::set<std::string> words{"not", "no", "never", "none", "nobody", "nothing",
                                           "neither", "nor", "without", "n't", "cannot"};
  return words;
}

struct Features {
  std::vector<std::string> content;
  std::set<std::string> all;
  std::set<std::string> numbers;
  bool negated = false;
};

Features features(const std::string& text) {
  Features f;
  auto lower = to_lower_ascii(text);
  auto is_digit = [&](std::size_t i) { return i < lower.size() && std::isdigit(static_cast<unsigned char>(lower[i])); };
  std::string token;
  auto flush = [&] {
    if (token.empty()) return;
    if (token.size() > 3 && token.ends_with("n't")) {
      f.negated = true;
      token.resize(token.size() - 3);
    }
    if (negations().contains(token)) f.negated = true;
    if (std::isdigit(static_cast<unsigned char>(token.front()))) f.numbers.insert(token);
    f.all.insert(token);
    if (!stopwords().contains(token) && !negations().contains(token)) f.content.push_back(token);
    token.clear();
  };
  for (std::size_t i = 0; i < lower.size(); ++i) {
    unsigned char c = lower[i];
    // Decimal points stay inside numbers; other punctuation splits.
    bool decimal = (c == '.' || c == ',') && i > 0 && is_digit(i - 1) && is_digit(i + 1);
    if (std::isalnum(c) || c == '\'' || decimal) {
      token.push_back(static_cast<char>(c));
    } else {
      flush();
    }
  }
  flush();
  return f;
}

NliTriple softmax(double e, double n, double c) {
  const double m = std::max({e, n, c});
  const double ee = std::exp(e - m), en = std::exp(n - m), ec = std::exp(c - m);
  const double z = ee + en + ec;
  return {ee / z, en / z, ec / z};
}

}  // namespace

NliTriple LexicalNliProvider::classify(const std::string& premise, const std::string& hypothesis) {
  auto p = features(premise);
  auto h = features(hypothesis);

  double coverage = 1.0;
  if (!h.content.empty()) {
    std::size_t hit = 0;
    for (const auto& w : h.content) hit += p.all.contains(w) ? 1 : 0;
    coverage = static_cast<double>(hit) / static_cast<double>(h.content.size());
  }
  double number_mismatch = 0.0;
  if (!h.numbers.empty()) {
    std::size_t missing = 0;
    for (const auto& n : h.numbers) missing += p.numbers.contains(n) ? 0 : 1;
    // Only a contradiction when the premise states some other number.
    if (!p.numbers.empty()) number_mismatch = static_cast<double>(missing) / static_cast<double>(h.numbers.size());
  }
  const double negation_mismatch = (p.negated != h.negated) ? 1.0 : 0.0;
  const double conflict = number_mismatch + negation_mismatch * coverage;

  const double ent = 4.0 * coverage - 3.0 * conflict - 1.0;
  const double neu = 1.0 + 2.0 * (1.0 - coverage);
  const double con = 3.0 * conflict - 0.5;
  return softmax(ent, neu, con);
}

HttpNliProvider::HttpNliProvider(std::shared_ptr<HttpClient> http, std::string url, std::string api_key,
                                 std::size_t max_premise_words)
    : http_(std::move(http)), url_(std::move(url)), api_key_(std::move(api_key)), max_words_(max_premise_words) {}

NliTriple parse_nli_labels(const nlohmann::json& body) {
  const nlohmann::json* list = &body;
  if (list->is_array() && !list->empty() && list->front().is_array()) list = &list->front();
  if (!list->is_array()) throw Error(ErrorCode::kParse, "NLI response is not a label list");
  NliTriple t;
  int seen = 0;
  for (const auto& item : *list) {
    auto label = to_lower_ascii(item.at("label").get<std::string>());
    double score = item.at("score").get<double>();
    if (label.find("entail") != std::string::npos) {
      t.entailment = score;
      seen |= 1;
    } else if (label.find("neutral") != std::string::npos) {
      t.neutral = score;
      seen |= 2;
    } else if (label.find("contra") != std::string::npos) {
      t.contradiction = score;
      seen |= 4;
    }
  }
  if (seen != 7) throw Error(ErrorCode::kParse, "NLI response lacks one of the three classes");
  return t;
}

NliTriple HttpNliProvider::classify(const std::string& premise, const std::string& hypothesis) {
  {
    std::lock_guard lock(mu_);
    if (auto it = memo_.find({premise, hypothesis}); it != memo_.end()) return it->second;
  }
  HttpRequest req;
  req.method = "POST";
  req.url = url_;
  req.content_type = "application/json";
  if (!api_key_.empty()) req.headers.emplace_back("Authorization", "Bearer " + api_key_);
  req.body = to_text(nlohmann::json{{"inputs", {{"text", premise}, {"text_pair", hypothesis}}}});
  auto resp = http_->send(req);
  if (resp.status == 401 || resp.status == 403) throw Error(ErrorCode::kAuthentication, "NLI endpoint refused credentials");
  if (resp.status != 200) {
    throw Error(ErrorCode::kBackendUnavailable, "NLI endpoint returned HTTP " + std::to_string(resp.status));
  }
  nlohmann::json body;
  try {
    body = nlohmann::json::parse(resp.body);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("NLI response: ") + e.what());
  }
  auto t = parse_nli_labels(body);
  std::lock_guard lock(mu_);
  memo_[{premise, hypothesis}] = t;
  return t;
}

NliResult nli_scores(NliProvider& provider, const std::string& generated, const std::string& reference) {
  if (trim(generated).empty() || trim(reference).empty()) {
    throw Error(ErrorCode::kInvalidArgument, "NLI needs nonempty premise and hypothesis");
  }
  NliResult result;
  std::string premise = generated;
  auto words = split_words(generated);
  if (words.size() > provider.max_premise_words()) {
    words.resize(provider.max_premise_words());
    premise = join(words, " ");
    result.premise_truncated = true;
  }
  auto raw = provider.classify(premise, reference);
  const double sum = raw.entailment + raw.neutral + raw.contradiction;
  if (!(sum > 0.0) || raw.entailment < 0 || raw.neutral < 0 || raw.contradiction < 0) {
    throw Error(ErrorCode::kParse, "NLI provider returned invalid scores");
  }
  result.triple = {raw.entailment / sum, raw.neutral / sum, raw.contradiction / sum};
  return result;
}

}  // namespace hallucorrect
