#pragma once

#include <memory>
#include <string>

#include "hallucorrect/embedding.h"
#include "hallucorrect/fetch.h"
#include "hallucorrect/search.h"
#include "hallucorrect/types.h"

namespace hallucorrect {

/// Evidence retrieval R(q, s): builds the evidence bundle for one
/// verification question from the configured source.
///
///  - internal:     empty bundle; the answer prompt gets no context
///  - gold_article: the record's article as the single item
///  - search, snippets:     the engine's top_n snippets in rank order
///  - search, full_article: every result page is fetched, extracted and
///    chunked; chunks are embedded and the top_n most similar to the
///    question are kept (pooled over all pages, or best-per-page)
///
/// The search query is the question text verbatim. Page failures degrade
/// the bundle instead of failing the record; engine errors propagate.
class EvidenceRetriever {
 public:
  EvidenceRetriever(std::shared_ptr<SearchService> search, std::shared_ptr<PageFetcher> fetcher,
                    std::shared_ptr<Embedder> embedder);

  EvidenceBundle build_evidence(const std::string& question, const SummaryRecord& record,
                                const PipelineConfig& config);

 private:
  EvidenceBundle snippets(const std::string& question, const PipelineConfig& config);
  EvidenceBundle full_article(const std::string& question, const PipelineConfig& config);

  std::shared_ptr<SearchService> search_;
  std::shared_ptr<PageFetcher> fetcher_;
  std::shared_ptr<Embedder> embedder_;
};

}  // namespace hallucorrect
