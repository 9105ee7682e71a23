#include "hallucorrect/evidence.h"

#include <algorithm>
#include <future>

#include <spdlog/spdlog.h>

#include "hallucorrect/chunking.h"
#include "hallucorrect/errors.h"
#include "hallucorrect/passages.h"
#include "hallucorrect/text_util.h"

namespace hallucorrect {

EvidenceRetriever::EvidenceRetriever(std::shared_ptr<SearchService> search, std::shared_ptr<PageFetcher> fetcher,
                                     std::shared_ptr<Embedder> embedder)
    : search_(std::move(search)), fetcher_(std::move(fetcher)), embedder_(std::move(embedder)) {}

EvidenceBundle EvidenceRetriever::build_evidence(const std::string& question, const SummaryRecord& record,
                                                 const PipelineConfig& config) {
  switch (config.evidence_source) {
    case SourceKind::kInternal:
      return EvidenceBundle{};
    case SourceKind::kGoldArticle: {
      EvidenceBundle bundle;
      bundle.source_kind = SourceKind::kGoldArticle;
      if (record.source_article && !trim(*record.source_article).empty()) {
        bundle.items.push_back(EvidenceItem{1, *record.source_article, std::nullopt, std::nullopt, std::nullopt});
      } else {
        bundle.degraded = true;
        bundle.notes.emplace_back("record has no source article");
      }
      bundle.concatenated = concatenate_items(bundle.items);
      return bundle;
    }
    case SourceKind::kSearch:
      if (!config.engine || !config.mode) {
        throw Error(ErrorCode::kConfig, "search evidence needs engine and mode");
      }
      if (!search_) throw Error(ErrorCode::kConfig, "no search service configured");
      return *config.mode == RetrievalMode::kSnippets ? snippets(question, config) : full_article(question, config);
  }
  return EvidenceBundle{};
}

EvidenceBundle EvidenceRetriever::snippets(const std::string& question, const PipelineConfig& config) {
  EvidenceBundle bundle;
  bundle.source_kind = SourceKind::kSearch;
  bundle.engine = config.engine;
  bundle.mode = RetrievalMode::kSnippets;
  for (const auto& result : search_->search(*config.engine, question, config.top_n)) {
    auto text = trim(result.snippet);
    if (text.empty()) {
      bundle.notes.push_back("empty snippet for " + result.url);
      continue;
    }
    EvidenceItem item;
    item.rank = static_cast<int>(bundle.items.size()) + 1;
    item.text = std::move(text);
    item.url = result.url;
    item.title = result.title;
    bundle.items.push_back(std::move(item));
  }
  if (bundle.items.empty()) bundle.notes.emplace_back("engine returned no snippets");
  bundle.concatenated = concatenate_items(bundle.items);
  return bundle;
}

EvidenceBundle EvidenceRetriever::full_article(const std::string& question, const PipelineConfig& config) {
  if (!fetcher_ || !embedder_) throw Error(ErrorCode::kConfig, "full-article mode needs a fetcher and an embedder");
  EvidenceBundle bundle;
  bundle.source_kind = SourceKind::kSearch;
  bundle.engine = config.engine;
  bundle.mode = RetrievalMode::kFullArticle;

  auto results = search_->search(*config.engine, question, config.top_n);
  std::vector<std::future<FetchedPage>> pending;
  for (const auto& r : results) {
    pending.push_back(std::async(std::launch::async, [this, url = r.url] {
      try {
        return fetcher_->fetch_and_extract(url);
      } catch (const Error& e) {
        return FetchedPage{url, "", std::string("error: ") + e.what()};
      }
    }));
  }

  // Chunks keep their page's rank order, so ties resolve toward better-ranked pages.
  std::vector<Chunk> pool;
  std::vector<std::string> titles;
  std::vector<std::size_t> page_of;
  for (std::size_t i = 0; i < pending.size(); ++i) {
    auto page = pending[i].get();
    if (!page.reason.empty()) {
      bundle.notes.push_back(page.url + ": " + page.reason);
      continue;
    }
    for (auto& chunk : chunk_text(page.text, config.chunk_size, config.chunk_overlap, page.url)) {
      pool.push_back(std::move(chunk));
      page_of.push_back(i);
    }
  }
  if (pool.empty()) {
    bundle.degraded = true;
    bundle.notes.emplace_back("no article text could be retrieved");
    return bundle;
  }

  std::vector<std::string> texts{question};
  for (const auto& c : pool) texts.push_back(c.text);
  auto vectors = embedder_->embed(texts);
  for (std::size_t i = 0; i < pool.size(); ++i) pool[i].embedding = std::move(vectors[i + 1]);
  const auto& query = vectors.front();

  std::vector<Chunk> chosen;
  if (config.selection == PassageSelection::kPooled) {
    chosen = select_top_passages(query, std::move(pool), config.top_n);
  } else {
    std::vector<Chunk> best_per_page;
    std::size_t start = 0;
    while (start < pool.size()) {
      auto end = start;
      while (end < pool.size() && page_of[end] == page_of[start]) ++end;
      std::vector<Chunk> page(pool.begin() + static_cast<long>(start), pool.begin() + static_cast<long>(end));
      auto top = select_top_passages(query, std::move(page), 1);
      best_per_page.push_back(std::move(top.front()));
      start = end;
    }
    for (auto& c : best_per_page) c.score.reset();
    chosen = select_top_passages(query, std::move(best_per_page), config.top_n);
  }

  for (auto& chunk : chosen) {
    EvidenceItem item;
    item.rank = static_cast<int>(bundle.items.size()) + 1;
    item.text = std::move(chunk.text);
    item.url = chunk.source_url;
    for (const auto& r : results) {
      if (r.url == chunk.source_url) {
        item.title = r.title;
        break;
      }
    }
    item.score = chunk.score;
    bundle.items.push_back(std::move(item));
  }
  bundle.concatenated = concatenate_items(bundle.items);
  return bundle;
}

}  // namespace hallucorrect
