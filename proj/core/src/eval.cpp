#include "chainkb/eval.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace chainkb {

std::size_t RankedList::relevant_count() const {
  std::size_t count = 0;
  for (const RankedItem& item : items) count += item.relevant;
  return count;
}

RankedList make_ranked_list(std::string name, std::vector<RankedItem> items) {
  std::sort(items.begin(), items.end(),
            [](const RankedItem& a, const RankedItem& b) {
              if (a.score != b.score) return a.score > b.score;
              return a.candidate < b.candidate;
            });
  return RankedList{std::move(name), std::move(items)};
}

double average_precision(const RankedList& list) {
  const std::size_t relevant = list.relevant_count();
  if (relevant == 0) {
    throw std::invalid_argument("average_precision: no relevant items in '" +
                                list.name + "'");
  }
  double sum = 0.0;
  std::size_t hits = 0;
  for (std::size_t k = 0; k < list.items.size(); ++k) {
    if (list.items[k].relevant) {
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(k + 1);
    }
  }
  return sum / static_cast<double>(relevant);
}

double mean_average_precision(std::span<const RankedList> lists,
                              std::size_t* skipped) {
  double sum = 0.0;
  std::size_t defined = 0;
  std::size_t undefined = 0;
  for (const RankedList& list : lists) {
    if (list.relevant_count() == 0) {
      ++undefined;
      continue;
    }
    sum += average_precision(list);
    ++defined;
  }
  if (skipped) *skipped = undefined;
  if (defined == 0) {
    throw std::invalid_argument("mean_average_precision: no list has a relevant item");
  }
  return sum / static_cast<double>(defined);
}

double mean_quantile(std::span<const PathQueryJudgment> judgments) {
  if (judgments.empty()) {
    throw std::invalid_argument("mean_quantile: no judgments");
  }
  double sum = 0.0;
  for (const PathQueryJudgment& j : judgments) {
    if (j.incorrect_scores.empty()) {
      throw std::invalid_argument("mean_quantile: query has no incorrect candidates");
    }
    std::size_t lower = 0;
    for (double s : j.incorrect_scores) lower += s < j.correct_score;
    sum += static_cast<double>(lower) / static_cast<double>(j.incorrect_scores.size());
  }
  return sum / static_cast<double>(judgments.size());
}

RankedList rank_pairs(const PathModel& model, const KnowledgeGraph& kg,
                      QueryId query, std::string name,
                      std::span<const CandidatePair> candidates,
                      PathProvider& provider, const PoolingKind& pooling) {
  std::vector<RankedItem> items;
  items.reserve(candidates.size());
  for (const CandidatePair& pair : candidates) {
    const auto paths = provider.paths_for(pair.source, pair.target);
    double score;
    if (paths.empty()) {
      score = -std::numeric_limits<double>::infinity();
    } else {
      std::vector<double> path_scores;
      path_scores.reserve(paths.size());
      for (const Path& p : paths) {
        path_scores.push_back(model.score_path(kg, p, query));
      }
      score = pool(path_scores, pooling).probability;
    }
    items.push_back(RankedItem{PathProvider::pair_key(pair.source, pair.target),
                               score, pair.relevant});
  }
  return make_ranked_list(std::move(name), std::move(items));
}

}  // namespace chainkb
