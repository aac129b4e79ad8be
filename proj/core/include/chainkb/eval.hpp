#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "chainkb/graph.hpp"
#include "chainkb/model.hpp"
#include "chainkb/paths.hpp"
#include "chainkb/pooling.hpp"

namespace chainkb {

struct RankedItem {
  std::uint64_t candidate = 0;
  double score = 0.0;
  bool relevant = false;
};

// Candidates sorted by descending score; ties go to the smaller candidate id.
struct RankedList {
  std::string name;
  std::vector<RankedItem> items;

  std::size_t relevant_count() const;
};

RankedList make_ranked_list(std::string name, std::vector<RankedItem> items);

// AP = (1/R) * sum over relevant ranks k of precision@k. Requires at least
// one relevant item.
double average_precision(const RankedList& list);

// Mean of the defined per-list APs; lists without a relevant item are
// excluded and counted in *skipped.
double mean_average_precision(std::span<const RankedList> lists,
                              std::size_t* skipped = nullptr);

struct PathQueryJudgment {
  double correct_score = 0.0;
  std::vector<double> incorrect_scores;
};

// Fraction of incorrect candidates scored strictly below the correct one,
// averaged over queries. Ties do not count as lower.
double mean_quantile(std::span<const PathQueryJudgment> judgments);

struct CandidatePair {
  EntityId source = 0;
  EntityId target = 0;
  bool relevant = false;
};

// Scores each candidate pair by pooled probability over its path set; pairs
// without paths score -infinity and rank last.
RankedList rank_pairs(const PathModel& model, const KnowledgeGraph& kg,
                      QueryId query, std::string name,
                      std::span<const CandidatePair> candidates,
                      PathProvider& provider, const PoolingKind& pooling);

}  // namespace chainkb
