#include <doctest.h>

#include <stdexcept>

#include <algorithm>
#include <cmath>

#include "chainkb/eval.hpp"
#include "chainkb/rng.hpp"
#include "chainkb/training.hpp"
#include "test_helpers.hpp"

using namespace chainkb;
using namespace chainkb::testing;

namespace {

// Brute-force AP: rescan the whole prefix for every relevant rank.
double ap_oracle(const RankedList& list) {
  std::size_t relevant = 0;
  for (const auto& item : list.items) relevant += item.relevant;
  double sum = 0.0;
  for (std::size_t k = 0; k < list.items.size(); ++k) {
    if (!list.items[k].relevant) continue;
    std::size_t hits = 0;
    for (std::size_t j = 0; j <= k; ++j) hits += list.items[j].relevant;
    sum += static_cast<double>(hits) / static_cast<double>(k + 1);
  }
  return sum / static_cast<double>(relevant);
}

RankedList random_list(SplitMix64& rng, bool ensure_relevant = true) {
  const std::size_t n = 2 + rng.below(12);
  std::vector<RankedItem> items;
  for (std::size_t i = 0; i < n; ++i) {
    items.push_back(RankedItem{i, rng.uniform(-3.0, 3.0), rng.below(3) == 0});
  }
  if (ensure_relevant) items[rng.below(n)].relevant = true;
  return make_ranked_list("list", std::move(items));
}

}  // namespace

TEST_CASE("average precision on simple lists") {
  // all relevant items first -> 1.0
  RankedList perfect = make_ranked_list(
      "p", {{0, 3.0, true}, {1, 2.0, true}, {2, 1.0, false}});
  CHECK(average_precision(perfect) == 1.0);

  // single relevant at rank 2 of 2 -> 0.5
  RankedList half = make_ranked_list("h", {{0, 2.0, false}, {1, 1.0, true}});
  CHECK(average_precision(half) == 0.5);

  RankedList empty = make_ranked_list("e", {{0, 1.0, false}});
  CHECK_THROWS_AS(average_precision(empty), std::invalid_argument);
}

TEST_CASE("average precision matches the brute-force oracle exactly") {
  SplitMix64 rng(101);
  for (int trial = 0; trial < 300; ++trial) {
    const RankedList list = random_list(rng);
    CHECK(average_precision(list) == ap_oracle(list));
  }
}

TEST_CASE("mean average precision") {
  RankedList a = make_ranked_list("a", {{0, 2.0, true}, {1, 1.0, false}});
  RankedList b = make_ranked_list("b", {{0, 2.0, false}, {1, 1.0, true}});
  const std::vector<RankedList> lists{a, b};
  CHECK(mean_average_precision(lists) == 0.75);

  RankedList undefined = make_ranked_list("u", {{0, 1.0, false}});
  const std::vector<RankedList> mixed{a, undefined};
  std::size_t skipped = 0;
  CHECK(mean_average_precision(mixed, &skipped) == 1.0);
  CHECK(skipped == 1);
}

TEST_CASE("ranked lists sort by score with id tie-break") {
  RankedList list = make_ranked_list(
      "t", {{7, 1.0, false}, {3, 1.0, true}, {5, 2.0, false}});
  CHECK(list.items[0].candidate == 5);
  CHECK(list.items[1].candidate == 3);
  CHECK(list.items[2].candidate == 7);
}

TEST_CASE("AP is invariant under monotone score transforms") {
  SplitMix64 rng(102);
  for (int trial = 0; trial < 50; ++trial) {
    RankedList list = random_list(rng);
    std::vector<RankedItem> warped;
    for (const auto& item : list.items) {
      warped.push_back(RankedItem{item.candidate,
                                  std::exp(0.5 * item.score) + 3.0, item.relevant});
    }
    const RankedList transformed = make_ranked_list("w", std::move(warped));
    CHECK(average_precision(list) == average_precision(transformed));
  }
}

TEST_CASE("AP with one relevant item is bounded by 1/n") {
  SplitMix64 rng(103);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 2 + rng.below(10);
    std::vector<RankedItem> items;
    for (std::size_t i = 0; i < n; ++i) {
      items.push_back(RankedItem{i, rng.uniform(-1.0, 1.0), false});
    }
    items[rng.below(n)].relevant = true;
    const RankedList list = make_ranked_list("b", std::move(items));
    const double ap = average_precision(list);
    CHECK(ap >= 1.0 / static_cast<double>(n));
    CHECK(ap <= 1.0);
  }
}

TEST_CASE("mean quantile counting") {
  // correct above all 9 incorrect -> 1.0
  PathQueryJudgment top;
  top.correct_score = 5.0;
  for (int i = 0; i < 9; ++i) top.incorrect_scores.push_back(-i);
  const std::vector<PathQueryJudgment> one{top};
  CHECK(mean_quantile(one) == 1.0);

  // correct below all -> 0.0
  PathQueryJudgment bottom;
  bottom.correct_score = -10.0;
  bottom.incorrect_scores = {1.0, 2.0};
  const std::vector<PathQueryJudgment> two{bottom};
  CHECK(mean_quantile(two) == 0.0);

  // ties never count as lower
  PathQueryJudgment tied;
  tied.correct_score = 1.0;
  tied.incorrect_scores = {1.0, 1.0, 1.0};
  const std::vector<PathQueryJudgment> three{tied};
  CHECK(mean_quantile(three) == 0.0);

  // mixed case against a counting oracle
  SplitMix64 rng(104);
  std::vector<PathQueryJudgment> random;
  double expected = 0.0;
  for (int q = 0; q < 100; ++q) {
    PathQueryJudgment j;
    j.correct_score = rng.uniform(-2.0, 2.0);
    const std::size_t n = 1 + rng.below(20);
    std::size_t lower = 0;
    for (std::size_t i = 0; i < n; ++i) {
      j.incorrect_scores.push_back(rng.uniform(-2.0, 2.0));
      lower += j.incorrect_scores.back() < j.correct_score;
    }
    expected += static_cast<double>(lower) / static_cast<double>(n);
    random.push_back(std::move(j));
  }
  expected /= 100.0;
  CHECK(mean_quantile(random) == expected);
}

TEST_CASE("rank_pairs orders by pooled probability and drops pathless last") {
  KnowledgeGraph kg = toy_graph();
  const EntityId island = kg.intern_entity("island");  // unreachable
  ModelConfig cfg;
  cfg.relation_dim = 8;
  cfg.hidden_dim = 8;
  cfg.entity_dim = 4;
  PathModel model(cfg, sizes_of(kg, 1), 7);

  // give the direct h path a strongly positive score
  std::vector<TrainInstance> dataset{[&] {
    TrainInstance inst;
    inst.source = entity(kg, "e0");
    inst.target = entity(kg, "e3");
    inst.relation = relation(kg, "h");
    inst.query = 0;
    inst.label = Label::kPositive;
    inst.paths = {Path{inst.source, {{relation(kg, "r3"), entity(kg, "e4")},
                                     {relation(kg, "r4"), inst.target}}}};
    return inst;
  }()};
  TrainConfig tc;
  tc.epochs = 800;
  tc.batch_size = 1;
  tc.seed = 9;
  train(kg, dataset, model, tc);

  PathProvider provider(kg, 3, 400, 13);
  const std::vector<CandidatePair> candidates{
      {entity(kg, "e0"), entity(kg, "e3"), true},   // has predictive paths
      {entity(kg, "e0"), entity(kg, "e2"), false},  // reachable, unpredictive
      {entity(kg, "e0"), island, false},            // pathless
  };
  const RankedList ranked =
      rank_pairs(model, kg, 0, "h", candidates, provider, PoolingKind::logsumexp());
  CHECK(ranked.items[0].candidate ==
        PathProvider::pair_key(entity(kg, "e0"), entity(kg, "e3")));
  CHECK(ranked.items[0].relevant);
  CHECK(ranked.items.back().candidate ==
        PathProvider::pair_key(entity(kg, "e0"), island));
  CHECK(std::isinf(ranked.items.back().score));

  // input permutation must not change the ranking
  std::vector<CandidatePair> shuffled{candidates[2], candidates[0], candidates[1]};
  const RankedList again =
      rank_pairs(model, kg, 0, "h", shuffled, provider, PoolingKind::logsumexp());
  REQUIRE(again.items.size() == ranked.items.size());
  for (std::size_t i = 0; i < ranked.items.size(); ++i) {
    CHECK(again.items[i].candidate == ranked.items[i].candidate);
  }
}
