#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace chainkb {

// How the per-path scores of an entity pair are collapsed into one score.
struct PoolingKind {
  enum class Kind { kMax, kTopK, kAverage, kLogSumExp };

  Kind kind = Kind::kLogSumExp;
  std::size_t k = 5;  // top-k only

  static PoolingKind max() { return {Kind::kMax, 1}; }
  static PoolingKind top_k(std::size_t k) { return {Kind::kTopK, k}; }
  static PoolingKind average() { return {Kind::kAverage, 0}; }
  static PoolingKind logsumexp() { return {Kind::kLogSumExp, 0}; }

  // Accepts "max", "topk:K", "avg", "lse".
  static PoolingKind parse(std::string_view flag);
  std::string to_flag() const;
};

struct PoolResult {
  double pooled = 0.0;
  // sigmoid(pooled); strictly inside (0, 1).
  double probability = 0.0;
  // d(pooled)/d(score_i). Max/top-k: 1/k on the k selected paths (ties go to
  // the lowest index); average: 1/N everywhere; LSE: softmax of the scores.
  std::vector<double> weights;
  // Fingerprint of the selected indices (max/top-k); feeds gradient checking.
  std::uint64_t selection_pattern = 0;
};

// N must be >= 1 and every score finite; an empty score set is the caller's
// problem ("entity pair has no paths").
PoolResult pool(std::span<const double> scores, const PoolingKind& kind);

// d(pooled)/d(score_i) scaled by upstream.
std::vector<double> pool_backward(std::span<const double> scores,
                                  const PoolingKind& kind, double upstream);

}  // namespace chainkb
