#include "chainkb/pooling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "chainkb/numeric.hpp"
#include "chainkb/rng.hpp"

namespace chainkb {

PoolingKind PoolingKind::parse(std::string_view flag) {
  if (flag == "max") return max();
  if (flag == "avg") return average();
  if (flag == "lse") return logsumexp();
  if (flag.starts_with("topk:")) {
    const std::string digits(flag.substr(5));
    std::size_t pos = 0;
    unsigned long k = 0;
    try {
      k = std::stoul(digits, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != digits.size() || k < 1) {
      throw std::invalid_argument("pooling: bad top-k count in '" +
                                  std::string(flag) + "'");
    }
    return top_k(k);
  }
  throw std::invalid_argument("pooling: unknown kind '" + std::string(flag) +
                              "' (expected max|topk:K|avg|lse)");
}

std::string PoolingKind::to_flag() const {
  switch (kind) {
    case Kind::kMax: return "max";
    case Kind::kTopK: return "topk:" + std::to_string(k);
    case Kind::kAverage: return "avg";
    case Kind::kLogSumExp: return "lse";
  }
  return "?";
}

PoolResult pool(std::span<const double> scores, const PoolingKind& kind) {
  const std::size_t n = scores.size();
  if (n == 0) {
    throw std::invalid_argument("pool: entity pair has no paths");
  }
  for (double s : scores) {
    if (!std::isfinite(s)) throw std::invalid_argument("pool: non-finite score");
  }
  PoolResult result;
  result.weights.assign(n, 0.0);
  switch (kind.kind) {
    case PoolingKind::Kind::kMax:
    case PoolingKind::Kind::kTopK: {
      const std::size_t k =
          kind.kind == PoolingKind::Kind::kMax ? 1 : std::min(kind.k, n);
      std::vector<std::size_t> order(n);
      std::iota(order.begin(), order.end(), 0);
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return a < b;
      });
      double sum = 0.0;
      std::uint64_t pattern = 0xcbf29ce484222325ULL;
      for (std::size_t i = 0; i < k; ++i) {
        sum += scores[order[i]];
        result.weights[order[i]] = 1.0 / static_cast<double>(k);
        pattern = fnv1a64_mix(pattern, order[i]);
      }
      result.pooled = sum / static_cast<double>(k);
      result.selection_pattern = pattern;
      break;
    }
    case PoolingKind::Kind::kAverage: {
      double sum = 0.0;
      for (double s : scores) sum += s;
      result.pooled = sum / static_cast<double>(n);
      std::fill(result.weights.begin(), result.weights.end(),
                1.0 / static_cast<double>(n));
      break;
    }
    case PoolingKind::Kind::kLogSumExp: {
      // Stabilized as c + log sum exp(s - c); the weights are the softmax.
      const double c = *std::max_element(scores.begin(), scores.end());
      double total = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        result.weights[i] = std::exp(scores[i] - c);
        total += result.weights[i];
      }
      result.pooled = c + std::log(total);
      for (double& w : result.weights) w /= total;
      break;
    }
  }
  result.probability = sigmoid(result.pooled);
  return result;
}

std::vector<double> pool_backward(std::span<const double> scores,
                                  const PoolingKind& kind, double upstream) {
  PoolResult r = pool(scores, kind);
  for (double& w : r.weights) w *= upstream;
  return std::move(r.weights);
}

}  // namespace chainkb
