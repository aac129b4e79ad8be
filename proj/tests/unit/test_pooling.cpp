#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "chainkb/numeric.hpp"
#include "chainkb/pooling.hpp"
#include "chainkb/rng.hpp"

using namespace chainkb;

TEST_CASE("average pooling of (1,2,3)") {
  const double scores[] = {1.0, 2.0, 3.0};
  const PoolResult r = pool(scores, PoolingKind::average());
  CHECK(r.pooled == 2.0);
  CHECK(r.probability == doctest::Approx(sigmoid(2.0)).epsilon(1e-15));
  CHECK(r.weights == std::vector<double>{1.0 / 3, 1.0 / 3, 1.0 / 3});
}

TEST_CASE("logsumexp of two zeros is ln 2 with equal weights") {
  const double scores[] = {0.0, 0.0};
  const PoolResult r = pool(scores, PoolingKind::logsumexp());
  CHECK(r.pooled == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(r.weights[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(r.weights[1] == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("a single score pools to itself under every kind") {
  const double scores[] = {0.73};
  for (const PoolingKind kind : {PoolingKind::max(), PoolingKind::top_k(3),
                                 PoolingKind::average(), PoolingKind::logsumexp()}) {
    const PoolResult r = pool(scores, kind);
    CHECK(r.pooled == 0.73);
    CHECK(r.weights == std::vector<double>{1.0});
  }
}

TEST_CASE("top-1 equals max on random arrays") {
  SplitMix64 rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> scores(1 + rng.below(12));
    for (double& s : scores) s = rng.uniform(-5.0, 5.0);
    if (trial % 3 == 0 && scores.size() > 1) scores[1] = scores[0];  // ties too
    const PoolResult a = pool(scores, PoolingKind::max());
    const PoolResult b = pool(scores, PoolingKind::top_k(1));
    CHECK(a.pooled == b.pooled);
    CHECK(a.weights == b.weights);
    CHECK(a.probability == b.probability);
  }
}

TEST_CASE("logsumexp weights are the softmax of the scores") {
  SplitMix64 rng(22);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> scores(1 + rng.below(10));
    for (double& s : scores) s = rng.uniform(-10.0, 10.0);
    const PoolResult r = pool(scores, PoolingKind::logsumexp());
    double norm = 0.0;
    for (double s : scores) norm += std::exp(s);
    for (std::size_t i = 0; i < scores.size(); ++i) {
      CHECK(std::fabs(r.weights[i] - std::exp(scores[i]) / norm) < 1e-12);
    }
  }
}

TEST_CASE("max tie goes to the lowest index") {
  const double scores[] = {5.0, 5.0};
  const auto grad = pool_backward(scores, PoolingKind::max(), 2.0);
  CHECK(grad == std::vector<double>{2.0, 0.0});
}

TEST_CASE("average backward splits the upstream gradient evenly") {
  const double scores[] = {0.4, -1.0, 2.5, 0.0};
  const auto grad = pool_backward(scores, PoolingKind::average(), 1.0);
  for (double g : grad) CHECK(g == 0.25);
}

TEST_CASE("logsumexp backward matches finite differences") {
  SplitMix64 rng(23);
  std::vector<double> scores(6);
  for (double& s : scores) s = rng.uniform(-3.0, 3.0);
  const auto grad = pool_backward(scores, PoolingKind::logsumexp(), 1.0);
  const double h = 1e-6;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    std::vector<double> plus = scores, minus = scores;
    plus[i] += h;
    minus[i] -= h;
    const double fd = (pool(plus, PoolingKind::logsumexp()).pooled -
                       pool(minus, PoolingKind::logsumexp()).pooled) /
                      (2 * h);
    CHECK(std::fabs(grad[i] - fd) / std::max(1.0, std::fabs(fd)) < 1e-6);
  }
}

TEST_CASE("smooth-max sandwich and translation equivariance") {
  SplitMix64 rng(24);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> scores(1 + rng.below(16));
    for (double& s : scores) s = rng.uniform(-20.0, 20.0);
    const double lse = pool(scores, PoolingKind::logsumexp()).pooled;
    const double mx = pool(scores, PoolingKind::max()).pooled;
    CHECK(lse >= mx - 1e-12);
    CHECK(lse <= mx + std::log(static_cast<double>(scores.size())) + 1e-12);

    const double c = rng.uniform(-50.0, 50.0);
    std::vector<double> shifted = scores;
    for (double& s : shifted) s += c;
    const double lse2 = pool(shifted, PoolingKind::logsumexp()).pooled;
    CHECK(lse2 == doctest::Approx(lse + c).epsilon(1e-10));
  }
}

TEST_CASE("gradient sparsity dichotomy") {
  SplitMix64 rng(25);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> scores(1 + rng.below(9));
    for (double& s : scores) s = rng.uniform(-4.0, 4.0);
    const std::size_t n = scores.size();
    const std::size_t k = 1 + rng.below(6);
    const auto count_nonzero = [](const std::vector<double>& v) {
      std::size_t c = 0;
      for (double x : v) c += x != 0.0;
      return c;
    };
    CHECK(count_nonzero(pool_backward(scores, PoolingKind::max(), 1.0)) == 1);
    CHECK(count_nonzero(pool_backward(scores, PoolingKind::top_k(k), 1.0)) ==
          std::min(k, n));
    CHECK(count_nonzero(pool_backward(scores, PoolingKind::average(), 1.0)) == n);
    CHECK(count_nonzero(pool_backward(scores, PoolingKind::logsumexp(), 1.0)) == n);
  }
}

TEST_CASE("probability stays strictly inside (0,1) and ignores permutation") {
  SplitMix64 rng(26);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> scores(2 + rng.below(8));
    for (double& s : scores) s = rng.uniform(-700.0, 700.0);
    for (const PoolingKind kind :
         {PoolingKind::max(), PoolingKind::top_k(2), PoolingKind::average(),
          PoolingKind::logsumexp()}) {
      const PoolResult r = pool(scores, kind);
      CHECK(r.probability > 0.0);
      CHECK(r.probability < 1.0);
      std::vector<double> reversed(scores.rbegin(), scores.rend());
      const PoolResult r2 = pool(reversed, kind);
      CHECK(r2.probability == doctest::Approx(r.probability).epsilon(1e-12));
    }
  }
}

TEST_CASE("an empty score set is refused") {
  CHECK_THROWS_WITH_AS(pool({}, PoolingKind::max()),
                       "pool: entity pair has no paths", std::invalid_argument);
}

TEST_CASE("pooling flag parsing round-trips") {
  CHECK(PoolingKind::parse("max").kind == PoolingKind::Kind::kMax);
  CHECK(PoolingKind::parse("avg").kind == PoolingKind::Kind::kAverage);
  CHECK(PoolingKind::parse("lse").kind == PoolingKind::Kind::kLogSumExp);
  const PoolingKind topk = PoolingKind::parse("topk:7");
  CHECK(topk.kind == PoolingKind::Kind::kTopK);
  CHECK(topk.k == 7);
  CHECK(topk.to_flag() == "topk:7");
  CHECK_THROWS_AS(PoolingKind::parse("topk:0"), std::invalid_argument);
  CHECK_THROWS_AS(PoolingKind::parse("softmax"), std::invalid_argument);
}
