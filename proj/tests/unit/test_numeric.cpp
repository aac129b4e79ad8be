#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <limits>

#include "chainkb/gradcheck.hpp"
#include "chainkb/numeric.hpp"
#include "chainkb/optim.hpp"
#include "chainkb/params.hpp"
#include "chainkb/rng.hpp"

using namespace chainkb;

namespace {

// Independent scalar-loop oracle; same ascending-j summation order as the
// implementation, so results must agree bit for bit.
Vector matvec_oracle(const Matrix& m, const Vector& v) {
  Vector out(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < m.cols(); ++j) acc += m(i, j) * v[j];
    out[i] = acc;
  }
  return out;
}

// Plain scalar Adam, written separately from the library implementation.
struct ScalarAdamOracle {
  double m = 0.0, v = 0.0;
  std::size_t t = 0;
  double step(double x, double g, const AdamConfig& c) {
    ++t;
    m = c.beta1 * m + (1 - c.beta1) * g;
    v = c.beta2 * v + (1 - c.beta2) * g * g;
    const double mhat = m / (1 - std::pow(c.beta1, static_cast<double>(t)));
    const double vhat = v / (1 - std::pow(c.beta2, static_cast<double>(t)));
    return x - c.learning_rate * mhat / (std::sqrt(vhat) + c.epsilon);
  }
};

}  // namespace

TEST_CASE("matvec identity and zero") {
  const Matrix eye = Matrix::identity(3);
  const Vector v{1.0, 2.0, 3.0};
  CHECK(matvec(eye, v) == Vector{1.0, 2.0, 3.0});

  const Matrix zero(2, 2);
  CHECK(matvec(zero, Vector{5.0, 7.0}) == Vector{0.0, 0.0});
}

TEST_CASE("matvec matches the loop oracle exactly") {
  SplitMix64 rng(42);
  Matrix m(4, 3);
  for (double& x : m.data()) x = rng.uniform(-2.0, 2.0);
  Vector v(3);
  for (double& x : v) x = rng.uniform(-2.0, 2.0);
  CHECK(matvec(m, v) == matvec_oracle(m, v));
}

TEST_CASE("matvec rejects shape mismatch") {
  CHECK_THROWS_AS(matvec(Matrix(2, 3), Vector{1.0, 2.0}), std::invalid_argument);
}

TEST_CASE("matvec_transposed agrees with explicit transpose") {
  SplitMix64 rng(7);
  Matrix m(5, 3);
  for (double& x : m.data()) x = rng.uniform(-1.0, 1.0);
  Vector v(5);
  for (double& x : v) x = rng.uniform(-1.0, 1.0);
  const Vector got = matvec_transposed(m, v);
  for (std::size_t j = 0; j < 3; ++j) {
    double acc = 0.0;
    for (std::size_t i = 0; i < 5; ++i) acc += m(i, j) * v[i];
    CHECK(got[j] == doctest::Approx(acc).epsilon(1e-15));
  }
}

TEST_CASE("relu and its gradient") {
  const Vector v{-1.0, 0.0, 2.0};
  CHECK(relu(v) == Vector{0.0, 0.0, 2.0});
  CHECK(relu_grad(v) == Vector{0.0, 0.0, 1.0});

  SplitMix64 rng(3);
  Vector w(16);
  for (double& x : w) x = rng.uniform(-3.0, 3.0);
  CHECK(relu(relu(w)) == relu(w));
}

TEST_CASE("sigmoid basics") {
  CHECK(sigmoid(0.0) == 0.5);
  SplitMix64 rng(11);
  for (int i = 0; i < 200; ++i) {
    const double x = rng.uniform(-30.0, 30.0);
    CHECK(sigmoid(x) + sigmoid(-x) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("sigmoid stays inside (0,1) at extreme inputs") {
  const double lo = sigmoid(-1000.0);
  CHECK(lo > 0.0);
  CHECK(lo <= 1e-300);
  const double hi = sigmoid(1000.0);
  CHECK(hi < 1.0);
  CHECK(std::isfinite(lo));
  CHECK(std::isfinite(hi));
}

TEST_CASE("sigmoid is monotone") {
  SplitMix64 rng(13);
  for (int i = 0; i < 200; ++i) {
    const double a = rng.uniform(-30.0, 30.0);
    const double b = a + rng.uniform(1e-6, 5.0);
    CHECK(sigmoid(a) < sigmoid(b));
  }
}

TEST_CASE("adam leaves parameters fixed under zero gradients") {
  ParamSet params;
  params.add("w", 2, 3);
  SplitMix64 rng(5);
  for (double& x : params.at("w").data()) x = rng.uniform(-1.0, 1.0);
  const ParamSet before = params;
  ParamSet grads = params.zeros_like();
  AdamOptimizer adam(params);
  for (int i = 0; i < 5; ++i) adam.step(params, grads);
  for (std::size_t c = 0; c < params.coord_count(); ++c) {
    CHECK(params.coord(c) == before.coord(c));
  }
}

TEST_CASE("one adam step moves a unit-gradient parameter by about lr") {
  ParamSet params;
  params.add("w", 1, 1);
  params.at("w")(0, 0) = 0.25;
  ParamSet grads = params.zeros_like();
  grads.at("w")(0, 0) = 1.0;
  AdamOptimizer adam(params);
  adam.step(params, grads);
  // bias-corrected m_hat/(sqrt(v_hat)+eps) is 1/(1+1e-8)
  CHECK(params.at("w")(0, 0) ==
        doctest::Approx(0.25 - 1e-3 * (1.0 - 1e-8)).epsilon(1e-10));
}

TEST_CASE("adam reproduces an independent scalar trace") {
  const AdamConfig cfg;
  ParamSet params;
  params.add("w", 1, 1);
  params.at("w")(0, 0) = 0.5;
  ParamSet grads = params.zeros_like();
  AdamOptimizer adam(params, cfg);
  ScalarAdamOracle oracle;
  double x = 0.5;
  const double gs[2] = {0.3, -0.8};
  for (double g : gs) {
    grads.at("w")(0, 0) = g;
    adam.step(params, grads);
    x = oracle.step(x, g, cfg);
    CHECK(params.at("w")(0, 0) == doctest::Approx(x).epsilon(1e-10));
  }
}

TEST_CASE("adam rejects non-finite gradients by name") {
  ParamSet params;
  params.add("bad_param", 1, 1);
  ParamSet grads = params.zeros_like();
  grads.at("bad_param")(0, 0) = std::numeric_limits<double>::quiet_NaN();
  AdamOptimizer adam(params);
  CHECK_THROWS_WITH_AS(adam.step(params, grads),
                       "adam: non-finite gradient for parameter 'bad_param'",
                       std::runtime_error);
}

TEST_CASE("gradient checker accepts a quadratic loss") {
  ParamSet params;
  params.add("p", 2, 2);
  SplitMix64 rng(17);
  for (double& x : params.at("p").data()) x = rng.uniform(-2.0, 2.0);
  ParamSet grads = params;  // d(0.5*|p|^2)/dp = p
  const auto loss = [](const ParamSet& p) {
    double acc = 0.0;
    for (std::size_t c = 0; c < p.coord_count(); ++c) acc += p.coord(c) * p.coord(c);
    return LossProbe{0.5 * acc};
  };
  const GradCheckReport report = check_gradients(loss, params, grads);
  CHECK(report.ok());
  CHECK(report.max_rel_error < 1e-8);
  CHECK(report.coords_checked == 4);
}

TEST_CASE("gradient checker flags a corrupted coordinate") {
  ParamSet params;
  params.add("p", 1, 3);
  params.at("p")(0, 0) = 0.7;
  params.at("p")(0, 1) = -0.4;
  params.at("p")(0, 2) = 1.1;
  ParamSet grads = params;
  grads.at("p")(0, 1) *= 2.0;  // deliberate corruption
  const auto loss = [](const ParamSet& p) {
    double acc = 0.0;
    for (std::size_t c = 0; c < p.coord_count(); ++c) acc += p.coord(c) * p.coord(c);
    return LossProbe{0.5 * acc};
  };
  const GradCheckReport report = check_gradients(loss, params, grads);
  CHECK_FALSE(report.ok());
  CHECK(report.coords_failed == 1);
  REQUIRE(report.failures.size() == 1);
  CHECK(report.failures[0].param == "p");
  CHECK(report.failures[0].col == 1);
}

TEST_CASE("gradient checker rejects non-finite losses") {
  ParamSet params;
  params.add("p", 1, 1);
  const auto loss = [](const ParamSet&) {
    return LossProbe{std::numeric_limits<double>::quiet_NaN()};
  };
  CHECK_THROWS_AS(check_gradients(loss, params, params), std::runtime_error);
}

TEST_CASE("derived rng streams are reproducible and distinct") {
  SplitMix64 a = SplitMix64::derive(9, "alpha", 1);
  SplitMix64 b = SplitMix64::derive(9, "alpha", 1);
  SplitMix64 c = SplitMix64::derive(9, "beta", 1);
  CHECK(a.next_u64() == b.next_u64());
  CHECK(a.next_u64() != c.next_u64());
  SplitMix64 d(123);
  for (int i = 0; i < 1000; ++i) {
    const double x = d.next_double();
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
    CHECK(d.below(7) < 7);
  }
}
