#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "curla/adam.hpp"

using namespace curla;

TEST_CASE("zero gradient leaves parameters unchanged") {
  std::vector<double> params{1.0, -2.0, 0.5};
  AdamState state(3);
  adam_step(params, std::vector<double>{0.0, 0.0, 0.0}, state, 0.1);
  CHECK(params[0] == 1.0);
  CHECK(params[1] == -2.0);
  CHECK(params[2] == 0.5);
}

TEST_CASE("first step moves by about -lr * sign(g)") {
  std::vector<double> params{0.0, 0.0};
  AdamState state(2);
  adam_step(params, std::vector<double>{3.0, -0.01}, state, 1e-3);
  CHECK(params[0] == doctest::Approx(-1e-3).epsilon(1e-6));
  CHECK(params[1] == doctest::Approx(1e-3).epsilon(1e-4));
}

TEST_CASE("matches a hand-computed two-step trace on a scalar") {
  // lr = 0.1, g1 = 2, g2 = -1, beta1 = 0.9, beta2 = 0.999, eps = 1e-8.
  const double lr = 0.1, b1 = 0.9, b2 = 0.999, eps = 1e-8;
  const double g1 = 2.0, g2 = -1.0;

  double m = (1 - b1) * g1;
  double v = (1 - b2) * g1 * g1;
  double m_hat = m / (1 - b1);
  double v_hat = v / (1 - b2);
  double theta = 0.5 - lr * m_hat / (std::sqrt(v_hat) + eps);

  m = b1 * m + (1 - b1) * g2;
  v = b2 * v + (1 - b2) * g2 * g2;
  m_hat = m / (1 - b1 * b1);
  v_hat = v / (1 - b2 * b2);
  theta = theta - lr * m_hat / (std::sqrt(v_hat) + eps);

  std::vector<double> params{0.5};
  AdamState state(1);
  adam_step(params, std::vector<double>{g1}, state, lr);
  adam_step(params, std::vector<double>{g2}, state, lr);
  CHECK(params[0] == doctest::Approx(theta).epsilon(1e-12));
}

TEST_CASE("shape mismatch is rejected") {
  std::vector<double> params{0.0};
  AdamState state(2);
  CHECK_THROWS_AS(adam_step(params, std::vector<double>{1.0}, state, 0.1),
                  std::invalid_argument);
}
