#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "lamarck/controller.hpp"
#include "lamarck/errors.hpp"

using namespace lamarck::controller;

namespace {

CpgNetwork single(double w) {
  CpgNetwork net;
  net.params = {w};
  net.internal = {0};
  net.sides = {Side::Center};
  net.reset();
  return net;
}

}  // namespace

TEST_CASE("single oscillator follows sin(t + pi/4)") {
  const double dt = 0.005;
  CpgNetwork net = single(1.0);
  std::vector<double> out(1);
  double max_err = 0.0;
  double max_drift = 0.0;
  for (int k = 1; k <= 8000; ++k) {
    step(net, dt, {}, out);
    const double t = k * dt;
    max_err = std::max(max_err, std::abs(net.x[0] - std::sin(t + std::numbers::pi / 4)));
    max_err = std::max(max_err, std::abs(net.y[0] - std::cos(t + std::numbers::pi / 4)));
    max_drift = std::max(max_drift, std::abs(std::hypot(net.x[0], net.y[0]) - 1.0));
  }
  CHECK(max_err < 1e-6);
  CHECK(max_drift < 1e-6);

  CpgNetwork quarter = single(1.0);
  const int steps = 157;
  const double h = (std::numbers::pi / 4) / steps;
  for (int k = 0; k < steps; ++k) step(quarter, h, {}, out);
  CHECK(quarter.x[0] == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("zero weights hold the state") {
  CpgNetwork net = single(0.0);
  std::vector<double> out(1);
  for (int k = 0; k < 100; ++k) step(net, 0.005, {}, out);
  CHECK(net.x[0] == kInitialState);
  CHECK(net.y[0] == kInitialState);
  CHECK(output_activation(0.0) == 0.0);
  CHECK(out[0] == doctest::Approx(std::tanh(kInitialState)));
}

TEST_CASE("coupling is antisymmetric and conserves the norm") {
  CpgNetwork net;
  net.params = {1.0, 0.5, 3.0};
  net.internal = {0, 1};
  net.couplings = {{0, 1, 2}};
  net.sides = {Side::Left, Side::Right};
  net.reset();
  std::vector<double> out(2);
  const auto norm = [&] {
    return net.x[0] * net.x[0] + net.y[0] * net.y[0] + net.x[1] * net.x[1] + net.y[1] * net.y[1];
  };
  const double n0 = norm();
  for (int k = 0; k < 8000; ++k) {
    step(net, 0.005, {0.3, 1.0}, out);
    CHECK(std::abs(out[0]) <= 0.3);
    CHECK(std::abs(out[1]) <= 1.0);
  }
  CHECK(norm() == doctest::Approx(n0).epsilon(1e-6));
}

TEST_CASE("weights are clamped in the dynamics") {
  CpgNetwork a = single(4.0);
  CpgNetwork b = single(400.0);
  std::vector<double> out(1);
  for (int k = 0; k < 50; ++k) {
    step(a, 0.005, {}, out);
    step(b, 0.005, {}, out);
  }
  CHECK(a.x == b.x);
  CHECK(b.params[0] == 400.0);
}

TEST_CASE("steering gains") {
  const double up = std::numbers::pi / 2;
  const auto ahead = steering_gains(up, 0, 0, 0, 5, 0.5);
  CHECK(ahead == SteerGains{1.0, 1.0});

  const auto right = steering_gains(up, 0, 0, 3, 0, 0.5);
  CHECK(right.left == 1.0);
  CHECK(right.right == doctest::Approx(0.75));

  const auto left = steering_gains(up, 0, 0, -3, 0, 0.5);
  CHECK(left.left == doctest::Approx(0.75));
  CHECK(left.right == 1.0);

  const auto behind = steering_gains(up, 0, 0, 0, -1, 0.7);
  CHECK(std::min(behind.left, behind.right) == doctest::Approx(0.3));
  CHECK(std::max(behind.left, behind.right) == 1.0);

  CHECK(bearing(0.0, 0, 0, 1, -1) == doctest::Approx(-std::numbers::pi / 4));
  CHECK(bearing(0.0, 0, 0, -1, 0) == doctest::Approx(std::numbers::pi));
}
