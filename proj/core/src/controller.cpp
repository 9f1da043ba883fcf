#include "lamarck/controller.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numbers>

#include "lamarck/errors.hpp"

namespace lamarck::controller {

namespace {

struct Scratch {
  std::vector<double> w, k1x, k1y, k2x, k2y, k3x, k3y, k4x, k4y, tx, ty;

  void resize(std::size_t params, std::size_t n) {
    w.resize(params);
    for (auto* v : {&k1x, &k1y, &k2x, &k2y, &k3x, &k3y, &k4x, &k4y, &tx, &ty}) v->resize(n);
  }
};

void derivative(const CpgNetwork& net, std::span<const double> w, std::span<const double> x,
                std::span<const double> y, std::span<double> dx, std::span<double> dy) {
  const std::size_t n = net.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double wi = w[net.internal[i]];
    dx[i] = wi * y[i];
    dy[i] = -wi * x[i];
  }
  for (const Coupling& c : net.couplings) {
    const double wab = w[c.param];
    dx[c.a] -= wab * x[c.b];
    dx[c.b] += wab * x[c.a];
  }
}

}  // namespace

void CpgNetwork::reset() {
  x.assign(size(), kInitialState);
  y.assign(size(), kInitialState);
}

double output_activation(double x) noexcept { return 2.0 / (1.0 + std::exp(-2.0 * x)) - 1.0; }

void step(CpgNetwork& net, double dt, SteerGains gains, std::span<double> out) {
  const std::size_t n = net.size();
  assert(out.size() >= n);
  assert(net.x.size() == n && net.y.size() == n);

  thread_local Scratch s;
  s.resize(net.params.size(), n);
  for (std::size_t p = 0; p < net.params.size(); ++p)
    s.w[p] = std::clamp(net.params[p], -kWeightClamp, kWeightClamp);

  derivative(net, s.w, net.x, net.y, s.k1x, s.k1y);
  for (std::size_t i = 0; i < n; ++i) {
    s.tx[i] = net.x[i] + 0.5 * dt * s.k1x[i];
    s.ty[i] = net.y[i] + 0.5 * dt * s.k1y[i];
  }
  derivative(net, s.w, s.tx, s.ty, s.k2x, s.k2y);
  for (std::size_t i = 0; i < n; ++i) {
    s.tx[i] = net.x[i] + 0.5 * dt * s.k2x[i];
    s.ty[i] = net.y[i] + 0.5 * dt * s.k2y[i];
  }
  derivative(net, s.w, s.tx, s.ty, s.k3x, s.k3y);
  for (std::size_t i = 0; i < n; ++i) {
    s.tx[i] = net.x[i] + dt * s.k3x[i];
    s.ty[i] = net.y[i] + dt * s.k3y[i];
  }
  derivative(net, s.w, s.tx, s.ty, s.k4x, s.k4y);

  const double h6 = dt / 6.0;
  for (std::size_t i = 0; i < n; ++i) {
    net.x[i] += h6 * (s.k1x[i] + 2.0 * (s.k2x[i] + s.k3x[i]) + s.k4x[i]);
    net.y[i] += h6 * (s.k1y[i] + 2.0 * (s.k2y[i] + s.k3y[i]) + s.k4y[i]);
    if (!std::isfinite(net.x[i]) || !std::isfinite(net.y[i]))
      throw NumericalDivergence("cpg state diverged at oscillator " + std::to_string(i));
    double gain = 1.0;
    if (net.sides[i] == Side::Left) gain = gains.left;
    if (net.sides[i] == Side::Right) gain = gains.right;
    out[i] = output_activation(net.x[i]) * gain;
  }
}

double bearing(double heading, double pos_x, double pos_y, double target_x, double target_y) {
  const double to_target = std::atan2(target_y - pos_y, target_x - pos_x);
  double theta = std::remainder(to_target - heading, 2.0 * std::numbers::pi);
  if (theta <= -std::numbers::pi) theta += 2.0 * std::numbers::pi;
  return theta;
}

SteerGains steering_gains(double heading, double pos_x, double pos_y, double target_x,
                          double target_y, double c_steer) {
  const double theta = bearing(heading, pos_x, pos_y, target_x, target_y);
  const double slow = 1.0 - c_steer * std::min(std::abs(theta) / std::numbers::pi, 1.0);
  if (theta < 0.0) return {1.0, slow};
  if (theta > 0.0) return {slow, 1.0};
  return {1.0, 1.0};
}

}  // namespace lamarck::controller
