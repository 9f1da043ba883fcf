#pragma once

// CPG network dynamics: one (x, y) oscillator per hinge, antisymmetric
// coupling between nearby hinges, tanh-shaped joint output.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace lamarck::controller {

/// Which steering gain applies to a joint, by the sign of its body-frame x.
enum class Side : std::int8_t { Left = -1, Center = 0, Right = 1 };

/// x_a receives -w * x_b, x_b receives +w * x_a, with w = params[param].
struct Coupling {
  std::size_t a = 0;
  std::size_t b = 0;
  std::size_t param = 0;

  bool operator==(const Coupling&) const = default;
};

inline constexpr double kInitialState = 0.70710678118654752440;  // sqrt(2)/2
inline constexpr double kWeightClamp = 4.0;

/// Parameters are raw genotype values; the dynamics read them clamped to
/// [-kWeightClamp, kWeightClamp].
struct CpgNetwork {
  std::vector<double> params;
  std::vector<std::size_t> internal;  // param index per oscillator
  std::vector<Coupling> couplings;
  std::vector<Side> sides;  // per oscillator
  std::vector<double> x;
  std::vector<double> y;

  std::size_t size() const noexcept { return internal.size(); }
  /// Puts every oscillator back at (sqrt(2)/2, sqrt(2)/2).
  void reset();
};

struct SteerGains {
  double left = 1.0;
  double right = 1.0;

  bool operator==(const SteerGains&) const = default;
};

/// out = 2 / (1 + exp(-2x)) - 1
double output_activation(double x) noexcept;

/// Advances the network by dt with one classical RK4 step and writes the
/// gain-scaled joint outputs to `out` (size() entries). Throws
/// NumericalDivergence if the state stops being finite.
void step(CpgNetwork& net, double dt, SteerGains gains, std::span<double> out);

/// Proportional-bearing steering: the side the target lies on is slowed by
/// c_steer * |bearing| / pi. Heading is in radians counter-clockwise from +x.
SteerGains steering_gains(double heading, double pos_x, double pos_y, double target_x,
                          double target_y, double c_steer);

/// Signed bearing in (-pi, pi] from the heading to the target; negative means
/// the target is on the right.
double bearing(double heading, double pos_x, double pos_y, double target_x, double target_y);

}  // namespace lamarck::controller
