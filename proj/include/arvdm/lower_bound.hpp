#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace arvdm {

/// Probability table on {0,1}^3 indexed (x, y, z). All information
/// quantities in this module are in bits (log base 2), matching the
/// discrete lower-bound construction; the Gaussian module uses nats and
/// the conversion factor is ln 2.
class DiscreteJoint {
 public:
  explicit DiscreteJoint(std::array<double, 8> table);

  double at(int x, int y, int z) const { return table_[index(x, y, z)]; }
  const std::array<double, 8>& table() const { return table_; }
  static int index(int x, int y, int z) { return (x << 2) | (y << 1) | z; }

  double marginal_y(int y) const;
  double marginal_xy(int x, int y) const;
  double marginal_yz(int y, int z) const;

 private:
  std::array<double, 8> table_;
};

/// H(x) = -x log2 x - (1-x) log2(1-x), with 0 log 0 = 0.
double binary_entropy(double x);

/// Inverse of H on [0, 1/2], by bisection to |H(eps) - y| <= 1e-12.
double binary_entropy_inverse(double y);

/// P0: X, Y, Z independent Bernoulli(1/2); every atom 1/8.
DiscreteJoint construct_p0();

/// P1: Y independent Bernoulli(1/2); X, Z Bernoulli(1/2) coupled by a flip
/// channel with flip probability eps. Shares both pair marginals with P0.
DiscreteJoint construct_p1(double eps);

double tv(const DiscreteJoint& p, const DiscreteJoint& q);

/// KL(p || q) in bits; +infinity when p charges an atom q does not.
double kl_discrete(const DiscreteJoint& p, const DiscreteJoint& q);

/// I(X; Z | Y) in bits.
double cmi_discrete(const DiscreteJoint& p);

/// Membership in the CMI-constrained set S(s): I(X;Z|Y) <= s + 1e-12.
bool membership(const DiscreteJoint& p, double s);

struct Prop4Result {
  double tv_value;
  double half_kl;
  bool ok;
};

/// TV(P0, P1(eps)) >= KL(P1 || P0) / 2.
Prop4Result verify_prop4(double eps);

/// Reverse Pinsker: TV(p, q) >= (1 - beta1) / log2(1/beta1) * KL(p || q)
/// with beta1^{-1} the maximum atom ratio p/q. The coefficient at
/// beta1 -> 1 is taken by series expansion (limit ln 2).
bool verify_reverse_pinsker(const DiscreteJoint& p, const DiscreteJoint& q);

/// N draws of (x, y) from the XY marginal and N draws of (y, z) from the YZ
/// marginal, the two-marginal data a step-wise learner sees.
struct SampleSet {
  std::vector<std::pair<int, int>> xy;
  std::vector<std::pair<int, int>> yz;
  std::uint64_t seed = 0;
};

SampleSet draw_samples(const DiscreteJoint& p, int n, std::uint64_t seed);

/// Conditional-independence factorization P(x|y) P(y) P(z|y) with add-one
/// smoothing and P(y) pooled over both sample halves.
DiscreteJoint plugin_estimator(const SampleSet& samples);

struct MinimaxResult {
  double fraction;   // trials with KL(P || estimate) >= s^2 / 2
  double eps;        // H^{-1}(1 - s)
  double limit_kl;   // the plugin's large-sample KL, which equals s
  int trials;
};

/// Monte Carlo demonstration of the lower bound's mechanism at the
/// hardest member P1(H^{-1}(1-s)) of S(s).
MinimaxResult minimax_demo(double s, int n, int trials, std::uint64_t seed);

struct BlessingResult {
  double lhs;  // I(X; Z | Y, g(X))
  double rhs;  // I(X; Z | Y)
  bool ok;     // lhs <= rhs + 1e-12
};

/// g is a table {g(0), g(1)} with values in {0,1}; the check enumerates the
/// augmented joint on {0,1}^4.
BlessingResult blessing_check(const DiscreteJoint& p, const std::array<int, 2>& g);

}  // namespace arvdm
