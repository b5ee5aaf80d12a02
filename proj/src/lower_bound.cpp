#include "arvdm/lower_bound.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "arvdm/rng.hpp"

namespace arvdm {

namespace {

constexpr double kTol = 1e-12;

double log2_safe(double x) { return std::log2(x); }

double xlogx(double x) { return x <= 0.0 ? 0.0 : x * log2_safe(x); }

}  // namespace

DiscreteJoint::DiscreteJoint(std::array<double, 8> table) : table_(table) {
  double sum = 0.0;
  for (double v : table_) {
    if (v < 0.0) throw std::invalid_argument("DiscreteJoint: negative entry");
    sum += v;
  }
  if (std::abs(sum - 1.0) > kTol)
    throw std::invalid_argument("DiscreteJoint: entries sum to " + std::to_string(sum));
}

double DiscreteJoint::marginal_y(int y) const {
  double s = 0.0;
  for (int x = 0; x < 2; ++x)
    for (int z = 0; z < 2; ++z) s += at(x, y, z);
  return s;
}

double DiscreteJoint::marginal_xy(int x, int y) const {
  return at(x, y, 0) + at(x, y, 1);
}

double DiscreteJoint::marginal_yz(int y, int z) const {
  return at(0, y, z) + at(1, y, z);
}

double binary_entropy(double x) {
  if (x < 0.0 || x > 1.0)
    throw std::domain_error("binary_entropy: argument outside [0, 1]");
  return -xlogx(x) - xlogx(1.0 - x);
}

double binary_entropy_inverse(double y) {
  if (y < 0.0 || y > 1.0)
    throw std::domain_error("binary_entropy_inverse: argument outside [0, 1]");
  double lo = 0.0, hi = 0.5;
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    const double h = binary_entropy(mid);
    if (std::abs(h - y) <= kTol) return mid;
    if (h < y) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

DiscreteJoint construct_p0() {
  std::array<double, 8> t;
  t.fill(0.125);
  return DiscreteJoint(t);
}

DiscreteJoint construct_p1(double eps) {
  if (eps < 0.0 || eps > 0.5)
    throw std::domain_error("construct_p1: flip probability outside [0, 1/2]");
  std::array<double, 8> t{};
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int z = 0; z < 2; ++z) {
        const double pxz = (z == x) ? (1.0 - eps) / 2.0 : eps / 2.0;
        t[DiscreteJoint::index(x, y, z)] = 0.5 * pxz;
      }
  return DiscreteJoint(t);
}

double tv(const DiscreteJoint& p, const DiscreteJoint& q) {
  double s = 0.0;
  for (int i = 0; i < 8; ++i) s += std::abs(p.table()[i] - q.table()[i]);
  return 0.5 * s;
}

double kl_discrete(const DiscreteJoint& p, const DiscreteJoint& q) {
  double s = 0.0;
  for (int i = 0; i < 8; ++i) {
    const double pi = p.table()[i];
    const double qi = q.table()[i];
    if (pi == 0.0) continue;
    if (qi == 0.0) return std::numeric_limits<double>::infinity();
    s += pi * log2_safe(pi / qi);
  }
  return s;
}

double cmi_discrete(const DiscreteJoint& p) {
  double s = 0.0;
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int z = 0; z < 2; ++z) {
        const double pxyz = p.at(x, y, z);
        if (pxyz <= 0.0) continue;
        const double py = p.marginal_y(y);
        const double pxy = p.marginal_xy(x, y);
        const double pyz = p.marginal_yz(y, z);
        s += pxyz * log2_safe(pxyz * py / (pxy * pyz));
      }
  return s;
}

bool membership(const DiscreteJoint& p, double s) {
  if (s < 0.0 || s > 1.0) throw std::domain_error("membership: s outside [0, 1]");
  return cmi_discrete(p) <= s + kTol;
}

Prop4Result verify_prop4(double eps) {
  const DiscreteJoint p0 = construct_p0();
  const DiscreteJoint p1 = construct_p1(eps);
  Prop4Result r;
  r.tv_value = tv(p0, p1);
  r.half_kl = 0.5 * kl_discrete(p1, p0);
  r.ok = r.tv_value >= r.half_kl - kTol;
  return r;
}

bool verify_reverse_pinsker(const DiscreteJoint& p, const DiscreteJoint& q) {
  double max_ratio = 0.0;
  for (int i = 0; i < 8; ++i) {
    if (q.table()[i] <= 0.0)
      throw std::domain_error("verify_reverse_pinsker: q must be strictly positive");
    max_ratio = std::max(max_ratio, p.table()[i] / q.table()[i]);
  }
  const double beta1 = 1.0 / max_ratio;
  double coeff;
  if (std::abs(1.0 - beta1) < 1e-8) {
    // (1 - b)/log2(1/b) -> ln 2 * (1 - b)/(-ln b); expand around b = 1.
    const double u = 1.0 - beta1;
    coeff = std::log(2.0) * (1.0 - u / 2.0);
  } else {
    coeff = (1.0 - beta1) / log2_safe(1.0 / beta1);
  }
  return tv(p, q) >= coeff * kl_discrete(p, q) - kTol;
}

SampleSet draw_samples(const DiscreteJoint& p, int n, std::uint64_t seed) {
  if (n < 1) throw std::domain_error("draw_samples: need at least one sample");
  SampleSet s;
  s.seed = seed;
  s.xy.reserve(n);
  s.yz.reserve(n);
  CounterRng rng_xy(seed, 0);
  CounterRng rng_yz(seed, 1);
  std::array<double, 4> cdf_xy{}, cdf_yz{};
  double acc = 0.0;
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) {
      acc += p.marginal_xy(x, y);
      cdf_xy[x * 2 + y] = acc;
    }
  acc = 0.0;
  for (int y = 0; y < 2; ++y)
    for (int z = 0; z < 2; ++z) {
      acc += p.marginal_yz(y, z);
      cdf_yz[y * 2 + z] = acc;
    }
  auto pick = [](const std::array<double, 4>& cdf, double u) {
    for (int i = 0; i < 4; ++i)
      if (u <= cdf[i]) return i;
    return 3;
  };
  for (int i = 0; i < n; ++i) {
    const int a = pick(cdf_xy, rng_xy.uniform());
    s.xy.push_back({a / 2, a % 2});
    const int b = pick(cdf_yz, rng_yz.uniform());
    s.yz.push_back({b / 2, b % 2});
  }
  return s;
}

DiscreteJoint plugin_estimator(const SampleSet& samples) {
  // Counts with add-one smoothing; P(y) pooled over both halves.
  double count_y[2] = {0, 0};
  double count_xy[2][2] = {{0, 0}, {0, 0}};
  double count_yz[2][2] = {{0, 0}, {0, 0}};
  for (const auto& [x, y] : samples.xy) {
    count_xy[x][y] += 1.0;
    count_y[y] += 1.0;
  }
  for (const auto& [y, z] : samples.yz) {
    count_yz[y][z] += 1.0;
    count_y[y] += 1.0;
  }
  const double n_xy = static_cast<double>(samples.xy.size());
  const double n_yz = static_cast<double>(samples.yz.size());
  const double n_y = n_xy + n_yz;
  std::array<double, 8> t{};
  double total = 0.0;
  for (int y = 0; y < 2; ++y) {
    const double py = (count_y[y] + 1.0) / (n_y + 2.0);
    const double ny_xy = count_xy[0][y] + count_xy[1][y];
    const double ny_yz = count_yz[y][0] + count_yz[y][1];
    for (int x = 0; x < 2; ++x) {
      const double px_y = (count_xy[x][y] + 1.0) / (ny_xy + 2.0);
      for (int z = 0; z < 2; ++z) {
        const double pz_y = (count_yz[y][z] + 1.0) / (ny_yz + 2.0);
        t[DiscreteJoint::index(x, y, z)] = px_y * py * pz_y;
        total += t[DiscreteJoint::index(x, y, z)];
      }
    }
  }
  for (double& v : t) v /= total;
  return DiscreteJoint(t);
}

MinimaxResult minimax_demo(double s, int n, int trials, std::uint64_t seed) {
  if (s <= 0.0 || s > 1.0)
    throw std::domain_error("minimax_demo: s outside (0, 1]");
  if (trials < 1) throw std::domain_error("minimax_demo: need at least one trial");
  MinimaxResult result;
  result.eps = binary_entropy_inverse(1.0 - s);
  result.limit_kl = s;
  result.trials = trials;
  const DiscreteJoint p = construct_p1(result.eps);
  const double threshold = s * s / 2.0;
  int hits = 0;
  for (int t = 0; t < trials; ++t) {
    const SampleSet samples =
        draw_samples(p, n, seed + 0x100000001ULL * static_cast<std::uint64_t>(t));
    const DiscreteJoint estimate = plugin_estimator(samples);
    if (kl_discrete(p, estimate) >= threshold) ++hits;
  }
  result.fraction = static_cast<double>(hits) / trials;
  return result;
}

BlessingResult blessing_check(const DiscreteJoint& p, const std::array<int, 2>& g) {
  for (int v : g)
    if (v != 0 && v != 1)
      throw std::domain_error("blessing_check: g must map into {0, 1}");

  // Augmented joint q(x, y, z, u) with u = g(x), then condition on (y, u).
  double q[2][2][2][2] = {};
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int z = 0; z < 2; ++z) q[x][y][z][g[x]] += p.at(x, y, z);

  double lhs = 0.0;
  for (int y = 0; y < 2; ++y)
    for (int u = 0; u < 2; ++u) {
      double pyu = 0.0, pxz[2][2] = {};
      double px[2] = {0, 0}, pz[2] = {0, 0};
      for (int x = 0; x < 2; ++x)
        for (int z = 0; z < 2; ++z) {
          pxz[x][z] = q[x][y][z][u];
          pyu += pxz[x][z];
          px[x] += pxz[x][z];
          pz[z] += pxz[x][z];
        }
      if (pyu <= 0.0) continue;
      for (int x = 0; x < 2; ++x)
        for (int z = 0; z < 2; ++z) {
          if (pxz[x][z] <= 0.0) continue;
          lhs += pxz[x][z] * std::log2(pxz[x][z] * pyu / (px[x] * pz[z]));
        }
    }

  BlessingResult result;
  result.lhs = lhs;
  result.rhs = cmi_discrete(p);
  result.ok = result.lhs <= result.rhs + kTol;
  return result;
}

}  // namespace arvdm
