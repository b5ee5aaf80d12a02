#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "arvdm/gaussian.hpp"

using namespace arvdm;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

MatrixXd mat2(double a, double b, double c, double d) {
  MatrixXd m(2, 2);
  m << a, b, c, d;
  return m;
}

GaussianLaw random_psd_law(std::mt19937_64& gen, int dim) {
  std::normal_distribution<double> normal(0.0, 1.0);
  MatrixXd g(dim, dim);
  VectorXd mu(dim);
  for (int i = 0; i < dim; ++i) {
    mu(i) = normal(gen);
    for (int j = 0; j < dim; ++j) g(i, j) = normal(gen);
  }
  MatrixXd cov = g * g.transpose() + 0.1 * MatrixXd::Identity(dim, dim);
  return GaussianLaw(mu, cov);
}

double digamma(double x) {
  double r = 0.0;
  while (x < 6.0) {
    r -= 1.0 / x;
    x += 1.0;
  }
  const double f = 1.0 / (x * x);
  return r + std::log(x) - 0.5 / x -
         f * (1.0 / 12 - f * (1.0 / 120 - f * (1.0 / 252)));
}

/// KSG-1 mutual information estimate (nats) for 2-D samples, grid-bucketed
/// Chebyshev k-NN plus sorted-marginal range counts.
double ksg_mutual_information(const std::vector<double>& xs,
                              const std::vector<double>& ys, int k) {
  const int n = static_cast<int>(xs.size());
  const auto [xmin_it, xmax_it] = std::minmax_element(xs.begin(), xs.end());
  const auto [ymin_it, ymax_it] = std::minmax_element(ys.begin(), ys.end());
  const double xmin = *xmin_it, ymin = *ymin_it;
  const int side = std::max(8, static_cast<int>(std::sqrt(n / 2.0)));
  const double cell = std::max((*xmax_it - xmin), (*ymax_it - ymin)) / side + 1e-12;
  const int gx = static_cast<int>((*xmax_it - xmin) / cell) + 1;
  const int gy = static_cast<int>((*ymax_it - ymin) / cell) + 1;
  std::vector<std::vector<int>> buckets(static_cast<std::size_t>(gx) * gy);
  auto cell_of = [&](int i) {
    const int cx = static_cast<int>((xs[i] - xmin) / cell);
    const int cy = static_cast<int>((ys[i] - ymin) / cell);
    return std::pair<int, int>(cx, cy);
  };
  for (int i = 0; i < n; ++i) {
    auto [cx, cy] = cell_of(i);
    buckets[static_cast<std::size_t>(cx) * gy + cy].push_back(i);
  }

  std::vector<double> xs_sorted(xs), ys_sorted(ys);
  std::sort(xs_sorted.begin(), xs_sorted.end());
  std::sort(ys_sorted.begin(), ys_sorted.end());
  auto strict_count = [](const std::vector<double>& sorted, double center,
                         double radius) {
    auto lo = std::upper_bound(sorted.begin(), sorted.end(), center - radius);
    auto hi = std::lower_bound(sorted.begin(), sorted.end(), center + radius);
    return static_cast<int>(hi - lo) - 1;  // excludes the point itself
  };

  double acc = 0.0;
  std::vector<double> dists;
  for (int i = 0; i < n; ++i) {
    auto [cx, cy] = cell_of(i);
    dists.clear();
    double kth = std::numeric_limits<double>::infinity();
    for (int ring = 0;; ++ring) {
      for (int ax = cx - ring; ax <= cx + ring; ++ax) {
        for (int ay = cy - ring; ay <= cy + ring; ++ay) {
          if (std::max(std::abs(ax - cx), std::abs(ay - cy)) != ring) continue;
          if (ax < 0 || ay < 0 || ax >= gx || ay >= gy) continue;
          for (int j : buckets[static_cast<std::size_t>(ax) * gy + ay]) {
            if (j == i) continue;
            dists.push_back(std::max(std::abs(xs[j] - xs[i]),
                                     std::abs(ys[j] - ys[i])));
          }
        }
      }
      if (static_cast<int>(dists.size()) >= k) {
        std::nth_element(dists.begin(), dists.begin() + (k - 1), dists.end());
        kth = dists[k - 1];
        if (kth <= ring * cell) break;  // no closer point can hide outside
      }
    }
    const int nx = strict_count(xs_sorted, xs[i], kth);
    const int ny = strict_count(ys_sorted, ys[i], kth);
    acc += digamma(nx + 1) + digamma(ny + 1);
  }
  return digamma(k) + digamma(n) - acc / n;
}

double simpson_1d(const std::function<double(double)>& f, double a, double b,
                  int intervals) {
  const double h = (b - a) / intervals;
  double s = f(a) + f(b);
  for (int i = 1; i < intervals; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

}  // namespace

TEST_CASE("push_forward identity and constant maps") {
  GaussianLaw law(VectorXd::Zero(2), mat2(1.0, 0.3, 0.3, 2.0));
  GaussianLaw same = push_forward(law, AffineChannel::identity(2));
  CHECK((same.mean() - law.mean()).norm() == doctest::Approx(0.0));
  CHECK((same.cov() - law.cov()).norm() == doctest::Approx(0.0));

  VectorXd ones = VectorXd::Ones(2);
  GaussianLaw constant = push_forward(
      GaussianLaw::standard(2),
      AffineChannel::deterministic(MatrixXd::Zero(2, 2), ones));
  CHECK((constant.mean() - ones).norm() == doctest::Approx(0.0));
  CHECK(constant.cov().norm() == doctest::Approx(0.0));
}

TEST_CASE("push_forward scalar example against Monte Carlo") {
  // N(0,1) through y = 2x + noise(1) gives N(0, 5).
  MatrixXd a(1, 1), q(1, 1);
  a << 2.0;
  q << 1.0;
  GaussianLaw out = push_forward(GaussianLaw::standard(1),
                                 AffineChannel(a, VectorXd::Zero(1), q));
  CHECK(out.mean()(0) == doctest::Approx(0.0));
  CHECK(out.cov()(0, 0) == doctest::Approx(5.0));

  std::mt19937_64 gen(17);
  std::normal_distribution<double> normal(0.0, 1.0);
  const int n = 1'000'000;
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double y = 2.0 * normal(gen) + normal(gen);
    sum += y;
    sum_sq += y * y;
  }
  const double mean = sum / n;
  const double var = sum_sq / n - mean * mean;
  CHECK(std::abs(mean - 0.0) < 5.0 * std::sqrt(5.0 / n));
  CHECK(std::abs(var - 5.0) < 5.0 * 5.0 * std::sqrt(2.0 / n));
}

TEST_CASE("push_forward composition matches sequential pushes") {
  std::mt19937_64 gen(3);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int rep = 0; rep < 50; ++rep) {
    GaussianLaw law = random_psd_law(gen, 3);
    auto random_channel = [&](int out, int in) {
      MatrixXd a(out, in);
      VectorXd b(out);
      MatrixXd g(out, out);
      for (int i = 0; i < out; ++i) {
        b(i) = normal(gen);
        for (int j = 0; j < in; ++j) a(i, j) = normal(gen);
        for (int j = 0; j < out; ++j) g(i, j) = normal(gen);
      }
      return AffineChannel(a, b, g * g.transpose());
    };
    AffineChannel c1 = random_channel(4, 3);
    AffineChannel c2 = random_channel(2, 4);
    GaussianLaw seq = push_forward(push_forward(law, c1), c2);
    GaussianLaw composed = push_forward(law, c1.then(c2));
    CHECK((seq.mean() - composed.mean()).norm() <=
          1e-10 * (1.0 + composed.mean().norm()));
    CHECK((seq.cov() - composed.cov()).norm() <=
          1e-10 * (1.0 + composed.cov().norm()));
  }
}

TEST_CASE("push_forward dimension mismatch names both dims") {
  CHECK_THROWS_WITH_AS(
      push_forward(GaussianLaw::standard(3), AffineChannel::identity(2)),
      doctest::Contains("2"), DimensionError);
}

TEST_CASE("marginal selections") {
  GaussianLaw law(VectorXd::Zero(2), mat2(3.0, 0.0, 0.0, 4.0));
  VectorXd mu(2);
  mu << 1.0, 2.0;
  GaussianLaw shifted(mu, mat2(3.0, 0.0, 0.0, 4.0));

  GaussianLaw full = marginal(shifted, IndexSet::range(0, 2));
  CHECK((full.mean() - shifted.mean()).norm() == doctest::Approx(0.0));

  GaussianLaw second = marginal(shifted, IndexSet({1}));
  CHECK(second.mean()(0) == doctest::Approx(2.0));
  CHECK(second.cov()(0, 0) == doctest::Approx(4.0));

  MatrixXd equi(3, 3);
  equi << 1.0, 0.5, 0.5, 0.5, 1.0, 0.5, 0.5, 0.5, 1.0;
  GaussianLaw sub = marginal(GaussianLaw(VectorXd::Zero(3), equi), IndexSet({0, 2}));
  CHECK(sub.cov()(0, 1) == doctest::Approx(0.5));

  CHECK_THROWS_AS(marginal(law, IndexSet({0, 5})), DimensionError);
}

TEST_CASE("condition on independent block leaves the rest unchanged") {
  MatrixXd cov = MatrixXd::Zero(3, 3);
  cov.diagonal() << 1.0, 2.0, 3.0;
  GaussianLaw law(VectorXd::Zero(3), cov);
  VectorXd v(1);
  v << 5.0;
  GaussianLaw conditional = condition(law, IndexSet({1}), v);
  CHECK(conditional.dim() == 2);
  CHECK(conditional.mean().norm() == doctest::Approx(0.0));
  CHECK(conditional.cov()(0, 0) == doctest::Approx(1.0));
  CHECK(conditional.cov()(1, 1) == doctest::Approx(3.0));
}

TEST_CASE("condition bivariate normal against Monte Carlo regression") {
  const double rho = 0.8;
  GaussianLaw law(VectorXd::Zero(2), mat2(1.0, rho, rho, 1.0));
  VectorXd v(1);
  v << 1.0;
  GaussianLaw conditional = condition(law, IndexSet({0}), v);
  CHECK(conditional.mean()(0) == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(conditional.cov()(0, 0) == doctest::Approx(0.36).epsilon(1e-12));

  // OLS slope/intercept/residual variance on joint samples recover the
  // conditional exactly for Gaussians.
  std::mt19937_64 gen(11);
  std::normal_distribution<double> normal(0.0, 1.0);
  const int n = 1'000'000;
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (int i = 0; i < n; ++i) {
    const double x = normal(gen);
    const double y = rho * x + std::sqrt(1 - rho * rho) * normal(gen);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
  }
  const double mx = sx / n, my = sy / n;
  const double slope = (sxy / n - mx * my) / (sxx / n - mx * mx);
  const double resid = (syy / n - my * my) - slope * (sxy / n - mx * my);
  CHECK(std::abs(slope * 1.0 - conditional.mean()(0)) < 5e-3);
  CHECK(std::abs(resid - conditional.cov()(0, 0)) < 5e-3);
}

TEST_CASE("condition on all coordinates yields a zero-dimensional law") {
  GaussianLaw law(VectorXd::Zero(2), mat2(1.0, 0.2, 0.2, 1.0));
  VectorXd v(2);
  v << 0.5, -0.5;
  GaussianLaw conditional = condition(law, IndexSet::range(0, 2), v);
  CHECK(conditional.dim() == 0);
}

TEST_CASE("condition with singular observed block reports condition number") {
  MatrixXd cov = MatrixXd::Zero(3, 3);
  cov(2, 2) = 1.0;  // observed block is exactly zero, jitter cannot help
  GaussianLaw law(VectorXd::Zero(3), cov);
  VectorXd v(2);
  v << 1.0, 1.0;
  CHECK_THROWS_WITH_AS(condition(law, IndexSet({0, 1}), v),
                       doctest::Contains("condition number"), NumericalError);
}

TEST_CASE("kl_gaussian closed forms against quadrature") {
  GaussianLaw p = GaussianLaw::standard(1);
  CHECK(kl_gaussian(p, p) == doctest::Approx(0.0));

  MatrixXd two(1, 1);
  two << 2.0;
  GaussianLaw q(VectorXd::Zero(1), two);
  const double expected = (std::log(2.0) - 0.5) / 2.0;
  CHECK(kl_gaussian(p, q) == doctest::Approx(expected).epsilon(1e-12));

  auto integrand = [](double x) {
    const double logp = -0.5 * x * x - 0.5 * std::log(2 * M_PI);
    const double logq = -0.25 * x * x - 0.5 * std::log(4 * M_PI);
    return std::exp(logp) * (logp - logq);
  };
  const double numeric = simpson_1d(integrand, -12.0, 12.0, 4800);
  CHECK(kl_gaussian(p, q) == doctest::Approx(numeric).epsilon(1e-9));

  // KL(N(mu, I) || N(0, I)) = ||mu||^2 / 2; mu = (3,4) gives 12.5.
  VectorXd mu(2);
  mu << 3.0, 4.0;
  GaussianLaw pm(mu, MatrixXd::Identity(2, 2));
  GaussianLaw q0 = GaussianLaw::standard(2);
  CHECK(kl_gaussian(pm, q0) == doctest::Approx(12.5).epsilon(1e-12));

  // 2-D tensor Simpson over a wide box around the mean.
  const int cells = 400;
  const double lox = 3.0 - 9.0, hix = 3.0 + 9.0;
  const double loy = 4.0 - 9.0, hiy = 4.0 + 9.0;
  auto inner = [&](double x) {
    auto f = [&](double y) {
      const double logp = -0.5 * ((x - 3) * (x - 3) + (y - 4) * (y - 4)) -
                          std::log(2 * M_PI);
      const double logq = -0.5 * (x * x + y * y) - std::log(2 * M_PI);
      return std::exp(logp) * (logp - logq);
    };
    return simpson_1d(f, loy, hiy, cells);
  };
  const double numeric2 = simpson_1d(inner, lox, hix, cells);
  CHECK(numeric2 == doctest::Approx(12.5).epsilon(1e-6));
}

TEST_CASE("kl_gaussian vanishes only for matching parameters") {
  std::mt19937_64 gen(5);
  for (int rep = 0; rep < 20; ++rep) {
    GaussianLaw p = random_psd_law(gen, 3);
    CHECK(kl_gaussian(p, p) <= 1e-12);
    VectorXd mu = p.mean();
    mu(0) += 1e-3;
    GaussianLaw shifted(mu, p.cov());
    CHECK(kl_gaussian(shifted, p) > 1e-9);
  }
}

TEST_CASE("kl_gaussian rejects singular q beyond jitter") {
  GaussianLaw p = GaussianLaw::standard(1);
  MatrixXd zero = MatrixXd::Zero(1, 1);
  GaussianLaw q(VectorXd::Zero(1), zero);
  CHECK_THROWS_AS(kl_gaussian(p, q), NumericalError);
}

TEST_CASE("cmi_gaussian textbook cases") {
  // Block-diagonal given C: A and B independent.
  MatrixXd cov = MatrixXd::Identity(3, 3);
  GaussianLaw indep(VectorXd::Zero(3), cov);
  CHECK(cmi_gaussian(indep, IndexSet({0}), IndexSet({1}), IndexSet({2})) ==
        doctest::Approx(0.0));

  // Gauss-Markov chain: I(A;B|C) = 0 for cov rho^|i-j| with C the middle.
  const double rho = 0.7;
  MatrixXd chain(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) chain(i, j) = std::pow(rho, std::abs(i - j));
  GaussianLaw markov(VectorXd::Zero(3), chain);
  CHECK(cmi_gaussian(markov, IndexSet({0}), IndexSet({2}), IndexSet({1})) <=
        1e-12);

  // Plain MI of a correlated pair: -log(1 - rho^2)/2.
  GaussianLaw pair(VectorXd::Zero(2), mat2(1.0, 0.5, 0.5, 1.0));
  const double expected = -0.5 * std::log(1.0 - 0.25);
  CHECK(cmi_gaussian(pair, IndexSet({0}), IndexSet({1}), IndexSet({})) ==
        doctest::Approx(expected).epsilon(1e-12));

  CHECK_THROWS_AS(
      cmi_gaussian(pair, IndexSet({0}), IndexSet({0}), IndexSet({})),
      DimensionError);
}

TEST_CASE("cmi_gaussian against k-NN estimator" * doctest::timeout(120)) {
  const double rho = 0.5;
  const double exact = -0.5 * std::log(1.0 - rho * rho);
  std::mt19937_64 gen(23);
  std::normal_distribution<double> normal(0.0, 1.0);
  const int n = 1'000'000;
  std::vector<double> xs(n), ys(n);
  for (int i = 0; i < n; ++i) {
    xs[i] = normal(gen);
    ys[i] = rho * xs[i] + std::sqrt(1 - rho * rho) * normal(gen);
  }
  const double estimate = ksg_mutual_information(xs, ys, 4);
  CHECK(std::abs(estimate - exact) < 0.05 * exact);
}

TEST_CASE("cmi chain rule on random joints") {
  std::mt19937_64 gen(7);
  int cases = 0;
  while (cases < 200) {
    GaussianLaw law = random_psd_law(gen, 7);
    IndexSet a({0, 1}), b({2, 3}), z({4, 5}), c({6});
    const double joint = cmi_gaussian(law, a.unioned(b), z, c);
    const double split = cmi_gaussian(law, a, z, c) +
                         cmi_gaussian(law, b, z, c.unioned(a));
    CHECK(std::abs(joint - split) <= 1e-9);
    ++cases;
  }
}

TEST_CASE("gaussian data processing: conditioning on g(A) never raises CMI") {
  std::mt19937_64 gen(13);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int rep = 0; rep < 200; ++rep) {
    GaussianLaw law = random_psd_law(gen, 5);
    IndexSet a({0, 1}), b({2, 3}), c({4});
    MatrixXd g(1, 2);
    g << normal(gen), normal(gen);
    // Append g(A) as coordinate 5.
    MatrixXd ext = MatrixXd::Zero(6, 5);
    ext.topLeftCorner(5, 5).setIdentity();
    ext(5, 0) = g(0, 0);
    ext(5, 1) = g(0, 1);
    GaussianLaw augmented = push_forward(
        law, AffineChannel::deterministic(ext, VectorXd::Zero(6)));
    const double base = cmi_gaussian(law, a, b, c);
    const double refined = cmi_gaussian(augmented, a, b, IndexSet({4, 5}));
    CHECK(refined <= base + 1e-9);
  }
}

TEST_CASE("covariances are symmetrized and PSD-checked") {
  MatrixXd skew = mat2(1.0, 1e-13, -1e-13, 1.0);
  GaussianLaw law(VectorXd::Zero(2), skew);
  CHECK((law.cov() - law.cov().transpose()).norm() == 0.0);

  MatrixXd indefinite = mat2(1.0, 2.0, 2.0, 1.0);
  CHECK_THROWS_AS(GaussianLaw(VectorXd::Zero(2), indefinite), DimensionError);
}
