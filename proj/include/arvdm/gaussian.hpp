#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

namespace arvdm {

/// Thrown when matrix algebra fails beyond the jitter policy
/// (singular blocks, inconsistent negative divergences).
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Thrown on structural misuse: dimension mismatches, bad index sets.
struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Sorted set of coordinate indices into a law's state vector.
class IndexSet {
 public:
  IndexSet() = default;
  explicit IndexSet(std::vector<int> indices);
  IndexSet(std::initializer_list<int> indices)
      : IndexSet(std::vector<int>(indices)) {}
  static IndexSet range(int first, int last);  // [first, last)

  const std::vector<int>& indices() const { return indices_; }
  int size() const { return static_cast<int>(indices_.size()); }
  bool empty() const { return indices_.empty(); }
  bool contains(int i) const;

  /// Throws DimensionError unless every index lies in [0, dim).
  void check_within(int dim, const std::string& what) const;
  IndexSet complement(int dim) const;
  bool disjoint_from(const IndexSet& other) const;
  IndexSet unioned(const IndexSet& other) const;

 private:
  std::vector<int> indices_;  // strictly increasing
};

/// Multivariate Gaussian with dense mean and covariance.
///
/// The covariance is re-symmetrized on construction and checked to be
/// positive semidefinite up to lambda_min >= -1e-10 * lambda_max.
/// Zero-dimensional laws are allowed (they arise when conditioning on
/// every coordinate).
class GaussianLaw {
 public:
  GaussianLaw(Eigen::VectorXd mean, Eigen::MatrixXd cov);
  static GaussianLaw standard(int dim);

  int dim() const { return static_cast<int>(mean_.size()); }
  const Eigen::VectorXd& mean() const { return mean_; }
  const Eigen::MatrixXd& cov() const { return cov_; }

  /// Log-density at x. Uses the same jittered Cholesky policy as kl/cmi.
  double log_density(const Eigen::VectorXd& x) const;

 private:
  Eigen::VectorXd mean_;
  Eigen::MatrixXd cov_;
};

/// y = A x + b + xi with xi ~ N(0, Q). One Euler-Maruyama step of the
/// reverse SDE with an affine score is exactly one such channel, which is
/// why laws can be propagated through the sampler without sampling.
struct AffineChannel {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  Eigen::MatrixXd Q;

  AffineChannel(Eigen::MatrixXd A_in, Eigen::VectorXd b_in, Eigen::MatrixXd Q_in);
  static AffineChannel identity(int dim);
  static AffineChannel deterministic(Eigen::MatrixXd A_in, Eigen::VectorXd b_in);

  int in_dim() const { return static_cast<int>(A.cols()); }
  int out_dim() const { return static_cast<int>(A.rows()); }

  /// Composition: (next * this)(x) = next(this(x)).
  AffineChannel then(const AffineChannel& next) const;
};

GaussianLaw push_forward(const GaussianLaw& law, const AffineChannel& ch);
GaussianLaw marginal(const GaussianLaw& law, const IndexSet& idx);

/// Schur-complement conditioning on observed coordinates. The returned law
/// covers the complement indices in their original order.
GaussianLaw condition(const GaussianLaw& law, const IndexSet& obs,
                      const Eigen::VectorXd& value);

/// KL(p || q) in nats. Negative results within 1e-9 are clamped to zero;
/// anything more negative is an internal-consistency failure.
double kl_gaussian(const GaussianLaw& p, const GaussianLaw& q);

/// I(A;B|C) in nats for jointly Gaussian blocks, via the log-determinant
/// identity I = (lndet S_AC + lndet S_BC - lndet S_ABC - lndet S_C) / 2.
/// c may be empty, giving plain mutual information.
double cmi_gaussian(const GaussianLaw& joint, const IndexSet& a,
                    const IndexSet& b, const IndexSet& c);

namespace detail {

/// Cholesky with additive jitter 1e-10*trace/dim, escalated x10 up to three
/// times. Throws NumericalError after escalation; never falls back silently.
struct CholeskyResult {
  Eigen::LLT<Eigen::MatrixXd> llt;
  double log_det;
  double jitter_used;
};
CholeskyResult cholesky_with_jitter(const Eigen::MatrixXd& sigma,
                                    const std::string& what);
double log_det_psd(const Eigen::MatrixXd& sigma, const std::string& what);
Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& m);

/// Factor F with F F^T = sigma for possibly rank-deficient PSD sigma.
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& sigma);

}  // namespace detail

}  // namespace arvdm
