#include "arvdm/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace arvdm {

namespace {

constexpr double kPsdTolerance = 1e-10;
constexpr double kClampTolerance = 1e-9;

std::string dim_text(int a, int b) {
  std::ostringstream os;
  os << a << " vs " << b;
  return os.str();
}

}  // namespace

IndexSet::IndexSet(std::vector<int> indices) : indices_(std::move(indices)) {
  for (std::size_t i = 0; i < indices_.size(); ++i) {
    if (indices_[i] < 0)
      throw DimensionError("IndexSet: negative index " + std::to_string(indices_[i]));
    if (i > 0 && indices_[i] <= indices_[i - 1])
      throw DimensionError("IndexSet: indices must be strictly increasing");
  }
}

IndexSet IndexSet::range(int first, int last) {
  std::vector<int> v;
  for (int i = first; i < last; ++i) v.push_back(i);
  return IndexSet(std::move(v));
}

bool IndexSet::contains(int i) const {
  return std::binary_search(indices_.begin(), indices_.end(), i);
}

void IndexSet::check_within(int dim, const std::string& what) const {
  for (int i : indices_) {
    if (i >= dim)
      throw DimensionError(what + ": index " + std::to_string(i) +
                           " out of range for dimension " + std::to_string(dim));
  }
}

IndexSet IndexSet::complement(int dim) const {
  std::vector<int> v;
  for (int i = 0; i < dim; ++i)
    if (!contains(i)) v.push_back(i);
  return IndexSet(std::move(v));
}

bool IndexSet::disjoint_from(const IndexSet& other) const {
  for (int i : other.indices_)
    if (contains(i)) return false;
  return true;
}

IndexSet IndexSet::unioned(const IndexSet& other) const {
  std::vector<int> v(indices_);
  v.insert(v.end(), other.indices_.begin(), other.indices_.end());
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return IndexSet(std::move(v));
}

namespace detail {

Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& m) {
  return 0.5 * (m + m.transpose());
}

CholeskyResult cholesky_with_jitter(const Eigen::MatrixXd& sigma,
                                    const std::string& what) {
  const int n = static_cast<int>(sigma.rows());
  if (n == 0) return {Eigen::LLT<Eigen::MatrixXd>(), 0.0, 0.0};
  const double base = kPsdTolerance * sigma.trace() / n;
  double jitter = 0.0;
  for (int attempt = 0; attempt < 5; ++attempt) {
    Eigen::MatrixXd s = sigma;
    if (jitter > 0.0) s.diagonal().array() += jitter;
    Eigen::LLT<Eigen::MatrixXd> llt(s);
    if (llt.info() == Eigen::Success) {
      double log_det = 0.0;
      for (int i = 0; i < n; ++i) log_det += 2.0 * std::log(llt.matrixL()(i, i));
      if (std::isfinite(log_det)) return {llt, log_det, jitter};
    }
    jitter = (attempt == 0) ? base : jitter * 10.0;
    if (jitter <= 0.0) break;  // zero trace: nothing to escalate
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma,
                                                    Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  std::ostringstream os;
  os << what << ": matrix singular beyond jitter (condition number ~ "
     << (lo > 0 ? hi / lo : std::numeric_limits<double>::infinity())
     << ", eigenvalue range [" << lo << ", " << hi << "])";
  throw NumericalError(os.str());
}

double log_det_psd(const Eigen::MatrixXd& sigma, const std::string& what) {
  return cholesky_with_jitter(sigma, what).log_det;
}

Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& sigma) {
  if (sigma.rows() == 0) return sigma;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetrized(sigma));
  Eigen::VectorXd vals = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * vals.asDiagonal();
}

}  // namespace detail

namespace {

void check_psd(const Eigen::MatrixXd& cov, const std::string& what) {
  if (cov.rows() == 0) return;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = std::max(es.eigenvalues().maxCoeff(), 0.0);
  if (lo < -kPsdTolerance * std::max(hi, 1e-300))
    throw DimensionError(what + ": covariance not positive semidefinite (min eigenvalue " +
                         std::to_string(lo) + ")");
}

}  // namespace

GaussianLaw::GaussianLaw(Eigen::VectorXd mean, Eigen::MatrixXd cov)
    : mean_(std::move(mean)) {
  if (cov.rows() != cov.cols() || cov.rows() != mean_.size())
    throw DimensionError("GaussianLaw: mean/cov shape mismatch " +
                         dim_text(static_cast<int>(mean_.size()),
                                  static_cast<int>(cov.rows())));
  cov_ = detail::symmetrized(cov);
  check_psd(cov_, "GaussianLaw");
}

GaussianLaw GaussianLaw::standard(int dim) {
  return GaussianLaw(Eigen::VectorXd::Zero(dim),
                     Eigen::MatrixXd::Identity(dim, dim));
}

double GaussianLaw::log_density(const Eigen::VectorXd& x) const {
  if (x.size() != mean_.size())
    throw DimensionError("log_density: point dimension mismatch");
  auto chol = detail::cholesky_with_jitter(cov_, "log_density");
  Eigen::VectorXd d = x - mean_;
  const double quad = d.dot(chol.llt.solve(d));
  const double n = static_cast<double>(dim());
  return -0.5 * (n * std::log(2.0 * M_PI) + chol.log_det + quad);
}

AffineChannel::AffineChannel(Eigen::MatrixXd A_in, Eigen::VectorXd b_in,
                             Eigen::MatrixXd Q_in)
    : A(std::move(A_in)), b(std::move(b_in)) {
  if (A.rows() != b.size() || Q_in.rows() != Q_in.cols() || Q_in.rows() != A.rows())
    throw DimensionError("AffineChannel: inconsistent shapes");
  Q = detail::symmetrized(Q_in);
  check_psd(Q, "AffineChannel");
}

AffineChannel AffineChannel::identity(int dim) {
  return AffineChannel(Eigen::MatrixXd::Identity(dim, dim),
                       Eigen::VectorXd::Zero(dim),
                       Eigen::MatrixXd::Zero(dim, dim));
}

AffineChannel AffineChannel::deterministic(Eigen::MatrixXd A_in,
                                           Eigen::VectorXd b_in) {
  const int out = static_cast<int>(A_in.rows());
  return AffineChannel(std::move(A_in), std::move(b_in),
                       Eigen::MatrixXd::Zero(out, out));
}

AffineChannel AffineChannel::then(const AffineChannel& next) const {
  if (next.in_dim() != out_dim())
    throw DimensionError("AffineChannel::then: dimension mismatch " +
                         dim_text(next.in_dim(), out_dim()));
  return AffineChannel(next.A * A, next.A * b + next.b,
                       next.A * Q * next.A.transpose() + next.Q);
}

GaussianLaw push_forward(const GaussianLaw& law, const AffineChannel& ch) {
  if (ch.in_dim() != law.dim())
    throw DimensionError("push_forward: channel expects dimension " +
                         std::to_string(ch.in_dim()) + ", law has " +
                         std::to_string(law.dim()));
  return GaussianLaw(ch.A * law.mean() + ch.b,
                     ch.A * law.cov() * ch.A.transpose() + ch.Q);
}

GaussianLaw marginal(const GaussianLaw& law, const IndexSet& idx) {
  idx.check_within(law.dim(), "marginal");
  const int m = idx.size();
  Eigen::VectorXd mu(m);
  Eigen::MatrixXd sig(m, m);
  for (int i = 0; i < m; ++i) {
    mu(i) = law.mean()(idx.indices()[i]);
    for (int j = 0; j < m; ++j)
      sig(i, j) = law.cov()(idx.indices()[i], idx.indices()[j]);
  }
  return GaussianLaw(std::move(mu), std::move(sig));
}

GaussianLaw condition(const GaussianLaw& law, const IndexSet& obs,
                      const Eigen::VectorXd& value) {
  obs.check_within(law.dim(), "condition");
  if (value.size() != obs.size())
    throw DimensionError("condition: value length " + std::to_string(value.size()) +
                         " does not match observed set size " +
                         std::to_string(obs.size()));
  const IndexSet rest = obs.complement(law.dim());
  const int nr = rest.size();
  const int no = obs.size();
  if (no == 0) return law;

  Eigen::MatrixXd s_oo(no, no), s_ro(nr, no);
  Eigen::VectorXd mu_o(no), mu_r(nr);
  for (int i = 0; i < no; ++i) {
    mu_o(i) = law.mean()(obs.indices()[i]);
    for (int j = 0; j < no; ++j)
      s_oo(i, j) = law.cov()(obs.indices()[i], obs.indices()[j]);
  }
  for (int i = 0; i < nr; ++i) {
    mu_r(i) = law.mean()(rest.indices()[i]);
    for (int j = 0; j < no; ++j)
      s_ro(i, j) = law.cov()(rest.indices()[i], obs.indices()[j]);
  }
  const GaussianLaw rest_law = marginal(law, rest);

  auto chol = detail::cholesky_with_jitter(s_oo, "condition");
  Eigen::MatrixXd gain = chol.llt.solve(s_ro.transpose()).transpose();
  Eigen::VectorXd mu = mu_r + gain * (value - mu_o);
  Eigen::MatrixXd sig = rest_law.cov() - gain * s_ro.transpose();
  return GaussianLaw(std::move(mu), std::move(sig));
}

double kl_gaussian(const GaussianLaw& p, const GaussianLaw& q) {
  if (p.dim() != q.dim())
    throw DimensionError("kl_gaussian: dimension mismatch " +
                         dim_text(p.dim(), q.dim()));
  const int n = p.dim();
  if (n == 0) return 0.0;
  auto chol_q = detail::cholesky_with_jitter(q.cov(), "kl_gaussian(q)");
  const double log_det_p = detail::log_det_psd(p.cov(), "kl_gaussian(p)");
  const double trace = chol_q.llt.solve(p.cov()).trace();
  Eigen::VectorXd dm = q.mean() - p.mean();
  const double quad = dm.dot(chol_q.llt.solve(dm));
  double kl = 0.5 * (trace + quad - n + chol_q.log_det - log_det_p);
  if (kl < 0.0) {
    if (kl < -kClampTolerance)
      throw NumericalError("kl_gaussian: negative divergence " + std::to_string(kl));
    kl = 0.0;
  }
  return kl;
}

namespace {

/// Basis of the effective (non-deterministic) subspace of a PSD matrix:
/// eigenvectors whose eigenvalue exceeds a relative cutoff. Conditioning on
/// deterministic linear functionals is legitimate (compressed reference
/// policies do it), so degenerate blocks must reduce, not throw.
Eigen::MatrixXd effective_basis(const Eigen::MatrixXd& sigma) {
  if (sigma.rows() == 0) return Eigen::MatrixXd(0, 0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma);
  const double cutoff = 1e-12 * std::max(es.eigenvalues().maxCoeff(), 0.0);
  std::vector<int> keep;
  for (int i = 0; i < sigma.rows(); ++i)
    if (es.eigenvalues()(i) > cutoff) keep.push_back(i);
  Eigen::MatrixXd basis(sigma.rows(), keep.size());
  for (std::size_t i = 0; i < keep.size(); ++i)
    basis.col(i) = es.eigenvectors().col(keep[i]);
  return basis;
}

}  // namespace

double cmi_gaussian(const GaussianLaw& joint, const IndexSet& a,
                    const IndexSet& b, const IndexSet& c) {
  a.check_within(joint.dim(), "cmi_gaussian(a)");
  b.check_within(joint.dim(), "cmi_gaussian(b)");
  c.check_within(joint.dim(), "cmi_gaussian(c)");
  if (!a.disjoint_from(b) || !a.disjoint_from(c) || !b.disjoint_from(c))
    throw DimensionError("cmi_gaussian: index sets must be pairwise disjoint");
  if (a.empty() || b.empty()) return 0.0;

  const int na = a.size(), nb = b.size(), nc = c.size();
  auto pick = [&joint](const IndexSet& rows, const IndexSet& cols) {
    Eigen::MatrixXd m(rows.size(), cols.size());
    for (int i = 0; i < rows.size(); ++i)
      for (int j = 0; j < cols.size(); ++j)
        m(i, j) = joint.cov()(rows.indices()[i], cols.indices()[j]);
    return m;
  };

  // Conditional covariance of (A, B) given C, with C first reduced to its
  // effective subspace so deterministic conditioning coordinates are exact.
  Eigen::MatrixXd cond(na + nb, na + nb);
  cond.topLeftCorner(na, na) = pick(a, a);
  cond.topRightCorner(na, nb) = pick(a, b);
  cond.bottomLeftCorner(nb, na) = pick(b, a);
  cond.bottomRightCorner(nb, nb) = pick(b, b);
  if (nc > 0) {
    Eigen::MatrixXd sigma_cc = pick(c, c);
    Eigen::MatrixXd basis = effective_basis(sigma_cc);
    if (basis.cols() > 0) {
      Eigen::MatrixXd cross(na + nb, basis.cols());
      cross.topRows(na) = pick(a, c) * basis;
      cross.bottomRows(nb) = pick(b, c) * basis;
      Eigen::MatrixXd w = basis.transpose() * sigma_cc * basis;
      auto chol = detail::cholesky_with_jitter(w, "cmi_gaussian(C)");
      cond -= cross * chol.llt.solve(cross.transpose());
      cond = detail::symmetrized(cond);
    }
  }

  // Drop conditionally deterministic directions of A and of B; they are
  // functions of C and carry no conditional information.
  Eigen::MatrixXd basis_a = effective_basis(cond.topLeftCorner(na, na));
  Eigen::MatrixXd basis_b = effective_basis(cond.bottomRightCorner(nb, nb));
  if (basis_a.cols() == 0 || basis_b.cols() == 0) return 0.0;
  const int ra = static_cast<int>(basis_a.cols());
  const int rb = static_cast<int>(basis_b.cols());
  Eigen::MatrixXd reduced(ra + rb, ra + rb);
  reduced.topLeftCorner(ra, ra) =
      basis_a.transpose() * cond.topLeftCorner(na, na) * basis_a;
  reduced.topRightCorner(ra, rb) =
      basis_a.transpose() * cond.topRightCorner(na, nb) * basis_b;
  reduced.bottomLeftCorner(rb, ra) = reduced.topRightCorner(ra, rb).transpose();
  reduced.bottomRightCorner(rb, rb) =
      basis_b.transpose() * cond.bottomRightCorner(nb, nb) * basis_b;
  reduced = detail::symmetrized(reduced);

  const double ld_a =
      detail::log_det_psd(reduced.topLeftCorner(ra, ra), "cmi_gaussian(A|C)");
  const double ld_b = detail::log_det_psd(reduced.bottomRightCorner(rb, rb),
                                          "cmi_gaussian(B|C)");
  const double ld_ab = detail::log_det_psd(reduced, "cmi_gaussian(AB|C)");
  double value = 0.5 * (ld_a + ld_b - ld_ab);
  if (value < 0.0) {
    if (value < -kClampTolerance)
      throw NumericalError("cmi_gaussian: negative information " +
                           std::to_string(value));
    value = 0.0;
  }
  return value;
}

}  // namespace arvdm
