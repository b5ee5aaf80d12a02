#include "arvdm/world_model.hpp"

#include <cmath>
#include <set>

namespace arvdm {

void WorldModel::check() const {
  if (n_frames < 1 || frame_dim < 1)
    throw DimensionError("WorldModel: n_frames and frame_dim must be positive");
  if (!(rho > -1.0 && rho < 1.0))
    throw DimensionError("WorldModel: rho must lie in (-1, 1)");
  if (!(frame_var > 0.0))
    throw DimensionError("WorldModel: frame_var must be positive");
}

GaussianLaw prior_law(const WorldModel& model, int first_frame, int last_frame) {
  model.check();
  if (first_frame < 1 || last_frame > model.n_frames || first_frame > last_frame)
    throw DimensionError("prior_law: frame range [" + std::to_string(first_frame) +
                         ", " + std::to_string(last_frame) + "] outside [1, " +
                         std::to_string(model.n_frames) + "]");
  std::vector<FrameLevel> items;
  for (int f = first_frame; f <= last_frame; ++f) items.push_back({f, 0.0});
  return forward_joint_law(model, items);
}

GaussianLaw forward_joint_law(const WorldModel& model,
                              const std::vector<FrameLevel>& items) {
  model.check();
  std::set<std::pair<int, double>> seen;
  for (const auto& it : items) {
    if (it.level < 0.0)
      throw DimensionError("forward_joint_law: negative noise level");
    if (!seen.insert({it.frame, it.level}).second)
      throw DimensionError("forward_joint_law: duplicate (frame, level) pair (" +
                           std::to_string(it.frame) + ", " + std::to_string(it.level) + ")");
  }
  const int d = model.frame_dim;
  const int n = static_cast<int>(items.size());
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(n * d, n * d);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      const double s = items[a].level;
      const double t = items[b].level;
      double c;
      if (items[a].frame != items[b].frame) {
        c = std::exp(-(s + t) / 2.0) * model.frame_var *
            std::pow(model.rho, std::abs(items[a].frame - items[b].frame));
      } else {
        c = std::exp(-(s + t) / 2.0) * (model.frame_var - 1.0) +
            std::exp(-std::abs(t - s) / 2.0);
      }
      for (int i = 0; i < d; ++i) cov(a * d + i, b * d + i) = c;
    }
  }
  return GaussianLaw(Eigen::VectorXd::Zero(n * d), std::move(cov));
}

double second_moment(const WorldModel& model, int n_frames) {
  model.check();
  return static_cast<double>(n_frames) * model.frame_dim * model.frame_var;
}

AffineScore ConditionalAffineScore::at(const Eigen::VectorXd& ref_values) const {
  if (ref_values.size() != ref_slope.cols())
    throw DimensionError("ConditionalAffineScore::at: value dimension mismatch");
  return {slope, ref_slope * ref_values + offset};
}

LinearObservation LinearObservation::clean_frames(const WorldModel& model,
                                                  const std::vector<int>& frames) {
  const int n = static_cast<int>(frames.size()) * model.frame_dim;
  return {frames, Eigen::MatrixXd::Identity(n, n)};
}

ConditionalAffineScore exact_conditional_score(const WorldModel& model,
                                               const std::vector<FrameLevel>& items,
                                               const LinearObservation& obs) {
  const int d = model.frame_dim;
  const int ni = static_cast<int>(items.size()) * d;
  std::vector<FrameLevel> all = items;
  for (int f : obs.frames) all.push_back({f, 0.0});
  const GaussianLaw joint = forward_joint_law(model, all);
  const int nr = static_cast<int>(obs.frames.size()) * d;

  Eigen::MatrixXd sigma_ii = joint.cov().topLeftCorner(ni, ni);
  Eigen::MatrixXd cond_cov;
  Eigen::MatrixXd regression;  // maps z-values to the conditional mean
  if (obs.empty()) {
    cond_cov = sigma_ii;
    regression = Eigen::MatrixXd::Zero(ni, 0);
  } else {
    if (obs.projection.cols() != nr)
      throw DimensionError("exact_conditional_score: projection expects " +
                           std::to_string(obs.projection.cols()) +
                           " columns, observation block has " + std::to_string(nr));
    Eigen::MatrixXd sigma_ir = joint.cov().topRightCorner(ni, nr);
    Eigen::MatrixXd sigma_rr = joint.cov().bottomRightCorner(nr, nr);
    Eigen::MatrixXd sigma_iz = sigma_ir * obs.projection.transpose();
    Eigen::MatrixXd sigma_zz =
        obs.projection * sigma_rr * obs.projection.transpose();
    auto chol = detail::cholesky_with_jitter(sigma_zz, "exact_conditional_score");
    regression = chol.llt.solve(sigma_iz.transpose()).transpose();
    cond_cov = detail::symmetrized(sigma_ii - regression * sigma_iz.transpose());
  }

  auto chol_c = detail::cholesky_with_jitter(cond_cov, "exact_conditional_score");
  Eigen::MatrixXd inv = chol_c.llt.solve(Eigen::MatrixXd::Identity(ni, ni));
  ConditionalAffineScore score;
  score.slope = -detail::symmetrized(inv);
  score.ref_slope = -score.slope * regression;
  score.offset = Eigen::VectorXd::Zero(ni);
  return score;
}

AffineScore exact_score(const WorldModel& model,
                        const std::vector<FrameLevel>& items,
                        const std::vector<int>& ref_frames,
                        const Eigen::VectorXd& ref_values) {
  LinearObservation obs = ref_frames.empty()
                              ? LinearObservation::none()
                              : LinearObservation::clean_frames(model, ref_frames);
  return exact_conditional_score(model, items, obs).at(ref_values);
}

AffineScore perturbed_score(const AffineScore& base, const Eigen::VectorXd& bias) {
  if (bias.size() != base.offset.size())
    throw DimensionError("perturbed_score: bias dimension mismatch");
  return {base.slope, base.offset + bias};
}

double score_lipschitz(const WorldModel& model, const NoiseLadder& ladder,
                       const TimeGrid& grid) {
  double lip = 0.0;
  for (const Rational& t : grid.points) {
    std::vector<FrameLevel> items;
    const std::vector<Rational> levels = extended_time(ladder, t);
    for (int j = 0; j < ladder.w; ++j)
      items.push_back({j + 1, levels[j].to_double()});
    const GaussianLaw law = forward_joint_law(model, items);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(law.cov(),
                                                      Eigen::EigenvaluesOnly);
    const double min_eig = es.eigenvalues().minCoeff();
    if (min_eig <= 0.0)
      throw NumericalError("score_lipschitz: singular covariance at t=" + t.str());
    lip = std::max(lip, 1.0 / min_eig);
  }
  return lip;
}

ReferencePolicy ReferencePolicy::window(int m) {
  if (m < 0) throw DimensionError("ReferencePolicy::window: negative width");
  ReferencePolicy p;
  p.kind = Kind::window;
  p.window_frames = m;
  return p;
}

ReferencePolicy ReferencePolicy::compressed(int m, Eigen::MatrixXd projection) {
  if (m < 1) throw DimensionError("ReferencePolicy::compressed: need m >= 1");
  ReferencePolicy p;
  p.kind = Kind::compressed;
  p.window_frames = m;
  p.projection = std::move(projection);
  return p;
}

std::vector<int> reference_set(const ReferencePolicy& policy, int k, int delta) {
  if (k < 1) throw DimensionError("reference_set: need k >= 1");
  if (policy.kind == ReferencePolicy::Kind::none || policy.window_frames == 0)
    return {};
  std::vector<int> frames;
  const int hi = k * delta;
  const int lo = std::max(1, hi - policy.window_frames + 1);
  for (int f = lo; f <= hi; ++f) frames.push_back(f);
  return frames;
}

}  // namespace arvdm
