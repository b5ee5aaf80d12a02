#pragma once

#include <Eigen/Dense>
#include <vector>

#include "arvdm/gaussian.hpp"
#include "arvdm/schedule.hpp"

namespace arvdm {

/// Gauss-Markov video prior plus the variance-preserving OU forward process
/// (drift -x/2, unit diffusion). Frame blocks have covariance
/// frame_var * rho^|i-j| * I_d; noisy copies of one frame live on a single
/// OU trajectory, so multi-level copies of the same frame are Markov in the
/// level. This owner of the true score is the ground truth every sampler
/// output is compared against.
struct WorldModel {
  int n_frames = 1;
  int frame_dim = 1;
  double rho = 0.0;        // in (-1, 1)
  double frame_var = 1.0;  // sigma_0^2 > 0

  void check() const;
};

/// Frame at a diffusion-time noise level; level 0 means the clean frame.
struct FrameLevel {
  int frame;
  double level;
};

GaussianLaw prior_law(const WorldModel& model, int first_frame, int last_frame);

/// Joint Gaussian of arbitrary clean/noisy frame copies. Same-frame pairs
/// at levels s,t have per-coordinate covariance
///   e^{-(s+t)/2} (sigma0^2 - 1) + e^{-|t-s|/2},
/// distinct frames e^{-(s+t)/2} sigma0^2 rho^|i-j|.
GaussianLaw forward_joint_law(const WorldModel& model,
                              const std::vector<FrameLevel>& items);

/// E ||X_{1:n}||^2 of the prior; stands in for the boundedness constant of
/// the noise-initialization bound (the prior is Gaussian, so only a second
/// moment is available).
double second_moment(const WorldModel& model, int n_frames);

/// Affine score s(x) = slope x + offset.
struct AffineScore {
  Eigen::MatrixXd slope;
  Eigen::VectorXd offset;
};

/// Score as a function of both the noisy state and the conditioning values:
/// s(x | v) = slope x + ref_slope v + offset. Needed to propagate exact laws
/// through reference-conditioned denoising channels.
struct ConditionalAffineScore {
  Eigen::MatrixXd slope;
  Eigen::MatrixXd ref_slope;
  Eigen::VectorXd offset;

  AffineScore at(const Eigen::VectorXd& ref_values) const;
};

/// Linear functionals of clean frames the score may condition on:
/// z = projection * vec(X^0_frames). projection = identity recovers plain
/// reference frames.
struct LinearObservation {
  std::vector<int> frames;
  Eigen::MatrixXd projection;

  static LinearObservation none() { return {{}, Eigen::MatrixXd(0, 0)}; }
  static LinearObservation clean_frames(const WorldModel& model,
                                        const std::vector<int>& frames);
  bool empty() const { return frames.empty(); }
  int value_dim() const { return static_cast<int>(projection.rows()); }
};

ConditionalAffineScore exact_conditional_score(const WorldModel& model,
                                               const std::vector<FrameLevel>& items,
                                               const LinearObservation& obs);

/// Gradient of the log-density of forward_joint_law conditioned on clean
/// reference frames at the given values.
AffineScore exact_score(const WorldModel& model,
                        const std::vector<FrameLevel>& items,
                        const std::vector<int>& ref_frames,
                        const Eigen::VectorXd& ref_values);

/// Constant-bias estimate: offset shifted by delta, slope untouched, so the
/// average score error is exactly ||delta||^2.
AffineScore perturbed_score(const AffineScore& base, const Eigen::VectorXd& bias);

/// Exact Lipschitz constant of the affine score along a denoising run:
/// max over grid points t of the spectral norm of the inverse covariance at
/// extended time t-bar(t).
double score_lipschitz(const WorldModel& model, const NoiseLadder& ladder,
                       const TimeGrid& grid);

/// Which past information each AR step conditions on.
struct ReferencePolicy {
  enum class Kind { none, window, compressed };
  Kind kind = Kind::none;
  int window_frames = 0;       // m, for window and compressed kinds
  Eigen::MatrixXd projection;  // budget x (m * frame_dim), compressed kind only

  static ReferencePolicy no_references() { return {}; }
  static ReferencePolicy window(int m);
  static ReferencePolicy compressed(int m, Eigen::MatrixXd projection);
};

/// R_{k*delta+1}: the clean frames available to AR step k (1-based frames,
/// clipped to the causal past [1, k*delta]). Empty for the none policy.
std::vector<int> reference_set(const ReferencePolicy& policy, int k, int delta);

}  // namespace arvdm
