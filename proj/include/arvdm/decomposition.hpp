#pragma once

#include <vector>

#include "arvdm/sampler.hpp"

namespace arvdm {

/// Noise-initialization bound (dim + second_moment) * exp(-T), in nats.
/// dim is d*i0 for the init stage and d*delta for an AR step.
double nie_bound(int dim, double second_moment, double t_horizon);

/// Score-estimation bound span * eps_sq: span = T for the init stage,
/// t_1^I - t_1^O for an AR step.
double see_bound(double span, double eps_sq);

/// Discretization bound w * d * L^2 * sum of squared grid increments.
double de_bound(int window_frames, int frame_dim, double lipschitz,
                const TimeGrid& grid);

/// Memory bottleneck MB_k = I(Output_k; Past_k | Input_k) on the true
/// process, in nats. Window policies move their reference frames from the
/// past block into the conditioning block; compressed policies add the
/// projected clean window g(X_past) to the conditioning block instead.
double mb_term(const WorldModel& model, const NoiseLadder& ladder,
               const ReferencePolicy& policy, int k, int i0);

/// KL of the true clip X^0_{K*delta+1..(K+1)*delta} against the generated
/// marginal. The generated law must cover those clean frames.
double clip_kl(const WorldModel& model, const GeneratedLaw& generated, int clip);

struct DecompositionReport {
  /// KL(true || generated) over the clean frames 1..K*delta, nats.
  double measured_joint_kl = 0.0;
  /// KL over every coordinate the run retained. In idealized-conditional
  /// mode this equals the chain-rule sum of the mb entries exactly; the
  /// clean-frame KL above sits below it by data processing.
  double collection_kl = 0.0;
  std::vector<double> per_clip_kl;  // clips 0..K-1
  double nie_init = 0.0, nie_ar = 0.0;
  double see_init = 0.0, see_ar = 0.0;
  double de_init = 0.0, de_ar = 0.0;
  double lipschitz_init = 0.0, lipschitz_ar = 0.0;
  std::vector<double> mb;  // per AR step; first step has an empty history
  RunConfig config;

  double bound_total() const;
  double mb_total() const;
};

DecompositionReport decomposition_report(const RunConfig& config);

}  // namespace arvdm
