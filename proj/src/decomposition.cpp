#include "arvdm/decomposition.hpp"

#include <cmath>

namespace arvdm {

namespace {

/// Indices of `keys` inside the concatenated coordinate list, in scalar units.
IndexSet scalar_block(int offset_coords, int n_coords, int d) {
  std::vector<int> idx;
  for (int i = 0; i < n_coords * d; ++i) idx.push_back(offset_coords * d + i);
  return IndexSet(std::move(idx));
}

}  // namespace

double nie_bound(int dim, double second_moment, double t_horizon) {
  if (t_horizon < 0.0)
    throw DimensionError("nie_bound: horizon must be nonnegative");
  return (static_cast<double>(dim) + second_moment) * std::exp(-t_horizon);
}

double see_bound(double span, double eps_sq) { return span * eps_sq; }

double de_bound(int window_frames, int frame_dim, double lipschitz,
                const TimeGrid& grid) {
  return static_cast<double>(window_frames) * frame_dim * lipschitz * lipschitz *
         grid.sum_squared_increments();
}

double mb_term(const WorldModel& model, const NoiseLadder& ladder,
               const ReferencePolicy& policy, int k, int i0) {
  const int d = model.frame_dim;
  const bool compressed = policy.kind == ReferencePolicy::Kind::compressed;
  const std::vector<int> ref_frames =
      (policy.kind == ReferencePolicy::Kind::window)
          ? reference_set(policy, k, ladder.delta)
          : std::vector<int>{};
  const StepIndexSets sets = step_index_sets(ladder, k, i0, ref_frames);

  std::vector<CoordKey> all = sets.output;
  all.insert(all.end(), sets.input.begin(), sets.input.end());
  all.insert(all.end(), sets.past.begin(), sets.past.end());
  std::vector<FrameLevel> items;
  for (const auto& c : all) items.push_back({c.frame, c.level.to_double()});
  GaussianLaw law = forward_joint_law(model, items);

  const int n_out = static_cast<int>(sets.output.size());
  const int n_in = static_cast<int>(sets.input.size());
  const int n_past = static_cast<int>(sets.past.size());
  IndexSet a = scalar_block(0, n_out, d);
  IndexSet cond = scalar_block(n_out, n_in, d);
  IndexSet b = scalar_block(n_out + n_in, n_past, d);

  if (compressed) {
    // Append g(X_past) = projection * (clean window frames) as extra
    // conditioning coordinates; the projected frames themselves stay in
    // the past block.
    const std::vector<int> window = reference_set(
        ReferencePolicy::window(policy.window_frames), k, ladder.delta);
    if (!window.empty()) {
      const int nw = static_cast<int>(window.size()) * d;
      if (policy.projection.cols() != policy.window_frames * d)
        throw DimensionError("mb_term: compressed projection expects " +
                             std::to_string(policy.window_frames * d) + " columns");
      Eigen::MatrixXd clipped = policy.projection.rightCols(nw);
      const int n = law.dim();
      Eigen::MatrixXd selector = Eigen::MatrixXd::Zero(nw, n);
      for (std::size_t r = 0; r < window.size(); ++r) {
        int pos = -1;
        for (std::size_t i = 0; i < all.size(); ++i)
          if (all[i] == CoordKey{window[r], Rational(0)}) pos = static_cast<int>(i);
        if (pos < 0)
          throw DimensionError("mb_term: projected frame " + std::to_string(window[r]) +
                               " not in the past block");
        for (int i = 0; i < d; ++i) selector(r * d + i, pos * d + i) = 1.0;
      }
      const int g_rows = static_cast<int>(clipped.rows());
      Eigen::MatrixXd a_mat(n + g_rows, n);
      a_mat.topRows(n).setIdentity();
      a_mat.bottomRows(g_rows) = clipped * selector;
      law = push_forward(law, AffineChannel::deterministic(
                                  a_mat, Eigen::VectorXd::Zero(n + g_rows)));
      std::vector<int> extra = cond.indices();
      for (int i = 0; i < g_rows; ++i) extra.push_back(n + i);
      cond = IndexSet(std::move(extra));
    }
  }

  return cmi_gaussian(law, a, b, cond);
}

double clip_kl(const WorldModel& model, const GeneratedLaw& generated, int clip) {
  const int delta = generated.delta();
  const int first = clip * delta + 1;
  const int last = (clip + 1) * delta;
  const GaussianLaw truth = prior_law(model, first, last);
  return kl_gaussian(truth, generated.clean_marginal(first, last));
}

double DecompositionReport::bound_total() const {
  const int k_steps = static_cast<int>(mb.size());
  double total = nie_init + see_init + de_init;
  total += k_steps * (nie_ar + see_ar + de_ar);
  total += mb_total();
  return total;
}

double DecompositionReport::mb_total() const {
  double s = 0.0;
  for (double v : mb) s += v;
  return s;
}

DecompositionReport decomposition_report(const RunConfig& config) {
  config.check();
  DecompositionReport report;
  report.config = config;

  const WorldModel& model = config.model;
  const NoiseLadder& ladder = config.ladder;
  const int d = model.frame_dim;
  const int k_steps = config.ar_steps;
  const double horizon = ladder.horizon.to_double();
  const double eps_sq = config.oracle.eps_sq();

  const GeneratedLaw generated = generate_law(config);
  const int n_clean = k_steps * ladder.delta;
  report.measured_joint_kl = kl_gaussian(prior_law(model, 1, n_clean),
                                         generated.clean_marginal(1, n_clean));
  {
    std::vector<FrameLevel> items;
    for (const auto& c : generated.coords())
      items.push_back({c.frame, c.level.to_double()});
    report.collection_kl =
        kl_gaussian(forward_joint_law(model, items), generated.joint());
  }
  for (int clip = 0; clip < k_steps; ++clip)
    report.per_clip_kl.push_back(clip_kl(model, generated, clip));

  report.nie_ar = nie_bound(d * ladder.delta, second_moment(model, ladder.delta),
                            horizon);
  report.see_ar = see_bound(
      (ladder.input_levels[0] - ladder.output_levels[0]).to_double(), eps_sq);
  report.lipschitz_ar = score_lipschitz(model, ladder, config.ar_grid);
  report.de_ar = de_bound(ladder.w, d, report.lipschitz_ar, config.ar_grid);

  const int i0 = config.init_frames;
  if (i0 > 0) {
    report.nie_init = nie_bound(d * i0, second_moment(model, i0), horizon);
    report.see_init = see_bound(horizon, eps_sq);
    if (config.mode == SamplerMode::euler_maruyama) {
      // The init stage denoises i0 frames at one shared level; an
      // outpainting ladder over i0 frames gives exactly that extended time.
      const NoiseLadder init_ladder = outpaint_ladder(i0, ladder.horizon);
      report.lipschitz_init = score_lipschitz(model, init_ladder, config.init_grid);
      report.de_init = de_bound(i0, d, report.lipschitz_init, config.init_grid);
    }
  }

  report.mb.assign(k_steps, 0.0);
  for (int k = 2; k <= k_steps; ++k)
    report.mb[k - 1] = mb_term(model, ladder, config.policy, k - 1, i0);
  return report;
}

}  // namespace arvdm
