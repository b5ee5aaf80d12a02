#include "arvdm/sampler.hpp"

#include <algorithm>
#include <cmath>

#include "arvdm/rng.hpp"

namespace arvdm {

namespace {

/// state' = map * state + shift + noise * xi, xi ~ N(0, I).
/// Appends, in-place window updates, and coordinate drops are all of this
/// shape, which is what lets one op list drive both the law propagation and
/// the Monte Carlo path executor.
struct StateOp {
  Eigen::MatrixXd map;
  Eigen::VectorXd shift;
  Eigen::MatrixXd noise;
  std::vector<CoordKey> coords_after;
};

GaussianLaw empty_law() {
  return GaussianLaw(Eigen::VectorXd(0), Eigen::MatrixXd(0, 0));
}

GaussianLaw fold(const GaussianLaw& law, const StateOp& op) {
  return push_forward(law, AffineChannel(op.map, op.shift,
                                         op.noise * op.noise.transpose()));
}

int find_coord(const std::vector<CoordKey>& coords, const CoordKey& key) {
  for (std::size_t i = 0; i < coords.size(); ++i)
    if (coords[i] == key) return static_cast<int>(i);
  return -1;
}

int require_coord(const std::vector<CoordKey>& coords, const CoordKey& key,
                  const char* what) {
  const int i = find_coord(coords, key);
  if (i < 0)
    throw DimensionError(std::string(what) + ": missing input coordinate (frame " +
                         std::to_string(key.frame) + ", level " + key.level.str() + ")");
  return i;
}

std::vector<FrameLevel> to_items(const std::vector<CoordKey>& coords) {
  std::vector<FrameLevel> items;
  items.reserve(coords.size());
  for (const auto& c : coords) items.push_back({c.frame, c.level.to_double()});
  return items;
}

Eigen::VectorXd bias_vector(const OracleSpec& oracle, int dim) {
  if (oracle.kind != OracleKind::biased || dim == 0)
    return Eigen::VectorXd::Zero(dim);
  return Eigen::VectorXd::Constant(
      dim, oracle.bias_magnitude / std::sqrt(static_cast<double>(dim)));
}

/// Appends new coordinates drawn from the true conditional law of the world
/// model given z = z_of_state * state. z_of_state with zero rows appends the
/// unconditional true marginal.
StateOp append_true_conditional_op(const WorldModel& model,
                                   const std::vector<CoordKey>& live,
                                   const std::vector<CoordKey>& new_keys,
                                   const Eigen::MatrixXd& z_of_state) {
  const int d = model.frame_dim;
  const int nl = static_cast<int>(live.size()) * d;
  const int nn = static_cast<int>(new_keys.size()) * d;
  std::vector<CoordKey> all = live;
  all.insert(all.end(), new_keys.begin(), new_keys.end());
  const GaussianLaw truth = forward_joint_law(model, to_items(all));

  Eigen::MatrixXd sigma_nn = truth.cov().bottomRightCorner(nn, nn);
  Eigen::MatrixXd reg;  // maps live state to the conditional mean
  Eigen::MatrixXd cond_cov;
  if (z_of_state.rows() == 0) {
    reg = Eigen::MatrixXd::Zero(nn, nl);
    cond_cov = sigma_nn;
  } else {
    Eigen::MatrixXd sigma_nl = truth.cov().bottomLeftCorner(nn, nl);
    Eigen::MatrixXd sigma_ll = truth.cov().topLeftCorner(nl, nl);
    Eigen::MatrixXd sigma_nz = sigma_nl * z_of_state.transpose();
    Eigen::MatrixXd sigma_zz = z_of_state * sigma_ll * z_of_state.transpose();
    auto chol = detail::cholesky_with_jitter(sigma_zz, "sampler conditional draw");
    Eigen::MatrixXd gain = chol.llt.solve(sigma_nz.transpose()).transpose();
    cond_cov = detail::symmetrized(sigma_nn - gain * sigma_nz.transpose());
    reg = gain * z_of_state;
  }

  StateOp op;
  op.map = Eigen::MatrixXd::Zero(nl + nn, nl);
  op.map.topLeftCorner(nl, nl).setIdentity();
  op.map.bottomRows(nn) = reg;
  op.shift = Eigen::VectorXd::Zero(nl + nn);
  Eigen::MatrixXd factor = detail::psd_sqrt(cond_cov);
  op.noise = Eigen::MatrixXd::Zero(nl + nn, factor.cols());
  op.noise.bottomRows(nn) = factor;
  op.coords_after = std::move(all);
  return op;
}

StateOp append_independent_op(const std::vector<CoordKey>& live,
                              const std::vector<CoordKey>& new_keys,
                              const Eigen::MatrixXd& cov_factor, int d) {
  const int nl = static_cast<int>(live.size()) * d;
  const int nn = static_cast<int>(new_keys.size()) * d;
  StateOp op;
  op.map = Eigen::MatrixXd::Zero(nl + nn, nl);
  op.map.topLeftCorner(nl, nl).setIdentity();
  op.shift = Eigen::VectorXd::Zero(nl + nn);
  op.noise = Eigen::MatrixXd::Zero(nl + nn, cov_factor.cols());
  op.noise.bottomRows(nn) = cov_factor;
  op.coords_after = live;
  op.coords_after.insert(op.coords_after.end(), new_keys.begin(), new_keys.end());
  return op;
}

StateOp drop_op(const std::vector<CoordKey>& live,
                const std::vector<CoordKey>& remove, int d) {
  std::vector<int> keep;
  std::vector<CoordKey> coords_after;
  for (std::size_t i = 0; i < live.size(); ++i) {
    if (find_coord(remove, live[i]) < 0) {
      keep.push_back(static_cast<int>(i));
      coords_after.push_back(live[i]);
    }
  }
  const int nl = static_cast<int>(live.size()) * d;
  const int nk = static_cast<int>(keep.size()) * d;
  StateOp op;
  op.map = Eigen::MatrixXd::Zero(nk, nl);
  for (std::size_t r = 0; r < keep.size(); ++r)
    for (int i = 0; i < d; ++i) op.map(r * d + i, keep[r] * d + i) = 1.0;
  op.shift = Eigen::VectorXd::Zero(nk);
  op.noise = Eigen::MatrixXd::Zero(nk, 0);
  op.coords_after = std::move(coords_after);
  return op;
}

/// Reference conditioning of one AR step: which clean frames the score sees
/// and how their values map out of the live state.
struct RefSetup {
  std::vector<int> frames;
  LinearObservation obs = LinearObservation::none();
  Eigen::MatrixXd z_of_state;  // (z_dim x n_scalar)
};

RefSetup make_ref_setup(const RunConfig& config, int k,
                        const std::vector<CoordKey>& coords) {
  RefSetup setup;
  const int d = config.model.frame_dim;
  const int n = static_cast<int>(coords.size()) * d;
  setup.z_of_state = Eigen::MatrixXd::Zero(0, n);
  if (k < 2) return setup;  // R_1 is empty by causality
  setup.frames = reference_set(config.policy, k - 1, config.ladder.delta);
  if (setup.frames.empty()) return setup;

  const int nr = static_cast<int>(setup.frames.size()) * d;
  Eigen::MatrixXd selector = Eigen::MatrixXd::Zero(nr, n);
  for (std::size_t r = 0; r < setup.frames.size(); ++r) {
    const int pos = require_coord(coords, {setup.frames[r], Rational(0)},
                                  "reference conditioning");
    for (int i = 0; i < d; ++i) selector(r * d + i, pos * d + i) = 1.0;
  }

  if (config.policy.kind == ReferencePolicy::Kind::compressed) {
    // The projection's columns span the policy window oldest-to-newest;
    // when the causal past is shorter, only the newest columns apply.
    const Eigen::MatrixXd& p = config.policy.projection;
    if (p.cols() != config.policy.window_frames * d)
      throw DimensionError("compressed policy: projection expects " +
                           std::to_string(config.policy.window_frames * d) +
                           " columns");
    Eigen::MatrixXd clipped = p.rightCols(nr);
    setup.obs = {setup.frames, clipped};
    setup.z_of_state = clipped * selector;
  } else {
    setup.obs = LinearObservation::clean_frames(config.model, setup.frames);
    setup.z_of_state = selector;
  }
  return setup;
}

StateOp em_state_op(const RunConfig& config, const std::vector<CoordKey>& coords,
                    const std::vector<int>& window_pos,
                    const std::vector<CoordKey>& window_keys_after,
                    const ConditionalAffineScore& score,
                    const Eigen::MatrixXd& z_of_state, double h) {
  const int d = config.model.frame_dim;
  const int n = static_cast<int>(coords.size()) * d;
  const int wd = static_cast<int>(window_pos.size()) * d;
  const Eigen::VectorXd bias = bias_vector(config.oracle, wd);

  Eigen::MatrixXd win_sel = Eigen::MatrixXd::Zero(wd, n);
  for (std::size_t j = 0; j < window_pos.size(); ++j)
    for (int i = 0; i < d; ++i) win_sel(j * d + i, window_pos[j] * d + i) = 1.0;

  // window' = (1 + h/2) window + h (slope window + ref_slope z + offset + bias)
  Eigen::MatrixXd win_map = (1.0 + h / 2.0) * Eigen::MatrixXd::Identity(wd, wd) +
                            h * score.slope;
  StateOp op;
  op.map = Eigen::MatrixXd::Identity(n, n);
  op.map += win_sel.transpose() * ((win_map - Eigen::MatrixXd::Identity(wd, wd)) * win_sel);
  if (z_of_state.rows() > 0)
    op.map += win_sel.transpose() * (h * score.ref_slope * z_of_state);
  op.shift = win_sel.transpose() * (h * (score.offset + bias));
  op.noise = win_sel.transpose() * std::sqrt(h);
  op.coords_after = coords;
  for (std::size_t j = 0; j < window_pos.size(); ++j)
    op.coords_after[window_pos[j]] = window_keys_after[j];
  return op;
}

std::vector<StateOp> build_init_ops(const RunConfig& config) {
  std::vector<StateOp> ops;
  const int i0 = config.init_frames;
  if (i0 == 0) return ops;
  const WorldModel& model = config.model;
  const int d = model.frame_dim;
  std::vector<CoordKey> coords;

  if (config.mode == SamplerMode::euler_maruyama) {
    std::vector<CoordKey> start;
    for (int m = 1; m <= i0; ++m) start.push_back({m, config.ladder.horizon});
    ops.push_back(append_independent_op(
        {}, start, Eigen::MatrixXd::Identity(i0 * d, i0 * d), d));
    coords = start;

    const auto& grid = config.init_grid.points;
    const int steps = config.init_grid.steps();
    std::vector<int> window_pos(i0);
    for (int m = 0; m < i0; ++m) window_pos[m] = m;
    for (int s = steps; s >= 1; --s) {
      const double level = grid[s].to_double();
      const double h = (grid[s] - grid[s - 1]).to_double();
      std::vector<FrameLevel> items;
      for (int m = 1; m <= i0; ++m) items.push_back({m, level});
      const ConditionalAffineScore score =
          exact_conditional_score(model, items, LinearObservation::none());
      std::vector<CoordKey> after;
      for (int m = 1; m <= i0; ++m) after.push_back({m, grid[s - 1]});
      ops.push_back(em_state_op(config, coords, window_pos, after, score,
                                Eigen::MatrixXd::Zero(0, i0 * d), h));
      coords = ops.back().coords_after;
    }
  } else {
    std::vector<CoordKey> clean;
    for (int m = 1; m <= i0; ++m) clean.push_back({m, Rational(0)});
    ops.push_back(append_true_conditional_op(model, {}, clean,
                                             Eigen::MatrixXd::Zero(0, 0)));
    coords = clean;
  }

  // Re-noise frames 1..w-delta to their input levels via the forward OU
  // channel; the clean copies stay in place.
  const int carried = config.ladder.w - config.ladder.delta;
  if (carried > 0) {
    const int n = static_cast<int>(coords.size()) * d;
    const int nn = carried * d;
    StateOp op;
    op.map = Eigen::MatrixXd::Zero(n + nn, n);
    op.map.topLeftCorner(n, n).setIdentity();
    op.noise = Eigen::MatrixXd::Zero(n + nn, nn);
    op.shift = Eigen::VectorXd::Zero(n + nn);
    op.coords_after = coords;
    for (int m = 1; m <= carried; ++m) {
      const Rational level = config.ladder.input_levels[m - 1];
      const double t = level.to_double();
      const int src = require_coord(coords, {m, Rational(0)}, "init re-noise");
      for (int i = 0; i < d; ++i) {
        op.map(n + (m - 1) * d + i, src * d + i) = std::exp(-t / 2.0);
        op.noise(n + (m - 1) * d + i, (m - 1) * d + i) =
            std::sqrt(1.0 - std::exp(-t));
      }
      op.coords_after.push_back({m, level});
    }
    ops.push_back(std::move(op));
  }
  return ops;
}

std::vector<StateOp> build_ar_ops(const RunConfig& config, int k,
                                  std::vector<CoordKey> coords) {
  if (k < 1) throw DimensionError("ar_step: step index must be >= 1");
  std::vector<StateOp> ops;
  const WorldModel& model = config.model;
  const NoiseLadder& ladder = config.ladder;
  const int d = model.frame_dim;
  const int w = ladder.w;
  const int delta = ladder.delta;
  const int base = (k - 1) * delta;

  const RefSetup refs = make_ref_setup(config, k, coords);

  // Fresh level-T coordinates for the stride's new frames.
  std::vector<CoordKey> fresh;
  for (int j = w - delta + 1; j <= w; ++j)
    fresh.push_back({base + j, ladder.horizon});
  if (config.mode == SamplerMode::euler_maruyama) {
    ops.push_back(append_independent_op(
        coords, fresh, Eigen::MatrixXd::Identity(delta * d, delta * d), d));
  } else {
    const int n = static_cast<int>(coords.size()) * d;
    ops.push_back(append_true_conditional_op(
        model, coords, fresh, Eigen::MatrixXd::Identity(n, n)));
  }
  coords = ops.back().coords_after;

  std::vector<CoordKey> window_in;
  for (int j = 1; j <= w; ++j)
    window_in.push_back({base + j, ladder.input_levels[j - 1]});

  if (config.mode == SamplerMode::euler_maruyama) {
    std::vector<int> window_pos;
    for (const auto& key : window_in)
      window_pos.push_back(require_coord(coords, key, "ar_step"));
    // Ref positions were computed against the pre-fresh state; rebuild the
    // z map against the current one.
    const RefSetup refs_now = make_ref_setup(config, k, coords);

    const auto& grid = config.ar_grid.points;
    for (int s = config.ar_grid.steps(); s >= 1; --s) {
      const std::vector<Rational> hi = extended_time(ladder, grid[s]);
      const std::vector<Rational> lo = extended_time(ladder, grid[s - 1]);
      const double h = (grid[s] - grid[s - 1]).to_double();
      std::vector<FrameLevel> items;
      for (int j = 1; j <= w; ++j)
        items.push_back({base + j, hi[j - 1].to_double()});
      const ConditionalAffineScore score =
          exact_conditional_score(model, items, refs_now.obs);
      std::vector<CoordKey> after;
      for (int j = 1; j <= w; ++j) after.push_back({base + j, lo[j - 1]});
      ops.push_back(em_state_op(config, coords, window_pos, after, score,
                                refs_now.z_of_state, h));
      coords = ops.back().coords_after;
    }
  } else {
    // Exact conditional channel P(Output_k | Input_k): conditions on the
    // window inputs plus the policy's reference values, nothing else.
    const int n = static_cast<int>(coords.size()) * d;
    Eigen::MatrixXd in_sel = Eigen::MatrixXd::Zero(w * d, n);
    for (int j = 0; j < w; ++j) {
      const int pos = require_coord(coords, window_in[j], "ar_step");
      for (int i = 0; i < d; ++i) in_sel(j * d + i, pos * d + i) = 1.0;
    }
    const RefSetup refs_now = make_ref_setup(config, k, coords);
    Eigen::MatrixXd z(w * d + refs_now.z_of_state.rows(), n);
    z.topRows(w * d) = in_sel;
    if (refs_now.z_of_state.rows() > 0)
      z.bottomRows(refs_now.z_of_state.rows()) = refs_now.z_of_state;
    std::vector<CoordKey> out;
    for (int j = 1; j <= w; ++j)
      out.push_back({base + j, ladder.output_levels[j - 1]});
    ops.push_back(append_true_conditional_op(model, coords, out, z));
  }
  return ops;
}

}  // namespace

void RunConfig::check() const {
  model.check();
  const ValidationReport report = validate(ladder);
  if (!report.ok)
    throw DimensionError("RunConfig: ladder fails requirement validation (" +
                         report.violations.front().clause + " at index " +
                         std::to_string(report.violations.front().index) + ")");
  if (ar_steps < 1) throw DimensionError("RunConfig: need at least one AR step");
  if (init_frames < ladder.w - ladder.delta)
    throw DimensionError("RunConfig: init_frames must cover the window remainder w - delta");
  const int last_frame = (ar_steps - 1) * ladder.delta + ladder.w;
  if (last_frame > model.n_frames || init_frames > model.n_frames)
    throw DimensionError("RunConfig: run touches frame " + std::to_string(last_frame) +
                         " beyond the model's " + std::to_string(model.n_frames));
  if (!(ar_grid.points.front() == ladder.output_levels[0]) ||
      !(ar_grid.points.back() == ladder.input_levels[0]))
    throw DimensionError("RunConfig: AR grid must span [t_1^O, t_1^I] exactly");
  if (init_frames > 0 && mode == SamplerMode::euler_maruyama) {
    if (!(init_grid.points.front() == Rational(0)) ||
        !(init_grid.points.back() == ladder.horizon))
      throw DimensionError("RunConfig: init grid must span [0, T] exactly");
  }
}

GeneratedLaw::GeneratedLaw(GaussianLaw joint, std::vector<CoordKey> coords,
                           int delta, int frame_dim)
    : joint_(std::move(joint)),
      coords_(std::move(coords)),
      delta_(delta),
      frame_dim_(frame_dim) {
  if (joint_.dim() != static_cast<int>(coords_.size()) * frame_dim_)
    throw DimensionError("GeneratedLaw: coordinate map does not cover the law");
  for (std::size_t i = 0; i < coords_.size(); ++i)
    for (std::size_t j = i + 1; j < coords_.size(); ++j)
      if (coords_[i] == coords_[j])
        throw DimensionError("GeneratedLaw: coordinate map not injective");
}

int GeneratedLaw::find(const CoordKey& key) const {
  return find_coord(coords_, key);
}

int GeneratedLaw::index_of(const CoordKey& key) const {
  return require_coord(coords_, key, "GeneratedLaw");
}

GaussianLaw GeneratedLaw::marginal_of(const std::vector<CoordKey>& keys) const {
  std::vector<int> scalar;
  for (const auto& key : keys) {
    const int pos = index_of(key);
    for (int i = 0; i < frame_dim_; ++i) scalar.push_back(pos * frame_dim_ + i);
  }
  // marginal() wants sorted indices; permute afterwards to caller order.
  std::vector<int> order(scalar.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(),
            [&scalar](int a, int b) { return scalar[a] < scalar[b]; });
  std::vector<int> sorted(scalar.size());
  for (std::size_t i = 0; i < order.size(); ++i) sorted[i] = scalar[order[i]];
  GaussianLaw m = marginal(joint_, IndexSet(sorted));
  Eigen::VectorXd mean(m.dim());
  Eigen::MatrixXd cov(m.dim(), m.dim());
  std::vector<int> inverse(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) inverse[order[i]] = static_cast<int>(i);
  for (int a = 0; a < m.dim(); ++a) {
    mean(inverse[a]) = m.mean()(a);
    for (int b = 0; b < m.dim(); ++b) cov(inverse[a], inverse[b]) = m.cov()(a, b);
  }
  return GaussianLaw(std::move(mean), std::move(cov));
}

GaussianLaw GeneratedLaw::clean_marginal(int first_frame, int last_frame) const {
  std::vector<CoordKey> keys;
  for (int f = first_frame; f <= last_frame; ++f) keys.push_back({f, Rational(0)});
  return marginal_of(keys);
}

AffineChannel em_step_channel(const AffineScore& score, double t_curr,
                              double t_next) {
  const double h = t_next - t_curr;
  if (!(h > 0.0))
    throw DimensionError("em_step_channel: reverse-time step must be positive");
  const int n = static_cast<int>(score.offset.size());
  Eigen::MatrixXd a = (1.0 + h / 2.0) * Eigen::MatrixXd::Identity(n, n) +
                      h * score.slope;
  return AffineChannel(std::move(a), h * score.offset,
                       h * Eigen::MatrixXd::Identity(n, n));
}

GeneratedLaw init_stage(const RunConfig& config) {
  config.check();
  GaussianLaw law = empty_law();
  std::vector<CoordKey> coords;
  for (const StateOp& op : build_init_ops(config)) {
    law = fold(law, op);
    coords = op.coords_after;
  }
  return GeneratedLaw(std::move(law), std::move(coords), config.ladder.delta,
                      config.model.frame_dim);
}

GeneratedLaw ar_step(const GeneratedLaw& state, const RunConfig& config, int k) {
  GaussianLaw law = state.joint();
  std::vector<CoordKey> coords = state.coords();
  for (const StateOp& op : build_ar_ops(config, k, coords)) {
    law = fold(law, op);
    coords = op.coords_after;
  }
  return GeneratedLaw(std::move(law), std::move(coords), config.ladder.delta,
                      config.model.frame_dim);
}

GeneratedLaw generate_law(const RunConfig& config) {
  config.check();
  GaussianLaw law = empty_law();
  std::vector<CoordKey> coords;
  auto apply = [&](const std::vector<StateOp>& ops) {
    for (const StateOp& op : ops) {
      law = fold(law, op);
      coords = op.coords_after;
    }
  };
  apply(build_init_ops(config));
  if (config.init_frames > 0) {
    // The AR loop regenerates frames 1..K*delta; the init stage's clean
    // copies are intermediates and leave the collection here.
    std::vector<CoordKey> remove;
    for (int m = 1; m <= config.init_frames; ++m) remove.push_back({m, Rational(0)});
    apply({drop_op(coords, remove, config.model.frame_dim)});
  }
  for (int k = 1; k <= config.ar_steps; ++k) apply(build_ar_ops(config, k, coords));
  return GeneratedLaw(std::move(law), std::move(coords), config.ladder.delta,
                      config.model.frame_dim);
}

Eigen::MatrixXd sample_paths(const RunConfig& config, int n_paths) {
  config.check();
  if (n_paths < 1) throw DimensionError("sample_paths: need at least one path");

  std::vector<StateOp> ops;
  std::vector<CoordKey> coords;
  auto collect = [&](const std::vector<StateOp>& batch) {
    for (const StateOp& op : batch) {
      ops.push_back(op);
      coords = op.coords_after;
    }
  };
  collect(build_init_ops(config));
  if (config.init_frames > 0) {
    std::vector<CoordKey> remove;
    for (int m = 1; m <= config.init_frames; ++m) remove.push_back({m, Rational(0)});
    collect({drop_op(coords, remove, config.model.frame_dim)});
  }
  for (int k = 1; k <= config.ar_steps; ++k) collect(build_ar_ops(config, k, coords));

  // Consecutive square ops (the EM sweeps) compose into a single affine
  // channel per run, which turns the per-path work into a handful of matrix
  // products instead of thousands of small steps.
  std::vector<StateOp> composed;
  for (const StateOp& op : ops) {
    if (!composed.empty()) {
      StateOp& prev = composed.back();
      const bool both_square = prev.map.rows() == prev.map.cols() &&
                               op.map.rows() == op.map.cols() &&
                               op.map.cols() == prev.map.rows();
      if (both_square) {
        Eigen::MatrixXd q = op.map * (prev.noise * prev.noise.transpose()) *
                                op.map.transpose() +
                            op.noise * op.noise.transpose();
        prev.shift = op.map * prev.shift + op.shift;
        prev.map = op.map * prev.map;
        prev.noise = detail::psd_sqrt(q);
        prev.coords_after = op.coords_after;
        continue;
      }
    }
    composed.push_back(op);
  }

  std::vector<CounterRng> streams;
  streams.reserve(n_paths);
  for (int p = 0; p < n_paths; ++p)
    streams.emplace_back(config.seed, static_cast<std::uint64_t>(p));

  Eigen::MatrixXd state(0, n_paths);
  for (const StateOp& op : composed) {
    Eigen::MatrixXd next = op.map * state;
    next.colwise() += op.shift;
    const int k = static_cast<int>(op.noise.cols());
    if (k > 0) {
      Eigen::MatrixXd z(k, n_paths);
      for (int p = 0; p < n_paths; ++p)
        for (int j = 0; j < k; ++j) z(j, p) = streams[p].normal();
      next += op.noise * z;
    }
    state = std::move(next);
  }

  const int d = config.model.frame_dim;
  const int n_clean = config.ar_steps * config.ladder.delta;
  Eigen::MatrixXd out(n_paths, n_clean * d);
  for (int f = 1; f <= n_clean; ++f) {
    const int pos = require_coord(coords, {f, Rational(0)}, "sample_paths");
    for (int i = 0; i < d; ++i)
      out.col((f - 1) * d + i) = state.row(pos * d + i).transpose();
  }
  return out;
}

}  // namespace arvdm
