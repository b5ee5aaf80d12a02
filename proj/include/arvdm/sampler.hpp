#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "arvdm/gaussian.hpp"
#include "arvdm/schedule.hpp"
#include "arvdm/world_model.hpp"

namespace arvdm {

enum class OracleKind { exact, biased };

struct OracleSpec {
  OracleKind kind = OracleKind::exact;
  /// ||delta|| of the constant score bias. The bias direction is the
  /// equal-components unit vector, so the average score error is exactly
  /// bias_magnitude^2 in every stage regardless of its dimension.
  double bias_magnitude = 0.0;

  double eps_sq() const {
    return kind == OracleKind::biased ? bias_magnitude * bias_magnitude : 0.0;
  }
};

enum class SamplerMode {
  /// Algorithms as implementable: fresh N(0,I) noise, Euler-Maruyama
  /// integration of the reverse SDE with the (exact or biased) score.
  euler_maruyama,
  /// Diagnostic mode: every denoising pass is replaced by the exact
  /// conditional Gaussian channel P(Output_k | Input_k) and fresh noise by
  /// the exact conditional law of the true process given everything
  /// generated so far. All error terms vanish except the memory
  /// bottleneck, whose chain-rule sum the run then matches exactly.
  idealized_conditional
};

struct RunConfig {
  WorldModel model;
  NoiseLadder ladder;
  TimeGrid init_grid;  // over [0, T]; ignored when init_frames == 0
  TimeGrid ar_grid;    // over [t_1^O, t_1^I]
  int init_frames = 0;  // i0 >= w - delta
  int ar_steps = 1;     // K
  ReferencePolicy policy;
  OracleSpec oracle;
  SamplerMode mode = SamplerMode::euler_maruyama;
  std::uint64_t seed = 0;

  /// Ladder validity, grid spans, i0/window geometry, frame budget.
  void check() const;
};

/// The joint Gaussian of everything a run has generated, with the
/// (frame, level) -> coordinate map. Levels are exact rationals so the
/// circularity handoff between AR steps is checked as identity, not as a
/// float comparison.
class GeneratedLaw {
 public:
  GeneratedLaw(GaussianLaw joint, std::vector<CoordKey> coords, int delta,
               int frame_dim);

  const GaussianLaw& joint() const { return joint_; }
  const std::vector<CoordKey>& coords() const { return coords_; }
  int delta() const { return delta_; }
  int frame_dim() const { return frame_dim_; }

  int find(const CoordKey& key) const;      // -1 when absent
  int index_of(const CoordKey& key) const;  // throws when absent

  GaussianLaw marginal_of(const std::vector<CoordKey>& keys) const;
  /// Marginal over clean frames first..last (level 0).
  GaussianLaw clean_marginal(int first_frame, int last_frame) const;

 private:
  GaussianLaw joint_;
  std::vector<CoordKey> coords_;
  int delta_;
  int frame_dim_;
};

/// One Euler-Maruyama step of the reverse-time SDE (drift -y/2, unit
/// diffusion) as an affine channel on the window block:
/// A = (1 + h/2) I + h * score.slope, b = h * score.offset, Q = h I,
/// where h = t_next - t_curr on the reverse-time axis.
AffineChannel em_step_channel(const AffineScore& score, double t_curr,
                              double t_next);

/// Initialization stage: denoise init_frames i.i.d. N(0,I) vectors over the
/// init grid, then re-noise frames 1..w-delta to their input levels through
/// the forward OU channel. The returned law retains the clean copies next to
/// the re-noised coordinates.
GeneratedLaw init_stage(const RunConfig& config);

/// AR step k (1-based): appends the stride's fresh level-T coordinates,
/// denoises the window from the input to the output levels conditioned on
/// the policy's references, and leaves the circularity handoff coordinates
/// for step k+1 in place.
GeneratedLaw ar_step(const GeneratedLaw& state, const RunConfig& config, int k);

/// Full run: init_stage, drop the init clean copies (the AR loop regenerates
/// those frames), then ar_steps AR steps. Law-mode computation only; no
/// randomness is consumed.
GeneratedLaw generate_law(const RunConfig& config);

/// Monte Carlo twin of generate_law: n_paths draws of the clean frames
/// 1..K*delta, one row per path, using per-path counter RNG substreams.
/// Identical (config, seed) gives identical output.
Eigen::MatrixXd sample_paths(const RunConfig& config, int n_paths);

}  // namespace arvdm
