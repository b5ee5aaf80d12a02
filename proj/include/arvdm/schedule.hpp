#pragma once

#include <compare>
#include <string>
#include <vector>

#include "arvdm/rational.hpp"

namespace arvdm {

/// One materialized random vector of the generation process: frame index
/// (1-based) at an exact noise level. Exact levels make circularity
/// bookkeeping and history-set algebra set-exact rather than tolerance-based.
struct CoordKey {
  int frame;
  Rational level;

  friend bool operator==(const CoordKey& a, const CoordKey& b) {
    return a.frame == b.frame && a.level == b.level;
  }
  friend bool operator<(const CoordKey& a, const CoordKey& b) {
    if (a.frame != b.frame) return a.frame < b.frame;
    return a.level < b.level;
  }
};

/// Per-frame input/output noise levels of one AR denoising step, plus the
/// window geometry they apply to.
struct NoiseLadder {
  int w = 0;
  int delta = 0;
  Rational horizon;  // T
  std::vector<Rational> input_levels;   // t_1^I .. t_w^I
  std::vector<Rational> output_levels;  // t_1^O .. t_w^O

  /// Shape checks only (sizes, 1 <= delta <= w, T > 0). Requirement
  /// clauses are the job of validate(), so broken ladders remain loadable
  /// and reportable.
  static NoiseLadder from_levels(int w, int delta, Rational horizon,
                                 std::vector<Rational> input_levels,
                                 std::vector<Rational> output_levels);
};

struct LadderViolation {
  std::string clause;  // MONOTONICITY | BOUNDARY | CIRCULARITY | CONSTANT_PACE
  int index = 0;       // 1-based frame position
  std::string detail;
};

struct ValidationReport {
  bool ok = false;
  std::vector<LadderViolation> violations;
  /// Causality depends on the reference policy, not on the ladder.
  std::string causality_note =
      "CAUSALITY: not checked here (depends on the reference policy)";
};

ValidationReport validate(const NoiseLadder& ladder);

/// All input levels T, all output levels 0, delta = w.
NoiseLadder outpaint_ladder(int w, Rational horizon);

/// delta = 1, uniformly spaced levels t_i^I = i T / w, t_i^O = (i-1) T / w.
NoiseLadder fifo_ladder(int w, Rational horizon);

/// Uniform ladder for general stride. Requires delta | w: the Requirement
/// clauses otherwise admit no solution, and with delta | w they force the
/// uniform spacing, so this constructor covers every valid ladder shape.
NoiseLadder canonical_ladder(int w, int delta, Rational horizon);

/// Extended time t-bar(t): per-frame levels t + (t_i^I - t_1^I).
std::vector<Rational> extended_time(const NoiseLadder& ladder, Rational t);

/// Strictly increasing diffusion times spanning [points.front(), points.back()].
struct TimeGrid {
  std::vector<Rational> points;

  TimeGrid() : points{Rational(0), Rational(1)} {}
  explicit TimeGrid(std::vector<Rational> pts);
  int steps() const { return static_cast<int>(points.size()) - 1; }
  double point(int i) const { return points[i].to_double(); }
  /// Sum of squared increments, the quantity entering the discretization bound.
  double sum_squared_increments() const;
};

TimeGrid uniform_grid(Rational a, Rational b, int steps);

/// Output_k / Input_k / Past_k of the error decomposition at AR step k,
/// as exact (frame, level) sets.
struct StepIndexSets {
  std::vector<CoordKey> output;
  std::vector<CoordKey> input;
  std::vector<CoordKey> past;
};

/// k >= 0; the history is empty when k*delta < delta. refs must satisfy
/// causality (refs within [1, k*delta]); violations throw DimensionError
/// naming the offending frame.
StepIndexSets step_index_sets(const NoiseLadder& ladder, int k, int i0,
                              const std::vector<int>& ref_frames);

/// Checks the set identity G(step k-1) == H(step k) + first w-delta input
/// pairs. Holds for every k >= 2; at k = 1 the left side straddles the
/// initialization boundary where the history switches to its empty branch,
/// so the identity is only guaranteed for single-level (outpainting) ladders.
bool verify_hg_identity(const NoiseLadder& ladder, int k);

}  // namespace arvdm
