#include "arvdm/schedule.hpp"

#include <algorithm>
#include <set>

#include "arvdm/gaussian.hpp"  // DimensionError

namespace arvdm {

namespace {

std::string level_text(const Rational& r) { return r.str(); }

/// First-occurrence window positions of each distinct input level (the set
/// S^I of the history definition).
std::vector<int> first_occurrence_positions(const NoiseLadder& ladder) {
  std::vector<int> out;
  std::set<Rational> seen;
  for (int j = 1; j <= ladder.w; ++j) {
    const Rational& lev = ladder.input_levels[j - 1];
    if (seen.insert(lev).second) out.push_back(j);
  }
  return out;
}

/// H at window start i (frames i+1..i+w being denoised): clean frames
/// 1..i plus, per distinct input level with first occurrence j, the noisy
/// copies of frames 1..i+j-1 at that level. Empty for i < delta.
std::set<CoordKey> history_set(const NoiseLadder& ladder, int i) {
  std::set<CoordKey> h;
  if (i < ladder.delta) return h;
  for (int m = 1; m <= i; ++m) h.insert({m, Rational(0)});
  for (int j : first_occurrence_positions(ladder)) {
    const Rational& lev = ladder.input_levels[j - 1];
    for (int m = 1; m <= i + j - 1; ++m) h.insert({m, lev});
  }
  return h;
}

std::set<CoordKey> generated_set(const NoiseLadder& ladder, int k) {
  std::set<CoordKey> g = history_set(ladder, k * ladder.delta);
  for (int j = 1; j <= ladder.w; ++j) {
    g.insert({k * ladder.delta + j, ladder.input_levels[j - 1]});
    g.insert({k * ladder.delta + j, ladder.output_levels[j - 1]});
  }
  return g;
}

}  // namespace

NoiseLadder NoiseLadder::from_levels(int w, int delta, Rational horizon,
                                     std::vector<Rational> input_levels,
                                     std::vector<Rational> output_levels) {
  if (w < 1) throw DimensionError("NoiseLadder: window size must be positive");
  if (delta < 1 || delta > w)
    throw DimensionError("NoiseLadder: stride must satisfy 1 <= delta <= w");
  if (!(horizon > Rational(0)))
    throw DimensionError("NoiseLadder: horizon must be positive");
  if (static_cast<int>(input_levels.size()) != w ||
      static_cast<int>(output_levels.size()) != w)
    throw DimensionError("NoiseLadder: level vectors must have length w");
  NoiseLadder ladder;
  ladder.w = w;
  ladder.delta = delta;
  ladder.horizon = horizon;
  ladder.input_levels = std::move(input_levels);
  ladder.output_levels = std::move(output_levels);
  return ladder;
}

ValidationReport validate(const NoiseLadder& ladder) {
  ValidationReport report;
  const auto& li = ladder.input_levels;
  const auto& lo = ladder.output_levels;
  const int w = ladder.w;
  const int d = ladder.delta;

  for (int i = 2; i <= w; ++i) {
    if (!(li[i - 2] <= li[i - 1]))
      report.violations.push_back({"MONOTONICITY", i,
                                   "input levels decrease: t_" + std::to_string(i - 1) +
                                       "^I=" + level_text(li[i - 2]) + " > t_" +
                                       std::to_string(i) + "^I=" + level_text(li[i - 1])});
    if (!(lo[i - 2] <= lo[i - 1]))
      report.violations.push_back({"MONOTONICITY", i,
                                   "output levels decrease: t_" + std::to_string(i - 1) +
                                       "^O=" + level_text(lo[i - 2]) + " > t_" +
                                       std::to_string(i) + "^O=" + level_text(lo[i - 1])});
  }
  for (int i = 1; i <= w; ++i) {
    if (!(lo[i - 1] < li[i - 1]))
      report.violations.push_back({"MONOTONICITY", i,
                                   "t_" + std::to_string(i) + "^O=" + level_text(lo[i - 1]) +
                                       " not below t_" + std::to_string(i) +
                                       "^I=" + level_text(li[i - 1])});
  }

  for (int i = w - d + 1; i <= w; ++i) {
    if (!(li[i - 1] == ladder.horizon))
      report.violations.push_back({"BOUNDARY", i,
                                   "t_" + std::to_string(i) + "^I=" + level_text(li[i - 1]) +
                                       " must equal T=" + level_text(ladder.horizon)});
  }
  for (int i = 1; i <= d; ++i) {
    if (!(lo[i - 1] == Rational(0)))
      report.violations.push_back({"BOUNDARY", i,
                                   "t_" + std::to_string(i) + "^O=" + level_text(lo[i - 1]) +
                                       " must equal 0"});
  }

  for (int i = 1; i <= w - d; ++i) {
    if (!(li[i - 1] == lo[d + i - 1]))
      report.violations.push_back({"CIRCULARITY", i,
                                   "t_" + std::to_string(i) + "^I=" + level_text(li[i - 1]) +
                                       " must equal t_" + std::to_string(d + i) +
                                       "^O=" + level_text(lo[d + i - 1])});
  }

  const Rational pace = lo[0] - li[0];
  for (int i = 2; i <= w; ++i) {
    if (!(lo[i - 1] - li[i - 1] == pace))
      report.violations.push_back({"CONSTANT_PACE", i,
                                   "t_" + std::to_string(i) + "^O - t_" + std::to_string(i) +
                                       "^I=" + level_text(lo[i - 1] - li[i - 1]) +
                                       " differs from " + level_text(pace)});
  }

  report.ok = report.violations.empty();
  return report;
}

NoiseLadder outpaint_ladder(int w, Rational horizon) {
  return NoiseLadder::from_levels(w, w, horizon,
                                  std::vector<Rational>(w, horizon),
                                  std::vector<Rational>(w, Rational(0)));
}

NoiseLadder fifo_ladder(int w, Rational horizon) {
  if (w < 2) throw DimensionError("fifo_ladder: window size must be at least 2");
  return canonical_ladder(w, 1, horizon);
}

NoiseLadder canonical_ladder(int w, int delta, Rational horizon) {
  if (w < 1 || delta < 1 || delta > w)
    throw DimensionError("canonical_ladder: need 1 <= delta <= w");
  if (w % delta != 0)
    throw DimensionError("canonical_ladder: stride must divide the window "
                         "(no ladder satisfies the requirement clauses otherwise)");
  const int q = w / delta;
  const Rational pace = horizon / Rational(q);
  std::vector<Rational> li(w), lo(w);
  for (int i = 1; i <= w; ++i) {
    lo[i - 1] = pace * Rational((i - 1) / delta);
    li[i - 1] = lo[i - 1] + pace;
  }
  return NoiseLadder::from_levels(w, delta, horizon, std::move(li), std::move(lo));
}

std::vector<Rational> extended_time(const NoiseLadder& ladder, Rational t) {
  std::vector<Rational> out(ladder.w);
  for (int i = 0; i < ladder.w; ++i)
    out[i] = t + (ladder.input_levels[i] - ladder.input_levels[0]);
  return out;
}

TimeGrid::TimeGrid(std::vector<Rational> pts) : points(std::move(pts)) {
  if (points.size() < 2) throw DimensionError("TimeGrid: need at least one step");
  for (std::size_t i = 1; i < points.size(); ++i)
    if (!(points[i - 1] < points[i]))
      throw DimensionError("TimeGrid: points must be strictly increasing");
}

double TimeGrid::sum_squared_increments() const {
  double s = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    const double h = (points[i] - points[i - 1]).to_double();
    s += h * h;
  }
  return s;
}

TimeGrid uniform_grid(Rational a, Rational b, int steps) {
  if (!(a < b)) throw DimensionError("uniform_grid: need a < b");
  if (steps < 1) throw DimensionError("uniform_grid: need at least one step");
  std::vector<Rational> pts(steps + 1);
  const Rational span = b - a;
  for (int i = 0; i <= steps; ++i)
    pts[i] = a + span * Rational(i, steps);
  return TimeGrid(std::move(pts));
}

StepIndexSets step_index_sets(const NoiseLadder& ladder, int k, int i0,
                              const std::vector<int>& ref_frames) {
  if (k < 0) throw DimensionError("step_index_sets: negative step index");
  if (i0 < 0) throw DimensionError("step_index_sets: negative init frame count");
  const int i = k * ladder.delta;
  for (int r : ref_frames) {
    if (r < 1 || r > i)
      throw DimensionError("step_index_sets: reference frame " + std::to_string(r) +
                           " violates causality (allowed range [1, " +
                           std::to_string(i) + "])");
  }

  StepIndexSets sets;
  for (int j = 1; j <= ladder.w; ++j) {
    sets.output.push_back({i + j, ladder.output_levels[j - 1]});
    sets.input.push_back({i + j, ladder.input_levels[j - 1]});
  }
  for (int r : ref_frames) sets.input.push_back({r, Rational(0)});
  std::sort(sets.input.begin(), sets.input.end());

  std::set<CoordKey> h = history_set(ladder, i);
  for (int r : ref_frames) h.erase({r, Rational(0)});
  sets.past.assign(h.begin(), h.end());
  return sets;
}

bool verify_hg_identity(const NoiseLadder& ladder, int k) {
  if (k < 1) throw DimensionError("verify_hg_identity: need k >= 1");
  std::set<CoordKey> lhs = generated_set(ladder, k - 1);
  std::set<CoordKey> rhs = history_set(ladder, k * ladder.delta);
  for (int j = 1; j <= ladder.w - ladder.delta; ++j)
    rhs.insert({k * ladder.delta + j, ladder.input_levels[j - 1]});
  return lhs == rhs;
}

}  // namespace arvdm
