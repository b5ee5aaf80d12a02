#include "arvdm/experiment.hpp"

#include <atomic>
#include <cstdio>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace arvdm {

using nlohmann::ordered_json;

std::string format_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

Rational rational_from_json(const ordered_json& j, const char* what) {
  try {
    if (j.is_string()) return Rational::parse(j.get<std::string>());
    if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
    if (j.is_number_float()) {
      std::ostringstream os;
      os << j.get<double>();
      return Rational::parse(os.str());
    }
  } catch (const std::exception& e) {
    throw ParseError(std::string(what) + ": " + e.what());
  }
  throw ParseError(std::string(what) + ": expected number or rational string");
}

std::vector<Rational> levels_from_json(const ordered_json& j, const char* what) {
  if (!j.is_array()) throw ParseError(std::string(what) + ": expected an array");
  std::vector<Rational> out;
  for (const auto& v : j) out.push_back(rational_from_json(v, what));
  return out;
}

ordered_json levels_to_json(const std::vector<Rational>& levels) {
  ordered_json arr = ordered_json::array();
  for (const auto& r : levels) arr.push_back(r.str());
  return arr;
}

NoiseLadder ladder_from_json_value(const ordered_json& j) {
  if (!j.is_object()) throw ParseError("ladder: expected an object");
  const std::string kind = j.value("kind", std::string("explicit"));
  const Rational horizon = rational_from_json(j.at("T"), "ladder.T");
  if (kind == "outpaint") return outpaint_ladder(j.at("w").get<int>(), horizon);
  if (kind == "fifo") return fifo_ladder(j.at("w").get<int>(), horizon);
  if (kind == "canonical")
    return canonical_ladder(j.at("w").get<int>(), j.at("delta").get<int>(), horizon);
  if (kind != "explicit") throw ParseError("ladder.kind: unknown kind '" + kind + "'");
  return NoiseLadder::from_levels(
      j.at("w").get<int>(), j.at("delta").get<int>(), horizon,
      levels_from_json(j.at("input_levels"), "ladder.input_levels"),
      levels_from_json(j.at("output_levels"), "ladder.output_levels"));
}

}  // namespace

NoiseLadder parse_ladder_json(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const std::exception& e) {
    throw ParseError(std::string("ladder file: ") + e.what());
  }
  try {
    return ladder_from_json_value(j);
  } catch (const ordered_json::exception& e) {
    throw ParseError(std::string("ladder file: ") + e.what());
  }
}

std::string ladder_to_json(const NoiseLadder& ladder) {
  ordered_json j;
  j["w"] = ladder.w;
  j["delta"] = ladder.delta;
  j["T"] = ladder.horizon.str();
  j["input_levels"] = levels_to_json(ladder.input_levels);
  j["output_levels"] = levels_to_json(ladder.output_levels);
  j["grid"] = {{"kind", "uniform"}, {"M_init", 64}, {"M_ar", 64}};
  return j.dump(2) + "\n";
}

void ExperimentConfig::rebuild_grids() {
  const NoiseLadder& ladder = run.ladder;
  if (grid_ar_steps > 0)
    run.ar_grid = uniform_grid(ladder.output_levels[0], ladder.input_levels[0],
                               grid_ar_steps);
  if (grid_init_steps > 0 && run.init_frames > 0)
    run.init_grid = uniform_grid(Rational(0), ladder.horizon, grid_init_steps);
}

ExperimentConfig parse_experiment_config(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const std::exception& e) {
    throw ParseError(std::string("config: ") + e.what());
  }

  try {
    ExperimentConfig config;
    const auto& jm = j.at("model");
    config.run.model.n_frames = jm.at("n_frames").get<int>();
    config.run.model.frame_dim = jm.value("frame_dim", 1);
    config.run.model.rho = jm.at("rho").get<double>();
    config.run.model.frame_var = jm.value("frame_var", 1.0);

    config.run.ladder = ladder_from_json_value(j.at("ladder"));

    if (j.contains("grid")) {
      const auto& jg = j.at("grid");
      const std::string kind = jg.value("kind", std::string("uniform"));
      if (kind == "uniform") {
        config.grid_init_steps = jg.value("M_init", 64);
        config.grid_ar_steps = jg.value("M_ar", 64);
      } else if (kind == "explicit") {
        config.grid_init_steps = -1;
        config.grid_ar_steps = -1;
        if (jg.contains("init_points"))
          config.run.init_grid =
              TimeGrid(levels_from_json(jg.at("init_points"), "grid.init_points"));
        config.run.ar_grid =
            TimeGrid(levels_from_json(jg.at("ar_points"), "grid.ar_points"));
      } else {
        throw ParseError("grid.kind: unknown kind '" + kind + "'");
      }
    }

    config.run.init_frames =
        j.value("i0", config.run.ladder.w - config.run.ladder.delta);
    config.run.ar_steps = j.value("K", 1);
    config.run.seed = j.value("seed", 0ULL);

    if (j.contains("policy")) {
      const auto& jp = j.at("policy");
      const std::string kind = jp.value("kind", std::string("none"));
      if (kind == "none") {
        config.run.policy = ReferencePolicy::no_references();
      } else if (kind == "window") {
        config.run.policy = ReferencePolicy::window(jp.at("m").get<int>());
      } else if (kind == "compressed") {
        const auto& rows = jp.at("rows");
        const int m = jp.at("m").get<int>();
        const int cols = m * config.run.model.frame_dim;
        Eigen::MatrixXd p(rows.size(), cols);
        for (std::size_t r = 0; r < rows.size(); ++r) {
          if (static_cast<int>(rows[r].size()) != cols)
            throw ParseError("policy.rows: row length must be m * frame_dim");
          for (int c = 0; c < cols; ++c) p(r, c) = rows[r][c].get<double>();
        }
        config.run.policy = ReferencePolicy::compressed(m, std::move(p));
      } else {
        throw ParseError("policy.kind: unknown kind '" + kind + "'");
      }
    }

    if (j.contains("oracle")) {
      const auto& jo = j.at("oracle");
      const std::string kind = jo.value("kind", std::string("exact"));
      if (kind == "exact") {
        config.run.oracle = {OracleKind::exact, 0.0};
      } else if (kind == "biased") {
        config.run.oracle = {OracleKind::biased, jo.at("magnitude").get<double>()};
      } else {
        throw ParseError("oracle.kind: unknown kind '" + kind + "'");
      }
    }

    const std::string mode = j.value("mode", std::string("em"));
    if (mode == "em") {
      config.run.mode = SamplerMode::euler_maruyama;
    } else if (mode == "idealized") {
      config.run.mode = SamplerMode::idealized_conditional;
    } else {
      throw ParseError("mode: unknown mode '" + mode + "'");
    }

    if (j.contains("sweep")) {
      SweepSpec sweep;
      sweep.axis = j.at("sweep").at("axis").get<std::string>();
      for (const auto& v : j.at("sweep").at("values")) {
        if (v.is_string()) {
          sweep.values.push_back(v.get<std::string>());
        } else {
          std::ostringstream os;
          if (v.is_number_integer()) {
            os << v.get<std::int64_t>();
          } else {
            os << v.get<double>();
          }
          sweep.values.push_back(os.str());
        }
      }
      config.sweep = sweep;
    }

    config.rebuild_grids();
    return config;
  } catch (const ordered_json::exception& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
}

namespace {

ordered_json config_to_json(const RunConfig& run, int m_init, int m_ar) {
  ordered_json j;
  j["model"] = {{"n_frames", run.model.n_frames},
                {"frame_dim", run.model.frame_dim},
                {"rho", run.model.rho},
                {"frame_var", run.model.frame_var}};
  j["ladder"] = {{"w", run.ladder.w},
                 {"delta", run.ladder.delta},
                 {"T", run.ladder.horizon.str()},
                 {"input_levels", levels_to_json(run.ladder.input_levels)},
                 {"output_levels", levels_to_json(run.ladder.output_levels)}};
  j["grid"] = {{"M_init", m_init}, {"M_ar", m_ar}};
  j["i0"] = run.init_frames;
  j["K"] = run.ar_steps;
  switch (run.policy.kind) {
    case ReferencePolicy::Kind::none:
      j["policy"] = {{"kind", "none"}};
      break;
    case ReferencePolicy::Kind::window:
      j["policy"] = {{"kind", "window"}, {"m", run.policy.window_frames}};
      break;
    case ReferencePolicy::Kind::compressed:
      j["policy"] = {{"kind", "compressed"},
                     {"m", run.policy.window_frames},
                     {"budget", static_cast<int>(run.policy.projection.rows())}};
      break;
  }
  j["oracle"] = run.oracle.kind == OracleKind::exact
                    ? ordered_json{{"kind", "exact"}}
                    : ordered_json{{"kind", "biased"},
                                   {"magnitude", run.oracle.bias_magnitude}};
  j["mode"] = run.mode == SamplerMode::euler_maruyama ? "em" : "idealized";
  j["seed"] = run.seed;
  return j;
}

ordered_json doubles_to_json(const std::vector<double>& v) {
  ordered_json arr = ordered_json::array();
  for (double x : v) arr.push_back(format_g17(x));
  return arr;
}

std::string join_semicolon(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ';';
    out += format_g17(v[i]);
  }
  return out;
}

/// Applies one sweep value to a copy of the base config.
ExperimentConfig apply_axis(const ExperimentConfig& base, const std::string& axis,
                            const std::string& value) {
  ExperimentConfig next = base;
  auto as_int = [&]() {
    try {
      return std::stoi(value);
    } catch (const std::exception&) {
      throw ParseError("sweep value '" + value + "' is not an integer");
    }
  };
  auto as_double = [&]() {
    try {
      return std::stod(value);
    } catch (const std::exception&) {
      throw ParseError("sweep value '" + value + "' is not a number");
    }
  };
  if (axis == "M_ar") {
    next.grid_ar_steps = as_int();
  } else if (axis == "M_init") {
    next.grid_init_steps = as_int();
  } else if (axis == "M") {
    next.grid_ar_steps = next.grid_init_steps = as_int();
  } else if (axis == "T") {
    const Rational horizon = Rational::parse(value);
    next.run.ladder =
        canonical_ladder(base.run.ladder.w, base.run.ladder.delta, horizon);
  } else if (axis == "bias") {
    const double magnitude = as_double();
    next.run.oracle = magnitude == 0.0
                          ? OracleSpec{OracleKind::exact, 0.0}
                          : OracleSpec{OracleKind::biased, magnitude};
  } else if (axis == "window_m") {
    next.run.policy = ReferencePolicy::window(as_int());
  } else if (axis == "K") {
    next.run.ar_steps = as_int();
  } else if (axis == "rho") {
    next.run.model.rho = as_double();
  } else {
    throw ParseError("sweep axis '" + axis + "' does not name a parameter");
  }
  next.rebuild_grids();
  return next;
}

}  // namespace

std::string report_to_json(const DecompositionReport& report) {
  ordered_json j;
  j["measured_joint_kl"] = format_g17(report.measured_joint_kl);
  j["collection_kl"] = format_g17(report.collection_kl);
  j["per_clip_kl"] = doubles_to_json(report.per_clip_kl);
  j["nie_init"] = format_g17(report.nie_init);
  j["nie_ar"] = format_g17(report.nie_ar);
  j["see_init"] = format_g17(report.see_init);
  j["see_ar"] = format_g17(report.see_ar);
  j["de_init"] = format_g17(report.de_init);
  j["de_ar"] = format_g17(report.de_ar);
  j["mb"] = doubles_to_json(report.mb);
  j["mb_total"] = format_g17(report.mb_total());
  j["bound_total"] = format_g17(report.bound_total());
  j["lipschitz_init"] = format_g17(report.lipschitz_init);
  j["lipschitz_ar"] = format_g17(report.lipschitz_ar);
  j["config"] = config_to_json(report.config, report.config.init_grid.steps(),
                               report.config.ar_grid.steps());
  return j.dump(2) + "\n";
}

std::string report_csv_header() {
  return "axis,value,measured_joint_kl,collection_kl,nie_init,see_init,de_init,"
         "nie_ar,see_ar,de_ar,mb_total,mb,per_clip_kl,lipschitz_init,"
         "lipschitz_ar,bound_total\n";
}

std::string report_csv_row(const DecompositionReport& report,
                           const std::string& axis, const std::string& value) {
  std::ostringstream os;
  os << axis << ',' << value << ',' << format_g17(report.measured_joint_kl) << ','
     << format_g17(report.collection_kl) << ',' << format_g17(report.nie_init)
     << ',' << format_g17(report.see_init) << ',' << format_g17(report.de_init)
     << ',' << format_g17(report.nie_ar) << ',' << format_g17(report.see_ar)
     << ',' << format_g17(report.de_ar) << ',' << format_g17(report.mb_total())
     << ',' << join_semicolon(report.mb) << ',' << join_semicolon(report.per_clip_kl)
     << ',' << format_g17(report.lipschitz_init) << ','
     << format_g17(report.lipschitz_ar) << ',' << format_g17(report.bound_total())
     << '\n';
  return os.str();
}

DecomposeOutput run_decompose(const ExperimentConfig& config, int threads) {
  std::vector<std::pair<std::string, ExperimentConfig>> points;
  if (config.sweep) {
    for (const std::string& value : config.sweep->values)
      points.push_back({value, apply_axis(config, config.sweep->axis, value)});
  } else {
    points.push_back({"", config});
  }

  std::vector<DecompositionReport> reports(points.size());
  std::vector<std::string> errors(points.size());
  std::atomic<std::size_t> cursor{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = cursor.fetch_add(1);
      if (i >= points.size()) return;
      try {
        reports[i] = decomposition_report(points[i].second.run);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  const int n_threads =
      std::max(1, std::min<int>(threads, static_cast<int>(points.size())));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (const std::string& err : errors)
    if (!err.empty()) throw NumericalError(err);

  DecomposeOutput out;
  out.csv = report_csv_header();
  const std::string axis = config.sweep ? config.sweep->axis : "";
  ordered_json all = ordered_json::array();
  for (std::size_t i = 0; i < points.size(); ++i) {
    out.csv += report_csv_row(reports[i], axis, points[i].first);
    all.push_back(ordered_json::parse(report_to_json(reports[i])));
  }
  if (config.sweep) {
    ordered_json j;
    j["sweep_axis"] = axis;
    j["reports"] = all;
    out.json = j.dump(2) + "\n";
  } else {
    out.json = report_to_json(reports[0]);
  }
  return out;
}

std::string run_lower_bound_report(const LowerBoundConfig& config) {
  if (config.s <= 0.0 || config.s > 1.0)
    throw std::domain_error("lowerbound: s must lie in (0, 1]");
  const double eps = binary_entropy_inverse(1.0 - config.s);
  const DiscreteJoint p1 = construct_p1(eps);
  const DiscreteJoint p0 = construct_p0();
  const Prop4Result prop4 = verify_prop4(eps);
  const bool rev_pinsker = verify_reverse_pinsker(p1, p0);
  const MinimaxResult mm =
      minimax_demo(config.s, config.n, config.trials, config.seed);

  std::ostringstream os;
  os << "s = " << format_g17(config.s) << "\n";
  os << "eps = H^-1(1-s) = " << format_g17(eps) << "\n";
  os << "entropy_residual |H(eps)-(1-s)| = "
     << format_g17(std::abs(binary_entropy(eps) - (1.0 - config.s))) << "\n";
  os << "cmi_p1_bits = " << format_g17(cmi_discrete(p1)) << " (target "
     << format_g17(config.s) << ")\n";
  os << "tv_p0_p1 = " << format_g17(tv(p0, p1)) << " (closed form "
     << format_g17((1.0 - 2.0 * eps) / 2.0) << ")\n";
  os << "prop4_tv_ge_half_kl = " << (prop4.ok ? "ok" : "FAIL") << " (tv "
     << format_g17(prop4.tv_value) << ", kl/2 " << format_g17(prop4.half_kl)
     << ")\n";
  os << "reverse_pinsker = " << (rev_pinsker ? "ok" : "FAIL") << "\n";
  os << "minimax_fraction = " << format_g17(mm.fraction) << " (threshold s^2/2 = "
     << format_g17(config.s * config.s / 2.0) << ", trials " << mm.trials
     << ", N " << config.n << ", seed " << config.seed << ")\n";
  os << "plugin_limit_kl = " << format_g17(mm.limit_kl) << "\n";
  return os.str();
}

std::string run_sample_csv(const ExperimentConfig& config, int n_paths) {
  const Eigen::MatrixXd paths = sample_paths(config.run, n_paths);
  std::ostringstream os;
  const int d = config.run.model.frame_dim;
  for (int c = 0; c < paths.cols(); ++c) {
    if (c) os << ',';
    os << "frame" << (c / d + 1);
    if (d > 1) os << "_c" << (c % d);
  }
  os << '\n';
  for (int r = 0; r < paths.rows(); ++r) {
    for (int c = 0; c < paths.cols(); ++c) {
      if (c) os << ',';
      os << format_g17(paths(r, c));
    }
    os << '\n';
  }
  return os.str();
}

CsvTable CsvTable::parse(const std::string& text) {
  CsvTable table;
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.empty())
    throw ParseError("csv: missing header row");
  std::istringstream header(line);
  std::string cell;
  while (std::getline(header, cell, ',')) table.columns.push_back(cell);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::vector<double> values;
    while (std::getline(row, cell, ',')) {
      try {
        values.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw ParseError("csv: non-numeric cell '" + cell + "'");
      }
    }
    if (values.size() != table.columns.size())
      throw ParseError("csv: row width does not match header");
    table.rows.push_back(std::move(values));
  }
  if (table.rows.empty()) throw ParseError("csv: empty body");
  return table;
}

int CsvTable::column_index(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return static_cast<int>(i);
  return -1;
}

}  // namespace arvdm
