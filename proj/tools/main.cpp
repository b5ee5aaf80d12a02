#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "arvdm/experiment.hpp"
#include "arvdm/svg_plot.hpp"

namespace {

namespace fs = std::filesystem;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw arvdm::ParseError("cannot read '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& content) {
  fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw arvdm::ParseError("cannot write '" + path + "'");
  out << content;
}

int cmd_validate(const std::string& path) {
  arvdm::NoiseLadder ladder = arvdm::parse_ladder_json(read_file(path));
  arvdm::ValidationReport report = arvdm::validate(ladder);
  for (const auto& v : report.violations)
    std::cout << v.clause << " " << v.index << " " << v.detail << "\n";
  std::cout << report.causality_note << "\n";
  if (report.ok) {
    std::cout << "ok\n";
    return 0;
  }
  return 1;
}

int cmd_decompose(const std::string& config_path, const std::string& out_dir,
                  std::optional<std::uint64_t> seed, int threads) {
  arvdm::ExperimentConfig config =
      arvdm::parse_experiment_config(read_file(config_path));
  if (seed) config.run.seed = *seed;
  arvdm::DecomposeOutput output = arvdm::run_decompose(config, threads);
  write_file((fs::path(out_dir) / "report.json").string(), output.json);
  write_file((fs::path(out_dir) / "report.csv").string(), output.csv);
  std::cout << output.csv;
  return 0;
}

int cmd_lowerbound(const arvdm::LowerBoundConfig& config,
                   const std::string& out_dir) {
  const std::string report = arvdm::run_lower_bound_report(config);
  if (!out_dir.empty())
    write_file((fs::path(out_dir) / "lowerbound.txt").string(), report);
  std::cout << report;
  return 0;
}

int cmd_plot(const std::string& csv_path, const std::string& out_path,
             const arvdm::PlotSpec& spec) {
  arvdm::CsvTable table = arvdm::CsvTable::parse(read_file(csv_path));
  write_file(out_path, arvdm::render_line_chart(table, spec));
  return 0;
}

int cmd_sample(const std::string& config_path, const std::string& out_path,
               int n_paths, std::optional<std::uint64_t> seed) {
  arvdm::ExperimentConfig config =
      arvdm::parse_experiment_config(read_file(config_path));
  if (seed) config.run.seed = *seed;
  write_file(out_path, arvdm::run_sample_csv(config, n_paths));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Autoregressive diffusion error-decomposition laboratory"};
  app.require_subcommand(1);

  std::string ladder_path, config_path, out_dir = ".", out_file, csv_path;
  std::optional<std::uint64_t> seed;
  int threads = 1;
  int n_paths = 1000;
  arvdm::LowerBoundConfig lb;
  arvdm::PlotSpec plot;
  std::string y_joined;

  CLI::App* validate = app.add_subcommand("validate", "Check a ladder file");
  validate->add_option("ladder", ladder_path, "Ladder JSON file")->required();

  CLI::App* decompose =
      app.add_subcommand("decompose", "Error decomposition report / sweep");
  decompose->add_option("--config", config_path)->required();
  decompose->add_option("--out", out_dir);
  decompose->add_option("--seed", seed);
  decompose->add_option("--threads", threads);

  CLI::App* lowerbound =
      app.add_subcommand("lowerbound", "Discrete lower-bound numerics");
  lowerbound->add_option("--s", lb.s);
  lowerbound->add_option("--n", lb.n);
  lowerbound->add_option("--trials", lb.trials);
  lowerbound->add_option("--seed", lb.seed);
  std::string lb_out;
  lowerbound->add_option("--out", lb_out);

  CLI::App* plot_cmd = app.add_subcommand("plot", "Render a CSV as an SVG chart");
  plot_cmd->add_option("--csv", csv_path)->required();
  plot_cmd->add_option("--out", out_file)->required();
  plot_cmd->add_option("--x", plot.x_column)->required();
  plot_cmd->add_option("--y", y_joined, "Comma-separated y columns")->required();
  plot_cmd->add_flag("--log-x", plot.log_x);
  plot_cmd->add_flag("--log-y", plot.log_y);
  plot_cmd->add_option("--title", plot.title);

  CLI::App* sample = app.add_subcommand("sample", "Dump Monte Carlo paths as CSV");
  sample->add_option("--config", config_path)->required();
  sample->add_option("--out", out_file)->required();
  sample->add_option("--paths", n_paths);
  sample->add_option("--seed", seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*validate) return cmd_validate(ladder_path);
    if (*decompose) return cmd_decompose(config_path, out_dir, seed, threads);
    if (*lowerbound) return cmd_lowerbound(lb, lb_out);
    if (*plot_cmd) {
      std::istringstream ys(y_joined);
      std::string col;
      while (std::getline(ys, col, ',')) plot.y_columns.push_back(col);
      return cmd_plot(csv_path, out_file, plot);
    }
    if (*sample) return cmd_sample(config_path, out_file, n_paths, seed);
  } catch (const arvdm::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
