#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "arvdm/experiment.hpp"

namespace fs = std::filesystem;

namespace {

const std::string kCli = ARVDM_CLI_PATH;
const std::string kData = ARVDM_DATA_DIR;

struct RunResult {
  int exit_code;
  std::string output;
};

fs::path temp_dir() {
  static int counter = 0;
  fs::path dir = fs::temp_directory_path() /
                 ("arvdm_cli_test_" + std::to_string(::getpid()) + "_" +
                  std::to_string(counter++));
  fs::create_directories(dir);
  return dir;
}

RunResult run(const std::string& args) {
  const fs::path out = temp_dir() / "stdout.txt";
  const std::string cmd = kCli + " " + args + " > " + out.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  RunResult result;
  result.exit_code = WEXITSTATUS(status);
  std::ifstream in(out);
  std::ostringstream os;
  os << in.rdbuf();
  result.output = os.str();
  return result;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

const char* kSmallConfig = R"({
  "model": {"n_frames": 16, "frame_dim": 1, "rho": 0.9, "frame_var": 1.0},
  "ladder": {"kind": "canonical", "w": 4, "delta": 2, "T": "8"},
  "grid": {"kind": "uniform", "M_init": 16, "M_ar": 16},
  "K": 2,
  "policy": {"kind": "window", "m": 64},
  "oracle": {"kind": "exact"},
  "mode": "em",
  "seed": 7
})";

}  // namespace

TEST_CASE("validate exit codes" * doctest::timeout(60)) {
  CHECK(run("validate " + kData + "/fifo-w4.ladder").exit_code == 0);

  RunResult broken = run("validate " + kData + "/broken-monotone.ladder");
  CHECK(broken.exit_code == 1);
  CHECK(broken.output.find("MONOTONICITY") != std::string::npos);

  CHECK(run("validate " + kData + "/does-not-exist.ladder").exit_code == 2);
}

TEST_CASE("decompose default config zeroes the bottleneck under full past" *
          doctest::timeout(120)) {
  const fs::path dir = temp_dir();
  write(dir / "config.json", kSmallConfig);
  RunResult r = run("decompose --config " + (dir / "config.json").string() +
                    " --out " + dir.string());
  CHECK(r.exit_code == 0);
  const std::string json = slurp(dir / "report.json");
  CHECK(json.find("measured_joint_kl") != std::string::npos);

  arvdm::CsvTable table = arvdm::CsvTable::parse(slurp(dir / "report.csv"));
  const int mb_col = table.column_index("mb_total");
  REQUIRE(mb_col >= 0);
  CHECK(table.rows[0][mb_col] <= 1e-9);
}

TEST_CASE("decompose rerun is byte-identical" * doctest::timeout(120)) {
  const fs::path dir1 = temp_dir(), dir2 = temp_dir();
  write(dir1 / "config.json", kSmallConfig);
  CHECK(run("decompose --config " + (dir1 / "config.json").string() + " --out " +
            dir1.string()).exit_code == 0);
  CHECK(run("decompose --config " + (dir1 / "config.json").string() + " --out " +
            dir2.string()).exit_code == 0);
  CHECK(slurp(dir1 / "report.json") == slurp(dir2 / "report.json"));
  CHECK(slurp(dir1 / "report.csv") == slurp(dir2 / "report.csv"));
}

TEST_CASE("decompose sweep over the AR grid shrinks the measured KL" *
          doctest::timeout(300)) {
  const fs::path dir = temp_dir();
  std::string config(kSmallConfig);
  config.insert(config.rfind('}'), R"(,
  "sweep": {"axis": "M_ar", "values": [16, 32, 64, 128, 256]})");
  write(dir / "config.json", config);
  RunResult r = run("decompose --config " + (dir / "config.json").string() +
                    " --out " + dir.string() + " --threads 4");
  CHECK(r.exit_code == 0);
  arvdm::CsvTable table = arvdm::CsvTable::parse(slurp(dir / "report.csv"));
  REQUIRE(table.rows.size() == 5);
  const int kl_col = table.column_index("measured_joint_kl");
  for (std::size_t i = 1; i < table.rows.size(); ++i)
    CHECK(table.rows[i][kl_col] < table.rows[i - 1][kl_col]);
}

TEST_CASE("decompose sweep over the reference window is non-increasing" *
          doctest::timeout(300)) {
  const fs::path dir = temp_dir();
  std::string config(kSmallConfig);
  config.insert(config.rfind('}'), R"(,
  "sweep": {"axis": "window_m", "values": [0, 1, 2, 3, 4]})");
  write(dir / "config.json", config);
  RunResult r = run("decompose --config " + (dir / "config.json").string() +
                    " --out " + dir.string());
  CHECK(r.exit_code == 0);
  arvdm::CsvTable table = arvdm::CsvTable::parse(slurp(dir / "report.csv"));
  const int mb_col = table.column_index("mb_total");
  for (std::size_t i = 1; i < table.rows.size(); ++i)
    CHECK(table.rows[i][mb_col] <= table.rows[i - 1][mb_col] + 1e-9);
  CHECK(table.rows[0][mb_col] > 1e-3);
}

TEST_CASE("lowerbound command" * doctest::timeout(120)) {
  const fs::path dir = temp_dir();
  RunResult r = run("lowerbound --s 0.5 --n 10000 --trials 100 --seed 7 --out " +
                    dir.string());
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("minimax_fraction") != std::string::npos);
  CHECK(r.output.find("eps") != std::string::npos);

  RunResult again = run("lowerbound --s 0.5 --n 10000 --trials 100 --seed 7");
  CHECK(again.output == r.output);

  RunResult one = run("lowerbound --s 1.0 --n 100 --trials 5 --seed 3");
  CHECK(one.exit_code == 0);
  CHECK(one.output.find("eps = 0") != std::string::npos);

  CHECK(run("lowerbound --s 1.5").exit_code == 1);
}

TEST_CASE("plot renders deterministic SVG and rejects empty CSV" *
          doctest::timeout(60)) {
  const fs::path dir = temp_dir();
  write(dir / "data.csv", "m,kl,bound\n32,0.5,1.0\n64,0.25,0.5\n128,0.12,0.25\n");
  const std::string base = "plot --csv " + (dir / "data.csv").string() +
                           " --x m --y kl,bound --log-y --title trend --out ";
  CHECK(run(base + (dir / "a.svg").string()).exit_code == 0);
  CHECK(run(base + (dir / "b.svg").string()).exit_code == 0);
  const std::string svg = slurp(dir / "a.svg");
  CHECK(svg == slurp(dir / "b.svg"));
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("polyline") != std::string::npos);

  write(dir / "empty.csv", "m,kl\n");
  CHECK(run("plot --csv " + (dir / "empty.csv").string() +
            " --x m --y kl --out " + (dir / "c.svg").string()).exit_code == 2);
}

TEST_CASE("sample command is deterministic" * doctest::timeout(120)) {
  const fs::path dir = temp_dir();
  write(dir / "config.json", kSmallConfig);
  const std::string base = "sample --config " + (dir / "config.json").string() +
                           " --paths 200 --seed 11 --out ";
  CHECK(run(base + (dir / "a.csv").string()).exit_code == 0);
  CHECK(run(base + (dir / "b.csv").string()).exit_code == 0);
  CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));

  arvdm::CsvTable table = arvdm::CsvTable::parse(slurp(dir / "a.csv"));
  CHECK(table.columns.size() == 4);  // K * delta clean frames
  CHECK(table.rows.size() == 200);
}
