#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "aniso/study.hpp"

using namespace aniso;
namespace fs = std::filesystem;

namespace {

const char* kBaseConfig =
    "family = squared_exponential\n"
    "variance = 1.0\n"
    "length_scale = 1.0\n"
    "lambda1 = 1.0\n"
    "lambda = 0.5\n"
    "basis_angle = 0.3\n"
    "vstar_x = 1.0\n"
    "vstar_y = 0.0\n"
    "n_list = 5\n"
    "h = 0.25\n"
    "u = 0.0\n"
    "q = 3\n"
    "replicates = 8\n"
    "seed = 42\n"
    "alpha = 0.05\n";

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(ANISO_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("aniso_cli_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static int counter() {
    static int c = 0;
    return c++;
  }
};

}  // namespace

TEST_CASE("config parsing: defaults, overrides, error messages") {
  const StudyConfig c = StudyConfig::from_string(kBaseConfig);
  CHECK(c.model.lambda == 0.5);
  CHECK(c.n_list == std::vector<int>{5});
  CHECK(c.chaos_order == 3);

  std::string missing = kBaseConfig;
  missing.erase(missing.find("lambda1 = 1.0\n"), 14);
  try {
    StudyConfig::from_string(missing);
    FAIL("expected a missing-key error");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("lambda1") != std::string::npos);
  }
  CHECK_THROWS_AS(StudyConfig::from_string("not a config\n"),
                  std::invalid_argument);
  CHECK_THROWS_AS(StudyConfig::from_string(std::string(kBaseConfig) +
                                           "replicates = 0\n"),
                  std::invalid_argument);
}

TEST_CASE("library runs are deterministic across thread counts") {
  StudyConfig one = StudyConfig::from_string(kBaseConfig);
  StudyConfig four = one;
  one.threads = 1;
  four.threads = 4;
  const std::string csv1 = estimate_csv(run_estimates(one), one.u);
  const std::string csv4 = estimate_csv(run_estimates(four), four.u);
  CHECK(csv1 == csv4);
  const std::string study1 = study_csv(run_study(one));
  const std::string study4 = study_csv(run_study(four));
  CHECK(study1 == study4);
  CHECK(study1.find("# schema=1") == 0);
}

TEST_CASE("cli exit codes and outputs") {
  TempDir dir;
  const fs::path config_path = dir.path / "config.txt";
  std::ofstream(config_path) << kBaseConfig;

  SUBCASE("missing config file") {
    CHECK(run_cli("estimate --config /nonexistent.cfg --out " +
                  (dir.path / "o").string()) == 1);
  }
  SUBCASE("bad usage") {
    CHECK(run_cli("") == 1);
    CHECK(run_cli("estimate") == 1);
  }
  SUBCASE("estimate, determinism and field round trip") {
    const fs::path out1 = dir.path / "out1";
    const fs::path out2 = dir.path / "out2";
    CHECK(run_cli("estimate --config " + config_path.string() + " --out " +
                  out1.string()) == 0);
    CHECK(run_cli("estimate --config " + config_path.string() + " --out " +
                  out2.string()) == 0);
    const std::string a = slurp(out1 / "estimate.csv");
    CHECK(a == slurp(out2 / "estimate.csv"));
    CHECK(a.find("# schema=1") == 0);

    // export one field, re-estimate from the file, compare the first row
    const fs::path fields = dir.path / "fields";
    std::string one_rep = kBaseConfig;
    one_rep.replace(one_rep.find("replicates = 8"), 14, "replicates = 1");
    const fs::path config1 = dir.path / "config1.txt";
    std::ofstream(config1) << one_rep;
    CHECK(run_cli("simulate --config " + config1.string() + " --out " +
                  fields.string()) == 0);
    const fs::path out3 = dir.path / "out3";
    CHECK(run_cli("estimate --config " + config1.string() + " --field " +
                  (fields / "field_n5_r0.grf2").string() + " --out " +
                  out3.string()) == 0);
    std::istringstream direct(slurp(out1 / "estimate.csv"));
    std::istringstream via_file(slurp(out3 / "estimate.csv"));
    std::string row_a, row_b;
    for (int i = 0; i < 3; ++i) std::getline(direct, row_a);
    for (int i = 0; i < 3; ++i) std::getline(via_file, row_b);
    CHECK(row_a == row_b);
  }
  SUBCASE("empty level set propagates exit code 2") {
    std::string high = kBaseConfig;
    high.replace(high.find("u = 0.0"), 7, "u = 50.");
    const fs::path config_high = dir.path / "high.txt";
    std::ofstream(config_high) << high;
    CHECK(run_cli("estimate --config " + config_high.string() + " --out " +
                  (dir.path / "oh").string()) == 2);
    CHECK(run_cli("test --config " + config_high.string() + " --out " +
                  (dir.path / "oh2").string()) == 2);
  }
  SUBCASE("test command echoes alpha and writes a summary") {
    const fs::path out = dir.path / "t";
    CHECK(run_cli("test --config " + config_path.string() + " --out " +
                  out.string()) == 0);
    const std::string csv = slurp(out / "test.csv");
    CHECK(csv.find("alpha") != std::string::npos);
    CHECK(csv.find("# rejection_rate n=5") != std::string::npos);
    // alpha appears in every data row
    std::istringstream is(csv);
    std::string line;
    int data_rows = 0;
    while (std::getline(is, line)) {
      if (line.empty() || line[0] == '#' || line.rfind("n,", 0) == 0) continue;
      CHECK(line.find(",0.05") != std::string::npos);
      ++data_rows;
    }
    CHECK(data_rows == 8);
  }
  SUBCASE("curves and coeffs dumps") {
    const fs::path out = dir.path / "c";
    CHECK(run_cli("curves --config " + config_path.string() + " --out " +
                  out.string()) == 0);
    CHECK(slurp(out / "curves.csv").find("x0,y0") != std::string::npos);
    CHECK(run_cli("coeffs --config " + config_path.string() + " --out " +
                  out.string()) == 0);
    CHECK(slurp(out / "coeffs.csv").find("k1,k2,k3") != std::string::npos);
  }
  SUBCASE("study produces csv and svg plots") {
    const fs::path out = dir.path / "s";
    CHECK(run_cli("study --config " + config_path.string() + " --out " +
                  out.string()) == 0);
    CHECK(slurp(out / "study.csv").find("rmse_lambda") != std::string::npos);
    CHECK(slurp(out / "rmse.svg").find("<svg") != std::string::npos);
    CHECK(slurp(out / "rejection.svg").find("polyline") != std::string::npos);
    CHECK(slurp(out / "smoothing.svg").find("polyline") != std::string::npos);
  }
}

TEST_CASE("study summary: rmse shrinks with the window") {
  std::string text = kBaseConfig;
  text.replace(text.find("n_list = 5"), 10, "n_list = 5,10");
  StudyConfig config = StudyConfig::from_string(text);
  config.replicates = 60;
  config.threads = 4;
  const std::vector<StudySummary> rows = run_study(config);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].n == 5);
  CHECK(rows[1].rmse_lambda <= rows[0].rmse_lambda);
  CHECK(rows[1].crossings > 50);
  CHECK(rows[0].ks_clt > 0.0);
}

TEST_CASE("svg writer basic structure") {
  const std::string svg =
      svg_line_plot({1, 2, 3}, {{0.1, 0.2, 0.3}}, {"series"}, "title");
  CHECK(svg.find("<svg") == 0);
  CHECK(svg.find("polyline") != std::string::npos);
  CHECK(svg.find("title") != std::string::npos);
}
