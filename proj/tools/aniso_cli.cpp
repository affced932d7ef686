// Command-line front end: simulation, estimation, isotropy testing and
// Monte Carlo studies for level-curve anisotropy analysis.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "aniso/estimator.hpp"
#include "aniso/rng.hpp"
#include "aniso/study.hpp"

namespace fs = std::filesystem;
using namespace aniso;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNoCrossing = 2;

struct CommonArgs {
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
};

StudyConfig load_config(const CommonArgs& args) {
  StudyConfig config = StudyConfig::from_file(args.config_path);
  if (args.seed) config.seed = *args.seed;
  if (args.threads) config.threads = *args.threads;
  return config;
}

void write_file(const fs::path& path, const std::string& text) {
  if (!path.parent_path().empty()) fs::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << text;
}

void add_common(CLI::App* cmd, CommonArgs& args, bool config_required = true) {
  auto* opt = cmd->add_option("--config", args.config_path, "config file");
  if (config_required) opt->required();
  cmd->add_option("--out", args.out_dir, "output directory");
  cmd->add_option("--seed", args.seed, "override base seed");
  cmd->add_option("--threads", args.threads, "worker threads");
}

int cmd_simulate(const CommonArgs& args) {
  const StudyConfig config = load_config(args);
  fs::create_directories(args.out_dir);
  for (int n : config.n_list) {
    const CirculantEmbedding embedding(config.cov, config.model, n, config.h);
    for (int r = 0; r < config.replicates; ++r) {
      const GridField field = embedding.sample(replicate_seed(config.seed, r));
      std::ostringstream name;
      name << "field_n" << n << "_r" << r << ".grf2";
      field.save((fs::path(args.out_dir) / name.str()).string());
    }
  }
  std::cout << "wrote " << config.n_list.size() * config.replicates
            << " field files to " << args.out_dir << "\n";
  return kExitOk;
}

// Stack built at the fitted model, for the optional confidence regions.
void attach_ci(EstimateResult& result, const FunctionalTriple& triple,
               const StudyConfig& config, int n) {
  if (result.kind != EstimateCase::Interior) return;
  const double l1 = estimate_lambda1(triple.j_one, config.u, result.lambda_hat,
                                     config.cov);
  const AffineModel fitted = AffineModel::from_estimate(
      l1, result.lambda_hat, result.theta_hat.value(), config.model.vstar);
  const CovarianceStack stack =
      build_stack(config.u, config.cov, fitted, config.chaos_order);
  confidence_region(result, stack, n, config.alpha);
}

int cmd_estimate(const CommonArgs& args, const std::string& field_path,
                 bool with_ci) {
  std::vector<EstimateRow> rows;
  StudyConfig config;
  if (!args.config_path.empty()) config = load_config(args);
  if (!field_path.empty()) {
    const GridField field = GridField::load(field_path);
    EstimateRow row;
    row.n = field.half_width;
    const auto triple = functional_triple(field, config.u, config.model.vstar);
    if (!triple) {
      row.no_crossing = true;
    } else {
      row.result = estimate(triple->x_n, triple->y_n);
      row.result.n = field.half_width;
      if (with_ci) attach_ci(row.result, *triple, config, field.half_width);
    }
    rows.push_back(row);
  } else {
    rows = run_estimates(config);
    if (with_ci) {
      for (EstimateRow& row : rows) {
        if (row.no_crossing || row.result.kind != EstimateCase::Interior)
          continue;
        const GridField field =
            CirculantEmbedding(config.cov, config.model, row.n, config.h)
                .sample(replicate_seed(config.seed, row.replicate));
        const auto triple =
            functional_triple(field, config.u, config.model.vstar);
        attach_ci(row.result, *triple, config, row.n);
      }
    }
  }
  write_file(fs::path(args.out_dir) / "estimate.csv",
             estimate_csv(rows, config.u));
  bool any_crossing = false;
  for (const EstimateRow& r : rows) any_crossing |= !r.no_crossing;
  std::cout << "wrote " << rows.size() << " rows to "
            << (fs::path(args.out_dir) / "estimate.csv").string() << "\n";
  return any_crossing ? kExitOk : kExitNoCrossing;
}

int cmd_test(const CommonArgs& args) {
  const StudyConfig config = load_config(args);
  const std::vector<TestRow> rows = run_tests(config);
  write_file(fs::path(args.out_dir) / "test.csv",
             test_csv(rows, config.u, config.alpha));
  bool any_crossing = false;
  for (const TestRow& r : rows) any_crossing |= !r.no_crossing;
  std::cout << "wrote " << rows.size() << " rows to "
            << (fs::path(args.out_dir) / "test.csv").string() << "\n";
  return any_crossing ? kExitOk : kExitNoCrossing;
}

int cmd_study(const CommonArgs& args) {
  const StudyConfig config = load_config(args);
  const std::vector<StudySummary> rows = run_study(config);
  write_file(fs::path(args.out_dir) / "study.csv", study_csv(rows));
  std::vector<double> xs, rmse_l, rmse_t, reject, ks, gap0, gap1, gap2;
  for (const StudySummary& s : rows) {
    xs.push_back(s.n);
    rmse_l.push_back(s.rmse_lambda);
    rmse_t.push_back(s.rmse_theta);
    reject.push_back(s.rejection_rate);
    ks.push_back(s.ks_clt);
    gap0.push_back(s.smooth_gap[0]);
    gap1.push_back(s.smooth_gap[1]);
    gap2.push_back(s.smooth_gap[2]);
  }
  write_file(fs::path(args.out_dir) / "rmse.svg",
             svg_line_plot(xs, {rmse_l, rmse_t}, {"rmse lambda", "rmse theta"},
                           "estimator RMSE vs n"));
  write_file(fs::path(args.out_dir) / "rejection.svg",
             svg_line_plot(xs, {reject, ks}, {"rejection rate", "KS distance"},
                           "test behaviour vs n"));
  write_file(fs::path(args.out_dir) / "smoothing.svg",
             svg_line_plot(xs, {gap0, gap1, gap2},
                           {"sigma=0.4", "sigma=0.2", "sigma=0.1"},
                           "|J(u,sigma) - J(u)| vs n"));
  std::cout << "wrote study outputs to " << args.out_dir << "\n";
  return kExitOk;
}

int cmd_curves(const CommonArgs& args) {
  const StudyConfig config = load_config(args);
  const int n = config.n_list.front();
  const GridField field = sample_field(config.cov, config.model, n, config.h,
                                       replicate_seed(config.seed, 0));
  const LevelCurve curve = extract_level_curve(field, config.u);
  std::ostringstream os;
  curve.write_csv(os);
  write_file(fs::path(args.out_dir) / "curves.csv", os.str());
  std::cout << "wrote " << curve.segments.size() << " segments to "
            << (fs::path(args.out_dir) / "curves.csv").string() << "\n";
  return curve.empty() ? kExitNoCrossing : kExitOk;
}

int cmd_coeffs(const CommonArgs& args) {
  const StudyConfig config = load_config(args);
  const CoefficientTable table =
      build_table(config.model, config.cov, config.u, config.chaos_order);
  std::ostringstream os;
  table.write_csv(os);
  write_file(fs::path(args.out_dir) / "coeffs.csv", os.str());
  std::cout << "wrote " << table.entries.size() << " coefficients to "
            << (fs::path(args.out_dir) / "coeffs.csv").string() << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"anisotropy estimation from level curves of Gaussian fields"};
  app.require_subcommand(1);

  CommonArgs sim_args, est_args, test_args, study_args, curves_args, coeffs_args;
  std::string field_path;
  bool with_ci = false;

  add_common(app.add_subcommand("simulate", "sample fields to .grf2 files"),
             sim_args);
  auto* est = app.add_subcommand("estimate", "estimate (lambda, theta_o)");
  add_common(est, est_args, false);
  est->add_option("--field", field_path, "estimate from an exported field file");
  est->add_flag("--ci", with_ci, "attach confidence regions");
  add_common(app.add_subcommand("test", "chi-square isotropy test"), test_args);
  add_common(app.add_subcommand("study", "Monte Carlo study with CSV + SVG"),
             study_args);
  add_common(app.add_subcommand("curves", "dump one extracted level curve"),
             curves_args);
  add_common(app.add_subcommand("coeffs", "dump the chaos coefficient table"),
             coeffs_args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (app.got_subcommand("simulate")) return cmd_simulate(sim_args);
    if (app.got_subcommand("estimate")) {
      if (est_args.config_path.empty() && field_path.empty()) {
        std::cerr << "estimate: need --config or --field\n";
        return kExitUsage;
      }
      return cmd_estimate(est_args, field_path, with_ci);
    }
    if (app.got_subcommand("test")) return cmd_test(test_args);
    if (app.got_subcommand("study")) return cmd_study(study_args);
    if (app.got_subcommand("curves")) return cmd_curves(curves_args);
    if (app.got_subcommand("coeffs")) return cmd_coeffs(coeffs_args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
