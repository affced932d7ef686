#include "aniso/study.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "aniso/rng.hpp"
#include "aniso/specialfn.hpp"

namespace aniso {

namespace {

std::map<std::string, std::string> parse_kv(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": empty key or value");
    kv[key] = value;
  }
  return kv;
}

const std::string& require(const std::map<std::string, std::string>& kv,
                           const std::string& key) {
  auto it = kv.find(key);
  if (it == kv.end())
    throw std::invalid_argument("config: missing required key '" + key + "'");
  return it->second;
}

double to_double(const std::string& s) {
  std::size_t pos = 0;
  const double v = std::stod(s, &pos);
  if (pos != s.size()) throw std::invalid_argument("config: bad number '" + s + "'");
  return v;
}

}  // namespace

StudyConfig StudyConfig::from_string(const std::string& text) {
  const auto kv = parse_kv(text);
  StudyConfig c;
  c.cov.family = cov_family_from_string(require(kv, "family"));
  c.cov.variance = to_double(require(kv, "variance"));
  c.cov.length_scale = to_double(require(kv, "length_scale"));
  c.model.lambda1 = to_double(require(kv, "lambda1"));
  c.model.lambda = to_double(require(kv, "lambda"));
  c.model.basis_angle = to_double(require(kv, "basis_angle"));
  if (kv.count("vstar_x") || kv.count("vstar_y")) {
    c.model.vstar = {to_double(require(kv, "vstar_x")),
                     to_double(require(kv, "vstar_y"))};
    c.model.vstar.normalize();
  }
  {
    std::istringstream ns(require(kv, "n_list"));
    std::string tok;
    while (std::getline(ns, tok, ','))
      c.n_list.push_back(static_cast<int>(to_double(tok)));
  }
  c.h = to_double(require(kv, "h"));
  c.u = to_double(require(kv, "u"));
  c.replicates = static_cast<int>(to_double(require(kv, "replicates")));
  c.seed = static_cast<std::uint64_t>(to_double(require(kv, "seed")));
  c.alpha = to_double(require(kv, "alpha"));
  if (kv.count("q")) c.chaos_order = static_cast<int>(to_double(kv.at("q")));
  if (kv.count("threads")) c.threads = static_cast<int>(to_double(kv.at("threads")));
  c.validate();
  return c;
}

StudyConfig StudyConfig::from_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::invalid_argument("config: cannot open " + path);
  std::ostringstream buf;
  buf << is.rdbuf();
  return from_string(buf.str());
}

void StudyConfig::validate() const {
  cov.validate();
  model.validate();
  if (n_list.empty())
    throw std::invalid_argument("config: n_list must not be empty");
  if (replicates < 1)
    throw std::invalid_argument("config: replicates must be >= 1");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("config: alpha must be in (0, 1)");
}

void parallel_for(int count, int threads, const std::function<void(int)>& body) {
  threads = std::max(1, std::min(threads, count));
  if (threads == 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::mutex error_mutex;
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= count) return;
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          return;
        }
      }
    });
  for (std::thread& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

double ks_distance(std::vector<double> sample,
                   const std::function<double(double)>& cdf) {
  std::sort(sample.begin(), sample.end());
  const double m = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max(d, std::abs(f - i / m));
    d = std::max(d, std::abs((i + 1) / m - f));
  }
  return d;
}

std::vector<EstimateRow> run_estimates(const StudyConfig& config) {
  config.validate();
  std::vector<EstimateRow> rows;
  for (int n : config.n_list) {
    const CirculantEmbedding embedding(config.cov, config.model, n, config.h);
    std::vector<EstimateRow> block(config.replicates);
    parallel_for(config.replicates, config.threads, [&](int r) {
      EstimateRow row;
      row.n = n;
      row.replicate = r;
      const GridField field =
          embedding.sample(replicate_seed(config.seed, r));
      const auto est = estimate_from_field(field, config.u, config.model.vstar);
      if (!est) {
        row.no_crossing = true;
      } else {
        row.result = *est;
        row.result.n = n;
      }
      block[r] = row;
    });
    rows.insert(rows.end(), block.begin(), block.end());
  }
  return rows;
}

std::vector<TestRow> run_tests(const StudyConfig& config) {
  config.validate();
  std::vector<TestRow> rows;
  // The null stack is built lazily: when every level set is empty the
  // (possibly degenerate) stack is never needed.
  IsoNullCache cache;
  for (int n : config.n_list) {
    const CirculantEmbedding embedding(config.cov, config.model, n, config.h);
    std::vector<TestRow> block(config.replicates);
    parallel_for(config.replicates, config.threads, [&](int r) {
      TestRow row;
      row.n = n;
      row.replicate = r;
      const GridField field =
          embedding.sample(replicate_seed(config.seed, r));
      const auto res = isotropy_test(field, config.u, config.model.vstar,
                                     config.cov, config.alpha,
                                     config.chaos_order, &cache);
      if (!res)
        row.no_crossing = true;
      else
        row.result = *res;
      block[r] = row;
    });
    rows.insert(rows.end(), block.begin(), block.end());
  }
  return rows;
}

std::vector<StudySummary> run_study(const StudyConfig& config) {
  config.validate();
  const double lambda_true = config.model.lambda;
  const double theta_true = config.model.theta_o();
  double clt_sd = 0.0;
  if (config.model.lambda < 1.0) {
    const CovarianceStack stack =
        build_stack(config.u, config.cov, config.model, config.chaos_order);
    clt_sd = std::sqrt(std::max((*stack.sigma_param)(0, 0), 1e-300));
  }
  IsoNullCache cache;
  const double sigmas[3] = {0.4, 0.2, 0.1};

  std::vector<StudySummary> out;
  for (int n : config.n_list) {
    const CirculantEmbedding embedding(config.cov, config.model, n, config.h);
    struct RepResult {
      bool ok = false;
      double lambda_hat = 0.0, theta_hat = 0.0;
      bool reject = false;
      double gap[3] = {0.0, 0.0, 0.0};
    };
    std::vector<RepResult> reps(config.replicates);
    parallel_for(config.replicates, config.threads, [&](int r) {
      RepResult& rr = reps[r];
      const GridField field =
          embedding.sample(replicate_seed(config.seed, r));
      const auto triple = functional_triple(field, config.u, config.model.vstar);
      if (!triple) return;
      const EstimateResult est = estimate(triple->x_n, triple->y_n);
      rr.ok = true;
      rr.lambda_hat = est.lambda_hat;
      rr.theta_hat = est.theta_hat.value_or(theta_true);
      const IsoNullStack& null_stack =
          cache.get(config.cov, config.u, config.chaos_order, config.model.vstar);
      const Eigen::Vector2d t = statistic_T(*triple, config.model.vstar, n);
      const double tau = estimate_tau(triple->j_one, config.u, config.cov);
      rr.reject = statistic_Xi(t, tau, null_stack, config.alpha, n).reject;
      const double exact = triple->j_one;
      for (int s = 0; s < 3; ++s) {
        const double sm = smoothed_functional(
            field, config.u, sigmas[s],
            [](const Eigen::Vector2d&) { return 1.0; });
        rr.gap[s] = std::abs(sm - exact);
      }
    });

    StudySummary sum;
    sum.n = n;
    std::vector<double> lambda_errs, abs_errs, standardized;
    for (const RepResult& rr : reps) {
      if (!rr.ok) continue;
      ++sum.crossings;
      const double le = rr.lambda_hat - lambda_true;
      const double te = rr.theta_hat - theta_true;
      lambda_errs.push_back(le);
      abs_errs.push_back(std::abs(le));
      sum.bias_lambda += le;
      sum.rmse_lambda += le * le;
      sum.bias_theta += te;
      sum.rmse_theta += te * te;
      sum.rejection_rate += rr.reject ? 1.0 : 0.0;
      if (clt_sd > 0.0) standardized.push_back(2.0 * n * le / clt_sd);
      for (int s = 0; s < 3; ++s) sum.smooth_gap[s] += rr.gap[s];
    }
    const double m = std::max(1, sum.crossings);
    sum.bias_lambda /= m;
    sum.rmse_lambda = std::sqrt(sum.rmse_lambda / m);
    sum.bias_theta /= m;
    sum.rmse_theta = std::sqrt(sum.rmse_theta / m);
    sum.rejection_rate /= m;
    for (int s = 0; s < 3; ++s) sum.smooth_gap[s] /= m;
    if (!abs_errs.empty()) {
      std::sort(abs_errs.begin(), abs_errs.end());
      sum.median_abs_lambda_err = abs_errs[abs_errs.size() / 2];
    }
    if (!standardized.empty())
      sum.ks_clt = ks_distance(standardized,
                               [](double x) { return std_normal_cdf(x); });
    out.push_back(sum);
  }
  return out;
}

namespace {

std::ostream& full_precision(std::ostream& os) {
  os.precision(17);
  return os;
}

const char* case_name(EstimateCase kind) {
  switch (kind) {
    case EstimateCase::Interior: return "interior";
    case EstimateCase::AxisYzeroXlarge: return "axis";
    case EstimateCase::Isotropic: return "isotropic";
  }
  return "?";
}

}  // namespace

std::string estimate_csv(const std::vector<EstimateRow>& rows, double u) {
  std::ostringstream os;
  full_precision(os);
  os << "# schema=1\n";
  os << "n,replicate,u,x_n,y_n,lambda_hat,theta_hat,case,lambda_lo,lambda_hi,"
        "theta_lo,theta_hi\n";
  for (const EstimateRow& r : rows) {
    if (r.no_crossing) {
      os << r.n << ',' << r.replicate << ',' << u << ",,,,,no_crossing,,,,\n";
      continue;
    }
    os << r.n << ',' << r.replicate << ',' << u << ',' << r.result.x_n << ','
       << r.result.y_n << ',' << r.result.lambda_hat << ',';
    if (r.result.theta_hat) os << *r.result.theta_hat;
    os << ',' << case_name(r.result.kind) << ',';
    if (r.result.ci)
      os << r.result.ci->lambda_lo << ',' << r.result.ci->lambda_hi << ','
         << r.result.ci->theta_lo << ',' << r.result.ci->theta_hi;
    else
      os << ",,,";
    os << '\n';
  }
  return os.str();
}

std::string test_csv(const std::vector<TestRow>& rows, double u, double alpha) {
  std::ostringstream os;
  full_precision(os);
  os << "# schema=1\n";
  os << "n,replicate,u,alpha,xi,p_value,reject,tau_hat\n";
  std::map<int, std::pair<int, int>> rate;  // n -> (rejections, crossings)
  for (const TestRow& r : rows) {
    if (r.no_crossing) {
      os << r.n << ',' << r.replicate << ',' << u << ',' << alpha
         << ",,,no_crossing,\n";
      continue;
    }
    os << r.n << ',' << r.replicate << ',' << u << ',' << alpha << ','
       << r.result.xi << ',' << r.result.p_value << ','
       << (r.result.reject ? 1 : 0) << ',' << r.result.tau_hat << '\n';
    rate[r.n].second += 1;
    rate[r.n].first += r.result.reject ? 1 : 0;
  }
  for (const auto& [n, rc] : rate)
    os << "# rejection_rate n=" << n << " rate="
       << (rc.second ? static_cast<double>(rc.first) / rc.second : 0.0)
       << " crossings=" << rc.second << '\n';
  return os.str();
}

std::string study_csv(const std::vector<StudySummary>& rows) {
  std::ostringstream os;
  full_precision(os);
  os << "# schema=1\n";
  os << "n,crossings,bias_lambda,rmse_lambda,bias_theta,rmse_theta,"
        "median_abs_lambda_err,rejection_rate,ks_clt,"
        "smooth_gap_0.4,smooth_gap_0.2,smooth_gap_0.1\n";
  for (const StudySummary& s : rows)
    os << s.n << ',' << s.crossings << ',' << s.bias_lambda << ','
       << s.rmse_lambda << ',' << s.bias_theta << ',' << s.rmse_theta << ','
       << s.median_abs_lambda_err << ',' << s.rejection_rate << ',' << s.ks_clt
       << ',' << s.smooth_gap[0] << ',' << s.smooth_gap[1] << ','
       << s.smooth_gap[2] << '\n';
  return os.str();
}

std::string svg_line_plot(const std::vector<double>& x,
                          const std::vector<std::vector<double>>& series,
                          const std::vector<std::string>& labels,
                          const std::string& title) {
  const int w = 640, h = 420, ml = 60, mb = 40, mt = 30, mr = 20;
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (double v : x) {
    xmin = std::min(xmin, v);
    xmax = std::max(xmax, v);
  }
  for (const auto& s : series)
    for (double v : s) {
      ymin = std::min(ymin, v);
      ymax = std::max(ymax, v);
    }
  if (!(xmax > xmin)) xmax = xmin + 1.0;
  if (!(ymax > ymin)) ymax = ymin + 1.0;
  auto px = [&](double v) {
    return ml + (v - xmin) / (xmax - xmin) * (w - ml - mr);
  };
  auto py = [&](double v) {
    return h - mb - (v - ymin) / (ymax - ymin) * (h - mb - mt);
  };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};
  std::ostringstream os;
  os.precision(6);
  os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << w << "' height='"
     << h << "'>\n";
  os << "<rect width='100%' height='100%' fill='white'/>\n";
  os << "<text x='" << w / 2 << "' y='18' text-anchor='middle' font-size='14'>"
     << title << "</text>\n";
  os << "<line x1='" << ml << "' y1='" << h - mb << "' x2='" << w - mr
     << "' y2='" << h - mb << "' stroke='black'/>\n";
  os << "<line x1='" << ml << "' y1='" << mt << "' x2='" << ml << "' y2='"
     << h - mb << "' stroke='black'/>\n";
  os << "<text x='" << ml << "' y='" << h - mb + 16 << "' font-size='11'>"
     << xmin << "</text>\n";
  os << "<text x='" << w - mr - 20 << "' y='" << h - mb + 16
     << "' font-size='11'>" << xmax << "</text>\n";
  os << "<text x='4' y='" << h - mb << "' font-size='11'>" << ymin
     << "</text>\n";
  os << "<text x='4' y='" << mt + 8 << "' font-size='11'>" << ymax
     << "</text>\n";
  for (std::size_t s = 0; s < series.size(); ++s) {
    os << "<polyline fill='none' stroke='" << colors[s % 4]
       << "' stroke-width='1.5' points='";
    for (std::size_t i = 0; i < x.size() && i < series[s].size(); ++i)
      os << px(x[i]) << ',' << py(series[s][i]) << ' ';
    os << "'/>\n";
    if (s < labels.size())
      os << "<text x='" << w - mr - 150 << "' y='" << mt + 16 * (s + 1)
         << "' font-size='12' fill='" << colors[s % 4] << "'>" << labels[s]
         << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace aniso
