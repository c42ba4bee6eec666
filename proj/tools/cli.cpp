#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <openssl/evp.h>

#include <CLI11.hpp>

#include "meanfield/amp.hpp"
#include "meanfield/ensembles.hpp"
#include "meanfield/hamiltonian.hpp"
#include "meanfield/iamp.hpp"
#include "meanfield/parallel.hpp"
#include "meanfield/parisi.hpp"
#include "meanfield/sparse_mp.hpp"
#include "meanfield/spiked.hpp"

#ifndef MEANFIELD_VERSION
#define MEANFIELD_VERSION "0.0.0"
#endif

namespace mfsg {

using mf::ErrorKind;
using mf::require;

namespace {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string cell(const json& v) {
  if (v.is_boolean()) return v.get<bool>() ? "1" : "0";
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number_unsigned()) return std::to_string(v.get<unsigned long long>());
  if (v.is_number_float()) return format_double(v.get<double>());
  if (v.is_string()) return v.get<std::string>();
  if (v.is_null()) return "";
  return v.dump();
}

// JSON cannot hold NaN; store it as null.
json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::vector<double> parse_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      require(item.find_first_not_of(" \t", used) == std::string::npos, ErrorKind::usage, "");
    } catch (const std::exception&) {
      mf::fail(ErrorKind::usage, "cannot parse '" + item + "' in " + what);
    }
  }
  require(!out.empty(), ErrorKind::usage, what + " must list at least one number");
  return out;
}

struct Stats {
  double mean = 0.0;
  double stderr_ = 0.0;
};

Stats stats(const std::vector<double>& v) {
  Stats s;
  if (v.empty()) return s;
  for (double x : v) s.mean += x;
  s.mean /= static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - s.mean) * (x - s.mean);
    s.stderr_ = std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
  }
  return s;
}

json stats_json(const std::vector<double>& v) {
  const Stats s = stats(v);
  return json{{"mean", num(s.mean)}, {"stderr", num(s.stderr_)}, {"count", v.size()}};
}

mf::Seed rep_seed(const ExperimentConfig& c, int rep) { return mf::Seed{c.seed, c.command}.child(static_cast<std::uint64_t>(rep)); }

bool is_sk(const mf::MixingPolynomial& mix) {
  const auto deg = mix.active_degrees();
  return deg.size() == 1 && deg[0] == 2 && mix.coefficient(2) == 0.5;
}

mf::MixingPolynomial mixing_of(const ExperimentConfig& c) { return mf::MixingPolynomial::parse(c.params["xi"].get<std::string>()); }

std::string fixed(double v, int digits = 6) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

mf::SymmetricMatrix read_matrix(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorKind::usage, "cannot open matrix file '" + path + "'");
  std::vector<double> v;
  double x;
  while (in >> x) v.push_back(x);
  require(in.eof(), ErrorKind::invalid_input, "matrix file '" + path + "' holds a non-numeric token");
  const int n = static_cast<int>(std::lround(std::sqrt(static_cast<double>(v.size()))));
  require(n >= 1 && static_cast<std::size_t>(n) * n == v.size(), ErrorKind::invalid_input,
          "matrix file must hold n*n numbers");
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = v[static_cast<std::size_t>(i) * n + j];
  return mf::SymmetricMatrix(std::move(a));
}

Eigen::MatrixXd read_table(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorKind::usage, "cannot open schedule table '" + path + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    std::vector<double> r;
    double x;
    while (ls >> x) r.push_back(x);
    if (!r.empty()) rows.push_back(std::move(r));
  }
  require(!rows.empty(), ErrorKind::invalid_input, "schedule table is empty");
  const std::size_t cols = rows.front().size();
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    require(rows[i].size() == cols, ErrorKind::invalid_input, "schedule table rows differ in length");
    for (std::size_t j = 0; j < cols; ++j) t(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  }
  return t;
}

}  // namespace

// ---------------------------------------------------------------- config

const std::vector<std::string>& commands() {
  static const std::vector<std::string> names{"parisi", "iamp", "spiked", "amp-se", "bp", "oracle"};
  return names;
}

json default_params(const std::string& command) {
  if (command == "parisi")
    return json{{"xi", "0.5:2"},     {"boundary", "ising"}, {"rsb", 3},     {"grid", 2048},
                {"nodes", 64},       {"restarts", 5},       {"max_evals", 2000}, {"dump_stride", 0}};
  if (command == "iamp")
    return json{{"n", 4000},      {"delta", 0.025},  {"control", "spherical"}, {"xi", "0.5:2"},
                {"rsb", 3},       {"grid", 2048},    {"baseline", true},       {"se_samples", 20000}};
  if (command == "spiked")
    return json{{"lambda_grid", "0.5,1,1.5,2"}, {"prior", "rademacher"}, {"n", 2000}, {"steps", 10}};
  if (command == "amp-se")
    return json{{"schedule", "tanh"}, {"gain", 1.0}, {"table", ""},  {"n", 10000},
                {"steps", 8},         {"onsager", true}, {"mc", 100000}};
  if (command == "bp")
    return json{{"model", ""},     {"tree_n", 10}, {"alphabet", 3},  {"max_degree", 0}, {"scale", 1.0},
                {"max_iters", 100}, {"tol", 1e-12}, {"damping", 0.0}, {"exact", true}};
  if (command == "oracle") return json{{"n", 12}, {"beta", "1,2,4"}, {"xi", "0.5:2"}, {"matrix", ""}};
  mf::fail(ErrorKind::usage, "unknown command '" + command + "'");
}

std::string csv_help(const std::string& command) {
  if (command == "parisi") return "metrics.csv: rep,value,correction,phi00,closed_form,evaluations; levels.csv: level,value; profile.csv: interval,t_start,t_end,gamma,terminal_scale";
  if (command == "iamp") return "metrics.csv: rep,energy_m,energy_rounded,rounding_change,spectral_energy,max_orthogonality,max_increment_error,final_norm,flagged; trajectory.csv: rep,step,t,energy,second_moment";
  if (command == "spiked") return "metrics.csv: rep,lambda,overlap,predicted; thresholds.csv: lambda,gamma_alg,gamma_bayes,rho_alg,rho_bayes,indeterminate,overlap_mean,overlap_stderr";
  if (command == "amp-se") return "metrics.csv: rep,max_gram_deviation; gram.csv: rep,step,max_deviation; compare.csv: rep,test,step,empirical,predicted,stderr";
  if (command == "bp") return "metrics.csv: rep,n,edges,iterations,converged,last_change,max_error; beliefs_<rep>.csv: vertex,p0..";
  if (command == "oracle") return "metrics.csv: rep,beta,opt,free_energy,phi_over_beta,gap,bound,holds";
  return "";
}

json ExperimentConfig::to_json() const {
  json j{{"command", command}, {"seed", seed}, {"seeds", repetitions}, {"out", out}};
  for (const auto& [k, v] : params.items()) j[k] = v;
  return j;
}

std::string ExperimentConfig::to_text() const { return to_json().dump(2) + "\n"; }

ExperimentConfig ExperimentConfig::from_json(const json& doc) {
  require(doc.is_object(), ErrorKind::usage, "config must be a JSON object");
  require(doc.contains("command") && doc["command"].is_string(), ErrorKind::usage, "config needs a string 'command'");
  ExperimentConfig c;
  c.command = doc["command"].get<std::string>();
  c.params = default_params(c.command);
  for (const auto& [k, v] : doc.items()) {
    if (k == "command") continue;
    if (k == "seed") {
      require(v.is_number_unsigned() || (v.is_number_integer() && v.get<long long>() >= 0), ErrorKind::usage,
              "'seed' must be a nonnegative integer");
      c.seed = v.get<std::uint64_t>();
    } else if (k == "seeds") {
      require(v.is_number_integer() && v.get<long long>() >= 1, ErrorKind::usage, "'seeds' must be an integer >= 1");
      c.repetitions = v.get<int>();
    } else if (k == "out") {
      require(v.is_string(), ErrorKind::usage, "'out' must be a string");
      c.out = v.get<std::string>();
    } else {
      require(c.params.contains(k), ErrorKind::usage, "unknown key '" + k + "' for command " + c.command);
      const json& def = c.params[k];
      const bool ok = (def.is_string() && v.is_string()) || (def.is_boolean() && v.is_boolean()) ||
                      (def.is_number_integer() && v.is_number_integer()) ||
                      (def.is_number_float() && v.is_number());
      require(ok, ErrorKind::usage, "key '" + k + "' has the wrong type");
      c.params[k] = def.is_number_float() ? json(v.get<double>()) : v;
    }
  }
  return c;
}

ExperimentConfig ExperimentConfig::from_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    mf::fail(ErrorKind::usage, std::string("config is not valid JSON: ") + e.what());
  }
  return from_json(doc);
}

std::string Table::to_csv() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << columns[i];
  os << '\n';
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << cell(r[i]);
    os << '\n';
  }
  return os.str();
}

json RunReport::to_json() const {
  json rows = json::array();
  for (const auto& r : metrics.rows) {
    json o = json::object();
    for (std::size_t i = 0; i < r.size() && i < metrics.columns.size(); ++i) o[metrics.columns[i]] = r[i];
    rows.push_back(std::move(o));
  }
  return json{{"config", config.to_json()},
              {"version", version},
              {"input_hash", input_hash},
              {"wall_clock_seconds", wall_clock_seconds},
              {"diagnostics_ok", diagnostics_ok()},
              {"failed_diagnostics", failed_diagnostics},
              {"metrics", rows},
              {"aggregate", aggregate},
              {"extra", extra},
              {"summary", summary}};
}

std::string git_blob_hash(const std::string& content) {
  const std::string blob = "blob " + std::to_string(content.size()) + std::string(1, '\0') + content;
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  require(EVP_Digest(blob.data(), blob.size(), digest, &len, EVP_sha1(), nullptr) == 1, ErrorKind::internal,
          "SHA-1 digest failed");
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  return os.str();
}

// ---------------------------------------------------------------- commands

RunReport cmd_parisi(const ExperimentConfig& c) {
  RunReport r;
  const auto mix = mixing_of(c);
  const std::string b = c.params["boundary"].get<std::string>();
  require(b == "ising" || b == "spherical", ErrorKind::usage, "--boundary must be ising or spherical");
  const mf::Boundary boundary = b == "ising" ? mf::Boundary::ising : mf::Boundary::spherical;
  mf::MinimizeOptions opt;
  opt.levels = c.params["rsb"].get<int>();
  opt.restarts = c.params["restarts"].get<int>();
  opt.max_evaluations = c.params["max_evals"].get<int>();
  opt.seed = c.seed;
  opt.grid.space_points = c.params["grid"].get<int>();
  opt.grid.quadrature_nodes = c.params["nodes"].get<int>();
  const mf::MinimizeResult res = mf::minimize(mix, boundary, opt);

  const double closed = boundary == mf::Boundary::spherical ? mf::spherical_value(mix) : std::nan("");
  r.metrics.columns = {"rep", "value", "correction", "phi00", "closed_form", "evaluations"};
  r.metrics.add({0, res.value.value, res.value.correction, res.value.phi00, num(closed), res.evaluations});

  Table levels{{"level", "value"}, {}};
  for (std::size_t k = 0; k < res.value_by_level.size(); ++k) levels.add({k + 1, res.value_by_level[k]});
  Table prof{{"interval", "t_start", "t_end", "gamma", "terminal_scale"}, {}};
  for (int k = 0; k < res.profile.levels(); ++k)
    prof.add({k + 1, res.profile.breakpoints[k], res.profile.breakpoints[k + 1], res.profile.values[k],
              res.profile.terminal_scale});
  r.dumps.emplace_back("levels.csv", levels.to_csv());
  r.dumps.emplace_back("profile.csv", prof.to_csv());
  const int stride = c.params["dump_stride"].get<int>();
  if (stride > 0) {
    const mf::ParisiSolution sol = mf::solve_pde(res.profile, mix, boundary, opt.grid);
    std::ostringstream os;
    sol.write_csv(os, stride);
    r.dumps.emplace_back("phi.csv", os.str());
  }

  r.aggregate = json{{"value", res.value.value}, {"budget_exhausted", res.budget_exhausted}};
  if (!std::isfinite(res.value.value)) r.failed_diagnostics.push_back("functional value is not finite");
  for (std::size_t k = 1; k < res.value_by_level.size(); ++k)
    if (res.value_by_level[k] > res.value_by_level[k - 1] + 1e-12)
      r.failed_diagnostics.push_back("value increased from level " + std::to_string(k) + " to " + std::to_string(k + 1));
  if (boundary == mf::Boundary::spherical) {
    // K-step values only bound the closed form from above; the fine stationary profile must hit it.
    const double stationary =
        mf::functional(mf::spherical_stationary_profile(mix), mix, boundary, opt.grid).value;
    r.aggregate["closed_form"] = closed;
    r.aggregate["stationary_value"] = stationary;
    if (std::abs(stationary - closed) > 1e-4)
      r.failed_diagnostics.push_back("stationary-profile value differs from the closed form by more than 1e-4");
    if (res.value.value < closed - 1e-4)
      r.failed_diagnostics.push_back("K-step value lies below the closed form");
  }
  r.summary = "P = " + fixed(res.value.value) + " (K=" + std::to_string(opt.levels) + ", " + b + ")";
  if (boundary == mf::Boundary::spherical)
    r.summary += ", stationary " + fixed(r.aggregate["stationary_value"].get<double>()) + ", closed form " + fixed(closed);
  return r;
}

RunReport cmd_iamp(const ExperimentConfig& c) {
  RunReport r;
  const auto mix = mixing_of(c);
  const int n = c.params["n"].get<int>();
  const double delta = c.params["delta"].get<double>();
  const std::string ctl = c.params["control"].get<std::string>();
  require(ctl == "spherical" || ctl == "parisi", ErrorKind::usage, "--control must be spherical or parisi");
  const bool sk = is_sk(mix);
  const bool baseline = c.params["baseline"].get<bool>() && sk;

  mf::ControlField control;
  if (ctl == "spherical") {
    control = mf::spherical_control(mix, delta);
  } else {
    mf::MinimizeOptions opt;
    opt.levels = c.params["rsb"].get<int>();
    opt.seed = c.seed;
    opt.grid.space_points = c.params["grid"].get<int>();
    const mf::MinimizeResult res = mf::minimize(mix, mf::Boundary::ising, opt);
    mf::ParisiGrid g = opt.grid;
    g.time_step = delta / 2.0;
    control = mf::ising_control(mf::solve_pde(res.profile, mix, mf::Boundary::ising, g), delta);
    r.extra["parisi_value"] = res.value.value;
  }
  const mf::SEShadow se = mf::se_shadow(control, c.params["se_samples"].get<int>(), mf::Seed{c.seed, "iamp/se"});
  r.extra["se_shadow"] = json{{"final_second_moment", se.second_moments.back()},
                              {"value", se.value},
                              {"inside_fraction", se.inside_fraction},
                              {"martingale_defect", se.martingale_defect}};

  r.metrics.columns = {"rep", "energy_m", "energy_rounded", "rounding_change", "spectral_energy",
                       "max_orthogonality", "max_increment_error", "final_norm", "flagged"};
  Table traj{{"rep", "step", "t", "energy", "second_moment"}, {}};
  std::vector<double> rounded, spectral;
  for (int rep = 0; rep < c.repetitions; ++rep) {
    const mf::Seed seed = rep_seed(c, rep);
    mf::PSpinInstance inst;
    double spec = std::nan("");
    if (sk) {
      const mf::SymmetricMatrix a = mf::sample_goe(n, seed.child("instance"));
      if (baseline) spec = mf::spectral_baseline(a).energy;
      inst = mf::PSpinInstance::from_matrix(a);
    } else {
      inst = mf::sample_pspin(mix, n, seed.child("instance"));
    }
    mf::IampOptions o;
    o.seed = seed.child("iamp");
    const mf::IampTrajectory t = mf::run_iamp(inst, control, o);
    const mf::Rounding rd = ctl == "spherical" ? mf::round_to_sphere(inst, t.final_m()) : mf::round_to_cube(inst, t.final_m());
    const auto& d = t.diagnostics;
    r.metrics.add({rep, rd.energy_before, rd.energy_after, rd.change(), num(spec), d.max_orthogonality,
                   d.max_increment_error, d.final_norm, d.flagged});
    for (std::size_t l = 0; l < t.energies.size(); ++l)
      traj.add({rep, l, t.times[l], t.energies[l], t.second_moments[l]});
    if (d.flagged) r.failed_diagnostics.push_back("rep " + std::to_string(rep) + ": " + d.warning);
    rounded.push_back(rd.energy_after);
    if (baseline) spectral.push_back(spec);
  }
  r.dumps.emplace_back("trajectory.csv", traj.to_csv());
  r.aggregate["energy_rounded"] = stats_json(rounded);
  if (baseline) r.aggregate["spectral_energy"] = stats_json(spectral);
  r.summary = "IAMP (" + ctl + ") mean H(sigma)/n = " + fixed(stats(rounded).mean) + " over " +
              std::to_string(c.repetitions) + " seed(s)";
  if (baseline) r.summary += "; spectral baseline " + fixed(stats(spectral).mean);
  return r;
}

RunReport cmd_spiked(const ExperimentConfig& c) {
  RunReport r;
  const mf::PriorSpec prior = mf::PriorSpec::parse(c.params["prior"].get<std::string>());
  prior.validate();
  const std::vector<double> lambdas = parse_list(c.params["lambda_grid"].get<std::string>(), "--lambda-grid");
  const int n = c.params["n"].get<int>();
  const int steps = c.params["steps"].get<int>();
  r.metrics.columns = {"rep", "lambda", "overlap", "predicted"};
  Table th{{"lambda", "gamma_alg", "gamma_bayes", "rho_alg", "rho_bayes", "indeterminate", "overlap_mean", "overlap_stderr"}, {}};
  for (double lambda : lambdas) {
    require(lambda >= 0.0, ErrorKind::usage, "lambda values must be >= 0");
    const mf::Threshold ga = mf::gamma_alg(prior, lambda);
    const mf::Threshold gb = mf::gamma_bayes(prior, lambda);
    std::vector<double> ov;
    if (n > 0) {
      for (int rep = 0; rep < c.repetitions; ++rep) {
        const mf::SpikedInstance inst = mf::sample_spiked(n, lambda, prior, rep_seed(c, rep).child(format_double(lambda)));
        const mf::BayesAmpResult res = mf::run_bayes_amp(inst, steps);
        const auto& st = res.predicted.back();
        const double pred = st.mu == 0.0 ? 0.0 : st.mu / std::hypot(st.mu, st.tau);
        r.metrics.add({rep, lambda, res.overlaps.back(), pred});
        ov.push_back(res.overlaps.back());
      }
    }
    const Stats s = stats(ov);
    th.add({lambda, ga.gamma, gb.gamma, ga.rho, gb.rho, ga.indeterminate, n > 0 ? json(s.mean) : json(nullptr),
            n > 0 ? json(s.stderr_) : json(nullptr)});
    if (ga.indeterminate) r.failed_diagnostics.push_back("gamma_alg indeterminate at lambda " + format_double(lambda));
  }
  r.dumps.emplace_back("thresholds.csv", th.to_csv());
  r.summary = "spiked (" + prior.to_string() + "): " + std::to_string(lambdas.size()) + " lambda value(s); see thresholds.csv";
  return r;
}

RunReport cmd_amp_se(const ExperimentConfig& c) {
  RunReport r;
  const int n = c.params["n"].get<int>();
  const int steps = c.params["steps"].get<int>();
  const std::string name = c.params["schedule"].get<std::string>();
  std::unique_ptr<mf::Schedule> schedule;
  if (name == "tanh") {
    schedule = std::make_unique<mf::TanhSchedule>(steps, c.params["gain"].get<double>());
  } else if (name == "identity") {
    schedule = std::make_unique<mf::LinearSchedule>(mf::LinearSchedule::identity(steps));
  } else if (name == "table") {
    const std::string path = c.params["table"].get<std::string>();
    require(!path.empty(), ErrorKind::usage, "--schedule table needs --table <file>");
    Eigen::MatrixXd t = read_table(path);
    require(t.rows() >= steps, ErrorKind::usage, "schedule table has fewer rows than --steps");
    schedule = std::make_unique<mf::LinearSchedule>(t.topRows(steps));
  } else {
    mf::fail(ErrorKind::usage, "--schedule must be tanh, identity or table");
  }
  require(name == "table" || c.params["table"].get<std::string>().empty(), ErrorKind::usage,
          "--table is only valid with --schedule table");

  mf::InitLaw init;
  mf::SEOptions so;
  so.mc_samples = c.params["mc"].get<int>();
  const mf::SEState se = mf::state_evolution(*schedule, init, steps, mf::Seed{c.seed, "amp-se/se"}, so);
  mf::AmpOptions ao;
  ao.onsager = c.params["onsager"].get<bool>();

  r.metrics.columns = {"rep", "max_gram_deviation"};
  Table gram{{"rep", "step", "max_deviation"}, {}};
  Table cmp{{"rep", "test", "step", "empirical", "predicted", "stderr"}, {}};
  std::vector<double> devs;
  for (int rep = 0; rep < c.repetitions; ++rep) {
    const mf::Seed seed = rep_seed(c, rep);
    const mf::SymmetricMatrix a = mf::sample_goe(n, seed.child("matrix"));
    const mf::CounterRng rng(seed.child("x0"));
    Eigen::VectorXd x0(n), z(n);
    for (int i = 0; i < n; ++i) {
      const auto [x, zz] = init.sample(rng, static_cast<std::uint64_t>(i));
      x0(i) = x;
      z(i) = zz;
    }
    const mf::AmpTrajectory t = mf::amp_run(a, *schedule, x0, z, steps, ao);
    const Eigen::MatrixXd d = (t.gram() - se.q).cwiseAbs();
    for (int k = 1; k <= steps; ++k) gram.add({rep, k, d.topLeftCorner(k, k).maxCoeff()});
    const double dev = d.maxCoeff();
    r.metrics.add({rep, dev});
    devs.push_back(dev);
    for (const auto& row : mf::se_compare(t, se, mf::gram_tests(steps), 20000, seed.child("compare")))
      cmp.add({rep, row.name, row.step, row.empirical, row.predicted, row.stderr_});
  }
  r.dumps.emplace_back("gram.csv", gram.to_csv());
  r.dumps.emplace_back("compare.csv", cmp.to_csv());
  r.aggregate["max_gram_deviation"] = stats_json(devs);
  r.extra["se_method"] = se.mc_samples == 0 ? "quadrature" : "monte-carlo";
  r.summary = "AMP/SE (" + schedule->name() + (ao.onsager ? "" : ", no Onsager") + ") max |Gram - Q| = " +
              fixed(*std::max_element(devs.begin(), devs.end()), 4);
  return r;
}

RunReport cmd_bp(const ExperimentConfig& c) {
  RunReport r;
  const std::string path = c.params["model"].get<std::string>();
  const int max_iters = c.params["max_iters"].get<int>();
  const double tol = c.params["tol"].get<double>();
  const double damping = c.params["damping"].get<double>();
  require(path.empty() || c.repetitions == 1, ErrorKind::usage, "--seeds applies only to random trees, not --model");
  r.metrics.columns = {"rep", "n", "edges", "iterations", "converged", "last_change", "max_error"};
  std::vector<double> errors;
  for (int rep = 0; rep < c.repetitions; ++rep) {
    mf::GraphicalModel model;
    if (!path.empty()) {
      std::ifstream in(path);
      require(static_cast<bool>(in), ErrorKind::usage, "cannot open model file '" + path + "'");
      model = mf::read_edge_list(in);
    } else {
      const mf::Seed seed = rep_seed(c, rep);
      const int q = c.params["alphabet"].get<int>();
      const mf::Graph g = mf::sample_tree(c.params["tree_n"].get<int>(), c.params["max_degree"].get<int>(), seed.child("tree"));
      model = mf::GraphicalModel::from_graph(g, q, mf::sample_potentials(g, q, seed.child("psi"), c.params["scale"].get<double>()));
    }
    const mf::BpResult res = mf::run_bp(model, max_iters, tol, damping);
    const auto beliefs = mf::bp_marginals(model, res.messages);
    json err = nullptr;
    const bool can_enumerate =
        std::pow(static_cast<double>(model.alphabet()), model.n()) <= mf::kMaxEnumerationStates;
    if (c.params["exact"].get<bool>() && can_enumerate) {
      const double e = mf::max_marginal_error(beliefs, mf::exact_marginals(model));
      err = e;
      errors.push_back(e);
    }
    r.metrics.add({rep, model.n(), model.edges().size(), res.iterations, res.converged, res.last_change, err});
    std::ostringstream os;
    mf::write_beliefs_csv(os, beliefs);
    r.dumps.emplace_back("beliefs_" + std::to_string(rep) + ".csv", os.str());
    if (!res.converged) r.failed_diagnostics.push_back("rep " + std::to_string(rep) + ": BP did not converge");
  }
  if (!errors.empty()) r.aggregate["max_error"] = *std::max_element(errors.begin(), errors.end());
  r.summary = "BP on " + std::to_string(c.repetitions) + " model(s)";
  if (!errors.empty()) r.summary += "; max marginal error vs enumeration " + format_double(r.aggregate["max_error"].get<double>());
  return r;
}

RunReport cmd_oracle(const ExperimentConfig& c) {
  RunReport r;
  const auto mix = mixing_of(c);
  const int n = c.params["n"].get<int>();
  const std::vector<double> betas = parse_list(c.params["beta"].get<std::string>(), "--beta");
  const std::string matrix = c.params["matrix"].get<std::string>();
  require(matrix.empty() || is_sk(mix), ErrorKind::usage, "--matrix implies the SK mixing; drop --xi");
  require(matrix.empty() || c.repetitions == 1, ErrorKind::usage, "--seeds does not apply to a fixed --matrix");
  r.metrics.columns = {"rep", "beta", "opt", "free_energy", "phi_over_beta", "gap", "bound", "holds"};
  std::vector<double> opts;
  for (int rep = 0; rep < c.repetitions; ++rep) {
    mf::PSpinInstance inst;
    if (!matrix.empty()) {
      const mf::SymmetricMatrix a = read_matrix(matrix);
      require(a.n() == n, ErrorKind::usage, "matrix dimension does not match --n");
      inst = mf::PSpinInstance::from_matrix(a);
    } else if (is_sk(mix)) {
      inst = mf::PSpinInstance::from_matrix(mf::sample_goe(n, rep_seed(c, rep)));
    } else {
      inst = mf::sample_pspin(mix, n, rep_seed(c, rep));
    }
    const mf::OptResult o = mf::brute_force_opt(inst);
    opts.push_back(o.value);
    if (rep == 0) {
      std::vector<int> s(o.sigma.data(), o.sigma.data() + o.sigma.size());
      r.extra["argmax_rep0"] = s;
    }
    for (double beta : betas) {
      require(beta > 0.0, ErrorKind::usage, "beta values must be positive");
      const double phi = mf::free_energy(inst, beta);
      const double gap = std::abs(o.value - phi / beta);
      const double bound = std::log(2.0) / beta;
      const bool holds = gap <= bound + 1e-12;
      r.metrics.add({rep, beta, o.value, phi, phi / beta, gap, bound, holds});
      if (!holds) r.failed_diagnostics.push_back("free-energy sandwich violated at rep " + std::to_string(rep));
    }
  }
  r.aggregate["opt"] = stats_json(opts);
  r.summary = "OPT_n = " + fixed(stats(opts).mean) + (c.repetitions > 1 ? " (mean)" : "") + " at n = " + std::to_string(n);
  return r;
}

RunReport run(const ExperimentConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  RunReport r;
  if (config.command == "parisi") r = cmd_parisi(config);
  else if (config.command == "iamp") r = cmd_iamp(config);
  else if (config.command == "spiked") r = cmd_spiked(config);
  else if (config.command == "amp-se") r = cmd_amp_se(config);
  else if (config.command == "bp") r = cmd_bp(config);
  else if (config.command == "oracle") r = cmd_oracle(config);
  else mf::fail(ErrorKind::usage, "unknown command '" + config.command + "'");
  r.config = config;
  r.version = MEANFIELD_VERSION;
  r.input_hash = git_blob_hash(config.to_text());
  r.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

void write_outputs(const RunReport& report) {
  namespace fs = std::filesystem;
  const fs::path dir(report.config.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  require(!ec, ErrorKind::usage, "cannot create output directory '" + dir.string() + "': " + ec.message());
  auto write = [&](const std::string& name, const std::string& text) {
    std::ofstream f(dir / name, std::ios::binary);
    require(static_cast<bool>(f), ErrorKind::usage, "cannot write '" + (dir / name).string() + "'");
    f << text;
  };
  write("report.json", report.to_json().dump(2) + "\n");
  write("config.json", report.config.to_text());
  write("metrics.csv", report.metrics.to_csv());
  for (const auto& [name, text] : report.dumps) write(name, text);
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::usage:
    case ErrorKind::invalid_input:
    case ErrorKind::invalid_dimension:
    case ErrorKind::domain:
    case ErrorKind::unsupported:
      return kUsage;
    case ErrorKind::resource_limit:
      return kResource;
    case ErrorKind::numeric:
    case ErrorKind::diverged:
    case ErrorKind::internal:
      return kNumeric;
  }
  return kFailure;
}

// ---------------------------------------------------------------- entry point

namespace {

std::string flag_name(const std::string& key) {
  std::string s = key;
  std::replace(s.begin(), s.end(), '_', '-');
  return "--" + s;
}

json convert(const std::string& key, const std::string& text, const json& def) {
  try {
    std::size_t used = 0;
    if (def.is_number_integer()) {
      const long long v = std::stoll(text, &used);
      if (used == text.size()) return v;
    } else if (def.is_number_float()) {
      const double v = std::stod(text, &used);
      if (used == text.size()) return v;
    } else if (def.is_boolean()) {
      if (text == "true" || text == "1") return true;
      if (text == "false" || text == "0") return false;
    } else {
      return text;
    }
  } catch (const std::exception&) {
  }
  mf::fail(ErrorKind::usage, "cannot parse value '" + text + "' for " + flag_name(key));
}

}  // namespace

int main_entry(int argc, char** argv) {
  if (const char* env = std::getenv("MEANFIELD_THREADS")) {
    const int t = std::atoi(env);
    if (t > 0) mf::set_num_threads(t);
  }
  CLI::App app{"mfsg: mean-field spin-glass experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(MEANFIELD_VERSION));

  struct Sub {
    CLI::App* app = nullptr;
    std::map<std::string, std::string> values;
    std::string config_path;
    std::uint64_t seed = 0;
    int seeds = 1;
    std::string out;
  };
  std::map<std::string, Sub> subs;
  for (const std::string& name : commands()) {
    Sub& s = subs[name];
    s.app = app.add_subcommand(name, "run the " + name + " experiment");
    s.app->footer("Outputs under --out: report.json, config.json, " + csv_help(name));
    s.app->add_option("--config", s.config_path, "JSON config file; flags override its values");
    s.app->add_option("--seed", s.seed, "master seed");
    s.app->add_option("--seeds", s.seeds, "repetitions (independent seed streams)");
    s.app->add_option("--out", s.out, "output directory (default mfsg-out)");
    const json defaults = default_params(name);
    for (const auto& [key, def] : defaults.items()) {
      const std::string help = "default " + cell(def);
      if (def.is_boolean()) {
        s.app->add_option(flag_name(key), s.values[key], help + " (true/false)");
      } else {
        s.app->add_option(flag_name(key), s.values[key], help);
      }
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    for (auto& [name, s] : subs) {
      if (!s.app->parsed()) continue;
      json doc = json::object();
      if (!s.config_path.empty()) {
        std::ifstream in(s.config_path);
        require(static_cast<bool>(in), ErrorKind::usage, "cannot open config '" + s.config_path + "'");
        std::stringstream buf;
        buf << in.rdbuf();
        try {
          doc = json::parse(buf.str());
        } catch (const json::parse_error& e) {
          mf::fail(ErrorKind::usage, std::string("config is not valid JSON: ") + e.what());
        }
        require(doc.is_object(), ErrorKind::usage, "config must be a JSON object");
        require(!doc.contains("command") || doc["command"] == name, ErrorKind::usage,
                "config command does not match the subcommand");
      }
      doc["command"] = name;
      const json defaults = default_params(name);
      if (s.app->count("--seed")) doc["seed"] = s.seed;
      if (s.app->count("--seeds")) doc["seeds"] = s.seeds;
      if (s.app->count("--out")) doc["out"] = s.out;
      for (const auto& [key, def] : defaults.items()) {
        if (s.app->count(flag_name(key))) {
          CLI::Option* opt = s.app->get_option(flag_name(key));
          doc[key] = convert(key, opt->as<std::string>(), def);
        }
      }
      const ExperimentConfig config = ExperimentConfig::from_json(doc);
      const RunReport report = run(config);
      write_outputs(report);
      std::cout << report.summary << "\n";
      if (!report.diagnostics_ok()) {
        for (const auto& d : report.failed_diagnostics) std::cerr << "diagnostic: " << d << "\n";
        return kNumeric;
      }
      return kOk;
    }
  } catch (const mf::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kUsage;
}

}  // namespace mfsg
