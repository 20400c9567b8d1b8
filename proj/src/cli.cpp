// Copyright 2026 The FilterDDP Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "filterddp/cli.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <mutex>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <fmt/format.h>

namespace filterddp {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) {
    return {};
  }
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& value) {
  double out = 0.0;
  const char* first = value.data();
  const char* last = first + value.size();
  const auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last || value.empty()) {
    throw InputError(fmt::format("invalid value '{}' for key '{}'", value, key));
  }
  return out;
}

long long to_integer(const std::string& key, const std::string& value) {
  long long out = 0;
  const char* first = value.data();
  const char* last = first + value.size();
  const auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last || value.empty()) {
    throw InputError(fmt::format("invalid integer '{}' for key '{}'", value, key));
  }
  return out;
}

bool to_bool(const std::string& key, const std::string& value) {
  if (value == "1" || value == "true") {
    return true;
  }
  if (value == "0" || value == "false") {
    return false;
  }
  throw InputError(fmt::format("invalid flag '{}' for key '{}'", value, key));
}

using Setter = std::function<void(SolverConfig&, const std::string&,
                                  const std::string&)>;

const std::map<std::string, Setter>& solver_setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> t;
    auto real = [&t](const std::string& name, double SolverConfig::*field) {
      t[name] = [field](SolverConfig& c, const std::string& k,
                        const std::string& v) { c.*field = to_double(k, v); };
    };
    auto reg = [&t](const std::string& name,
                    double RegularizationConfig::*field) {
      t[name] = [field](SolverConfig& c, const std::string& k,
                        const std::string& v) {
        c.regularization.*field = to_double(k, v);
      };
    };
    real("eps_tol", &SolverConfig::eps_tol);
    real("gamma_theta", &SolverConfig::gamma_theta);
    real("gamma_lagrangian", &SolverConfig::gamma_lagrangian);
    real("delta", &SolverConfig::delta);
    real("s_theta", &SolverConfig::s_theta);
    real("s_lagrangian", &SolverConfig::s_lagrangian);
    real("eta", &SolverConfig::eta);
    real("gamma_min", &SolverConfig::gamma_min);
    real("theta_max_factor", &SolverConfig::theta_max_factor);
    real("theta_min_factor", &SolverConfig::theta_min_factor);
    real("mu_init", &SolverConfig::mu_init);
    real("kappa_eps", &SolverConfig::kappa_eps);
    real("kappa_mu", &SolverConfig::kappa_mu);
    real("theta_mu", &SolverConfig::theta_mu);
    real("tau_min", &SolverConfig::tau_min);
    reg("delta_w_init", &RegularizationConfig::delta_w_init);
    reg("delta_w_min", &RegularizationConfig::delta_w_min);
    reg("delta_w_max", &RegularizationConfig::delta_w_max);
    reg("delta_w_decrease", &RegularizationConfig::decrease_factor);
    reg("delta_w_increase", &RegularizationConfig::increase_factor);
    reg("delta_c_base", &RegularizationConfig::delta_c_base);
    reg("delta_c_exponent", &RegularizationConfig::delta_c_exponent);
    reg("zero_pivot_tol", &RegularizationConfig::zero_pivot_tol);
    reg("max_condition", &RegularizationConfig::max_condition);
    t["max_iters"] = [](SolverConfig& c, const std::string& k,
                        const std::string& v) {
      c.max_iters = static_cast<int>(to_integer(k, v));
    };
    t["gauss_newton"] = [](SolverConfig& c, const std::string& k,
                           const std::string& v) {
      c.gauss_newton = to_bool(k, v);
    };
    return t;
  }();
  return table;
}

constexpr std::string_view kParamPrefix = "param.";

std::string g17(double v) { return fmt::format("{:.17g}", v); }

void append_vector(std::string& row, const VectorXd& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    row += ',';
    row += g17(v(i));
  }
}

void append_header(std::string& row, const char* name, Eigen::Index n) {
  for (Eigen::Index i = 0; i < n; ++i) {
    row += fmt::format(",{}{}", name, i);
  }
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) {
    throw InputError("cannot write " + path.string());
  }
  f << text;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) {
    throw InputError("cannot read config file " + path.string());
  }
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

int worker_count(int requested, int jobs) {
  int n = requested > 0 ? requested
                        : static_cast<int>(std::thread::hardware_concurrency());
  return std::clamp(n, 1, std::max(1, jobs));
}

// Runs fn(i) for i in [0, jobs) on a small pool.
void parallel_for(int jobs, int threads, const std::function<void(int)>& fn) {
  std::atomic<int> next{0};
  std::vector<std::jthread> pool;
  for (int w = 0; w < worker_count(threads, jobs); ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < jobs; i = next++) {
        fn(i);
      }
    });
  }
}

double trajectory_gap(const Trajectory& a, const Trajectory& b) {
  double out = 0.0;
  for (std::size_t t = 0; t < a.size(); ++t) {
    out = std::max(out, (a[t] - b[t]).lpNorm<Eigen::Infinity>());
  }
  return out;
}

}  // namespace

std::vector<std::pair<std::string, std::string>> parse_key_values(
    const std::string& text) {
  std::vector<std::pair<std::string, std::string>> out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) {
      line.erase(hash);
    }
    line = trim(line);
    if (line.empty()) {
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw InputError(fmt::format("line {}: expected key = value", lineno));
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw InputError(fmt::format("line {}: empty key", lineno));
    }
    out.emplace_back(std::move(key), std::move(value));
  }
  return out;
}

void apply_setting(const std::string& key, const std::string& value,
                   SolverConfig& config, BenchmarkSpec& spec) {
  const auto& setters = solver_setters();
  if (const auto it = setters.find(key); it != setters.end()) {
    it->second(config, key, value);
  } else if (key == "N") {
    spec.N = static_cast<int>(to_integer(key, value));
  } else if (key == "dt") {
    spec.dt = to_double(key, value);
  } else if (key == "seed") {
    spec.seed = static_cast<std::uint64_t>(to_integer(key, value));
  } else if (key.starts_with(kParamPrefix) &&
             spec.params.contains(key.substr(kParamPrefix.size()))) {
    spec.params[key.substr(kParamPrefix.size())] = to_double(key, value);
  } else {
    throw InputError(fmt::format("unknown key '{}'", key));
  }
}

std::vector<std::string> known_keys(const BenchmarkSpec& spec) {
  std::vector<std::string> keys{"N", "dt", "seed"};
  for (const auto& [k, _] : solver_setters()) {
    keys.push_back(k);
  }
  for (const auto& [k, _] : spec.params) {
    keys.push_back(std::string(kParamPrefix) + k);
  }
  std::sort(keys.begin(), keys.end());
  return keys;
}

std::string iteration_log_csv(const SolverReport& report) {
  std::string s =
      "k,mode,mu,cost,theta,lagrangian,error,gamma,delta_w,m,l_type,"
      "filter_size,trials\n";
  for (const IterationRecord& r : report.records) {
    s += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{}\n", r.k,
                     r.barrier ? "barrier" : "equality", g17(r.mu), g17(r.cost),
                     g17(r.theta), g17(r.lagrangian), g17(r.error),
                     g17(r.gamma), g17(r.delta_w), g17(r.m), r.l_type ? 1 : 0,
                     r.filter_size, r.trials);
  }
  return s;
}

std::string trajectory_csv(const Iterate& w) {
  if (w.u.empty()) {
    return "t\n";
  }
  std::string s = "t";
  append_header(s, "x", w.x[0].size());
  append_header(s, "u", w.u[0].size());
  append_header(s, "phi", w.phi[0].size());
  append_header(s, "lambda", w.lambda[0].size());
  append_header(s, "z", w.z[0].size());
  s += '\n';
  for (std::size_t t = 0; t < w.u.size(); ++t) {
    std::string row = std::to_string(t);
    append_vector(row, w.x[t]);
    append_vector(row, w.u[t]);
    append_vector(row, w.phi[t]);
    append_vector(row, w.lambda[t]);
    append_vector(row, w.z[t]);
    s += row;
    s += '\n';
  }
  return s;
}

CheckResult check_model(const OcpModel& model, const SolverConfig& config,
                        std::uint64_t seed, int points, double derivative_tol,
                        double oracle_tol) {
  const Dims d = model.dims();
  const std::vector<int> bounded = bounded_indices(model);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto random_traj = [&](int n) {
    Trajectory out(d.N, VectorXd(n));
    for (auto& v : out) {
      for (int i = 0; i < n; ++i) {
        v(i) = normal(rng);
      }
    }
    return out;
  };

  CheckResult result;
  for (int p = 0; p < points; ++p) {
    const Trajectory x = random_traj(d.nx);
    Trajectory u = random_traj(d.nu);
    const Trajectory phi = random_traj(d.nc);
    for (auto& ut : u) {
      for (int i : bounded) {
        ut(i) = std::abs(ut(i)) + 0.1;
      }
    }
    const DerivativeCheckReport rep = derivative_check(model, x, u, phi, 1e-5);
    result.derivative_error = std::max(result.derivative_error, rep.max_error());
  }
  result.passed = result.derivative_error <= derivative_tol;

  if (dynamic_cast<const LqModel*>(&model) != nullptr) {
    const Iterate oracle = stacked_kkt_oracle(model);
    const SolverReport rep =
        solve(model, Trajectory(d.N, VectorXd::Zero(d.nu)), config);
    const Iterate& w = rep.solution;
    const double gap = std::max(
        {trajectory_gap(w.x, oracle.x), trajectory_gap(w.u, oracle.u),
         trajectory_gap(w.phi, oracle.phi),
         trajectory_gap(w.lambda, oracle.lambda)});
    result.oracle_gap = gap;
    result.passed = result.passed && rep.converged() && gap <= oracle_tol;
  }
  return result;
}

int run_manifest(const RunManifest& manifest, std::ostream& out,
                 std::ostream& err) {
  SolverConfig config;
  BenchmarkSpec spec;
  int batch = manifest.batch;
  try {
    std::vector<std::pair<std::string, std::string>> settings;
    std::string problem = manifest.problem;
    if (manifest.config_file) {
      for (auto& kv : parse_key_values(read_file(*manifest.config_file))) {
        if (kv.first == "problem") {
          if (problem.empty()) {
            problem = kv.second;
          }
        } else if (kv.first == "batch") {
          batch = static_cast<int>(to_integer(kv.first, kv.second));
        } else {
          settings.push_back(std::move(kv));
        }
      }
    }
    if (problem.empty()) {
      err << "error: no problem given (use --problem or a config file)\n";
      return kExitUsage;
    }
    spec = default_spec(problem);
    if (manifest.seed) {
      spec.seed = *manifest.seed;
    }
    settings.insert(settings.end(), manifest.settings.begin(),
                    manifest.settings.end());
    for (const auto& [k, v] : settings) {
      apply_setting(k, v, config, spec);
    }
    config.validate();
    if (batch < 1) {
      throw InputError("batch must be at least 1");
    }
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  const std::vector<BenchmarkSpec> specs = randomize(spec, batch);
  std::vector<Problem> problems;
  try {
    for (const auto& s : specs) {
      problems.push_back(make_problem(s));
    }
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  if (manifest.command == "check") {
    std::vector<CheckResult> results(specs.size());
    parallel_for(static_cast<int>(specs.size()), manifest.threads, [&](int i) {
      results[i] = check_model(*problems[i].model, config, specs[i].seed);
    });
    bool ok = true;
    for (std::size_t i = 0; i < results.size(); ++i) {
      const CheckResult& r = results[i];
      out << fmt::format("{} seed={} derivative_error={:.3e}", spec.name,
                         specs[i].seed, r.derivative_error);
      if (r.oracle_gap) {
        out << fmt::format(" oracle_gap={:.3e}", *r.oracle_gap);
      }
      out << (r.passed ? " ok\n" : " FAILED\n");
      ok = ok && r.passed;
    }
    return ok ? kExitOk : kExitFailure;
  }

  std::error_code ec;
  std::filesystem::create_directories(manifest.out_dir, ec);
  if (ec) {
    err << "error: cannot create " << manifest.out_dir << ": " << ec.message()
        << '\n';
    return kExitUsage;
  }

  std::vector<SolverReport> reports(specs.size());
  std::mutex io;
  std::string write_error;
  parallel_for(static_cast<int>(specs.size()), manifest.threads, [&](int i) {
    reports[i] = solve(*problems[i].model, problems[i].u_init, config);
    try {
      const auto stem = manifest.out_dir / fmt::format("run_{:03d}", i);
      write_file(stem.string() + "_log.csv", iteration_log_csv(reports[i]));
      write_file(stem.string() + "_traj.csv",
                 trajectory_csv(reports[i].solution));
    } catch (const std::exception& e) {
      std::lock_guard lock(io);
      write_error = e.what();
    }
  });
  if (!write_error.empty()) {
    err << "error: " << write_error << '\n';
    return kExitFailure;
  }

  std::string summary = "run,seed,status,iterations,error,cost,theta\n";
  bool all = true;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const SolverReport& r = reports[i];
    const Iterate& w = r.solution;
    summary += fmt::format("{},{},{},{},{},{},{}\n", i, specs[i].seed,
                           to_string(r.status), r.iterations(),
                           g17(r.final_error),
                           g17(evaluate_cost(*problems[i].model, w.x, w.u)),
                           g17(w.theta));
    all = all && r.converged();
  }
  try {
    write_file(manifest.out_dir / "summary.csv", summary);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  out << summary;
  return all ? kExitOk : kExitFailure;
}

int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Filter line-search DDP solver"};
  app.require_subcommand(1);

  RunManifest m;
  std::vector<std::string> sets;
  std::uint64_t seed = 0;
  std::string config_file;
  const char* env_out = std::getenv("FILTERDDP_OUT");
  std::string out_dir = env_out != nullptr ? env_out : "runs";

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--problem", m.problem, "benchmark name");
    sub->add_option("--seed", seed, "master seed");
    sub->add_option("--batch", m.batch, "number of randomized instances");
    sub->add_option("--threads", m.threads, "worker threads (0: all cores)");
    sub->add_option("--config", config_file, "key = value config file");
    sub->add_option("--set", sets, "override, key=value")->take_all();
  };
  CLI::App* solve_cmd = app.add_subcommand("solve", "solve and write logs");
  add_common(solve_cmd);
  solve_cmd->add_option("--out", out_dir,
                        "output directory (default $FILTERDDP_OUT or runs)");
  CLI::App* check_cmd =
      app.add_subcommand("check", "derivative and oracle checks");
  add_common(check_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n' << app.help();
    return kExitUsage;
  }

  CLI::App* used = solve_cmd->parsed() ? solve_cmd : check_cmd;
  m.command = used->get_name();
  if (used->count("--seed") > 0) {
    m.seed = seed;
  }
  if (!config_file.empty()) {
    m.config_file = config_file;
  }
  m.out_dir = out_dir;
  for (const std::string& s : sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) {
      err << "error: --set expects key=value, got '" << s << "'\n";
      return kExitUsage;
    }
    m.settings.emplace_back(trim(s.substr(0, eq)), trim(s.substr(eq + 1)));
  }
  return run_manifest(m, out, err);
}

}  // namespace filterddp
