#include "cli.hpp"

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "scottlab/error.hpp"
#include "scottlab/hydrogenic.hpp"
#include "scottlab/inequality_lab.hpp"
#include "scottlab/report_io.hpp"
#include "scottlab/scott_study.hpp"
#include "scottlab/spectrum_store.hpp"

namespace scottlab::cli {

namespace {

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_double(const std::string& key, const std::string& text) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ConfigError("'" + key + "': expected a number, got '" + text + "'");
  }
  return v;
}

long to_integer(const std::string& key, const std::string& text) {
  long v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ConfigError("'" + key + "': expected an integer, got '" + text + "'");
  }
  return v;
}

std::vector<double> to_doubles(const std::string& key, const std::vector<std::string>& items) {
  std::vector<double> out;
  for (const auto& item : items) {
    for (const auto& part : split_list(item)) out.push_back(to_double(key, part));
  }
  return out;
}

std::vector<TestPotential> to_potentials(const std::vector<std::string>& items) {
  std::vector<TestPotential> out;
  for (const auto& item : items) {
    for (const auto& part : split_list(item)) {
      try {
        out.push_back(TestPotential::parse(part));
      } catch (const Error& e) {
        throw ConfigError(std::string("'potential': ") + e.what());
      }
    }
  }
  return out;
}

// Applies one key. Lists given in a file replace the previous value.
void apply_value(RunConfig& c, const std::string& key, const std::vector<std::string>& values) {
  const std::string& last = values.back();
  if (key == "command") {
    c.command = last;
  } else if (key == "gamma") {
    c.gammas = to_doubles(key, values);
  } else if (key == "ell") {
    c.ell = static_cast<int>(to_integer(key, last));
  } else if (key == "ellmax") {
    c.ell_max = static_cast<int>(to_integer(key, last));
  } else if (key == "nmax") {
    c.n_max = static_cast<int>(to_integer(key, last));
  } else if (key == "rmax") {
    c.r_max = to_double(key, last);
  } else if (key == "points") {
    const long n = to_integer(key, last);
    if (n < 1) throw ConfigError("'points' must be positive");
    c.points = static_cast<std::size_t>(n);
  } else if (key == "symbol") {
    c.symbol = last;
  } else if (key == "potential") {
    c.potentials = to_potentials(values);
  } else if (key == "lambda") {
    c.lambdas = to_doubles(key, values);
  } else if (key == "fill") {
    c.fills = to_doubles(key, values);
  } else if (key == "out") {
    c.out = last;
  } else if (key == "cache-dir") {
    c.cache_dir = last;
  } else if (key == "jobs") {
    c.jobs = static_cast<int>(to_integer(key, last));
  } else {
    throw ConfigError("unknown configuration key '" + key + "'");
  }
}

const std::vector<std::string> kValueKeys{"gamma", "ell",    "ellmax", "nmax",      "rmax",
                                          "points", "symbol", "potential", "lambda", "fill",
                                          "out",   "cache-dir", "jobs"};

}  // namespace

void RunConfig::validate() const {
  const auto& names = commands();
  if (std::find(names.begin(), names.end(), command) == names.end()) {
    throw ConfigError("unknown command '" + command +
                      "' (expected spectrum, density, verify, majorant or scott)");
  }
  for (double g : gammas) {
    if (!(g > 0.0 && g < kCriticalCoupling)) {
      std::ostringstream os;
      os << "gamma=" << g << " is outside (0, 2/pi); the critical coupling is 2/pi = "
         << kCriticalCoupling;
      throw ConfigError(os.str());
    }
  }
  if (ell && *ell < 0) throw ConfigError("--ell must be >= 0");
  if (ell_max && *ell_max < 0) throw ConfigError("--ellmax must be >= 0");
  if (n_max && *n_max < 0) throw ConfigError("--nmax must be >= 0");
  if (points && *points < 100) throw ConfigError("--points must be >= 100");
  if (r_max && !(*r_max > 0.0)) throw ConfigError("--rmax must be > 0");
  if (jobs < 1) throw ConfigError("--jobs must be >= 1");
  try {
    (void)KineticSymbol::parse(symbol);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  for (double f : fills) {
    if (!(f > 0.0)) throw ConfigError("--fill values must be > 0");
  }
  if (out) {
    const auto parent = out->parent_path();
    if (!parent.empty() && std::filesystem::exists(parent) &&
        !std::filesystem::is_directory(parent)) {
      throw ConfigError("output directory " + parent.string() + " is not a directory");
    }
  }
}

void apply_config_file(const std::filesystem::path& path, RunConfig& config) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path.string() + ":" + std::to_string(number) + ": expected key=value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      apply_value(config, key, {value});
    } catch (const ConfigError& e) {
      throw ConfigError(path.string() + ":" + std::to_string(number) + ": " + e.what());
    }
  }
}

RunConfig parse_config(int argc, const char* const* argv) {
  CLI::App app{"Spectra, densities and inequality checks for the relativistic hydrogen operator",
               "scottlab"};
  std::string command;
  std::map<std::string, std::vector<std::string>> values;
  app.add_option("command", command, "spectrum | density | verify | majorant | scott")
      ->required();
  const std::map<std::string, std::string> help{
      {"gamma", "coupling(s), comma separated"},
      {"ell", "single angular momentum channel"},
      {"ellmax", "channels 0..ellmax"},
      {"nmax", "states per channel minus one"},
      {"rmax", "box radius"},
      {"points", "grid points N (>= 100)"},
      {"symbol", "kinetic symbol for spectrum/density"},
      {"potential", "test potentials: exp:a, coulomb:s, yukawa:a"},
      {"lambda", "perturbation strengths (spectrum); fractions of t0/b (majorant)"},
      {"fill", "electron counts for scott"},
      {"out", "output file (default stdout)"},
      {"cache-dir", "spectrum cache directory"},
      {"jobs", "worker threads for independent channels"},
  };
  for (const auto& key : kValueKeys) {
    auto* opt = app.add_option("--" + key, values[key], help.at(key));
    opt->allow_extra_args(false);
  }
  std::string config_file;
  app.add_option("--config", config_file, "key=value configuration file");
  bool quiet = false;
  app.add_flag("-q,--quiet", quiet, "suppress progress log");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    throw HelpRequested{app.help(), 0};
  } catch (const CLI::ParseError& e) {
    throw ConfigError(e.what());
  }

  RunConfig config;
  if (!config_file.empty()) {
    config.config_file = config_file;
    apply_config_file(config_file, config);
  }
  config.command = command;
  for (const auto& key : kValueKeys) {
    if (app.count("--" + key) > 0) apply_value(config, key, values[key]);
  }
  config.quiet = quiet;
  if (!config.cache_dir) {
    if (const char* env = std::getenv("SCOTTLAB_CACHE_DIR"); env && *env) config.cache_dir = env;
  }
  config.validate();
  return config;
}

RadialGrid grid_for(const RunConfig& config, double gamma) {
  if (config.r_max && config.points) return RadialGrid::from_extent(*config.r_max, *config.points);
  if (config.points) return RadialGrid::from_extent(200.0 / gamma, *config.points);
  if (config.r_max) {
    const double h = 0.05 / gamma;
    const auto n = static_cast<std::size_t>(std::llround(*config.r_max / h)) - 1;
    return RadialGrid::from_extent(*config.r_max, std::max<std::size_t>(n, 100));
  }
  return default_grid(gamma);
}

namespace {

bool use_color(const std::ostream& log) {
  if (std::getenv("NO_COLOR")) return false;
  return &log == &std::cerr && isatty(fileno(stderr));
}

class Log {
 public:
  Log(std::ostream& os, bool quiet) : os_(os), quiet_(quiet), color_(use_color(os)) {}
  void info(const std::string& m) const {
    if (quiet_) return;
    os_ << (color_ ? "\033[2m[scottlab]\033[0m " : "[scottlab] ") << m << '\n';
  }
  void warn(const std::string& m) const {
    os_ << (color_ ? "\033[33m[scottlab]\033[0m " : "[scottlab] ") << m << '\n';
  }
  std::ostream& stream() const { return os_; }

 private:
  std::ostream& os_;
  bool quiet_;
  bool color_;
};

void emit(const RunConfig& config, std::ostream& out, const std::string& text, const Log& log) {
  if (config.out) {
    write_file_atomically(*config.out, text);
    log.info("wrote " + config.out->string());
  } else {
    out << text;
  }
}

std::vector<int> channels(const RunConfig& c, int default_max) {
  if (c.ell) return {*c.ell};
  std::vector<int> out;
  const int top = c.ell_max.value_or(default_max);
  for (int l = 0; l <= top; ++l) out.push_back(l);
  return out;
}

std::vector<double> gammas_or(const RunConfig& c, std::vector<double> fallback) {
  return c.gammas.empty() ? fallback : c.gammas;
}

struct SpectrumTask {
  RadialGrid grid;
  ChannelSpec spec;
  KineticSymbol symbol;
};

// Computes the spectra on `jobs` threads; results land in the store.
void prefetch(SpectrumStore& store, const std::vector<SpectrumTask>& tasks, int jobs) {
  if (jobs <= 1 || tasks.size() <= 1) {
    for (const auto& t : tasks) store.spectrum(t.grid, t.spec, t.symbol);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> workers;
    for (int w = 0; w < jobs; ++w) {
      workers.emplace_back([&] {
        for (std::size_t i = next++; i < tasks.size(); i = next++) {
          try {
            store.spectrum(tasks[i].grid, tasks[i].spec, tasks[i].symbol);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

ChannelSpec spec_for(const RunConfig& c, double gamma, int ell, double lambda) {
  ChannelSpec s;
  s.gamma = gamma;
  s.ell = ell;
  if (lambda != 0.0) {
    if (c.potentials.empty()) throw ConfigError("--lambda != 0 needs --potential");
    s.lambda = lambda;
    s.potential = c.potentials.front();
  }
  return s;
}

int run_spectrum(const RunConfig& c, SpectrumStore& store, std::ostream& out, const Log& log) {
  const auto symbol = KineticSymbol::parse(c.symbol);
  const int n_max = c.n_max.value_or(5);
  const auto lambdas = c.lambdas.empty() ? std::vector<double>{0.0} : c.lambdas;
  std::vector<SpectrumTask> tasks;
  for (double g : gammas_or(c, {0.5})) {
    for (int l : channels(c, 0)) {
      for (double lambda : lambdas) tasks.push_back({grid_for(c, g), spec_for(c, g, l, lambda), symbol});
    }
  }
  prefetch(store, tasks, c.jobs);
  std::string csv = "symbol,gamma,ell,potential,lambda,n,energy,schroedinger_energy,localization\n";
  for (const auto& t : tasks) {
    const auto s = store.spectrum(t.grid, t.spec, t.symbol)->truncated(n_max);
    if (static_cast<int>(s.states.size()) < n_max + 1) {
      log.warn(t.spec.describe() + ": " + std::to_string(s.states.size()) +
               " localized bound states on " + t.grid.describe() + " (asked for " +
               std::to_string(n_max + 1) + ")");
    }
    for (const auto& st : s.states) {
      csv += symbol.name() + "," + format_shortest(t.spec.gamma) + "," +
             std::to_string(t.spec.ell) + "," +
             (t.spec.potential ? t.spec.potential->to_string() : std::string("none")) + "," +
             format_shortest(t.spec.lambda) + "," + std::to_string(st.n) + "," +
             format_shortest(st.energy) + "," +
             format_shortest(schroedinger_energy(t.spec.gamma, st.n, t.spec.ell)) + "," +
             format_shortest(st.localization) + "\n";
    }
  }
  emit(c, out, csv, log);
  return 0;
}

std::string density_rows(const DensityProfile& p, const std::string& ell) {
  std::string rows;
  const std::string tail =
      "," + ell + "," + std::to_string(p.n_max) + "," + format_shortest(p.gamma) + "\n";
  for (std::size_t i = 0; i < p.values.size(); ++i) {
    rows += format_shortest(p.radii[i]) + "," + format_shortest(p.values[i]) + tail;
  }
  return rows;
}

int run_density(const RunConfig& c, SpectrumStore& store, std::ostream& out, const Log& log) {
  const auto symbol = KineticSymbol::parse(c.symbol);
  const int n_max = c.n_max.value_or(20);
  std::vector<SpectrumTask> tasks;
  const auto gammas = gammas_or(c, {0.5});
  const auto ells = channels(c, 4);
  for (double g : gammas) {
    for (int l : ells) tasks.push_back({grid_for(c, g), spec_for(c, g, l, 0.0), symbol});
  }
  prefetch(store, tasks, c.jobs);
  std::string csv = "r,rho,ell,n_max,gamma\n";
  std::size_t t = 0;
  for (std::size_t gi = 0; gi < gammas.size(); ++gi) {
    std::vector<DensityProfile> profiles;
    for (std::size_t li = 0; li < ells.size(); ++li, ++t) {
      const auto s = store.spectrum(tasks[t].grid, tasks[t].spec, symbol)->truncated(n_max);
      if (s.states.empty()) {
        log.warn(tasks[t].spec.describe() + ": no localized bound states; channel skipped");
        continue;
      }
      profiles.push_back(channel_density(s));
      csv += density_rows(profiles.back(), std::to_string(*profiles.back().ell));
    }
    if (!profiles.empty()) csv += density_rows(total_density(profiles), "total");
  }
  emit(c, out, csv, log);
  return 0;
}

int run_verify(const RunConfig& c, SpectrumStore& store, std::ostream& out, const Log& log) {
  SuiteConfig suite;
  if (!c.gammas.empty()) suite.gammas = c.gammas;
  if (c.ell_max) suite.ell_max = *c.ell_max;
  if (c.ell) suite.ell_max = *c.ell;
  if (c.n_max) suite.n_max = *c.n_max;
  if (c.r_max || c.points) suite.grid_for = [c](double g) { return grid_for(c, g); };
  std::vector<SpectrumTask> tasks;
  for (double g : suite.gammas) {
    for (int l = 0; l <= suite.ell_max; ++l) {
      tasks.push_back({suite.grid_for(g), spec_for(c, g, l, 0.0), KineticSymbol::chandrasekhar()});
    }
  }
  prefetch(store, tasks, c.jobs);
  const auto report = run_suite(suite, store);
  emit(c, out, report_to_json(report), log);
  log.info(std::to_string(report.checks.size()) + " checks, " +
           std::to_string(report.failures()) + " failing");
  for (const auto& check : report.checks) {
    if (check.pass) continue;
    std::ostringstream os;
    os.precision(6);
    os << "FAIL " << check.name << " gamma=" << check.parameters.gamma
       << " l=" << check.parameters.ell << " n=" << check.parameters.n << " "
       << check.parameters.auxiliary << ": lhs=" << check.lhs << " rhs=" << check.rhs
       << " margin=" << check.margin << " tol=" << check.tolerance
       << (check.note.empty() ? "" : " [" + check.note + "]");
    log.warn(os.str());
  }
  return report.pass ? 0 : 1;
}

int run_majorant(const RunConfig& c, SpectrumStore& store, std::ostream& out, const Log& log) {
  MajorantStudyConfig study_config;
  if (!c.gammas.empty()) study_config.gamma = c.gammas.front();
  if (!c.potentials.empty()) study_config.potentials = c.potentials;
  if (!c.lambdas.empty()) study_config.fractions = c.lambdas;
  if (c.r_max || c.points) study_config.grid = grid_for(c, study_config.gamma);
  if (c.ell_max) study_config.summability_level = std::max(*c.ell_max, study_config.max_level);
  const auto study = run_majorant_study(study_config, store);
  std::string csv =
      "scenario,gamma,ell,n,lambda,b,e0,e_lambda,sharp_rhs,paper_rhs,sharp_pass,paper_pass\n";
  for (const auto& m : study.cases) {
    const auto checks = check_majorant(m);
    const double fraction = m.lambda * m.b / study.constants.t0;
    csv += "U=" + m.potential.to_string() + "|f=" + format_shortest(fraction) + "," +
           format_shortest(m.gamma) + "," + std::to_string(m.ell) + "," + std::to_string(m.n) +
           "," + format_shortest(m.lambda) + "," + format_shortest(m.b) + "," +
           format_shortest(m.e0) + "," + format_shortest(m.e_lambda) + "," +
           format_shortest(m.sharp_rhs) + "," + format_shortest(m.paper_rhs) + "," +
           (checks.sharp.pass ? "1" : "0") + "," + (checks.paper.pass ? "1" : "0") + "\n";
  }
  emit(c, out, csv, log);
  std::ostringstream os;
  os.precision(10);
  os << "constants: A=" << study.constants.a << " t0=" << study.constants.t0
     << " m_tilde=" << study.constants.m_tilde << " (argmax " << study.constants.m_tilde_argmax
     << ") c_emp=" << study.constants.c_emp << " M=" << study.constants.m;
  log.info(os.str());
  for (const auto& [label, trend] : study.trends) {
    std::ostringstream t;
    t.precision(8);
    t << "b trend " << label << ": " << trend.coarse << " -> " << trend.refined
      << " (drift " << trend.relative_drift() << ")";
    log.info(t.str());
  }
  bool pass = true;
  for (const auto& check : study.checks) {
    if (check.pass) continue;
    pass = false;
    log.warn("FAIL " + check.name + " l=" + std::to_string(check.parameters.ell) +
             " n=" + std::to_string(check.parameters.n) + " " + check.parameters.auxiliary);
  }
  log.info(std::to_string(study.checks.size()) + " majorant checks, " +
           (pass ? std::string("all pass") : std::string("failures present")));
  return pass ? 0 : 1;
}

int run_scott(const RunConfig& c, SpectrumStore& store, std::ostream& out, const Log& log) {
  const double gamma = c.gammas.empty() ? 0.5 : c.gammas.front();
  const int ell_max = c.ell_max.value_or(4);
  const auto fills = c.fills.empty() ? std::vector<double>{1, 5, 10, 20, 35, 50} : c.fills;
  const auto potentials =
      c.potentials.empty()
          ? std::vector<TestPotential>{TestPotential::exponential(1.0),
                                       TestPotential::coulomb_tail(1.0)}
          : c.potentials;
  const auto grid = grid_for(c, gamma);
  std::vector<SpectrumTask> tasks;
  for (int l = 0; l <= ell_max; ++l) {
    tasks.push_back({grid, spec_for(c, gamma, l, 0.0), KineticSymbol::chandrasekhar()});
  }
  prefetch(store, tasks, c.jobs);
  const auto table = scott_density_convergence(gamma, fills, ell_max, potentials, grid, store);
  std::string csv = "N,potential,integral,increment,hydrogenic_integral\n";
  for (const auto& row : table.rows) {
    csv += format_shortest(row.electrons) + "," + row.potential + "," +
           format_shortest(row.integral) + "," + format_shortest(row.increment) + "," +
           format_shortest(row.hydrogenic_integral) + "\n";
  }
  emit(c, out, csv, log);
  bool pass = true;
  for (const auto& check : table.checks) {
    if (check.pass) continue;
    pass = false;
    log.warn("FAIL " + check.name + " N=" + std::to_string(check.parameters.n) + " " +
             check.parameters.auxiliary);
  }
  std::ostringstream os;
  os << "computed-state budget " << table.budget << " electrons";
  log.info(os.str());
  return pass ? 0 : 1;
}

}  // namespace

int run(const RunConfig& config, std::ostream& out, std::ostream& log_stream) {
  const Log log(log_stream, config.quiet);
  try {
    SpectrumStore store(config.cache_dir, [&log](const std::string& m) { log.info(m); });
    int status = 0;
    if (config.command == "spectrum") status = run_spectrum(config, store, out, log);
    else if (config.command == "density") status = run_density(config, store, out, log);
    else if (config.command == "verify") status = run_verify(config, store, out, log);
    else if (config.command == "majorant") status = run_majorant(config, store, out, log);
    else if (config.command == "scott") status = run_scott(config, store, out, log);
    else throw ConfigError("unknown command '" + config.command + "'");
    const auto stats = store.stats();
    log.info("cache: " + std::to_string(stats.computed) + " computed, " +
             std::to_string(stats.disk_hits) + " from disk, " +
             std::to_string(stats.memory_hits) + " memory hits");
    return status;
  } catch (const ConfigError& e) {
    log.warn(std::string("error: configuration: ") + e.what());
    return 2;
  } catch (const DomainError& e) {
    log.warn(std::string("error: domain: ") + e.what());
    return 3;
  } catch (const Error& e) {
    log.warn(std::string("error: ") + e.what());
    return 4;
  } catch (const std::exception& e) {
    log.warn(std::string("error: unexpected: ") + e.what());
    return 5;
  }
}

}  // namespace scottlab::cli
