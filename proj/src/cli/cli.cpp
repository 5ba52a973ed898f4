#include "xicorr/cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "xicorr/error.hpp"
#include "xicorr/exact_oracle.hpp"
#include "xicorr/format.hpp"
#include "xicorr/hightest.hpp"
#include "xicorr/montecarlo.hpp"
#include "xicorr/parallel.hpp"

namespace xicorr::cli {
namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(trim(std::string_view(line).substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return fields;
}

std::optional<double> parse_number(const std::string& field) {
  double v = 0.0;
  const char* first = field.data();
  const char* last = first + field.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || first == last) return std::nullopt;
  return v;
}

std::uint64_t default_seed(std::ostream& err) {
  if (const char* env = std::getenv(kSeedEnv); env != nullptr && *env != '\0') {
    std::uint64_t seed = 0;
    const std::string_view text(env);
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), seed);
    if (ec == std::errc() && ptr == text.data() + text.size()) return seed;
    err << "warning: ignoring malformed " << kSeedEnv << "='" << env << "'\n";
  }
  return 1;
}

std::string joined_command(int argc, const char* const* argv) {
  std::string s;
  for (int i = 0; i < argc; ++i) {
    if (i) s += ' ';
    s += argv[i];
  }
  return s;
}

/// Destination that is either a file or the given stream.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary);
      if (!file_) throw Error(ErrorCode::ParseError, "cannot open output file '" + path + "'");
      stream_ = &file_;
    }
  }
  std::ostream& get() { return *stream_; }
  bool is_file() const { return file_.is_open(); }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

struct Common {
  std::uint64_t seed = 0;
  unsigned threads = 0;
  std::string output;
};

void comment_line(std::ostream& out, const std::string& command, std::uint64_t seed) {
  out << "# xicorr " << kVersion << "; command: " << command << "; seed: " << seed << '\n';
}

std::vector<Statistic> parse_stats(const std::vector<std::string>& names) {
  std::vector<Statistic> stats;
  for (const auto& name : names) {
    if (name == "all") {
      stats.assign(kAllStatistics.begin(), kAllStatistics.end());
      continue;
    }
    stats.push_back(parse_statistic(name));
  }
  if (stats.empty()) stats.assign(kAllStatistics.begin(), kAllStatistics.end());
  return stats;
}

struct TestOptions {
  std::string input;
  std::vector<std::string> stats;
  double alpha = 0.05;
  std::string calibration = "asymptotic";
  std::size_t mc_reps = 1000;
  std::string null_generator = "gaussian";
  std::string ties = "error";
  std::optional<double> q_xi4_centering;
  std::vector<std::string> thresholds;
};

TestConfig make_test_config(const TestOptions& o, const Common& c) {
  TestConfig config;
  config.alpha = o.alpha;
  config.calibration = o.calibration == "monte_carlo" ? CalibrationMode::monte_carlo : CalibrationMode::asymptotic;
  config.mc_reps = o.mc_reps;
  config.mc_seed = c.seed;
  config.null_generator = o.null_generator == "cauchy" ? NullGenerator::cauchy : NullGenerator::gaussian;
  config.threads = c.threads;
  config.q_xi4_centering = o.q_xi4_centering;
  for (const auto& item : o.thresholds) {
    const auto eq = item.find('=');
    const auto value = eq == std::string::npos ? std::nullopt : parse_number(item.substr(eq + 1));
    if (!value) throw Error(ErrorCode::ParseError, "expected STAT=VALUE, got '" + item + "'");
    config.threshold_overrides[parse_statistic(item.substr(0, eq))] = *value;
  }
  return config;
}

int cmd_test(const TestOptions& o, const Common& c, const std::string& command, std::ostream& out,
             std::ostream& err) {
  try {
    std::ifstream in(o.input, std::ios::binary);
    if (!in) throw Error(ErrorCode::ParseError, "cannot open input file '" + o.input + "'");
    const DataMatrix data = read_csv(in);
    const auto stats = parse_stats(o.stats);
    const TestConfig config = make_test_config(o, c);
    const TiePolicy ties = o.ties == "random" ? TiePolicy::random(c.seed) : TiePolicy::error();
    const auto reports = run_tests(data, stats, config, ties);

    nlohmann::json doc;
    doc["meta"] = {{"version", kVersion},
                   {"command", command},
                   {"seed", c.seed},
                   {"n", data.n()},
                   {"p", data.p()},
                   {"ties", o.ties},
                   {"alpha", config.alpha},
                   {"calibration", o.calibration}};
    doc["reports"] = nlohmann::json::array();
    for (const auto& r : reports) {
      doc["reports"].push_back(to_json(r));
      if (r.warning) err << "warning: " << *r.warning << '\n';
    }
    Sink sink(c.output, out);
    sink.get() << doc.dump(2) << '\n';
    return kOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.code() == ErrorCode::TiesPresent ? kTies : kInputError;
  }
}

struct SimulateOptions {
  std::string table;
  std::vector<std::string> models;
  std::vector<std::size_t> n;
  std::vector<std::size_t> p;
  bool full_grid = false;
  std::size_t reps = 500;
  std::vector<std::string> stats;
  double alpha = 0.05;
  std::string calibration = "asymptotic";
  std::size_t mc_reps = 1000;
};

int cmd_simulate(const SimulateOptions& o, const Common& c, const std::string& command, std::ostream& out,
                 std::ostream& err) {
  try {
    SimConfig config;
    for (const auto& m : o.models)
      for (char ch : m)
        if (ch != ',' && ch != ' ') config.models.push_back(parse_model(ch));
    config.stats = parse_stats(o.stats);
    if (o.full_grid) {
      for (std::size_t s : {50, 70, 100, 200, 300}) config.grid.emplace_back(s, s);
    } else if (o.n.empty() && o.p.empty()) {
      for (std::size_t s : {50, 100}) config.grid.emplace_back(s, s);
    } else {
      if (o.n.size() != o.p.size()) throw Error(ErrorCode::InvalidArgument, "--n and --p need equal lengths");
      for (std::size_t i = 0; i < o.n.size(); ++i) config.grid.emplace_back(o.n[i], o.p[i]);
    }
    config.reps = o.reps;
    config.seed = c.seed;
    config.threads = c.threads;
    config.test.alpha = o.alpha;
    config.test.mc_reps = o.mc_reps;
    config.test.calibration =
        o.calibration == "monte_carlo" ? CalibrationMode::monte_carlo : CalibrationMode::asymptotic;
    const SimTable table = o.table == "size" ? run_size(config) : run_power(config);
    Sink sink(c.output, out);
    comment_line(sink.get(), command, c.seed);
    write_simtable_csv(sink.get(), table);
    return kOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kSimulationConfig;
  }
}

struct EsdOptions {
  std::string kind = "phi";
  std::size_t n = 200;
  std::size_t p = 100;
  std::size_t reps = 5;
  std::size_t bins = 50;
};

int cmd_esd(const EsdOptions& o, const Common& c, const std::string& command, std::ostream& out,
            std::ostream& err) {
  try {
    const auto kind = o.kind == "psi" ? CorrelationKind::psi : CorrelationKind::phi;
    const EsdResult r = run_esd(kind, o.n, o.p, o.reps, o.bins, c.seed, c.threads);
    Sink sink(c.output, out);
    comment_line(sink.get(), command, c.seed);
    write_histogram_csv(sink.get(), r.histogram);
    std::ostream& summary = sink.is_file() ? out : err;
    summary << "ks," << format_double(r.ks) << ",law," << (kind == CorrelationKind::phi ? "W" : "MP") << ','
            << format_double(r.law.first) << ',' << format_double(r.law.second) << ",eigenvalues,"
            << r.pooled.dimension() << '\n';
    return kOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kSimulationConfig;
  }
}

struct CltOptions {
  std::vector<unsigned> k{1, 2};
  std::size_t n = 100;
  std::size_t p = 100;
  std::size_t reps = 1000;
};

int cmd_clt(const CltOptions& o, const Common& c, const std::string& command, std::ostream& out,
            std::ostream& err) {
  try {
    const CltResult r = run_clt(o.k, o.n, o.p, o.reps, c.seed, c.threads);
    Sink sink(c.output, out);
    comment_line(sink.get(), command, c.seed);
    write_clt_csv(sink.get(), r);
    std::ostream& summary = sink.is_file() ? out : err;
    for (const auto& s : r.series)
      summary << "k," << s.k << ",mean," << format_double(s.mean) << ",variance," << format_double(s.variance)
              << ",limit_variance," << format_double(s.limit_variance) << ",skewness,"
              << format_double(s.skewness) << '\n';
    return kOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kSimulationConfig;
  }
}

int cmd_verify(const std::string& suite, const Common& c, std::ostream& out, std::ostream& err) {
  std::vector<oracle::OracleReport> reports;
  try {
    reports = oracle::verify_suite(suite);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }
  Sink sink(c.output, out);
  bool all_match = true;
  for (const auto& r : reports) {
    sink.get() << oracle::format_report(r) << '\n';
    all_match = all_match && r.match;
  }
  return all_match ? kOk : kOracleMismatch;
}

}  // namespace

DataMatrix read_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split(line);
    std::vector<double> row;
    row.reserve(fields.size());
    bool numeric = true;
    for (const auto& f : fields) {
      const auto v = parse_number(f);
      if (!v) {
        numeric = false;
        break;
      }
      row.push_back(*v);
    }
    if (!numeric) {
      if (first) {
        first = false;
        continue;  // header
      }
      throw Error(ErrorCode::ParseError, "non-numeric field on line " + std::to_string(line_no));
    }
    first = false;
    if (!rows.empty() && row.size() != rows.front().size())
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + " has " + std::to_string(row.size()) +
                                             " fields, expected " + std::to_string(rows.front().size()));
    rows.push_back(std::move(row));
  }
  if (rows.size() < 3 || rows.front().size() < 2)
    throw Error(ErrorCode::ParseError, "need at least 3 rows and 2 columns of data");
  return DataMatrix::from_rows(rows);
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"High-dimensional independence testing with Chatterjee's rank correlation"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  Common common;
  common.seed = default_seed(err);
  common.threads = default_threads();
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", common.seed, std::string("Master seed (default from ") + kSeedEnv + ", else 1)");
    sub->add_option("--threads", common.threads, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_option("-o,--output", common.output, "Output file (default stdout)");
  };

  TestOptions test;
  auto* test_cmd = app.add_subcommand("test", "Run independence tests on a CSV data matrix");
  test_cmd->add_option("input", test.input, "CSV file, one observation per row")->required();
  test_cmd->add_option("--stats", test.stats, "Statistics (e.g. Q_xi2,Q_xi4) or 'all'")->delimiter(',');
  test_cmd->add_option("--alpha", test.alpha, "Significance level");
  test_cmd->add_option("--calibration", test.calibration, "Critical values")
      ->check(CLI::IsMember({"asymptotic", "monte_carlo"}));
  test_cmd->add_option("--mc-reps", test.mc_reps, "Null replications for simulated thresholds");
  test_cmd->add_option("--null-generator", test.null_generator, "Null column distribution")
      ->check(CLI::IsMember({"gaussian", "cauchy"}));
  test_cmd->add_option("--ties", test.ties, "Tie handling")->check(CLI::IsMember({"error", "random"}));
  test_cmd->add_option("--q-xi4-centering", test.q_xi4_centering, "Use this E tr(Psi^2) instead of simulating it");
  test_cmd->add_option("--threshold", test.thresholds, "Critical value override STAT=VALUE");
  add_common(test_cmd);

  SimulateOptions sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Empirical size or power tables");
  sim_cmd->add_option("table", sim.table, "size or power")->required()->check(CLI::IsMember({"size", "power"}));
  sim_cmd->add_option("--model", sim.models, "Models a-f (default: all of the table)");
  sim_cmd->add_option("--n", sim.n, "Sample sizes, paired with --p")->delimiter(',');
  sim_cmd->add_option("--p", sim.p, "Dimensions, paired with --n")->delimiter(',');
  sim_cmd->add_flag("--full-grid", sim.full_grid, "n = p in {50, 70, 100, 200, 300} (slow)");
  sim_cmd->add_option("--reps", sim.reps, "Replications per cell");
  sim_cmd->add_option("--stats", sim.stats, "Statistics or 'all'")->delimiter(',');
  sim_cmd->add_option("--alpha", sim.alpha, "Significance level");
  sim_cmd->add_option("--calibration", sim.calibration, "Critical values")
      ->check(CLI::IsMember({"asymptotic", "monte_carlo"}));
  sim_cmd->add_option("--mc-reps", sim.mc_reps, "Null replications for simulated thresholds");
  add_common(sim_cmd);

  EsdOptions esd;
  auto* esd_cmd = app.add_subcommand("esd", "Pooled spectrum of Phi or Psi against its limit law");
  esd_cmd->add_option("--kind", esd.kind, "phi or psi")->check(CLI::IsMember({"phi", "psi"}));
  esd_cmd->add_option("--n", esd.n, "Sample size");
  esd_cmd->add_option("--p", esd.p, "Dimension");
  esd_cmd->add_option("--reps", esd.reps, "Replications pooled");
  esd_cmd->add_option("--bins", esd.bins, "Histogram bins");
  add_common(esd_cmd);

  CltOptions clt;
  auto* clt_cmd = app.add_subcommand("clt", "Null draws of tr(Psi^k)");
  clt_cmd->add_option("--k", clt.k, "Trace powers")->delimiter(',');
  clt_cmd->add_option("--n", clt.n, "Sample size");
  clt_cmd->add_option("--p", clt.p, "Dimension");
  clt_cmd->add_option("--reps", clt.reps, "Replications (at least 200)");
  add_common(clt_cmd);

  std::string suite = "all";
  auto* verify_cmd = app.add_subcommand("verify", "Exact enumeration checks of closed-form constants");
  verify_cmd->add_option("--suite", suite, "all, counterexample, arrow, mean_tr_psi, jxi, tree or moments");
  add_common(verify_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInputError;
  }

  const std::string command = joined_command(argc, argv);
  try {
    if (test_cmd->parsed()) return cmd_test(test, common, command, out, err);
    if (sim_cmd->parsed()) return cmd_simulate(sim, common, command, out, err);
    if (esd_cmd->parsed()) return cmd_esd(esd, common, command, out, err);
    if (clt_cmd->parsed()) return cmd_clt(clt, common, command, out, err);
    return cmd_verify(suite, common, out, err);
  } catch (const Error& e) {
    // Output files that cannot be opened.
    err << "error: " << e.what() << '\n';
    return kInputError;
  }
}

}  // namespace xicorr::cli
