// qspec: quantile spectral analysis from the command line.
//
// Exit codes: 0 success, 2 usage error, 3 data error, 4 numerical-integrity
// abort (e.g. a null variance that is not positive).

#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "qspec/gof.hpp"
#include "qspec/null_models.hpp"
#include "qspec/qsd.hpp"
#include "qspec/sim_harness.hpp"
#include "qspec/stats.hpp"
#include "qspec/two_sample.hpp"
#include "qspec/wishart.hpp"

using nlohmann::json;

namespace {

struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------- input ----------

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

bool parse_double(const std::string& s, double& out) {
  try {
    std::size_t pos = 0;
    out = std::stod(s, &pos);
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    return pos == s.size();
  } catch (...) {
    return false;
  }
}

qspec::Series ingest_csv(const std::string& path, const std::string& column,
                         const std::string& transform) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open input file: " + path);
  std::vector<double> raw;
  std::string line;
  int line_no = 0;
  int col = -1;
  bool named = !column.empty() && !std::isdigit(static_cast<unsigned char>(column[0]));
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = split_csv_line(line);
    if (col < 0) {
      if (named) {
        for (std::size_t i = 0; i < cells.size(); ++i)
          if (cells[i] == column) col = static_cast<int>(i);
        if (col < 0)
          throw DataError("column '" + column + "' not found in header of " + path);
        continue;  // header row consumed
      }
      col = column.empty() ? 0 : std::stoi(column);
      double v;  // a non-numeric first row is treated as a header
      if (col < static_cast<int>(cells.size()) &&
          !parse_double(cells[static_cast<std::size_t>(col)], v))
        continue;
    }
    if (col >= static_cast<int>(cells.size()))
      throw DataError(path + ": line " + std::to_string(line_no) +
                      ": missing column " + std::to_string(col));
    double v = 0.0;
    const std::string& cell = cells[static_cast<std::size_t>(col)];
    if (!parse_double(cell, v))
      throw DataError(path + ": line " + std::to_string(line_no) +
                      ": malformed number '" + cell + "'");
    if (!std::isfinite(v))
      throw DataError(path + ": line " + std::to_string(line_no) + ": non-finite value");
    raw.push_back(v);
  }
  qspec::Series s;
  s.name = path;
  if (transform == "log-return") {
    if (raw.size() < 9) throw DataError(path + ": need >= 9 rows for log-return");
    for (std::size_t i = 0; i < raw.size(); ++i)
      if (raw[i] <= 0.0)
        throw DataError(path + ": non-positive price at observation " +
                        std::to_string(i + 1) + " under log-return");
    for (std::size_t i = 1; i < raw.size(); ++i)
      s.values.push_back(std::log(raw[i]) - std::log(raw[i - 1]));
  } else if (transform == "none") {
    s.values = std::move(raw);
  } else {
    throw std::invalid_argument("--transform must be none or log-return");
  }
  return s;
}

// ---------- option parsing ----------

std::vector<double> parse_levels(const std::string& spec) {
  if (spec.empty()) return qspec::default_levels();
  std::vector<double> out;
  if (spec.find(':') != std::string::npos) {
    double lo, hi, step;
    char c1, c2;
    std::istringstream ss(spec);
    if (!(ss >> lo >> c1 >> hi >> c2 >> step) || c1 != ':' || c2 != ':' || step <= 0)
      throw std::invalid_argument("--levels expects lo:hi:step or a comma list");
    for (double u = lo; u <= hi + 1e-12; u += step) out.push_back(u);
  } else {
    for (const auto& tok : split_csv_line(spec)) {
      double v;
      if (!parse_double(tok, v))
        throw std::invalid_argument("--levels: malformed level '" + tok + "'");
      out.push_back(v);
    }
  }
  for (double u : out)
    if (!(u > 0.0 && u < 1.0))
      throw std::invalid_argument("--levels must lie strictly inside (0,1)");
  return out;
}

qspec::LagWindowSpec parse_window(const std::string& kind, int M) {
  if (M < 1) throw std::invalid_argument("--M must be >= 1");
  if (kind == "bartlett") return qspec::LagWindowSpec::bartlett(M);
  if (kind == "truncated") return qspec::LagWindowSpec::truncated(M);
  if (kind.rfind("tukey:", 0) == 0) {
    std::ifstream in(kind.substr(6));
    if (!in) throw DataError("cannot open window file: " + kind.substr(6));
    json j = json::parse(in);
    return qspec::LagWindowSpec::tukey(M, j.at("a").get<std::vector<double>>(),
                                       j.value("b", std::vector<double>{}));
  }
  throw std::invalid_argument("--window must be bartlett, truncated, or tukey:<file>");
}

qspec::NullModel parse_null_model(const std::string& spec) {
  if (spec.empty()) throw std::invalid_argument("--null is required");
  if (spec[0] == '@') {
    std::ifstream in(spec.substr(1));
    if (!in) throw DataError("cannot open null-model file: " + spec.substr(1));
    return qspec::NullModel::from_json(json::parse(in));
  }
  if (spec[0] == '{') return qspec::NullModel::from_json(json::parse(spec));
  return qspec::NullModel::preset(spec);
}

std::uint64_t resolve_seed(CLI::App* cmd, std::uint64_t flag_value) {
  if (cmd->count("--seed")) return flag_value;
  if (const char* env = std::getenv("QSPEC_SEED")) return std::strtoull(env, nullptr, 10);
  return flag_value;
}

// ---------- output ----------

json report_for(const qspec::TestReport& r) {
  json j{{"test", r.test_name}, {"statistic", r.statistic}, {"E_T", r.E_T},
         {"V_T", r.V_T},        {"z", r.z},                 {"p_normal", r.p_normal}};
  if (r.p_bootstrap) {
    j["p_bootstrap"] = *r.p_bootstrap;
    j["bootstrap_reps"] = r.bootstrap_reps;
  }
  return j;
}

void write_report(const std::string& path, const std::string& command,
                  const json& config, const json& result) {
  json report{{"command", command},
              {"config", config},
              {"result", result},
              {"generated_at", static_cast<long long>(std::time(nullptr))}};
  if (path.empty()) return;
  std::ofstream out(path);
  if (!out) throw DataError("cannot write report: " + path);
  out << report.dump(2) << "\n";
}

void print_verdict(const qspec::TestReport& r) {
  std::cout << r.test_name << ": statistic=" << r.statistic << " z=" << r.z
            << " p_normal=" << r.p_normal;
  if (r.p_bootstrap)
    std::cout << " p_bootstrap=" << *r.p_bootstrap << " (" << r.bootstrap_reps
              << " reps)";
  std::cout << "\n";
}

// Shared flags for commands that estimate a spectrum from one input file.
struct CommonOpts {
  std::string input, column, transform = "none";
  std::string levels_spec, window_kind = "bartlett";
  int M = 0;
  std::uint64_t seed = 1;
  std::string out;
  int threads = 1;

  void attach(CLI::App* cmd, bool need_input = true) {
    auto* in = cmd->add_option("--input", input, "input CSV file");
    if (need_input) in->required();
    cmd->add_option("--column", column, "CSV column index or header name (default: first)");
    cmd->add_option("--transform", transform, "none | log-return")
        ->check(CLI::IsMember({"none", "log-return"}));
    cmd->add_option("--levels", levels_spec,
                    "quantile levels, lo:hi:step or comma list (default 0.05:0.95:0.05)");
    cmd->add_option("--window", window_kind, "bartlett | truncated | tukey:<file>");
    cmd->add_option("--M", M, "lag-window bandwidth")->required();
    cmd->add_option("--seed", seed, "RNG seed (QSPEC_SEED env is the fallback)");
    cmd->add_option("--out", out, "JSON report path");
    cmd->add_option("--threads", threads, "parallelism cap");
    cmd->set_config("--config", "", "config file (flags override)");
  }

  json echo(CLI::App* cmd) const {
    return json{{"input", input},
                {"column", column.empty() ? "0" : column},
                {"transform", transform},
                {"levels", parse_levels(levels_spec)},
                {"window", window_kind},
                {"M", M},
                {"seed", resolve_seed(cmd, seed)},
                {"threads", threads}};
  }
};

int run(int argc, char** argv) {
  CLI::App app{"quantile spectral density estimation and tests"};
  app.require_subcommand(1);

  // estimate
  auto* est_cmd = app.add_subcommand("estimate", "estimate the quantile spectral density");
  CommonOpts est;
  est.attach(est_cmd);
  bool copula = false;
  double band_alpha = 0.05;
  std::string spectra_out;
  est_cmd->add_flag("--copula", copula, "rank-based (copula) variant");
  est_cmd->add_option("--band-alpha", band_alpha, "pointwise band level (0 disables)");
  est_cmd->add_option("--spectra", spectra_out, "tidy CSV of the estimated spectra");

  // gof
  auto* gof_cmd = app.add_subcommand("gof", "goodness-of-fit test against a null model");
  CommonOpts gof;
  gof.attach(gof_cmd);
  std::string null_spec, cache_dir, dump_bootstrap;
  int bootstrap_reps = 0;
  long long mc_n = 1000000;
  bool force_mc = false, plug_in = false;
  gof_cmd->add_option("--null", null_spec, "null model: preset name, inline JSON, or @file")
      ->required();
  gof_cmd->add_option("--bootstrap", bootstrap_reps, "bootstrap replicates (0 = normal only)");
  gof_cmd->add_option("--mc-n", mc_n, "Monte Carlo path length for non-analytic tables");
  gof_cmd->add_option("--cache-dir", cache_dir, "directory for cached null tables");
  gof_cmd->add_flag("--force-mc", force_mc, "Monte Carlo tables even when analytic exist");
  gof_cmd->add_flag("--plug-in-moments", plug_in, "moments from the data estimate");
  gof_cmd->add_option("--dump-bootstrap", dump_bootstrap, "CSV of bootstrap statistics");

  // two-sample
  auto* two_cmd = app.add_subcommand("two-sample", "equality of serial dependence structure");
  CommonOpts two;
  two.attach(two_cmd);
  std::string input2, column2, transform2;
  two_cmd->add_option("--input2", input2, "second input CSV file")->required();
  two_cmd->add_option("--column2", column2, "column for the second file");
  two_cmd->add_option("--transform2", transform2, "transform for the second file");
  int two_boot = 0;
  two_cmd->add_option("--bootstrap", two_boot, "bootstrap replicates (0 = normal only)");

  // reversibility
  auto* rev_cmd = app.add_subcommand("reversibility", "time-reversibility bootstrap test");
  CommonOpts rev;
  rev.attach(rev_cmd);
  int rev_reps = 500;
  rev_cmd->add_option("--reps", rev_reps, "bootstrap replicates");

  // reproduce
  auto* rep_cmd = app.add_subcommand("reproduce", "re-run a published size/power grid");
  int table_id = 0, rep_reps = 200, rep_boot = 200;
  std::uint64_t rep_seed = 1;
  std::string rep_out, rep_cache;
  long long rep_mc_n = 1000000;
  rep_cmd->add_option("--table", table_id, "table id 1-4")->required();
  rep_cmd->add_option("--reps", rep_reps, "replications per cell (>= 50)");
  rep_cmd->add_option("--bootstrap-reps", rep_boot, "bootstrap replicates per cell");
  rep_cmd->add_option("--seed", rep_seed, "master seed");
  rep_cmd->add_option("--mc-n", rep_mc_n, "Monte Carlo path length for ARCH tables");
  rep_cmd->add_option("--cache-dir", rep_cache, "directory for cached null tables");
  rep_cmd->add_option("--out", rep_out, "output CSV path (default stdout)");
  int rep_threads = 1;
  rep_cmd->add_option("--threads", rep_threads, "parallelism cap");
  rep_cmd->set_config("--config");

  // simulate
  auto* sim_cmd = app.add_subcommand("simulate", "draw a sample path from a model");
  std::string sim_model, sim_out;
  int sim_T = 0;
  std::uint64_t sim_seed = 1;
  sim_cmd->add_option("--model", sim_model, "model: preset name, inline JSON, or @file")
      ->required();
  sim_cmd->add_option("--T", sim_T, "sample size")->required();
  sim_cmd->add_option("--seed", sim_seed, "RNG seed");
  sim_cmd->add_option("--out", sim_out, "output CSV (default stdout)");
  sim_cmd->set_config("--config");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (est_cmd->parsed()) {
    qspec::Series x = ingest_csv(est.input, est.column, est.transform);
    auto levels = parse_levels(est.levels_spec);
    auto window = parse_window(est.window_kind, est.M);
    qspec::QsdEstimate g =
        copula ? qspec::estimate_copula_qsd(x, levels, window)
               : qspec::estimate_qsd(x, qspec::empirical_grid(x, levels), window);
    json config = est.echo(est_cmd);
    config["copula"] = copula;
    config["band_alpha"] = band_alpha;
    if (!spectra_out.empty()) {
      std::ofstream out(spectra_out);
      if (!out) throw DataError("cannot write spectra: " + spectra_out);
      out << "x_i,x_j,omega,re,im,ci_lo_re,ci_hi_re,ci_lo_im,ci_hi_im\n";
      for (int i = 0; i < g.q; ++i)
        for (int j = 0; j < g.q; ++j)
          for (int k = 0; k < g.T; ++k) {
            auto v = g.at(i, j, k);
            out << g.grid.thresholds[static_cast<std::size_t>(i)] << ','
                << g.grid.thresholds[static_cast<std::size_t>(j)] << ',' << g.omega(k)
                << ',' << v.real() << ',' << v.imag();
            double w = g.omega(k);
            if (band_alpha > 0.0 && w > 0.0 && w < M_PI) {
              auto band = qspec::confidence_band(g, i, j, k, band_alpha);
              out << ',' << band.re_lo << ',' << band.re_hi << ',' << band.im_lo << ','
                  << band.im_hi;
            } else {
              out << ",,,,";
            }
            out << "\n";
          }
    }
    json result{{"T", g.T},
                {"q", g.q},
                {"thresholds", g.grid.thresholds},
                {"spectra_csv", spectra_out}};
    write_report(est.out, "estimate", config, result);
    std::cout << "estimate: T=" << g.T << " q=" << g.q << " M=" << est.M
              << (spectra_out.empty() ? "" : " -> " + spectra_out) << "\n";
    return 0;
  }

  if (gof_cmd->parsed()) {
    qspec::Series x = ingest_csv(gof.input, gof.column, gof.transform);
    auto levels = parse_levels(gof.levels_spec);
    auto window = parse_window(gof.window_kind, gof.M);
    qspec::NullModel model = parse_null_model(null_spec);
    qspec::McConfig mc;
    mc.N = mc_n;
    mc.cache_dir = cache_dir;
    mc.force_monte_carlo = force_mc;
    auto tables = qspec::null_tables(model, levels, gof.M, mc);
    qspec::GofOptions opts;
    opts.plug_in_moments = plug_in;
    opts.bootstrap_reps = bootstrap_reps;
    opts.seed = resolve_seed(gof_cmd, gof.seed);
    qspec::TestReport r = qspec::gof_test(x, tables, window, opts);
    if (!dump_bootstrap.empty() && bootstrap_reps > 0) {
      auto boot = qspec::bootstrap_pvalue(r.statistic, tables, window, x.length(),
                                          bootstrap_reps, opts.seed);
      std::ofstream out(dump_bootstrap);
      if (!out) throw DataError("cannot write bootstrap dump: " + dump_bootstrap);
      out << "q_star\n";
      for (double s : boot.samples) out << s << "\n";
    }
    json config = gof.echo(gof_cmd);
    config["null"] = model.to_json();
    config["bootstrap"] = bootstrap_reps;
    config["mc_n"] = mc_n;
    config["plug_in_moments"] = plug_in;
    write_report(gof.out, "gof", config, report_for(r));
    print_verdict(r);
    return 0;
  }

  if (two_cmd->parsed()) {
    qspec::Series x = ingest_csv(two.input, two.column, two.transform);
    qspec::Series y = ingest_csv(input2, column2.empty() ? two.column : column2,
                                 transform2.empty() ? two.transform : transform2);
    auto levels = parse_levels(two.levels_spec);
    auto window = parse_window(two.window_kind, two.M);
    qspec::TwoSampleOptions opts;
    opts.bootstrap_reps = two_boot;
    opts.seed = resolve_seed(two_cmd, two.seed);
    qspec::TestReport r = qspec::two_sample_test(x, y, levels, window, opts);
    json config = two.echo(two_cmd);
    config["input2"] = input2;
    config["bootstrap"] = two_boot;
    write_report(two.out, "two-sample", config, report_for(r));
    print_verdict(r);
    return 0;
  }

  if (rev_cmd->parsed()) {
    qspec::Series x = ingest_csv(rev.input, rev.column, rev.transform);
    auto levels = parse_levels(rev.levels_spec);
    auto window = parse_window(rev.window_kind, rev.M);
    qspec::TestReport r = qspec::reversibility_test(x, levels, window, rev_reps,
                                                    resolve_seed(rev_cmd, rev.seed));
    json config = rev.echo(rev_cmd);
    config["reps"] = rev_reps;
    write_report(rev.out, "reversibility", config, report_for(r));
    print_verdict(r);
    return 0;
  }

  if (rep_cmd->parsed()) {
    qspec::McConfig mc;
    mc.N = rep_mc_n;
    mc.cache_dir = rep_cache;
    qspec::RejectionTable table =
        qspec::reproduce_table(table_id, rep_reps, rep_boot, rep_seed, mc);
    if (rep_out.empty()) {
      qspec::write_csv(table, std::cout);
    } else {
      std::ofstream out(rep_out);
      if (!out) throw DataError("cannot write table: " + rep_out);
      qspec::write_csv(table, out);
      std::cout << table.title << " -> " << rep_out << " (" << table.rows.size()
                << " rows)\n";
    }
    return 0;
  }

  if (sim_cmd->parsed()) {
    qspec::NullModel model = parse_null_model(sim_model);
    std::uint64_t seed = sim_cmd->count("--seed")
                             ? sim_seed
                             : (std::getenv("QSPEC_SEED")
                                    ? std::strtoull(std::getenv("QSPEC_SEED"), nullptr, 10)
                                    : sim_seed);
    qspec::Series x = qspec::simulate(model, sim_T, seed);
    std::ostream* out = &std::cout;
    std::ofstream file;
    if (!sim_out.empty()) {
      file.open(sim_out);
      if (!file) throw DataError("cannot write output: " + sim_out);
      out = &file;
    }
    *out << "x\n";
    out->precision(17);
    for (double v : x.values) *out << v << "\n";
    return 0;
  }

  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const CLI::ParseError&) {
    return 2;  // unreachable: CLI11_PARSE handles these
  } catch (const qspec::NumericalError& e) {
    std::cerr << "numerical integrity error: " << e.what() << "\n";
    return 4;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
