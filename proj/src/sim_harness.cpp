#include "qspec/sim_harness.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "qspec/gof.hpp"
#include "qspec/stats.hpp"
#include "qspec/wishart.hpp"

namespace qspec {

namespace {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t id) {
  std::uint64_t s = seed + 0x9E3779B97F4A7C15ULL * (id + 1);
  return splitmix64(s);
}

bool feasible(double a) { return a > 0.0 && 3.0 * a * a < 1.0; }

// Published rejection rates. Eight numbers per (a, M) row, in column order:
// alpha=0.1 bootstrap H0/HA, normal H0/HA; alpha=0.05 the same.
struct PublishedRow {
  double a;
  int M;
  double v[8];
};

const PublishedRow kTable1[] = {
    {0.3, 11, {0.052, 1, 0.076, 1, 0.021, 0.972, 0.054, 1}},
    {0.3, 16, {0.04, 0.869, 0.062, 0.971, 0.011, 0.262, 0.04, 0.854}},
    {0.3, 21, {0.048, 0.386, 0.064, 0.561, 0.021, 0.106, 0.043, 0.348}},
    {0.3, 25, {0.021, 0.071, 0.048, 0.229, 0.014, 0.016, 0.029, 0.12}},
    {0.4, 11, {0.048, 1, 0.082, 1, 0.02, 1, 0.055, 1}},
    {0.4, 16, {0.043, 1, 0.059, 1, 0.013, 0.939, 0.041, 1}},
    {0.4, 21, {0.046, 0.932, 0.066, 0.997, 0.011, 0.416, 0.046, 0.929}},
    {0.4, 25, {0.036, 0.582, 0.055, 0.832, 0.01, 0.124, 0.037, 0.598}},
    {0.5, 11, {0.046, 1, 0.073, 1, 0.015, 1, 0.052, 1}},
    {0.5, 16, {0.049, 1, 0.078, 1, 0.027, 1, 0.045, 1}},
    {0.5, 21, {0.046, 1, 0.06, 1, 0.015, 0.985, 0.037, 1}},
    {0.5, 25, {0.047, 1, 0.062, 1, 0.015, 0.397, 0.043, 1}},
    {0.55, 11, {0.041, 1, 0.096, 1, 0.018, 1, 0.057, 1}},
    {0.55, 16, {0.045, 1, 0.066, 1, 0.017, 1, 0.046, 1}},
    {0.55, 21, {0.065, 1, 0.06, 1, 0.034, 1, 0.034, 1}},
    {0.55, 25, {0.045, 1, 0.051, 1, 0.024, 1, 0.032, 1}},
};

const PublishedRow kTable2[] = {
    {0.3, 14, {0.053, 1, 0.098, 1, 0.024, 1, 0.063, 1}},
    {0.3, 21, {0.064, 1, 0.082, 1, 0.023, 1, 0.052, 1}},
    {0.3, 28, {0.06, 1, 0.093, 1, 0.024, 1, 0.062, 1}},
    {0.3, 35, {0.07, 1, 0.086, 1, 0.033, 1, 0.062, 1}},
    {0.4, 14, {0.043, 1, 0.092, 1, 0.014, 1, 0.064, 1}},
    {0.4, 21, {0.058, 1, 0.092, 1, 0.015, 1, 0.056, 1}},
    {0.4, 28, {0.066, 1, 0.094, 1, 0.03, 1, 0.061, 1}},
    {0.4, 35, {0.073, 1, 0.087, 1, 0.032, 1, 0.052, 1}},
    {0.5, 14, {0.031, 1, 0.105, 1, 0.018, 1, 0.072, 1}},
    {0.5, 21, {0.059, 1, 0.079, 1, 0.03, 1, 0.05, 1}},
    {0.5, 28, {0.076, 1, 0.111, 1, 0.046, 1, 0.069, 1}},
    {0.5, 35, {0.053, 1, 0.086, 1, 0.022, 1, 0.055, 1}},
    {0.55, 14, {0.038, 1, 0.107, 1, 0.014, 1, 0.077, 1}},
    {0.55, 21, {0.056, 1, 0.108, 1, 0.021, 1, 0.067, 1}},
    {0.55, 28, {0.071, 1, 0.103, 1, 0.032, 1, 0.06, 1}},
    {0.55, 35, {0.051, 1, 0.089, 1, 0.026, 1, 0.06, 1}},
};

const PublishedRow kTable3[] = {
    {0.3, 11, {0.039, 0.994, 0.08, 0.997, 0.022, 0.984, 0.051, 0.995}},
    {0.3, 16, {0.043, 0.978, 0.086, 0.991, 0.009, 0.925, 0.055, 0.983}},
    {0.3, 21, {0.045, 0.98, 0.07, 0.99, 0.016, 0.934, 0.051, 0.983}},
    {0.3, 25, {0.026, 0.939, 0.059, 0.976, 0.011, 0.895, 0.045, 0.965}},
    {0.4, 11, {0.046, 1, 0.086, 1, 0.012, 0.999, 0.053, 1}},
    {0.4, 16, {0.049, 0.993, 0.092, 0.999, 0.014, 0.988, 0.062, 0.996}},
    {0.4, 21, {0.03, 0.994, 0.07, 0.997, 0.017, 0.983, 0.046, 0.997}},
    {0.4, 25, {0.038, 0.994, 0.083, 0.997, 0.024, 0.982, 0.059, 0.994}},
    {0.5, 11, {0.054, 1, 0.107, 1, 0.024, 1, 0.067, 1}},
    {0.5, 16, {0.063, 1, 0.098, 1, 0.03, 1, 0.066, 1}},
    {0.5, 21, {0.051, 1, 0.083, 1, 0.022, 1, 0.061, 1}},
    {0.5, 25, {0.028, 0.997, 0.06, 0.998, 0.012, 0.995, 0.043, 0.998}},
    {0.55, 11, {0.074, 1, 0.113, 1, 0.03, 1, 0.081, 1}},
    {0.55, 16, {0.056, 1, 0.087, 1, 0.02, 1, 0.054, 1}},
    {0.55, 21, {0.065, 1, 0.08, 1, 0.038, 1, 0.057, 1}},
    {0.55, 25, {0.067, 1, 0.088, 1, 0.03, 1, 0.065, 1}},
};

const PublishedRow kTable4[] = {
    {0.3, 14, {0.072, 1, 0.09, 1, 0.025, 1, 0.059, 1}},
    {0.3, 21, {0.062, 1, 0.094, 1, 0.032, 1, 0.059, 1}},
    {0.3, 28, {0.067, 1, 0.097, 1, 0.024, 1, 0.062, 1}},
    {0.3, 35, {0.076, 1, 0.101, 1, 0.026, 1, 0.073, 1}},
    {0.4, 14, {0.045, 1, 0.097, 1, 0.022, 1, 0.059, 1}},
    {0.4, 21, {0.075, 1, 0.105, 1, 0.03, 1, 0.077, 1}},
    {0.4, 28, {0.06, 1, 0.111, 1, 0.024, 1, 0.07, 1}},
    {0.4, 35, {0.085, 1, 0.12, 1, 0.041, 1, 0.086, 1}},
    {0.5, 14, {0.053, 1, 0.129, 1, 0.032, 1, 0.079, 1}},
    {0.5, 21, {0.1, 1, 0.121, 1, 0.054, 1, 0.082, 1}},
    {0.5, 28, {0.111, 1, 0.124, 1, 0.071, 1, 0.085, 1}},
    {0.5, 35, {0.066, 1, 0.117, 1, 0.029, 1, 0.075, 1}},
    {0.55, 14, {0.099, 1, 0.143, 1, 0.047, 1, 0.104, 1}},
    {0.55, 21, {0.074, 1, 0.119, 1, 0.042, 1, 0.083, 1}},
    {0.55, 28, {0.078, 1, 0.11, 1, 0.037, 1, 0.072, 1}},
    {0.55, 35, {0.082, 1, 0.119, 1, 0.037, 1, 0.085, 1}},
};

const PublishedRow* table_rows(int table_id, std::size_t& n) {
  switch (table_id) {
    case 1: n = std::size(kTable1); return kTable1;
    case 2: n = std::size(kTable2); return kTable2;
    case 3: n = std::size(kTable3); return kTable3;
    case 4: n = std::size(kTable4); return kTable4;
    default: throw std::invalid_argument("unknown table id (expected 1..4)");
  }
}

}  // namespace

void ExperimentPlan::validate() const {
  if (reps < 50) throw std::invalid_argument("plan: reps must be >= 50");
  if (T < 16) throw std::invalid_argument("plan: T too small");
  if (a_values.empty() || M_values.empty())
    throw std::invalid_argument("plan: empty a or M grid");
  if (!(a0 > 0.0)) throw std::invalid_argument("plan: a0 must be positive");
  for (double al : alphas)
    if (!(al >= 0.0 && al < 1.0)) throw std::invalid_argument("plan: alpha outside [0,1)");
  if (!normal && !bootstrap) throw std::invalid_argument("plan: no method selected");
  if (bootstrap && bootstrap_reps < 100)
    throw std::invalid_argument("plan: bootstrap reps must be >= 100");
  for (int M : M_values)
    if (2 * M >= T) throw std::invalid_argument("plan: need 2M < T");
}

std::optional<double> published_rate(int table_id, double a, int M,
                                 const std::string& method, double alpha,
                                 const std::string& hypothesis) {
  std::size_t n = 0;
  const PublishedRow* rows = table_rows(table_id, n);
  for (std::size_t r = 0; r < n; ++r) {
    if (std::abs(rows[r].a - a) > 1e-12 || rows[r].M != M) continue;
    int base = std::abs(alpha - 0.1) < 1e-12   ? 0
               : std::abs(alpha - 0.05) < 1e-12 ? 4
                                                : -1;
    if (base < 0) return std::nullopt;
    int off = (method == "bootstrap" ? 0 : method == "normal" ? 2 : -1);
    if (off < 0) return std::nullopt;
    if (hypothesis == "HA")
      off += 1;
    else if (hypothesis != "H0")
      return std::nullopt;
    return rows[r].v[base + off];
  }
  return std::nullopt;
}

RejectionTable run_experiment(const ExperimentPlan& plan) {
  plan.validate();
  std::vector<double> levels = plan.levels.empty() ? default_levels() : plan.levels;
  RejectionTable out;
  out.T = plan.T;
  out.title = plan.direction == ExperimentPlan::Direction::Ar1Null
                  ? "H0 AR(1) vs HA squared-ARCH(1)"
                  : "H0 squared-ARCH(1) vs HA AR(1)";

  std::uint64_t cell_index = 0;
  for (double a : plan.a_values) {
    if (!feasible(a)) {
      std::fprintf(stderr, "skipping a=%g: fourth moment infeasible (3a^2 >= 1)\n", a);
      cell_index += plan.M_values.size();
      continue;
    }
    NullModel arch = NullModel::squared_arch1(plan.a0, a);
    NullModel ar1 = matched_ar1_for_squared_arch(plan.a0, a);
    bool ar1_null = plan.direction == ExperimentPlan::Direction::Ar1Null;
    const NullModel& null_model = ar1_null ? ar1 : arch;
    const NullModel& alt_model = ar1_null ? arch : ar1;

    for (int M : plan.M_values) {
      std::uint64_t cell_seed = derive_seed(plan.master_seed, cell_index++);
      LagWindowSpec window = LagWindowSpec::bartlett(M);
      NullModelTables tables = null_tables(null_model, levels, M, plan.mc);
      auto [e_t, v_t] = null_moments(tables, window, plan.T);
      double sd = std::sqrt(v_t);

      std::vector<double> boot_sample;
      if (plan.bootstrap)
        boot_sample = bootstrap_pvalue(0.0, tables, window, plan.T, plan.bootstrap_reps,
                                       derive_seed(cell_seed, 0))
                          .samples;

      // rejection counters: [hypothesis][alpha][method 0=boot 1=normal]
      std::vector<std::vector<std::array<int, 2>>> hits(
          2, std::vector<std::array<int, 2>>(plan.alphas.size(), {0, 0}));
      for (int h = 0; h < 2; ++h) {
        const NullModel& gen = h == 0 ? null_model : alt_model;
        for (int rep = 0; rep < plan.reps; ++rep) {
          Series x = simulate(gen, plan.T,
                              derive_seed(cell_seed, 1 + 2 * static_cast<std::uint64_t>(rep) + h));
          double q = q_statistic(x, tables, window);
          double p_norm = 1.0 - normal_cdf((q - e_t) / sd);
          double p_boot = 1.0;
          if (plan.bootstrap) {
            int exceed = 0;
            for (double s : boot_sample)
              if (s >= q) ++exceed;
            p_boot = static_cast<double>(1 + exceed) / (plan.bootstrap_reps + 1);
          }
          for (std::size_t ai = 0; ai < plan.alphas.size(); ++ai) {
            if (plan.bootstrap && p_boot <= plan.alphas[ai]) ++hits[h][ai][0];
            if (plan.normal && p_norm < plan.alphas[ai]) ++hits[h][ai][1];
          }
        }
      }

      for (std::size_t ai = 0; ai < plan.alphas.size(); ++ai) {
        for (int m = 0; m < 2; ++m) {
          if (m == 0 && !plan.bootstrap) continue;
          if (m == 1 && !plan.normal) continue;
          for (int h = 0; h < 2; ++h) {
            RejectionRow row;
            row.a = a;
            row.M = M;
            row.method = m == 0 ? "bootstrap" : "normal";
            row.alpha = plan.alphas[ai];
            row.hypothesis = h == 0 ? "H0" : "HA";
            row.rate = static_cast<double>(hits[h][ai][m]) / plan.reps;
            row.se = std::sqrt(row.rate * (1.0 - row.rate) / plan.reps);
            row.reps = plan.reps;
            out.rows.push_back(std::move(row));
          }
        }
      }
    }
  }
  return out;
}

RejectionTable reproduce_table(int table_id, int reps_override, int bootstrap_reps,
                               std::uint64_t seed, const McConfig& mc) {
  std::size_t n = 0;
  table_rows(table_id, n);  // validates the id
  ExperimentPlan plan;
  plan.direction = table_id <= 2 ? ExperimentPlan::Direction::Ar1Null
                                 : ExperimentPlan::Direction::ArchNull;
  plan.T = (table_id == 2 || table_id == 4) ? 500 : 100;
  plan.M_values = plan.T == 500 ? std::vector<int>{14, 21, 28, 35}
                                : std::vector<int>{11, 16, 21, 25};
  plan.reps = reps_override;
  plan.bootstrap_reps = bootstrap_reps;
  plan.master_seed = seed;
  plan.mc = mc;
  RejectionTable table = run_experiment(plan);
  table.title += plan.T == 500 ? ", T=500" : ", T=100";
  for (auto& row : table.rows)
    row.published_value = published_rate(table_id, row.a, row.M, row.method, row.alpha,
                                 row.hypothesis);
  return table;
}

void write_csv(const RejectionTable& table, std::ostream& out) {
  out << "a,M,method,alpha,hypothesis,rate,se,reps,published_value\n";
  char buf[160];
  for (const auto& r : table.rows) {
    std::snprintf(buf, sizeof buf, "%g,%d,%s,%g,%s,%g,%g,%d,", r.a, r.M,
                  r.method.c_str(), r.alpha, r.hypothesis.c_str(), r.rate, r.se,
                  r.reps);
    out << buf;
    if (r.published_value) out << *r.published_value;
    out << "\n";
  }
}

nlohmann::json to_json(const RejectionTable& table) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : table.rows) {
    nlohmann::json j{{"a", r.a},          {"M", r.M},
                     {"method", r.method}, {"alpha", r.alpha},
                     {"hypothesis", r.hypothesis}, {"rate", r.rate},
                     {"se", r.se},        {"reps", r.reps}};
    if (r.published_value) j["published_value"] = *r.published_value;
    rows.push_back(std::move(j));
  }
  return nlohmann::json{{"title", table.title}, {"T", table.T}, {"rows", rows}};
}

}  // namespace qspec
