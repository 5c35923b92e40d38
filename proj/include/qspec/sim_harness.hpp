#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "qspec/null_models.hpp"

namespace qspec {

// Matched-moment size/power study: one direction fits an AR(1) null against
// squared-ARCH(1) data, the other swaps the roles. The two processes share
// their mean and full autocovariance, so only the quantile spectra separate
// them. For each a the AR(1) parameters are the matched ones.
struct ExperimentPlan {
  enum class Direction { Ar1Null, ArchNull };

  Direction direction = Direction::Ar1Null;
  double a0 = 0.4;                 // ARCH intercept shared by every cell
  std::vector<double> a_values{0.3, 0.4, 0.5, 0.55};
  std::vector<int> M_values{11, 16, 21, 25};
  int T = 100;
  std::vector<double> alphas{0.1, 0.05};
  bool normal = true;
  bool bootstrap = true;
  int bootstrap_reps = 200;
  int reps = 200;
  std::uint64_t master_seed = 1;
  std::vector<double> levels;      // empty = 0.05, 0.10, ..., 0.95
  McConfig mc;                     // ARCH-direction tables are Monte Carlo

  void validate() const;  // reps >= 50, feasible a (3a^2 < 1), alphas in [0,1)
};

struct RejectionRow {
  double a = 0;
  int M = 0;
  std::string method;      // "normal" | "bootstrap"
  double alpha = 0;
  std::string hypothesis;  // "H0" | "HA"
  double rate = 0;
  double se = 0;           // binomial sqrt(p(1-p)/reps)
  int reps = 0;
  std::optional<double> published_value;
};

struct RejectionTable {
  std::string title;
  int T = 0;
  std::vector<RejectionRow> rows;
};

// Runs every (a, M, alpha, method, hypothesis) cell of the plan. Null tables
// are built once per (model, M) and cached via McConfig::cache_dir; the
// bootstrap reference sample is drawn once per cell (it does not depend on
// the data). Fully deterministic in master_seed; infeasible a values are
// skipped with a note on stderr.
RejectionTable run_experiment(const ExperimentPlan& plan);

// The four published grids: 1 = AR(1) null / T=100, 2 = AR(1) null / T=500,
// 3 = ARCH null / T=100, 4 = ARCH null / T=500. Rows carry the published
// rejection rates side by side for comparison.
RejectionTable reproduce_table(int table_id, int reps_override,
                               int bootstrap_reps = 200, std::uint64_t seed = 1,
                               const McConfig& mc = {});

// Published value for one cell of reproduce_table's grids, if any.
std::optional<double> published_rate(int table_id, double a, int M,
                                 const std::string& method, double alpha,
                                 const std::string& hypothesis);

// CSV with columns a,M,method,alpha,hypothesis,rate,se,reps,published_value.
void write_csv(const RejectionTable& table, std::ostream& out);

nlohmann::json to_json(const RejectionTable& table);

}  // namespace qspec
