#include "qspec/lag_window.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>

namespace qspec {

LagWindowSpec LagWindowSpec::truncated(int M) {
  if (M < 1) throw std::invalid_argument("lag window: M must be >= 1");
  LagWindowSpec s;
  s.kind = Kind::Truncated;
  s.M = M;
  return s;
}

LagWindowSpec LagWindowSpec::bartlett(int M) {
  if (M < 1) throw std::invalid_argument("lag window: M must be >= 1");
  LagWindowSpec s;
  s.kind = Kind::Bartlett;
  s.M = M;
  return s;
}

LagWindowSpec LagWindowSpec::tukey(int M, std::vector<double> a, std::vector<double> b) {
  if (M < 1) throw std::invalid_argument("lag window: M must be >= 1");
  if (a.empty()) throw std::invalid_argument("tukey window: need at least a_0");
  LagWindowSpec s;
  s.kind = Kind::TukeyGeneral;
  s.M = M;
  s.tukey_a = std::move(a);
  s.tukey_b = std::move(b);
  return s;
}

std::string LagWindowSpec::kind_name() const {
  switch (kind) {
    case Kind::Truncated: return "truncated";
    case Kind::Bartlett: return "bartlett";
    case Kind::TukeyGeneral: return "tukey";
  }
  return "?";
}

double eval_lambda(const LagWindowSpec& spec, double u) {
  double au = std::fabs(u);
  if (au > 1.0) return 0.0;
  switch (spec.kind) {
    case LagWindowSpec::Kind::Truncated:
      return 1.0;
    case LagWindowSpec::Kind::Bartlett:
      return 1.0 - au;
    case LagWindowSpec::Kind::TukeyGeneral: {
      double v = spec.tukey_a[0];
      for (std::size_t r = 1; r < spec.tukey_a.size(); ++r) {
        v += 2.0 * spec.tukey_a[r] * std::cos(2.0 * M_PI * static_cast<double>(r) * u);
      }
      double p = 1.0;
      for (std::size_t j = 0; j < spec.tukey_b.size(); ++j) {
        p *= au;
        v -= spec.tukey_b[j] * p;
      }
      return v;
    }
  }
  return 0.0;
}

double lambda_at_lag(const LagWindowSpec& spec, int r) {
  return eval_lambda(spec, static_cast<double>(r) / static_cast<double>(spec.M));
}

double kernel_K(const LagWindowSpec& spec, int T, double theta) {
  if (T < 1) throw std::invalid_argument("kernel_K: T must be >= 1");
  double s = eval_lambda(spec, 0.0);
  for (int r = 1; r <= spec.M; ++r) {
    s += 2.0 * lambda_at_lag(spec, r) * std::cos(static_cast<double>(r) * theta);
  }
  return s / static_cast<double>(T);
}

namespace {

using KernelKey = std::tuple<int, int, std::vector<double>, std::vector<double>, int>;

KernelKey make_key(const LagWindowSpec& spec, int T) {
  return {static_cast<int>(spec.kind), spec.M, spec.tukey_a, spec.tukey_b, T};
}

}  // namespace

const std::vector<double>& kernel_K_grid(const LagWindowSpec& spec, int T) {
  static std::mutex mu;
  static std::map<KernelKey, std::vector<double>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = make_key(spec, T);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  std::vector<double> grid(static_cast<std::size_t>(T));
  for (int k = 0; k < T; ++k) {
    grid[static_cast<std::size_t>(k)] = kernel_K(spec, T, 2.0 * M_PI * k / T);
  }
  return cache.emplace(std::move(key), std::move(grid)).first->second;
}

double delta_M(const LagWindowSpec& spec, double theta) {
  double lam0 = eval_lambda(spec, 0.0);
  double s = lam0 * lam0;
  for (int r = 1; r <= spec.M; ++r) {
    double lam = lambda_at_lag(spec, r);
    s += 2.0 * lam * lam * std::cos(static_cast<double>(r) * theta);
  }
  return s;
}

}  // namespace qspec
