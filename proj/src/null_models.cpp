#include "qspec/null_models.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

#include "qspec/qsd.hpp"
#include "qspec/rng.hpp"
#include "qspec/stats.hpp"

namespace qspec {

namespace {
constexpr int kBurnIn = 1000;
}

NullModel NullModel::iid(double mu, double sigma) {
  NullModel m;
  m.kind = Kind::IID;
  m.mu = mu;
  m.sigma_eps = sigma;
  m.validate();
  return m;
}

NullModel NullModel::ar1(double mu, double a, double sigma_eps) {
  NullModel m;
  m.kind = Kind::AR1;
  m.mu = mu;
  m.a = a;
  m.sigma_eps = sigma_eps;
  m.validate();
  return m;
}

NullModel NullModel::arch1(double mu, double a0, double a1) {
  NullModel m;
  m.kind = Kind::ARCH1;
  m.mu = mu;
  m.a0 = a0;
  m.a1 = a1;
  m.validate();
  return m;
}

NullModel NullModel::garch11(double mu, double a0, double a1, double b) {
  NullModel m;
  m.kind = Kind::GARCH11;
  m.mu = mu;
  m.a0 = a0;
  m.a1 = a1;
  m.b = b;
  m.validate();
  return m;
}

NullModel NullModel::squared_arch1(double a0, double a) {
  NullModel m;
  m.kind = Kind::SquaredARCH1;
  m.a0 = a0;
  m.a = a;
  m.validate();
  return m;
}

NullModel NullModel::preset(const std::string& name) {
  if (name == "msft-garch") return garch11(1.56e-3, 1.03e-5, 0.06, 0.925);
  if (name == "intel-arch") return arch1(0.0166, 0.0125, 0.363);
  throw std::invalid_argument("unknown model preset: " + name);
}

void NullModel::validate() const {
  switch (kind) {
    case Kind::IID:
      if (!(sigma_eps > 0)) throw std::invalid_argument("iid: sigma must be > 0");
      break;
    case Kind::AR1:
      if (!(std::abs(a) < 1)) throw std::invalid_argument("ar1: need |a| < 1");
      if (!(sigma_eps > 0)) throw std::invalid_argument("ar1: sigma_eps must be > 0");
      break;
    case Kind::ARCH1:
      if (!(a0 > 0)) throw std::invalid_argument("arch1: a0 must be > 0");
      if (!(a1 >= 0 && a1 < 1)) throw std::invalid_argument("arch1: need 0 <= a1 < 1");
      break;
    case Kind::GARCH11:
      if (!(a0 > 0)) throw std::invalid_argument("garch11: a0 must be > 0");
      if (!(a1 >= 0 && b >= 0)) throw std::invalid_argument("garch11: a1, b must be >= 0");
      if (!(a1 + b < 1)) throw std::invalid_argument("garch11: need a1 + b < 1");
      break;
    case Kind::SquaredARCH1:
      if (!(a0 > 0)) throw std::invalid_argument("squared_arch1: a0 must be > 0");
      if (!(a >= 0 && 3 * a * a < 1))
        throw std::invalid_argument("squared_arch1: need 0 <= a and 3a^2 < 1");
      break;
  }
}

std::string NullModel::kind_name() const {
  switch (kind) {
    case Kind::IID: return "iid";
    case Kind::AR1: return "ar1";
    case Kind::ARCH1: return "arch1";
    case Kind::GARCH11: return "garch11";
    case Kind::SquaredARCH1: return "squared_arch1";
  }
  return "?";
}

nlohmann::json NullModel::to_json() const {
  nlohmann::json j;
  j["kind"] = kind_name();
  switch (kind) {
    case Kind::IID:
      j["mu"] = mu;
      j["sigma"] = sigma_eps;
      break;
    case Kind::AR1:
      j["mu"] = mu;
      j["a"] = a;
      j["sigma_eps"] = sigma_eps;
      break;
    case Kind::ARCH1:
      j["mu"] = mu;
      j["a0"] = a0;
      j["a1"] = a1;
      break;
    case Kind::GARCH11:
      j["mu"] = mu;
      j["a0"] = a0;
      j["a1"] = a1;
      j["b"] = b;
      break;
    case Kind::SquaredARCH1:
      j["a0"] = a0;
      j["a"] = a;
      break;
  }
  return j;
}

NullModel NullModel::from_json(const nlohmann::json& j) {
  if (j.is_string()) return preset(j.get<std::string>());
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "iid") return iid(j.value("mu", 0.0), j.value("sigma", 1.0));
  if (kind == "ar1")
    return ar1(j.value("mu", 0.0), j.at("a").get<double>(),
               j.value("sigma_eps", 1.0));
  if (kind == "arch1")
    return arch1(j.value("mu", 0.0), j.at("a0").get<double>(), j.at("a1").get<double>());
  if (kind == "garch11")
    return garch11(j.value("mu", 0.0), j.at("a0").get<double>(),
                   j.at("a1").get<double>(), j.at("b").get<double>());
  if (kind == "squared_arch1")
    return squared_arch1(j.at("a0").get<double>(), j.at("a").get<double>());
  throw std::invalid_argument("unknown model kind: " + kind);
}

namespace {

// Appends n observations of the model to out, continuing from the given
// state. State layout: AR1 uses x; (G)ARCH uses (e, s2) = last innovation
// and conditional variance.
void generate(const NullModel& m, long long n, Rng& rng, double& x, double& e,
              double& s2, std::vector<double>* out) {
  switch (m.kind) {
    case NullModel::Kind::IID:
      for (long long t = 0; t < n; ++t) {
        double v = m.mu + m.sigma_eps * rng.gaussian();
        if (out) out->push_back(v);
      }
      break;
    case NullModel::Kind::AR1:
      for (long long t = 0; t < n; ++t) {
        x = m.mu + m.a * x + m.sigma_eps * rng.gaussian();
        if (out) out->push_back(x);
      }
      break;
    case NullModel::Kind::ARCH1:
      for (long long t = 0; t < n; ++t) {
        s2 = m.a0 + m.a1 * e * e;
        e = std::sqrt(s2) * rng.gaussian();
        if (out) out->push_back(m.mu + e);
      }
      break;
    case NullModel::Kind::GARCH11:
      for (long long t = 0; t < n; ++t) {
        s2 = m.a0 + m.a1 * e * e + m.b * s2;
        e = std::sqrt(s2) * rng.gaussian();
        if (out) out->push_back(m.mu + e);
      }
      break;
    case NullModel::Kind::SquaredARCH1:
      for (long long t = 0; t < n; ++t) {
        s2 = m.a0 + m.a * e * e;
        e = std::sqrt(s2) * rng.gaussian();
        if (out) out->push_back(e * e);
      }
      break;
  }
}

std::vector<double> simulate_path(const NullModel& model, long long n,
                                  std::uint64_t seed) {
  model.validate();
  Rng rng(seed);
  double x = model.mu / (1.0 - model.a);  // AR1 stationary mean as warm start
  double e = 0.0, s2 = model.a0;
  generate(model, kBurnIn, rng, x, e, s2, nullptr);
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n));
  generate(model, n, rng, x, e, s2, &out);
  return out;
}

}  // namespace

Series simulate(const NullModel& model, int T, std::uint64_t seed) {
  if (T < 1) throw std::invalid_argument("simulate: T must be >= 1");
  Series s;
  s.values = simulate_path(model, T, seed);
  s.name = model.kind_name();
  return s;
}

// ---------------------------------------------------------------------------
// Bivariate normal CDF, following Genz's refinement of Drezner-Wesolowsky.

namespace {

// Gauss-Legendre nodes/weights on [-1,1], positive-half listed.
const double kGL6x[] = {0.2386191860831970, 0.6612093864662647, 0.9324695142031522};
const double kGL6w[] = {0.4679139345726904, 0.3607615730481384, 0.1713244923791705};
const double kGL12x[] = {0.1252334085114692, 0.3678314989981802, 0.5873179542866171,
                         0.7699026741943050, 0.9041172563704750, 0.9815606342467191};
const double kGL12w[] = {0.2491470458134029, 0.2334925365383547, 0.2031674267230659,
                         0.1600783285433464, 0.1069393259953183, 0.04717533638651177};
const double kGL20x[] = {0.07652652113349733, 0.2277858511416451, 0.3737060887154196,
                         0.5108670019508271,  0.6360536807265150, 0.7463319064601508,
                         0.8391169718222188,  0.9122344282513259, 0.9639719272779138,
                         0.9931285991850949};
const double kGL20w[] = {0.1527533871307259,  0.1491729864726037,  0.1420961093183821,
                         0.1316886384491766,  0.1181945319615184,  0.1019301198172404,
                         0.08327674157670475, 0.06267204833410906, 0.04060142980038694,
                         0.01761400713915212};

// P(N1 > dh, N2 > dk) with correlation r.
double bvn_upper(double dh, double dk, double r) {
  const double twopi = 2.0 * M_PI;
  const double* gx;
  const double* gw;
  int ng;
  if (std::abs(r) < 0.3) {
    gx = kGL6x; gw = kGL6w; ng = 3;
  } else if (std::abs(r) < 0.75) {
    gx = kGL12x; gw = kGL12w; ng = 6;
  } else {
    gx = kGL20x; gw = kGL20w; ng = 10;
  }
  double h = dh, k = dk, hk = h * k, bvn = 0.0;
  if (std::abs(r) < 0.925) {
    if (std::abs(r) > 0) {
      double hs = (h * h + k * k) / 2, asr = std::asin(r);
      for (int i = 0; i < ng; ++i) {
        for (int is : {-1, 1}) {
          double sn = std::sin(asr * (is * gx[i] + 1) / 2);
          bvn += gw[i] * std::exp((sn * hk - hs) / (1 - sn * sn));
        }
      }
      bvn = bvn * asr / (2 * twopi);
    }
    bvn += normal_cdf(-h) * normal_cdf(-k);
  } else {
    if (r < 0) {
      k = -k;
      hk = -hk;
    }
    if (std::abs(r) < 1) {
      double as = (1 - r) * (1 + r), a = std::sqrt(as), bs = (h - k) * (h - k);
      double c = (4 - hk) / 8, d = (12 - hk) / 16, asq = -(bs / as + hk) / 2;
      if (asq > -100)
        bvn = a * std::exp(asq) *
              (1 - c * (bs - as) * (1 - d * bs / 5) / 3 + c * d * as * as / 5);
      if (-hk < 100) {
        double bb = std::sqrt(bs);
        bvn -= std::exp(-hk / 2) * std::sqrt(twopi) * normal_cdf(-bb / a) * bb *
               (1 - c * bs * (1 - d * bs / 5) / 3);
      }
      a /= 2;
      for (int i = 0; i < ng; ++i) {
        for (int is : {-1, 1}) {
          double xs = a * (is * gx[i] + 1);
          xs = xs * xs;
          double rs = std::sqrt(1 - xs);
          asq = -(bs / xs + hk) / 2;
          if (asq > -100) {
            bvn += a * gw[i] * std::exp(asq) *
                   (std::exp(-hk * (1 - rs) / (2 * (1 + rs))) / rs -
                    (1 + c * xs * (1 + d * xs)));
          }
        }
      }
      bvn = -bvn / twopi;
    }
    if (r > 0) {
      bvn += normal_cdf(-std::max(h, k));
    } else {
      bvn = -bvn;
      if (k > h) bvn += normal_cdf(k) - normal_cdf(h);
    }
  }
  return std::clamp(bvn, 0.0, 1.0);
}

}  // namespace

double bivariate_normal_cdf(double h, double k, double rho) {
  if (!(std::abs(rho) <= 1)) throw std::invalid_argument("bvn: need |rho| <= 1");
  if (std::isnan(h) || std::isnan(k)) throw std::invalid_argument("bvn: nan input");
  if (h == -INFINITY || k == -INFINITY) return 0.0;
  if (h == INFINITY) return normal_cdf(k);
  if (k == INFINITY) return normal_cdf(h);
  if (rho == 1.0) return normal_cdf(std::min(h, k));
  if (rho == -1.0) return std::max(0.0, normal_cdf(h) + normal_cdf(k) - 1.0);
  // P(X<=h, Y<=k) = P(-X > -h... ) via the reflected upper orthant.
  return bvn_upper(-h, -k, rho);
}

// ---------------------------------------------------------------------------
// Tables

void NullModelTables::validate(double tol) const {
  grid.validate();
  if (C0.q != grid.size()) throw std::invalid_argument("tables: grid/C0 size mismatch");
  for (int r = 0; r <= C0.M; ++r) {
    for (int i = 0; i < C0.q; ++i) {
      for (int j = 0; j < C0.q; ++j) {
        double v = C0.at(r, i, j);
        if (!std::isfinite(v) || std::abs(v) > 0.25 + tol)
          throw NumericalError("tables: C_{0,r} out of [-1/4, 1/4]");
      }
      double f = grid.levels[static_cast<std::size_t>(i)];
      if (r == 0 && std::abs(C0.at(0, i, i) - f * (1 - f)) > std::max(tol, 2e-3))
        throw NumericalError("tables: lag-0 diagonal deviates from F(1-F)");
    }
  }
}

nlohmann::json NullModelTables::to_json() const {
  nlohmann::json j;
  j["model"] = model.to_json();
  j["levels"] = grid.levels;
  j["thresholds"] = grid.thresholds;
  j["M"] = C0.M;
  j["analytic"] = analytic;
  j["mc_N"] = mc_N;
  j["mc_seed"] = mc_seed;
  j["C0"] = C0.data;
  return j;
}

NullModelTables NullModelTables::from_json(const nlohmann::json& j) {
  NullModelTables t;
  t.model = NullModel::from_json(j.at("model"));
  t.grid.levels = j.at("levels").get<std::vector<double>>();
  t.grid.thresholds = j.at("thresholds").get<std::vector<double>>();
  t.grid.validate();
  t.C0.M = j.at("M").get<int>();
  t.C0.q = t.grid.size();
  t.C0.T = 0;
  t.C0.data = j.at("C0").get<std::vector<double>>();
  if (t.C0.data.size() !=
      static_cast<std::size_t>(t.C0.M + 1) * t.C0.q * t.C0.q)
    throw std::invalid_argument("tables: C0 payload size mismatch");
  t.analytic = j.at("analytic").get<bool>();
  t.mc_N = j.at("mc_N").get<long long>();
  t.mc_seed = j.at("mc_seed").get<std::uint64_t>();
  return t;
}

namespace {

NullModelTables analytic_tables(const NullModel& model,
                                const std::vector<double>& levels, int M) {
  const int q = static_cast<int>(levels.size());
  NullModelTables t;
  t.model = model;
  t.analytic = true;
  t.grid.levels = levels;
  t.grid.thresholds.resize(levels.size());
  const bool ar = model.kind == NullModel::Kind::AR1;
  const double m = ar ? model.mu / (1 - model.a) : model.mu;
  const double sd = ar ? model.sigma_eps / std::sqrt(1 - model.a * model.a)
                       : model.sigma_eps;
  std::vector<double> zs(levels.size());  // standardized thresholds
  for (std::size_t i = 0; i < levels.size(); ++i) {
    zs[i] = normal_quantile(levels[i]);
    t.grid.thresholds[i] = m + sd * zs[i];
  }
  t.grid.validate();
  t.C0.M = M;
  t.C0.q = q;
  t.C0.T = 0;
  t.C0.data.assign(static_cast<std::size_t>(M + 1) * q * q, 0.0);
  for (int r = 0; r <= M; ++r) {
    double rho = ar ? std::pow(model.a, r) : (r == 0 ? 1.0 : 0.0);
    for (int i = 0; i < q; ++i) {
      for (int j = 0; j < q; ++j) {
        double joint = (r == 0 && i == j)
                           ? levels[static_cast<std::size_t>(i)]
                           : bivariate_normal_cdf(zs[i], zs[j], rho);
        t.C0.at_mut(r, i, j) =
            joint - levels[static_cast<std::size_t>(i)] * levels[static_cast<std::size_t>(j)];
      }
    }
  }
  return t;
}

NullModelTables monte_carlo_tables(const NullModel& model,
                                   const std::vector<double>& levels, int M,
                                   const McConfig& mc) {
  const long long N = mc.N;
  auto path = simulate_path(model, N, mc.seed);
  const int q = static_cast<int>(levels.size());

  // Empirical quantiles of the path at the requested levels.
  std::vector<double> sorted = path;
  std::sort(sorted.begin(), sorted.end());
  NullModelTables t;
  t.model = model;
  t.analytic = false;
  t.mc_N = N;
  t.mc_seed = mc.seed;
  t.grid.levels = levels;
  t.grid.thresholds.resize(levels.size());
  for (std::size_t i = 0; i < levels.size(); ++i) {
    auto idx = static_cast<long long>(std::ceil(levels[i] * N)) - 1;
    t.grid.thresholds[i] = sorted[static_cast<std::size_t>(std::clamp(idx, 0LL, N - 1))];
  }
  t.grid.validate();

  // Bucket index per observation: b_t = smallest i with X_t <= x_i (q if none),
  // so I(X_t <= x_i) = [b_t <= i].
  std::vector<int> bucket(static_cast<std::size_t>(N));
  const auto& thr = t.grid.thresholds;
  for (long long tt = 0; tt < N; ++tt) {
    bucket[static_cast<std::size_t>(tt)] = static_cast<int>(
        std::lower_bound(thr.begin(), thr.end(), path[static_cast<std::size_t>(tt)]) -
        thr.begin());
  }

  // Marginal F_0 at the thresholds.
  std::vector<double> fh(static_cast<std::size_t>(q), 0.0);
  {
    std::vector<long long> cnt(static_cast<std::size_t>(q) + 1, 0);
    for (int b : bucket) ++cnt[static_cast<std::size_t>(b)];
    long long acc = 0;
    for (int i = 0; i < q; ++i) {
      acc += cnt[static_cast<std::size_t>(i)];
      fh[static_cast<std::size_t>(i)] = static_cast<double>(acc) / static_cast<double>(N);
    }
  }

  t.C0.M = M;
  t.C0.q = q;
  t.C0.T = 0;
  t.C0.data.assign(static_cast<std::size_t>(M + 1) * q * q, 0.0);
  std::vector<long long> counts(static_cast<std::size_t>(q + 1) * (q + 1));
  for (int r = 0; r <= M; ++r) {
    std::fill(counts.begin(), counts.end(), 0LL);
    for (long long tt = 0; tt + r < N; ++tt) {
      int bi = bucket[static_cast<std::size_t>(tt)];
      int bj = bucket[static_cast<std::size_t>(tt + r)];
      ++counts[static_cast<std::size_t>(bi) * (q + 1) + bj];
    }
    // 2D prefix sums turn bucket counts into joint CDF counts.
    for (int i = 0; i <= q; ++i)
      for (int j = 1; j <= q; ++j)
        counts[static_cast<std::size_t>(i) * (q + 1) + j] +=
            counts[static_cast<std::size_t>(i) * (q + 1) + j - 1];
    for (int i = 1; i <= q; ++i)
      for (int j = 0; j <= q; ++j)
        counts[static_cast<std::size_t>(i) * (q + 1) + j] +=
            counts[static_cast<std::size_t>(i - 1) * (q + 1) + j];
    const double denom = static_cast<double>(N - r);
    for (int i = 0; i < q; ++i) {
      for (int j = 0; j < q; ++j) {
        double joint = counts[static_cast<std::size_t>(i) * (q + 1) + j] / denom;
        t.C0.at_mut(r, i, j) =
            joint - fh[static_cast<std::size_t>(i)] * fh[static_cast<std::size_t>(j)];
      }
    }
  }
  return t;
}

std::string cache_key(const NullModel& model, const std::vector<double>& levels,
                      int M, const McConfig& mc) {
  nlohmann::json key;
  key["model"] = model.to_json();
  key["levels"] = levels;
  key["M"] = M;
  key["N"] = mc.N;
  key["seed"] = mc.seed;
  std::ostringstream name;
  name << model.kind_name() << "-M" << M << "-"
       << std::hex << std::hash<std::string>{}(key.dump()) << ".json";
  return name.str();
}

}  // namespace

NullModelTables null_tables(const NullModel& model, const std::vector<double>& levels,
                            int M, const McConfig& mc) {
  model.validate();
  if (M < 0) throw std::invalid_argument("null_tables: M must be >= 0");
  if (levels.empty()) throw std::invalid_argument("null_tables: empty level set");
  if (model.analytic_tables() && !mc.force_monte_carlo) {
    auto t = analytic_tables(model, levels, M);
    t.validate();
    return t;
  }
  if (mc.N < 10000)
    throw std::invalid_argument("null_tables: mc.N below 10^4 is too noisy");

  std::filesystem::path cache_file;
  if (!mc.cache_dir.empty()) {
    cache_file = std::filesystem::path(mc.cache_dir) / cache_key(model, levels, M, mc);
    if (std::filesystem::exists(cache_file)) {
      std::ifstream in(cache_file);
      nlohmann::json j;
      in >> j;
      auto t = NullModelTables::from_json(j);
      if (t.C0.M == M && t.mc_N == mc.N &&
          t.grid.levels == levels)  // key collision guard
        return t;
    }
  }
  auto t = monte_carlo_tables(model, levels, M, mc);
  t.validate();
  if (!cache_file.empty()) {
    std::filesystem::create_directories(cache_file.parent_path());
    std::ofstream out(cache_file);
    out << t.to_json().dump();
  }
  return t;
}

NullModel matched_ar1_for_squared_arch(double a0, double a) {
  if (!(a0 > 0)) throw std::invalid_argument("matched_ar1: a0 must be > 0");
  if (!(a >= 0 && 3 * a * a < 1))
    throw std::invalid_argument("matched_ar1: need 3a^2 < 1");
  // Y_t = X_t^2 follows Y_t = a0 + a Y_{t-1} + martingale noise, so the
  // matched AR(1) keeps mu = a0 and the same coefficient; the innovation
  // variance reproduces var(Y) = E[X^4] - (E[X^2])^2.
  const double m = a0 / (1 - a);
  const double ex4 = 3 * (a0 * a0 + 2 * a0 * a * m) / (1 - 3 * a * a);
  const double var_y = ex4 - m * m;
  const double sigma_eps2 = (1 - a * a) * var_y;
  return NullModel::ar1(a0, a, std::sqrt(sigma_eps2));
}

std::vector<std::complex<double>> null_qsd_on_grid(const NullModelTables& tables,
                                                   const LagWindowSpec& window,
                                                   int n_freq) {
  if (window.M > tables.C0.M)
    throw std::invalid_argument("null_qsd_on_grid: window M exceeds tabled lags");
  return qsd_on_grid(tables.C0, window, n_freq);
}

}  // namespace qspec
