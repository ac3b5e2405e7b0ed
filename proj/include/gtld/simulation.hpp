#pragma once

// Monte Carlo comparison of the estimators: for each sample size and
// replication draw a sample from the true model, fit it with every method
// and accumulate absolute bias and MSE per parameter.
//
// Replication r at size n is seeded with replication_seed(master, n, r),
// so results do not depend on the number of threads or their schedule.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "gtld/data.hpp"
#include "gtld/errors.hpp"
#include "gtld/estimation.hpp"
#include "gtld/model.hpp"
#include "gtld/numerics.hpp"
#include "gtld/subfamilies.hpp"

namespace gtld {

/// Malformed configuration; what() carries the line and key.
class config_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SimConfig {
  SubfamilyId family = SubfamilyId::GTWE;
  ParamVector truth{{2.5}, 3.0, 0.5, 0.2};
  std::vector<std::size_t> sample_sizes{50, 100, 150, 200, 300, 400};
  std::size_t replications = 500;
  std::vector<Method> methods{kAllMethods.begin(), kAllMethods.end()};
  std::uint64_t master_seed = 20240101;
  unsigned threads = 0;  // 0: hardware concurrency
  int starts = 5;
};

struct SimCell {
  Method method;
  std::size_t n;
  std::vector<double> abs_bias;  // param_names order
  std::vector<double> mse;
  std::size_t failures = 0;  // threw or did not converge; excluded from the averages
};

struct SimResult {
  SubfamilyId family;
  ParamVector truth;
  std::size_t replications = 0;
  std::vector<SimCell> cells;  // methods outer, sizes inner, in config order
};

inline void validate(const SimConfig& c) {
  if (c.replications < 1) throw config_error("replications must be >= 1");
  if (c.sample_sizes.empty()) throw config_error("sizes must list at least one sample size");
  for (auto n : c.sample_sizes)
    if (n < 2) throw config_error("sample sizes must be >= 2");
  try {
    validate(c.truth);
    make_transform(c.family, c.truth.shape);
  } catch (const std::exception& e) {
    throw config_error(std::string("truth: ") + e.what());
  }
}

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace detail

/// mix(mix(mix(master) ^ n) ^ r) with the splitmix64 finalizer.
inline std::uint64_t replication_seed(std::uint64_t master, std::uint64_t n, std::uint64_t r) {
  using detail::splitmix64;
  return splitmix64(splitmix64(splitmix64(master) ^ n) ^ r);
}

inline SimResult run_simulation(const SimConfig& cfg) {
  validate(cfg);
  const std::size_t k = param_count(cfg.family);
  const std::vector<double> truth = to_vector(cfg.truth);
  const GtldModel model = make_model(cfg.family, cfg.truth);
  const std::size_t nm = cfg.methods.size(), ns = cfg.sample_sizes.size(), N = cfg.replications;

  // estimates[((m * ns + s) * N + r) * k + j]; NaN marks a failed fit
  std::vector<double> est(nm * ns * N * k, std::numeric_limits<double>::quiet_NaN());

  const std::size_t jobs = ns * N;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t job; (job = next.fetch_add(1)) < jobs;) {
      const std::size_t s = job / N, r = job % N;
      const std::size_t n = cfg.sample_sizes[s];
      const std::uint64_t seed = replication_seed(cfg.master_seed, n, r);
      Sample data;
      try {
        data = Sample("replicate", sample(model, n, seed));
      } catch (const std::exception&) {
        continue;  // every method counts this replicate as failed
      }
      for (std::size_t m = 0; m < nm; ++m) {
        FitOptions opt;
        opt.seed = detail::splitmix64(seed);
        opt.starts = cfg.starts;
        const std::size_t cell = (m * ns + s) * N + r;
        try {
          const FitResult fr = fit(data, cfg.family, cfg.methods[m], opt);
          const auto v = to_vector(fr.estimates);
          // a run that stops without converging is typically drifting along
          // a ridge toward the parameter-space boundary
          if (fr.converged && std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); }))
            std::copy(v.begin(), v.end(), est.begin() + static_cast<std::ptrdiff_t>(cell * k));
        } catch (const std::exception&) {
        }
      }
    }
  };
  unsigned nt = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  nt = static_cast<unsigned>(std::min<std::size_t>(nt, jobs));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < nt; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  SimResult res{cfg.family, cfg.truth, N, {}};
  for (std::size_t m = 0; m < nm; ++m) {
    for (std::size_t s = 0; s < ns; ++s) {
      SimCell c{cfg.methods[m], cfg.sample_sizes[s], std::vector<double>(k), std::vector<double>(k), 0};
      std::vector<std::size_t> ok;
      for (std::size_t r = 0; r < N; ++r) {
        const std::size_t cell = (m * ns + s) * N + r;
        if (std::isnan(est[cell * k]))
          ++c.failures;
        else
          ok.push_back(cell);
      }
      if (ok.empty()) {
        std::fill(c.abs_bias.begin(), c.abs_bias.end(), std::numeric_limits<double>::quiet_NaN());
        std::fill(c.mse.begin(), c.mse.end(), std::numeric_limits<double>::quiet_NaN());
      } else {
        std::vector<double> a(ok.size()), q(ok.size());
        for (std::size_t j = 0; j < k; ++j) {
          for (std::size_t i = 0; i < ok.size(); ++i) {
            const double d = est[ok[i] * k + j] - truth[j];
            a[i] = std::fabs(d);
            q[i] = d * d;
          }
          c.abs_bias[j] = pairwise_sum(a) / ok.size();
          c.mse[j] = pairwise_sum(q) / ok.size();
        }
      }
      res.cells.push_back(std::move(c));
    }
  }
  return res;
}

// ---------------------------------------------------------------------------
// Config files: flat "key = value" lines, '#' comments.
//
//   family       = gtwe
//   truth        = 2.5, 3, 0.5, 0.2       (param_names order)
//   sizes        = 50, 100, 150, 200, 300, 400
//   replications = 500
//   methods      = ml, ols, wls, cvm, ad, rtad
//   seed         = 20240101
//   threads      = 0
//   starts       = 5

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

inline std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

inline double parse_real(const std::string& tok, const std::string& where) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != tok.size() || tok.empty()) throw config_error(where + ": '" + tok + "' is not a number");
  return v;
}

inline std::uint64_t parse_count(const std::string& tok, const std::string& where) {
  if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos)
    throw config_error(where + ": '" + tok + "' is not a non-negative integer");
  try {
    return std::stoull(tok);
  } catch (const std::exception&) {
    throw config_error(where + ": '" + tok + "' is out of range");
  }
}

}  // namespace detail

inline SimConfig parse_sim_config(std::istream& in, const std::string& name = "config") {
  SimConfig c;
  std::vector<double> truth;
  bool have_family = false;
  std::string line;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string at = name + ":" + std::to_string(lineno);
    if (eq == std::string::npos) throw config_error(at + ": expected 'key = value'");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string val = detail::trim(line.substr(eq + 1));
    const std::string where = at + ": " + key;
    if (val.empty()) throw config_error(where + ": missing value");
    if (key == "family") {
      auto id = parse_subfamily(val);
      if (!id) throw config_error(where + ": unknown family '" + val + "'");
      c.family = *id;
      have_family = true;
    } else if (key == "truth") {
      truth.clear();
      for (const auto& t : detail::split_list(val)) truth.push_back(detail::parse_real(t, where));
    } else if (key == "sizes") {
      c.sample_sizes.clear();
      for (const auto& t : detail::split_list(val)) c.sample_sizes.push_back(detail::parse_count(t, where));
    } else if (key == "replications" || key == "N") {
      c.replications = detail::parse_count(val, where);
    } else if (key == "methods") {
      c.methods.clear();
      for (const auto& t : detail::split_list(val)) {
        auto m = parse_method(t);
        if (!m) throw config_error(where + ": unknown method '" + t + "'");
        c.methods.push_back(*m);
      }
    } else if (key == "seed") {
      c.master_seed = detail::parse_count(val, where);
    } else if (key == "threads") {
      c.threads = static_cast<unsigned>(detail::parse_count(val, where));
    } else if (key == "starts") {
      c.starts = static_cast<int>(detail::parse_count(val, where));
      if (c.starts < 1) throw config_error(where + ": must be >= 1");
    } else {
      throw config_error(where + ": unknown key");
    }
  }
  if (!truth.empty()) {
    try {
      c.truth = from_vector(c.family, truth);
    } catch (const std::exception& e) {
      throw config_error(name + ": truth: " + e.what());
    }
  } else if (have_family && c.family != SubfamilyId::GTWE) {
    throw config_error(name + ": truth is required when family is not gtwe");
  }
  validate(c);
  return c;
}

inline SimConfig load_sim_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config '" + path + "'");
  return parse_sim_config(in, path);
}

// ---------------------------------------------------------------------------
// Output

enum class TableFormat { csv, json, text };

namespace detail {

inline std::string fmt(double v, int precision) {
  std::ostringstream os;
  os << std::setprecision(precision) << v;
  return os.str();
}

inline std::vector<double> rounded(const std::vector<double>& v, int precision) {
  std::vector<double> out;
  out.reserve(v.size());
  for (double x : v) out.push_back(std::isfinite(x) ? std::stod(fmt(x, precision)) : x);
  return out;
}

}  // namespace detail

/// Rows keyed (method, n); per-parameter absolute bias columns, then MSE.
inline std::string emit_table(const SimResult& r, TableFormat format, int precision = 6) {
  const auto names = param_names(r.family);
  std::ostringstream os;
  if (format == TableFormat::json) {
    nlohmann::json j;
    j["family"] = std::string(to_string(r.family));
    j["truth"] = to_vector(r.truth);
    j["parameters"] = names;
    j["replications"] = r.replications;
    j["rows"] = nlohmann::json::array();
    for (const auto& c : r.cells) {
      j["rows"].push_back({{"method", std::string(to_string(c.method))},
                           {"n", c.n},
                           {"abs_bias", detail::rounded(c.abs_bias, precision)},
                           {"mse", detail::rounded(c.mse, precision)},
                           {"failures", c.failures}});
    }
    os << j.dump(2) << '\n';
    return os.str();
  }
  if (format == TableFormat::csv) {
    os << "method,n";
    for (const auto& p : names) os << ',' << p << "_abs_bias";
    for (const auto& p : names) os << ',' << p << "_mse";
    os << ",failures\n";
    for (const auto& c : r.cells) {
      os << to_string(c.method) << ',' << c.n;
      for (double v : c.abs_bias) os << ',' << detail::fmt(v, precision);
      for (double v : c.mse) os << ',' << detail::fmt(v, precision);
      os << ',' << c.failures << '\n';
    }
    return os.str();
  }
  const int w = precision + 7;
  os << std::left << std::setw(6) << "method" << std::right << std::setw(6) << "n";
  for (const auto& p : names) os << std::setw(w) << ("|" + p + "|");
  for (const auto& p : names) os << std::setw(w) << ("mse " + p);
  os << std::setw(6) << "fail" << '\n';
  for (const auto& c : r.cells) {
    os << std::left << std::setw(6) << to_string(c.method) << std::right << std::setw(6) << c.n;
    for (double v : c.abs_bias) os << std::setw(w) << detail::fmt(v, precision);
    for (double v : c.mse) os << std::setw(w) << detail::fmt(v, precision);
    os << std::setw(6) << c.failures << '\n';
  }
  return os.str();
}

}  // namespace gtld
