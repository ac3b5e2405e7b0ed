#pragma once

// Samples: sorted positive data with a provenance note, the two built-in
// reference datasets, a small text/CSV loader and descriptive statistics.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "gtld/errors.hpp"

namespace gtld {

struct Sample {
  std::string name;
  std::vector<double> values;  // ascending
  std::string source;

  Sample() = default;
  Sample(std::string n, std::vector<double> v, std::string src = {})
      : name(std::move(n)), values(std::move(v)), source(std::move(src)) {
    if (values.empty()) throw domain_error("sample '" + name + "' is empty");
    for (std::size_t i = 0; i < values.size(); ++i)
      if (!std::isfinite(values[i]) || values[i] <= 0.0)
        throw domain_error("sample '" + name + "': value #" + std::to_string(i + 1) + " is not a positive finite real");
    std::sort(values.begin(), values.end());
  }

  std::size_t size() const { return values.size(); }
};

namespace datasets {

/// Gauge lengths (20 mm), 74 values.  The run 2.809 ... 2.880 appears twice
/// in the published list; it is kept as published because the reference
/// fits were computed on it.
inline Sample gauge() {
  return Sample("gauge",
                {1.312, 1.314, 1.479, 1.552, 1.700, 1.803, 1.861, 1.865, 1.944, 1.958, 1.966, 1.997, 2.006,
                 2.021, 2.027, 2.055, 2.063, 2.098, 2.140, 2.179, 2.224, 2.240, 2.253, 2.270, 2.272, 2.274,
                 2.301, 2.301, 2.359, 2.382, 2.382, 2.426, 2.434, 2.435, 2.478, 2.490, 2.511, 2.514, 2.535,
                 2.554, 2.566, 2.570, 2.586, 2.629, 2.633, 2.642, 2.648, 2.684, 2.697, 2.726, 2.770, 2.773,
                 2.800, 2.809, 2.818, 2.821, 2.848, 2.880, 2.809, 2.818, 2.821, 2.848, 2.880, 2.954, 3.012,
                 3.067, 3.084, 3.090, 3.096, 3.128, 3.233, 3.433, 3.585, 3.585},
                "gauge lengths of 20 mm specimens; duplicated run 2.809-2.880 kept as published");
}

/// Failure times in weeks of 50 components.
inline Sample failure() {
  return Sample("failure",
                {0.013, 0.065, 0.111, 0.111, 0.163, 0.309, 0.426, 0.535, 0.684, 0.747, 0.997, 1.284, 1.304,
                 1.647, 1.829, 2.336, 2.838, 3.269, 3.977, 3.981, 4.520, 4.789, 4.849, 5.202, 5.291, 5.349,
                 5.911, 6.018, 6.427, 6.456, 6.572, 7.023, 7.087, 7.291, 7.787, 8.596, 9.388, 10.261, 10.713,
                 11.658, 13.006, 13.388, 13.842, 17.152, 17.283, 19.418, 23.471, 24.777, 32.795, 48.105},
                "failure times in weeks of 50 components");
}

inline std::optional<Sample> builtin(const std::string& name) {
  if (name == "gauge") return gauge();
  if (name == "failure") return failure();
  return std::nullopt;
}

}  // namespace datasets

/// Parses one value per line ('#' starts a comment) or a single-column CSV
/// whose first line is a non-numeric header.
inline Sample parse_sample(std::istream& in, const std::string& name) {
  std::vector<double> values;
  std::string line;
  std::size_t lineno = 0;
  bool first_content = true;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (auto comma = line.find(','); comma != std::string::npos) {
      // single-column CSV only; trailing empty fields are tolerated
      if (line.find_first_not_of(", \t", comma) != std::string::npos)
        throw domain_error(name + ":" + std::to_string(lineno) + ": expected a single column");
      line.erase(comma);
    }
    const auto b = line.find_first_not_of(" \t");
    if (b == std::string::npos) continue;
    const auto e = line.find_last_not_of(" \t");
    const std::string tok = line.substr(b, e - b + 1);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != tok.size()) {
      if (first_content) {  // header
        first_content = false;
        continue;
      }
      throw domain_error(name + ":" + std::to_string(lineno) + ": not a number: '" + tok + "'");
    }
    first_content = false;
    values.push_back(v);
  }
  return Sample(name, std::move(values), "file " + name);
}

inline Sample load_sample(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw domain_error("cannot open data file '" + path + "'");
  return parse_sample(in, path);
}

/// Built-in dataset name or file path.
inline Sample resolve_sample(const std::string& spec) {
  if (auto s = datasets::builtin(spec)) return *s;
  return load_sample(spec);
}

struct Descriptive {
  double min, q1, median, mean, q3, max;
  double skewness;         // moment estimator g1
  double kurtosis;         // excess, moment estimator g2
  double skewness_adj;     // adjusted Fisher-Pearson G1
  double kurtosis_adj;     // adjusted excess G2
};

/// Linear-interpolation quantile of sorted data (Hyndman-Fan type 7).
inline double sample_quantile(const std::vector<double>& sorted, double p) {
  const double h = (sorted.size() - 1) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - lo) * (sorted[hi] - sorted[lo]);
}

inline Descriptive describe(const Sample& s) {
  const auto& x = s.values;
  const double n = static_cast<double>(x.size());
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= n;
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double v : x) {
    const double d = v - mean, d2 = d * d;
    m2 += d2;
    m3 += d2 * d;
    m4 += d2 * d2;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  Descriptive d{};
  d.min = x.front();
  d.max = x.back();
  d.mean = mean;
  d.q1 = sample_quantile(x, 0.25);
  d.median = sample_quantile(x, 0.5);
  d.q3 = sample_quantile(x, 0.75);
  d.skewness = m3 / std::pow(m2, 1.5);
  d.kurtosis = m4 / (m2 * m2) - 3.0;
  d.skewness_adj = n > 2 ? d.skewness * std::sqrt(n * (n - 1)) / (n - 2) : std::nan("");
  d.kurtosis_adj = n > 3 ? ((n + 1) * d.kurtosis + 6.0) * (n - 1) / ((n - 2) * (n - 3)) : std::nan("");
  return d;
}

}  // namespace gtld
