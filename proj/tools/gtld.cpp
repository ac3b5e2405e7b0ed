// gtld: command-line front end.
//
//   gtld data     NAME|PATH                 descriptive statistics
//   gtld fit      --data D --family F       fit + goodness of fit (JSON)
//   gtld select   --data D --families a,b   fit several families, rank by AIC
//   gtld props    --family F --params ...   distributional properties (JSON)
//   gtld curves   --family F --params ...   pdf/cdf/hazard on a grid (CSV)
//   gtld simulate --config FILE             Monte Carlo study
//
// Exit status: 0 success, 1 computation failure, 2 usage or config error.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "gtld/gtld.hpp"

using nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kComputeError = 1;
constexpr int kUsageError = 2;

struct usage_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

double round_sig(double v, int digits) {
  if (!std::isfinite(v) || v == 0.0) return v;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return std::strtod(buf, nullptr);
}

void round_json(json& j, int digits) {
  if (j.is_number_float()) {
    const double v = j.get<double>();
    if (!std::isfinite(v))
      j = nullptr;
    else
      j = round_sig(v, digits);
  } else if (j.is_structured()) {
    for (auto& e : j) round_json(e, digits);
  }
}

std::string fmt(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

std::vector<double> parse_reals(const std::string& s, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    while (used < tok.size() && std::isspace(static_cast<unsigned char>(tok[used]))) ++used;
    if (used != tok.size() || tok.empty()) throw usage_error(what + ": '" + tok + "' is not a number");
    out.push_back(v);
  }
  return out;
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok.erase(0, tok.find_first_not_of(' '));
    tok.erase(tok.find_last_not_of(' ') + 1);
    if (!tok.empty()) out.push_back(tok);
  }
  return out;
}

gtld::SubfamilyId family_arg(const std::string& s) {
  auto id = gtld::parse_subfamily(s);
  if (!id) throw usage_error("unknown family '" + s + "' (expected gte, gtr, gtw, gtmw, gtwe, gtb12, gtl, gtp1)");
  return *id;
}

gtld::Method method_arg(const std::string& s) {
  auto m = gtld::parse_method(s);
  if (!m) throw usage_error("unknown method '" + s + "' (expected ml, ols, wls, cvm, ad, rtad)");
  return *m;
}

gtld::Sample data_arg(const std::string& s) {
  try {
    return gtld::resolve_sample(s);
  } catch (const std::exception& e) {
    throw usage_error(std::string("data: ") + e.what());
  }
}

gtld::ParamVector params_arg(gtld::SubfamilyId id, const std::string& s) {
  try {
    auto p = gtld::from_vector(id, parse_reals(s, "params"));
    gtld::validate(p);
    gtld::make_transform(id, p.shape);
    return p;
  } catch (const usage_error&) {
    throw;
  } catch (const std::exception& e) {
    throw usage_error(std::string("params: ") + e.what());
  }
}

json params_json(gtld::SubfamilyId id, const gtld::ParamVector& p) {
  json j = json::object();
  const auto names = gtld::param_names(id);
  const auto v = gtld::to_vector(p);
  for (std::size_t i = 0; i < names.size(); ++i) j[names[i]] = v[i];
  return j;
}

void emit(const json& j, int precision, const std::string& out_path) {
  json r = j;
  round_json(r, precision);
  const std::string text = r.dump(2);
  if (out_path.empty()) {
    std::cout << text << '\n';
  } else {
    std::ofstream f(out_path);
    if (!f) throw usage_error("cannot write '" + out_path + "'");
    f << text << '\n';
  }
}

// ---------------------------------------------------------------------------

json describe_json(const gtld::Sample& s) {
  const auto d = gtld::describe(s);
  return {{"name", s.name},
          {"source", s.source},
          {"n", s.size()},
          {"min", d.min},
          {"q1", d.q1},
          {"median", d.median},
          {"mean", d.mean},
          {"q3", d.q3},
          {"max", d.max},
          {"skewness", d.skewness},
          {"kurtosis", d.kurtosis},
          {"skewness_adjusted", d.skewness_adj},
          {"kurtosis_adjusted", d.kurtosis_adj}};
}

json fit_json(const gtld::Sample& s, const gtld::FitResult& r, const gtld::GofReport& g) {
  json se = json::object();
  const auto names = gtld::param_names(r.family);
  for (std::size_t i = 0; i < names.size(); ++i)
    se[names[i]] = i < r.std_errors.size() && r.std_errors[i] ? json(*r.std_errors[i]) : json(nullptr);
  return {{"data", s.name},
          {"family", std::string(gtld::to_string(r.family))},
          {"method", std::string(gtld::to_string(r.method))},
          {"estimates", params_json(r.family, r.estimates)},
          {"std_errors", se},
          {"objective_value", r.objective_value},
          {"converged", r.converged},
          {"iterations", r.iterations},
          {"clamp_events", r.clamp_events},
          {"gof", gtld::to_json(g)}};
}

// Parses "name=value,name=value" into a fixed-parameter vector.
std::vector<std::optional<double>> fixed_arg(gtld::SubfamilyId id, const std::vector<std::string>& items) {
  const auto names = gtld::param_names(id);
  std::vector<std::optional<double>> fixed(names.size());
  for (const auto& item : items) {
    for (const auto& kv : split(item)) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw usage_error("--fix expects name=value, got '" + kv + "'");
      const std::string key = kv.substr(0, eq);
      auto it = std::find(names.begin(), names.end(), key);
      if (it == names.end()) throw usage_error("--fix: '" + key + "' is not a parameter of this family");
      fixed[static_cast<std::size_t>(it - names.begin())] = parse_reals(kv.substr(eq + 1), "--fix")[0];
    }
  }
  return fixed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generalized transmuted lifetime distributions: fitting, properties, simulation"};
  app.require_subcommand(1);
  int precision = 6;
  app.add_option("--precision", precision, "Significant digits in printed numbers")->check(CLI::Range(1, 17));

  // data
  auto* data_cmd = app.add_subcommand("data", "Describe a built-in dataset (gauge, failure) or a data file");
  std::string data_name;
  bool data_values = false;
  data_cmd->add_option("dataset", data_name, "Built-in name or file path")->required();
  data_cmd->add_flag("--values", data_values, "Include the sorted values");

  // fit
  auto* fit_cmd = app.add_subcommand("fit", "Fit one family by one method and report goodness of fit");
  std::string fit_data, fit_family, fit_method = "ml", fit_init, fit_out;
  std::vector<std::string> fit_fix;
  int fit_starts = 5;
  std::uint64_t fit_seed = 0;
  fit_cmd->add_option("--data", fit_data, "Built-in dataset name or file path")->required();
  fit_cmd->add_option("--family", fit_family, "Sub-family id")->required();
  fit_cmd->add_option("--method", fit_method, "ml, ols, wls, cvm, ad or rtad");
  fit_cmd->add_option("--init", fit_init, "Starting values, comma separated in parameter order");
  fit_cmd->add_option("--fix", fit_fix, "Pin parameters, e.g. lambda=0");
  fit_cmd->add_option("--starts", fit_starts, "Number of optimizer starts")->check(CLI::PositiveNumber);
  fit_cmd->add_option("--seed", fit_seed, "Seed for the jittered starts");
  fit_cmd->add_option("-o,--output", fit_out, "Write JSON here instead of stdout");

  // select
  auto* sel_cmd = app.add_subcommand("select", "Fit several families and rank them by AIC");
  std::string sel_data, sel_families, sel_method = "ml", sel_out;
  sel_cmd->add_option("--data", sel_data, "Built-in dataset name or file path")->required();
  sel_cmd->add_option("--families", sel_families, "Comma-separated family ids")->required();
  sel_cmd->add_option("--method", sel_method, "Estimation method for every candidate");
  sel_cmd->add_option("-o,--output", sel_out, "Write JSON here instead of stdout");

  // props
  auto* props_cmd = app.add_subcommand("props", "Evaluate distributional properties");
  std::string p_family, p_params, p_method = "quadrature";
  std::vector<int> p_moment;
  std::vector<std::string> p_incomplete, p_pwm, p_stress, p_residual, p_reversed, p_cigf, p_order;
  std::vector<double> p_mgf, p_quantile, p_renyi, p_qent, p_mrl, p_mrrl, p_crigm;
  std::optional<double> p_lo, p_hi;
  bool p_measures = false;
  props_cmd->add_option("--family", p_family, "Sub-family id")->required();
  props_cmd->add_option("--params", p_params, "Parameters, comma separated in parameter order")->required();
  props_cmd->add_option("--moment", p_moment, "Raw moment of order r");
  props_cmd->add_option("--moment-method", p_method, "quadrature or series (series: gtw only)");
  props_cmd->add_option("--incomplete", p_incomplete, "Incomplete moment 'r,z'");
  props_cmd->add_option("--pwm", p_pwm, "Probability weighted moment 'r,s'");
  props_cmd->add_option("--mgf", p_mgf, "Moment generating function at t");
  props_cmd->add_option("--quantile", p_quantile, "Quantile at p");
  props_cmd->add_flag("--measures", p_measures, "Median, Moors kurtosis, Bowley skewness");
  props_cmd->add_option("--renyi", p_renyi, "Renyi entropy of order rho");
  props_cmd->add_option("--qentropy", p_qent, "q-entropy of order q");
  props_cmd->add_option("--window-lower", p_lo, "Lower limit for the entropy integrals");
  props_cmd->add_option("--window-upper", p_hi, "Upper limit for the entropy integrals");
  props_cmd->add_option("--stress", p_stress, "Stress-strength reliability 'lambda1,lambda2'");
  props_cmd->add_option("--mrl", p_mrl, "Mean residual life at t");
  props_cmd->add_option("--mrrl", p_mrrl, "Mean waiting time at t");
  props_cmd->add_option("--residual", p_residual, "Residual-life moment 'n,t'");
  props_cmd->add_option("--reversed", p_reversed, "Reversed residual-life moment 'n,t'");
  props_cmd->add_option("--cigf", p_cigf, "Cumulative information generating function 'm,n'");
  props_cmd->add_option("--crigm", p_crigm, "Cumulative residual information generating measure at n");
  props_cmd->add_option("--order-pdf", p_order, "Order statistic density 'n,r,x'");

  // curves
  auto* curves_cmd = app.add_subcommand("curves", "Emit pdf, cdf and hazard on a grid as CSV");
  std::string c_family, c_params, c_which = "pdf,cdf,hazard", c_out;
  double c_from = 0.0, c_to = 0.0;
  int c_points = 200;
  curves_cmd->add_option("--family", c_family, "Sub-family id")->required();
  curves_cmd->add_option("--params", c_params, "Parameters, comma separated in parameter order")->required();
  curves_cmd->add_option("--from", c_from, "Grid start (default: support edge)");
  curves_cmd->add_option("--to", c_to, "Grid end (default: 0.999 quantile)");
  curves_cmd->add_option("--points", c_points, "Grid size")->check(CLI::Range(2, 10000000));
  curves_cmd->add_option("--which", c_which, "Columns: any of pdf,cdf,hazard");
  curves_cmd->add_option("-o,--output", c_out, "Write CSV here instead of stdout");

  // simulate
  auto* sim_cmd = app.add_subcommand("simulate", "Run a Monte Carlo study from a config file");
  std::string s_config, s_format = "text", s_csv, s_json;
  unsigned s_threads = 0;
  sim_cmd->add_option("--config", s_config, "key = value config file")->required();
  sim_cmd->add_option("--format", s_format, "stdout format: text, csv or json");
  sim_cmd->add_option("--csv", s_csv, "Also write CSV here");
  sim_cmd->add_option("--json", s_json, "Also write JSON here");
  sim_cmd->add_option("--threads", s_threads, "Worker threads (overrides the config)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsageError;
  }

  // Input resolution raises usage_error (exit 2); anything thrown by the
  // numerical work afterwards is a computation failure (exit 1).
  try {
    if (*data_cmd) {
      const auto s = data_arg(data_name);
      json j = describe_json(s);
      if (data_values) j["values"] = s.values;
      emit(j, precision, "");
      return kOk;
    }

    if (*fit_cmd) {
      const auto s = data_arg(fit_data);
      const auto id = family_arg(fit_family);
      const auto method = method_arg(fit_method);
      gtld::FitOptions opt;
      opt.starts = fit_starts;
      opt.seed = fit_seed;
      opt.fixed = fixed_arg(id, fit_fix);
      if (!fit_init.empty()) opt.init = params_arg(id, fit_init);
      gtld::FitResult r;
      gtld::GofReport g;
      try {
        r = gtld::fit(s, id, method, opt);
        r.std_errors = gtld::standard_errors(r, s, opt.fixed);
        g = gtld::gof_report(s, id, r.estimates);
      } catch (const gtld::convergence_error& e) {
        std::cerr << "gtld fit: " << e.what() << '\n';
        return kComputeError;
      }
      emit(fit_json(s, r, g), precision, fit_out);
      if (!r.converged) std::cerr << "gtld fit: warning: optimizer did not meet its convergence test\n";
      return kOk;
    }

    if (*sel_cmd) {
      const auto s = data_arg(sel_data);
      const auto method = method_arg(sel_method);
      std::vector<gtld::Candidate> cands;
      for (const auto& f : split(sel_families)) cands.push_back({family_arg(f), method});
      if (cands.empty()) throw usage_error("--families is empty");
      const auto ranked = gtld::model_select(s, cands);
      json rows = json::array();
      int rank = 0;
      for (const auto& sel : ranked) {
        json row;
        if (sel.fit && sel.report) {
          row = fit_json(s, *sel.fit, *sel.report);
          row["rank"] = ++rank;
        } else {
          row = {{"data", s.name},
                 {"family", std::string(gtld::to_string(sel.candidate.family))},
                 {"method", std::string(gtld::to_string(sel.candidate.method))},
                 {"error", sel.error}};
        }
        rows.push_back(row);
      }
      emit({{"data", s.name}, {"ranking", rows}}, precision, sel_out);
      return kOk;
    }

    if (*props_cmd) {
      const auto id = family_arg(p_family);
      const auto params = params_arg(id, p_params);
      if (p_method != "quadrature" && p_method != "series") throw usage_error("--moment-method: quadrature or series");
      const auto mm = p_method == "series" ? gtld::MomentMethod::series : gtld::MomentMethod::quadrature;
      const auto model = gtld::make_model(id, params);
      gtld::IntegrationWindow window{p_lo, p_hi};

      struct Request {
        std::string quantity;
        json args;
        std::function<json()> eval;
      };
      std::vector<Request> reqs;
      auto need = [](const std::string& s, std::size_t k, const std::string& what) {
        auto v = parse_reals(s, what);
        if (v.size() != k) throw usage_error(what + " expects " + std::to_string(k) + " comma-separated values");
        return v;
      };
      for (int r : p_moment)
        reqs.push_back({"moment", {{"r", r}}, [&, r] { return json(gtld::raw_moment(model, r, mm, id)); }});
      for (const auto& s : p_incomplete) {
        auto v = need(s, 2, "--incomplete");
        reqs.push_back({"incomplete_moment", {{"r", v[0]}, {"z", v[1]}}, [&, v] {
                          return json(gtld::incomplete_moment(model, static_cast<int>(v[0]), v[1], mm, id));
                        }});
      }
      for (const auto& s : p_pwm) {
        auto v = need(s, 2, "--pwm");
        reqs.push_back({"pwm", {{"r", v[0]}, {"s", v[1]}}, [&, v] {
                          return json(gtld::pwm(model, static_cast<int>(v[0]), static_cast<int>(v[1])));
                        }});
      }
      for (double t : p_mgf) reqs.push_back({"mgf", {{"t", t}}, [&, t] { return json(gtld::mgf(model, t)); }});
      for (double p : p_quantile)
        reqs.push_back({"quantile", {{"p", p}}, [&, p] { return json(model.quantile(p)); }});
      if (p_measures)
        reqs.push_back({"quantile_measures", json::object(), [&] {
                          const auto q = gtld::quantile_measures(model);
                          return json{{"median", q.median},
                                      {"moors_kurtosis", q.moors_kurtosis},
                                      {"bowley_skewness", q.bowley_skewness}};
                        }});
      for (double rho : p_renyi)
        reqs.push_back(
            {"renyi_entropy", {{"rho", rho}}, [&, rho] { return json(gtld::renyi_entropy(model, rho, window)); }});
      for (double q : p_qent)
        reqs.push_back({"q_entropy", {{"q", q}}, [&, q] { return json(gtld::q_entropy(model, q, window)); }});
      for (const auto& s : p_stress) {
        auto v = need(s, 2, "--stress");
        reqs.push_back({"stress_strength", {{"lambda1", v[0]}, {"lambda2", v[1]}},
                        [v] { return json(gtld::stress_strength(v[0], v[1])); }});
      }
      for (double t : p_mrl)
        reqs.push_back({"mean_residual_life", {{"t", t}}, [&, t] { return json(gtld::residual_moment(model, 1, t)); }});
      for (double t : p_mrrl)
        reqs.push_back({"mean_waiting_time", {{"t", t}},
                        [&, t] { return json(gtld::reversed_residual_moment(model, 1, t)); }});
      for (const auto& s : p_residual) {
        auto v = need(s, 2, "--residual");
        reqs.push_back({"residual_moment", {{"n", v[0]}, {"t", v[1]}},
                        [&, v] { return json(gtld::residual_moment(model, static_cast<int>(v[0]), v[1])); }});
      }
      for (const auto& s : p_reversed) {
        auto v = need(s, 2, "--reversed");
        reqs.push_back({"reversed_residual_moment", {{"n", v[0]}, {"t", v[1]}}, [&, v] {
                          return json(gtld::reversed_residual_moment(model, static_cast<int>(v[0]), v[1]));
                        }});
      }
      for (const auto& s : p_cigf) {
        auto v = need(s, 2, "--cigf");
        reqs.push_back({"cigf", {{"m", v[0]}, {"n", v[1]}}, [&, v] { return json(gtld::cigf(model, v[0], v[1])); }});
      }
      for (double n : p_crigm)
        reqs.push_back({"crigm", {{"n", n}}, [&, n] { return json(gtld::crigm(model, n)); }});
      for (const auto& s : p_order) {
        auto v = need(s, 3, "--order-pdf");
        reqs.push_back({"order_stat_pdf", {{"n", v[0]}, {"r", v[1]}, {"x", v[2]}}, [&, v] {
                          return json(
                              gtld::order_stat_pdf(model, static_cast<int>(v[0]), static_cast<int>(v[1]), v[2]));
                        }});
      }
      if (reqs.empty()) throw usage_error("props: nothing requested (try --moment 1)");

      json results = json::array();
      bool failed = false;
      for (auto& rq : reqs) {
        json row{{"quantity", rq.quantity}, {"args", rq.args}};
        try {
          row["value"] = rq.eval();
        } catch (const std::exception& e) {
          row["error"] = e.what();
          std::cerr << "gtld props: " << rq.quantity << ": " << e.what() << '\n';
          failed = true;
        }
        results.push_back(row);
      }
      json out{{"family", std::string(gtld::to_string(id))}, {"params", params_json(id, params)}, {"results", results}};
      if (p_lo || p_hi) out["window"] = {{"lower", p_lo ? json(*p_lo) : json(nullptr)}, {"upper", p_hi ? json(*p_hi) : json(nullptr)}};
      emit(out, precision, "");
      return failed ? kComputeError : kOk;
    }

    if (*curves_cmd) {
      const auto id = family_arg(c_family);
      const auto params = params_arg(id, c_params);
      const auto model = gtld::make_model(id, params);
      const auto cols = split(c_which);
      for (const auto& c : cols)
        if (c != "pdf" && c != "cdf" && c != "hazard") throw usage_error("--which: unknown column '" + c + "'");
      const double from = curves_cmd->count("--from") ? c_from : model.support_low();
      const double to = curves_cmd->count("--to") ? c_to : model.quantile(0.999);
      if (from < model.support_low()) throw usage_error("--from lies below the support");
      if (!(to > from)) throw usage_error("--to must exceed --from");
      std::ostringstream os;
      os << 'x';
      for (const auto& c : cols) os << ',' << c;
      os << '\n';
      for (int i = 0; i < c_points; ++i) {
        const double x = from + (to - from) * i / (c_points - 1);
        os << fmt(x, precision);
        for (const auto& c : cols) {
          double v;
          if (c == "pdf") {
            v = model.pdf(x);
          } else if (c == "cdf") {
            v = model.cdf(x);
          } else {
            const double sv = model.survival(x);
            v = sv > 0.0 ? model.pdf(x) / sv : std::numeric_limits<double>::infinity();
          }
          os << ',' << fmt(v, precision);
        }
        os << '\n';
      }
      if (c_out.empty()) {
        std::cout << os.str();
      } else {
        std::ofstream f(c_out);
        if (!f) throw usage_error("cannot write '" + c_out + "'");
        f << os.str();
      }
      return kOk;
    }

    if (*sim_cmd) {
      gtld::SimConfig cfg = gtld::load_sim_config(s_config);
      if (sim_cmd->count("--threads")) cfg.threads = s_threads;
      gtld::TableFormat tf;
      if (s_format == "text")
        tf = gtld::TableFormat::text;
      else if (s_format == "csv")
        tf = gtld::TableFormat::csv;
      else if (s_format == "json")
        tf = gtld::TableFormat::json;
      else
        throw usage_error("--format: text, csv or json");
      const auto res = gtld::run_simulation(cfg);
      std::cout << gtld::emit_table(res, tf, precision);
      auto write = [&](const std::string& path, gtld::TableFormat f) {
        if (path.empty()) return;
        std::ofstream out(path);
        if (!out) throw usage_error("cannot write '" + path + "'");
        out << gtld::emit_table(res, f, precision);
      };
      write(s_csv, gtld::TableFormat::csv);
      write(s_json, gtld::TableFormat::json);
      return kOk;
    }
  } catch (const usage_error& e) {
    std::cerr << "gtld: " << e.what() << '\n';
    return kUsageError;
  } catch (const gtld::config_error& e) {
    std::cerr << "gtld: config: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "gtld: " << e.what() << '\n';
    return kComputeError;
  }
  return kOk;
}
