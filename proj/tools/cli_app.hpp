#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "statdist/serialization.hpp"
#include "statdist/statdist.hpp"

namespace statdist::cli {

using io::json;

inline laws::ResponseLaw parse_law(const std::string& spec) {
  if (spec == "cos2") {
    return laws::ResponseLaw::cosine_squared();
  }
  if (spec.rfind("cos2:", 0) == 0) {
    const std::string arg = spec.substr(5);
    double w = 0.0;
    try {
      std::size_t used = 0;
      w = std::stod(arg, &used);
      if (used != arg.size()) throw std::invalid_argument(arg);
    } catch (const std::exception&) {
      throw ValidationError("bad law frequency '" + arg + "'");
    }
    return laws::ResponseLaw::cosine_squared_scaled(w);
  }
  if (spec.rfind("table:", 0) == 0) {
    return laws::ResponseLaw::tabulated_from_csv(spec.substr(6));
  }
  throw ValidationError("unknown law '" + spec +
                        "' (expected cos2, cos2:<w>, or table:<path>)");
}

inline std::vector<SampleSize> parse_schedule(const std::string& spec) {
  std::vector<SampleSize> schedule;
  std::stringstream ss(spec);
  std::string field;
  while (std::getline(ss, field, ',')) {
    try {
      std::size_t used = 0;
      const unsigned long long n = std::stoull(field, &used);
      if (used != field.size()) throw std::invalid_argument(field);
      schedule.push_back(SampleSize(n));
    } catch (const ValidationError&) {
      throw;
    } catch (const std::exception&) {
      throw ValidationError("bad schedule entry '" + field + "'");
    }
  }
  if (schedule.empty()) {
    throw ValidationError("empty sample-size schedule");
  }
  return schedule;
}

namespace detail {

struct Common {
  std::uint64_t seed = 0;
  std::string out;
  std::string format = "json";
  int threads = 1;
  bool degrees = false;
  std::string config;
};

inline void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--seed", c.seed, "base seed for derived randomness")
      ->capture_default_str();
  cmd->add_option("--out", c.out,
                  "write the artifact to this file instead of stdout");
  cmd->add_option("--format", c.format, "artifact format")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  cmd->add_option("--threads", c.threads, "parallelism cap")
      ->check(CLI::Range(1, 256))
      ->capture_default_str();
  cmd->add_flag("--degrees", c.degrees,
                "echo key angles in degrees on the console (files stay in "
                "radians)");
  cmd->add_option("--config", c.config,
                  "flat key=value file mirroring the flags; flags win");
}

// Splices `key=value` lines from a --config file into the argument list as
// `--key=value` tokens, skipping keys already given on the command line.
inline void expand_config_args(std::vector<std::string>& args) {
  if (args.empty() || args.front().empty() || args.front().front() == '-') {
    return;
  }
  std::string path;
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    }
  }
  if (path.empty()) return;
  std::ifstream file(path);
  if (!file) {
    throw ValidationError("cannot read config file '" + path + "'");
  }
  auto trim = [](const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    const auto b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
  };
  auto given = [&args](const std::string& flag) {
    for (const std::string& a : args) {
      if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
    }
    return false;
  };
  std::vector<std::string> extra;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(file, line)) {
    ++lineno;
    const std::string text = trim(line);
    if (text.empty() || text.front() == '#') continue;
    const auto eq = text.find('=');
    std::string key =
        eq == std::string::npos ? std::string() : trim(text.substr(0, eq));
    while (!key.empty() && key.front() == '-') key.erase(key.begin());
    if (key.empty()) {
      throw ValidationError("config file '" + path + "' line " +
                            std::to_string(lineno) + ": expected key=value");
    }
    if (key == "config") continue;
    const std::string flag = "--" + key;
    if (given(flag)) continue;
    extra.push_back(flag + "=" + trim(text.substr(eq + 1)));
  }
  args.insert(args.end(), extra.begin(), extra.end());
}

inline json common_config(const Common& c) {
  json out;
  out["seed"] = c.seed;
  out["format"] = c.format;
  out["threads"] = c.threads;
  return out;
}

inline void emit(const std::string& content, const Common& c,
                 std::ostream& out) {
  if (c.out.empty()) {
    out << content;
    return;
  }
  std::ofstream file(c.out, std::ios::binary);
  if (!file) {
    throw ValidationError("cannot open output file '" + c.out + "'");
  }
  file << content;
  file.flush();
  if (!file) {
    throw ValidationError("failed writing '" + c.out + "'");
  }
}

inline void emit_report(const json& report, const std::string& csv,
                        const Common& c, std::ostream& out) {
  if (c.format == "csv") {
    emit(csv, c, out);
  } else {
    emit(report.dump(2) + "\n", c, out);
  }
}

inline double to_degrees(double radians) { return radians * 180.0 / kPi; }

inline void degrees_note(const Common& c, std::ostream& err,
                         const std::string& label, double radians) {
  if (!c.degrees) return;
  err << label << " = " << format_double(radians) << " rad = "
      << format_double(to_degrees(radians)) << " deg\n";
}

inline json law_json(const laws::ResponseLaw& law) {
  json out;
  out["kind"] = to_string(law.kind());
  out["description"] = law.describe();
  if (const auto w = law.frequency()) out["frequency"] = *w;
  out["domain"] = json::array({law.domain_lo(), law.domain_hi()});
  return out;
}

inline json proportionality_json(const core::ProportionalityReport& p) {
  json out;
  out["proportional"] = p.proportional;
  out["constant"] = p.constant;
  out["max_relative_deviation"] = p.max_relative_deviation;
  out["grid_points"] = p.grid_points;
  out["excluded_points"] = p.excluded_points;
  return out;
}

inline json distance_json(const core::DistanceReport& r) {
  json out;
  out["value"] = r.value;
  out["method"] = to_string(r.method);
  out["error_estimate"] = r.diagnostics.error_estimate;
  out["integrand_min"] = r.diagnostics.integrand_min;
  out["integrand_max"] = r.diagnostics.integrand_max;
  out["evaluations"] = r.diagnostics.evaluations;
  if (!r.warnings.empty()) out["warnings"] = r.warnings;
  return out;
}

struct DistOptions {
  Common common;
  std::string law = "cos2";
  double theta1 = 0.0;
  double theta2 = 0.0;
  int sweep = 1;
};

inline void cmd_dist(const DistOptions& o, std::ostream& out,
                     std::ostream& err) {
  const laws::ResponseLaw law = parse_law(o.law);
  json report;
  report["command"] = "dist";
  json config = common_config(o.common);
  config["law"] = o.law;
  config["theta1"] = o.theta1;
  config["theta2"] = o.theta2;
  config["sweep"] = o.sweep;
  report["config"] = config;
  report["law"] = law_json(law);
  report["proportionality"] =
      proportionality_json(core::check_proportionality(law));
  std::string csv = "theta1,theta2,d_quadrature,d_closed_form,abs_diff\n";
  json rows = json::array();
  for (int i = 1; i <= o.sweep; ++i) {
    const double t = i == o.sweep
                         ? o.theta2
                         : o.theta1 + (o.theta2 - o.theta1) *
                                          static_cast<double>(i) /
                                          static_cast<double>(o.sweep);
    const core::DistanceReport q =
        core::statistical_distance(law, o.theta1, t);
    const core::DistanceReport cf =
        core::closed_form_distance(law, o.theta1, t);
    json row;
    row["theta1"] = o.theta1;
    row["theta2"] = t;
    row["quadrature"] = distance_json(q);
    row["closed_form"] = distance_json(cf);
    row["abs_diff"] = std::abs(q.value - cf.value);
    rows.push_back(row);
    csv += format_double(o.theta1) + "," + format_double(t) + "," +
           format_double(q.value) + "," + format_double(cf.value) + "," +
           format_double(std::abs(q.value - cf.value)) + "\n";
    if (i == o.sweep) degrees_note(o.common, err, "d", q.value);
  }
  report["rows"] = rows;
  emit_report(report, csv, o.common, out);
}

struct CountOptions {
  Common common;
  std::string law = "cos2";
  double theta1 = 0.0;
  double theta2 = 0.0;
  std::string schedule = "100,1000,10000,100000,1000000";
};

inline void cmd_count(const CountOptions& o, std::ostream& out,
                      std::ostream& err) {
  const laws::ResponseLaw law = parse_law(o.law);
  const std::vector<SampleSize> schedule = parse_schedule(o.schedule);
  const finite::CountingSeries series =
      finite::distance_by_counting(law, o.theta1, o.theta2, schedule);
  const core::DistanceReport q =
      core::statistical_distance(law, o.theta1, o.theta2);
  json report;
  report["command"] = "count";
  json config = common_config(o.common);
  config["law"] = o.law;
  config["theta1"] = o.theta1;
  config["theta2"] = o.theta2;
  config["schedule"] = o.schedule;
  report["config"] = config;
  report["law"] = law_json(law);
  std::string csv = "n,D,D_over_sqrt_n\n";
  json points = json::array();
  for (const auto& p : series.points) {
    json row;
    row["n"] = p.n;
    row["D"] = p.count;
    row["D_over_sqrt_n"] = p.estimate;
    points.push_back(row);
    csv += std::to_string(p.n) + "," + std::to_string(p.count) + "," +
           format_double(p.estimate) + "\n";
  }
  report["points"] = points;
  report["richardson"] = json{{"value", series.richardson},
                              {"valid", series.richardson_valid}};
  report["quadrature_distance"] = q.value;
  degrees_note(o.common, err, "d (final estimate)",
               series.final_estimate());
  emit_report(report, csv, o.common, out);
}

struct SimulateOptions {
  Common common;
  std::string law = "cos2";
  double theta_true = 0.0;
  bool has_theta_true = false;
  std::uint64_t n = 100000;
  std::size_t replicates = 200;
  double theta1 = 0.0;
  double theta2 = 0.0;
  bool has_span = false;
  std::string schedule = "100,1000,10000,100000,1000000";
  std::string sheet;
  std::string matrix_mode;
  std::size_t columns = 18;
};

inline void cmd_simulate(const SimulateOptions& o, std::ostream& out,
                         std::ostream& err) {
  const laws::ResponseLaw law = parse_law(o.law);
  const bool want_matrix = !o.matrix_mode.empty() || !o.sheet.empty();
  if (!o.has_theta_true && !o.has_span && !want_matrix) {
    throw ValidationError(
        "nothing to simulate: pass --theta-true, --theta1/--theta2, "
        "--matrix-mode, or --sheet");
  }
  json report;
  report["command"] = "simulate";
  json config = common_config(o.common);
  config["law"] = o.law;
  config["n"] = o.n;
  if (o.has_theta_true) {
    config["theta_true"] = o.theta_true;
    config["replicates"] = o.replicates;
  }
  if (o.has_span) {
    config["theta1"] = o.theta1;
    config["theta2"] = o.theta2;
    config["schedule"] = o.schedule;
  }
  if (want_matrix) {
    config["matrix_mode"] = o.matrix_mode.empty() ? "analytic" : o.matrix_mode;
    if (!o.sheet.empty()) {
      config["sheet"] = o.sheet;
    } else {
      config["columns"] = o.columns;
    }
  }
  report["config"] = config;
  report["law"] = law_json(law);
  std::string csv;

  if (o.has_theta_true) {
    const sim::ReplicateSummary summary = sim::replicate_statistics(
        law, o.theta_true, SampleSize(o.n), o.replicates, o.common.seed);
    json coverage;
    coverage["theta_true"] = o.theta_true;
    coverage["n"] = o.n;
    coverage["replicates"] = summary.replicates;
    coverage["mean_p_hat"] = summary.mean_p_hat;
    coverage["std_p_hat"] = summary.std_p_hat;
    coverage["predicted_std"] = summary.predicted_std;
    coverage["std_ratio"] = summary.std_p_hat / summary.predicted_std;
    coverage["coverage"] = summary.coverage;
    coverage["boundary_count"] = summary.boundary_count;
    coverage["unbounded_count"] = summary.unbounded_count;
    report["coverage"] = coverage;
    csv = "mean_p_hat,std_p_hat,predicted_std,coverage\n" +
          format_double(summary.mean_p_hat) + "," +
          format_double(summary.std_p_hat) + "," +
          format_double(summary.predicted_std) + "," +
          format_double(summary.coverage) + "\n";
  }

  if (o.has_span) {
    const std::vector<SampleSize> schedule = parse_schedule(o.schedule);
    json points = json::array();
    std::string conv_csv = "n,D,D_over_sqrt_n,d_analytic\n";
    for (const SampleSize n : schedule) {
      const sim::EmpiricalDistance e = sim::empirical_distance(
          law, o.theta1, o.theta2, n, o.common.seed);
      json row;
      row["n"] = n.count();
      row["D"] = e.empirical_count;
      row["D_over_sqrt_n"] = e.empirical;
      row["d_analytic"] = e.analytic;
      row["boundary_flags"] = e.boundary_flags;
      points.push_back(row);
      conv_csv += std::to_string(n.count()) + "," +
                  std::to_string(e.empirical_count) + "," +
                  format_double(e.empirical) + "," +
                  format_double(e.analytic) + "\n";
    }
    report["convergence"] = points;
    csv = conv_csv;
  }

  if (want_matrix) {
    sim::ColumnSheet sheet =
        o.sheet.empty()
            ? sim::uniform_sheet(law, o.columns)
            : sim::ColumnSheet{
                  io::columns_from_json(io::load_json_file(o.sheet)), law};
    const std::string mode =
        o.matrix_mode.empty() ? "analytic" : o.matrix_mode;
    sim::DistanceMatrix matrix;
    if (mode == "analytic") {
      matrix = sim::column_distance_matrix(sheet, o.common.threads);
    } else if (mode == "empirical") {
      matrix = sim::column_distance_matrix(
          sheet, sim::EmpiricalParams{SampleSize(o.n), o.common.seed},
          o.common.threads);
    } else {
      throw ValidationError("matrix mode must be analytic or empirical");
    }
    json section;
    section["mode"] = mode;
    section["ids"] = matrix.ids;
    json values = json::array();
    json failures = json::array();
    for (std::size_t i = 0; i < matrix.values.size(); ++i) {
      values.push_back(matrix.values[i]);
      for (std::size_t j = i + 1; j < matrix.values.size(); ++j) {
        if (!matrix.status[i][j].empty()) {
          failures.push_back(json{{"row", matrix.ids[i]},
                                  {"col", matrix.ids[j]},
                                  {"error", matrix.status[i][j]}});
        }
      }
    }
    section["values"] = values;
    section["failures"] = failures;
    report["matrix"] = section;
    std::string matrix_csv = "id";
    for (const auto& id : matrix.ids) matrix_csv += "," + id;
    matrix_csv += "\n";
    for (std::size_t i = 0; i < matrix.values.size(); ++i) {
      matrix_csv += matrix.ids[i];
      for (std::size_t j = 0; j < matrix.values.size(); ++j) {
        matrix_csv += "," + format_double(matrix.values[i][j]);
      }
      matrix_csv += "\n";
    }
    csv = matrix_csv;
  }

  emit_report(report, csv, o.common, out);
  if (o.has_theta_true) {
    degrees_note(o.common, err, "theta_true", o.theta_true);
  }
}

struct HilbertOptions {
  Common common;
  std::string psi1;
  std::string psi2;
  std::size_t dim = 2;
  std::vector<std::string> bases;
  std::size_t random_bases = 0;
  std::uint64_t restarts = 8;
};

inline json parse_json_or_file(const std::string& spec) {
  if (!spec.empty() && spec.front() == '[') {
    try {
      return json::parse(spec);
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(std::string("invalid inline JSON: ") + e.what());
    }
  }
  return io::load_json_file(spec);
}

inline void cmd_hilbert(const HilbertOptions& o, std::ostream& out,
                        std::ostream& err) {
  if (o.psi1.empty() != o.psi2.empty()) {
    throw ValidationError("pass both --psi1 and --psi2, or neither");
  }
  const hilbert::PureState psi1 =
      o.psi1.empty()
          ? hilbert::random_state(o.dim, CounterRng::derive_key(o.common.seed, 1))
          : io::state_from_json(parse_json_or_file(o.psi1));
  const hilbert::PureState psi2 =
      o.psi2.empty()
          ? hilbert::random_state(o.dim, CounterRng::derive_key(o.common.seed, 2))
          : io::state_from_json(parse_json_or_file(o.psi2));
  const double d = hilbert::hilbert_distance(psi1, psi2);

  json report;
  report["command"] = "hilbert";
  json config = common_config(o.common);
  config["dim"] = psi1.dim();
  config["restarts"] = o.restarts;
  config["random_bases"] = o.random_bases;
  report["config"] = config;
  report["psi1"] = io::state_to_json(psi1);
  report["psi2"] = io::state_to_json(psi2);
  report["d"] = d;

  std::string csv = "basis,d_A,d\n";
  json rows = json::array();
  std::size_t index = 0;
  const auto add_row = [&](const hilbert::MeasurementBasis& basis,
                           const std::string& source) {
    const double da = hilbert::device_distance(basis, psi1, psi2);
    json row;
    row["basis"] = index;
    row["source"] = source;
    row["d_A"] = da;
    row["gap"] = d - da;
    rows.push_back(row);
    csv += std::to_string(index) + "," + format_double(da) + "," +
           format_double(d) + "\n";
    ++index;
  };
  for (const std::string& spec : o.bases) {
    const std::string source =
        !spec.empty() && spec.front() == '[' ? "inline" : spec;
    add_row(io::basis_from_json(parse_json_or_file(spec)), source);
  }
  for (std::size_t i = 0; i < o.random_bases; ++i) {
    add_row(hilbert::random_basis(
                psi1.dim(), CounterRng::derive_key(o.common.seed, 0x900 + i)),
            "random");
  }
  report["bases"] = rows;

  const hilbert::BasisSearchResult search =
      hilbert::optimize_basis(psi1, psi2, o.restarts, o.common.seed);
  json optimization;
  optimization["d_target"] = search.d_target;
  optimization["d_aligned_first"] = search.d_aligned_first;
  optimization["d_aligned_second"] = search.d_aligned_second;
  optimization["d_numeric"] = search.d_numeric;
  optimization["numeric_converged"] = search.numeric_converged;
  optimization["sweeps_best"] = search.sweeps_best;
  optimization["restarts"] = search.restarts;
  optimization["d_max"] = search.d_max;
  optimization["gap"] = search.d_target - search.d_max;
  optimization["best_basis"] = io::basis_to_json(search.basis);
  report["optimization"] = optimization;

  degrees_note(o.common, err, "d", d);
  emit_report(report, csv, o.common, out);
}

struct FisherOptions {
  Common common;
  std::string law = "cos2";
  double theta = 0.0;
  double delta = 1e-3;
  std::size_t halvings = 4;
};

inline void cmd_fisher(const FisherOptions& o, std::ostream& out,
                       std::ostream& err) {
  const laws::ResponseLaw law = parse_law(o.law);
  const double info = core::fisher_information(law, o.theta);
  json report;
  report["command"] = "fisher";
  json config = common_config(o.common);
  config["law"] = o.law;
  config["theta"] = o.theta;
  config["delta"] = o.delta;
  config["halvings"] = o.halvings;
  report["config"] = config;
  report["law"] = law_json(law);
  report["fisher_information"] = info;
  std::string csv = "delta,W,ratio,abs_error\n";
  json rows = json::array();
  double delta = o.delta;
  for (std::size_t i = 0; i <= o.halvings; ++i) {
    const double w = core::wootters_measure(
        core::DiscreteDistribution::bernoulli(law.probability_pair(o.theta)),
        core::DiscreteDistribution::bernoulli(
            law.probability_pair(o.theta + delta)));
    const double ratio = core::fisher_limit_ratio(law, o.theta, delta);
    json row;
    row["delta"] = delta;
    row["W"] = w;
    row["ratio"] = ratio;
    row["abs_error"] = std::abs(ratio - 1.0);
    rows.push_back(row);
    csv += format_double(delta) + "," + format_double(w) + "," +
           format_double(ratio) + "," + format_double(std::abs(ratio - 1.0)) +
           "\n";
    delta *= 0.5;
  }
  report["rows"] = rows;
  degrees_note(o.common, err, "theta", o.theta);
  emit_report(report, csv, o.common, out);
}

struct ChannelsOptions {
  Common common;
  std::size_t count = 8;
  double span_lo = 0.0;
  double span_hi = kHalfPi;
  double width_scale = 0.0;
  bool has_width = false;
  double theta = 0.0;
  bool has_theta = false;
  double theta2 = 0.0;
  bool has_theta2 = false;
  std::size_t sweep = 0;
};

inline void cmd_channels(const ChannelsOptions& o, std::ostream& out,
                         std::ostream& err) {
  const channels::ChannelBank bank(
      o.count, o.span_lo, o.span_hi,
      o.has_width ? std::optional<double>(o.width_scale) : std::nullopt);
  if (!o.has_theta && o.sweep == 0) {
    throw ValidationError("nothing to do: pass --theta and/or --sweep");
  }
  if (o.has_theta2 && !o.has_theta) {
    throw ValidationError("--theta2 needs --theta");
  }
  json report;
  report["command"] = "channels";
  json config = common_config(o.common);
  config["channels"] = o.count;
  config["span_lo"] = o.span_lo;
  config["span_hi"] = o.span_hi;
  config["width_scale"] = bank.width_scale();
  report["config"] = config;
  json bank_json;
  bank_json["count"] = bank.size();
  bank_json["spacing"] = bank.spacing();
  bank_json["width_scale"] = bank.width_scale();
  bank_json["support_halfwidth"] = bank.support_halfwidth();
  bank_json["covered_span"] =
      json::array({bank.covered_lo(), bank.covered_hi()});
  bank_json["centers"] = bank.centers();
  report["bank"] = bank_json;
  std::string csv;

  if (o.has_theta) {
    const channels::ChannelVector v = bank.encode(o.theta);
    const double decoded = bank.decode(v);
    json enc;
    enc["theta"] = o.theta;
    enc["activations"] = v;
    enc["decoded"] = decoded;
    enc["roundtrip_error"] = std::abs(decoded - o.theta);
    report["encode"] = enc;
    std::string header;
    std::string row;
    for (std::size_t k = 0; k < v.size(); ++k) {
      header += (k ? "," : "") + ("c" + std::to_string(k));
      row += (k ? "," : "") + format_double(v[k]);
    }
    csv = header + "\n" + row + "\n";
    degrees_note(o.common, err, "decoded", decoded);
  }

  if (o.has_theta2) {
    const double similarity = channels::channel_similarity(
        bank.encode(o.theta), bank.encode(o.theta2));
    report["similarity"] = json{{"theta1", o.theta},
                                {"theta2", o.theta2},
                                {"value", similarity}};
  }

  if (o.sweep > 0) {
    const double lo = bank.centers().front();
    const double hi = bank.centers().back();
    double max_error = 0.0;
    json rows = json::array();
    std::string sweep_csv = "theta,decoded,abs_error\n";
    for (std::size_t i = 0; i < o.sweep; ++i) {
      const double theta =
          lo + (hi - lo) * (static_cast<double>(i) + 0.5) /
                   static_cast<double>(o.sweep);
      const double decoded = bank.decode(bank.encode(theta));
      const double error = std::abs(decoded - theta);
      max_error = std::max(max_error, error);
      json row;
      row["theta"] = theta;
      row["decoded"] = decoded;
      row["abs_error"] = error;
      rows.push_back(row);
      sweep_csv += format_double(theta) + "," + format_double(decoded) + "," +
                   format_double(error) + "\n";
    }
    report["sweep"] = json{{"points", o.sweep}, {"max_error", max_error},
                           {"rows", rows}};
    if (!o.has_theta) csv = sweep_csv;
  }

  emit_report(report, csv, o.common, out);
}

}  // namespace detail

/// Parses and runs one CLI invocation. Returns the process exit code:
/// 0 success, 2 validation/usage error, 3 numeric error.
inline int run(std::vector<std::string> args, std::ostream& out,
               std::ostream& err) {
  CLI::App app{"statistical distance toolkit"};
  app.require_subcommand(1);

  detail::DistOptions dist;
  CLI::App* dist_cmd = app.add_subcommand(
      "dist", "quadrature and closed-form statistical distance");
  detail::add_common(dist_cmd, dist.common);
  dist_cmd->add_option("--law", dist.law, "cos2 | cos2:<w> | table:<csv>")
      ->capture_default_str();
  dist_cmd->add_option("--theta1", dist.theta1, "first orientation (rad)")
      ->required();
  dist_cmd->add_option("--theta2", dist.theta2, "second orientation (rad)")
      ->required();
  dist_cmd
      ->add_option("--sweep", dist.sweep,
                   "number of rows from theta1 toward theta2")
      ->check(CLI::Range(1, 100000))
      ->capture_default_str();

  detail::CountOptions count;
  CLI::App* count_cmd = app.add_subcommand(
      "count", "distinguishable-orientation counting convergence");
  detail::add_common(count_cmd, count.common);
  count_cmd->add_option("--law", count.law, "cos2 | cos2:<w> | table:<csv>")
      ->capture_default_str();
  count_cmd->add_option("--theta1", count.theta1, "span start (rad)")
      ->required();
  count_cmd->add_option("--theta2", count.theta2, "span end (rad)")
      ->required();
  count_cmd
      ->add_option("--schedule", count.schedule,
                   "comma-separated trial counts")
      ->capture_default_str();

  detail::SimulateOptions simulate;
  CLI::App* sim_cmd = app.add_subcommand(
      "simulate", "seeded Monte Carlo: coverage, convergence, matrices");
  detail::add_common(sim_cmd, simulate.common);
  sim_cmd->add_option("--law", simulate.law, "cos2 | cos2:<w> | table:<csv>")
      ->capture_default_str();
  CLI::Option* theta_true_opt = sim_cmd->add_option(
      "--theta-true", simulate.theta_true,
      "replicate experiments at this hidden orientation");
  sim_cmd->add_option("--n", simulate.n, "trials per experiment")
      ->capture_default_str();
  sim_cmd
      ->add_option("--replicates", simulate.replicates,
                   "replicate count for coverage statistics")
      ->capture_default_str();
  CLI::Option* sim_theta1_opt =
      sim_cmd->add_option("--theta1", simulate.theta1,
                          "span start for empirical counting (rad)");
  CLI::Option* sim_theta2_opt =
      sim_cmd->add_option("--theta2", simulate.theta2,
                          "span end for empirical counting (rad)");
  sim_cmd
      ->add_option("--schedule", simulate.schedule,
                   "comma-separated trial counts for the convergence study")
      ->capture_default_str();
  sim_cmd->add_option("--sheet", simulate.sheet,
                      "JSON column sheet for the distance matrix");
  sim_cmd->add_option("--matrix-mode", simulate.matrix_mode,
                      "analytic | empirical");
  sim_cmd
      ->add_option("--columns", simulate.columns,
                   "column count for the default uniform sheet")
      ->capture_default_str();

  detail::HilbertOptions hilbert_opts;
  CLI::App* hilbert_cmd = app.add_subcommand(
      "hilbert", "ray angles, analyzer distances, basis search");
  detail::add_common(hilbert_cmd, hilbert_opts.common);
  hilbert_cmd->add_option("--psi1", hilbert_opts.psi1,
                          "state as inline JSON [[re,im],...] or a file path");
  hilbert_cmd->add_option("--psi2", hilbert_opts.psi2,
                          "state as inline JSON [[re,im],...] or a file path");
  hilbert_cmd
      ->add_option("--dim", hilbert_opts.dim,
                   "dimension for random states when psi1/psi2 are omitted")
      ->check(CLI::Range(std::size_t{2}, std::size_t{64}))
      ->capture_default_str();
  hilbert_cmd->add_option("--basis", hilbert_opts.bases,
                          "analyzer basis (inline JSON or file); repeatable");
  hilbert_cmd
      ->add_option("--random-bases", hilbert_opts.random_bases,
                   "number of random analyzer bases to score")
      ->capture_default_str();
  hilbert_cmd
      ->add_option("--restarts", hilbert_opts.restarts,
                   "random restarts for the basis search")
      ->check(CLI::Range(std::uint64_t{1}, std::uint64_t{1024}))
      ->capture_default_str();

  detail::FisherOptions fisher;
  CLI::App* fisher_cmd = app.add_subcommand(
      "fisher", "overlap angle vs Fisher information as separations shrink");
  detail::add_common(fisher_cmd, fisher.common);
  fisher_cmd->add_option("--law", fisher.law, "cos2 | cos2:<w> | table:<csv>")
      ->capture_default_str();
  fisher_cmd->add_option("--theta", fisher.theta, "base orientation (rad)")
      ->required();
  fisher_cmd->add_option("--delta", fisher.delta, "largest separation (rad)")
      ->capture_default_str();
  fisher_cmd
      ->add_option("--halvings", fisher.halvings,
                   "how many times to halve the separation")
      ->check(CLI::Range(std::size_t{0}, std::size_t{40}))
      ->capture_default_str();

  detail::ChannelsOptions channels_opts;
  CLI::App* channels_cmd = app.add_subcommand(
      "channels", "overlapping cos^2 channel encoding and decoding");
  detail::add_common(channels_cmd, channels_opts.common);
  channels_cmd
      ->add_option("--channels", channels_opts.count, "number of channels")
      ->capture_default_str();
  channels_cmd
      ->add_option("--span-lo", channels_opts.span_lo,
                   "first channel center (rad)")
      ->capture_default_str();
  channels_cmd
      ->add_option("--span-hi", channels_opts.span_hi,
                   "last channel center (rad)")
      ->capture_default_str();
  CLI::Option* width_opt = channels_cmd->add_option(
      "--width-scale", channels_opts.width_scale,
      "channel width scale w (default pi / (3 spacing))");
  CLI::Option* theta_opt = channels_cmd->add_option(
      "--theta", channels_opts.theta, "orientation to encode/decode (rad)");
  CLI::Option* theta2_opt = channels_cmd->add_option(
      "--theta2", channels_opts.theta2,
      "second orientation for channel similarity (rad)");
  channels_cmd
      ->add_option("--sweep", channels_opts.sweep,
                   "round-trip sweep over this many interior points")
      ->capture_default_str();

  dist_cmd->callback([&]() { detail::cmd_dist(dist, out, err); });
  count_cmd->callback([&]() { detail::cmd_count(count, out, err); });
  sim_cmd->callback([&]() {
    simulate.has_theta_true = theta_true_opt->count() > 0;
    const bool t1 = sim_theta1_opt->count() > 0;
    const bool t2 = sim_theta2_opt->count() > 0;
    if (t1 != t2) {
      throw ValidationError("pass both --theta1 and --theta2, or neither");
    }
    simulate.has_span = t1;
    detail::cmd_simulate(simulate, out, err);
  });
  hilbert_cmd->callback([&]() { detail::cmd_hilbert(hilbert_opts, out, err); });
  fisher_cmd->callback([&]() { detail::cmd_fisher(fisher, out, err); });
  channels_cmd->callback([&]() {
    channels_opts.has_width = width_opt->count() > 0;
    channels_opts.has_theta = theta_opt->count() > 0;
    channels_opts.has_theta2 = theta2_opt->count() > 0;
    detail::cmd_channels(channels_opts, out, err);
  });

  std::vector<const char*> argv;
  try {
    detail::expand_config_args(args);
    argv.reserve(args.size() + 1);
    argv.push_back("statdist");
    for (const std::string& a : args) argv.push_back(a.c_str());
    app.parse(static_cast<int>(argv.size()),
              const_cast<char**>(argv.data()));
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}

}  // namespace statdist::cli
