#include "csp/report.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"

namespace csp {

namespace {

using nlohmann::json;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw PreconditionError("config: key '" + key + "' has non-numeric value '" + value +
                            "'");
  }
}

int to_int(const std::string& key, const std::string& value) {
  const double v = to_double(key, value);
  const int i = static_cast<int>(std::lround(v));
  if (i != v) throw PreconditionError("config: key '" + key + "' must be an integer");
  return i;
}

json experiment_params(const Experiment& e) {
  json p;
  p["system"] = e.system;
  p["kappa"] = e.kappa;
  p["lambda"] = e.lambda;
  p["q"] = e.q;
  p["mode"] = e.mode == RefinementMode::two_step ? "two_step" : "one_step";
  p["policy"] = e.policy == EvalPolicy::current ? "current" : "previous";
  p["scheme"] =
      e.scheme == ProjectionScheme::fiber_search ? "fiber_search" : "vertical_base";
  p["grid.min"] = e.grid_min;
  p["grid.max"] = e.grid_max;
  p["grid.nodes"] = e.grid_nodes;
  p["x0.y"] = e.x0.y[0];
  p["x0.z"] = e.x0.z[0];
  p["horizon"] = e.horizon;
  p["dt"] = e.dt;
  return p;
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << content;
  if (!out.good()) throw Error("write to '" + path + "' failed");
}

void write_sweep_csv(const SweepTable& table, const std::string& path) {
  std::ostringstream os;
  os << "eps,metric,aux\n";
  for (const auto& r : table.rows)
    os << format_double(r.eps) << ',' << format_double(r.metric) << ','
       << format_double(r.aux) << '\n';
  write_text_file(path, os.str());
}

void write_cspm_csv(const CspmTable& table, const std::string& path) {
  std::ostringstream os;
  os << "y";
  const int n = table.values.empty() ? 0 : static_cast<int>(table.values.front().size());
  for (int k = 0; k < n; ++k) os << ",z" << k;
  os << ",order,eps,residual\n";
  for (int i = 0; i < table.nodes(); ++i) {
    os << format_double(table.grid[i]);
    for (int k = 0; k < n; ++k) os << ',' << format_double(table.values[i][k]);
    os << ',' << table.order << ',' << format_double(table.eps) << ','
       << format_double(table.residuals[i]) << '\n';
  }
  write_text_file(path, os.str());
}

std::string sweep_report_json(const SweepTable& table) {
  json doc;
  doc["experiment"] = to_string(table.exp.kind);
  doc["params"] = experiment_params(table.exp);
  doc["rows"] = json::array();
  for (const auto& r : table.rows)
    doc["rows"].push_back({{"eps", r.eps}, {"metric", r.metric}, {"aux", r.aux}});
  const SlopeBand band = expected_band(table.exp.kind, table.exp.q);
  doc["slope"] = table.fit.slope;
  doc["intercept"] = table.fit.intercept;
  doc["r2"] = table.fit.r2;
  doc["points_used"] = table.fit.points_used;
  json jband = json::array();  // JSON has no infinity; null marks an open end
  jband.push_back(std::isfinite(band.lo) ? json(band.lo) : json());
  jband.push_back(std::isfinite(band.hi) ? json(band.hi) : json());
  doc["band"] = jband;
  doc["pass"] = table.fit.points_used > 0 && band_satisfied(band, table.fit.slope);
  doc["notes"] = table.notes;
  return doc.dump(2) + "\n";
}

std::map<std::string, std::string> parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file '" + path + "'");
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw PreconditionError("config: line " + std::to_string(lineno) +
                              " is not of the form key = value");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty())
      throw PreconditionError("config: empty key on line " + std::to_string(lineno));
    kv[key] = value;
  }
  return kv;
}

Experiment experiment_from_config(const std::map<std::string, std::string>& kv,
                                  std::vector<double>& eps_list) {
  Experiment e;
  for (const auto& [key, value] : kv) {
    if (key == "experiment") e.kind = experiment_kind_from_string(value);
    else if (key == "system") e.system = value;
    else if (key == "kappa") e.kappa = to_double(key, value);
    else if (key == "lambda") e.lambda = to_double(key, value);
    else if (key == "q") e.q = to_int(key, value);
    else if (key == "mode") {
      if (value == "one_step") e.mode = RefinementMode::one_step;
      else if (value == "two_step") e.mode = RefinementMode::two_step;
      else throw PreconditionError("config: mode must be one_step or two_step");
    } else if (key == "policy") {
      if (value == "current") e.policy = EvalPolicy::current;
      else if (value == "previous") e.policy = EvalPolicy::previous;
      else throw PreconditionError("config: policy must be current or previous");
    } else if (key == "scheme") {
      if (value == "fiber_search") e.scheme = ProjectionScheme::fiber_search;
      else if (value == "vertical_base") e.scheme = ProjectionScheme::vertical_base;
      else throw PreconditionError("config: scheme must be fiber_search or vertical_base");
    } else if (key == "grid.min") e.grid_min = to_double(key, value);
    else if (key == "grid.max") e.grid_max = to_double(key, value);
    else if (key == "grid.nodes") e.grid_nodes = to_int(key, value);
    else if (key == "x0.y") e.x0.y = Vec::Constant(1, to_double(key, value));
    else if (key == "x0.z") e.x0.z = Vec::Constant(1, to_double(key, value));
    else if (key == "horizon") e.horizon = to_double(key, value);
    else if (key == "dt") e.dt = to_double(key, value);
    else if (key == "eps.list") {
      eps_list.clear();
      std::stringstream ss(value);
      std::string item;
      while (std::getline(ss, item, ',')) {
        const std::string it = trim(item);
        if (!it.empty()) eps_list.push_back(to_double(key, it));
      }
      if (eps_list.empty())
        throw PreconditionError("config: eps.list has no values");
    } else if (key == "out" || key == "json") {
      // consumed by the CLI
    } else {
      throw PreconditionError("config: unknown key '" + key + "'");
    }
  }
  return e;
}

bool summarize_reports(const std::vector<std::string>& json_paths, std::string& rendered) {
  std::ostringstream os;
  bool all_pass = true;
  for (const auto& path : json_paths) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open report '" + path + "'");
    json doc;
    try {
      in >> doc;
    } catch (const json::exception& ex) {
      throw Error("report '" + path + "' is not valid JSON: " + ex.what());
    }
    const std::string name = doc.value("experiment", std::string("?"));
    const int q = doc.contains("params") ? doc["params"].value("q", -1) : -1;
    const double slope = doc.value("slope", 0.0);
    const bool pass = doc.value("pass", false);
    const double inf = std::numeric_limits<double>::infinity();
    double blo = -inf, bhi = inf;
    if (doc.contains("band") && doc["band"].is_array() && doc["band"].size() == 2) {
      if (doc["band"][0].is_number()) blo = doc["band"][0].get<double>();
      if (doc["band"][1].is_number()) bhi = doc["band"][1].get<double>();
    }
    os << (pass ? "PASS" : "FAIL") << "  " << name << "  q=" << q
       << "  slope=" << format_double(slope) << "  band=[" << format_double(blo) << ", "
       << format_double(bhi) << "]\n";
    all_pass = all_pass && pass;
  }
  rendered = os.str();
  return all_pass;
}

}  // namespace csp
