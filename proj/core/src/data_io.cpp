#include "sfp/data_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace sfp {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

bool parse_double(const std::string& s, double& out) {
  std::string t = trim(s);
  if (t == "inf" || t == "+inf") {
    out = std::numeric_limits<double>::infinity();
    return true;
  }
  try {
    size_t pos = 0;
    out = std::stod(t, &pos);
    return pos == t.size();
  } catch (...) {
    return false;
  }
}

struct FieldMap {
  std::map<std::string, std::function<bool(RunConfig&, const std::string&)>> setters;
  std::map<std::string, std::function<std::string(const RunConfig&)>> getters;

  void add_double(const std::string& key, double RunConfig::* f) {
    setters[key] = [f](RunConfig& c, const std::string& v) {
      double d;
      if (!parse_double(v, d)) return false;
      c.*f = d;
      return true;
    };
    getters[key] = [f](const RunConfig& c) {
      std::ostringstream os;
      os.precision(17);
      if (std::isinf(c.*f)) {
        os << "inf";
      } else {
        os << c.*f;
      }
      return os.str();
    };
  }
  void add_int(const std::string& key, int RunConfig::* f) {
    setters[key] = [f](RunConfig& c, const std::string& v) {
      double d;
      if (!parse_double(v, d) || d != std::floor(d)) return false;
      c.*f = static_cast<int>(d);
      return true;
    };
    getters[key] = [f](const RunConfig& c) { return std::to_string(c.*f); };
  }
  void add_u64(const std::string& key, std::uint64_t RunConfig::* f) {
    setters[key] = [f](RunConfig& c, const std::string& v) {
      try {
        c.*f = std::stoull(trim(v));
        return true;
      } catch (...) {
        return false;
      }
    };
    getters[key] = [f](const RunConfig& c) { return std::to_string(c.*f); };
  }
  void add_string(const std::string& key, std::string RunConfig::* f) {
    setters[key] = [f](RunConfig& c, const std::string& v) {
      c.*f = trim(v);
      return true;
    };
    getters[key] = [f](const RunConfig& c) { return c.*f; };
  }
};

const FieldMap& fields() {
  static const FieldMap fm = [] {
    FieldMap m;
    m.add_string("problem.kind", &RunConfig::kind);
    m.add_double("problem.lambda", &RunConfig::lambda);
    m.add_double("problem.epsilon", &RunConfig::epsilon);
    m.add_double("problem.B", &RunConfig::B);
    m.add_double("problem.r", &RunConfig::r);
    m.add_double("problem.gamma", &RunConfig::gamma);
    m.add_int("solver.steps", &RunConfig::steps);
    m.add_double("solver.eta0", &RunConfig::eta0);
    m.add_string("solver.schedule", &RunConfig::schedule);
    m.add_int("solver.cells", &RunConfig::cells);
    m.add_string("solver.rule", &RunConfig::rule);
    m.add_u64("solver.seed", &RunConfig::seed);
    m.add_int("solver.N", &RunConfig::N);
    m.add_double("solver.nu_step_scale", &RunConfig::nu_step_scale);
    m.add_int("solver.delta_every", &RunConfig::delta_every);
    m.add_string("solver.method", &RunConfig::method);
    m.add_int("scene.K", &RunConfig::K);
    m.add_double("scene.noise_var", &RunConfig::noise_var);
    m.add_double("scene.min_spacing", &RunConfig::min_spacing);
    m.add_double("scene.amp_lo", &RunConfig::amp_lo);
    m.add_double("scene.amp_hi", &RunConfig::amp_hi);
    m.add_double("scene.t_lo", &RunConfig::t_lo);
    m.add_double("scene.t_hi", &RunConfig::t_hi);
    m.add_string("fda.train", &RunConfig::train_path);
    m.add_string("fda.test", &RunConfig::test_path);
    m.add_double("fda.eps_tilde", &RunConfig::eps_tilde);
    m.add_double("fda.corrupt_fraction", &RunConfig::corrupt_fraction);
    m.add_double("fda.corrupt_magnitude", &RunConfig::corrupt_magnitude);
    m.add_int("fda.synthetic_n", &RunConfig::synthetic_n);
    m.add_int("fda.synthetic_knots", &RunConfig::synthetic_knots);
    m.add_double("fda.synthetic_noise", &RunConfig::synthetic_noise);
    m.add_string("io.input", &RunConfig::input);
    m.add_string("io.output_dir", &RunConfig::output_dir);
    m.add_int("io.grid_points", &RunConfig::grid_points);
    return m;
  }();
  return fm;
}

void set_field(RunConfig& cfg, const std::string& key, const std::string& value,
               const std::string& where) {
  auto it = fields().setters.find(key);
  if (it == fields().setters.end()) {
    throw std::invalid_argument(where + ": unknown config key '" + key + "'");
  }
  if (!it->second(cfg, value)) {
    throw std::invalid_argument(where + ": bad value '" + value + "' for key '" + key + "'");
  }
}

}  // namespace

RunConfig parse_config_text(const std::string& text, const std::string& origin) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    std::string where = origin + ":" + std::to_string(lineno);
    if (t.front() == '[') {
      if (t.back() != ']') throw std::invalid_argument(where + ": malformed section header");
      section = trim(t.substr(1, t.size() - 2));
      continue;
    }
    size_t eq = t.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument(where + ": expected key = value");
    }
    std::string key = trim(t.substr(0, eq));
    if (!section.empty()) key = section + "." + key;
    set_field(cfg, key, t.substr(eq + 1), where);
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_config: cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path);
}

void apply_override(RunConfig& cfg, const std::string& assignment) {
  size_t eq = assignment.find('=');
  if (eq == std::string::npos) {
    throw std::invalid_argument("override '" + assignment + "': expected section.key=value");
  }
  set_field(cfg, trim(assignment.substr(0, eq)), assignment.substr(eq + 1), "override");
}

void write_config(const RunConfig& cfg, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_config: cannot open " + path);
  std::string last_section;
  for (const auto& [key, get] : fields().getters) {
    size_t dot = key.find('.');
    std::string section = key.substr(0, dot);
    if (section != last_section) {
      if (!last_section.empty()) out << "\n";
      out << "[" << section << "]\n";
      last_section = section;
    }
    out << key.substr(dot + 1) << " = " << get(cfg) << "\n";
  }
}

StepSchedule schedule_from(const std::string& name) {
  if (name == "constant") return StepSchedule::Constant;
  if (name == "inv-sqrt") return StepSchedule::InvSqrt;
  throw std::invalid_argument("unknown step schedule '" + name + "'");
}

QuadRule rule_from(const std::string& name) {
  if (name == "midpoint") return QuadRule::Midpoint;
  if (name == "gauss5") return QuadRule::Gauss5;
  throw std::invalid_argument("unknown quadrature rule '" + name + "'");
}

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(line);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  return out;
}

}  // namespace

std::pair<std::vector<double>, std::vector<double>> load_samples_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_samples_csv: cannot open " + path);
  std::vector<double> t, y;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string s = trim(line);
    if (s.empty()) continue;
    auto cells = split(s, ',');
    if (cells.size() != 2) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": expected two comma-separated columns");
    }
    double a, b;
    if (!parse_double(cells[0], a) || !parse_double(cells[1], b)) {
      if (lineno == 1) continue;  // header row
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": non-numeric cell");
    }
    t.push_back(a);
    y.push_back(b);
  }
  return {std::move(t), std::move(y)};
}

void write_samples_csv(const std::string& path, const std::vector<double>& t,
                       const std::vector<double>& y) {
  if (t.size() != y.size()) throw std::invalid_argument("write_samples_csv: size mismatch");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_samples_csv: cannot open " + path);
  out.precision(17);
  out << "t,y\n";
  for (size_t i = 0; i < t.size(); ++i) out << t[i] << "," << y[i] << "\n";
}

std::vector<FunctionalSample> load_ucr_tsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_ucr_tsv: cannot open " + path);
  std::vector<FunctionalSample> out;
  std::string line;
  int row = 0;
  size_t width = 0;
  while (std::getline(in, line)) {
    ++row;
    std::string s = trim(line);
    if (s.empty()) continue;
    std::istringstream cells(s);
    std::vector<double> vals;
    std::string cell;
    while (cells >> cell) {
      double v;
      if (!parse_double(cell, v)) {
        throw std::runtime_error(path + ": row " + std::to_string(row) + ": non-numeric cell");
      }
      vals.push_back(v);
    }
    if (vals.size() < 3) {
      throw std::runtime_error(path + ": row " + std::to_string(row) + ": too few columns");
    }
    if (width == 0) width = vals.size();
    if (vals.size() != width) {
      throw std::runtime_error(path + ": row " + std::to_string(row) +
                               ": inconsistent row length");
    }
    double lab = vals[0];
    int label;
    if (lab == 1.0) {
      label = 1;
    } else if (lab == -1.0 || lab == 0.0) {
      label = 0;  // UCR {-1, 1} maps -1 to 0
    } else {
      throw std::runtime_error(path + ": row " + std::to_string(row) + ": label must be -1/0/1");
    }
    size_t n = vals.size() - 1;
    std::vector<double> knots(n), values(vals.begin() + 1, vals.end());
    for (size_t j = 0; j < n; ++j) knots[j] = static_cast<double>(j) / (n - 1);
    out.push_back(FunctionalSample{std::move(knots), std::move(values), label});
  }
  return out;
}

void write_solution_csv(const PrimalSolution& sol, int grid_points, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_solution_csv: cannot open " + path);
  out.precision(17);
  out << "beta,x\n";
  if (!sol.grid.empty() && static_cast<int>(sol.grid.size()) == grid_points) {
    for (const auto& [b, x] : sol.grid) out << b << "," << x << "\n";
  } else if (!sol.support.empty() || !sol.grid.empty()) {
    // Re-sample on the requested grid over the span of the export samples.
    double lo = sol.grid.empty() ? sol.support.front().lo : sol.grid.front().first;
    double hi = sol.grid.empty() ? sol.support.back().hi : sol.grid.back().first;
    for (int i = 0; i < grid_points; ++i) {
      double b = lo + (hi - lo) * i / (grid_points - 1);
      out << b << "," << sol.evaluator({b}) << "\n";
    }
  }
  out << "# support_intervals";
  for (const auto& iv : sol.support) out << " [" << iv.lo << "," << iv.hi << "]";
  out << "\n# objective " << sol.objective_value << "\n# l0 " << sol.l0 << "\n";
}

void write_trace_csv(const SolveReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_trace_csv: cannot open " + path);
  out.precision(17);
  out << "t,d_t,eta_t,support_measure,gap_estimate\n";
  double best = -std::numeric_limits<double>::infinity();
  for (size_t t = 0; t < report.dual_trace.size(); ++t) {
    best = std::max(best, report.dual_trace[t]);
    out << t << "," << report.dual_trace[t] << "," << report.eta_trace[t] << ","
        << report.support_trace[t] << "," << best - report.dual_trace[t] << "\n";
  }
}

void write_components_csv(const std::vector<ComponentEstimate>& components,
                          const SinusoidScene* truth, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_components_csv: cannot open " + path);
  out.precision(17);
  out << "k,f_true,a_true,f_hat,a_hat\n";
  size_t rows = components.size();
  if (truth) rows = std::max(rows, truth->freqs.size());
  // Components are matched to the nearest true frequency when truth is known.
  for (size_t k = 0; k < rows; ++k) {
    out << k << ",";
    if (truth && k < truth->freqs.size()) {
      out << truth->freqs[k] << "," << truth->amps[k];
    } else {
      out << "nan,nan";
    }
    if (truth && k < truth->freqs.size() && !components.empty()) {
      size_t best = 0;
      for (size_t j = 1; j < components.size(); ++j) {
        if (std::abs(components[j].f_hat - truth->freqs[k]) <
            std::abs(components[best].f_hat - truth->freqs[k])) {
          best = j;
        }
      }
      out << "," << components[best].f_hat << "," << components[best].a_hat << "\n";
    } else if (k < components.size()) {
      out << "," << components[k].f_hat << "," << components[k].a_hat << "\n";
    } else {
      out << ",nan,nan\n";
    }
  }
}

void write_classifier_csv(const RobustClassifier& clf, int grid_points,
                          const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_classifier_csv: cannot open " + path);
  out.precision(17);
  out << "# b " << clf.b << "\n# r " << clf.saturation << "\n# lambda " << clf.lambda << "\n";
  out << "# support_intervals";
  for (const auto& iv : clf.support) out << " [" << iv.lo << "," << iv.hi << "]";
  out << "\ntau,W\n";
  for (int i = 0; i < grid_points; ++i) {
    double tau = static_cast<double>(i) / (grid_points - 1);
    out << tau << "," << clf.weight(tau) << "\n";
  }
}

}  // namespace sfp
