#include "geophase/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>

#include <json.hpp>

#include "geophase/csv.hpp"
#include "geophase/errors.hpp"

namespace geophase {

namespace {

using json = nlohmann::json;

std::string trim(const std::string& s);

class Reader {
 public:
  explicit Reader(std::vector<std::string>& diag) : diag_(diag) {}

  void error(const std::string& where, const std::string& what) { diag_.push_back(where + ": " + what); }

  bool object(const json& j, const std::string& where) {
    if (j.is_object()) return true;
    error(where, "expected an object");
    return false;
  }

  void allow(const json& obj, std::initializer_list<const char*> keys, const std::string& where) {
    for (const auto& [k, v] : obj.items()) {
      bool known = false;
      for (const char* a : keys) known = known || k == a;
      if (!known) error(where + "." + k, "unknown key");
    }
  }

  void number(const json& obj, const char* key, double& out, const std::string& where) {
    if (!obj.contains(key)) return;
    const json& v = obj.at(key);
    if (!v.is_number()) {
      error(where + "." + key, "expected a number");
      return;
    }
    out = v.get<double>();
  }

  template <typename Int>
  void integer(const json& obj, const char* key, Int& out, const std::string& where) {
    if (!obj.contains(key)) return;
    const json& v = obj.at(key);
    if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0)) {
      error(where + "." + key, "expected a non-negative integer");
      return;
    }
    out = v.get<Int>();
  }

  // Either [v, ...] or {"min": a, "max": b, "count": n}.
  void number_list(const json& obj, const char* key, std::vector<double>& out, const std::string& where) {
    if (!obj.contains(key)) return;
    const json& v = obj.at(key);
    const std::string at = where + "." + key;
    if (v.is_array()) {
      std::vector<double> vals;
      for (const json& e : v) {
        if (!e.is_number()) {
          error(at, "list entries must be numbers");
          return;
        }
        vals.push_back(e.get<double>());
      }
      out = std::move(vals);
    } else if (v.is_object()) {
      allow(v, {"min", "max", "count"}, at);
      double lo = 0.0, hi = 0.0;
      std::size_t n = 0;
      if (!v.contains("min") || !v.contains("max") || !v.contains("count")) {
        error(at, "range needs min, max and count");
        return;
      }
      number(v, "min", lo, at);
      number(v, "max", hi, at);
      integer(v, "count", n, at);
      if (n == 1) {
        out = {lo};
      } else if (n >= 2 && hi > lo) {
        out = uniform_grid(lo, hi, n);
      } else {
        error(at, "range needs count >= 1 and max > min");
      }
    } else {
      error(at, "expected a list or a {min, max, count} range");
    }
  }

  // `<stem>_rad` or `<stem>_arcsec`, not both.
  void angle(const json& obj, const std::string& stem, double& out, const std::string& where) {
    const std::string rad = stem + "_rad", arc = stem + "_arcsec";
    if (obj.contains(rad) && obj.contains(arc)) {
      error(where + "." + stem, "give either _rad or _arcsec, not both");
      return;
    }
    if (obj.contains(rad)) number(obj, rad.c_str(), out, where);
    if (obj.contains(arc)) {
      double v = out / kArcsec;
      number(obj, arc.c_str(), v, where);
      out = v * kArcsec;
    }
  }

 private:
  std::vector<std::string>& diag_;
};

void check_grid(const std::vector<double>& v, const char* name, std::vector<std::string>& diag) {
  if (v.empty()) {
    diag.push_back(std::string(name) + ": must be non-empty");
    return;
  }
  for (double x : v) {
    if (!std::isfinite(x)) {
      diag.push_back(std::string(name) + ": entries must be finite");
      return;
    }
  }
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!(v[i] > v[i - 1])) {
      diag.push_back(std::string(name) + ": must be strictly increasing");
      return;
    }
  }
}

std::string join_lines(const std::vector<std::string>& diag) {
  std::string msg = "invalid configuration:";
  for (const std::string& d : diag) msg += "\n  " + d;
  return msg;
}

RunConfig from_json(const json& root) {
  std::vector<std::string> diag;
  Reader r(diag);
  RunConfig cfg = RunConfig::defaults();
  if (!r.object(root, "config")) throw ConfigError(join_lines(diag));
  r.allow(root, {"optics", "n_stages", "stages", "plate_retardance_rad", "scan", "fringe", "critical", "ga",
                 "data_path", "seed", "output_dir", "threads"},
          "config");

  if (root.contains("optics") && r.object(root["optics"], "optics")) {
    const json& o = root["optics"];
    r.allow(o, {"wavelength_nm", "w0_mm", "dx_mm", "gamma_rad", "tilt_scale"}, "optics");
    r.number(o, "wavelength_nm", cfg.optics.wavelength_nm, "optics");
    r.number(o, "w0_mm", cfg.optics.w0_mm, "optics");
    r.number(o, "dx_mm", cfg.optics.dx_mm, "optics");
    r.number(o, "gamma_rad", cfg.optics.gamma_rad, "optics");
    r.number(o, "tilt_scale", cfg.optics.tilt_scale, "optics");
  }
  r.integer(root, "n_stages", cfg.n_stages, "config");
  if (root.contains("stages")) {
    if (!root["stages"].is_array()) {
      r.error("config.stages", "expected a list");
    } else {
      for (std::size_t i = 0; i < root["stages"].size(); ++i) {
        const json& s = root["stages"][i];
        const std::string at = "stages[" + std::to_string(i) + "]";
        if (!r.object(s, at)) continue;
        r.allow(s, {"nu_rad", "beta_rad", "beta_arcsec"}, at);
        Imperfection imp;
        r.number(s, "nu_rad", imp.nu, at);
        r.angle(s, "beta", imp.beta, at);
        cfg.stages.push_back(imp);
      }
      if (!root.contains("n_stages") && !cfg.stages.empty()) cfg.n_stages = cfg.stages.size();
    }
  }
  if (root.contains("plate_retardance_rad")) {
    double v = 0.0;
    r.number(root, "plate_retardance_rad", v, "config");
    cfg.plate_retardance_rad = v;
  }

  if (root.contains("scan") && r.object(root["scan"], "scan")) {
    const json& s = root["scan"];
    r.allow(s, {"w0_mm", "alpha_points", "gamma_rad", "transition_bracket_mm", "transition_tol_mm",
                "transition_scan_points"},
            "scan");
    r.number_list(s, "w0_mm", cfg.scan.w0_mm, "scan");
    r.integer(s, "alpha_points", cfg.scan.alpha_points, "scan");
    r.number_list(s, "gamma_rad", cfg.scan.gamma_rad, "scan");
    if (s.contains("transition_bracket_mm")) {
      std::vector<double> b;
      r.number_list(s, "transition_bracket_mm", b, "scan");
      if (b.size() == 2) {
        cfg.scan.transition_lo_mm = b[0];
        cfg.scan.transition_hi_mm = b[1];
      } else {
        r.error("scan.transition_bracket_mm", "expected [lo, hi]");
      }
    }
    r.number(s, "transition_tol_mm", cfg.scan.transition_tol_mm, "scan");
    r.integer(s, "transition_scan_points", cfg.scan.transition_scan_points, "scan");
  }

  if (root.contains("fringe") && r.object(root["fringe"], "fringe")) {
    const json& f = root["fringe"];
    r.allow(f, {"alpha_rad", "delta_points"}, "fringe");
    r.number(f, "alpha_rad", cfg.fringe.alpha_rad, "fringe");
    r.integer(f, "delta_points", cfg.fringe.delta_points, "fringe");
  }

  if (root.contains("critical") && r.object(root["critical"], "critical")) {
    const json& c = root["critical"];
    r.allow(c, {"n_measurements", "resolution"}, "critical");
    r.integer(c, "n_measurements", cfg.critical.n_measurements, "critical");
    r.number(c, "resolution", cfg.critical.resolution, "critical");
  }

  if (root.contains("ga") && r.object(root["ga"], "ga")) {
    const json& g = root["ga"];
    r.allow(g, {"population", "generations", "tournament", "crossover_rate", "sigma_nu_rad", "sigma_beta_rad",
                "sigma_beta_arcsec", "sigma_final_ratio", "mutation_rate", "mutation_space", "elitism",
                "beta_max_rad", "beta_max_arcsec", "lambda", "invalid_penalty"},
            "ga");
    r.integer(g, "population", cfg.ga.population, "ga");
    r.integer(g, "generations", cfg.ga.generations, "ga");
    r.integer(g, "tournament", cfg.ga.tournament, "ga");
    r.number(g, "crossover_rate", cfg.ga.crossover_rate, "ga");
    r.number(g, "sigma_nu_rad", cfg.ga.sigma_nu, "ga");
    r.angle(g, "sigma_beta", cfg.ga.sigma_beta, "ga");
    r.number(g, "sigma_final_ratio", cfg.ga.sigma_final_ratio, "ga");
    r.number(g, "mutation_rate", cfg.ga.mutation_rate, "ga");
    if (g.contains("mutation_space")) {
      const json& m = g["mutation_space"];
      if (m == "polar") {
        cfg.ga.mutation_space = MutationSpace::polar;
      } else if (m == "tilt_plane") {
        cfg.ga.mutation_space = MutationSpace::tilt_plane;
      } else {
        r.error("ga.mutation_space", "expected \"polar\" or \"tilt_plane\"");
      }
    }
    r.integer(g, "elitism", cfg.ga.elitism, "ga");
    r.angle(g, "beta_max", cfg.ga.beta_max, "ga");
    r.number(g, "lambda", cfg.ga.loss.lambda, "ga");
    r.number(g, "invalid_penalty", cfg.ga.loss.invalid_penalty, "ga");
  }

  if (root.contains("data_path")) {
    if (root["data_path"].is_string()) {
      cfg.data_path = root["data_path"].get<std::string>();
    } else {
      r.error("config.data_path", "expected a string");
    }
  }
  if (root.contains("seed")) {
    std::uint64_t seed = 0;
    r.integer(root, "seed", seed, "config");
    cfg.seed = seed;
  }
  if (root.contains("output_dir")) {
    if (root["output_dir"].is_string()) {
      cfg.output_dir = root["output_dir"].get<std::string>();
    } else {
      r.error("config.output_dir", "expected a string");
    }
  }
  r.integer(root, "threads", cfg.threads, "config");

  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    std::istringstream lines(e.what());
    std::string line;
    std::getline(lines, line);
    while (std::getline(lines, line)) diag.push_back(trim(line));
  }
  if (!diag.empty()) throw ConfigError(join_lines(diag));
  return cfg;
}

json to_json_value(const RunConfig& cfg) {
  json j;
  j["optics"] = {{"wavelength_nm", cfg.optics.wavelength_nm},
                 {"w0_mm", cfg.optics.w0_mm},
                 {"dx_mm", cfg.optics.dx_mm},
                 {"gamma_rad", cfg.optics.gamma_rad},
                 {"tilt_scale", cfg.optics.tilt_scale}};
  j["n_stages"] = cfg.n_stages;
  j["stages"] = json::array();
  for (const Imperfection& s : cfg.stages) j["stages"].push_back({{"nu_rad", s.nu}, {"beta_rad", s.beta}});
  if (cfg.plate_retardance_rad) j["plate_retardance_rad"] = *cfg.plate_retardance_rad;
  j["scan"] = {{"w0_mm", cfg.scan.w0_mm},
               {"alpha_points", cfg.scan.alpha_points},
               {"gamma_rad", cfg.scan.gamma_rad},
               {"transition_bracket_mm", {cfg.scan.transition_lo_mm, cfg.scan.transition_hi_mm}},
               {"transition_tol_mm", cfg.scan.transition_tol_mm},
               {"transition_scan_points", cfg.scan.transition_scan_points}};
  j["fringe"] = {{"alpha_rad", cfg.fringe.alpha_rad}, {"delta_points", cfg.fringe.delta_points}};
  j["critical"] = {{"n_measurements", cfg.critical.n_measurements}, {"resolution", cfg.critical.resolution}};
  j["ga"] = {{"population", cfg.ga.population},
             {"generations", cfg.ga.generations},
             {"tournament", cfg.ga.tournament},
             {"crossover_rate", cfg.ga.crossover_rate},
             {"sigma_nu_rad", cfg.ga.sigma_nu},
             {"sigma_beta_rad", cfg.ga.sigma_beta},
             {"sigma_final_ratio", cfg.ga.sigma_final_ratio},
             {"mutation_rate", cfg.ga.mutation_rate},
             {"mutation_space", cfg.ga.mutation_space == MutationSpace::polar ? "polar" : "tilt_plane"},
             {"elitism", cfg.ga.elitism},
             {"beta_max_rad", cfg.ga.beta_max},
             {"lambda", cfg.ga.loss.lambda},
             {"invalid_penalty", cfg.ga.loss.invalid_penalty}};
  if (cfg.data_path) j["data_path"] = *cfg.data_path;
  if (cfg.seed) j["seed"] = *cfg.seed;
  return j;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  const char* begin = s.data();
  if (*begin == '+') ++begin;
  const auto res = std::from_chars(begin, s.data() + s.size(), out);
  return res.ec == std::errc{} && res.ptr == s.data() + s.size();
}

}  // namespace

RunConfig RunConfig::defaults() {
  RunConfig cfg;
  cfg.scan.w0_mm = uniform_grid(0.3, 3.0, 64);
  cfg.scan.gamma_rad = uniform_grid(-kPi, kPi, 64);
  return cfg;
}

SetupTemplate RunConfig::setup_template() const {
  SetupTemplate t;
  t.optics = optics;
  t.n_stages = n_stages;
  t.imperfections = stages;
  t.plate_retardance = plate_retardance_rad;
  return t;
}

void RunConfig::validate() const {
  std::vector<std::string> diag;
  auto need = [&diag](bool ok, const std::string& msg) {
    if (!ok) diag.push_back(msg);
  };
  need(std::isfinite(optics.wavelength_nm) && optics.wavelength_nm > 0.0, "optics.wavelength_nm: must be > 0");
  need(std::isfinite(optics.w0_mm) && optics.w0_mm > 0.0, "optics.w0_mm: must be > 0");
  need(std::isfinite(optics.dx_mm) && optics.dx_mm >= 0.0, "optics.dx_mm: must be >= 0");
  need(std::isfinite(optics.gamma_rad), "optics.gamma_rad: must be finite");
  need(std::isfinite(optics.tilt_scale), "optics.tilt_scale: must be finite");
  need(n_stages >= 1, "n_stages: must be >= 1");
  need(stages.empty() || stages.size() == n_stages, "stages: need one entry per stage (or none)");
  for (std::size_t i = 0; i < stages.size(); ++i) {
    const std::string at = "stages[" + std::to_string(i) + "]";
    need(std::isfinite(stages[i].nu), at + ".nu_rad: must be finite");
    need(std::isfinite(stages[i].beta) && stages[i].beta >= 0.0, at + ".beta: must be >= 0");
  }
  if (plate_retardance_rad) need(std::isfinite(*plate_retardance_rad), "plate_retardance_rad: must be finite");
  check_grid(scan.w0_mm, "scan.w0_mm", diag);
  for (double w : scan.w0_mm) {
    if (!(w > 0.0)) {
      diag.push_back("scan.w0_mm: entries must be > 0");
      break;
    }
  }
  check_grid(scan.gamma_rad, "scan.gamma_rad", diag);
  need(scan.alpha_points >= 2, "scan.alpha_points: must be >= 2");
  need(scan.transition_lo_mm > 0.0 && scan.transition_hi_mm > scan.transition_lo_mm,
       "scan.transition_bracket_mm: need 0 < lo < hi");
  need(scan.transition_tol_mm > 0.0, "scan.transition_tol_mm: must be > 0");
  need(scan.transition_scan_points >= 2, "scan.transition_scan_points: must be >= 2");
  need(std::isfinite(fringe.alpha_rad), "fringe.alpha_rad: must be finite");
  need(fringe.delta_points >= 3, "fringe.delta_points: must be >= 3");
  need(critical.n_measurements >= 1, "critical.n_measurements: must be >= 1");
  need(critical.resolution > 0.0, "critical.resolution: must be > 0");
  GAConfig g = ga;
  g.seed = 0;
  try {
    g.validate();
  } catch (const DomainError& e) {
    diag.push_back(std::string("ga: ") + e.what());
  }
  if (!diag.empty()) throw ConfigError(join_lines(diag));
}

RunConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("invalid configuration:\n  JSON syntax: ") + e.what());
  }
  // A genome file carries its configuration under "config".
  if (root.is_object() && root.contains("schema") && root.contains("config")) return from_json(root["config"]);
  return from_json(root);
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FileNotFoundError(path.string());
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '#') {
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
      if (line.rfind("# config=", 0) == 0) return parse_config(line.substr(9));
    }
    throw ConfigError("invalid configuration:\n  " + path.string() + ": no '# config=' line");
  }
  return parse_config(text);
}

std::string config_json(const RunConfig& cfg) { return to_json_value(cfg).dump(); }

void write_preamble(std::ostream& out, const std::string& command, const RunConfig& cfg) {
  out << "# schema=" << kSchemaVersion << '\n'
      << "# command=" << command << '\n'
      << "# config=" << config_json(cfg) << '\n';
}

std::vector<ExperimentRecord> read_experiment_csv(std::istream& in) {
  std::vector<ExperimentRecord> out;
  std::string line;
  std::size_t lineno = 0;
  bool header_seen = false, has_weight = false;
  auto fail = [&lineno](const std::string& msg) {
    throw ConfigError("line " + std::to_string(lineno) + ": " + msg);
  };
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const std::vector<std::string> fields = split(t);
    if (!header_seen) {
      const std::vector<std::string> base{"w0_mm", "alpha_rad", "chi_rad", "contrast"};
      std::vector<std::string> weighted = base;
      weighted.push_back("weight");
      if (fields == base) {
        has_weight = false;
      } else if (fields == weighted) {
        has_weight = true;
      } else {
        fail("expected header w0_mm,alpha_rad,chi_rad,contrast[,weight]");
      }
      header_seen = true;
      continue;
    }
    const std::size_t expected = has_weight ? 5 : 4;
    if (fields.size() != expected) {
      fail("expected " + std::to_string(expected) + " fields, found " + std::to_string(fields.size()));
    }
    double v[5] = {0, 0, 0, 0, 1.0};
    for (std::size_t i = 0; i < expected; ++i) {
      if (!parse_double(fields[i], v[i])) fail("field " + std::to_string(i + 1) + " is not a number: '" + fields[i] + "'");
    }
    ExperimentRecord rec{v[0], v[1], v[2], v[3], v[4]};
    try {
      rec.validate();
    } catch (const DomainError& e) {
      fail(e.what());
    }
    out.push_back(rec);
  }
  if (!header_seen) throw ConfigError("line " + std::to_string(lineno) + ": missing header");
  if (out.empty()) throw ConfigError("line " + std::to_string(lineno) + ": no data rows");
  return out;
}

std::vector<ExperimentRecord> read_experiment_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FileNotFoundError(path.string());
  try {
    return read_experiment_csv(in);
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

void write_experiment_csv(std::ostream& out, const std::vector<ExperimentRecord>& records) {
  out << "w0_mm,alpha_rad,chi_rad,contrast,weight\n";
  for (const ExperimentRecord& r : records) {
    out << csv_number(r.w0) << ',' << csv_number(r.alpha) << ',' << csv_number(r.chi) << ','
        << csv_number(r.contrast) << ',' << csv_number(r.weight) << '\n';
  }
}

void write_genome_json(std::ostream& out, const RunConfig& cfg, const GAResult& result) {
  json j;
  j["schema"] = kSchemaVersion;
  j["command"] = "fit";
  j["config"] = to_json_value(cfg);
  j["genome"] = json::array();
  for (std::size_t s = 0; s < kGenomeStages; ++s) {
    j["genome"].push_back({{"nu_rad", result.best.nu(s)}, {"beta_rad", result.best.beta(s)}});
  }
  j["loss"] = result.best_loss;
  j["initial_best_loss"] = result.initial_best_loss;
  j["generations"] = result.history.size() - 1;
  j["evaluations"] = result.evaluations;
  out << j.dump(2) << '\n';
}

void write_history_csv(std::ostream& out, const GAResult& result) {
  out << "generation,loss\n";
  for (std::size_t g = 0; g < result.history.size(); ++g) {
    out << g << ',' << csv_number(result.history[g]) << '\n';
  }
}

}  // namespace geophase
