#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "cakewalk/bench.hpp"
#include "cakewalk/random.hpp"
#include "cakewalk/surrogate.hpp"

namespace cakewalk::bench {

namespace fs = std::filesystem;

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

// Drops a trailing # comment that is not inside a string.
std::string strip_comment(const std::string& s) {
  bool quoted = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"') quoted = !quoted;
    if (s[i] == '#' && !quoted) return s.substr(0, i);
  }
  return s;
}

// Scalars and one-line arrays map onto JSON values; bare words are strings.
Json parse_value(const std::string& raw, std::size_t line) {
  const std::string text = trim(raw);
  if (text.empty()) throw ConfigError("line " + std::to_string(line) + ": missing value");
  if (text.front() == '[') {
    if (text.back() != ']') throw ConfigError("line " + std::to_string(line) + ": unterminated array");
    Json array = Json::array();
    std::string body = text.substr(1, text.size() - 2);
    std::string item;
    bool quoted = false;
    auto flush = [&]() {
      const std::string t = trim(item);
      if (!t.empty()) array.push_back(parse_value(t, line));
      item.clear();
    };
    for (char c : body) {
      if (c == '"') quoted = !quoted;
      if (c == ',' && !quoted) {
        flush();
      } else {
        item.push_back(c);
      }
    }
    flush();
    return array;
  }
  if (text.front() == '"') {
    if (text.size() < 2 || text.back() != '"') throw ConfigError("line " + std::to_string(line) + ": unterminated string");
    return text.substr(1, text.size() - 2);
  }
  if (text == "true") return true;
  if (text == "false") return false;
  std::size_t used = 0;
  try {
    if (text.find_first_of(".eE") == std::string::npos) {
      if (text.front() != '-') {
        const unsigned long long v = std::stoull(text, &used);
        if (used == text.size()) return v;
      } else {
        const long long v = std::stoll(text, &used);
        if (used == text.size()) return v;
      }
    }
    const double v = std::stod(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  return text;
}

const std::set<std::string> kKnownKeys = {
    "problem",  "inputs",      "input_kind", "samplers",   "rules",     "kappas",      "replicates",
    "seed",     "budget_multiplier", "budget", "window",   "step_size", "exp3_gamma",  "convergence",
    "clusters", "best_known",  "pairing",    "reference",  "output"};

double as_number(const Json& v, const std::string& key) {
  if (!v.is_number()) throw ConfigError(key + ": expected a number");
  return v.get<double>();
}

std::size_t as_count(const Json& v, const std::string& key) {
  if (!v.is_number_unsigned()) throw ConfigError(key + ": expected a nonnegative integer");
  return v.get<std::size_t>();
}

std::string as_string(const Json& v, const std::string& key) {
  if (!v.is_string()) throw ConfigError(key + ": expected a string");
  return v.get<std::string>();
}

std::vector<Json> as_list(const Json& v) {
  if (v.is_array()) return std::vector<Json>(v.begin(), v.end());
  return {v};
}

}  // namespace

ExperimentSpec parse_config(std::istream& in) {
  std::map<std::string, Json> values;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    const std::string body = trim(strip_comment(text));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(line) + ": expected key = value");
    const std::string key = trim(body.substr(0, eq));
    if (!kKnownKeys.contains(key)) throw ConfigError("line " + std::to_string(line) + ": unknown key '" + key + "'");
    if (values.contains(key)) throw ConfigError("line " + std::to_string(line) + ": duplicate key '" + key + "'");
    values[key] = parse_value(body.substr(eq + 1), line);
  }

  ExperimentSpec spec;
  if (!values.contains("problem")) throw ConfigError("missing key 'problem'");
  const std::string problem = as_string(values["problem"], "problem");
  if (problem == "clique") {
    spec.problem = Problem::Clique;
    spec.samplers = {"scaled_cdf"};
  } else if (problem == "kmedoids") {
    spec.problem = Problem::KMedoids;
    spec.samplers = {"vor", "pam", "cw", "cwv"};
    spec.step_size = 0.02;
    spec.convergence = true;
  } else {
    throw ConfigError("problem must be \"clique\" or \"kmedoids\"");
  }

  for (const auto& [key, v] : values) {
    if (key == "inputs") {
      spec.inputs.clear();
      for (const auto& item : as_list(v)) spec.inputs.push_back(as_string(item, key));
    } else if (key == "input_kind") {
      spec.input_kind = as_string(v, key);
      if (spec.input_kind != "data" && spec.input_kind != "distances") {
        throw ConfigError("input_kind must be \"data\" or \"distances\"");
      }
    } else if (key == "samplers") {
      spec.samplers.clear();
      for (const auto& item : as_list(v)) spec.samplers.push_back(as_string(item, key));
    } else if (key == "rules") {
      spec.rules.clear();
      for (const auto& item : as_list(v)) {
        try {
          spec.rules.push_back(parse_update_rule(as_string(item, key)));
        } catch (const std::invalid_argument& e) {
          throw ConfigError(e.what());
        }
      }
    } else if (key == "kappas") {
      spec.kappas.clear();
      for (const auto& item : as_list(v)) spec.kappas.push_back(as_number(item, key));
    } else if (key == "replicates") {
      spec.replicates = as_count(v, key);
    } else if (key == "seed") {
      if (!v.is_number_unsigned()) throw ConfigError("seed: expected a nonnegative integer");
      spec.master_seed = v.get<std::uint64_t>();
    } else if (key == "budget_multiplier") {
      spec.budget_multiplier = as_number(v, key);
    } else if (key == "budget") {
      spec.budget = as_count(v, key);
    } else if (key == "window") {
      spec.window = as_count(v, key);
    } else if (key == "step_size") {
      spec.step_size = as_number(v, key);
    } else if (key == "exp3_gamma") {
      spec.exp3_gamma = as_number(v, key);
    } else if (key == "convergence") {
      if (!v.is_boolean()) throw ConfigError("convergence: expected true or false");
      spec.convergence = v.get<bool>();
    } else if (key == "clusters") {
      spec.clusters = static_cast<int>(as_count(v, key));
    } else if (key == "best_known") {
      spec.best_known = as_string(v, key);
    } else if (key == "pairing") {
      spec.pairing = as_string(v, key);
      if (spec.pairing != "cell" && spec.pairing != "graph") throw ConfigError("pairing must be \"cell\" or \"graph\"");
    } else if (key == "reference") {
      spec.reference = as_string(v, key);
    } else if (key == "output") {
      spec.output = as_string(v, key);
    }
  }

  if (spec.inputs.empty()) throw ConfigError("inputs: at least one input is required");
  if (spec.samplers.empty()) throw ConfigError("samplers: at least one sampler is required");
  if (spec.rules.empty()) throw ConfigError("rules: at least one rule is required");
  if (spec.replicates < 1) throw ConfigError("replicates must be >= 1");
  if (spec.window < 1) throw ConfigError("window must be >= 1");
  if (!(spec.step_size > 0.0)) throw ConfigError("step_size must be positive");
  if (!(spec.exp3_gamma > 0.0 && spec.exp3_gamma <= 1.0)) throw ConfigError("exp3_gamma must lie in (0, 1]");
  if (spec.problem == Problem::Clique) {
    if (spec.kappas.empty()) throw ConfigError("kappas: at least one value is required");
    for (double k : spec.kappas) {
      if (!(k >= 0.0 && k <= 1.0)) throw ConfigError("kappas must lie in [0, 1]");
    }
    if (!(spec.budget_multiplier > 0.0)) throw ConfigError("budget_multiplier must be positive");
    for (const auto& s : spec.samplers) {
      if (s == "exp3") continue;
      try {
        SurrogateKind::parse(s);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("samplers: ") + e.what());
      }
    }
  } else {
    for (const auto& s : spec.samplers) {
      if (s != "vor" && s != "pam" && s != "cw" && s != "cwv") {
        throw ConfigError("samplers: kmedoids methods are vor, pam, cw, cwv; got '" + s + "'");
      }
    }
    if (spec.clusters < 1) throw ConfigError("clusters must be >= 1");
    if (spec.budget < 1) throw ConfigError("budget must be >= 1");
  }
  return spec;
}

ExperimentSpec load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  ExperimentSpec spec = parse_config(in);
  // Relative inputs resolve against the config's directory.
  const fs::path base = fs::path(path).parent_path();
  auto resolve = [&](std::string& p) {
    if (!p.empty() && fs::path(p).is_relative()) p = (base / p).lexically_normal().string();
  };
  for (auto& p : spec.inputs) resolve(p);
  resolve(spec.best_known);
  resolve(spec.output);
  for (const auto& p : spec.inputs) {
    if (!fs::exists(p)) throw ConfigError("input does not exist: " + p);
  }
  return spec;
}

std::vector<std::string> ExperimentSpec::resolved_inputs() const {
  const std::string extension = problem == Problem::Clique ? ".clq" : ".csv";
  std::vector<std::string> out;
  for (const auto& p : inputs) {
    if (fs::is_directory(p)) {
      std::vector<std::string> found;
      for (const auto& entry : fs::directory_iterator(p)) {
        if (entry.is_regular_file() && entry.path().extension() == extension) found.push_back(entry.path().string());
      }
      std::sort(found.begin(), found.end());
      out.insert(out.end(), found.begin(), found.end());
    } else {
      out.push_back(p);
    }
  }
  return out;
}

std::string instance_id(const std::string& path) { return fs::path(path).stem().string(); }

std::uint64_t derive_seed(std::uint64_t master, const std::string& label) {
  return splitmix64(master ^ splitmix64(fnv1a64(label)));
}

std::string Cell::key() const {
  std::ostringstream os;
  os << instance << '|' << sampler << '|' << rule << '|' << kappa << '|' << replicate;
  return os.str();
}

std::vector<Cell> enumerate_cells(const ExperimentSpec& spec) {
  std::vector<Cell> cells;
  for (const auto& input : spec.resolved_inputs()) {
    for (const auto& sampler : spec.samplers) {
      const bool greedy = spec.problem == Problem::KMedoids && (sampler == "vor" || sampler == "pam");
      std::vector<std::string> rules;
      if (greedy) {
        rules = {"none"};
      } else {
        for (UpdateRule r : spec.rules) rules.push_back(to_string(r));
      }
      const std::vector<double> kappas = spec.problem == Problem::Clique ? spec.kappas : std::vector<double>{0.0};
      for (const auto& rule : rules) {
        for (double kappa : kappas) {
          for (std::size_t rep = 0; rep < spec.replicates; ++rep) {
            Cell c;
            c.index = cells.size();
            c.input = input;
            c.instance = instance_id(input);
            c.sampler = sampler;
            c.rule = rule;
            c.kappa = kappa;
            c.replicate = rep;
            cells.push_back(std::move(c));
          }
        }
      }
    }
  }
  return cells;
}

}  // namespace cakewalk::bench
