#include "phmor/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include <json.hpp>

namespace phmor {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& message) {
  throw ConfigError("config: " + where + ": " + message);
}

const json& get_section(const json& obj, const std::string& key, const char* where) {
  const auto it = obj.find(key);
  if (it == obj.end()) fail(where, "missing required section \"" + key + "\"");
  if (!it->is_object() && !it->is_array()) {
    fail(where, "section \"" + key + "\" must be an object");
  }
  return *it;
}

void check_keys(const json& obj, const std::string& where,
                std::initializer_list<const char*> allowed) {
  for (const auto& item : obj.items()) {
    const bool known = std::any_of(allowed.begin(), allowed.end(), [&](const char* k) {
      return item.key() == k;
    });
    if (!known) fail(where, "unknown key \"" + item.key() + "\"");
  }
}

double get_number(const json& obj, const std::string& where, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end()) fail(where, std::string("missing required number \"") + key + "\"");
  if (!it->is_number()) fail(where, std::string("\"") + key + "\" must be a number");
  const double v = it->get<double>();
  if (!std::isfinite(v)) fail(where, std::string("\"") + key + "\" must be finite");
  return v;
}

double get_number_or(const json& obj, const std::string& where, const char* key,
                     double fallback) {
  return obj.contains(key) ? get_number(obj, where, key) : fallback;
}

Index get_integer(const json& obj, const std::string& where, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end()) fail(where, std::string("missing required integer \"") + key + "\"");
  if (!it->is_number_integer()) fail(where, std::string("\"") + key + "\" must be an integer");
  return it->get<Index>();
}

Index get_integer_or(const json& obj, const std::string& where, const char* key,
                     Index fallback) {
  return obj.contains(key) ? get_integer(obj, where, key) : fallback;
}

std::string get_string(const json& obj, const std::string& where, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end()) fail(where, std::string("missing required string \"") + key + "\"");
  if (!it->is_string()) fail(where, std::string("\"") + key + "\" must be a string");
  return it->get<std::string>();
}

double require_positive(double v, const std::string& where, const char* key) {
  if (!(v > 0.0)) fail(where, std::string("\"") + key + "\" must be positive");
  return v;
}

ModelConfig parse_model(const json& obj) {
  const char* where = "model";
  ModelConfig model;
  model.type = get_string(obj, where, "type");
  if (model.type == "linear_msd") {
    check_keys(obj, where, {"type", "n", "mass", "stiffness", "damping"});
    model.n = get_integer(obj, where, "n");
    model.mass = require_positive(get_number(obj, where, "mass"), where, "mass");
    model.stiffness =
        require_positive(get_number(obj, where, "stiffness"), where, "stiffness");
    model.damping = require_positive(get_number(obj, where, "damping"), where, "damping");
  } else if (model.type == "nonlinear_msd") {
    check_keys(obj, where, {"type", "n", "k1", "k2", "mass", "damping"});
    model.n = get_integer(obj, where, "n");
    model.k1 = require_positive(get_number(obj, where, "k1"), where, "k1");
    model.k2 = require_positive(get_number(obj, where, "k2"), where, "k2");
    model.mass = require_positive(get_number(obj, where, "mass"), where, "mass");
    model.damping = require_positive(get_number(obj, where, "damping"), where, "damping");
  } else {
    fail(where, "\"type\" must be \"linear_msd\" or \"nonlinear_msd\"");
  }
  if (model.n < 1) fail(where, "\"n\" must be >= 1");
  return model;
}

TimeGrid parse_time(const json& obj) {
  const char* where = "time";
  check_keys(obj, where, {"t0", "t_end", "dt"});
  const double t0 = get_number(obj, where, "t0");
  const double t_end = get_number(obj, where, "t_end");
  const double dt = require_positive(get_number(obj, where, "dt"), where, "dt");
  if (!(t_end > t0)) fail(where, "\"t_end\" must exceed \"t0\"");
  const double span = t_end - t0;
  const auto n_t = static_cast<Index>(std::llround(span / dt));
  if (n_t < 1 || std::abs(static_cast<double>(n_t) * dt - span) > 1e-9 * span) {
    fail(where, "\"dt\" must divide the interval into a whole number of steps");
  }
  return TimeGrid{t0, t_end, n_t};
}

InputConfig parse_one_input(const json& obj, const std::string& where) {
  InputConfig input;
  input.type = get_string(obj, where, "type");
  if (input.type == "constant") {
    check_keys(obj, where, {"type", "amplitude"});
  } else if (input.type == "sine") {
    check_keys(obj, where, {"type", "amplitude", "frequency"});
    input.frequency = get_number(obj, where, "frequency");
  } else {
    fail(where, "\"type\" must be \"constant\" or \"sine\"");
  }
  input.amplitude = get_number(obj, where, "amplitude");
  input.label = input.type;
  return input;
}

std::vector<InputConfig> parse_inputs(const json& node) {
  std::vector<InputConfig> inputs;
  if (node.is_object()) {
    inputs.push_back(parse_one_input(node, "input"));
  } else if (node.is_array()) {
    if (node.empty()) fail("input", "input array must not be empty");
    for (size_t i = 0; i < node.size(); ++i) {
      if (!node[i].is_object()) fail("input", "array entries must be objects");
      inputs.push_back(parse_one_input(node[i], "input[" + std::to_string(i) + "]"));
    }
  } else {
    fail("input", "must be an object or an array of objects");
  }
  // Disambiguate duplicate labels deterministically.
  for (size_t i = 0; i < inputs.size(); ++i) {
    size_t repeats = 0;
    for (size_t k = 0; k < i; ++k) {
      if (inputs[k].type == inputs[i].type) ++repeats;
    }
    if (repeats > 0) inputs[i].label += "_" + std::to_string(repeats + 1);
  }
  return inputs;
}

void parse_rom(const json& obj, ExperimentSettings& st, const ModelConfig& model) {
  const char* where = "rom";
  check_keys(obj, where,
             {"methods", "r_min", "r_max", "r_step", "r_n", "lambda_reg", "lambda_rule",
              "deim_tol", "energy_r"});
  const auto it = obj.find("methods");
  if (it == obj.end() || !it->is_array() || it->empty()) {
    fail(where, "\"methods\" must be a non-empty array of method names");
  }
  for (const auto& entry : *it) {
    if (!entry.is_string()) fail(where, "\"methods\" entries must be strings");
    const RomMethod m = method_from_name(entry.get<std::string>());
    if (std::find(st.methods.begin(), st.methods.end(), m) != st.methods.end()) {
      fail(where, "duplicate method \"" + entry.get<std::string>() + "\"");
    }
    st.methods.push_back(m);
  }
  if (model.type == "nonlinear_msd" &&
      std::find(st.methods.begin(), st.methods.end(), RomMethod::Sp1) != st.methods.end()) {
    fail(where, "SP1 requires a quadratic Hamiltonian and cannot run on nonlinear_msd");
  }

  st.r_min = get_integer(obj, where, "r_min");
  st.r_max = get_integer(obj, where, "r_max");
  st.r_step = get_integer_or(obj, where, "r_step", 1);
  if (st.r_min < 1 || st.r_max < st.r_min) fail(where, "need 1 <= r_min <= r_max");
  if (st.r_step < 1) fail(where, "\"r_step\" must be >= 1");
  st.r_n = get_integer_or(obj, where, "r_n", 8);
  if (st.r_n < 1) fail(where, "\"r_n\" must be >= 1");

  const bool has_reg = obj.contains("lambda_reg");
  const bool has_rule = obj.contains("lambda_rule");
  if (has_reg && has_rule) {
    fail(where, "\"lambda_reg\" and \"lambda_rule\" are mutually exclusive");
  }
  if (has_reg) {
    const double v = get_number(obj, where, "lambda_reg");
    if (!(v >= 0.0)) fail(where, "\"lambda_reg\" must be >= 0");
    st.lambda_reg = v;
  }
  if (has_rule) {
    const json& rule = obj.at("lambda_rule");
    if (!rule.is_object()) fail(where, "\"lambda_rule\" must be an object");
    check_keys(rule, "rom.lambda_rule", {"factor", "floor"});
    LambdaRule lr;
    lr.factor = get_number(rule, "rom.lambda_rule", "factor");
    lr.floor = get_number_or(rule, "rom.lambda_rule", "floor", 0.0);
    if (!(lr.factor >= 0.0) || !(lr.floor >= 0.0)) {
      fail("rom.lambda_rule", "\"factor\" and \"floor\" must be >= 0");
    }
    st.lambda_rule = lr;
  }
  const bool wants_qm =
      std::find(st.methods.begin(), st.methods.end(), RomMethod::GmgQm) != st.methods.end();
  if (wants_qm && !has_reg && !has_rule) {
    fail(where, "GMG-QM needs \"lambda_reg\" or \"lambda_rule\"");
  }

  st.deim_tol = get_number_or(obj, where, "deim_tol", 1e-8);
  if (!(st.deim_tol > 0.0 && st.deim_tol <= 1.0)) {
    fail(where, "\"deim_tol\" must be in (0, 1]");
  }
  if (obj.contains("energy_r")) {
    const Index er = get_integer(obj, where, "energy_r");
    if (er < 1) fail(where, "\"energy_r\" must be >= 1");
    st.energy_r = er;
  }
}

NewtonConfig parse_newton(const json& obj) {
  const char* where = "newton";
  check_keys(obj, where, {"tol", "max_iter"});
  NewtonConfig cfg;
  cfg.tol = require_positive(get_number(obj, where, "tol"), where, "tol");
  cfg.max_iter = static_cast<int>(get_integer(obj, where, "max_iter"));
  if (cfg.max_iter < 1) fail(where, "\"max_iter\" must be >= 1");
  return cfg;
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config: top level must be an object");
  check_keys(root, "top level", {"model", "time", "input", "rom", "newton", "output"});

  ExperimentConfig cfg;
  cfg.model = parse_model(get_section(root, "model", "top level"));
  cfg.grid = parse_time(get_section(root, "time", "top level"));
  cfg.inputs = parse_inputs(get_section(root, "input", "top level"));
  parse_rom(get_section(root, "rom", "top level"), cfg.settings, cfg.model);
  if (root.contains("newton")) {
    cfg.settings.newton = parse_newton(get_section(root, "newton", "top level"));
  }
  if (root.contains("output")) {
    const json& out = get_section(root, "output", "top level");
    check_keys(out, "output", {"directory", "file_prefix"});
    if (out.contains("directory")) {
      cfg.output_directory = get_string(out, "output", "directory");
    }
    if (out.contains("file_prefix")) {
      cfg.file_prefix = get_string(out, "output", "file_prefix");
    }
  }

  // The reduced order can never exceed the state dimension.
  if (cfg.settings.r_max > 2 * cfg.model.n) {
    throw ConfigError("config: rom.r_max exceeds the state dimension 2n");
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw IoError("failed reading config file " + path.string());
  return parse_config(buffer.str());
}

PhSystem build_model(const ModelConfig& model) {
  if (model.type == "linear_msd") {
    return build_linear_msd(
        LinearMsdConfig::uniform(model.n, model.mass, model.stiffness, model.damping));
  }
  NonlinearMsdConfig cfg;
  cfg.n_masses = model.n;
  cfg.k1 = model.k1;
  cfg.k2 = model.k2;
  cfg.mass = model.mass;
  cfg.damping = model.damping;
  return std::move(build_nonlinear_msd(cfg).system);
}

InputSignal make_input(const InputConfig& input) {
  if (input.type == "constant") return constant_input(input.amplitude);
  return sine_input(input.amplitude, input.frequency);
}

}  // namespace phmor
