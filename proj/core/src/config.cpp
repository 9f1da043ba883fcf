#include "lamarck/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "lamarck/errors.hpp"
#include "lamarck/parallel.hpp"

namespace lamarck {

ExperimentConfig default_config() {
  ExperimentConfig cfg;
  cfg.evolution.parallelism = default_parallelism();
  return cfg;
}

ExperimentConfig desk_config() {
  ExperimentConfig cfg = default_config();
  cfg.evolution.mu = 8;
  cfg.evolution.lambda = 4;
  cfg.evolution.generations = 10;
  cfg.evolution.revde.mu = 10;
  cfg.evolution.revde.candidates_per_iter = 10;
  cfg.evolution.revde.iterations = 4;
  cfg.repetitions = 5;
  return cfg;
}

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

struct Field {
  std::function<void(const std::string&)> set;
  std::function<std::string()> get;
  bool execution = false;
};

double parse_double(const std::string& v) {
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) throw std::invalid_argument("not a number");
  return out;
}

template <typename T>
T parse_unsigned(const std::string& v) {
  T out{};
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size())
    throw std::invalid_argument("not a non-negative integer");
  return out;
}

bool parse_bool(const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw std::invalid_argument("not a boolean");
}

std::vector<simulation::Vec2> parse_targets(const std::string& v) {
  std::vector<simulation::Vec2> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ';')) {
    item = trim(item);
    if (item.empty()) continue;
    const auto comma = item.find(',');
    if (comma == std::string::npos) throw std::invalid_argument("target must be 'x,y'");
    out.push_back({parse_double(trim(item.substr(0, comma))), parse_double(trim(item.substr(comma + 1)))});
  }
  if (out.empty()) throw std::invalid_argument("at least one target required");
  return out;
}

std::string format_targets(const std::vector<simulation::Vec2>& targets) {
  std::string out;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (i) out += "; ";
    out += format_double(targets[i].x) + "," + format_double(targets[i].y);
  }
  return out;
}

using Schema = std::map<std::string, std::map<std::string, Field>>;

Field real(double& ref) {
  return {[&ref](const std::string& v) { ref = parse_double(v); },
          [&ref] { return format_double(ref); }};
}
Field count(std::size_t& ref) {
  return {[&ref](const std::string& v) { ref = parse_unsigned<std::size_t>(v); },
          [&ref] { return std::to_string(ref); }};
}
Field flag(bool& ref) {
  return {[&ref](const std::string& v) { ref = parse_bool(v); },
          [&ref] { return std::string(ref ? "true" : "false"); }};
}
Field execution(Field f) {
  f.execution = true;
  return f;
}

Schema schema(ExperimentConfig& c) {
  auto& e = c.evolution;
  Schema s;
  s["evolution"] = {
      {"population_size", count(e.mu)},
      {"offspring_size", count(e.lambda)},
      {"generations", count(e.generations)},
      {"tournament_size", count(e.tournament_size)},
      {"mode",
       {[&e](const std::string& v) { e.mode = evolution::mode_from(v); },
        [&e] { return std::string(evolution::mode_name(e.mode)); }}},
      {"seed",
       {[&e](const std::string& v) { e.seed = parse_unsigned<std::uint64_t>(v); },
        [&e] { return std::to_string(e.seed); }}},
      {"crossover", real(e.body_crossover)},
      {"max_modules", count(e.max_modules)},
      {"learning", flag(e.learning)},
      {"freeze_bodies", flag(e.freeze_bodies)},
  };
  s["body_mutation"] = {
      {"weight_perturb", real(e.body_mutation.weight_perturb)},
      {"weight_sigma", real(e.body_mutation.weight_sigma)},
      {"add_connection", real(e.body_mutation.add_connection)},
      {"add_node", real(e.body_mutation.add_node)},
      {"activation_swap", real(e.body_mutation.activation_swap)},
  };
  s["brain_mutation"] = {
      {"probability", real(e.brain_mutation.probability)},
      {"sigma", real(e.brain_mutation.sigma)},
  };
  s["revde"] = {
      {"population_size", count(e.revde.mu)},
      {"new_candidates", count(e.revde.candidates_per_iter)},
      {"iterations", count(e.revde.iterations)},
      {"scaling_factor", real(e.revde.F)},
      {"crossover_probability", real(e.revde.CR)},
      {"init_noise_sigma", real(e.revde.init_noise_sigma)},
  };
  s["task"] = {
      {"targets",
       {[&e](const std::string& v) { e.task.targets = parse_targets(v); },
        [&e] { return format_targets(e.task.targets); }}},
      {"evaluation_time", real(e.task.duration)},
      {"reach_radius", real(e.task.reach_radius)},
      {"path_penalty", real(e.task.omega)},
  };
  s["surrogate"] = {
      {"dt", real(e.surrogate.dt)},
      {"sample_rate", real(e.surrogate.sample_rate)},
      {"c_v", real(e.surrogate.c_v)},
      {"v_max", real(e.surrogate.v_max)},
      {"c_turn", real(e.surrogate.c_turn)},
      {"c_steer", real(e.surrogate.c_steer)},
  };
  s["experiment"] = {
      {"repetitions", count(c.repetitions)},
      {"output_dir",
       execution({[&c](const std::string& v) { c.output_dir = v; }, [&c] { return c.output_dir; }})},
      {"parallelism", execution(count(e.parallelism))},
      {"trace_trajectories", execution(flag(c.trace_trajectories))},
  };
  return s;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text, ExperimentConfig base) {
  ExperimentConfig cfg = std::move(base);
  Schema s = schema(cfg);
  std::istringstream in(text);
  std::string raw;
  std::string section;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string l = trim(raw);
    if (l.empty() || l[0] == '#' || l[0] == ';') continue;
    if (l.front() == '[') {
      if (l.back() != ']') throw ConfigError("unterminated section header", line, l);
      section = trim(std::string_view(l).substr(1, l.size() - 2));
      if (!s.count(section)) throw ConfigError("unknown section [" + section + "]", line, section);
      continue;
    }
    const auto eq = l.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value'", line, l);
    const std::string key = trim(std::string_view(l).substr(0, eq));
    const std::string value = trim(std::string_view(l).substr(eq + 1));
    if (section.empty()) throw ConfigError("key '" + key + "' outside of a section", line, key);
    auto& fields = s.at(section);
    auto it = fields.find(key);
    if (it == fields.end())
      throw ConfigError("unknown key '" + key + "' in [" + section + "]", line, section + "." + key);
    try {
      it->second.set(value);
    } catch (const std::exception& ex) {
      throw ConfigError("invalid value '" + value + "' for " + section + "." + key + ": " + ex.what(),
                        line, section + "." + key);
    }
  }
  try {
    cfg.evolution.validate();
  } catch (const DomainError& ex) {
    throw ConfigError(ex.what(), 0, "");
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string(), 0, "");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), std::move(base));
}

std::string to_config_text(const ExperimentConfig& cfg, bool include_execution) {
  ExperimentConfig copy = cfg;
  Schema s = schema(copy);
  std::ostringstream out;
  for (const char* section :
       {"evolution", "body_mutation", "brain_mutation", "revde", "task", "surrogate", "experiment"}) {
    out << '[' << section << "]\n";
    for (const auto& [key, field] : s.at(section)) {
      if (field.execution && !include_execution) continue;
      out << key << " = " << field.get() << '\n';
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace lamarck
