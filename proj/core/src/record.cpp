#include "lamarck/record.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "lamarck/analysis.hpp"
#include "lamarck/errors.hpp"

namespace lamarck::record {

using nlohmann::json;
using evolution::GenerationReport;
using evolution::GenerationStats;
using evolution::Individual;

json encode_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double decode_real(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto& s = j.get_ref<const std::string&>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw std::invalid_argument("expected a real number, got " + j.dump());
}

json individual_to_json(const Individual& ind) {
  json history = json::array();
  for (const auto& h : ind.history) history.push_back({h.index, encode_real(h.reward)});
  json learned = json::array();
  for (double w : ind.learned) learned.push_back(encode_real(w));
  json j;
  j["id"] = ind.id;
  j["generation"] = ind.generation_born;
  j["parents"] = ind.parents;
  j["fitness_before"] = encode_real(ind.fitness_before);
  j["fitness_after"] = encode_real(ind.fitness_after);
  j["body"] = ind.body;
  j["tree"] = ind.tree;
  j["brain"] = ind.brain;
  j["learned"] = std::move(learned);
  j["history"] = std::move(history);
  return j;
}

Individual individual_from_json(const json& j) {
  Individual ind;
  ind.id = j.at("id").get<evolution::IndividualId>();
  ind.generation_born = j.at("generation").get<std::size_t>();
  ind.parents = j.at("parents").get<std::vector<evolution::IndividualId>>();
  ind.fitness_before = decode_real(j.at("fitness_before"));
  ind.fitness_after = decode_real(j.at("fitness_after"));
  ind.body = cppn::genome_from_json(j.at("body"));
  ind.tree = morphology::tree_from_json(j.at("tree"));
  ind.brain = brain::genotype_from_json(j.at("brain"));
  for (const auto& w : j.at("learned")) ind.learned.push_back(decode_real(w));
  for (const auto& h : j.at("history"))
    ind.history.push_back({h.at(0).get<std::size_t>(), decode_real(h.at(1))});
  return ind;
}

json stats_to_json(const GenerationStats& s) {
  json j;
  j["generation"] = s.generation;
  j["mean_fitness"] = encode_real(s.mean_fitness);
  j["max_fitness"] = encode_real(s.max_fitness);
  j["diversity"] = encode_real(s.diversity);
  j["mean_learning_delta"] = encode_real(s.mean_learning_delta);
  j["mean_fitness_before"] = encode_real(s.mean_fitness_before);
  j["mean_parent_distance"] =
      s.mean_parent_distance ? encode_real(*s.mean_parent_distance) : json(nullptr);
  return j;
}

GenerationStats stats_from_json(const json& j) {
  GenerationStats s;
  s.generation = j.at("generation").get<std::size_t>();
  s.mean_fitness = decode_real(j.at("mean_fitness"));
  s.max_fitness = decode_real(j.at("max_fitness"));
  s.diversity = decode_real(j.at("diversity"));
  s.mean_learning_delta = decode_real(j.at("mean_learning_delta"));
  s.mean_fitness_before = decode_real(j.at("mean_fitness_before"));
  const auto& d = j.at("mean_parent_distance");
  if (!d.is_null()) s.mean_parent_distance = decode_real(d);
  return s;
}

void EventWriter::line(const json& j) {
  os_ << j.dump() << '\n';
  os_.flush();
  if (!os_) throw std::runtime_error("failed writing event log");
}

void EventWriter::run_start(const ExperimentConfig& cfg) {
  line({{"event", "run_start"},
        {"format_version", kFormatVersion},
        {"seed", cfg.evolution.seed},
        {"config", to_config_text(cfg, false)}});
}

void EventWriter::generation(const GenerationReport& report) {
  for (const auto& ind : report.newborns) {
    json j = individual_to_json(ind);
    j["event"] = "individual";
    line(j);
  }
  line({{"event", "generation"},
        {"generation", report.generation},
        {"population", report.population},
        {"stats", stats_to_json(report.stats)}});
}

void EventWriter::run_end(std::size_t generations) {
  line({{"event", "run_end"}, {"generations", generations}});
}

namespace {

LogContents read_events(std::istream& in, bool strict) {
  LogContents out;
  std::map<evolution::IndividualId, Individual> born;
  GenerationReport pending;
  bool started = false;
  std::uint64_t offset = 0;
  std::string text;

  while (true) {
    const std::uint64_t line_start = offset;
    if (!std::getline(in, text)) break;
    const bool terminated = !in.eof();
    offset += text.size() + (terminated ? 1 : 0);
    if (!terminated) {
      if (text.empty()) break;
      if (strict) throw CorruptionError("truncated event (no line terminator)", line_start);
      break;
    }

    json j;
    try {
      j = json::parse(text);
    } catch (const json::parse_error& ex) {
      throw CorruptionError(std::string("malformed event: ") + ex.what(), line_start);
    }

    try {
      const std::string kind = j.at("event").get<std::string>();
      if (!started) {
        if (kind != "run_start") throw CorruptionError("log does not begin with run_start", line_start);
        const int version = j.at("format_version").get<int>();
        if (version != kFormatVersion)
          throw VersionError("unsupported event log version " + std::to_string(version) +
                             " (expected " + std::to_string(kFormatVersion) + ")");
        ExperimentConfig base;
        base.evolution.parallelism = 1;
        out.config = parse_config(j.at("config").get<std::string>(), base);
        if (out.config.evolution.seed != j.at("seed").get<std::uint64_t>())
          throw CorruptionError("run_start seed disagrees with its config", line_start);
        started = true;
      } else if (kind == "individual") {
        Individual ind = individual_from_json(j);
        pending.newborns.push_back(ind);
        born[ind.id] = std::move(ind);
      } else if (kind == "generation") {
        pending.generation = j.at("generation").get<std::size_t>();
        if (pending.generation != out.generations.size())
          throw CorruptionError("generation " + std::to_string(pending.generation) +
                                    " out of sequence",
                                line_start);
        pending.population = j.at("population").get<std::vector<evolution::IndividualId>>();
        pending.stats = stats_from_json(j.at("stats"));
        out.final_population.clear();
        for (auto id : pending.population) {
          auto it = born.find(id);
          if (it == born.end())
            throw CorruptionError("population references unknown individual " + std::to_string(id),
                                  line_start);
          out.final_population.push_back(it->second);
        }
        out.generations.push_back(std::move(pending));
        pending = {};
        out.barrier_offset = offset;
      } else if (kind == "run_end") {
        if (!pending.newborns.empty())
          throw CorruptionError("run_end inside an unfinished generation", line_start);
        out.complete = true;
        if (in.peek() != std::char_traits<char>::eof())
          throw CorruptionError("data after run_end", offset);
        break;
      } else {
        throw CorruptionError("unknown event '" + kind + "'", line_start);
      }
    } catch (const json::exception& ex) {
      throw CorruptionError(std::string("invalid event: ") + ex.what(), line_start);
    } catch (const DomainError& ex) {
      throw CorruptionError(std::string("invalid event: ") + ex.what(), line_start);
    } catch (const IntegrityError& ex) {
      throw CorruptionError(std::string("invalid event: ") + ex.what(), line_start);
    } catch (const std::invalid_argument& ex) {
      throw CorruptionError(std::string("invalid event: ") + ex.what(), line_start);
    } catch (const ConfigError& ex) {
      throw CorruptionError(std::string("invalid run configuration: ") + ex.what(), line_start);
    }
  }

  if (!started) throw CorruptionError("empty event log", 0);
  if (strict && !out.complete) throw CorruptionError("event log ends without run_end", offset);
  return out;
}

std::string csv_real(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

LogContents read_log(std::istream& in) { return read_events(in, true); }
LogContents read_partial_log(std::istream& in) { return read_events(in, false); }

void write_generations_csv(std::ostream& os, const std::vector<GenerationReport>& gens) {
  os << "generation,mean_fitness,max_fitness,diversity,mean_learning_delta,"
        "mean_fitness_before,mean_parent_distance\n";
  for (const auto& g : gens) {
    const auto& s = g.stats;
    os << s.generation << ',' << csv_real(s.mean_fitness) << ',' << csv_real(s.max_fitness) << ','
       << csv_real(s.diversity) << ',' << csv_real(s.mean_learning_delta) << ','
       << csv_real(s.mean_fitness_before) << ','
       << (s.mean_parent_distance ? csv_real(*s.mean_parent_distance) : std::string()) << '\n';
  }
}

void write_traits_csv(std::ostream& os, const std::vector<GenerationReport>& gens) {
  os << "id,generation";
  for (auto name : analysis::kTraitNames) os << ',' << name;
  os << ",fitness_before,fitness_after\n";
  for (const auto& g : gens) {
    for (const auto& ind : g.newborns) {
      os << ind.id << ',' << ind.generation_born;
      for (double v : analysis::traits(ind.tree).as_array()) os << ',' << csv_real(v);
      os << ',' << csv_real(ind.fitness_before) << ',' << csv_real(ind.fitness_after) << '\n';
    }
  }
}

void write_meta(const RunRecord& r, const std::filesystem::path& dir) {
  json meta = {{"format_version", kFormatVersion},
               {"run_id", r.meta.run_id},
               {"wall_seconds", r.meta.wall_seconds},
               {"output_dir", r.config.output_dir},
               {"parallelism", r.config.evolution.parallelism},
               {"trace_trajectories", r.config.trace_trajectories}};
  std::ofstream os(dir / "meta.json");
  os << meta.dump(2) << '\n';
  if (!os) throw std::runtime_error("run " + r.meta.run_id + ": failed writing meta.json");
}

namespace {

template <typename Fn>
void write_file(const std::filesystem::path& path, Fn&& fn) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot create " + path.string());
  fn(os);
  if (!os) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace

void persist(const RunRecord& r, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_file(dir / "events.ndjson", [&](std::ostream& os) {
    ExperimentConfig cfg = r.config;
    cfg.evolution.seed = r.seed;
    EventWriter w(os);
    w.run_start(cfg);
    for (const auto& g : r.generations) w.generation(g);
    w.run_end(r.generations.empty() ? 0 : r.generations.back().generation);
  });
  write_file(dir / "generations.csv", [&](std::ostream& os) { write_generations_csv(os, r.generations); });
  write_file(dir / "traits.csv", [&](std::ostream& os) { write_traits_csv(os, r.generations); });
  write_meta(r, dir);
}

RunRecord load(const std::filesystem::path& dir) {
  std::ifstream in(dir / "events.ndjson", std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + (dir / "events.ndjson").string());
  LogContents log = read_log(in);

  RunRecord r;
  r.config = std::move(log.config);
  r.seed = r.config.evolution.seed;
  r.generations = std::move(log.generations);
  r.final_population = std::move(log.final_population);

  std::ifstream mf(dir / "meta.json");
  if (mf) {
    json meta;
    try {
      meta = json::parse(mf);
      if (meta.at("format_version").get<int>() != kFormatVersion)
        throw VersionError("unsupported meta.json version");
      r.meta.run_id = meta.at("run_id").get<std::string>();
      r.meta.wall_seconds = meta.at("wall_seconds").get<double>();
      r.config.output_dir = meta.at("output_dir").get<std::string>();
      r.config.evolution.parallelism = meta.at("parallelism").get<std::size_t>();
      r.config.trace_trajectories = meta.at("trace_trajectories").get<bool>();
    } catch (const json::exception& ex) {
      throw CorruptionError(std::string("invalid meta.json: ") + ex.what(), 0);
    }
  }
  return r;
}

}  // namespace lamarck::record
