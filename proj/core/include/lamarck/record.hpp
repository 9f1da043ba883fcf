#pragma once

// Run persistence.
//
// A run directory holds
//   events.ndjson      one JSON object per line: run_start, then for every
//                      generation its individuals followed by a generation
//                      event (the barrier), then run_end
//   meta.json          wall time and execution settings (never part of the log)
//   generations.csv    per-generation statistics
//   traits.csv         one row per robot born
//   trajectories/      <id>.csv per robot when tracing is enabled
//
// The event log depends only on the configuration and seed.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "lamarck/config.hpp"
#include "lamarck/evolution.hpp"

namespace lamarck::record {

inline constexpr int kFormatVersion = 1;

struct RunMeta {
  std::string run_id;
  double wall_seconds = 0.0;

  bool operator==(const RunMeta&) const = default;
};

struct RunRecord {
  ExperimentConfig config;
  std::uint64_t seed = 0;
  std::vector<evolution::GenerationReport> generations;
  std::vector<evolution::Individual> final_population;  // best first
  RunMeta meta;

  bool operator==(const RunRecord&) const = default;
};

/// JSON number, or the string "inf" / "-inf" / "nan" for non-finite values.
nlohmann::json encode_real(double v);
double decode_real(const nlohmann::json& j);

nlohmann::json individual_to_json(const evolution::Individual& ind);
evolution::Individual individual_from_json(const nlohmann::json& j);
nlohmann::json stats_to_json(const evolution::GenerationStats& s);
evolution::GenerationStats stats_from_json(const nlohmann::json& j);

/// Streams events for one run. Each call writes complete lines and flushes.
class EventWriter {
 public:
  explicit EventWriter(std::ostream& os) : os_(os) {}

  void run_start(const ExperimentConfig& cfg);
  void generation(const evolution::GenerationReport& report);
  void run_end(std::size_t generations);

 private:
  void line(const nlohmann::json& j);
  std::ostream& os_;
};

/// Contents of an event log up to its last complete generation barrier.
struct LogContents {
  ExperimentConfig config;  // execution settings at their defaults
  std::vector<evolution::GenerationReport> generations;
  std::vector<evolution::Individual> final_population;
  bool complete = false;         // run_end present
  std::uint64_t barrier_offset = 0;  // byte just past the last generation event
};

/// Strict: throws CorruptionError (with the byte offset) on a malformed or
/// truncated line or a missing run_end, VersionError on an unknown format.
LogContents read_log(std::istream& in);
/// Lenient about a missing tail: anything after the last generation barrier
/// is ignored. Still rejects malformed lines before the barrier.
LogContents read_partial_log(std::istream& in);

void write_generations_csv(std::ostream& os, const std::vector<evolution::GenerationReport>& gens);
void write_traits_csv(std::ostream& os, const std::vector<evolution::GenerationReport>& gens);

/// meta.json: run id, wall time and the execution settings.
void write_meta(const RunRecord& r, const std::filesystem::path& dir);

/// Writes the event log, meta.json and CSV summaries into `dir`.
void persist(const RunRecord& r, const std::filesystem::path& dir);
/// Reads a directory written by persist() or by a completed run.
RunRecord load(const std::filesystem::path& dir);

}  // namespace lamarck::record
