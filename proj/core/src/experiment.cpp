#include "lamarck/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>
#include <system_error>

#include <nlohmann/json.hpp>

#include "lamarck/analysis.hpp"
#include "lamarck/brain.hpp"
#include "lamarck/controller.hpp"
#include "lamarck/errors.hpp"
#include "lamarck/learner.hpp"
#include "lamarck/simulation.hpp"

namespace lamarck::experiment {

namespace fs = std::filesystem;
using evolution::GenerationReport;
using evolution::Individual;

fs::path allocate_run_dir(const fs::path& root, const std::string& stem) {
  std::error_code ec;
  fs::create_directories(root, ec);
  if (ec) throw std::runtime_error("cannot create " + root.string() + ": " + ec.message());
  for (std::size_t n = 0;; ++n) {
    fs::path candidate = root / (n == 0 ? stem : stem + "-" + std::to_string(n));
    // create_directory reports false when the directory already exists, which
    // makes the claim atomic with respect to concurrent runs.
    if (fs::create_directory(candidate, ec)) return candidate;
    if (ec) throw std::runtime_error("cannot create " + candidate.string() + ": " + ec.message());
  }
}

namespace {

std::string run_stem(const ExperimentConfig& cfg) {
  std::string stem = std::string(evolution::mode_name(cfg.evolution.mode)) + "-seed" +
                     std::to_string(cfg.evolution.seed);
  if (cfg.evolution.freeze_bodies) stem += "-fixed";
  if (!cfg.evolution.learning) stem += "-nolearn";
  return stem;
}

void write_summaries(const fs::path& dir, const record::RunRecord& r) {
  std::ofstream gens(dir / "generations.csv");
  record::write_generations_csv(gens, r.generations);
  std::ofstream traits(dir / "traits.csv");
  record::write_traits_csv(traits, r.generations);
  if (!gens || !traits) throw std::runtime_error("run " + r.meta.run_id + ": failed writing CSVs");
}

void trace_newborns(const fs::path& dir, const ExperimentConfig& cfg, const GenerationReport& report) {
  const fs::path tdir = dir / "trajectories";
  fs::create_directories(tdir);
  for (const auto& ind : report.newborns) {
    const simulation::Evaluator eval(ind.tree, cfg.evolution.task, cfg.evolution.surrogate);
    simulation::Trajectory traj;
    try {
      traj = eval.trace(ind.learned);
    } catch (const NumericalDivergence&) {
      continue;
    }
    std::ofstream os(tdir / (std::to_string(ind.id) + ".csv"));
    simulation::write_trajectory_csv(os, traj);
  }
}

void report_progress(std::ostream* progress, const std::string& run_id, const GenerationReport& g) {
  if (!progress) return;
  *progress << run_id << " gen " << g.generation << " mean " << g.stats.mean_fitness << " max "
            << g.stats.max_fitness << " diversity " << g.stats.diversity << " delta "
            << g.stats.mean_learning_delta << std::endl;
}

// Streams the remaining generations into an open log, then finalizes the run.
RunOutcome drive(const ExperimentConfig& cfg, const fs::path& dir, std::ofstream& log,
                 record::RunRecord r, std::optional<evolution::ResumePoint> resume,
                 std::ostream* progress) {
  const auto start = std::chrono::steady_clock::now();
  record::EventWriter writer(log);
  try {
    r.final_population = evolution::run_experiment(
        cfg.evolution,
        [&](const GenerationReport& report) {
          writer.generation(report);
          if (cfg.trace_trajectories) trace_newborns(dir, cfg, report);
          report_progress(progress, r.meta.run_id, report);
          r.generations.push_back(report);
        },
        std::move(resume));
    writer.run_end(cfg.evolution.generations);
  } catch (const std::ios_base::failure& ex) {
    throw std::runtime_error("run " + r.meta.run_id + ": " + ex.what());
  } catch (const std::runtime_error& ex) {
    if (dynamic_cast<const NumericalDivergence*>(&ex)) throw;
    throw std::runtime_error("run " + r.meta.run_id + ": " + ex.what());
  }
  r.meta.wall_seconds +=
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  record::write_meta(r, dir);
  write_summaries(dir, r);
  return {std::move(r), dir};
}

}  // namespace

RunOutcome execute_run(const ExperimentConfig& cfg, std::ostream* progress) {
  cfg.evolution.validate();
  const fs::path dir = allocate_run_dir(cfg.output_dir, run_stem(cfg));
  record::RunRecord r;
  r.config = cfg;
  r.seed = cfg.evolution.seed;
  r.meta.run_id = dir.filename().string();
  record::write_meta(r, dir);

  std::ofstream log(dir / "events.ndjson", std::ios::binary);
  if (!log) throw std::runtime_error("run " + r.meta.run_id + ": cannot create event log");
  record::EventWriter(log).run_start(cfg);
  return drive(cfg, dir, log, std::move(r), std::nullopt, progress);
}

RunOutcome resume_run(const fs::path& dir, std::size_t parallelism, std::ostream* progress) {
  const fs::path log_path = dir / "events.ndjson";
  record::LogContents contents;
  {
    std::ifstream in(log_path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + log_path.string());
    contents = record::read_partial_log(in);
  }
  if (contents.complete) {
    record::RunRecord r = record::load(dir);
    return {std::move(r), dir};
  }

  record::RunRecord r;
  r.config = contents.config;
  r.seed = r.config.evolution.seed;
  r.meta.run_id = dir.filename().string();
  {
    std::ifstream mf(dir / "meta.json");
    if (mf) {
      const auto meta = nlohmann::json::parse(mf, nullptr, false);
      if (!meta.is_discarded()) {
        r.config.output_dir = meta.value("output_dir", r.config.output_dir);
        r.config.trace_trajectories = meta.value("trace_trajectories", false);
        r.meta.wall_seconds = meta.value("wall_seconds", 0.0);
      }
    }
  }
  r.config.evolution.parallelism = parallelism;
  const ExperimentConfig cfg = r.config;  // r is moved into drive()

  if (contents.generations.empty()) {
    // Nothing survived the interruption beyond run_start: start over.
    fs::resize_file(log_path, 0);
    std::ofstream log(log_path, std::ios::binary);
    record::EventWriter(log).run_start(cfg);
    return drive(cfg, dir, log, std::move(r), std::nullopt, progress);
  }

  fs::resize_file(log_path, contents.barrier_offset);
  std::ofstream log(log_path, std::ios::binary | std::ios::app);
  if (!log) throw std::runtime_error("run " + r.meta.run_id + ": cannot reopen event log");
  evolution::ResumePoint point{contents.generations.back().generation, contents.final_population};
  r.generations = std::move(contents.generations);
  return drive(cfg, dir, log, std::move(r), std::move(point), progress);
}

namespace {

double mean(const std::vector<double>& v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

CompareRow summarize(const record::RunRecord& r, const std::string& run_id) {
  CompareRow row;
  row.seed = r.seed;
  row.mode = r.config.evolution.mode;
  row.run_id = run_id;
  std::vector<double> fit;
  for (const auto& ind : r.final_population) fit.push_back(ind.fitness_after);
  row.final_mean_fitness = mean(fit);
  row.final_max_fitness = fit.empty() ? 0.0 : *std::max_element(fit.begin(), fit.end());

  std::vector<double> before, deltas, div;
  for (const auto& g : r.generations) {
    for (const auto& ind : g.newborns) {
      if (g.generation >= 5 && g.generation <= 10) before.push_back(ind.fitness_before);
      deltas.push_back(analysis::learning_delta(ind));
    }
  }
  const std::size_t n = r.generations.size();
  for (std::size_t i = n >= 3 ? n - 3 : 0; i < n; ++i) div.push_back(r.generations[i].stats.diversity);
  row.mean_fitness_before_5_10 = mean(before);
  row.final_diversity = mean(div);
  row.mean_learning_delta = mean(deltas);
  return row;
}

std::vector<CompareRow> compare(const ExperimentConfig& cfg, std::size_t seeds,
                                std::ostream* progress) {
  std::vector<CompareRow> rows;
  for (std::size_t s = 0; s < seeds; ++s) {
    for (auto mode : {evolution::Mode::Lamarckian, evolution::Mode::Darwinian}) {
      ExperimentConfig run_cfg = cfg;
      run_cfg.evolution.seed = cfg.evolution.seed + s;
      run_cfg.evolution.mode = mode;
      RunOutcome out = execute_run(run_cfg, progress);
      rows.push_back(summarize(out.record, out.record.meta.run_id));
    }
  }
  return rows;
}

void write_compare_csv(std::ostream& os, const std::vector<CompareRow>& rows) {
  os << "seed,mode,final_mean_fitness,final_max_fitness,mean_fitness_before_gen5_10,"
        "final_diversity,mean_learning_delta,run_id\n";
  os.precision(17);
  for (const auto& r : rows) {
    os << r.seed << ',' << evolution::mode_name(r.mode) << ',' << r.final_mean_fitness << ','
       << r.final_max_fitness << ',' << r.mean_fitness_before_5_10 << ',' << r.final_diversity
       << ',' << r.mean_learning_delta << ',' << r.run_id << '\n';
  }
}

Analysis analyze(const fs::path& run_dir) {
  std::ifstream in(run_dir / "events.ndjson", std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + (run_dir / "events.ndjson").string());
  const record::LogContents log = record::read_log(in);
  Analysis a;
  a.stats_consistent = true;
  for (const auto& g : log.generations) {
    std::vector<double> d, b;
    for (const auto& ind : g.newborns) {
      d.push_back(analysis::learning_delta(ind));
      b.push_back(ind.fitness_before);
    }
    const double md = d.empty() ? 0.0 : mean(d);
    const double mb = b.empty() ? 0.0 : mean(b);
    a.learning_deltas.push_back(md);
    a.fitness_before.push_back(mb);
    if (md != g.stats.mean_learning_delta || mb != g.stats.mean_fitness_before)
      a.stats_consistent = false;
  }
  return a;
}

std::vector<double> learning_delta_series(const fs::path& run_dir) {
  return analyze(run_dir).learning_deltas;
}

BaselineOutcome baseline(const ExperimentConfig& cfg, std::ostream* progress) {
  BaselineOutcome out;
  ExperimentConfig evolved = cfg;
  evolved.evolution.freeze_bodies = false;
  ExperimentConfig fixed = cfg;
  fixed.evolution.freeze_bodies = true;
  out.evolved_dir = execute_run(evolved, progress).dir;
  out.fixed_dir = execute_run(fixed, progress).dir;
  out.evolved_deltas = learning_delta_series(out.evolved_dir);
  out.fixed_deltas = learning_delta_series(out.fixed_dir);
  out.delta_of_delta = analysis::delta_of_delta(out.evolved_deltas, out.fixed_deltas);
  return out;
}

Budget budget(const evolution::EvolutionConfig& cfg) {
  Budget b;
  b.evolution_evaluations = cfg.lambda + cfg.lambda * cfg.generations;
  b.assessments_per_newborn = cfg.learning ? cfg.revde.budget() : 0;
  b.paired_total = b.evolution_evaluations * b.assessments_per_newborn * 2;
  return b;
}

namespace {

struct Check {
  std::string name;
  std::function<bool()> run;
};

evolution::EvolutionConfig tiny_config(std::uint64_t seed) {
  evolution::EvolutionConfig c;
  c.mu = 6;
  c.lambda = 3;
  c.generations = 3;
  c.seed = seed;
  c.revde.mu = 5;
  c.revde.candidates_per_iter = 6;
  c.revde.iterations = 3;
  c.task.duration = 10.0;
  return c;
}

morphology::ModuleTree random_tree(Rng& rng) {
  cppn::Genome g = cppn::Genome::random_minimal(rng);
  for (int i = 0; i < 8; ++i) g = cppn::mutate(g, rng);
  return morphology::develop(g);
}

}  // namespace

int validate(std::ostream& os, std::uint64_t seed) {
  std::vector<Check> checks;

  checks.push_back({"express/writeback round trip", [seed] {
    Rng rng = make_stream(seed, {100});
    for (int i = 0; i < 200; ++i) {
      const auto tree = random_tree(rng);
      const auto g = brain::Genotype::random(rng);
      const auto net = brain::express(g, tree);
      std::vector<double> w = net.params;
      for (double& v : w) v += 0.25;
      const auto g2 = brain::writeback(g, tree, w);
      if (brain::express(g2, tree).params != w) return false;
      if (brain::writeback(g2, tree, net.params) != g) return false;
    }
    return true;
  }});

  checks.push_back({"oscillator norm conservation", [] {
    controller::CpgNetwork net;
    net.params = {1.0};
    net.internal = {0};
    net.sides = {controller::Side::Center};
    net.reset();
    std::vector<double> out(1);
    for (int i = 0; i < 8000; ++i) controller::step(net, 0.005, {}, out);
    const double r2 = net.x[0] * net.x[0] + net.y[0] * net.y[0];
    return std::abs(r2 - 1.0) < 1e-6;
  }});

  checks.push_back({"stationary robot scores zero", [] {
    simulation::Trajectory t;
    for (int i = 0; i <= 200; ++i) t.samples.push_back({i * 0.2, {0.0, 0.0}});
    return simulation::fitness(t, simulation::TaskSpec{}) == 0.0;
  }});

  checks.push_back({"learner consumes its budget", [seed] {
    learner::RevDeConfig cfg;
    std::size_t calls = 0;
    Rng rng = make_stream(seed, {101});
    std::vector<double> x0(6, 1.0);
    double best = -std::numeric_limits<double>::infinity();
    bool monotone = true;
    const auto res = learner::learn(
        x0,
        [&](std::span<const double> w) {
          ++calls;
          double s = 0.0;
          for (double v : w) s -= v * v;
          return s;
        },
        cfg, rng);
    for (const auto& h : res.history) {
      if (h.reward < best) continue;
      best = h.reward;
    }
    monotone = res.best_reward == best;
    return calls == cfg.budget() && calls == 280 && res.history.size() == calls && monotone;
  }});

  checks.push_back({"tree edit distance is a metric on developed robots", [seed] {
    Rng rng = make_stream(seed, {102});
    std::vector<morphology::ModuleTree> trees;
    for (int i = 0; i < 30; ++i) trees.push_back(random_tree(rng));
    for (std::size_t i = 0; i < trees.size(); ++i) {
      if (analysis::tree_edit_distance(trees[i], trees[i]) != 0) return false;
      for (std::size_t j = 0; j < trees.size(); ++j) {
        const auto dij = analysis::tree_edit_distance(trees[i], trees[j]);
        if (dij != analysis::tree_edit_distance(trees[j], trees[i])) return false;
        for (std::size_t k = 0; k < trees.size(); k += 3)
          if (dij > analysis::tree_edit_distance(trees[i], trees[k]) +
                        analysis::tree_edit_distance(trees[k], trees[j]))
            return false;
      }
    }
    return true;
  }});

  checks.push_back({"population size and elitism across generations", [seed] {
    const auto cfg = tiny_config(seed);
    std::vector<Individual> pop;
    evolution::initialize(cfg, pop);
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& i : pop) best = std::max(best, i.fitness_after);
    for (std::size_t g = 1; g <= cfg.generations; ++g) {
      evolution::run_generation(pop, g, cfg);
      double now = -std::numeric_limits<double>::infinity();
      for (const auto& i : pop) now = std::max(now, i.fitness_after);
      if (pop.size() != cfg.mu || now < best) return false;
      best = now;
    }
    return true;
  }});

  checks.push_back({"Darwinian brains never change after birth", [seed] {
    auto cfg = tiny_config(seed);
    cfg.mode = evolution::Mode::Darwinian;
    std::map<evolution::IndividualId, brain::Genotype> first_seen;
    bool ok = true;
    auto note = [&](const std::vector<Individual>& v) {
      for (const auto& i : v) {
        auto [it, fresh] = first_seen.emplace(i.id, i.brain);
        if (!fresh && it->second != i.brain) ok = false;
      }
    };
    evolution::run_experiment(cfg, [&](const GenerationReport& r) { note(r.newborns); });
    return ok;
  }});

  checks.push_back({"Lamarckian newborns store their learned weights", [seed] {
    auto cfg = tiny_config(seed);
    bool ok = true;
    evolution::run_experiment(cfg, [&](const GenerationReport& r) {
      for (const auto& i : r.newborns)
        if (brain::express(i.brain, i.tree).params != i.learned) ok = false;
    });
    return ok;
  }});

  checks.push_back({"results independent of parallelism", [seed] {
    auto a = tiny_config(seed);
    auto b = a;
    b.parallelism = 4;
    std::vector<GenerationReport> ra, rb;
    evolution::run_experiment(a, [&](const GenerationReport& r) { ra.push_back(r); });
    evolution::run_experiment(b, [&](const GenerationReport& r) { rb.push_back(r); });
    return ra == rb;
  }});

  checks.push_back({"no learning means zero learning delta", [seed] {
    auto cfg = tiny_config(seed);
    cfg.learning = false;
    bool ok = true;
    evolution::run_experiment(cfg, [&](const GenerationReport& r) {
      for (const auto& i : r.newborns)
        if (analysis::learning_delta(i) != 0.0) ok = false;
    });
    return ok;
  }});

  checks.push_back({"configuration round trip", [] {
    ExperimentConfig cfg = desk_config();
    cfg.evolution.surrogate.c_v = 0.1 + 1e-17 * 3;
    cfg.evolution.task.targets = {{0.1, -0.3}, {1.0 / 3.0, 2.0}};
    return parse_config(to_config_text(cfg)) == cfg;
  }});

  checks.push_back({"budget arithmetic", [] {
    const auto b = budget(evolution::EvolutionConfig{});
    return b.evolution_evaluations == 775 && b.assessments_per_newborn == 280 &&
           b.paired_total == 434000;
  }});

  int failures = 0;
  for (const auto& c : checks) {
    bool ok = false;
    std::string detail;
    try {
      ok = c.run();
    } catch (const std::exception& ex) {
      detail = std::string(" (") + ex.what() + ")";
    }
    if (!ok) ++failures;
    os << (ok ? "PASS " : "FAIL ") << c.name << detail << '\n';
  }
  return failures;
}

}  // namespace lamarck::experiment
