#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <ostream>
#include <set>
#include <thread>
#include <unordered_map>

#include "cakewalk/bench.hpp"

namespace cakewalk::bench {

namespace fs = std::filesystem;

namespace {

// Rewrites the result file with the given records, atomically.
void rewrite(const std::string& path, const std::vector<Json>& records) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    for (const auto& r : records) out << r.dump() << '\n';
  }
  fs::rename(tmp, path);
}

}  // namespace

SweepSummary run_sweep(const ExperimentSpec& spec, const SweepOptions& options) {
  if (spec.output.empty()) throw ConfigError("no output path");
  const std::vector<Cell> cells = enumerate_cells(spec);
  {
    std::set<std::string> ids;
    for (const auto& input : spec.resolved_inputs()) {
      if (!ids.insert(instance_id(input)).second) throw ConfigError("duplicate instance id " + instance_id(input));
    }
  }
  std::unordered_map<std::string, std::size_t> index_of;
  for (const auto& c : cells) index_of[c.key()] = c.index;

  SweepSummary summary;
  summary.cells = cells.size();
  if (options.log) *options.log << "sweep: " << cells.size() << " cells\n";

  // Keep complete records of this sweep; drop failures, foreign keys and
  // any torn trailing line from an interrupted run.
  std::vector<Json> kept;
  std::set<std::string> done;
  if (fs::exists(spec.output)) {
    for (auto& r : read_records(spec.output)) {
      if (!r.contains("key") || !r.contains("status") || r["status"] != "ok") continue;
      const std::string key = r["key"].get<std::string>();
      if (!index_of.contains(key) || done.contains(key)) continue;
      done.insert(key);
      kept.push_back(std::move(r));
    }
  } else if (const auto parent = fs::path(spec.output).parent_path(); !parent.empty()) {
    fs::create_directories(parent);
  }
  rewrite(spec.output, kept);
  summary.reused = kept.size();

  std::vector<const Cell*> pending;
  for (const auto& c : cells) {
    if (!done.contains(c.key())) pending.push_back(&c);
  }

  std::ofstream out(spec.output, std::ios::app);
  std::mutex write_mutex;
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> failed{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < pending.size(); i = next++) {
      const Cell& cell = *pending[i];
      Json record;
      try {
        if (options.on_execute) {
          std::lock_guard lock(write_mutex);
          options.on_execute(cell);
        }
        record = run_cell(spec, cell);
      } catch (const std::exception& e) {
        record = Json{{"key", cell.key()}, {"status", "failed"}, {"reason", e.what()}, {"input", cell.input}};
        ++failed;
      }
      std::lock_guard lock(write_mutex);
      out << record.dump() << '\n';
      out.flush();
      if (options.log && record["status"] != "ok") {
        *options.log << "cell " << cell.key() << " failed: " << record["reason"].get<std::string>() << '\n';
      }
    }
  };
  const std::size_t jobs = std::max<std::size_t>(1, std::min(options.jobs, pending.size()));
  std::vector<std::thread> threads;
  for (std::size_t t = 1; t < jobs; ++t) threads.emplace_back(worker);
  worker();
  for (auto& t : threads) t.join();
  out.close();

  summary.executed = pending.size();
  summary.failed = failed;

  // Canonical order, so the file does not depend on scheduling.
  std::vector<Json> all = read_records(spec.output);
  std::stable_sort(all.begin(), all.end(), [&](const Json& a, const Json& b) {
    return index_of.at(a["key"].get<std::string>()) < index_of.at(b["key"].get<std::string>());
  });
  rewrite(spec.output, all);
  if (options.log) {
    *options.log << "sweep: " << summary.reused << " reused, " << summary.executed << " executed, " << summary.failed
                 << " failed\n";
  }
  return summary;
}

}  // namespace cakewalk::bench
