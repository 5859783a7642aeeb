#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "graphad/config_json.hpp"

namespace graphad {

std::string fnv1a_hex(const std::string& data);

// One completed (dataset, method, variant, fold, run) cell.
struct ExperimentResult {
  std::string dataset;
  std::string method;
  int variant = 0;  // normal class id
  int fold = 0;
  int run = 0;
  std::uint64_t seed = 0;
  double auc = 0.0;
  double f1 = 0.0;
  std::string score_digest;
  std::string config_hash;
  double wall_time_s = 0.0;
  Json extra;  // per-method diagnostics (best epoch, loss terms, ...)

  std::string key() const;
  Json to_json() const;
  static ExperimentResult from_json(const Json& j);
};

// Append-only line-delimited store keyed by the content hash of
// (config_hash, dataset, method, variant, fold, run). Appends are atomic
// per line and serialized, so concurrent workers may share one store.
class ResultsStore {
 public:
  explicit ResultsStore(std::filesystem::path file);

  bool contains(const std::string& key) const;
  void append(const ExperimentResult& r);
  const std::vector<ExperimentResult>& rows() const { return rows_; }
  const std::filesystem::path& path() const { return file_; }

 private:
  std::filesystem::path file_;
  std::vector<ExperimentResult> rows_;
  std::set<std::string> keys_;
  mutable std::mutex mu_;
};

struct AggregateRow {
  std::string dataset;
  std::string method;
  int variant = 0;
  double auc_mean = 0.0;
  double auc_std = 0.0;
  double f1_mean = 0.0;
  double f1_std = 0.0;
  bool flip = false;  // Definition-1 flag of the (dataset, method) group
  int folds = 0;
  int runs_per_fold = 0;
};

// Per-fold metrics are the mean over runs; the reported mean/std aggregates
// over folds. `flip` is true when any variant of the same (dataset, method)
// has mean AUC < 0.5.
std::vector<AggregateRow> aggregate_results(const std::vector<ExperimentResult>& rows);

struct MethodSummary {
  std::string method;
  double avg_rank = 0.0;
  double rank_std = 0.0;
  int flip_count = 0;  // datasets with a performance flip
};

// Ranks methods per dataset by the variant-averaged mean AUC (ties get the
// average rank), then averages ranks across datasets.
std::vector<MethodSummary> summarize_methods(const std::vector<AggregateRow>& rows);

// Deterministic CSV emission; returns the file contents that were written.
std::string emit_report_csv(const std::vector<AggregateRow>& rows,
                            const std::filesystem::path& out_file);
std::string emit_summary_csv(const std::vector<MethodSummary>& rows,
                             const std::filesystem::path& out_file);

}  // namespace graphad
