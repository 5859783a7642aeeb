#include "graphad/results.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace graphad {

std::string fnv1a_hex(const std::string& data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string ExperimentResult::key() const {
  return fnv1a_hex(config_hash + "|" + dataset + "|" + method + "|" + std::to_string(variant) +
                   "|" + std::to_string(fold) + "|" + std::to_string(run));
}

Json ExperimentResult::to_json() const {
  return Json{{"key", key()},
              {"dataset", dataset},
              {"method", method},
              {"variant", variant},
              {"fold", fold},
              {"run", run},
              {"seed", seed},
              {"auc", auc},
              {"f1", f1},
              {"score_digest", score_digest},
              {"config_hash", config_hash},
              {"wall_time_s", wall_time_s},
              {"extra", extra}};
}

ExperimentResult ExperimentResult::from_json(const Json& j) {
  ExperimentResult r;
  r.dataset = j.at("dataset").get<std::string>();
  r.method = j.at("method").get<std::string>();
  r.variant = j.at("variant").get<int>();
  r.fold = j.at("fold").get<int>();
  r.run = j.at("run").get<int>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.auc = j.at("auc").get<double>();
  r.f1 = j.at("f1").get<double>();
  r.score_digest = j.value("score_digest", "");
  r.config_hash = j.value("config_hash", "");
  r.wall_time_s = j.value("wall_time_s", 0.0);
  r.extra = j.value("extra", Json::object());
  return r;
}

ResultsStore::ResultsStore(std::filesystem::path file) : file_(std::move(file)) {
  if (std::filesystem::exists(file_)) {
    std::ifstream in(file_);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      auto r = ExperimentResult::from_json(Json::parse(line));
      if (keys_.insert(r.key()).second) rows_.push_back(std::move(r));
    }
  } else if (file_.has_parent_path()) {
    std::filesystem::create_directories(file_.parent_path());
  }
}

bool ResultsStore::contains(const std::string& key) const {
  std::lock_guard lock(mu_);
  return keys_.count(key) > 0;
}

void ResultsStore::append(const ExperimentResult& r) {
  std::lock_guard lock(mu_);
  if (!keys_.insert(r.key()).second) return;
  rows_.push_back(r);
  std::ofstream out(file_, std::ios::app);
  if (!out) throw DataError("cannot append to results store: " + file_.string());
  out << r.to_json().dump() << "\n";
  out.flush();
}

namespace {

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
};

MeanStd mean_std(const std::vector<double>& v) {
  MeanStd out;
  if (v.empty()) return out;
  for (double x : v) out.mean += x;
  out.mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - out.mean) * (x - out.mean);
  out.std = std::sqrt(ss / static_cast<double>(v.size()));
  return out;
}

}  // namespace

std::vector<AggregateRow> aggregate_results(const std::vector<ExperimentResult>& rows) {
  // (dataset, method, variant, fold) -> run metrics
  std::map<std::tuple<std::string, std::string, int, int>, std::vector<std::pair<double, double>>>
      cells;
  for (const auto& r : rows)
    cells[{r.dataset, r.method, r.variant, r.fold}].emplace_back(r.auc, r.f1);

  std::map<std::tuple<std::string, std::string, int>, std::pair<std::vector<double>, std::vector<double>>>
      folds;
  std::map<std::tuple<std::string, std::string, int>, int> runs_per_fold;
  for (const auto& [cell, metrics] : cells) {
    double auc_sum = 0.0, f1_sum = 0.0;
    for (const auto& [a, f] : metrics) {
      auc_sum += a;
      f1_sum += f;
    }
    const auto variant_key =
        std::make_tuple(std::get<0>(cell), std::get<1>(cell), std::get<2>(cell));
    folds[variant_key].first.push_back(auc_sum / static_cast<double>(metrics.size()));
    folds[variant_key].second.push_back(f1_sum / static_cast<double>(metrics.size()));
    runs_per_fold[variant_key] = static_cast<int>(metrics.size());
  }

  std::vector<AggregateRow> out;
  for (const auto& [key, metric_lists] : folds) {
    AggregateRow row;
    row.dataset = std::get<0>(key);
    row.method = std::get<1>(key);
    row.variant = std::get<2>(key);
    const auto auc_ms = mean_std(metric_lists.first);
    const auto f1_ms = mean_std(metric_lists.second);
    row.auc_mean = auc_ms.mean;
    row.auc_std = auc_ms.std;
    row.f1_mean = f1_ms.mean;
    row.f1_std = f1_ms.std;
    row.folds = static_cast<int>(metric_lists.first.size());
    row.runs_per_fold = runs_per_fold[key];
    out.push_back(std::move(row));
  }

  // Definition-1 flip flag over the variants of each (dataset, method).
  std::map<std::pair<std::string, std::string>, bool> flip;
  for (const auto& r : out) {
    auto& f = flip[{r.dataset, r.method}];
    f = f || r.auc_mean < 0.5;
  }
  for (auto& r : out) r.flip = flip[{r.dataset, r.method}];

  std::sort(out.begin(), out.end(), [](const AggregateRow& a, const AggregateRow& b) {
    return std::tie(a.dataset, a.method, a.variant) < std::tie(b.dataset, b.method, b.variant);
  });
  return out;
}

std::vector<MethodSummary> summarize_methods(const std::vector<AggregateRow>& rows) {
  // Variant-averaged AUC per (dataset, method).
  std::map<std::pair<std::string, std::string>, std::vector<double>> per_dm;
  std::map<std::pair<std::string, std::string>, bool> dm_flip;
  for (const auto& r : rows) {
    per_dm[{r.dataset, r.method}].push_back(r.auc_mean);
    dm_flip[{r.dataset, r.method}] = r.flip;
  }
  std::map<std::string, std::map<std::string, double>> dataset_method_auc;
  for (const auto& [dm, aucs] : per_dm) {
    double s = 0.0;
    for (double a : aucs) s += a;
    dataset_method_auc[dm.first][dm.second] = s / static_cast<double>(aucs.size());
  }

  std::map<std::string, std::vector<double>> method_ranks;
  std::map<std::string, int> method_flips;
  for (const auto& [dataset, method_auc] : dataset_method_auc) {
    std::vector<std::pair<std::string, double>> ordered(method_auc.begin(), method_auc.end());
    std::sort(ordered.begin(), ordered.end(),
              [](const auto& a, const auto& b) { return a.second > b.second; });
    std::size_t i = 0;
    while (i < ordered.size()) {
      std::size_t j = i;
      while (j + 1 < ordered.size() && ordered[j + 1].second == ordered[i].second) ++j;
      const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
      for (std::size_t k = i; k <= j; ++k) method_ranks[ordered[k].first].push_back(rank);
      i = j + 1;
    }
    for (const auto& [method, _] : method_auc)
      if (dm_flip[{dataset, method}]) method_flips[method]++;
  }

  std::vector<MethodSummary> out;
  for (const auto& [method, ranks] : method_ranks) {
    MethodSummary s;
    s.method = method;
    const auto ms = mean_std(ranks);
    s.avg_rank = ms.mean;
    s.rank_std = ms.std;
    s.flip_count = method_flips.count(method) ? method_flips[method] : 0;
    out.push_back(std::move(s));
  }
  std::sort(out.begin(), out.end(),
            [](const MethodSummary& a, const MethodSummary& b) { return a.avg_rank < b.avg_rank; });
  return out;
}

namespace {

std::string fmt6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::string write_out(const std::string& contents, const std::filesystem::path& out_file) {
  if (out_file.has_parent_path()) std::filesystem::create_directories(out_file.parent_path());
  std::ofstream out(out_file, std::ios::binary);
  if (!out) throw DataError("cannot write report: " + out_file.string());
  out << contents;
  return contents;
}

}  // namespace

std::string emit_report_csv(const std::vector<AggregateRow>& rows,
                            const std::filesystem::path& out_file) {
  std::string csv = "dataset,method,variant,auc_mean,auc_std,f1_mean,f1_std,flip\n";
  for (const auto& r : rows) {
    csv += r.dataset + "," + r.method + "," + std::to_string(r.variant) + "," + fmt6(r.auc_mean) +
           "," + fmt6(r.auc_std) + "," + fmt6(r.f1_mean) + "," + fmt6(r.f1_std) + "," +
           (r.flip ? "1" : "0") + "\n";
  }
  return write_out(csv, out_file);
}

std::string emit_summary_csv(const std::vector<MethodSummary>& rows,
                             const std::filesystem::path& out_file) {
  std::string csv = "method,avg_rank,rank_std,datasets_with_flip\n";
  for (const auto& r : rows)
    csv += r.method + "," + fmt6(r.avg_rank) + "," + fmt6(r.rank_std) + "," +
           std::to_string(r.flip_count) + "\n";
  return write_out(csv, out_file);
}

}  // namespace graphad
