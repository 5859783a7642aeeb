#include "graphad/harness.hpp"

#include <atomic>
#include <chrono>
#include <fstream>
#include <thread>

#include "graphad/fixtures.hpp"
#include "graphad/metrics.hpp"
#include "graphad/ocpool.hpp"
#include "graphad/tu_loader.hpp"

namespace graphad {

RunConfig RunConfig::from_json(const Json& j) {
  RunConfig c;
  c.data_root = j.value("data_root", c.data_root);
  if (j.contains("datasets")) c.datasets = j.at("datasets").get<std::vector<std::string>>();
  if (j.contains("methods")) c.methods = j.at("methods").get<std::vector<std::string>>();
  c.base_seed = j.value("base_seed", c.base_seed);
  c.folds = j.value("folds", c.folds);
  c.runs = j.value("runs", c.runs);
  if (j.contains("normal_classes"))
    c.normal_classes = j.at("normal_classes").get<std::vector<int>>();
  c.jobs = j.value("jobs", c.jobs);
  if (j.contains("model")) c.model = model_config_from_json(j.at("model"));
  if (j.contains("train")) c.train = train_config_from_json(j.at("train"));
  if (j.contains("ocpool")) {
    const auto& o = j.at("ocpool");
    if (o.contains("pool")) c.ocpool.pool = pool_kind_from_name(o.at("pool").get<std::string>());
    c.ocpool.nu = o.value("nu", c.ocpool.nu);
    c.ocpool.kernel_bandwidth = o.value("kernel_bandwidth", c.ocpool.kernel_bandwidth);
  }
  c.validate();
  return c;
}

RunConfig RunConfig::from_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot read config file: " + file.string());
  Json j;
  try {
    in >> j;
  } catch (const Json::exception& e) {
    throw ConfigError("config parse error in " + file.string() + ": " + e.what());
  }
  return from_json(j);
}

Json RunConfig::to_json() const {
  Json o{{"data_root", data_root},
         {"datasets", datasets},
         {"methods", methods},
         {"base_seed", base_seed},
         {"folds", folds},
         {"runs", runs},
         {"normal_classes", normal_classes},
         {"jobs", jobs},
         {"model", graphad::to_json(model)},
         {"train", graphad::to_json(train)}};
  o["ocpool"] = Json{{"pool", pool_kind_name(ocpool.pool)},
                     {"nu", ocpool.nu},
                     {"kernel_bandwidth", ocpool.kernel_bandwidth}};
  return o;
}

std::string RunConfig::config_hash() const {
  Json j{{"model", graphad::to_json(model)},
         {"train", graphad::to_json(train)},
         {"ocpool", Json{{"pool", pool_kind_name(ocpool.pool)},
                         {"nu", ocpool.nu},
                         {"kernel_bandwidth", ocpool.kernel_bandwidth}}},
         {"base_seed", base_seed}};
  return fnv1a_hex(j.dump());
}

void RunConfig::validate() const {
  if (datasets.empty()) throw ConfigError("config lists no datasets");
  if (methods.empty()) throw ConfigError("config lists no methods");
  for (const auto& m : methods)
    if (m != "OCPool") model_kind_from_name(m);  // throws on unknown names
  if (folds < 1 || folds > kFoldCount)
    throw ConfigError("folds must lie in [1, " + std::to_string(kFoldCount) + "]");
  if (runs < 1) throw ConfigError("runs must be >= 1");
  if (jobs < 1) throw ConfigError("jobs must be >= 1");
  model.validate();
  train.validate();
  ocpool.validate();
}

Dataset load_dataset_for_run(const RunConfig& cfg, const std::string& name) {
  if (name == "fixture") return make_fixture_dataset();
  Dataset ds = load_tu_dataset(cfg.data_root, name);
  if (const auto synth = tu_default_synthesis(name)) ds = synthesize_attrs(ds, *synth);
  if (ds.attr_dim == 0)
    throw DataError("dataset '" + name + "' has no node attributes; synthesis required");
  return ds;
}

namespace {

std::string digest_scores(const ColVec<double>& scores) {
  std::string bytes(reinterpret_cast<const char*>(scores.data()),
                    sizeof(double) * static_cast<std::size_t>(scores.size()));
  return fnv1a_hex(bytes);
}

struct Cell {
  std::size_t variant_index;
  std::string method;
  int variant;
  int fold;
  int run;
};

}  // namespace

ExperimentResult run_cell(const RunConfig& cfg, const Dataset& ds, const std::string& method,
                          const VariantSplit& split, int run) {
  const auto t0 = std::chrono::steady_clock::now();
  validate_split(split, ds);
  const auto train_graphs = select_graphs(ds, split.train_idx);
  const auto val_graphs = select_graphs(ds, split.val_idx);
  const auto test_graphs = select_graphs(ds, split.test_idx);

  ExperimentResult r;
  r.dataset = ds.name;
  r.method = method;
  r.variant = split.normal_class;
  r.fold = split.fold;
  r.run = run;
  r.seed = cell_seed(cfg.base_seed, split.fold, run);
  r.config_hash = cfg.config_hash();

  ColVec<double> scores;
  if (method == "OCPool" || method.rfind("OCPool[", 0) == 0) {
    OcPoolConfig pool_cfg = cfg.ocpool;
    if (method.rfind("OCPool[", 0) == 0)
      pool_cfg.pool = pool_kind_from_name(method.substr(7, method.size() - 8));
    std::vector<Graph> fit_set = train_graphs;
    fit_set.insert(fit_set.end(), val_graphs.begin(), val_graphs.end());
    scores = ocsvm_fit_score(pool_features(std::span<const Graph>(fit_set), pool_cfg.pool),
                             pool_features(std::span<const Graph>(test_graphs), pool_cfg.pool),
                             pool_cfg);
    r.extra["pool"] = pool_kind_name(pool_cfg.pool);
  } else {
    std::string base = method;
    if (const auto bracket = method.find('['); bracket != std::string::npos)
      base = method.substr(0, bracket);
    const ModelKind kind = model_kind_from_name(base);
    auto model = make_model(kind, cfg.model, ds.attr_dim, r.seed);
    TrainConfig tc = cfg.train;
    tc.seed = r.seed;
    const TrainHistory hist = train(*model, train_graphs, val_graphs, tc);
    scores = model->score(std::span<const Graph>(test_graphs));
    r.extra["best_epoch"] = hist.best_epoch;
    r.extra["epochs_run"] = hist.epochs_run;
    r.extra["best_val_loss"] = hist.best_val_loss;
    if (kind == ModelKind::OCGTL || kind == ModelKind::GTL) {
      // Mean transformation-learning loss on the training set, against the
      // constant-extractor bound K log K (the trained-model certificate).
      auto* ocgtl = dynamic_cast<OcgtlModel*>(model.get());
      const auto parts = ocgtl->score_parts(std::span<const Graph>(train_graphs));
      r.extra["train_gtl_mean"] = parts.gtl->mean();
      r.extra["gtl_bound"] =
          cfg.model.num_views * std::log(static_cast<double>(cfg.model.num_views));
    }
  }

  std::vector<double> score_vec(scores.data(), scores.data() + scores.size());
  r.auc = auc(score_vec, split.test_labels);
  r.f1 = f1_at_contamination(score_vec, split.test_labels);
  r.score_digest = digest_scores(scores);
  r.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

RunStats run_benchmark(const RunConfig& cfg, ResultsStore& store, bool resume) {
  cfg.validate();

  // Everything is loaded and checked before any training starts.
  std::vector<Dataset> datasets;
  datasets.reserve(cfg.datasets.size());
  for (const auto& name : cfg.datasets) datasets.push_back(load_dataset_for_run(cfg, name));

  struct VariantFolds {
    std::size_t dataset_index;
    std::vector<VariantSplit> folds;
  };
  std::vector<VariantFolds> variants;
  std::vector<Cell> cells;
  for (std::size_t d = 0; d < datasets.size(); ++d) {
    std::vector<int> normals = cfg.normal_classes.empty() ? datasets[d].class_ids
                                                          : cfg.normal_classes;
    for (int normal : normals) {
      VariantFolds vf;
      vf.dataset_index = d;
      vf.folds = make_variant_splits(datasets[d], normal, cfg.base_seed);
      const std::size_t variant_index = variants.size();
      variants.push_back(std::move(vf));
      for (const auto& method : cfg.methods)
        for (int fold = 0; fold < cfg.folds; ++fold)
          for (int run = 0; run < cfg.runs; ++run)
            cells.push_back(Cell{variant_index, method, normal, fold, run});
    }
  }

  RunStats stats;
  stats.total_cells = static_cast<int>(cells.size());
  std::atomic<std::size_t> next{0};
  std::atomic<int> computed{0}, skipped{0};
  std::exception_ptr first_error;
  std::mutex error_mu;

  const auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cells.size()) return;
      if (first_error) return;
      try {
        const Cell& cell = cells[i];
        const auto& vf = variants[cell.variant_index];
        const Dataset& ds = datasets[vf.dataset_index];
        ExperimentResult probe;
        probe.dataset = ds.name;
        probe.method = cell.method;
        probe.variant = cell.variant;
        probe.fold = cell.fold;
        probe.run = cell.run;
        probe.config_hash = cfg.config_hash();
        if (resume && store.contains(probe.key())) {
          skipped.fetch_add(1);
          continue;
        }
        store.append(run_cell(cfg, ds, cell.method, vf.folds[static_cast<std::size_t>(cell.fold)],
                              cell.run));
        computed.fetch_add(1);
      } catch (...) {
        std::lock_guard lock(error_mu);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  const int jobs = std::min<int>(cfg.jobs, static_cast<int>(cells.size()));
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(jobs));
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  stats.computed = computed.load();
  stats.skipped = skipped.load();
  return stats;
}

RunConfig with_design_choice(RunConfig cfg, PoolKind pool, NormKind norm) {
  cfg.model.gin.readout_pool = pool;
  cfg.model.gin.norm = norm;
  return cfg;
}

namespace {

std::string fmt6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

double variant_averaged_auc(const std::vector<AggregateRow>& rows, const std::string& dataset,
                            const std::string& method) {
  double sum = 0.0;
  int count = 0;
  for (const auto& r : rows) {
    if (r.dataset == dataset && r.method == method) {
      sum += r.auc_mean;
      ++count;
    }
  }
  return count ? sum / count : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

AblationOutput run_ablation(const RunConfig& cfg, AblationMode mode, ResultsStore& store,
                            const std::filesystem::path& out_dir, bool resume) {
  std::filesystem::create_directories(out_dir);
  AblationOutput out;

  if (mode == AblationMode::Pooling) {
    RunConfig pooled = cfg;
    pooled.methods = {"OCPool[add]", "OCPool[mean]", "OCPool[max]"};
    out.stats = run_benchmark(pooled, store, resume);
    const auto rows = aggregate_results(store.rows());
    std::string csv = "dataset,auc_add,auc_mean_pool,auc_max_pool\n";
    for (const auto& name : cfg.datasets) {
      csv += name + "," + fmt6(variant_averaged_auc(rows, name, "OCPool[add]")) + "," +
             fmt6(variant_averaged_auc(rows, name, "OCPool[mean]")) + "," +
             fmt6(variant_averaged_auc(rows, name, "OCPool[max]")) + "\n";
    }
    out.table_csv = csv;
    std::ofstream(out_dir / "pooling_ablation.csv") << csv;
    return out;
  }

  // norm_pool: every deep method under AP+GN and MP+BN.
  std::vector<std::string> deep;
  for (const auto& m : cfg.methods)
    if (m != "OCPool") deep.push_back(m);
  if (deep.empty()) throw ConfigError("norm_pool ablation needs at least one deep method");

  RunConfig apgn = with_design_choice(cfg, PoolKind::Add, NormKind::GraphNorm);
  RunConfig mpbn = with_design_choice(cfg, PoolKind::Mean, NormKind::BatchNorm);
  apgn.methods.clear();
  mpbn.methods.clear();
  for (const auto& m : deep) {
    apgn.methods.push_back(m + "[AP+GN]");
    mpbn.methods.push_back(m + "[MP+BN]");
  }
  out.stats = run_benchmark(apgn, store, resume);
  const RunStats s2 = run_benchmark(mpbn, store, resume);
  out.stats.total_cells += s2.total_cells;
  out.stats.computed += s2.computed;
  out.stats.skipped += s2.skipped;

  const auto rows = aggregate_results(store.rows());
  std::string table = "dataset,method,auc_apgn,auc_mpbn\n";
  std::string scatter = "dataset,method,x_mpbn,y_apgn\n";
  for (const auto& name : cfg.datasets) {
    for (const auto& m : deep) {
      const double a = variant_averaged_auc(rows, name, m + "[AP+GN]");
      const double b = variant_averaged_auc(rows, name, m + "[MP+BN]");
      table += name + "," + m + "," + fmt6(a) + "," + fmt6(b) + "\n";
      scatter += name + "," + m + "," + fmt6(b) + "," + fmt6(a) + "\n";
    }
  }
  out.table_csv = table;
  out.scatter_csv = scatter;
  std::ofstream(out_dir / "norm_pool_ablation.csv") << table;
  std::ofstream(out_dir / "norm_pool_scatter.csv") << scatter;
  return out;
}

}  // namespace graphad
