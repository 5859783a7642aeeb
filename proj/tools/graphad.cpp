#include <CLI11.hpp>
#include <iostream>

#include "graphad/checkpoint.hpp"
#include "graphad/harness.hpp"
#include "graphad/tu_loader.hpp"
#include "graphad/verification.hpp"

namespace {

using namespace graphad;

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto comma = s.find(',', start);
    const auto end = comma == std::string::npos ? s.size() : comma;
    if (end > start) out.push_back(s.substr(start, end - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

int cmd_prepare(const std::string& root, const std::string& name, const std::string& synth) {
  Dataset ds = load_tu_dataset(root, name);
  std::optional<AttrSynthesis> mode;
  if (synth == "one_hot_degree") mode = AttrSynthesis::OneHotDegree;
  else if (synth == "constant_one") mode = AttrSynthesis::ConstantOne;
  else if (synth == "auto") mode = tu_default_synthesis(name);
  else if (!synth.empty() && synth != "none")
    throw ConfigError("unknown --synth mode '" + synth + "'");
  if (mode) ds = synthesize_attrs(ds, *mode);

  std::cout << "dataset " << ds.name << ": " << ds.graphs.size() << " graphs, attr_dim "
            << ds.attr_dim << "\n";
  const auto counts = ds.class_counts();
  for (std::size_t c = 0; c < ds.class_ids.size(); ++c) {
    double nodes = 0, edges = 0;
    for (const auto& g : ds.graphs)
      if (g.label == ds.class_ids[c]) {
        nodes += g.num_nodes;
        edges += static_cast<double>(g.edges.size());
      }
    std::cout << "  class " << ds.class_ids[c] << ": " << counts[c] << " graphs, avg nodes "
              << nodes / counts[c] << ", avg edges " << edges / counts[c] << "\n";
  }
  const auto issues = check_against_reference(ds);
  if (!issues.empty()) {
    std::cout << "reference statistics mismatches:\n";
    for (const auto& i : issues) std::cout << "  " << i << "\n";
    throw DataError("dataset '" + name + "' does not match the published statistics");
  }
  if (tu_reference_stats(name)) std::cout << "matches published statistics\n";
  return 0;
}

int cmd_run(const std::string& config_file, const std::string& store_file,
            const std::string& methods, const std::string& datasets, bool resume, int jobs) {
  RunConfig cfg = RunConfig::from_file(config_file);
  if (!methods.empty()) cfg.methods = split_list(methods);
  if (!datasets.empty()) cfg.datasets = split_list(datasets);
  if (jobs > 0) cfg.jobs = jobs;
  cfg.validate();
  ResultsStore store(store_file.empty() ? "results.jsonl" : store_file);
  const RunStats stats = run_benchmark(cfg, store, resume);
  std::cout << "cells total " << stats.total_cells << ", computed " << stats.computed
            << ", skipped " << stats.skipped << "\n";
  for (const auto& s : summarize_methods(aggregate_results(store.rows())))
    std::cout << "  " << s.method << ": avg rank " << s.avg_rank << " (+-" << s.rank_std
              << "), flips on " << s.flip_count << " dataset(s)\n";
  return 0;
}

int cmd_ablation(const std::string& config_file, const std::string& mode,
                 const std::string& store_file, const std::string& out_dir, bool resume) {
  RunConfig cfg = RunConfig::from_file(config_file);
  AblationMode m;
  if (mode == "pooling") m = AblationMode::Pooling;
  else if (mode == "norm_pool") m = AblationMode::NormPool;
  else throw ConfigError("--mode must be pooling or norm_pool");
  ResultsStore store(store_file.empty() ? "ablation_results.jsonl" : store_file);
  const auto out = run_ablation(cfg, m, store, out_dir.empty() ? "ablation_out" : out_dir, resume);
  std::cout << out.table_csv;
  if (!out.scatter_csv.empty())
    std::cout << "scatter data written (x = MP+BN, y = AP+GN)\n";
  return 0;
}

int cmd_report(const std::string& store_file, const std::string& out_dir) {
  ResultsStore store(store_file);
  if (store.rows().empty()) std::cout << "store is empty; emitting header-only report\n";
  const auto rows = aggregate_results(store.rows());
  const auto csv = emit_report_csv(rows, std::filesystem::path(out_dir) / "report.csv");
  emit_summary_csv(summarize_methods(rows), std::filesystem::path(out_dir) / "summary.csv");
  std::cout << csv;
  return 0;
}

int cmd_verify(const std::string& record_file) {
  const auto outcome = run_verification(std::cout, record_file);
  return outcome.all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"graph-level anomaly detection benchmark"};
  app.require_subcommand(1);

  std::string root = "data", dataset, synth = "auto";
  auto* prepare = app.add_subcommand("prepare", "load and validate a TU-format dataset");
  prepare->add_option("--root", root, "dataset root directory");
  prepare->add_option("--dataset", dataset, "dataset name")->required();
  prepare->add_option("--synth", synth, "attribute synthesis: auto|none|one_hot_degree|constant_one");

  std::string config_file, store_file, methods, datasets, out_dir, mode, record_file = "verify_report.json";
  bool resume = false;
  int jobs = 0;
  auto* run = app.add_subcommand("run", "run the benchmark protocol");
  run->add_option("--config", config_file, "JSON config file")->required();
  run->add_option("--store", store_file, "results store (JSONL)");
  run->add_option("--methods", methods, "comma-separated method override");
  run->add_option("--datasets", datasets, "comma-separated dataset override");
  run->add_option("--jobs", jobs, "worker threads");
  run->add_flag("--resume", resume, "skip cells already in the store");

  auto* ablation = app.add_subcommand("ablation", "design-choice studies");
  ablation->add_option("--config", config_file, "JSON config file")->required();
  ablation->add_option("--mode", mode, "pooling | norm_pool")->required();
  ablation->add_option("--store", store_file, "results store (JSONL)");
  ablation->add_option("--out", out_dir, "output directory");
  ablation->add_flag("--resume", resume, "skip cells already in the store");

  auto* report = app.add_subcommand("report", "aggregate a results store into CSV tables");
  report->add_option("--store", store_file, "results store (JSONL)")->required();
  report->add_option("--out", out_dir, "output directory")->required();

  auto* verify = app.add_subcommand("verify", "run the executable theory checks");
  verify->add_option("--record", record_file, "machine-readable report file");

  CLI11_PARSE(app, argc, argv);

  try {
    if (prepare->parsed()) return cmd_prepare(root, dataset, synth);
    if (run->parsed()) return cmd_run(config_file, store_file, methods, datasets, resume, jobs);
    if (ablation->parsed()) return cmd_ablation(config_file, mode, store_file, out_dir, resume);
    if (report->parsed()) return cmd_report(store_file, out_dir);
    if (verify->parsed()) return cmd_verify(record_file);
  } catch (const graphad::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const graphad::NumericError& e) {
    std::cerr << "numerical abort: " << e.what() << "\n";
    return 4;
  } catch (const graphad::Error& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
