#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "tsimp/harness.hpp"
#include "tsimp/metrics.hpp"
#include "tsimp/missing.hpp"
#include "tsimp/rng.hpp"

using json = nlohmann::json;
using namespace tsimp;

namespace {

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  return out;
}

struct BenchArgs {
  std::string config_file;
  std::string manifest;
  std::string methods;
  std::string rates;
  std::string classifier;
  std::string profile;
  std::string seeds;
  std::string out = "";
  std::optional<std::uint64_t> seed;
  std::optional<int> folds;
  std::optional<int> t_period;
  std::optional<int> trees;
  std::optional<int> max_iter;
  std::optional<int> knn_k;
};

// Config file values fill whatever the flags left unset; flags win.
ExperimentConfig build_config(const BenchArgs& args) {
  json cfg = json::object();
  if (!args.config_file.empty()) {
    std::ifstream in(args.config_file);
    if (!in) throw MissingFile("cannot open config file: " + args.config_file);
    try {
      in >> cfg;
    } catch (const json::exception& e) {
      throw MalformedCsv("config file " + args.config_file + ": " + e.what());
    }
  }

  ExperimentConfig config;

  std::string manifest = args.manifest;
  if (manifest.empty() && cfg.contains("manifest"))
    manifest = cfg["manifest"].get<std::string>();
  if (manifest.empty())
    throw UsageError("bench requires --manifest (or 'manifest' in the config file)");
  config.manifest = manifest;

  std::vector<std::string> methods;
  if (!args.methods.empty())
    methods = split_list(args.methods);
  else if (cfg.contains("methods"))
    methods = cfg["methods"].get<std::vector<std::string>>();
  else
    methods = {"mice_rf", "mean", "locf", "linear", "knn"};
  config.methods.clear();
  for (const auto& m : methods) config.methods.push_back(parse_method(m));

  if (!args.rates.empty()) {
    config.missing_rates.clear();
    for (const auto& r : split_list(args.rates))
      config.missing_rates.push_back(std::stod(r));
  } else if (cfg.contains("missing_rates")) {
    config.missing_rates = cfg["missing_rates"].get<std::vector<double>>();
  }

  if (args.t_period)
    config.t_period = static_cast<std::size_t>(*args.t_period);
  else if (cfg.contains("t_period") && !cfg["t_period"].is_null())
    config.t_period = cfg["t_period"].get<std::size_t>();

  if (!args.classifier.empty())
    config.classifier = parse_classifier(args.classifier);
  else if (cfg.contains("classifier"))
    config.classifier = parse_classifier(cfg["classifier"].get<std::string>());

  if (args.folds)
    config.folds = *args.folds;
  else if (cfg.contains("folds"))
    config.folds = cfg["folds"].get<int>();

  if (!args.seeds.empty()) {
    config.seeds.clear();
    for (const auto& s : split_list(args.seeds))
      config.seeds.push_back(std::stoull(s));
  } else if (args.seed) {
    config.seeds = {*args.seed};
  } else if (cfg.contains("seeds")) {
    config.seeds = cfg["seeds"].get<std::vector<std::uint64_t>>();
  }

  if (!args.profile.empty())
    config.profile = parse_profile(args.profile);
  else if (cfg.contains("profile"))
    config.profile = parse_profile(cfg["profile"].get<std::string>());

  if (!args.out.empty())
    config.out_dir = args.out;
  else if (cfg.contains("out"))
    config.out_dir = cfg["out"].get<std::string>();

  if (args.trees)
    config.trees_override = *args.trees;
  else if (cfg.contains("trees"))
    config.trees_override = cfg["trees"].get<int>();

  if (args.max_iter)
    config.max_iter = *args.max_iter;
  else if (cfg.contains("max_iter"))
    config.max_iter = cfg["max_iter"].get<int>();

  if (args.knn_k)
    config.knn_k = static_cast<std::size_t>(*args.knn_k);
  else if (cfg.contains("knn_k"))
    config.knn_k = cfg["knn_k"].get<std::size_t>();

  return config;
}

int run_simulate(const std::string& manifest, double rate, std::uint64_t seed,
                 const std::string& out) {
  const Dataset dataset = load_dataset(manifest);
  Dataset masked_set;
  masked_set.name = dataset.name;
  masked_set.epoch_seconds = dataset.epoch_seconds;
  for (const TimeSeries& s : dataset.series) {
    MissingSpec spec;
    spec.rate = rate;
    spec.seed = derive_seed(seed, hash_str(s.id()),
                            static_cast<std::uint64_t>(llround(rate * 1000)));
    masked_set.series.push_back(simulate_mcar(s, spec).corrupted);
  }
  write_dataset(masked_set, out);
  std::cout << "wrote " << masked_set.size() << " masked series to " << out
            << "\n";
  return 0;
}

int run_impute(const std::string& manifest, const ImputationConfig& config,
               const std::string& truth_manifest, const std::string& out) {
  const Dataset dataset = load_dataset(manifest);
  Dataset imputed_set;
  imputed_set.name = dataset.name;
  imputed_set.epoch_seconds = dataset.epoch_seconds;
  for (const TimeSeries& s : dataset.series) {
    ImputationConfig ic = config;
    ic.seed = derive_seed(config.seed, hash_str(s.id()));
    ic.forest.seed = ic.seed;
    imputed_set.series.push_back(impute_series(s, ic).imputed);
  }
  write_dataset(imputed_set, out);
  std::cout << "wrote " << imputed_set.size() << " imputed series to " << out
            << "\n";

  if (!truth_manifest.empty()) {
    const Dataset truth = load_dataset(truth_manifest);
    if (truth.size() != dataset.size())
      throw DataError("truth dataset has a different number of series");
    double abs_sum = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
      const TimeSeries& holes = dataset.series[i];
      const TimeSeries& full = truth.series[i];
      const TimeSeries& imp = imputed_set.series[i];
      if (holes.length() != full.length() ||
          holes.channels() != full.channels())
        throw ShapeMismatch("truth series '" + full.id() +
                            "' does not match the masked series shape");
      for (std::size_t slot = 0; slot < holes.slot_count(); ++slot) {
        if (holes.observed_at_slot(slot) || !full.observed_at_slot(slot))
          continue;
        abs_sum += std::abs(imp.value_at_slot(slot) - full.value_at_slot(slot));
        ++count;
      }
    }
    if (count == 0) {
      std::cout << "MAE: no scorable positions\n";
    } else {
      std::cout << "MAE over " << count
                << " masked positions: " << format_float(abs_sum / count)
                << "\n";
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Time-series imputation benchmark: MICE with random forests "
               "plus classical baselines"};
  app.require_subcommand(1);

  // simulate
  auto* sim = app.add_subcommand("simulate",
                                 "Hide a fraction of a complete dataset");
  std::string sim_manifest, sim_out = "masked";
  double sim_rate = 0.1;
  std::uint64_t sim_seed = 0;
  sim->add_option("--manifest", sim_manifest)->required();
  sim->add_option("--rate", sim_rate);
  sim->add_option("--seed", sim_seed);
  sim->add_option("--out", sim_out);

  // impute
  auto* imp = app.add_subcommand("impute", "Impute a dataset with holes");
  std::string imp_manifest, imp_truth, imp_out = "imputed";
  std::string imp_method = "mice_rf", imp_profile;
  std::uint64_t imp_seed = 0;
  std::optional<int> imp_period, imp_trees, imp_max_iter, imp_knn_k;
  imp->add_option("--manifest", imp_manifest)->required();
  imp->add_option("--method", imp_method);
  imp->add_option("--t-period", imp_period);
  imp->add_option("--seed", imp_seed);
  imp->add_option("--trees", imp_trees);
  imp->add_option("--max-iter", imp_max_iter);
  imp->add_option("--knn-k", imp_knn_k);
  imp->add_option("--profile", imp_profile);
  imp->add_option("--truth", imp_truth,
                  "complete dataset manifest for MAE scoring");
  imp->add_option("--out", imp_out);

  // bench
  auto* bench = app.add_subcommand("bench", "Full method x rate x seed sweep");
  BenchArgs bench_args;
  bench->add_option("--config", bench_args.config_file, "JSON config file");
  bench->add_option("--manifest", bench_args.manifest);
  bench->add_option("--method", bench_args.methods, "comma-separated methods");
  bench->add_option("--rates", bench_args.rates, "comma-separated rates");
  bench->add_option("--t-period", bench_args.t_period);
  bench->add_option("--seed", bench_args.seed);
  bench->add_option("--seeds", bench_args.seeds, "comma-separated seeds");
  bench->add_option("--folds", bench_args.folds);
  bench->add_option("--classifier", bench_args.classifier);
  bench->add_option("--trees", bench_args.trees);
  bench->add_option("--max-iter", bench_args.max_iter);
  bench->add_option("--knn-k", bench_args.knn_k);
  bench->add_option("--profile", bench_args.profile)
      ->check(CLI::IsMember({"paper", "desk"}));
  bench->add_option("--out", bench_args.out);

  // report
  auto* rep = app.add_subcommand("report", "Rebuild summary.md from results.csv");
  std::string rep_results, rep_out = ".";
  rep->add_option("--results", rep_results)->required();
  rep->add_option("--out", rep_out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 1;
  }

  try {
    if (sim->parsed()) return run_simulate(sim_manifest, sim_rate, sim_seed, sim_out);

    if (imp->parsed()) {
      ImputationConfig ic;
      ic.method = parse_method(imp_method);
      if (imp_period) ic.t_period = static_cast<std::size_t>(*imp_period);
      if (imp_max_iter) ic.max_iter = *imp_max_iter;
      if (imp_knn_k) ic.knn_k = static_cast<std::size_t>(*imp_knn_k);
      ic.seed = imp_seed;
      ic.forest.n_trees = imp_trees
                              ? *imp_trees
                              : profile_trees(imp_profile.empty()
                                                  ? ForestProfile::Paper
                                                  : parse_profile(imp_profile));
      return run_impute(imp_manifest, ic, imp_truth, imp_out);
    }

    if (bench->parsed()) {
      const ExperimentConfig config = build_config(bench_args);
      const auto records = run_experiment(config);
      emit_results(records, config.out_dir);
      emit_plot_data(records, config.out_dir);
      std::cout << "wrote " << records.size() << " records to "
                << config.out_dir.string() << "\n";
      return 0;
    }

    if (rep->parsed()) {
      const auto records = read_results_csv(rep_results);
      emit_results(records, rep_out);
      std::cout << "wrote summary to " << rep_out << "\n";
      return 0;
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
