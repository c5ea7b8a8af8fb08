#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tsimp/classifiers.hpp"
#include "tsimp/imputers.hpp"
#include "tsimp/series.hpp"

namespace tsimp {

enum class ForestProfile { Paper, Desk };

ForestProfile parse_profile(const std::string& name);
int profile_trees(ForestProfile profile);  // paper: 100, desk: 25

struct ExperimentConfig {
  std::filesystem::path manifest;
  std::vector<ImputeMethod> methods;
  std::vector<double> missing_rates = {0.1, 0.2, 0.3, 0.4,
                                       0.5, 0.6, 0.7, 0.8};
  std::optional<std::size_t> t_period;
  ClassifierKind classifier = ClassifierKind::LogReg;
  int folds = 5;
  std::vector<std::uint64_t> seeds = {0};
  ForestProfile profile = ForestProfile::Paper;
  std::filesystem::path out_dir = ".";
  int max_iter = 5;
  std::size_t knn_k = 5;
  std::optional<int> trees_override;
  bool pooled_mae = true;  // false: mean of per-series MAEs
};

struct ExperimentRecord {
  std::string dataset;
  std::string method;  // "none" for the full-data baseline row
  std::string classifier;
  double missing_rate = 0.0;
  std::uint64_t seed = 0;
  std::optional<std::size_t> t_period;
  std::optional<double> mae;
  double f1 = 0.0;
  double auc = 0.0;
  double mcc = 0.0;
  double wall_time_seconds = 0.0;
};

/// Manifest: UTF-8 CSV `series_id,path,label`; series files: CSV with header
/// `timestamp,value` or `timestamp,value_1,...,value_d`, empty fields parse
/// as missing. Paths resolve relative to the manifest directory.
Dataset load_dataset(const std::filesystem::path& manifest_path);

/// Baseline record on the untouched dataset, then one record per
/// (seed, rate, method) in that order.
std::vector<ExperimentRecord> run_experiment(const ExperimentConfig& config,
                                             const Dataset& dataset);
std::vector<ExperimentRecord> run_experiment(const ExperimentConfig& config);

/// results.csv (fixed header, 6-significant-digit floats) and a summary.md
/// marking the best method per rate for each metric.
void emit_results(const std::vector<ExperimentRecord>& records,
                  const std::filesystem::path& out_dir);

/// mae_curve.csv: per (method, rate), MAE mean and population std over seeds.
void emit_plot_data(const std::vector<ExperimentRecord>& records,
                    const std::filesystem::path& out_dir);

std::vector<ExperimentRecord> read_results_csv(
    const std::filesystem::path& path);

void write_dataset(const Dataset& dataset,
                   const std::filesystem::path& out_dir);

std::string format_float(double v);  // 6 significant digits

}  // namespace tsimp
