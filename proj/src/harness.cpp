#include "tsimp/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "tsimp/metrics.hpp"
#include "tsimp/missing.hpp"
#include "tsimp/rng.hpp"

namespace tsimp {

namespace fs = std::filesystem;

ForestProfile parse_profile(const std::string& name) {
  if (name == "paper") return ForestProfile::Paper;
  if (name == "desk") return ForestProfile::Desk;
  throw UsageError("unknown profile '" + name + "'; valid profiles: paper, desk");
}

int profile_trees(ForestProfile profile) {
  return profile == ForestProfile::Paper ? 100 : 25;
}

std::string format_float(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

std::vector<std::string> read_lines(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingFile("cannot open file: " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

double parse_double(const std::string& s, const fs::path& file,
                    std::size_t row, std::size_t col) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw MalformedCsv(file.string() + ": row " + std::to_string(row) +
                       ", column " + std::to_string(col) +
                       ": cannot parse '" + s + "' as a number");
  }
}

TimeSeries load_series_file(const fs::path& path, const std::string& id,
                            int label) {
  const auto lines = read_lines(path);
  if (lines.size() < 2)
    throw MalformedCsv(path.string() + ": expected a header and data rows");
  const auto header = split_csv_line(lines[0]);
  if (header.size() < 2 || header[0] != "timestamp")
    throw MalformedCsv(path.string() +
                       ": header must be 'timestamp,value' or "
                       "'timestamp,value_1,...,value_d'");
  const std::size_t channels = header.size() - 1;
  const std::size_t length = lines.size() - 1;

  TimeSeries series(id, length, channels, label);
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const auto fields = split_csv_line(lines[r]);
    if (fields.size() != channels + 1)
      throw MalformedCsv(path.string() + ": row " + std::to_string(r + 1) +
                         ": expected " + std::to_string(channels + 1) +
                         " fields, got " + std::to_string(fields.size()));
    for (std::size_t c = 0; c < channels; ++c) {
      const std::string& field = fields[c + 1];
      if (field.empty()) {
        series.set_missing(r - 1, c);
        continue;
      }
      const double v = parse_double(field, path, r + 1, c + 2);
      if (!std::isfinite(v))
        throw NonFiniteValue(path.string() + ": row " + std::to_string(r + 1) +
                             ": non-finite value '" + field + "'");
      series.set(r - 1, c, v);
    }
  }
  return series;
}

std::uint64_t rate_key(double rate) {
  return static_cast<std::uint64_t>(std::llround(rate * 1000.0));
}

}  // namespace

Dataset load_dataset(const fs::path& manifest_path) {
  const auto lines = read_lines(manifest_path);
  if (lines.empty() || split_csv_line(lines[0]) !=
                           std::vector<std::string>{"series_id", "path", "label"})
    throw MalformedCsv(manifest_path.string() +
                       ": manifest header must be 'series_id,path,label'");

  Dataset dataset;
  dataset.name = manifest_path.stem().string();
  if (dataset.name == "manifest" && manifest_path.has_parent_path())
    dataset.name = manifest_path.parent_path().filename().string();

  const fs::path base = manifest_path.parent_path();
  std::optional<std::size_t> channels;
  for (std::size_t r = 1; r < lines.size(); ++r) {
    if (lines[r].empty()) continue;
    const auto fields = split_csv_line(lines[r]);
    if (fields.size() != 3)
      throw MalformedCsv(manifest_path.string() + ": row " +
                         std::to_string(r + 1) + ": expected 3 fields");
    int label = 0;
    try {
      label = std::stoi(fields[2]);
    } catch (const std::exception&) {
      throw MalformedCsv(manifest_path.string() + ": row " +
                         std::to_string(r + 1) + ": bad label '" + fields[2] +
                         "'");
    }
    fs::path file = fields[1];
    if (file.is_relative()) file = base / file;
    auto series = load_series_file(file, fields[0], label);
    if (channels && series.channels() != *channels)
      throw InconsistentChannelCount(
          file.string() + ": has " + std::to_string(series.channels()) +
          " channels; earlier series have " + std::to_string(*channels));
    channels = series.channels();
    dataset.series.push_back(std::move(series));
  }
  return dataset;
}

namespace {

ImputationConfig make_impute_config(const ExperimentConfig& config,
                                    ImputeMethod method,
                                    std::uint64_t series_seed) {
  ImputationConfig ic;
  ic.method = method;
  ic.t_period = config.t_period;
  ic.max_iter = config.max_iter;
  ic.knn_k = config.knn_k;
  ic.seed = series_seed;
  ic.forest.n_trees =
      config.trees_override.value_or(profile_trees(config.profile));
  ic.forest.seed = series_seed;
  return ic;
}

MetricBundle classify(const std::vector<FeatureVector>& features,
                      const ExperimentConfig& config, std::uint64_t seed) {
  CrossValidateOptions options;
  options.folds = config.folds;
  options.seed = seed;
  options.knn_k = config.knn_k;
  return cross_validate(features, config.classifier, options);
}

ExperimentRecord sweep_record(const ExperimentConfig& config,
                              const Dataset& dataset, std::uint64_t seed,
                              double rate, ImputeMethod method) {
  const auto start = std::chrono::steady_clock::now();

  double abs_error_sum = 0.0;
  std::size_t masked_total = 0;
  double per_series_mae_sum = 0.0;
  std::size_t scored_series = 0;
  std::vector<FeatureVector> features;

  const std::uint64_t method_key = hash_str(method_name(method));
  for (const TimeSeries& series : dataset.series) {
    const std::uint64_t id_key = hash_str(series.id());
    try {
      MissingSpec mspec;
      mspec.rate = rate;
      mspec.seed = derive_seed(seed, id_key, rate_key(rate));
      const MaskedSeries masked = simulate_mcar(series, mspec);

      const auto ic = make_impute_config(
          config, method, derive_seed(seed, id_key, rate_key(rate), method_key));
      ImputationResult result = impute_series(masked.corrupted, ic);

      for (std::size_t slot : masked.sim_mask)
        abs_error_sum += std::abs(result.imputed.value_at_slot(slot) -
                                  masked.ground_truth.value_at_slot(slot));
      masked_total += masked.sim_mask.size();
      if (!masked.sim_mask.empty()) {
        per_series_mae_sum +=
            mae(masked.ground_truth, result.imputed, masked.sim_mask);
        ++scored_series;
      }
      features.push_back(extract_features(result.imputed));
    } catch (const DataError& e) {
      throw DataError("series '" + series.id() + "', rate " +
                      format_float(rate) + ", method " + method_name(method) +
                      ": " + e.what());
    }
  }

  ExperimentRecord record;
  record.dataset = dataset.name;
  record.method = method_name(method);
  record.classifier = classifier_name(config.classifier);
  record.missing_rate = rate;
  record.seed = seed;
  if ((method == ImputeMethod::MiceRf || method == ImputeMethod::Knn) &&
      dataset.series.front().channels() == 1)
    record.t_period = config.t_period;
  if (masked_total > 0) {
    record.mae = config.pooled_mae
                     ? abs_error_sum / static_cast<double>(masked_total)
                     : per_series_mae_sum / static_cast<double>(scored_series);
  }
  const MetricBundle bundle = classify(features, config, seed);
  record.f1 = bundle.f1;
  record.auc = bundle.auc;
  record.mcc = bundle.mcc;
  record.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return record;
}

}  // namespace

std::vector<ExperimentRecord> run_experiment(const ExperimentConfig& config,
                                             const Dataset& dataset) {
  if (dataset.size() < 2)
    throw DataError("dataset needs at least 2 series for classification");
  for (const TimeSeries& s : dataset.series)
    if (!s.is_complete())
      throw PreexistingMissing("series '" + s.id() +
                               "' has native missing values; simulation runs "
                               "require complete input");
  for (std::size_t i = 1; i < config.missing_rates.size(); ++i)
    if (config.missing_rates[i] <= config.missing_rates[i - 1])
      throw UsageError("missing rates must be strictly increasing");
  for (double r : config.missing_rates)
    if (!(r > 0.0 && r <= 0.95))
      throw UsageError("missing rates must lie in (0, 0.95]");
  if (config.methods.empty()) throw UsageError("no imputation methods given");

  std::vector<ExperimentRecord> records;

  {  // Full-data baseline: classify the untouched dataset.
    const auto start = std::chrono::steady_clock::now();
    std::vector<FeatureVector> features;
    for (const TimeSeries& s : dataset.series)
      features.push_back(extract_features(s));
    const MetricBundle bundle =
        classify(features, config, config.seeds.front());
    ExperimentRecord baseline;
    baseline.dataset = dataset.name;
    baseline.method = "none";
    baseline.classifier = classifier_name(config.classifier);
    baseline.missing_rate = 0.0;
    baseline.seed = config.seeds.front();
    baseline.f1 = bundle.f1;
    baseline.auc = bundle.auc;
    baseline.mcc = bundle.mcc;
    baseline.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    records.push_back(baseline);
  }

  struct Task {
    std::uint64_t seed;
    double rate;
    ImputeMethod method;
  };
  std::vector<Task> tasks;
  for (std::uint64_t seed : config.seeds)
    for (double rate : config.missing_rates)
      for (ImputeMethod method : config.methods)
        tasks.push_back({seed, rate, method});

  // Work items are independent; slots keep the (seed, rate, method) order
  // no matter which thread finishes first.
  std::vector<ExperimentRecord> sweep(tasks.size());
  std::vector<std::string> errors(tasks.size());
  std::atomic<std::size_t> next{0};
  const std::size_t n_threads = std::max<std::size_t>(
      1, std::min<std::size_t>(std::thread::hardware_concurrency(),
                               tasks.size()));
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      try {
        sweep[i] = sweep_record(config, dataset, tasks[i].seed, tasks[i].rate,
                                tasks[i].method);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (const std::string& e : errors)
    if (!e.empty()) throw DataError(e);

  records.insert(records.end(), sweep.begin(), sweep.end());
  return records;
}

std::vector<ExperimentRecord> run_experiment(const ExperimentConfig& config) {
  return run_experiment(config, load_dataset(config.manifest));
}

namespace {

const char* kResultsHeader =
    "dataset,method,classifier,missing_rate,seed,t_period,mae,f1,auc,mcc,"
    "wall_time_seconds";

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);  // LF line endings everywhere
  if (!out) throw IoError("cannot write file: " + path.string());
  return out;
}

void write_results_csv(const std::vector<ExperimentRecord>& records,
                       const fs::path& path) {
  auto out = open_out(path);
  out << kResultsHeader << "\n";
  for (const auto& r : records) {
    out << r.dataset << ',' << r.method << ',' << r.classifier << ','
        << format_float(r.missing_rate) << ',' << r.seed << ',';
    if (r.t_period) out << *r.t_period;
    out << ',';
    if (r.mae) out << format_float(*r.mae);
    out << ',' << format_float(r.f1) << ',' << format_float(r.auc) << ','
        << format_float(r.mcc) << ',' << format_float(r.wall_time_seconds)
        << "\n";
  }
}

struct Aggregate {
  double sum = 0.0;
  double sum_sq = 0.0;
  std::size_t n = 0;

  void add(double v) {
    sum += v;
    sum_sq += v * v;
    ++n;
  }
  double mean() const { return sum / static_cast<double>(n); }
  double std_dev() const {
    const double m = mean();
    const double var = sum_sq / static_cast<double>(n) - m * m;
    return var > 0.0 ? std::sqrt(var) : 0.0;
  }
};

void write_summary(const std::vector<ExperimentRecord>& records,
                   const fs::path& path) {
  auto out = open_out(path);

  std::vector<std::string> methods;
  std::vector<double> rates;
  const ExperimentRecord* baseline = nullptr;
  for (const auto& r : records) {
    if (r.method == "none") {
      baseline = &r;
      continue;
    }
    if (std::find(methods.begin(), methods.end(), r.method) == methods.end())
      methods.push_back(r.method);
    if (std::find(rates.begin(), rates.end(), r.missing_rate) == rates.end())
      rates.push_back(r.missing_rate);
  }
  std::sort(rates.begin(), rates.end());

  out << "# Benchmark summary\n\n";
  if (!records.empty())
    out << "Dataset: " << records.front().dataset
        << ", classifier: " << records.front().classifier << "\n\n";
  if (baseline) {
    out << "Full-data baseline: F1 " << format_float(baseline->f1) << ", AUC "
        << format_float(baseline->auc) << ", MCC "
        << format_float(baseline->mcc) << "\n\n";
  }

  struct Metric {
    const char* name;
    bool lower_is_better;
    std::function<std::optional<double>(const ExperimentRecord&)> get;
  };
  const std::vector<Metric> metrics = {
      {"MAE", true, [](const ExperimentRecord& r) { return r.mae; }},
      {"F1", false,
       [](const ExperimentRecord& r) { return std::optional<double>(r.f1); }},
      {"AUC", false,
       [](const ExperimentRecord& r) { return std::optional<double>(r.auc); }},
      {"MCC", false,
       [](const ExperimentRecord& r) { return std::optional<double>(r.mcc); }},
  };

  for (const Metric& metric : metrics) {
    out << "## " << metric.name << "\n\n";
    out << "| M.R. |";
    for (const auto& m : methods) out << ' ' << m << " |";
    out << "\n|---|";
    for (std::size_t i = 0; i < methods.size(); ++i) out << "---|";
    out << "\n";
    for (double rate : rates) {
      std::vector<std::optional<double>> cells(methods.size());
      for (std::size_t mi = 0; mi < methods.size(); ++mi) {
        Aggregate agg;
        for (const auto& r : records) {
          if (r.method != methods[mi] || r.missing_rate != rate) continue;
          if (auto v = metric.get(r)) agg.add(*v);
        }
        if (agg.n > 0) cells[mi] = agg.mean();
      }
      std::optional<std::size_t> best;
      for (std::size_t mi = 0; mi < methods.size(); ++mi) {
        if (!cells[mi]) continue;
        if (!best || (metric.lower_is_better ? *cells[mi] < *cells[*best]
                                             : *cells[mi] > *cells[*best]))
          best = mi;
      }
      out << "| " << format_float(rate) << " |";
      for (std::size_t mi = 0; mi < methods.size(); ++mi) {
        out << ' ';
        if (!cells[mi]) {
          out << "- |";
        } else if (best && mi == *best) {
          out << "**" << format_float(*cells[mi]) << "** |";
        } else {
          out << format_float(*cells[mi]) << " |";
        }
      }
      out << "\n";
    }
    out << "\n";
  }
}

}  // namespace

void emit_results(const std::vector<ExperimentRecord>& records,
                  const fs::path& out_dir) {
  if (records.empty()) throw DataError("emit_results: no records");
  fs::create_directories(out_dir);
  write_results_csv(records, out_dir / "results.csv");
  write_summary(records, out_dir / "summary.md");
}

void emit_plot_data(const std::vector<ExperimentRecord>& records,
                    const fs::path& out_dir) {
  bool any_sweep = false;
  for (const auto& r : records)
    if (r.method != "none") any_sweep = true;
  if (!any_sweep) throw DataError("emit_plot_data: no sweep records");

  fs::create_directories(out_dir);
  auto out = open_out(out_dir / "mae_curve.csv");
  out << "method,missing_rate,mae_mean,mae_std\n";

  std::vector<std::string> methods;
  std::vector<double> rates;
  for (const auto& r : records) {
    if (r.method == "none" || !r.mae) continue;
    if (std::find(methods.begin(), methods.end(), r.method) == methods.end())
      methods.push_back(r.method);
    if (std::find(rates.begin(), rates.end(), r.missing_rate) == rates.end())
      rates.push_back(r.missing_rate);
  }
  std::sort(rates.begin(), rates.end());
  for (const auto& method : methods) {
    for (double rate : rates) {
      Aggregate agg;
      for (const auto& r : records)
        if (r.method == method && r.missing_rate == rate && r.mae)
          agg.add(*r.mae);
      if (agg.n == 0) continue;
      out << method << ',' << format_float(rate) << ','
          << format_float(agg.mean()) << ',' << format_float(agg.std_dev())
          << "\n";
    }
  }
}

std::vector<ExperimentRecord> read_results_csv(const fs::path& path) {
  const auto lines = read_lines(path);
  if (lines.empty() || lines[0] != kResultsHeader)
    throw MalformedCsv(path.string() + ": unexpected results.csv header");
  std::vector<ExperimentRecord> records;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto f = split_csv_line(lines[i]);
    if (f.size() != 11)
      throw MalformedCsv(path.string() + ": row " + std::to_string(i + 1) +
                         ": expected 11 fields, got " +
                         std::to_string(f.size()));
    ExperimentRecord r;
    r.dataset = f[0];
    r.method = f[1];
    r.classifier = f[2];
    r.missing_rate = parse_double(f[3], path, i + 1, 4);
    r.seed = std::stoull(f[4]);
    if (!f[5].empty()) r.t_period = std::stoull(f[5]);
    if (!f[6].empty()) r.mae = parse_double(f[6], path, i + 1, 7);
    r.f1 = parse_double(f[7], path, i + 1, 8);
    r.auc = parse_double(f[8], path, i + 1, 9);
    r.mcc = parse_double(f[9], path, i + 1, 10);
    r.wall_time_seconds = parse_double(f[10], path, i + 1, 11);
    records.push_back(r);
  }
  return records;
}

void write_dataset(const Dataset& dataset, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  auto manifest = open_out(out_dir / "manifest.csv");
  manifest << "series_id,path,label\n";
  for (const TimeSeries& s : dataset.series) {
    const std::string filename = s.id() + ".csv";
    manifest << s.id() << ',' << filename << ',' << s.label() << "\n";
    auto out = open_out(out_dir / filename);
    out << "timestamp";
    if (s.channels() == 1) {
      out << ",value\n";
    } else {
      for (std::size_t c = 1; c <= s.channels(); ++c) out << ",value_" << c;
      out << "\n";
    }
    for (std::size_t t = 0; t < s.length(); ++t) {
      out << t;
      for (std::size_t c = 0; c < s.channels(); ++c) {
        out << ',';
        if (s.is_observed(t, c)) {
          // shortest representation that round-trips exactly
          char buf[32];
          const auto res =
              std::to_chars(buf, buf + sizeof buf, s.value(t, c));
          out.write(buf, res.ptr - buf);
        }
      }
      out << "\n";
    }
  }
}

}  // namespace tsimp
