#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "tsimp/error.hpp"

namespace tsimp {

/// One labeled time series: length() epochs of channels() values each,
/// stored row-major, with a per-slot observed flag. Missing slots hold NaN
/// so downstream code can never silently read a hidden value.
class TimeSeries {
 public:
  TimeSeries() = default;

  TimeSeries(std::string id, std::size_t length, std::size_t channels,
             int label = 0)
      : id_(std::move(id)),
        length_(length),
        channels_(channels),
        label_(label),
        values_(length * channels, 0.0),
        observed_(length * channels, 1) {
    if (length == 0 || channels == 0)
      throw DataError("TimeSeries requires length >= 1 and channels >= 1");
  }

  const std::string& id() const { return id_; }
  std::size_t length() const { return length_; }
  std::size_t channels() const { return channels_; }
  int label() const { return label_; }
  void set_label(int label) { label_ = label; }

  double value(std::size_t t, std::size_t c = 0) const {
    return values_[t * channels_ + c];
  }
  bool is_observed(std::size_t t, std::size_t c = 0) const {
    return observed_[t * channels_ + c] != 0;
  }

  void set(std::size_t t, std::size_t c, double v) {
    values_[t * channels_ + c] = v;
    observed_[t * channels_ + c] = 1;
  }
  void set_missing(std::size_t t, std::size_t c = 0) {
    values_[t * channels_ + c] = std::nan("");
    observed_[t * channels_ + c] = 0;
  }

  std::size_t slot_count() const { return values_.size(); }
  double value_at_slot(std::size_t slot) const { return values_[slot]; }
  bool observed_at_slot(std::size_t slot) const {
    return observed_[slot] != 0;
  }

  std::size_t missing_count() const {
    std::size_t n = 0;
    for (auto o : observed_)
      if (!o) ++n;
    return n;
  }
  bool is_complete() const { return missing_count() == 0; }

  const std::vector<double>& raw_values() const { return values_; }
  const std::vector<std::uint8_t>& raw_observed() const { return observed_; }

 private:
  std::string id_;
  std::size_t length_ = 0;
  std::size_t channels_ = 0;
  int label_ = 0;
  std::vector<double> values_;        // length x channels, row-major
  std::vector<std::uint8_t> observed_;
};

struct Dataset {
  std::string name;
  int epoch_seconds = 60;
  std::vector<TimeSeries> series;

  std::size_t size() const { return series.size(); }
};

}  // namespace tsimp
