#include "tsimp/reshape.hpp"

#include <cmath>
#include <string>

namespace tsimp {

PeriodFit validate_period(std::size_t t_i, std::size_t t_period) {
  if (t_period == 0 || t_i == 0) throw DataError("lengths must be positive");
  if (t_period > t_i) return PeriodFit::Invalid;
  return (t_i % t_period == 0) ? PeriodFit::Valid : PeriodFit::PadNeeded;
}

SeriesMatrix reshape_to_matrix(const std::vector<double>& values,
                               const std::vector<std::uint8_t>& observed,
                               const ReshapeSpec& spec) {
  if (values.size() != observed.size())
    throw ShapeMismatch("values and observed flags differ in length");
  const std::size_t t_i = values.size();
  const std::size_t period = spec.t_period;
  switch (validate_period(t_i, period)) {
    case PeriodFit::Invalid:
      throw PeriodExceedsLength("t_period " + std::to_string(period) +
                                " exceeds series length " +
                                std::to_string(t_i));
    case PeriodFit::PadNeeded:
      if (spec.pad_policy == PadPolicy::Strict)
        throw NonDivisorPeriod("t_period " + std::to_string(period) +
                               " does not divide series length " +
                               std::to_string(t_i));
      break;
    case PeriodFit::Valid:
      break;
  }

  SeriesMatrix m;
  m.cols = period;
  m.rows = (t_i + period - 1) / period;
  m.original_len = t_i;
  m.cells.assign(m.rows * m.cols, std::nan(""));
  m.flags.assign(m.rows * m.cols, CellFlag::Padding);
  for (std::size_t j = 0; j < t_i; ++j) {
    m.cells[j] = values[j];
    m.flags[j] = observed[j] ? CellFlag::Observed : CellFlag::Missing;
  }
  return m;
}

void reshape_to_series(const SeriesMatrix& matrix, std::vector<double>& values,
                       std::vector<std::uint8_t>& observed) {
  values.assign(matrix.cells.begin(),
                matrix.cells.begin() + matrix.original_len);
  observed.resize(matrix.original_len);
  for (std::size_t j = 0; j < matrix.original_len; ++j)
    observed[j] = matrix.flags[j] == CellFlag::Observed ? 1 : 0;
}

}  // namespace tsimp
