#pragma once

#include <string>
#include <vector>

#include "adev/path.hpp"

namespace adev {

// Dataset CSV schema. Either
//   sample_id,time_index,dim_0,...,dim_{d-1}   (one series per sample_id)
// or
//   time_index,dim_0,...,dim_{d-1}             (one long series)
// with a decimal dot and time_index strictly increasing within each series.

struct CsvSeries {
  std::vector<std::string> ids;
  std::vector<RVector> times;
  std::vector<RMatrix> values;
};

CsvSeries parse_csv_series(const std::string& text);

/// Windows of window_len consecutive rows advancing by stride, series after
/// series. The window grid is k / (window_len - 1).
Dataset rolling_windows(const CsvSeries& series, int window_len, int stride);

Dataset ingest_csv(const std::string& path, int window_len, int stride);

/// Each series becomes one sample; all series must have the same length.
Dataset load_dataset_csv(const std::string& path);

struct DatasetSplit {
  Dataset train;
  Dataset test;
};

/// First floor(ratio * N) samples for training, the rest for testing.
DatasetSplit split_dataset(const Dataset& data, double ratio = 0.8);

/// sample_id,time_index,dim_* with integer time indices and shortest
/// round-trip decimal values.
std::string dataset_to_csv(const Dataset& data);

std::string read_text_file(const std::string& path);

/// Writes to a temporary sibling and renames it over `path`.
void write_text_file_atomic(const std::string& path, const std::string& content);

/// Shortest representation that parses back to the same double.
std::string format_double(double v);

}  // namespace adev
