#include "adev/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <system_error>

#include "adev/errors.hpp"

namespace adev {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

double parse_number(const std::string& s, std::size_t line, const std::string& column) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (!s.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (s.empty() || ec != std::errc() || ptr != last || !std::isfinite(v))
    throw ParseError("line " + std::to_string(line) + ", column '" + column + "': not a finite number '" + s + "'");
  return v;
}

}  // namespace

CsvSeries parse_csv_series(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    header = split_fields(line);
    break;
  }
  if (header.empty()) throw ParseError("CSV is empty (missing header)");
  if (header[0].compare(0, 3, "\xEF\xBB\xBF") == 0)
    header[0] = header[0].substr(3);

  const bool keyed = header.front() == "sample_id";
  const std::size_t t_col = keyed ? 1 : 0;
  if (header.size() <= t_col || header[t_col] != "time_index")
    throw ParseError("missing column 'time_index'");
  const std::size_t first_dim = t_col + 1;
  if (header.size() <= first_dim) throw ParseError("missing column 'dim_0'");
  for (std::size_t c = first_dim; c < header.size(); ++c) {
    const std::string want = "dim_" + std::to_string(c - first_dim);
    if (header[c] != want) throw ParseError("missing column '" + want + "' (found '" + header[c] + "')");
  }
  const auto d = static_cast<Eigen::Index>(header.size() - first_dim);

  std::map<std::string, std::size_t> index;
  std::vector<std::string> ids;
  std::vector<std::vector<double>> times;
  std::vector<std::vector<double>> values;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split_fields(line);
    if (f.size() != header.size())
      throw ParseError("line " + std::to_string(line_no) + ": expected " + std::to_string(header.size()) +
                       " fields, got " + std::to_string(f.size()));
    const std::string id = keyed ? f[0] : std::string();
    auto [it, inserted] = index.emplace(id, ids.size());
    if (inserted) {
      ids.push_back(id);
      times.emplace_back();
      values.emplace_back();
    }
    const double t = parse_number(f[t_col], line_no, "time_index");
    auto& ts = times[it->second];
    if (!ts.empty() && !(t > ts.back()))
      throw ParseError("line " + std::to_string(line_no) + ": time_index is not increasing for sample '" + id + "'");
    ts.push_back(t);
    for (std::size_t c = first_dim; c < header.size(); ++c)
      values[it->second].push_back(parse_number(f[c], line_no, header[c]));
  }
  if (ids.empty()) throw ParseError("CSV has a header but no rows");

  CsvSeries out;
  out.ids = ids;
  for (std::size_t k = 0; k < ids.size(); ++k) {
    const auto l = static_cast<Eigen::Index>(times[k].size());
    out.times.push_back(Eigen::Map<const RVector>(times[k].data(), l));
    out.values.push_back(Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        values[k].data(), l, d));
  }
  return out;
}

Dataset rolling_windows(const CsvSeries& series, int window_len, int stride) {
  require_arg(window_len >= 2 && stride >= 1, "window length must be >= 2 and stride >= 1");
  std::vector<RMatrix> windows;
  for (const auto& v : series.values)
    for (Eigen::Index start = 0; start + window_len <= v.rows(); start += stride)
      windows.push_back(v.middleRows(start, window_len));
  require_arg(!windows.empty(), "no series is long enough for one window of length " + std::to_string(window_len));
  return Dataset(unit_time_grid(window_len), std::move(windows));
}

Dataset ingest_csv(const std::string& path, int window_len, int stride) {
  return rolling_windows(parse_csv_series(read_text_file(path)), window_len, stride);
}

Dataset load_dataset_csv(const std::string& path) {
  const CsvSeries s = parse_csv_series(read_text_file(path));
  const auto l = s.values.front().rows();
  for (std::size_t k = 0; k < s.values.size(); ++k)
    if (s.values[k].rows() != l)
      throw ParseError("sample '" + s.ids[k] + "' has " + std::to_string(s.values[k].rows()) +
                       " rows, expected " + std::to_string(l));
  require_arg(l >= 2, "samples need at least 2 time points");
  return Dataset(unit_time_grid(l), s.values);
}

DatasetSplit split_dataset(const Dataset& data, double ratio) {
  require_arg(ratio > 0.0 && ratio < 1.0, "split ratio must lie in (0, 1)");
  const auto n_train = static_cast<std::size_t>(std::floor(ratio * static_cast<double>(data.size())));
  require_arg(n_train >= 1 && n_train < data.size(), "split leaves an empty part");
  std::vector<std::size_t> a, b;
  for (std::size_t i = 0; i < data.size(); ++i) (i < n_train ? a : b).push_back(i);
  return {data.subset(a), data.subset(b)};
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw InternalError("number formatting failed");
  return std::string(buf, ptr);
}

std::string dataset_to_csv(const Dataset& data) {
  std::string out = "sample_id,time_index";
  for (Eigen::Index c = 0; c < data.dim(); ++c) out += ",dim_" + std::to_string(c);
  out += '\n';
  for (std::size_t i = 0; i < data.size(); ++i) {
    const RMatrix& v = data.values(i);
    for (Eigen::Index t = 0; t < v.rows(); ++t) {
      out += std::to_string(i) + ',' + std::to_string(t);
      for (Eigen::Index c = 0; c < v.cols(); ++c) out += ',' + format_double(v(t, c));
      out += '\n';
    }
  }
  return out;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArgumentError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ArgumentError("cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) {
      out.close();
      fs::remove(tmp);
      throw ArgumentError("failed writing '" + tmp.string() + "'");
    }
  }
  fs::rename(tmp, target);
}

}  // namespace adev
