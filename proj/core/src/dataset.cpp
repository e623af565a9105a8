#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "tswlad/errors.hpp"
#include "tswlad/experiment.hpp"

namespace tswlad {
namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) {
    // trim surrounding whitespace
    const auto begin = field.find_first_not_of(" \t\r");
    const auto end = field.find_last_not_of(" \t\r");
    fields.push_back(begin == std::string::npos
                         ? std::string()
                         : field.substr(begin, end - begin + 1));
  }
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_number(const std::string& field, long line_number,
                    const std::string& column) {
  try {
    std::size_t used = 0;
    const double v = std::stod(field, &used);
    if (used != field.size() || !std::isfinite(v)) {
      throw std::invalid_argument(field);
    }
    return v;
  } catch (const std::exception&) {
    std::ostringstream msg;
    msg << "dataset line " << line_number << ": cannot parse column '"
        << column << "' value '" << field << "'";
    throw DataError(msg.str());
  }
}

/// 17-significant-digit decimal text, locale-independent.
std::string format_double(double v) {
  char buf[64];
  const auto res =
      std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

} // namespace

Dataset load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw DataError("cannot open dataset file '" + path + "'");
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw DataError("dataset file '" + path + "' is empty");
  }
  const std::vector<std::string> header = split_csv_line(line);

  // Expected: phi_0..phi_{d-1}, y, L, l, u, U [, b]
  int d = 0;
  while (d < static_cast<int>(header.size()) &&
         header[static_cast<std::size_t>(d)] == "phi_" + std::to_string(d)) {
    ++d;
  }
  if (d == 0) {
    throw DataError("dataset header must start with phi_0");
  }
  const std::vector<std::string> tail(header.begin() + d, header.end());
  bool has_weights = false;
  if (tail == std::vector<std::string>{"y", "L", "l", "u", "U"}) {
    has_weights = false;
  } else if (tail == std::vector<std::string>{"y", "L", "l", "u", "U", "b"}) {
    has_weights = true;
  } else {
    throw DataError(
        "dataset header must be phi_0..phi_{d-1}, y, L, l, u, U [, b]");
  }
  const std::size_t expected_fields =
      static_cast<std::size_t>(d) + 5 + (has_weights ? 1 : 0);

  Dataset ds;
  ds.dimension = d;
  ds.has_weights = has_weights;
  long line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty() || line == "\r") continue;
    const std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() != expected_fields) {
      std::ostringstream msg;
      msg << "dataset line " << line_number << ": expected " << expected_fields
          << " fields, got " << fields.size();
      throw DataError(msg.str());
    }
    Datum datum;
    datum.regressor.resize(d);
    std::size_t col = 0;
    for (int i = 0; i < d; ++i, ++col) {
      datum.regressor[i] =
          parse_number(fields[col], line_number, "phi_" + std::to_string(i));
    }
    datum.observation = parse_number(fields[col++], line_number, "y");
    datum.spec.lower_clip = parse_number(fields[col++], line_number, "L");
    datum.spec.lower_threshold = parse_number(fields[col++], line_number, "l");
    datum.spec.upper_threshold = parse_number(fields[col++], line_number, "u");
    datum.spec.upper_clip = parse_number(fields[col++], line_number, "U");
    datum.weight =
        has_weights ? parse_number(fields[col++], line_number, "b") : 1.0;

    try {
      datum.spec.validate();
    } catch (const ConfigError& e) {
      std::ostringstream msg;
      msg << "dataset line " << line_number << ": " << e.what();
      throw DataError(msg.str());
    }
    if (!(datum.observation >= datum.spec.lower_clip &&
          datum.observation <= datum.spec.upper_clip)) {
      std::ostringstream msg;
      msg << "dataset line " << line_number << ": observation "
          << datum.observation << " violates L <= y <= U";
      throw DataError(msg.str());
    }
    if (!(datum.weight > 0.0 && datum.weight <= 1.0)) {
      std::ostringstream msg;
      msg << "dataset line " << line_number << ": weight " << datum.weight
          << " outside (0, 1]";
      throw DataError(msg.str());
    }
    ds.rows.push_back(std::move(datum));
  }
  return ds;
}

void write_dataset(const std::string& path, std::span<const Datum> rows,
                   bool with_weights) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw DataError("cannot open '" + path + "' for writing");
  }
  const int d = rows.empty() ? 0 : static_cast<int>(rows.front().regressor.size());
  for (int i = 0; i < d; ++i) {
    out << "phi_" << i << ",";
  }
  out << "y,L,l,u,U";
  if (with_weights) out << ",b";
  out << "\n";
  for (const Datum& datum : rows) {
    for (int i = 0; i < d; ++i) {
      out << format_double(datum.regressor[i]) << ",";
    }
    out << format_double(datum.observation) << ","
        << format_double(datum.spec.lower_clip) << ","
        << format_double(datum.spec.lower_threshold) << ","
        << format_double(datum.spec.upper_threshold) << ","
        << format_double(datum.spec.upper_clip);
    if (with_weights) out << "," << format_double(datum.weight);
    out << "\n";
  }
  if (!out) {
    throw DataError("write to '" + path + "' failed");
  }
}

void emit_csv(const MetricSeries& series, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw DataError("cannot open '" + path + "' for writing");
  }
  out << "k,param_err,param_err_bar,regret_avg,pred_err_avg,lambda_min,"
         "lambda_max,rate_ratio,lyapunov\n";
  for (const MetricRow& row : series.rows()) {
    out << row.k << "," << format_double(row.param_err) << ","
        << format_double(row.param_err_bar) << ","
        << format_double(row.regret_avg) << ","
        << format_double(row.pred_err_avg) << ","
        << format_double(row.lambda_min) << ","
        << format_double(row.lambda_max) << ","
        << format_double(row.rate_ratio) << ","
        << format_double(row.lyapunov) << "\n";
  }
  if (!out) {
    throw DataError("write to '" + path + "' failed");
  }
}

} // namespace tswlad
