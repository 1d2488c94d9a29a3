#include "linksim/csv.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <stdexcept>

namespace linksim {
namespace csv {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  if (v == std::floor(v) && std::abs(v) < 1e15) {
    std::snprintf(buf, sizeof(buf), "%.0f", v);
    return buf;
  }
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

Table::Table(std::vector<std::string> columns) : n_cols_(columns.size()) {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i) body_.push_back(',');
    body_ += columns[i];
  }
  body_.push_back('\n');
}

Table& Table::begin_row() {
  if (cells_in_row_ != 0) throw std::logic_error("csv: previous row incomplete");
  return *this;
}

void Table::push(const std::string& cell) {
  if (cells_in_row_) body_.push_back(',');
  body_ += cell;
  if (++cells_in_row_ == n_cols_) {
    body_.push_back('\n');
    cells_in_row_ = 0;
    ++rows_;
  }
}

Table& Table::col(double v) {
  push(format_double(v));
  return *this;
}
Table& Table::col(std::int64_t v) {
  push(std::to_string(v));
  return *this;
}
Table& Table::col(std::size_t v) {
  push(std::to_string(v));
  return *this;
}
Table& Table::col(int v) {
  push(std::to_string(v));
  return *this;
}
Table& Table::col(const std::string& v) {
  push(v);
  return *this;
}

std::string Table::str() const {
  if (cells_in_row_ != 0) throw std::logic_error("csv: last row incomplete");
  return body_;
}

void atomic_write(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + tmp + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw std::runtime_error("write failed for '" + tmp + "'");
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw std::runtime_error("cannot rename '" + tmp + "' to '" + path + "'");
}

}  // namespace csv
}  // namespace linksim
