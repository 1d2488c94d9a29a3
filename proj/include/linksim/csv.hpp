#ifndef LINKSIM_CSV_HPP_
#define LINKSIM_CSV_HPP_

#include <cstdint>
#include <string>
#include <vector>

namespace linksim {
namespace csv {

// Shortest decimal representation that round-trips the exact double.
// Deterministic, so identical runs produce byte-identical files.
std::string format_double(double v);

class Table {
 public:
  explicit Table(std::vector<std::string> columns);

  Table& begin_row();
  Table& col(double v);
  Table& col(std::int64_t v);
  Table& col(std::size_t v);
  Table& col(int v);
  Table& col(const std::string& v);

  std::string str() const;
  std::size_t rows() const { return rows_; }

 private:
  void push(const std::string& cell);
  std::size_t n_cols_;
  std::size_t rows_ = 0;
  std::size_t cells_in_row_ = 0;
  std::string body_;
};

// Writes atomically: temp file in the same directory, then rename.
void atomic_write(const std::string& path, const std::string& content);

}  // namespace csv
}  // namespace linksim

#endif  // LINKSIM_CSV_HPP_
