#ifndef SENSELECT_CSV_HPP
#define SENSELECT_CSV_HPP

#include <cstdint>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

namespace senselect {

// 17 significant digits: round-trips any double through text.
inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

// Comma-separated output with a schema tag line ahead of the mandatory
// header row, e.g. "# schema slots/1".
class CsvWriter {
 public:
  CsvWriter(std::ostream& os, const std::string& schema,
            const std::vector<std::string>& header)
      : os_(os) {
    os_ << "# schema " << schema << "\n";
    write_strings(header);
  }

  class Row {
   public:
    explicit Row(CsvWriter& w) : w_(w) {}
    ~Row() { w_.os_ << "\n"; }
    Row(const Row&) = delete;
    Row& operator=(const Row&) = delete;

    Row& col(double v) { return raw(format_double(v)); }
    Row& col(std::uint64_t v) { return raw(std::to_string(v)); }
    Row& col(std::int64_t v) { return raw(std::to_string(v)); }
    Row& col(int v) { return raw(std::to_string(v)); }
    Row& col(const std::string& v) { return raw(v); }

   private:
    Row& raw(const std::string& s) {
      if (count_++ > 0) w_.os_ << ',';
      w_.os_ << s;
      return *this;
    }
    CsvWriter& w_;
    std::size_t count_ = 0;
  };

  Row row() { return Row(*this); }

 private:
  void write_strings(const std::vector<std::string>& vals) {
    for (std::size_t i = 0; i < vals.size(); ++i) {
      if (i) os_ << ',';
      os_ << vals[i];
    }
    os_ << "\n";
  }

  std::ostream& os_;
};

}  // namespace senselect

#endif  // SENSELECT_CSV_HPP
