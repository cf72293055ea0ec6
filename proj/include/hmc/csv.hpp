#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace hmc {

// Shortest decimal form that round-trips the exact double; "inf"/"nan" for
// non-finite values.  Locale-independent, so output bytes are stable.
std::string format_double(double x);

class CsvWriter {
  public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& columns);

    void row(const std::vector<std::string>& cells);

    template <typename... Ts>
    void row_of(const Ts&... vals) {
        row({cell(vals)...});
    }

  private:
    static std::string cell(double v) { return format_double(v); }
    static std::string cell(int v) { return std::to_string(v); }
    static std::string cell(long v) { return std::to_string(v); }
    static std::string cell(unsigned long v) { return std::to_string(v); }
    static std::string cell(const std::string& s) { return s; }
    static std::string cell(const char* s) { return s; }

    std::ofstream out_;
    std::size_t n_columns_;
};

}  // namespace hmc
