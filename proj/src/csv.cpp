#include "hmc/csv.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

#include "hmc/errors.hpp"

namespace hmc {

std::string format_double(double x) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    if (ec != std::errc()) throw std::runtime_error("format_double: conversion failed");
    return std::string(buf, ptr);
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& columns)
    : out_(path, std::ios::binary), n_columns_(columns.size()) {
    if (!out_) throw std::runtime_error("cannot open " + path.string() + " for writing");
    if (columns.empty()) throw ContractViolation("csv: need at least one column");
    row(columns);
}

void CsvWriter::row(const std::vector<std::string>& cells) {
    if (cells.size() != n_columns_)
        throw ContractViolation("csv: row width does not match the header");
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i > 0) out_ << ',';
        out_ << cells[i];
    }
    out_ << '\n';
    if (!out_) throw std::runtime_error("csv: write failed");
}

}  // namespace hmc
