#pragma once

#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace capstek {

/// "%.17g"; non-finite values become "nan", "inf", "-inf".
std::string format_double(double x);

/// Deterministic JSON text: insertion key order, 2-space indent, doubles with
/// 17 significant digits, non-finite doubles as null.
std::string to_json_text(const nlohmann::ordered_json& j);

/// One CSV table. Cells are written verbatim except for quoting when a cell
/// holds a comma, quote or newline.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void add_row(std::vector<std::string> row);
};

std::string csv_cell(double x);
std::string csv_cell(int x);
std::string csv_cell(bool x);

void write_csv(std::ostream& os, const CsvTable& table);

}  // namespace capstek
