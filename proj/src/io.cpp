#include "capstek/io.hpp"

#include <cmath>
#include <cstdio>

#include "capstek/errors.hpp"

namespace capstek {

namespace {

void write_string(std::string& out, const std::string& s) {
    // nlohmann's own escaping handles control characters and UTF-8 validation.
    out += nlohmann::ordered_json(s).dump();
}

void write_value(std::string& out, const nlohmann::ordered_json& j, int depth) {
    const std::string pad(2 * (depth + 1), ' ');
    const std::string close_pad(2 * depth, ' ');
    switch (j.type()) {
        case nlohmann::ordered_json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out += "{\n";
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) out += ",\n";
                first = false;
                out += pad;
                write_string(out, it.key());
                out += ": ";
                write_value(out, it.value(), depth + 1);
            }
            out += "\n" + close_pad + "}";
            return;
        }
        case nlohmann::ordered_json::value_t::array: {
            if (j.empty()) {
                out += "[]";
                return;
            }
            out += "[\n";
            bool first = true;
            for (const auto& v : j) {
                if (!first) out += ",\n";
                first = false;
                out += pad;
                write_value(out, v, depth + 1);
            }
            out += "\n" + close_pad + "]";
            return;
        }
        case nlohmann::ordered_json::value_t::number_float: {
            const double x = j.get<double>();
            out += std::isfinite(x) ? format_double(x) : "null";
            return;
        }
        default:
            out += j.dump();
    }
}

}  // namespace

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string to_json_text(const nlohmann::ordered_json& j) {
    std::string out;
    write_value(out, j, 0);
    out += "\n";
    return out;
}

void CsvTable::add_row(std::vector<std::string> row) {
    if (row.size() != header.size()) throw InvalidArgument("csv row width does not match the header");
    rows.push_back(std::move(row));
}

std::string csv_cell(double x) { return format_double(x); }
std::string csv_cell(int x) { return std::to_string(x); }
std::string csv_cell(bool x) { return x ? "true" : "false"; }

void write_csv(std::ostream& os, const CsvTable& table) {
    auto write_line = [&os](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) os << ',';
            const std::string& c = cells[i];
            if (c.find_first_of(",\"\n") == std::string::npos) {
                os << c;
            } else {
                os << '"';
                for (char ch : c) {
                    if (ch == '"') os << '"';
                    os << ch;
                }
                os << '"';
            }
        }
        os << '\n';
    };
    write_line(table.header);
    for (const auto& row : table.rows) write_line(row);
}

}  // namespace capstek
