#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <fmt/core.h>
#include <json.hpp>

#include "boseglow/error.hpp"

namespace boseglow::io {

using Cell = std::variant<double, std::int64_t, std::string>;

/**
 * Plot-ready table: `#` header lines, one column-name row, data rows.
 * The JSON mirror carries the same header lines, columns and rows.
 */
struct Table {
    std::string product;
    std::vector<std::string> header;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

/// 17 significant digits, enough to round-trip any double.
inline std::string formatDouble(double v) { return fmt::format("{:.17g}", v); }

inline std::string formatCell(const Cell& c) {
    return std::visit(
        [](const auto& v) -> std::string {
            using V = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<V, double>) {
                return formatDouble(v);
            } else if constexpr (std::is_same_v<V, std::int64_t>) {
                return std::to_string(v);
            } else {
                return v;
            }
        },
        c);
}

inline std::string toCsv(const Table& t) {
    std::string out;
    for (const std::string& h : t.header) out += "# " + h + "\n";
    for (std::size_t i = 0; i < t.columns.size(); ++i) out += (i ? "," : "") + t.columns[i];
    out += "\n";
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + formatCell(row[i]);
        out += "\n";
    }
    return out;
}

inline nlohmann::json toJson(const Table& t) {
    nlohmann::json j;
    j["product"] = t.product;
    j["header"] = t.header;
    j["columns"] = t.columns;
    auto rows = nlohmann::json::array();
    for (const auto& row : t.rows) {
        auto r = nlohmann::json::array();
        for (const Cell& c : row) std::visit([&r](const auto& v) { r.push_back(v); }, c);
        rows.push_back(std::move(r));
    }
    j["rows"] = std::move(rows);
    return j;
}

inline void writeText(const std::filesystem::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open " + path.string() + " for writing");
    f << text;
    f.close();
    if (!f) throw IoError("failed writing " + path.string());
}

/// Writes `<base>.csv` and `<base>.json`; returns both paths.
inline std::vector<std::filesystem::path> writeTable(const Table& t, const std::filesystem::path& base) {
    std::filesystem::path csv = base;
    csv += ".csv";
    std::filesystem::path json = base;
    json += ".json";
    writeText(csv, toCsv(t));
    writeText(json, toJson(t).dump(1) + "\n");
    return {csv, json};
}

} // namespace boseglow::io
