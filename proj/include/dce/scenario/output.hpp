#pragma once

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "dce/types.hpp"

namespace dce::scenario {

// Column layout shared by every Fock-space scenario.
inline const std::vector<std::string>& fock_csv_header() {
    static const std::vector<std::string> h{"t",          "n_numeric", "n_analytic", "s_numeric",
                                            "s_analytic", "trace_err", "herm_err",   "leakage"};
    return h;
}

inline const std::vector<std::string>& threelevel_csv_header() {
    static const std::vector<std::string> h{"t",     "pop_a",         "pop_b",   "pop_c",
                                            "upper_adiabatic", "upper_abs_err", "eps_eff", "norm_err"};
    return h;
}

using Cell = std::optional<double>;

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<Cell>> rows;
};

inline std::string format_number(double v) {
    std::array<char, 32> buf{};
    const int len = std::snprintf(buf.data(), buf.size(), "%.17g", v);
    return std::string(buf.data(), static_cast<std::size_t>(len));
}

inline std::string to_csv(const Table& table) {
    std::string out;
    for (std::size_t i = 0; i < table.header.size(); ++i) {
        if (i) out += ',';
        out += table.header[i];
    }
    out += '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            if (row[i]) out += format_number(*row[i]);
        }
        out += '\n';
    }
    return out;
}

// Writes to a sibling temporary and renames it over the target.
inline void write_atomic(const std::filesystem::path& path, std::string_view content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw Error("cannot open " + tmp.string() + " for writing");
        f.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!f) throw Error("write to " + tmp.string() + " failed");
    }
    std::filesystem::rename(tmp, path);
}

// A reported number together with where it came from.
inline nlohmann::json tagged(double value, std::string_view source) {
    nlohmann::json j;
    if (std::isfinite(value)) j["value"] = value;
    else j["value"] = nullptr;
    j["source"] = source;
    return j;
}

inline nlohmann::json tagged(std::optional<double> value, std::string_view source) {
    nlohmann::json j;
    if (value && std::isfinite(*value)) j["value"] = *value;
    else j["value"] = nullptr;
    j["source"] = source;
    return j;
}

inline constexpr std::string_view kNumeric = "numeric";
inline constexpr std::string_view kAnalytic = "analytic";
inline constexpr std::string_view kOrderOfMagnitude = "order-of-magnitude";

}  // namespace dce::scenario
