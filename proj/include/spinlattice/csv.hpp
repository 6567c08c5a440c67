#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "spinlattice/error.hpp"
#include "spinlattice/record.hpp"

namespace spinlattice {

inline constexpr std::string_view kCsvHeader =
    "temp_K,engine,m_sigma,m_tau,m_mean,m_all,abs_m_all,energy_per_site_K,stderr,flags";

/// Nine significant digits, '.' decimal point regardless of locale.
inline std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    std::string s(buf);
    for (char& c : s) {
        if (c == ',') c = '.';
    }
    return s;
}

inline std::string format_csv(const std::vector<SweepRecord>& records) {
    bool with_deviation = false;
    for (const auto& r : records) with_deviation = with_deviation || r.deviation.has_value();
    std::string out(kCsvHeader);
    if (with_deviation) out += ",deviation";
    out += '\n';
    auto field = [&out](const std::optional<double>& v) {
        out += ',';
        if (v) out += format_number(*v);
    };
    for (const auto& r : records) {
        out += format_number(r.temp);
        out += ',';
        out += to_string(r.engine);
        field(r.m_sigma);
        field(r.m_tau);
        field(r.m_mean);
        field(r.m_all);
        field(r.abs_m_all);
        field(r.energy_per_site);
        field(r.std_error);
        out += ',';
        for (std::size_t i = 0; i < r.flags.size(); ++i) {
            if (i) out += ';';
            out += r.flags[i];
        }
        if (with_deviation) field(r.deviation);
        out += '\n';
    }
    return out;
}

/// Writes to a sibling temp file and renames it over the target.
inline void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw Error(ErrorCode::IoError, "cannot open " + tmp.string() + " for writing");
        f.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!f) throw Error(ErrorCode::IoError, "write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

inline void write_csv(const std::vector<SweepRecord>& records, const std::filesystem::path& path) {
    if (records.empty()) throw Error(ErrorCode::IoError, "refusing to write an empty record list");
    write_file_atomic(path, format_csv(records));
}

/// Inverse of format_csv (values come back rounded to nine significant digits).
inline std::vector<SweepRecord> parse_csv(std::string_view text) {
    std::vector<SweepRecord> out;
    std::istringstream in{std::string(text)};
    std::string line;
    if (!std::getline(in, line) || line.rfind(kCsvHeader, 0) != 0) {
        throw Error(ErrorCode::ParseError, "missing or unexpected CSV header");
    }
    const bool with_deviation = line.size() > kCsvHeader.size();
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::size_t start = 0;
        for (;;) {
            const auto comma = line.find(',', start);
            cells.push_back(line.substr(start, comma - start));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (cells.size() != (with_deviation ? 11u : 10u)) {
            throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": wrong column count");
        }
        auto num = [&](const std::string& s) -> std::optional<double> {
            if (s.empty()) return std::nullopt;
            try {
                std::size_t used = 0;
                const double v = std::stod(s, &used);
                if (used == s.size()) return v;
            } catch (const std::exception&) {
            }
            throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": bad number '" + s + "'");
        };
        SweepRecord r;
        r.temp = num(cells[0]).value_or(0.0);
        if (cells[1] == "exact") r.engine = Engine::Exact;
        else if (cells[1] == "meanfield") r.engine = Engine::MeanField;
        else if (cells[1] == "mc") r.engine = Engine::Mc;
        else throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": unknown engine");
        r.m_sigma = num(cells[2]);
        r.m_tau = num(cells[3]);
        r.m_mean = num(cells[4]);
        r.m_all = num(cells[5]);
        r.abs_m_all = num(cells[6]);
        r.energy_per_site = num(cells[7]);
        r.std_error = num(cells[8]);
        std::size_t s = 0;
        const std::string& flags = cells[9];
        while (s < flags.size()) {
            const auto semi = flags.find(';', s);
            r.flags.push_back(flags.substr(s, semi - s));
            if (semi == std::string::npos) break;
            s = semi + 1;
        }
        if (with_deviation) r.deviation = num(cells[10]);
        out.push_back(std::move(r));
    }
    return out;
}

inline std::vector<SweepRecord> read_csv(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorCode::IoError, "cannot open " + path.string());
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_csv(ss.str());
}

}  // namespace spinlattice
