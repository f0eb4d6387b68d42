// CSV emission of trajectory records: one commented header line naming the
// columns, full double precision values, rows in time order.

#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "qgeo/dynamics.hpp"

namespace qgeo {

// Shortest decimal form that round-trips a double exactly.
inline std::string format_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

// Columns t,norm,gamma[,gamma_opt],speed, plus flattened state entries when
// with_states is set. gamma_opt is written when a companion series of
// optimized decay rates accompanies the record.
inline void emit_csv(const TrajectoryRecord& record, const std::string& path,
                     bool with_states = false,
                     const std::vector<double>& gamma_opt = {}) {
    if (record.size() == 0) throw NumericsError("emit_csv", "record is empty");
    if (!gamma_opt.empty() && gamma_opt.size() != record.size())
        throw NumericsError("emit_csv", "gamma_opt series length differs from record");
    std::ofstream out(path);
    if (!out) throw NumericsError("emit_csv", "cannot open " + path + " for writing");

    std::ostringstream header;
    header << "# columns: t,norm,gamma";
    if (!gamma_opt.empty()) header << ",gamma_opt";
    header << ",speed";
    const int n = record.states.front().dim();
    if (with_states)
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c)
                header << ",rho_" << r << "_" << c << "_re,rho_" << r << "_" << c << "_im";
    out << header.str() << "\n";

    for (std::size_t i = 0; i < record.size(); ++i) {
        out << format_double(record.times[i]) << ',' << format_double(record.norms[i]) << ','
            << format_double(record.decay_rates[i]);
        if (!gamma_opt.empty()) out << ',' << format_double(gamma_opt[i]);
        out << ',' << format_double(record.speeds[i]);
        if (with_states) {
            const Matrix& m = record.states[i].matrix();
            for (int r = 0; r < n; ++r)
                for (int c = 0; c < n; ++c)
                    out << ',' << format_double(m(r, c).real()) << ','
                        << format_double(m(r, c).imag());
        }
        out << "\n";
    }
    if (!out) throw NumericsError("emit_csv", "write failure on " + path);
}

struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

inline CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw NumericsError("read_csv", "cannot open " + path);
    CsvTable table;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line.rfind("# columns:", 0) == 0) {
            std::istringstream names(line.substr(10));
            std::string name;
            while (std::getline(names, name, ',')) {
                const auto start = name.find_first_not_of(' ');
                table.columns.push_back(start == std::string::npos ? name
                                                                   : name.substr(start));
            }
            continue;
        }
        if (line[0] == '#') continue;
        std::vector<double> row;
        std::istringstream cells(line);
        std::string cell;
        while (std::getline(cells, cell, ',')) row.push_back(std::stod(cell));
        table.rows.push_back(std::move(row));
    }
    return table;
}

}  // namespace qgeo
