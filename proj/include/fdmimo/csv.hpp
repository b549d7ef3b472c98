// SPDX-License-Identifier: Apache-2.0
//
// fdmimo: elevation beamforming simulator for full-dimension MIMO arrays
// Copyright (C) 2026 the fdmimo contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------
//
// CSV export/import: complex matrices as (row, col, re, im) records for
// cross-language validation, and the tabular Monte-Carlo result format.

#ifndef FDMIMO_CSV_HPP
#define FDMIMO_CSV_HPP

#include <charconv>
#include <fstream>
#include <sstream>

#include "fdmimo/common.hpp"

namespace fdmimo {

namespace detail {

/// Locale-independent shortest round-trip formatting.
inline std::string fmt_double(double v)
{
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view s)
{
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{})
        throw std::runtime_error("csv: malformed number '" + std::string(s) + "'");
    return v;
}

template <class Int>
Int parse_int(std::string_view s)
{
    Int v{};
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{})
        throw std::runtime_error("csv: malformed integer '" + std::string(s) + "'");
    return v;
}

inline std::vector<std::string_view> split_csv_line(std::string_view line)
{
    std::vector<std::string_view> out;
    size_t pos = 0;
    while (true)
    {
        const size_t c = line.find(',', pos);
        if (c == std::string_view::npos)
        {
            out.push_back(line.substr(pos));
            break;
        }
        out.push_back(line.substr(pos, c - pos));
        pos = c + 1;
    }
    return out;
}

} // namespace detail

/// Writes a complex matrix as "row,col,re,im" records (0-based indices).
inline void save_matrix_csv(const MatrixXcd& m, const std::string& path)
{
    std::ofstream f(path);
    if (!f)
        throw std::runtime_error("csv: cannot open '" + path + "' for writing");
    f << "row,col,re,im\n";
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            f << r << ',' << c << ',' << detail::fmt_double(m(r, c).real()) << ','
              << detail::fmt_double(m(r, c).imag()) << '\n';
    if (!f)
        throw std::runtime_error("csv: write to '" + path + "' failed");
}

inline MatrixXcd load_matrix_csv(const std::string& path)
{
    std::ifstream f(path);
    if (!f)
        throw std::runtime_error("csv: cannot open '" + path + "' for reading");
    std::string line;
    if (!std::getline(f, line) || line.rfind("row,col,re,im", 0) != 0)
        throw std::runtime_error("csv: '" + path + "' is not a matrix file (row,col,re,im)");
    struct Rec
    {
        long r, c;
        cxd v;
    };
    std::vector<Rec> recs;
    long max_r = -1, max_c = -1;
    while (std::getline(f, line))
    {
        if (line.empty())
            continue;
        const auto parts = detail::split_csv_line(line);
        if (parts.size() != 4)
            throw std::runtime_error("csv: malformed matrix row in '" + path + "'");
        Rec rec{detail::parse_int<long>(parts[0]), detail::parse_int<long>(parts[1]),
                {detail::parse_double(parts[2]), detail::parse_double(parts[3])}};
        max_r = std::max(max_r, rec.r);
        max_c = std::max(max_c, rec.c);
        recs.push_back(rec);
    }
    if (max_r < 0)
        throw std::runtime_error("csv: matrix file '" + path + "' has no entries");
    MatrixXcd m = MatrixXcd::Zero(max_r + 1, max_c + 1);
    for (const auto& rec : recs)
        m(rec.r, rec.c) = rec.v;
    return m;
}

/// One aggregated experiment output row.
struct ResultRow
{
    std::string scenario;
    std::string strategy;
    double sweep = 0.0;
    std::string metric;
    double value = 0.0;
    double std_error = 0.0;
    long trials = 0;
    uint64_t seed = 0;

    friend bool operator==(const ResultRow&, const ResultRow&) = default;
};

struct ResultTable
{
    std::vector<ResultRow> rows;

    friend bool operator==(const ResultTable&, const ResultTable&) = default;

    const ResultRow& find(std::string_view strategy, std::string_view metric, double sweep = 0.0) const
    {
        for (const auto& r : rows)
            if (r.strategy == strategy && r.metric == metric && r.sweep == sweep)
                return r;
        throw std::runtime_error("result table: no row for strategy '" + std::string(strategy) +
                                 "', metric '" + std::string(metric) + "'");
    }
};

/// Stable column order; UTF-8, '.' decimal.
inline void export_csv(const ResultTable& table, const std::string& path)
{
    std::ofstream f(path);
    if (!f)
        throw std::runtime_error("csv: cannot open '" + path + "' for writing");
    f << "scenario,strategy,sweep,metric,value,stderr,trials,seed\n";
    for (const auto& r : table.rows)
    {
        if (r.scenario.find(',') != std::string::npos || r.strategy.find(',') != std::string::npos ||
            r.metric.find(',') != std::string::npos)
            throw std::runtime_error("csv: field names must not contain commas");
        f << r.scenario << ',' << r.strategy << ',' << detail::fmt_double(r.sweep) << ',' << r.metric
          << ',' << detail::fmt_double(r.value) << ',' << detail::fmt_double(r.std_error) << ','
          << r.trials << ',' << r.seed << '\n';
    }
    if (!f)
        throw std::runtime_error("csv: write to '" + path + "' failed");
}

inline ResultTable import_csv(const std::string& path)
{
    std::ifstream f(path);
    if (!f)
        throw std::runtime_error("csv: cannot open '" + path + "' for reading");
    std::string line;
    if (!std::getline(f, line) || line.rfind("scenario,strategy,sweep,metric,value,stderr,trials,seed", 0) != 0)
        throw std::runtime_error("csv: '" + path + "' is not a result table");
    ResultTable t;
    while (std::getline(f, line))
    {
        if (line.empty())
            continue;
        const auto p = detail::split_csv_line(line);
        if (p.size() != 8)
            throw std::runtime_error("csv: malformed result row in '" + path + "'");
        ResultRow r;
        r.scenario = std::string(p[0]);
        r.strategy = std::string(p[1]);
        r.sweep = detail::parse_double(p[2]);
        r.metric = std::string(p[3]);
        r.value = detail::parse_double(p[4]);
        r.std_error = detail::parse_double(p[5]);
        r.trials = detail::parse_int<long>(p[6]);
        r.seed = detail::parse_int<uint64_t>(p[7]);
        t.rows.push_back(std::move(r));
    }
    return t;
}

} // namespace fdmimo

#endif
