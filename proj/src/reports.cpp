#include "actlex/reports.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>

#include "actlex/csv.hpp"
#include "actlex/errors.hpp"

namespace actlex {

namespace {

const char* error_name(ErrorKind k) { return k == ErrorKind::dictionary ? "MAD" : "MAE"; }
const char* rms_name(ErrorKind k) { return k == ErrorKind::dictionary ? "RMSD" : "RMSE"; }

std::string fixed(double x, int digits = 2) {
    if (std::isnan(x)) return "NaN";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.*f", digits, x);
    return buf;
}

constexpr const char* kDims[3] = {"E", "P", "A"};

}  // namespace

void render_comparison_table(std::ostream& out, std::span<const ComparisonReport> reports) {
    if (reports.empty()) return;
    const ErrorKind kind = reports.front().kind;
    char line[256];
    std::snprintf(line, sizeof line, "%-10s %-16s | %-20s | %-20s | %-29s | %6s\n", "", "", error_name(kind),
                  rms_name(kind), "Correlation", "Count");
    out << line;
    std::snprintf(line, sizeof line, "%-10s %-16s | %6s %6s %6s | %6s %6s %6s | %9s %9s %9s | %6s\n", "Category",
                  "Source", "E", "P", "A", "E", "P", "A", "E", "P", "A", "");
    out << line;
    for (Category c : kCategories) {
        bool first = true;
        for (const auto& rep : reports) {
            for (const auto& row : rep.rows) {
                if (row.category != c) continue;
                const auto& d = row.dims;
                std::snprintf(line, sizeof line, "%-10s %-16s | %6s %6s %6s | %6s %6s %6s | %9s %9s %9s | %6zu\n",
                              first ? std::string(to_string(c)).c_str() : "", row.source.c_str(),
                              fixed(d[0].abs_error).c_str(), fixed(d[1].abs_error).c_str(),
                              fixed(d[2].abs_error).c_str(), fixed(d[0].root_mean_sq).c_str(),
                              fixed(d[1].root_mean_sq).c_str(), fixed(d[2].root_mean_sq).c_str(),
                              (fixed(d[0].r) + d[0].stars).c_str(), (fixed(d[1].r) + d[1].stars).c_str(),
                              (fixed(d[2].r) + d[2].stars).c_str(), row.count);
                out << line;
                first = false;
                for (const auto& note : row.notes) out << "    note: " << note << '\n';
            }
        }
    }
}

void write_comparison_csv(std::ostream& out, std::span<const ComparisonReport> reports) {
    const ErrorKind kind = reports.empty() ? ErrorKind::dictionary : reports.front().kind;
    const std::string err = csv::lower(error_name(kind));
    const std::string rms = csv::lower(rms_name(kind));
    std::vector<std::string> header = {"category", "source", "count"};
    for (const auto& prefix : {err, rms, std::string("r"), std::string("p")}) {
        for (const char* d : kDims) header.push_back(prefix + "_" + d);
    }
    csv::write_row(out, header);
    for (const auto& rep : reports) {
        for (const auto& row : rep.rows) {
            std::vector<std::string> f = {std::string(to_string(row.category)), row.source, std::to_string(row.count)};
            for (const auto& d : row.dims) f.push_back(csv::format_double(d.abs_error));
            for (const auto& d : row.dims) f.push_back(csv::format_double(d.root_mean_sq));
            for (const auto& d : row.dims) f.push_back(csv::format_double(d.r));
            for (const auto& d : row.dims) f.push_back(csv::format_double(d.p));
            csv::write_row(out, f);
        }
    }
}

ComparisonReport read_comparison_csv(std::istream& in) {
    ComparisonReport report;
    std::string line;
    bool header = true;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (csv::trim(line).empty()) continue;
        auto f = csv::split_line(line);
        if (header) {
            if (f.size() != 15 || f[0] != "category") throw ParseError("comparison CSV: unexpected header");
            report.kind = f[3] == "mad_E" ? ErrorKind::dictionary : ErrorKind::model;
            header = false;
            continue;
        }
        if (f.size() != 15) throw ParseError("comparison CSV line " + std::to_string(lineno) + ": expected 15 fields");
        CategoryComparison row;
        row.category = parse_category(f[0]);
        row.source = f[1];
        row.count = static_cast<std::size_t>(csv::parse_double(f[2], "count"));
        for (std::size_t d = 0; d < 3; ++d) {
            row.dims[d].abs_error = csv::parse_double(f[3 + d], "error");
            row.dims[d].root_mean_sq = csv::parse_double(f[6 + d], "rms");
            row.dims[d].r = csv::parse_double(f[9 + d], "r");
            row.dims[d].p = csv::parse_double(f[12 + d], "p");
            row.dims[d].stars = significance_stars(row.dims[d].p);
        }
        report.rows.push_back(std::move(row));
    }
    report.check_invariants();
    return report;
}

void render_matrices(std::ostream& out, std::span<const NamedMatrix> matrices) {
    char cell[64];
    for (const auto& [name, m] : matrices) {
        std::snprintf(cell, sizeof cell, "%-6s", name.c_str());
        out << cell;
        for (const auto& c : m.col_labels) {
            std::snprintf(cell, sizeof cell, " %9s", c.c_str());
            out << cell;
        }
        out << "   ";
    }
    out << '\n';
    for (std::size_t i = 0; i < 3; ++i) {
        for (const auto& [name, m] : matrices) {
            std::snprintf(cell, sizeof cell, "%-6s", m.row_labels[i].c_str());
            out << cell;
            for (std::size_t j = 0; j < 3; ++j) {
                std::snprintf(cell, sizeof cell, " %9s", (fixed(m.r[i][j]) + m.stars(i, j)).c_str());
                out << cell;
            }
            out << "   ";
        }
        out << '\n';
    }
    for (const auto& [name, m] : matrices) {
        if (m.low_n) out << name << ": only " << m.n << " shared items\n";
    }
}

void write_matrices_csv(std::ostream& out, std::span<const NamedMatrix> matrices) {
    out << "table,row,col,r,p,n\n";
    for (const auto& [name, m] : matrices) {
        for (std::size_t i = 0; i < 3; ++i) {
            for (std::size_t j = 0; j < 3; ++j) {
                csv::write_row(out, {name, m.row_labels[i], m.col_labels[j], csv::format_double(m.r[i][j]),
                                     csv::format_double(m.p[i][j]), std::to_string(m.n)});
            }
        }
    }
}

std::vector<NamedMatrix> read_matrices_csv(std::istream& in) {
    std::vector<NamedMatrix> out;
    std::map<std::string, std::size_t> index;
    std::map<std::string, std::size_t> filled;
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (csv::trim(line).empty()) continue;
        auto f = csv::split_line(line);
        if (header) {
            if (f.size() != 6 || f[0] != "table") throw ParseError("matrix CSV: unexpected header");
            header = false;
            continue;
        }
        if (f.size() != 6) throw ParseError("matrix CSV: expected 6 fields");
        auto [it, fresh] = index.emplace(f[0], out.size());
        if (fresh) out.push_back({f[0], CorrelationMatrix{}});
        auto& m = out[it->second].second;
        const std::size_t k = filled[f[0]]++;
        if (k >= 9) throw ParseError("matrix CSV: more than 9 cells for " + f[0]);
        const std::size_t i = k / 3, j = k % 3;
        m.row_labels[i] = f[1];
        m.col_labels[j] = f[2];
        m.r[i][j] = csv::parse_double(f[3], "r");
        m.p[i][j] = csv::parse_double(f[4], "p");
        m.n = static_cast<std::size_t>(csv::parse_double(f[5], "n"));
        m.low_n = m.n < 3;
    }
    return out;
}

void write_scatter_csv(std::ostream& out, const SentimentLexicon& lexicon, const std::string& source) {
    out << "term,category,E,P,A,source\n";
    for (const auto& [key, e] : lexicon) {
        csv::write_row(out, {e.term, std::string(to_string(e.category)), csv::format_double(e.epa.e),
                             csv::format_double(e.epa.p), csv::format_double(e.epa.a), source});
    }
}

}  // namespace actlex
