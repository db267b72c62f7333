#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "actlex/lexicon.hpp"
#include "actlex/metrics.hpp"

namespace actlex {

// Aligned text table: one row per (category, source) with error, RMS error,
// correlation (with stars) and count columns.
void render_comparison_table(std::ostream& out, std::span<const ComparisonReport> reports);

void write_comparison_csv(std::ostream& out, std::span<const ComparisonReport> reports);
// Reads back every row into one report; stars are recomputed from p.
ComparisonReport read_comparison_csv(std::istream& in);

using NamedMatrix = std::pair<std::string, CorrelationMatrix>;

// Matrices side by side, each headed by its name, e.g. (a) (b) (c).
void render_matrices(std::ostream& out, std::span<const NamedMatrix> matrices);
// Long format: table,row,col,r,p,n.
void write_matrices_csv(std::ostream& out, std::span<const NamedMatrix> matrices);
std::vector<NamedMatrix> read_matrices_csv(std::istream& in);

// term,category,E,P,A,source rows for external plotting.
void write_scatter_csv(std::ostream& out, const SentimentLexicon& lexicon, const std::string& source);

}  // namespace actlex
