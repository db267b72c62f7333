#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "actlex/epa.hpp"
#include "actlex/lexicon.hpp"

namespace actlex {

// Pearson correlation; NaN when either input has zero variance or n < 2.
double pearson(std::span<const double> x, std::span<const double> y);
// Two-sided p-value of r under a t-test with n - 2 degrees of freedom.
double pearson_p_value(double r, std::size_t n);
// "***" below 0.001, "**" below 0.01, "*" below 0.05, otherwise empty.
std::string significance_stars(double p);

enum class ErrorKind { dictionary, model };

struct DimensionStats {
    double abs_error = 0.0;   // MAD or MAE
    double root_mean_sq = 0.0;  // RMSD or RMSE
    double r = 0.0;
    double p = 0.0;
    std::string stars;
};

struct CategoryComparison {
    Category category = Category::identity;
    std::string source;
    std::size_t count = 0;
    std::array<DimensionStats, 3> dims{};
    std::vector<std::string> notes;
};

/// Per-category error and correlation table: dictionary-vs-dictionary
/// (MAD/RMSD) or model-vs-survey (MAE/RMSE). The formulas are identical.
struct ComparisonReport {
    ErrorKind kind = ErrorKind::dictionary;
    std::vector<CategoryComparison> rows;

    // Throws std::logic_error when RMSD < MAD anywhere.
    void check_invariants() const;
};

using DictComparison = ComparisonReport;

// Statistics over the (term, category) keys both lexicons share. `source`
// labels the rows (typically the name of `b`).
ComparisonReport compare_lexicons(const SentimentLexicon& a, const SentimentLexicon& b, const std::string& source = {});

struct LabeledEpa {
    std::string id;
    Category category = Category::identity;
    Epa epa;
};

// Throws AlignmentError listing ids present on one side only or whose
// categories disagree.
ComparisonReport model_eval(std::span<const LabeledEpa> predictions, std::span<const LabeledEpa> targets,
                            const std::string& source = "model");

struct CorrelationMatrix {
    std::array<std::string, 3> row_labels{"E", "P", "A"};
    std::array<std::string, 3> col_labels{"E", "P", "A"};
    std::array<std::array<double, 3>, 3> r{};
    std::array<std::array<double, 3>, 3> p{};
    std::size_t n = 0;
    bool low_n = false;

    std::string stars(std::size_t i, std::size_t j) const { return significance_stars(p[i][j]); }
};

// r[i][j] = corr(rows dimension i, cols dimension j).
CorrelationMatrix correlate(std::span<const Epa> rows, std::span<const Epa> cols);

struct CrossMatrices {
    CorrelationMatrix estimate_vs_survey;
    CorrelationMatrix survey_vs_survey;
    CorrelationMatrix estimate_vs_estimate;
};

// Throws InvalidInputError unless there are >= 2 aligned pairs.
CrossMatrices cross_matrices(std::span<const Epa> estimates, std::span<const Epa> surveys);

// Correlation of the EPA of terms listed under both categories. n = 0 when
// the categories share no terms; low_n when fewer than 3 do.
CorrelationMatrix category_pair_correlations(const SentimentLexicon& lexicon, Category a, Category b);

}  // namespace actlex
