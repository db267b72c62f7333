#include "actlex/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>

#include <boost/math/distributions/students_t.hpp>

#include "actlex/errors.hpp"

namespace actlex {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Pairs {
    std::vector<Epa> a;
    std::vector<Epa> b;
};

std::array<DimensionStats, 3> dimension_stats(const Pairs& pairs) {
    std::array<DimensionStats, 3> out{};
    const std::size_t n = pairs.a.size();
    for (std::size_t d = 0; d < 3; ++d) {
        std::vector<double> x(n), y(n);
        double abs_sum = 0.0, sq_sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = pairs.a[i][d];
            y[i] = pairs.b[i][d];
            const double diff = y[i] - x[i];
            abs_sum += std::abs(diff);
            sq_sum += diff * diff;
        }
        auto& s = out[d];
        s.abs_error = n ? abs_sum / static_cast<double>(n) : kNaN;
        s.root_mean_sq = n ? std::sqrt(sq_sum / static_cast<double>(n)) : kNaN;
        s.r = pearson(x, y);
        s.p = pearson_p_value(s.r, n);
        s.stars = significance_stars(s.p);
    }
    return out;
}

CategoryComparison make_row(Category c, const std::string& source, const Pairs& pairs) {
    CategoryComparison row;
    row.category = c;
    row.source = source;
    row.count = pairs.a.size();
    row.dims = dimension_stats(pairs);
    if (row.count < 2) {
        row.notes.push_back("fewer than 2 shared items: correlation omitted");
    } else {
        for (std::size_t d = 0; d < 3; ++d) {
            if (std::isnan(row.dims[d].r)) {
                row.notes.push_back(std::string("zero variance on ") + "EPA"[d] + ": correlation undefined");
            }
        }
    }
    return row;
}

}  // namespace

double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw ShapeError("pearson: inputs differ in length");
    const std::size_t n = x.size();
    if (n < 2) return kNaN;
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) return kNaN;
    const double r = sxy / std::sqrt(sxx * syy);
    return std::clamp(r, -1.0, 1.0);
}

double pearson_p_value(double r, std::size_t n) {
    if (std::isnan(r) || n < 3) return kNaN;
    const double df = static_cast<double>(n - 2);
    if (std::abs(r) >= 1.0) return 0.0;
    const double t = std::abs(r) * std::sqrt(df / (1.0 - r * r));
    boost::math::students_t dist(df);
    return 2.0 * boost::math::cdf(boost::math::complement(dist, t));
}

std::string significance_stars(double p) {
    if (std::isnan(p)) return {};
    if (p < 0.001) return "***";
    if (p < 0.01) return "**";
    if (p < 0.05) return "*";
    return {};
}

void ComparisonReport::check_invariants() const {
    for (const auto& row : rows) {
        for (const auto& d : row.dims) {
            if (row.count > 0 && d.root_mean_sq + 1e-12 < d.abs_error) {
                throw std::logic_error("comparison report violates RMSD >= MAD");
            }
        }
    }
}

ComparisonReport compare_lexicons(const SentimentLexicon& a, const SentimentLexicon& b, const std::string& source) {
    ComparisonReport report;
    report.kind = ErrorKind::dictionary;
    for (Category c : kCategories) {
        Pairs pairs;
        for (const auto& [key, ea] : a) {
            if (key.second != c) continue;
            if (const auto* eb = b.find(key.first, c)) {
                pairs.a.push_back(ea.epa);
                pairs.b.push_back(eb->epa);
            }
        }
        report.rows.push_back(make_row(c, source.empty() ? b.metadata().name : source, pairs));
    }
    report.check_invariants();
    return report;
}

ComparisonReport model_eval(std::span<const LabeledEpa> predictions, std::span<const LabeledEpa> targets,
                            const std::string& source) {
    std::map<std::string, const LabeledEpa*> by_id;
    for (const auto& t : targets) by_id[t.id] = &t;
    std::set<std::string> predicted;
    std::vector<std::string> offenders;
    std::map<Category, Pairs> pairs;
    for (const auto& p : predictions) {
        predicted.insert(p.id);
        auto it = by_id.find(p.id);
        if (it == by_id.end()) {
            offenders.push_back(p.id + " (no target)");
            continue;
        }
        if (it->second->category != p.category) {
            offenders.push_back(p.id + " (category mismatch)");
            continue;
        }
        pairs[p.category].a.push_back(it->second->epa);
        pairs[p.category].b.push_back(p.epa);
    }
    for (const auto& t : targets) {
        if (!predicted.contains(t.id)) offenders.push_back(t.id + " (no prediction)");
    }
    if (!offenders.empty()) {
        std::string msg = "predictions and targets are not aligned:";
        for (const auto& o : offenders) msg += "\n  " + o;
        throw AlignmentError(msg);
    }
    ComparisonReport report;
    report.kind = ErrorKind::model;
    for (Category c : kCategories) {
        auto it = pairs.find(c);
        if (it == pairs.end()) continue;
        report.rows.push_back(make_row(c, source, it->second));
    }
    report.check_invariants();
    return report;
}

CorrelationMatrix correlate(std::span<const Epa> rows, std::span<const Epa> cols) {
    if (rows.size() != cols.size()) throw ShapeError("correlate: inputs differ in length");
    CorrelationMatrix m;
    m.n = rows.size();
    m.low_n = m.n < 3;
    for (std::size_t i = 0; i < 3; ++i) {
        std::vector<double> x;
        for (const auto& e : rows) x.push_back(e[i]);
        for (std::size_t j = 0; j < 3; ++j) {
            std::vector<double> y;
            for (const auto& e : cols) y.push_back(e[j]);
            m.r[i][j] = pearson(x, y);
            m.p[i][j] = pearson_p_value(m.r[i][j], m.n);
        }
    }
    return m;
}

CrossMatrices cross_matrices(std::span<const Epa> estimates, std::span<const Epa> surveys) {
    if (estimates.size() != surveys.size()) throw AlignmentError("estimates and surveys differ in length");
    if (estimates.size() < 2) throw InvalidInputError("cross_matrices needs at least 2 aligned items");
    CrossMatrices out;
    out.estimate_vs_survey = correlate(estimates, surveys);
    out.estimate_vs_survey.row_labels = {"EE", "EP", "EA"};
    out.survey_vs_survey = correlate(surveys, surveys);
    out.estimate_vs_estimate = correlate(estimates, estimates);
    out.estimate_vs_estimate.row_labels = {"EE", "EP", "EA"};
    out.estimate_vs_estimate.col_labels = {"EE", "EP", "EA"};
    return out;
}

CorrelationMatrix category_pair_correlations(const SentimentLexicon& lexicon, Category a, Category b) {
    std::vector<Epa> xa, xb;
    for (const auto& [key, e] : lexicon) {
        if (key.second != a) continue;
        if (const auto* other = lexicon.find(key.first, b)) {
            xa.push_back(e.epa);
            xb.push_back(other->epa);
        }
    }
    CorrelationMatrix m;
    if (xa.empty()) {
        for (auto& row : m.r) row.fill(kNaN);
        for (auto& row : m.p) row.fill(kNaN);
        m.low_n = true;
        return m;
    }
    return correlate(xa, xb);
}

}  // namespace actlex
