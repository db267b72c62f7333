#include "actlex/impression.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <vector>

#include "actlex/csv.hpp"
#include "actlex/errors.hpp"

namespace actlex {

namespace {

constexpr std::array<char, 3> kDims = {'e', 'p', 'a'};

std::array<std::string, kBasisSize> make_labels() {
    std::array<std::string, kBasisSize> labels;
    std::size_t r = 0;
    labels[r++] = "1";
    for (char who : {'A', 'B', 'O'}) {
        for (char d : kDims) labels[r++] = std::string{who, d};
    }
    for (auto [x, y] : {std::pair{'A', 'B'}, std::pair{'A', 'O'}, std::pair{'B', 'O'}}) {
        for (char i : kDims) {
            for (char j : kDims) labels[r++] = std::string{x, i, y, j};
        }
    }
    for (char i : kDims) {
        for (char j : kDims) {
            for (char k : kDims) labels[r++] = std::string{'A', i, 'B', j, 'O', k};
        }
    }
    return labels;
}

std::string output_label(std::size_t col) { return std::string(kProfileLabels[col]) + "'"; }

}  // namespace

const std::array<std::string, kBasisSize>& basis_labels() {
    static const auto labels = make_labels();
    return labels;
}

int basis_index(std::string_view label) {
    const auto& labels = basis_labels();
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == label) return static_cast<int>(i);
    }
    return -1;
}

BasisVector basis_expand(const EventProfile& x) {
    const auto& A = x.actor;
    const auto& B = x.behavior;
    const auto& O = x.object;
    BasisVector out{};
    std::size_t r = 0;
    out[r++] = 1.0;
    for (const Epa* c : {&A, &B, &O}) {
        for (std::size_t d = 0; d < 3; ++d) out[r++] = (*c)[d];
    }
    for (auto [u, v] : {std::pair{&A, &B}, std::pair{&A, &O}, std::pair{&B, &O}}) {
        for (std::size_t i = 0; i < 3; ++i) {
            for (std::size_t j = 0; j < 3; ++j) out[r++] = (*u)[i] * (*v)[j];
        }
    }
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) {
            const double ab = A[i] * B[j];
            for (std::size_t k = 0; k < 3; ++k) out[r++] = ab * O[k];
        }
    }
    return out;
}

CoefficientSet::CoefficientSet(const Matrix& rows, std::string id) : rows_(rows), id_(std::move(id)) {
    validate();
}

CoefficientSet CoefficientSet::zero(std::string id) {
    CoefficientSet c;
    c.id_ = std::move(id);
    return c;
}

CoefficientSet CoefficientSet::identity() {
    CoefficientSet c;
    c.id_ = "identity";
    for (std::size_t i = 0; i < EventProfile::kSize; ++i) c.rows_[1 + i][i] = 1.0;
    return c;
}

void CoefficientSet::set(std::size_t row, std::size_t col, double value) {
    if (row >= kBasisSize || col >= EventProfile::kSize) {
        throw ConfigError("coefficient index out of range");
    }
    if (!std::isfinite(value)) throw ConfigError("non-finite coefficient for " + basis_labels()[row]);
    rows_[row][col] = value;
}

void CoefficientSet::set(std::string_view label, std::size_t col, double value) {
    int r = basis_index(label);
    if (r < 0) throw ConfigError("unknown basis label '" + std::string(label) + "'");
    set(static_cast<std::size_t>(r), col, value);
}

void CoefficientSet::validate() const {
    for (std::size_t r = 0; r < kBasisSize; ++r) {
        for (double v : rows_[r]) {
            if (!std::isfinite(v)) throw ConfigError("non-finite coefficient in row " + basis_labels()[r]);
        }
    }
}

EventProfile impression(const EventProfile& x, const CoefficientSet& coeffs) {
    const BasisVector basis = basis_expand(x);
    std::array<double, EventProfile::kSize> out{};
    const auto& rows = coeffs.rows();
    for (std::size_t r = 0; r < kBasisSize; ++r) {
        const double t = basis[r];
        if (t == 0.0) continue;
        for (std::size_t c = 0; c < EventProfile::kSize; ++c) out[c] += t * rows[r][c];
    }
    return EventProfile::unflatten(out);
}

double deflection(const EventProfile& fundamentals, const EventProfile& transients) {
    const auto f = fundamentals.flatten();
    const auto t = transients.flatten();
    double sum = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double d = t[i] - f[i];
        sum += d * d;
    }
    return sum;
}

CoefficientSet read_coefficients(std::istream& in, const std::string& source_name) {
    CoefficientSet coeffs = CoefficientSet::zero(source_name);
    std::string line;
    std::size_t lineno = 0;
    std::vector<int> column_to_output;
    std::vector<bool> seen(kBasisSize, false);
    bool have_header = false;

    while (std::getline(in, line)) {
        ++lineno;
        std::string t = csv::trim(line);
        if (t.empty() || t.front() == '#') continue;
        auto where = [&] { return source_name + ":" + std::to_string(lineno); };
        auto fields = csv::split_line(line, '\t');
        if (!have_header) {
            std::vector<bool> found(EventProfile::kSize, false);
            column_to_output.assign(fields.size(), -1);
            for (std::size_t i = 1; i < fields.size(); ++i) {
                std::string name = csv::trim(fields[i]);
                for (std::size_t c = 0; c < EventProfile::kSize; ++c) {
                    if (name == output_label(c)) {
                        if (found[c]) throw ConfigError(where() + ": duplicate column " + name);
                        found[c] = true;
                        column_to_output[i] = static_cast<int>(c);
                    }
                }
                if (column_to_output[i] < 0) throw ConfigError(where() + ": unknown column '" + name + "'");
            }
            for (std::size_t c = 0; c < EventProfile::kSize; ++c) {
                if (!found[c]) throw ConfigError(where() + ": missing column " + output_label(c));
            }
            have_header = true;
            continue;
        }
        if (fields.size() != column_to_output.size()) {
            throw ConfigError(where() + ": expected " + std::to_string(column_to_output.size()) + " fields");
        }
        std::string label = csv::trim(fields[0]);
        int row = basis_index(label);
        if (row < 0) throw ConfigError(where() + ": unknown basis label '" + label + "'");
        if (seen[row]) throw ConfigError(where() + ": duplicate row '" + label + "'");
        seen[row] = true;
        for (std::size_t i = 1; i < fields.size(); ++i) {
            double v = 0.0;
            try {
                v = csv::parse_double(fields[i], label);
            } catch (const ParseError& e) {
                throw ConfigError(where() + ": " + e.what());
            }
            coeffs.set(static_cast<std::size_t>(row), static_cast<std::size_t>(column_to_output[i]), v);
        }
    }
    if (!have_header) throw ConfigError(source_name + ": empty coefficient file");
    return coeffs;
}

CoefficientSet load_coefficients(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open coefficient file " + path.string());
    auto c = read_coefficients(in, path.string());
    c.set_id(path.stem().string());
    return c;
}

void write_coefficients(std::ostream& out, const CoefficientSet& coeffs, bool skip_zero_rows) {
    out << "term";
    for (std::size_t c = 0; c < EventProfile::kSize; ++c) out << '\t' << output_label(c);
    out << '\n';
    for (std::size_t r = 0; r < kBasisSize; ++r) {
        const auto& row = coeffs.rows()[r];
        bool zero = true;
        for (double v : row) zero = zero && v == 0.0;
        if (zero && skip_zero_rows) continue;
        out << basis_labels()[r];
        for (double v : row) out << '\t' << csv::format_double(v);
        out << '\n';
    }
}

}  // namespace actlex
