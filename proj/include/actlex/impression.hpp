#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>

#include "actlex/epa.hpp"

namespace actlex {

inline constexpr std::size_t kBasisSize = 64;

using BasisVector = std::array<double, kBasisSize>;

// Canonical basis labels: "1"; the nine linear terms; the 27 two-way
// cross-character products in A*B, A*O, B*O blocks; the 27 three-way A*B*O
// products. Within a block indices run in e, p, a order, last index fastest.
const std::array<std::string, kBasisSize>& basis_labels();
// Index of a label, or -1 when unknown.
int basis_index(std::string_view label);

BasisVector basis_expand(const EventProfile& x);

/// Impression-change equations as a dense 64x9 matrix.
///
/// Row r holds the coefficients of basis term r for each of the nine
/// transient outputs. Sparse published equation sets simply leave rows at 0.
class CoefficientSet {
public:
    using Row = std::array<double, EventProfile::kSize>;
    using Matrix = std::array<Row, kBasisSize>;

    CoefficientSet() : rows_{} {}
    // Throws ConfigError on non-finite values.
    explicit CoefficientSet(const Matrix& rows, std::string id = {});

    static CoefficientSet zero(std::string id = "zero");
    // Linear rows carry the 9x9 identity; every profile maps to itself.
    static CoefficientSet identity();

    double operator()(std::size_t row, std::size_t col) const { return rows_[row][col]; }
    // Throws ConfigError on out-of-range indices or non-finite values.
    void set(std::size_t row, std::size_t col, double value);
    void set(std::string_view label, std::size_t col, double value);

    const Matrix& rows() const { return rows_; }
    const std::string& id() const { return id_; }
    void set_id(std::string id) { id_ = std::move(id); }

    // Throws ConfigError when any value is non-finite.
    void validate() const;

private:
    Matrix rows_;
    std::string id_;
};

// Transient profile produced by an event.
EventProfile impression(const EventProfile& x, const CoefficientSet& coeffs);

// Squared Euclidean distance over all nine dimensions, equal weights.
double deflection(const EventProfile& fundamentals, const EventProfile& transients);

// Tab-separated coefficient file. Header: a label column followed by the nine
// output columns Ae' .. Oa' in any order. Missing rows read as zero; unknown
// basis labels and duplicate rows are rejected.
CoefficientSet read_coefficients(std::istream& in, const std::string& source_name = "<stream>");
CoefficientSet load_coefficients(const std::filesystem::path& path);
void write_coefficients(std::ostream& out, const CoefficientSet& coeffs, bool skip_zero_rows = true);

}  // namespace actlex
