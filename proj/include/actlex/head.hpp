#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "actlex/events.hpp"

namespace actlex {

inline constexpr std::size_t kDefaultInputDim = 1024;
inline constexpr std::size_t kDefaultHiddenDim = 256;

/// Dense -> ReLU -> dense regression head from a sentence vector to the
/// 15 slot-ordered EPA values of a MABMO event.
struct HeadModel {
    std::size_t input_dim = 0;
    std::size_t hidden_dim = 0;
    std::vector<double> w1;  // hidden x input, row-major
    std::vector<double> b1;  // hidden
    std::vector<double> w2;  // 15 x hidden, row-major
    std::vector<double> b2;  // 15
    std::uint64_t seed = 0;
    std::string model_id;

    static HeadModel zeros(std::size_t input_dim, std::size_t hidden_dim);
    // Uniform in +-sqrt(6 / (fan_in + fan_out)) per layer, zero biases.
    static HeadModel glorot(std::size_t input_dim, std::size_t hidden_dim, std::uint64_t seed);

    std::size_t parameter_count() const { return w1.size() + b1.size() + w2.size() + b2.size(); }
    // Throws ShapeError or InvalidInputError.
    void validate() const;

    std::array<std::vector<double>*, 4> parameters() { return {&w1, &b1, &w2, &b2}; }
    std::array<const std::vector<double>*, 4> parameters() const { return {&w1, &b1, &w2, &b2}; }

    friend bool operator==(const HeadModel&, const HeadModel&) = default;
};

struct TrainingExample {
    std::string id;
    std::vector<double> embedding;
    TargetVector target{};
};

// Throws ShapeError on dimension mismatch.
TargetVector forward(const HeadModel& model, std::span<const double> embedding);

enum class Reduction { mean, sum };

// Squared error summed over the 15 outputs, reduced over the batch.
double loss(const HeadModel& model, std::span<const TrainingExample> batch, Reduction reduction = Reduction::mean);

struct HeadGradient {
    std::vector<double> w1, b1, w2, b2;

    explicit HeadGradient(const HeadModel& model);
    std::array<std::vector<double>*, 4> parameters() { return {&w1, &b1, &w2, &b2}; }
    std::array<const std::vector<double>*, 4> parameters() const { return {&w1, &b1, &w2, &b2}; }
};

// Mean loss of the batch; writes its analytic gradient into `grad`. A ReLU
// unit with pre-activation exactly 0 passes no gradient.
double loss_and_gradient(const HeadModel& model, std::span<const TrainingExample> batch, HeadGradient& grad);

struct GradientCheckResult {
    double max_relative_error = 0.0;
    std::size_t checked = 0;
    // Coordinates whose perturbation would cross a ReLU kink.
    std::size_t excluded = 0;
};

// Central differences on every parameter against the analytic gradient. Away
// from kinks the loss is quadratic along any single parameter, so central
// differences carry only roundoff, which shrinks as epsilon grows.
GradientCheckResult gradient_check(const HeadModel& model, const TrainingExample& example, double epsilon = 1e-4);

// JSON container: format tag, version, dims, seed, model id and parameters.
void write_model(std::ostream& out, const HeadModel& model);
HeadModel read_model(std::istream& in);
void save_model(const std::filesystem::path& path, const HeadModel& model);
HeadModel load_model(const std::filesystem::path& path);

}  // namespace actlex
