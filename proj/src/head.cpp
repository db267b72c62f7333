#include "actlex/head.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "actlex/errors.hpp"
#include "actlex/rng.hpp"

namespace actlex {

using nlohmann::json;

namespace {

constexpr std::size_t kOut = kTargetSize;
constexpr const char* kFormatTag = "actlex-head";
constexpr int kFormatVersion = 1;

void hidden_preactivation(const HeadModel& m, std::span<const double> x, std::vector<double>& z) {
    z.resize(m.hidden_dim);
    for (std::size_t j = 0; j < m.hidden_dim; ++j) {
        const double* row = m.w1.data() + j * m.input_dim;
        double s = m.b1[j];
        for (std::size_t k = 0; k < m.input_dim; ++k) s += row[k] * x[k];
        z[j] = s;
    }
}

TargetVector output_layer(const HeadModel& m, const std::vector<double>& h) {
    TargetVector y{};
    for (std::size_t i = 0; i < kOut; ++i) {
        const double* row = m.w2.data() + i * m.hidden_dim;
        double s = m.b2[i];
        for (std::size_t j = 0; j < m.hidden_dim; ++j) s += row[j] * h[j];
        y[i] = s;
    }
    return y;
}

void check_dim(const HeadModel& m, std::span<const double> x) {
    if (x.size() != m.input_dim) {
        throw ShapeError("embedding has dimension " + std::to_string(x.size()) + ", model expects " +
                         std::to_string(m.input_dim));
    }
}

double example_error(const TargetVector& y, const TargetVector& target) {
    double s = 0.0;
    for (std::size_t i = 0; i < kOut; ++i) {
        const double d = y[i] - target[i];
        s += d * d;
    }
    return s;
}

}  // namespace

HeadModel HeadModel::zeros(std::size_t input_dim, std::size_t hidden_dim) {
    if (input_dim == 0 || hidden_dim == 0) throw ShapeError("head dimensions must be positive");
    HeadModel m;
    m.input_dim = input_dim;
    m.hidden_dim = hidden_dim;
    m.w1.assign(hidden_dim * input_dim, 0.0);
    m.b1.assign(hidden_dim, 0.0);
    m.w2.assign(kOut * hidden_dim, 0.0);
    m.b2.assign(kOut, 0.0);
    return m;
}

HeadModel HeadModel::glorot(std::size_t input_dim, std::size_t hidden_dim, std::uint64_t seed) {
    HeadModel m = zeros(input_dim, hidden_dim);
    m.seed = seed;
    Rng rng(seed);
    const double r1 = std::sqrt(6.0 / static_cast<double>(input_dim + hidden_dim));
    const double r2 = std::sqrt(6.0 / static_cast<double>(hidden_dim + kOut));
    for (double& w : m.w1) w = rng.uniform(-r1, r1);
    for (double& w : m.w2) w = rng.uniform(-r2, r2);
    return m;
}

void HeadModel::validate() const {
    if (input_dim == 0 || hidden_dim == 0) throw ShapeError("head dimensions must be positive");
    if (w1.size() != hidden_dim * input_dim || b1.size() != hidden_dim || w2.size() != kOut * hidden_dim ||
        b2.size() != kOut) {
        throw ShapeError("head parameter arrays do not match the declared dimensions");
    }
    for (const auto* p : parameters()) {
        for (double v : *p) {
            if (!std::isfinite(v)) throw InvalidInputError("head has non-finite parameters");
        }
    }
}

TargetVector forward(const HeadModel& model, std::span<const double> embedding) {
    check_dim(model, embedding);
    std::vector<double> h;
    hidden_preactivation(model, embedding, h);
    for (double& v : h) v = std::max(v, 0.0);
    return output_layer(model, h);
}

double loss(const HeadModel& model, std::span<const TrainingExample> batch, Reduction reduction) {
    if (batch.empty()) throw InvalidInputError("loss of an empty batch");
    std::vector<double> h;
    double total = 0.0;
    for (const auto& ex : batch) {
        check_dim(model, ex.embedding);
        hidden_preactivation(model, ex.embedding, h);
        for (double& v : h) v = std::max(v, 0.0);
        total += example_error(output_layer(model, h), ex.target);
    }
    return reduction == Reduction::mean ? total / static_cast<double>(batch.size()) : total;
}

HeadGradient::HeadGradient(const HeadModel& model)
    : w1(model.w1.size(), 0.0), b1(model.b1.size(), 0.0), w2(model.w2.size(), 0.0), b2(model.b2.size(), 0.0) {}

double loss_and_gradient(const HeadModel& m, std::span<const TrainingExample> batch, HeadGradient& g) {
    if (batch.empty()) throw InvalidInputError("gradient of an empty batch");
    for (auto* p : g.parameters()) std::fill(p->begin(), p->end(), 0.0);
    const double scale = 1.0 / static_cast<double>(batch.size());
    std::vector<double> z, h(m.hidden_dim), dh(m.hidden_dim);
    double total = 0.0;
    for (const auto& ex : batch) {
        check_dim(m, ex.embedding);
        hidden_preactivation(m, ex.embedding, z);
        for (std::size_t j = 0; j < m.hidden_dim; ++j) h[j] = std::max(z[j], 0.0);
        const TargetVector y = output_layer(m, h);
        std::fill(dh.begin(), dh.end(), 0.0);
        for (std::size_t i = 0; i < kOut; ++i) {
            const double err = y[i] - ex.target[i];
            total += err * err;
            const double dy = 2.0 * err * scale;
            g.b2[i] += dy;
            double* gw2 = g.w2.data() + i * m.hidden_dim;
            const double* w2 = m.w2.data() + i * m.hidden_dim;
            for (std::size_t j = 0; j < m.hidden_dim; ++j) {
                gw2[j] += dy * h[j];
                dh[j] += dy * w2[j];
            }
        }
        for (std::size_t j = 0; j < m.hidden_dim; ++j) {
            if (!(z[j] > 0.0)) continue;
            const double dz = dh[j];
            g.b1[j] += dz;
            double* gw1 = g.w1.data() + j * m.input_dim;
            for (std::size_t k = 0; k < m.input_dim; ++k) gw1[k] += dz * ex.embedding[k];
        }
    }
    return total * scale;
}

GradientCheckResult gradient_check(const HeadModel& model, const TrainingExample& example, double epsilon) {
    check_dim(model, example.embedding);
    const std::span<const TrainingExample> batch(&example, 1);
    HeadGradient analytic(model);
    loss_and_gradient(model, batch, analytic);

    std::vector<double> z;
    hidden_preactivation(model, example.embedding, z);

    HeadModel probe = model;
    GradientCheckResult result;
    auto params = probe.parameters();
    auto grads = analytic.parameters();
    for (std::size_t p = 0; p < params.size(); ++p) {
        auto& values = *params[p];
        for (std::size_t i = 0; i < values.size(); ++i) {
            // Only first-layer parameters move a pre-activation.
            double shift = 0.0;
            std::size_t unit = 0;
            if (p == 0) {
                unit = i / model.input_dim;
                shift = epsilon * std::abs(example.embedding[i % model.input_dim]);
            } else if (p == 1) {
                unit = i;
                shift = epsilon;
            }
            if ((p == 0 || p == 1) && shift > 0.0 && std::abs(z[unit]) <= shift) {
                ++result.excluded;
                continue;
            }
            const double saved = values[i];
            values[i] = saved + epsilon;
            const double up = loss(probe, batch);
            values[i] = saved - epsilon;
            const double down = loss(probe, batch);
            values[i] = saved;
            const double numeric = (up - down) / (2.0 * epsilon);
            const double exact = (*grads[p])[i];
            const double denom = std::max({std::abs(exact), std::abs(numeric), 1e-8});
            result.max_relative_error = std::max(result.max_relative_error, std::abs(exact - numeric) / denom);
            ++result.checked;
        }
    }
    return result;
}

void write_model(std::ostream& out, const HeadModel& model) {
    model.validate();
    json j;
    j["format"] = kFormatTag;
    j["version"] = kFormatVersion;
    j["input_dim"] = model.input_dim;
    j["hidden_dim"] = model.hidden_dim;
    j["output_dim"] = kOut;
    j["seed"] = model.seed;
    j["model_id"] = model.model_id;
    j["w1"] = model.w1;
    j["b1"] = model.b1;
    j["w2"] = model.w2;
    j["b2"] = model.b2;
    out << j.dump() << '\n';
}

HeadModel read_model(std::istream& in) {
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError(std::string("model file: ") + e.what());
    }
    if (j.value("format", std::string{}) != kFormatTag) throw ParseError("model file: not an actlex head model");
    if (j.value("version", 0) != kFormatVersion) throw ParseError("model file: unsupported version");
    if (j.value("output_dim", std::size_t{0}) != kOut) throw ShapeError("model file: output dimension must be 15");
    HeadModel m;
    try {
        m.input_dim = j.at("input_dim").get<std::size_t>();
        m.hidden_dim = j.at("hidden_dim").get<std::size_t>();
        m.seed = j.value("seed", std::uint64_t{0});
        m.model_id = j.value("model_id", std::string{});
        m.w1 = j.at("w1").get<std::vector<double>>();
        m.b1 = j.at("b1").get<std::vector<double>>();
        m.w2 = j.at("w2").get<std::vector<double>>();
        m.b2 = j.at("b2").get<std::vector<double>>();
    } catch (const json::exception& e) {
        throw ParseError(std::string("model file: ") + e.what());
    }
    m.validate();
    return m;
}

void save_model(const std::filesystem::path& path, const HeadModel& model) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write " + path.string());
    write_model(out, model);
}

HeadModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DependencyError("cannot open model file " + path.string());
    return read_model(in);
}

}  // namespace actlex
