#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "actlex/head.hpp"

namespace actlex {

struct TrainingConfig {
    double learning_rate = 2e-5;
    std::size_t batch_size = 64;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    double weight_decay = 0.01;
    std::size_t max_steps = 2000;
    // Evaluations without improvement before stopping; 0 disables early stopping.
    std::size_t patience = 5;
    std::size_t eval_interval = 50;
    std::uint64_t seed = 0;
    Reduction test_reduction = Reduction::mean;

    // Throws ConfigError.
    void validate() const;
};

/// AdamW with decoupled weight decay: each step first shrinks every
/// parameter by (1 - lr * decay), then applies the bias-corrected Adam step.
class AdamW {
public:
    AdamW(const HeadModel& model, const TrainingConfig& config);
    void step(HeadModel& model, const HeadGradient& grad);
    std::size_t steps() const { return t_; }

private:
    TrainingConfig config_;
    std::array<std::vector<double>, 4> m_;
    std::array<std::vector<double>, 4> v_;
    std::size_t t_ = 0;
};

struct EvalRecord {
    std::size_t step = 0;
    // Mean of the mini-batch losses since the previous evaluation.
    double train_loss = 0.0;
    double test_loss = 0.0;
};

struct TrainingResult {
    HeadModel model;
    std::vector<EvalRecord> history;
    std::size_t steps = 0;
    std::size_t best_step = 0;
    double best_test_loss = 0.0;
    bool early_stopped = false;
};

// Seeded mini-batch training; the returned model holds the parameters with
// the lowest evaluated test loss. Throws ConfigError on empty or overlapping
// sets and ShapeError on dimension mismatches.
TrainingResult train(HeadModel model, std::span<const TrainingExample> train_set,
                     std::span<const TrainingExample> test_set, const TrainingConfig& config);

}  // namespace actlex
