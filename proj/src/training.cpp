#include "actlex/training.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "actlex/errors.hpp"
#include "actlex/rng.hpp"

namespace actlex {

void TrainingConfig::validate() const {
    if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) throw ConfigError("learning rate must be >= 0");
    if (batch_size == 0) throw ConfigError("batch size must be at least 1");
    if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
        throw ConfigError("moment decay rates must lie in [0, 1)");
    }
    if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
    if (!(weight_decay >= 0.0)) throw ConfigError("weight decay must be >= 0");
    if (eval_interval == 0) throw ConfigError("evaluation interval must be at least 1");
}

AdamW::AdamW(const HeadModel& model, const TrainingConfig& config) : config_(config) {
    auto params = model.parameters();
    for (std::size_t p = 0; p < params.size(); ++p) {
        m_[p].assign(params[p]->size(), 0.0);
        v_[p].assign(params[p]->size(), 0.0);
    }
}

void AdamW::step(HeadModel& model, const HeadGradient& grad) {
    ++t_;
    const double lr = config_.learning_rate;
    const double decay = 1.0 - lr * config_.weight_decay;
    const double c1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
    auto params = model.parameters();
    auto grads = grad.parameters();
    for (std::size_t p = 0; p < params.size(); ++p) {
        auto& w = *params[p];
        const auto& g = *grads[p];
        auto& m = m_[p];
        auto& v = v_[p];
        for (std::size_t i = 0; i < w.size(); ++i) {
            m[i] = config_.beta1 * m[i] + (1.0 - config_.beta1) * g[i];
            v[i] = config_.beta2 * v[i] + (1.0 - config_.beta2) * g[i] * g[i];
            const double mhat = m[i] / c1;
            const double vhat = v[i] / c2;
            w[i] *= decay;
            w[i] -= lr * mhat / (std::sqrt(vhat) + config_.epsilon);
        }
    }
}

TrainingResult train(HeadModel model, std::span<const TrainingExample> train_set,
                     std::span<const TrainingExample> test_set, const TrainingConfig& config) {
    config.validate();
    model.validate();
    if (train_set.empty() || test_set.empty()) throw ConfigError("training and test sets must be non-empty");
    std::set<std::string> ids;
    for (const auto& ex : train_set) ids.insert(ex.id);
    for (const auto& ex : test_set) {
        if (!ex.id.empty() && ids.contains(ex.id)) throw ConfigError("example '" + ex.id + "' is in both train and test sets");
    }
    for (const auto* set : {&train_set, &test_set}) {
        for (const auto& ex : *set) {
            if (ex.embedding.size() != model.input_dim) {
                throw ShapeError("example '" + ex.id + "' has dimension " + std::to_string(ex.embedding.size()) +
                                 ", model expects " + std::to_string(model.input_dim));
            }
        }
    }

    Rng rng(config.seed);
    AdamW optimizer(model, config);
    HeadGradient grad(model);
    std::vector<std::size_t> order(train_set.size());
    std::iota(order.begin(), order.end(), 0);
    std::size_t cursor = order.size();
    std::vector<TrainingExample> batch;

    TrainingResult result;
    result.best_test_loss = loss(model, test_set, config.test_reduction);
    result.model = model;
    std::size_t stale = 0;
    double running = 0.0;
    std::size_t running_n = 0;

    auto evaluate = [&](std::size_t step) {
        const double test_loss = loss(model, test_set, config.test_reduction);
        result.history.push_back({step, running_n ? running / static_cast<double>(running_n) : 0.0, test_loss});
        running = 0.0;
        running_n = 0;
        if (test_loss < result.best_test_loss) {
            result.best_test_loss = test_loss;
            result.best_step = step;
            result.model = model;
            stale = 0;
        } else {
            ++stale;
        }
    };

    std::size_t step = 0;
    while (step < config.max_steps) {
        batch.clear();
        while (batch.size() < config.batch_size && batch.size() < train_set.size()) {
            if (cursor == order.size()) {
                rng.shuffle(order);
                cursor = 0;
            }
            batch.push_back(train_set[order[cursor++]]);
        }
        running += loss_and_gradient(model, batch, grad);
        ++running_n;
        optimizer.step(model, grad);
        ++step;
        if (step % config.eval_interval == 0 || step == config.max_steps) {
            evaluate(step);
            if (config.patience > 0 && stale >= config.patience) {
                result.early_stopped = true;
                break;
            }
        }
    }
    result.steps = step;
    return result;
}

}  // namespace actlex
