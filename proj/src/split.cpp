#include "actlex/split.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "actlex/errors.hpp"
#include "actlex/rng.hpp"

namespace actlex {

void SplitSpec::validate() const {
    for (double f : {train, test, validation}) {
        if (!(f > 0.0 && f < 1.0)) throw ConfigError("split fractions must each lie in (0, 1)");
    }
    if (std::abs(train + test + validation - 1.0) > 1e-9) {
        throw ConfigError("split fractions must sum to 1 (got " + std::to_string(train + test + validation) + ")");
    }
}

std::array<std::size_t, 3> allocate_counts(std::size_t n, const SplitSpec& spec) {
    const std::array<double, 3> f = {spec.train, spec.test, spec.validation};
    std::array<std::size_t, 3> counts{};
    std::array<double, 3> remainder{};
    std::size_t assigned = 0;
    for (std::size_t i = 0; i < 3; ++i) {
        const double exact = f[i] * static_cast<double>(n);
        counts[i] = static_cast<std::size_t>(std::floor(exact));
        remainder[i] = exact - std::floor(exact);
        assigned += counts[i];
    }
    std::array<std::size_t, 3> order{0, 1, 2};
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
    for (std::size_t i = 0; assigned < n; i = (i + 1) % 3, ++assigned) ++counts[order[i]];
    return counts;
}

LexiconSplit stratified_split(const SentimentLexicon& lexicon, const ClusterSet& clusters, const SplitSpec& spec) {
    spec.validate();
    LexiconSplit out;
    out.train = SentimentLexicon(lexicon.metadata());
    out.test = SentimentLexicon(lexicon.metadata());
    out.validation = SentimentLexicon(lexicon.metadata());
    std::array<SentimentLexicon*, 3> parts = {&out.train, &out.test, &out.validation};

    for (Category c : kCategories) {
        auto entries = lexicon.entries(c);
        if (entries.empty()) continue;
        const std::size_t k = clusters.cluster_count(c);
        std::vector<std::vector<LexiconEntry>> strata(k);
        for (auto& e : entries) {
            const int id = clusters.cluster_of(e.term, c);
            if (id < 0 || static_cast<std::size_t>(id) >= k) throw ConfigError("cluster id out of range");
            strata[id].push_back(std::move(e));
        }
        for (std::size_t s = 0; s < k; ++s) {
            Rng rng(derive_seed(spec.seed, 16 * static_cast<std::uint64_t>(c) + s));
            rng.shuffle(strata[s]);
            const auto counts = allocate_counts(strata[s].size(), spec);
            std::size_t pos = 0;
            for (std::size_t part = 0; part < 3; ++part) {
                for (std::size_t i = 0; i < counts[part]; ++i) parts[part]->insert(strata[s][pos++]);
            }
            out.strata.push_back({c, static_cast<int>(s), strata[s].size(), counts});
        }
    }
    return out;
}

}  // namespace actlex
