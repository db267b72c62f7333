#include "actlex/corpus.hpp"

#include "actlex/errors.hpp"
#include "actlex/rng.hpp"

namespace actlex {

CorpusBuild generate_corpus(const SentimentLexicon& lexicon, const CoefficientSet& coeffs,
                            const CorpusOptions& options) {
    options.split.validate();
    CorpusBuild build;
    build.clusters = cluster_lexicon(lexicon, options.clusters, derive_seed(options.seed, seed_stream::cluster));
    for (Category c : kCategories) {
        auto entries = lexicon.entries(c);
        if (entries.size() < 2) continue;
        std::vector<Epa> points;
        for (const auto& e : entries) points.push_back(e.epa);
        build.elbow[c] = elbow_diagnostic(points, options.elbow_k_max,
                                          derive_seed(options.seed, 16 * seed_stream::elbow + static_cast<int>(c)));
    }

    SplitSpec spec = options.split;
    spec.seed = derive_seed(options.seed, seed_stream::split);
    build.split = stratified_split(lexicon, build.clusters, spec);

    struct Part {
        const char* name;
        const SentimentLexicon* lexicon;
        std::size_t n;
    };
    const Part parts[] = {{"train", &build.split.train, options.n_train},
                          {"test", &build.split.test, options.n_test},
                          {"validation", &build.split.validation, options.n_validation}};
    std::uint64_t stream = 0;
    for (const auto& part : parts) {
        ++stream;
        if (part.n == 0) continue;
        EnumerationOptions en = options.enumeration;
        en.seed = derive_seed(options.seed, 16 * seed_stream::enumerate + stream);
        std::vector<MabmoEvent> events;
        try {
            const auto ctx = CorpusContext::build(*part.lexicon, build.clusters, coeffs, en);
            build.distinct_codes[part.name] = ctx.codes.distinct();
            events = sample_mabmo(ctx, part.n, derive_seed(options.seed, 16 * seed_stream::sample + stream), part.name,
                                  part.name);
        } catch (const ConfigError& e) {
            throw ConfigError(std::string(part.name) + " split: " + e.what() +
                              " (the lexicon may be too small for this cluster count and split)");
        }
        build.events.insert(build.events.end(), std::make_move_iterator(events.begin()),
                            std::make_move_iterator(events.end()));
    }
    return build;
}

CorpusContext expansion_context(const SentimentLexicon& lexicon, const CoefficientSet& coeffs, std::size_t clusters,
                                std::uint64_t seed, EnumerationOptions enumeration) {
    const auto set = cluster_lexicon(lexicon, clusters, derive_seed(seed, seed_stream::cluster));
    enumeration.seed = derive_seed(seed, seed_stream::enumerate);
    return CorpusContext::build(lexicon, set, coeffs, enumeration);
}

}  // namespace actlex
