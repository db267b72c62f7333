#include "actlex/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "actlex/csv.hpp"
#include "actlex/errors.hpp"
#include "actlex/rng.hpp"

namespace actlex {

namespace {

std::vector<Epa> seed_centroids(std::span<const Epa> points, std::size_t k, Rng& rng) {
    std::vector<Epa> centroids;
    centroids.reserve(k);
    centroids.push_back(points[rng.index(points.size())]);
    std::vector<double> d2(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) d2[i] = squared_distance(points[i], centroids[0]);
    while (centroids.size() < k) {
        double total = 0.0;
        for (double d : d2) total += d;
        std::size_t pick = 0;
        if (total <= 0.0) {
            pick = rng.index(points.size());
        } else {
            double u = rng.uniform() * total;
            pick = points.size() - 1;
            for (std::size_t i = 0; i < points.size(); ++i) {
                u -= d2[i];
                if (u < 0.0 && d2[i] > 0.0) {
                    pick = i;
                    break;
                }
            }
        }
        centroids.push_back(points[pick]);
        for (std::size_t i = 0; i < points.size(); ++i) {
            d2[i] = std::min(d2[i], squared_distance(points[i], centroids.back()));
        }
    }
    return centroids;
}

int nearest(const Epa& x, const std::vector<Epa>& centroids) {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < centroids.size(); ++c) {
        double d = squared_distance(x, centroids[c]);
        if (d < best_d) {
            best_d = d;
            best = static_cast<int>(c);
        }
    }
    return best;
}

ClusterModel lloyd(std::span<const Epa> points, std::vector<Epa> centroids, const KMeansOptions& options) {
    const std::size_t k = centroids.size();
    ClusterModel model;
    model.k = k;
    model.assignment.assign(points.size(), 0);
    for (std::size_t it = 0; it < options.max_iterations; ++it) {
        for (std::size_t i = 0; i < points.size(); ++i) model.assignment[i] = nearest(points[i], centroids);

        std::vector<Epa> sums(k);
        std::vector<std::size_t> counts(k, 0);
        for (std::size_t i = 0; i < points.size(); ++i) {
            sums[model.assignment[i]] = sums[model.assignment[i]] + points[i];
            ++counts[model.assignment[i]];
        }
        // An emptied cluster takes over the point farthest from its centroid.
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] > 0) continue;
            std::size_t far = 0;
            double far_d = -1.0;
            for (std::size_t i = 0; i < points.size(); ++i) {
                const int a = model.assignment[i];
                if (counts[a] <= 1) continue;
                double d = squared_distance(points[i], centroids[a]);
                if (d > far_d) {
                    far_d = d;
                    far = i;
                }
            }
            const int from = model.assignment[far];
            sums[from] = sums[from] - points[far];
            --counts[from];
            model.assignment[far] = static_cast<int>(c);
            sums[c] = points[far];
            counts[c] = 1;
        }
        double shift = 0.0;
        for (std::size_t c = 0; c < k; ++c) {
            Epa updated = (1.0 / static_cast<double>(counts[c])) * sums[c];
            shift = std::max(shift, distance(updated, centroids[c]));
            centroids[c] = updated;
        }
        model.iterations = it + 1;
        if (shift < options.tolerance) break;
    }
    for (std::size_t i = 0; i < points.size(); ++i) model.assignment[i] = nearest(points[i], centroids);
    model.centroids = std::move(centroids);
    model.inertia = inertia_of(points, model);
    return model;
}

}  // namespace

double inertia_of(std::span<const Epa> points, const ClusterModel& model) {
    double sum = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        sum += squared_distance(points[i], model.centroids[model.assignment[i]]);
    }
    return sum;
}

ClusterModel kmeans(std::span<const Epa> points, std::size_t k, std::uint64_t seed, const KMeansOptions& options) {
    if (k == 0) throw InvalidInputError("kmeans: k must be at least 1");
    if (k > points.size()) {
        throw InvalidInputError("kmeans: k = " + std::to_string(k) + " exceeds " + std::to_string(points.size()) +
                                " points");
    }
    Rng rng(seed);
    ClusterModel best;
    best.inertia = std::numeric_limits<double>::infinity();
    const std::size_t runs = std::max<std::size_t>(1, options.restarts);
    for (std::size_t r = 0; r < runs; ++r) {
        ClusterModel m = lloyd(points, seed_centroids(points, k, rng), options);
        if (m.inertia < best.inertia) best = std::move(m);
    }
    return best;
}

ElbowReport elbow_diagnostic(std::span<const Epa> points, std::size_t k_max, std::uint64_t seed) {
    ElbowReport report;
    k_max = std::min(k_max, points.size());
    for (std::size_t k = 1; k <= k_max; ++k) {
        report.inertia.push_back(kmeans(points, k, derive_seed(seed, k)).inertia);
    }
    report.suggested_k = std::min<std::size_t>(2, k_max);
    if (k_max < 3) return report;
    // Knee: largest second difference of log inertia, so the choice does not
    // depend on the scale of the data. Zero inertia is floored to keep logs finite.
    const double floor = std::max(report.inertia.front(), 1.0) * 1e-12;
    std::vector<double> logs;
    for (double v : report.inertia) logs.push_back(std::log(std::max(v, floor)));
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 2; k < k_max; ++k) {
        const double d2 = logs[k - 2] - 2.0 * logs[k - 1] + logs[k];
        if (d2 > best) {
            best = d2;
            report.suggested_k = k;
        }
    }
    return report;
}

void write_elbow_csv(std::ostream& out, const ElbowReport& report) {
    out << "k,inertia\n";
    for (std::size_t i = 0; i < report.inertia.size(); ++i) {
        out << i + 1 << ',' << csv::format_double(report.inertia[i]) << '\n';
    }
}

int ClusterSet::cluster_of(const std::string& term, Category category) const {
    auto it = lookup.find({term, category});
    if (it == lookup.end()) throw NotFoundError("no cluster for '" + term + "'");
    return it->second;
}

std::size_t ClusterSet::cluster_count(Category category) const {
    auto it = models.find(category);
    return it == models.end() ? 0 : it->second.k;
}

ClusterSet cluster_lexicon(const SentimentLexicon& lexicon, std::size_t k, std::uint64_t seed) {
    ClusterSet set;
    for (Category c : kCategories) {
        auto entries = lexicon.entries(c);
        if (entries.empty()) continue;
        std::vector<Epa> points;
        points.reserve(entries.size());
        for (const auto& e : entries) points.push_back(e.epa);
        auto model = kmeans(points, std::min(k, points.size()), derive_seed(seed, static_cast<std::uint64_t>(c)));
        for (std::size_t i = 0; i < entries.size(); ++i) set.lookup[{entries[i].term, c}] = model.assignment[i];
        set.models.emplace(c, std::move(model));
    }
    return set;
}

void write_cluster_csv(std::ostream& out, const SentimentLexicon& lexicon, const ClusterSet& clusters) {
    out << "term,category,cluster\n";
    for (const auto& [key, e] : lexicon) {
        auto it = clusters.lookup.find(key);
        if (it == clusters.lookup.end()) continue;
        csv::write_row(out, {e.term, std::string(to_string(e.category)), std::to_string(it->second)});
    }
}

}  // namespace actlex
