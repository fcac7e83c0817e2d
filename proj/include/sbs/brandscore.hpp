#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "sbs/coocgraph.hpp"

namespace sbs {

// Token -> polarity in [-1, 1]. Keys are stemmed at load time with the same
// stemmer as the corpus so lookups happen in one vocabulary space; when
// several surface keys collapse to one stem their polarities are averaged.
class PolarityLexicon {
public:
    PolarityLexicon() = default;

    static PolarityLexicon load(const std::string& path, bool stem_keys = true);

    void add(const std::string& token, double polarity, bool stem_key = true);

    std::optional<double> polarity(const std::string& token) const;

    std::size_t size() const { return merged_.size(); }

private:
    struct Acc {
        double sum = 0.0;
        int count = 0;
    };
    std::unordered_map<std::string, Acc> merged_;
};

// Raw scores per node of the pruned slice network, index-aligned with
// net.tokens.
std::vector<double> prevalence_all(const CoocNetwork& net);
std::vector<double> diversity_all(const CoocNetwork& net);

// Weighted betweenness centrality per node: shortest paths over edge
// length 1/weight, fractional credit across ties, each unordered pair
// counted once. Parallelizes over sources in fixed blocks so output is
// identical for any thread count.
std::vector<double> connectivity_all(const CoocNetwork& net, int threads = 1);

struct StandardizeResult {
    std::vector<double> values;
    double median = 0.0;
    double q1 = 0.0;
    double q3 = 0.0;
    double iqr = 0.0;
    bool degenerate_scale = false;  // IQR was 0; values are median-centered only
};

// (x - median) / IQR with quartiles by inclusive linear interpolation.
// Throws DataError on an empty input.
StandardizeResult standardize(const std::vector<double>& raw);

struct ComponentMeta {
    double median = 0.0;
    double iqr = 0.0;
    bool degenerate_scale = false;
};

// All per-token scores of one pruned slice network, computed once and
// shared across the brands scored in that slice.
struct SliceScores {
    std::vector<double> prevalence;
    std::vector<double> diversity;
    std::vector<double> connectivity;
    std::vector<double> std_prevalence;
    std::vector<double> std_diversity;
    std::vector<double> std_connectivity;
    ComponentMeta prevalence_meta;
    ComponentMeta diversity_meta;
    ComponentMeta connectivity_meta;
};

SliceScores score_slice(const CoocNetwork& net, int threads = 1);

struct BrandMetrics {
    std::string brand;
    std::string source;
    int64_t period = 0;
    double prevalence = 0.0;
    double diversity = 0.0;
    double connectivity = 0.0;
    double std_prevalence = 0.0;
    double std_diversity = 0.0;
    double std_connectivity = 0.0;
    double sbs = 0.0;  // std_prevalence + std_diversity + std_connectivity
    std::optional<double> sentiment;  // in [0, 1]; empty when undefined
};

// A brand absent from the slice gets raw scores (0, 0, 0) standardized
// against the slice distributions, so the panel series stays complete.
BrandMetrics brand_metrics(const std::string& brand, const CoocNetwork& net,
                           const SliceScores& scores,
                           const PolarityLexicon* lexicon = nullptr);

// Convenience composition of score_slice + brand_metrics for one brand.
// Throws DataError on an empty network.
BrandMetrics sbs_score(const std::string& brand, const CoocNetwork& net,
                       const PolarityLexicon* lexicon = nullptr, int threads = 1);

// Weighted average of association polarity over the brand's neighbors,
// rescaled to [0, 1]; empty when no neighbor carries a polarity.
std::optional<double> brand_sentiment(const std::string& brand, const CoocNetwork& net,
                                      const PolarityLexicon& lexicon);

}  // namespace sbs
