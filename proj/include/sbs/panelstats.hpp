#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sbs/brandscore.hpp"
#include "sbs/corpus.hpp"

namespace sbs {

// One (entity, period) row of the metrics-vs-outcome panel. The metric
// fields carry the standardized component scores, matching how the SBS is
// defined as their sum.
struct PanelObservation {
    std::string entity;
    int64_t period = 0;
    double outcome = 0.0;
    double prevalence = 0.0;
    double diversity = 0.0;
    double connectivity = 0.0;
    double sbs = 0.0;
    std::optional<double> sentiment;
};

struct PanelJoinReport {
    std::size_t joined = 0;
    std::vector<std::string> unmatched_metrics;   // metric keys without outcome
    std::vector<std::string> unmatched_outcomes;  // outcome keys without metrics
};

// Inner join of metrics rows and outcome rows on (entity, period).
// Metrics rows must be unique per key; zero joined rows is an error.
std::vector<PanelObservation> build_panel(const std::vector<BrandMetrics>& metrics,
                                          const std::vector<OutcomeRow>& outcomes,
                                          PanelJoinReport* report = nullptr);

enum class MetricField {
    Prevalence,
    Diversity,
    Connectivity,
    Sbs,
    Sentiment,
};

MetricField metric_field_from_string(const std::string& name);
std::string metric_field_name(MetricField f);

struct DiffRow {
    std::string entity;
    int64_t period = 0;  // the later period of the outcome difference
    double d_outcome = 0.0;
    double d_prevalence = 0.0;
    double d_diversity = 0.0;
    double d_connectivity = 0.0;
    double d_sbs = 0.0;
    std::optional<double> d_sentiment;

    double metric(MetricField f) const;
};

struct DifferencedPanel {
    std::vector<DiffRow> rows;
    int lag = 0;
    std::vector<std::string> dropped_entities;  // fewer than lag + 2 periods
};

// Per-entity first differences; predictors optionally lagged by `lag`
// periods relative to the outcome difference.
DifferencedPanel first_difference(const std::vector<PanelObservation>& panel, int lag = 0);

struct VariableStats {
    std::string name;
    std::size_t n = 0;
    double mean = 0.0;
    std::optional<double> sd;  // sample sd (n-1); undefined for n < 2
    double min = 0.0;
    double max = 0.0;
};

std::vector<VariableStats> describe(const std::vector<PanelObservation>& panel);

// 2x2 table of sign(d_predictor) x sign(d_outcome); zero differences in
// either variable are excluded and counted.
struct ContingencyTable {
    int64_t pos_pos = 0;  // concordant
    int64_t pos_neg = 0;
    int64_t neg_pos = 0;
    int64_t neg_neg = 0;  // concordant
    int64_t zeros_excluded = 0;

    int64_t total() const { return pos_pos + pos_neg + neg_pos + neg_neg; }
    double concordance_rate() const;
};

ContingencyTable concordance(const DifferencedPanel& panel, MetricField predictor);

struct ChiSquareResult {
    double statistic = 0.0;
    double p_value = 1.0;
    int df = 1;
};

// Pearson chi-square without continuity correction; requires all expected
// counts > 0.
ChiSquareResult chi_square_test(const ContingencyTable& table);

// Two-sided Fisher's exact test: sum of hypergeometric probabilities of
// all same-margin tables no more probable than the observed one.
double fisher_exact_test(const ContingencyTable& table);

struct RegressionFit {
    std::vector<std::string> columns;
    std::vector<double> coef;
    std::vector<double> se;
    std::vector<double> t_stat;
    std::vector<double> p_value;
    std::vector<double> vif;  // NaN for the intercept
    std::vector<double> residuals;
    double r2 = 0.0;
    double adj_r2 = 0.0;
    double sigma2 = 0.0;
    std::size_t n = 0;
    std::size_t df_resid = 0;
};

// Least squares on an explicit design matrix (row major, n x p) via
// column-pivoted Householder QR. Throws DataError naming the collinear
// columns on rank deficiency.
RegressionFit ols_fit(const std::vector<std::vector<double>>& design,
                      const std::vector<double>& y,
                      const std::vector<std::string>& columns);

struct OlsSpec {
    std::vector<MetricField> predictors;
    bool time_trend = true;
    bool entity_dummies = true;
    std::string reference_entity;  // defaults to lexicographically first
};

// Builds intercept + time + entity dummies + differenced predictors and
// fits. Rows with an undefined predictor value (NA sentiment) are dropped.
RegressionFit ols(const DifferencedPanel& panel, const OlsSpec& spec);

enum class NbEncoding { Sign, Gaussian };

NbEncoding nb_encoding_from_string(const std::string& name);

// Naive Bayes over differenced metric features; target is the sign of the
// outcome difference. Sign encoding uses Bernoulli likelihoods with
// add-one smoothing; Gaussian uses per-class normal densities.
class NbModel {
public:
    static NbModel train(const std::vector<std::vector<double>>& features,
                         const std::vector<int>& labels, NbEncoding encoding);

    // Returns (predicted class in {0,1}, posterior probability of class 1).
    std::pair<int, double> predict(const std::vector<double>& features) const;

    NbEncoding encoding() const { return encoding_; }

private:
    NbEncoding encoding_ = NbEncoding::Sign;
    double log_prior_[2] = {0.0, 0.0};
    // Sign: log P(feature >= 0 | class) per feature/class.
    std::vector<std::array<double, 2>> log_p_pos_;
    std::vector<std::array<double, 2>> log_p_neg_;
    // Gaussian: per feature/class mean and variance.
    std::vector<std::array<double, 2>> mean_;
    std::vector<std::array<double, 2>> var_;
};

struct ClassifierConfig {
    double split = 0.70;  // training fraction
    int repetitions = 500;
    uint64_t seed = 1;
    std::vector<MetricField> features = {MetricField::Sbs, MetricField::Prevalence,
                                         MetricField::Diversity, MetricField::Connectivity};
    NbEncoding encoding = NbEncoding::Sign;
    int threads = 1;
};

struct ClassifierEvaluation {
    std::vector<double> accuracy;  // per successful repetition
    std::vector<double> kappa;
    std::vector<double> auc;
    double mean_accuracy = 0.0;
    double mean_kappa = 0.0;
    double mean_auc = 0.0;
    int failed_repetitions = 0;
    std::size_t rows_used = 0;
    std::size_t zeros_excluded = 0;
    ClassifierConfig config;
};

// Repeated stratified train/test splits; fully reproducible from the seed
// and identical for any thread count.
ClassifierEvaluation evaluate_classifier(const DifferencedPanel& panel,
                                         const ClassifierConfig& config);

// Chance-corrected agreement of a 2x2 confusion matrix.
double cohen_kappa(int64_t tp, int64_t fp, int64_t fn, int64_t tn);

// Rank-statistic AUC with half credit for ties.
double roc_auc(const std::vector<double>& scores, const std::vector<int>& labels);

}  // namespace sbs
