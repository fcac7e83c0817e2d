#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "sbs/panelstats.hpp"
#include "sbs/util.hpp"

using namespace sbs;

namespace {

BrandMetrics metrics_row(const std::string& brand, int64_t period, double prev,
                         double div, double conn,
                         std::optional<double> sentiment = std::nullopt) {
    BrandMetrics m;
    m.brand = brand;
    m.source = "src";
    m.period = period;
    m.std_prevalence = prev;
    m.std_diversity = div;
    m.std_connectivity = conn;
    m.sbs = prev + div + conn;
    m.sentiment = sentiment;
    return m;
}

// A deterministic panel whose metric moves are known.
std::vector<PanelObservation> synthetic_panel(int entities, int periods, uint64_t seed) {
    Rng rng(seed);
    std::vector<PanelObservation> panel;
    for (int e = 0; e < entities; ++e) {
        double outcome = 1000.0 + 100.0 * e;
        for (int p = 0; p < periods; ++p) {
            PanelObservation row;
            row.entity = "e" + std::to_string(e);
            row.period = 2000 + p;
            outcome += rng.normal() * 10.0 + 2.0;
            row.outcome = outcome;
            row.prevalence = rng.normal();
            row.diversity = rng.normal();
            row.connectivity = rng.normal();
            row.sbs = row.prevalence + row.diversity + row.connectivity;
            row.sentiment = 0.5 + 0.1 * rng.normal();
            panel.push_back(row);
        }
    }
    return panel;
}

}  // namespace

TEST_CASE("build_panel joins on (entity, period) and reports leftovers") {
    std::vector<BrandMetrics> metrics;
    std::vector<OutcomeRow> outcomes;
    for (int e = 0; e < 5; ++e) {
        const std::string name = "m" + std::to_string(e);
        for (int p = 0; p < 10; ++p) {
            metrics.push_back(metrics_row(name, 2007 + p, e + p, e - p, e * p));
            outcomes.push_back({name, 2007 + p, 1000.0 * e + p});
        }
    }
    outcomes.push_back({"phantom", 2007, 1.0});
    metrics.push_back(metrics_row("m0", 2050, 0, 0, 0));

    PanelJoinReport report;
    const auto panel = build_panel(metrics, outcomes, &report);
    CHECK(panel.size() == 50);
    CHECK(report.joined == 50);
    CHECK(report.unmatched_outcomes.size() == 1);
    CHECK(report.unmatched_metrics.size() == 1);

    // disjoint keys -> error
    std::vector<OutcomeRow> disjoint = {{"nobody", 1999, 5.0}};
    CHECK_THROWS_AS(build_panel(metrics, disjoint), DataError);

    // duplicate metrics keys -> error
    std::vector<BrandMetrics> dup = {metrics_row("a", 1, 0, 0, 0),
                                     metrics_row("a", 1, 1, 1, 1)};
    CHECK_THROWS_AS(build_panel(dup, outcomes), DataError);
}

TEST_CASE("first_difference row counts follow the lag") {
    const auto panel = synthetic_panel(5, 10, 42);
    const DifferencedPanel d0 = first_difference(panel, 0);
    CHECK(d0.rows.size() == 45);  // 9 diffs x 5 entities
    const DifferencedPanel d1 = first_difference(panel, 1);
    CHECK(d1.rows.size() == 40);  // 8 rows per entity at lag 1

    // constant series -> all zero differences
    std::vector<PanelObservation> flat;
    for (int p = 0; p < 4; ++p) {
        PanelObservation row;
        row.entity = "e";
        row.period = p;
        row.outcome = 7.0;
        row.prevalence = row.diversity = row.connectivity = row.sbs = 3.0;
        flat.push_back(row);
    }
    for (const DiffRow& r : first_difference(flat, 0).rows) {
        CHECK(r.d_outcome == 0.0);
        CHECK(r.d_sbs == 0.0);
    }

    // single-period entity dropped with a warning
    std::vector<PanelObservation> mixed = flat;
    PanelObservation lone;
    lone.entity = "lonely";
    lone.period = 0;
    mixed.push_back(lone);
    const DifferencedPanel dm = first_difference(mixed, 0);
    CHECK(dm.dropped_entities == std::vector<std::string>{"lonely"});
}

TEST_CASE("differencing then cumulative sum reconstructs the series") {
    const auto panel = synthetic_panel(3, 12, 7);
    const DifferencedPanel diff = first_difference(panel, 0);
    std::map<std::string, double> value;
    for (const PanelObservation& row : panel) {
        if (!value.count(row.entity)) {
            value[row.entity] = row.outcome;  // anchor at the first observation
        }
    }
    std::map<std::string, double> rebuilt = value;
    for (const DiffRow& r : diff.rows) {
        rebuilt[r.entity] += r.d_outcome;
    }
    std::map<std::string, double> last;
    for (const PanelObservation& row : panel) {
        last[row.entity] = row.outcome;
    }
    for (const auto& [entity, v] : rebuilt) {
        CHECK(v == doctest::Approx(last[entity]).epsilon(1e-12));
    }
}

TEST_CASE("describe reports mean, sample sd, min, max") {
    std::vector<PanelObservation> panel;
    for (double v : {1.0, 2.0, 3.0}) {
        PanelObservation row;
        row.entity = "e";
        row.period = static_cast<int64_t>(v);
        row.outcome = v;
        row.prevalence = v;
        row.diversity = v;
        row.connectivity = v;
        row.sbs = 3 * v;
        panel.push_back(row);
    }
    const auto stats = describe(panel);
    REQUIRE(stats.size() == 6);
    CHECK(stats[0].name == "outcome");
    CHECK(stats[0].mean == doctest::Approx(2.0));
    CHECK(*stats[0].sd == doctest::Approx(1.0));
    CHECK(stats[0].min == 1.0);
    CHECK(stats[0].max == 3.0);
    CHECK(stats[5].name == "sentiment");
    CHECK(stats[5].n == 0);  // undefined everywhere -> no rows

    const auto one = describe({panel[0]});
    CHECK(!one[0].sd.has_value());  // single value -> NA
    CHECK_THROWS_AS(describe({}), DataError);
}

TEST_CASE("concordance counts sign agreement and excludes zeros") {
    DifferencedPanel panel;
    auto push = [&](double dp, double dy) {
        DiffRow r;
        r.entity = "e";
        r.d_sbs = dp;
        r.d_outcome = dy;
        panel.rows.push_back(r);
    };
    for (int i = 0; i < 10; ++i) push(1, 1);
    for (int i = 0; i < 2; ++i) push(1, -1);
    for (int i = 0; i < 3; ++i) push(-1, 1);
    for (int i = 0; i < 10; ++i) push(-1, -1);
    push(0, 1);
    push(1, 0);

    const ContingencyTable t = concordance(panel, MetricField::Sbs);
    CHECK(t.pos_pos == 10);
    CHECK(t.pos_neg == 2);
    CHECK(t.neg_pos == 3);
    CHECK(t.neg_neg == 10);
    CHECK(t.zeros_excluded == 2);
    CHECK(t.concordance_rate() == doctest::Approx(0.8));

    DifferencedPanel zeros_only;
    DiffRow z;
    z.d_sbs = 0.0;
    z.d_outcome = 1.0;
    zeros_only.rows.push_back(z);
    CHECK_THROWS_AS(concordance(zeros_only, MetricField::Sbs), DataError);
}

TEST_CASE("all-agreeing signs give rate one") {
    DifferencedPanel panel;
    for (int i = 0; i < 8; ++i) {
        DiffRow r;
        r.d_sbs = i % 2 ? 1.0 : -1.0;
        r.d_outcome = r.d_sbs;
        panel.rows.push_back(r);
    }
    CHECK(concordance(panel, MetricField::Sbs).concordance_rate() == 1.0);
}

TEST_CASE("chi-square test against the expected-count oracle") {
    ContingencyTable t;
    t.pos_pos = 25;
    t.pos_neg = 10;
    t.neg_pos = 10;
    t.neg_neg = 25;
    const ChiSquareResult r = chi_square_test(t);

    // independent oracle: E_ij = row_i * col_j / n
    const double obs[2][2] = {{25, 10}, {10, 25}};
    const double rows[2] = {35, 35}, cols[2] = {35, 35}, n = 70;
    double expected_stat = 0.0;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            const double e = rows[i] * cols[j] / n;
            expected_stat += (obs[i][j] - e) * (obs[i][j] - e) / e;
        }
    }
    CHECK(r.statistic == doctest::Approx(expected_stat).epsilon(1e-12));
    CHECK(r.df == 1);
    CHECK(r.p_value < 0.05);

    // perfectly independent table
    ContingencyTable flat;
    flat.pos_pos = flat.pos_neg = flat.neg_pos = flat.neg_neg = 10;
    const ChiSquareResult rf = chi_square_test(flat);
    CHECK(rf.statistic == 0.0);
    CHECK(rf.p_value == doctest::Approx(1.0));

    // invariance under simultaneous row and column swap
    ContingencyTable swapped;
    swapped.pos_pos = t.neg_neg;
    swapped.pos_neg = t.neg_pos;
    swapped.neg_pos = t.pos_neg;
    swapped.neg_neg = t.pos_pos;
    CHECK(chi_square_test(swapped).statistic == doctest::Approx(r.statistic));

    ContingencyTable degenerate;
    degenerate.pos_pos = 5;
    degenerate.pos_neg = 5;
    CHECK_THROWS_AS(chi_square_test(degenerate), DataError);
}

namespace {

// Exhaustive Fisher oracle with exact integer comparisons. All margins stay
// small enough that the binomial numerators fit in long double products.
double fisher_oracle(int64_t a, int64_t b, int64_t c, int64_t d) {
    const int64_t n = a + b + c + d;
    const int64_t r1 = a + b, c1 = a + c;
    auto log_choose = [](int64_t nn, int64_t kk) {
        return std::lgamma(static_cast<double>(nn + 1)) -
               std::lgamma(static_cast<double>(kk + 1)) -
               std::lgamma(static_cast<double>(nn - kk + 1));
    };
    const int64_t lo = std::max<int64_t>(0, r1 + c1 - n);
    const int64_t hi = std::min(r1, c1);
    std::vector<double> logp;
    for (int64_t k = lo; k <= hi; ++k) {
        logp.push_back(log_choose(r1, k) + log_choose(n - r1, c1 - k) -
                       log_choose(n, c1));
    }
    const double obs = logp[static_cast<std::size_t>(a - lo)];
    double total = 0.0;
    for (double lp : logp) {
        if (lp <= obs + 1e-9) {
            total += std::exp(lp);
        }
    }
    return std::min(1.0, total);
}

}  // namespace

TEST_CASE("fisher exact test on fixed tables") {
    ContingencyTable flat;
    flat.pos_pos = flat.pos_neg = flat.neg_pos = flat.neg_neg = 10;
    CHECK(fisher_exact_test(flat) == doctest::Approx(1.0));

    ContingencyTable t;
    t.pos_pos = 8;
    t.pos_neg = 2;
    t.neg_pos = 1;
    t.neg_neg = 5;
    const double p = fisher_exact_test(t);
    CHECK(p == doctest::Approx(fisher_oracle(8, 2, 1, 5)).epsilon(1e-10));
    CHECK(p > 0.0);
    CHECK(p <= 1.0);
}

TEST_CASE("fisher exact matches enumeration on random small tables") {
    Rng rng(2718);
    for (int iter = 0; iter < 200; ++iter) {
        const int64_t a = static_cast<int64_t>(rng.below(13));
        const int64_t b = static_cast<int64_t>(rng.below(13));
        const int64_t c = static_cast<int64_t>(rng.below(13));
        const int64_t d = static_cast<int64_t>(rng.below(13));
        if (a + b == 0 || c + d == 0 || a + c == 0 || b + d == 0) {
            continue;
        }
        ContingencyTable t;
        t.pos_pos = a;
        t.pos_neg = b;
        t.neg_pos = c;
        t.neg_neg = d;
        const double mine = fisher_exact_test(t);
        const double ref = fisher_oracle(a, b, c, d);
        CHECK(std::fabs(mine - ref) <= 1e-9 * std::max(ref, 1e-300));
        CHECK(mine > 0.0);
        CHECK(mine <= 1.0);
    }
}

TEST_CASE("ols recovers exact coefficients on noiseless data") {
    std::vector<std::vector<double>> X;
    std::vector<double> y;
    for (int i = 0; i < 20; ++i) {
        const double x = i * 0.5 - 3.0;
        X.push_back({1.0, x});
        y.push_back(1.0 + 2.0 * x);
    }
    const RegressionFit fit = ols_fit(X, y, {"const", "x"});
    CHECK(fit.coef[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fit.coef[1] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(fit.r2 == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("ols rejects duplicated predictors naming the column") {
    std::vector<std::vector<double>> X;
    std::vector<double> y;
    Rng rng(5);
    for (int i = 0; i < 30; ++i) {
        const double x = rng.normal();
        X.push_back({1.0, x, x});
        y.push_back(x + rng.normal());
    }
    CHECK_THROWS_WITH_AS(ols_fit(X, y, {"const", "x1", "x2"}),
                         doctest::Contains("collinear"), DataError);
}

TEST_CASE("ols residuals are orthogonal to the design") {
    Rng rng(17);
    std::vector<std::vector<double>> X;
    std::vector<double> y;
    double ynorm = 0.0;
    for (int i = 0; i < 200; ++i) {
        const double x1 = rng.normal(), x2 = rng.normal();
        X.push_back({1.0, x1, x2});
        const double v = 0.5 - 1.5 * x1 + 0.25 * x2 + rng.normal();
        y.push_back(v);
        ynorm += v * v;
    }
    ynorm = std::sqrt(ynorm);
    const RegressionFit fit = ols_fit(X, y, {"const", "x1", "x2"});
    for (std::size_t j = 0; j < 3; ++j) {
        double dot = 0.0;
        for (std::size_t i = 0; i < X.size(); ++i) {
            dot += X[i][j] * fit.residuals[i];
        }
        CHECK(std::fabs(dot) <= 1e-8 * ynorm);
    }
}

TEST_CASE("ols on simulated data recovers coefficients within 3 se") {
    Rng rng(20240607);
    const std::vector<double> truth = {2.0, -1.0, 0.5, 3.0};
    std::vector<std::vector<double>> X;
    std::vector<double> y;
    for (int i = 0; i < 500; ++i) {
        std::vector<double> row = {1.0, rng.normal(), rng.normal(), rng.normal()};
        double v = 0.0;
        for (std::size_t j = 0; j < truth.size(); ++j) {
            v += truth[j] * row[j];
        }
        y.push_back(v + rng.normal());
        X.push_back(std::move(row));
    }
    const RegressionFit fit = ols_fit(X, y, {"const", "x1", "x2", "x3"});
    for (std::size_t j = 0; j < truth.size(); ++j) {
        CHECK(std::fabs(fit.coef[j] - truth[j]) <= 3.0 * fit.se[j]);
    }
    // independent predictors: VIF close to 1
    for (std::size_t j = 1; j < 4; ++j) {
        CHECK(fit.vif[j] == doctest::Approx(1.0).epsilon(0.05));
    }
    CHECK(fit.adj_r2 <= fit.r2);
}

TEST_CASE("adding a predictor never decreases r2") {
    Rng rng(33);
    std::vector<std::vector<double>> X1, X2;
    std::vector<double> y;
    for (int i = 0; i < 100; ++i) {
        const double a = rng.normal(), b = rng.normal();
        X1.push_back({1.0, a});
        X2.push_back({1.0, a, b});
        y.push_back(a * 1.5 + rng.normal());
    }
    const double r2_small = ols_fit(X1, y, {"const", "a"}).r2;
    const double r2_big = ols_fit(X2, y, {"const", "a", "b"}).r2;
    CHECK(r2_big >= r2_small - 1e-12);
}

TEST_CASE("panel-level ols builds controls and flags sbs collinearity") {
    const auto panel = synthetic_panel(5, 10, 99);
    const DifferencedPanel diff = first_difference(panel, 0);

    OlsSpec spec;
    spec.predictors = {MetricField::Prevalence, MetricField::Diversity,
                       MetricField::Connectivity};
    const RegressionFit fit = ols(diff, spec);
    // const + time + 4 dummies + 3 predictors
    CHECK(fit.columns.size() == 9);
    CHECK(fit.n == 45);

    OlsSpec bad;
    bad.predictors = {MetricField::Sbs, MetricField::Prevalence, MetricField::Diversity,
                      MetricField::Connectivity};
    CHECK_THROWS_WITH_AS(ols(diff, bad), doctest::Contains("collinear"), DataError);
}

TEST_CASE("naive bayes posteriors match the hand computation") {
    // 8 rows, 2 binary features (sign encoding)
    const std::vector<std::vector<double>> X = {
        {1, 1},  {1, -1}, {1, 1},  {-1, 1},
        {-1, -1}, {-1, -1}, {1, -1}, {-1, -1},
    };
    const std::vector<int> yv = {1, 1, 1, 1, 0, 0, 0, 0};
    const NbModel model = NbModel::train(X, yv, NbEncoding::Sign);

    // hand computation with add-one smoothing:
    // class 1: f0>=0 in 3/4 -> (3+1)/(4+2); f1>=0 in 3/4 -> 4/6
    // class 0: f0>=0 in 1/4 -> 2/6;          f1>=0 in 0/4 -> 1/6
    const double p1 = 0.5 * (4.0 / 6.0) * (4.0 / 6.0);
    const double p0 = 0.5 * (2.0 / 6.0) * (1.0 / 6.0);
    const auto [cls, prob] = model.predict({1, 1});
    CHECK(cls == 1);
    CHECK(prob == doctest::Approx(p1 / (p0 + p1)).epsilon(1e-12));

    const auto [cls2, prob2] = model.predict({-1, -1});
    const double q1 = 0.5 * (2.0 / 6.0) * (2.0 / 6.0);
    const double q0 = 0.5 * (4.0 / 6.0) * (5.0 / 6.0);
    CHECK(cls2 == 0);
    CHECK(prob2 == doctest::Approx(q1 / (q0 + q1)).epsilon(1e-12));
}

TEST_CASE("naive bayes trains gaussian likelihoods per class") {
    Rng rng(61);
    std::vector<std::vector<double>> X;
    std::vector<int> yv;
    for (int i = 0; i < 200; ++i) {
        const int cls = i % 2;
        X.push_back({(cls ? 2.0 : -2.0) + 0.5 * rng.normal()});
        yv.push_back(cls);
    }
    const NbModel model = NbModel::train(X, yv, NbEncoding::Gaussian);
    CHECK(model.predict({2.0}).first == 1);
    CHECK(model.predict({-2.0}).first == 0);
    CHECK(model.predict({2.0}).second > 0.95);
}

TEST_CASE("naive bayes rejects single-class training") {
    CHECK_THROWS_AS(NbModel::train({{1.0}, {2.0}}, {1, 1}, NbEncoding::Sign), DataError);
}

TEST_CASE("symmetric uninformative features give a posterior near one half") {
    std::vector<std::vector<double>> X;
    std::vector<int> yv;
    for (int i = 0; i < 10; ++i) {
        X.push_back({i % 2 ? 1.0 : -1.0});
        yv.push_back(i % 2);
        X.push_back({i % 2 ? 1.0 : -1.0});
        yv.push_back(1 - i % 2);
    }
    const NbModel model = NbModel::train(X, yv, NbEncoding::Sign);
    CHECK(model.predict({1.0}).second == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("cohen kappa endpoints") {
    CHECK(cohen_kappa(10, 0, 0, 10) == doctest::Approx(1.0));
    CHECK(cohen_kappa(5, 5, 5, 5) == doctest::Approx(0.0));
    CHECK(cohen_kappa(0, 10, 10, 0) == doctest::Approx(-1.0));
}

TEST_CASE("roc auc is a rank statistic with tie half-credit") {
    CHECK(roc_auc({0.9, 0.8, 0.2, 0.1}, {1, 1, 0, 0}) == doctest::Approx(1.0));
    CHECK(roc_auc({0.1, 0.2, 0.8, 0.9}, {1, 1, 0, 0}) == doctest::Approx(0.0));
    CHECK(roc_auc({0.5, 0.5, 0.5, 0.5}, {1, 0, 1, 0}) == doctest::Approx(0.5));
    // invariant under strictly monotone transformation
    const std::vector<double> s = {0.1, 0.4, 0.35, 0.8, 0.65};
    const std::vector<int> l = {0, 1, 0, 1, 1};
    std::vector<double> logit;
    for (double v : s) {
        logit.push_back(std::log(v / (1.0 - v)));
    }
    CHECK(roc_auc(s, l) == doctest::Approx(roc_auc(logit, l)));
}

TEST_CASE("evaluate_classifier on a perfect predictor") {
    DifferencedPanel panel;
    Rng rng(3);
    for (int i = 0; i < 40; ++i) {
        DiffRow r;
        r.entity = "e";
        r.d_outcome = i % 2 ? 2.0 : -2.0;
        r.d_sbs = r.d_outcome;  // perfectly informative
        r.d_prevalence = r.d_outcome;
        r.d_diversity = r.d_outcome;
        r.d_connectivity = r.d_outcome;
        panel.rows.push_back(r);
    }
    ClassifierConfig cfg;
    cfg.repetitions = 50;
    cfg.seed = 9;
    const ClassifierEvaluation eval = evaluate_classifier(panel, cfg);
    CHECK(eval.mean_accuracy == doctest::Approx(1.0));
    CHECK(eval.mean_kappa == doctest::Approx(1.0));
    CHECK(eval.mean_auc == doctest::Approx(1.0));
    CHECK(eval.failed_repetitions == 0);
}

TEST_CASE("evaluate_classifier is deterministic given the seed") {
    const auto panel = synthetic_panel(5, 10, 1234);
    const DifferencedPanel diff = first_difference(panel, 0);
    ClassifierConfig cfg;
    cfg.repetitions = 40;
    cfg.seed = 77;
    const auto a = evaluate_classifier(diff, cfg);
    const auto b = evaluate_classifier(diff, cfg);
    CHECK(a.accuracy == b.accuracy);
    CHECK(a.kappa == b.kappa);
    CHECK(a.auc == b.auc);

    cfg.threads = 4;
    const auto c = evaluate_classifier(diff, cfg);
    CHECK(a.accuracy == c.accuracy);
    CHECK(a.mean_auc == c.mean_auc);

    cfg.threads = 1;
    cfg.seed = 78;
    const auto d = evaluate_classifier(diff, cfg);
    CHECK(a.accuracy != d.accuracy);
}

TEST_CASE("random labels score near chance") {
    Rng rng(5150);
    DifferencedPanel panel;
    for (int i = 0; i < 200; ++i) {
        DiffRow r;
        r.entity = "e";
        r.d_outcome = rng.real() < 0.5 ? 1.0 : -1.0;
        r.d_sbs = rng.normal();
        r.d_prevalence = rng.normal();
        r.d_diversity = rng.normal();
        r.d_connectivity = rng.normal();
        panel.rows.push_back(r);
    }
    ClassifierConfig cfg;
    cfg.repetitions = 100;
    cfg.seed = 1;
    const ClassifierEvaluation eval = evaluate_classifier(panel, cfg);
    CHECK(std::fabs(eval.mean_kappa) < 0.1);
    CHECK(std::fabs(eval.mean_auc - 0.5) < 0.1);
}

TEST_CASE("evaluate_classifier enforces its preconditions") {
    DifferencedPanel tiny;
    for (int i = 0; i < 5; ++i) {
        DiffRow r;
        r.d_outcome = i % 2 ? 1.0 : -1.0;
        tiny.rows.push_back(r);
    }
    ClassifierConfig cfg;
    CHECK_THROWS_AS(evaluate_classifier(tiny, cfg), DataError);

    DifferencedPanel single;
    for (int i = 0; i < 20; ++i) {
        DiffRow r;
        r.d_outcome = 1.0;
        single.rows.push_back(r);
    }
    CHECK_THROWS_AS(evaluate_classifier(single, cfg), DataError);
}
