#include "sbs/panelstats.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <thread>
#include <unordered_map>

#include "sbs/specialfn.hpp"
#include "sbs/util.hpp"

namespace sbs {

namespace {

std::string key_of(const std::string& entity, int64_t period) {
    return entity + "\x1f" + std::to_string(period);
}

int sign_of(double v) {
    if (v > 0.0) return 1;
    if (v < 0.0) return -1;
    return 0;
}

}  // namespace

std::vector<PanelObservation> build_panel(const std::vector<BrandMetrics>& metrics,
                                          const std::vector<OutcomeRow>& outcomes,
                                          PanelJoinReport* report) {
    std::unordered_map<std::string, const BrandMetrics*> by_key;
    for (const BrandMetrics& m : metrics) {
        const std::string key = key_of(m.brand, m.period);
        if (!by_key.emplace(key, &m).second) {
            throw DataError("build_panel: duplicate metrics for (" + m.brand + ", " +
                            std::to_string(m.period) + ")");
        }
    }
    PanelJoinReport local;
    PanelJoinReport& rep = report ? *report : local;
    std::vector<PanelObservation> panel;
    std::set<std::string> matched;
    for (const OutcomeRow& o : outcomes) {
        const std::string key = key_of(o.entity, o.period);
        const auto it = by_key.find(key);
        if (it == by_key.end()) {
            rep.unmatched_outcomes.push_back("(" + o.entity + ", " +
                                             std::to_string(o.period) + ")");
            continue;
        }
        matched.insert(key);
        const BrandMetrics& m = *it->second;
        PanelObservation row;
        row.entity = o.entity;
        row.period = o.period;
        row.outcome = o.value;
        row.prevalence = m.std_prevalence;
        row.diversity = m.std_diversity;
        row.connectivity = m.std_connectivity;
        row.sbs = m.sbs;
        row.sentiment = m.sentiment;
        panel.push_back(std::move(row));
    }
    for (const BrandMetrics& m : metrics) {
        if (!matched.count(key_of(m.brand, m.period))) {
            rep.unmatched_metrics.push_back("(" + m.brand + ", " +
                                            std::to_string(m.period) + ")");
        }
    }
    rep.joined = panel.size();
    if (panel.empty()) {
        throw DataError("build_panel: no (entity, period) keys in common");
    }
    std::sort(panel.begin(), panel.end(), [](const auto& a, const auto& b) {
        return a.entity != b.entity ? a.entity < b.entity : a.period < b.period;
    });
    return panel;
}

MetricField metric_field_from_string(const std::string& name) {
    if (name == "prevalence") return MetricField::Prevalence;
    if (name == "diversity") return MetricField::Diversity;
    if (name == "connectivity") return MetricField::Connectivity;
    if (name == "sbs") return MetricField::Sbs;
    if (name == "sentiment") return MetricField::Sentiment;
    throw ConfigError("unknown metric field '" + name + "'");
}

std::string metric_field_name(MetricField f) {
    switch (f) {
        case MetricField::Prevalence: return "prevalence";
        case MetricField::Diversity: return "diversity";
        case MetricField::Connectivity: return "connectivity";
        case MetricField::Sbs: return "sbs";
        case MetricField::Sentiment: return "sentiment";
    }
    return "?";
}

double DiffRow::metric(MetricField f) const {
    switch (f) {
        case MetricField::Prevalence: return d_prevalence;
        case MetricField::Diversity: return d_diversity;
        case MetricField::Connectivity: return d_connectivity;
        case MetricField::Sbs: return d_sbs;
        case MetricField::Sentiment:
            if (!d_sentiment) {
                return std::numeric_limits<double>::quiet_NaN();
            }
            return *d_sentiment;
    }
    return 0.0;
}

DifferencedPanel first_difference(const std::vector<PanelObservation>& panel, int lag) {
    if (lag < 0) {
        throw ConfigError("lag must be >= 0");
    }
    std::map<std::string, std::vector<const PanelObservation*>> by_entity;
    for (const PanelObservation& row : panel) {
        by_entity[row.entity].push_back(&row);
    }
    DifferencedPanel out;
    out.lag = lag;
    for (auto& [entity, rows] : by_entity) {
        std::sort(rows.begin(), rows.end(), [](const auto* a, const auto* b) {
            return a->period < b->period;
        });
        const std::size_t min_rows = static_cast<std::size_t>(lag) + 2;
        if (rows.size() < min_rows) {
            out.dropped_entities.push_back(entity);
            continue;
        }
        // Outcome difference at index t needs the predictor difference at
        // index t - lag, which itself needs index t - lag - 1 >= 0.
        for (std::size_t t = 1 + static_cast<std::size_t>(lag); t < rows.size(); ++t) {
            const std::size_t tp = t - static_cast<std::size_t>(lag);
            DiffRow d;
            d.entity = entity;
            d.period = rows[t]->period;
            d.d_outcome = rows[t]->outcome - rows[t - 1]->outcome;
            d.d_prevalence = rows[tp]->prevalence - rows[tp - 1]->prevalence;
            d.d_diversity = rows[tp]->diversity - rows[tp - 1]->diversity;
            d.d_connectivity = rows[tp]->connectivity - rows[tp - 1]->connectivity;
            d.d_sbs = rows[tp]->sbs - rows[tp - 1]->sbs;
            if (rows[tp]->sentiment && rows[tp - 1]->sentiment) {
                d.d_sentiment = *rows[tp]->sentiment - *rows[tp - 1]->sentiment;
            }
            out.rows.push_back(std::move(d));
        }
    }
    return out;
}

std::vector<VariableStats> describe(const std::vector<PanelObservation>& panel) {
    if (panel.empty()) {
        throw DataError("describe: empty panel");
    }
    auto stats_of = [](const std::string& name, const std::vector<double>& vals) {
        VariableStats s;
        s.name = name;
        s.n = vals.size();
        if (vals.empty()) {
            return s;
        }
        double sum = 0.0;
        s.min = vals[0];
        s.max = vals[0];
        for (double v : vals) {
            sum += v;
            s.min = std::min(s.min, v);
            s.max = std::max(s.max, v);
        }
        s.mean = sum / static_cast<double>(vals.size());
        if (vals.size() >= 2) {
            double ss = 0.0;
            for (double v : vals) {
                const double d = v - s.mean;
                ss += d * d;
            }
            s.sd = std::sqrt(ss / static_cast<double>(vals.size() - 1));
        }
        return s;
    };
    std::vector<double> outcome, prev, div, conn, sbs, sent;
    for (const PanelObservation& r : panel) {
        outcome.push_back(r.outcome);
        prev.push_back(r.prevalence);
        div.push_back(r.diversity);
        conn.push_back(r.connectivity);
        sbs.push_back(r.sbs);
        if (r.sentiment) {
            sent.push_back(*r.sentiment);
        }
    }
    return {
        stats_of("outcome", outcome),   stats_of("prevalence", prev),
        stats_of("diversity", div),     stats_of("connectivity", conn),
        stats_of("sbs", sbs),           stats_of("sentiment", sent),
    };
}

double ContingencyTable::concordance_rate() const {
    const int64_t n = total();
    if (n == 0) {
        return 0.0;
    }
    return static_cast<double>(pos_pos + neg_neg) / static_cast<double>(n);
}

ContingencyTable concordance(const DifferencedPanel& panel, MetricField predictor) {
    ContingencyTable table;
    for (const DiffRow& row : panel.rows) {
        const double p = row.metric(predictor);
        if (std::isnan(p)) {
            ++table.zeros_excluded;
            continue;
        }
        const int sp = sign_of(p);
        const int so = sign_of(row.d_outcome);
        if (sp == 0 || so == 0) {
            ++table.zeros_excluded;
            continue;
        }
        if (sp > 0 && so > 0) ++table.pos_pos;
        else if (sp > 0) ++table.pos_neg;
        else if (so > 0) ++table.neg_pos;
        else ++table.neg_neg;
    }
    if (table.total() == 0) {
        throw DataError("concordance: no rows with defined signs");
    }
    return table;
}

ChiSquareResult chi_square_test(const ContingencyTable& table) {
    const double a = static_cast<double>(table.pos_pos);
    const double b = static_cast<double>(table.pos_neg);
    const double c = static_cast<double>(table.neg_pos);
    const double d = static_cast<double>(table.neg_neg);
    const double n = a + b + c + d;
    const double r1 = a + b, r2 = c + d, c1 = a + c, c2 = b + d;
    if (r1 <= 0 || r2 <= 0 || c1 <= 0 || c2 <= 0) {
        throw DataError("chi_square_test: zero marginal total");
    }
    double stat = 0.0;
    const double obs[2][2] = {{a, b}, {c, d}};
    const double rows[2] = {r1, r2};
    const double cols[2] = {c1, c2};
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            const double expected = rows[i] * cols[j] / n;
            const double diff = obs[i][j] - expected;
            stat += diff * diff / expected;
        }
    }
    ChiSquareResult res;
    res.statistic = stat;
    res.df = 1;
    res.p_value = chi_square_sf(stat, 1);
    return res;
}

double fisher_exact_test(const ContingencyTable& table) {
    const int64_t a = table.pos_pos;
    const int64_t b = table.pos_neg;
    const int64_t c = table.neg_pos;
    const int64_t d = table.neg_neg;
    if (a < 0 || b < 0 || c < 0 || d < 0) {
        throw DataError("fisher_exact_test: negative cell count");
    }
    const int64_t n = a + b + c + d;
    if (n == 0) {
        return 1.0;
    }
    const int64_t r1 = a + b;
    const int64_t c1 = a + c;
    const int64_t k_min = std::max<int64_t>(0, r1 + c1 - n);
    const int64_t k_max = std::min(r1, c1);
    // Unnormalized probabilities by the pmf ratio recurrence, anchored at
    // the mode so everything stays in [0, 1] and cannot overflow.
    const int64_t support = k_max - k_min + 1;
    std::vector<double> u(static_cast<std::size_t>(support), 0.0);
    int64_t mode = static_cast<int64_t>(
        std::floor(static_cast<double>((r1 + 1) * (c1 + 1)) / static_cast<double>(n + 2)));
    mode = std::clamp(mode, k_min, k_max);
    auto ratio_up = [&](int64_t k) {
        // pmf(k+1) / pmf(k)
        return (static_cast<double>(r1 - k) * static_cast<double>(c1 - k)) /
               (static_cast<double>(k + 1) * static_cast<double>(n - r1 - c1 + k + 1));
    };
    u[static_cast<std::size_t>(mode - k_min)] = 1.0;
    for (int64_t k = mode; k < k_max; ++k) {
        u[static_cast<std::size_t>(k + 1 - k_min)] =
            u[static_cast<std::size_t>(k - k_min)] * ratio_up(k);
    }
    for (int64_t k = mode; k > k_min; --k) {
        u[static_cast<std::size_t>(k - 1 - k_min)] =
            u[static_cast<std::size_t>(k - k_min)] / ratio_up(k - 1);
    }
    double total = 0.0;
    for (double v : u) {
        total += v;
    }
    const double u_obs = u[static_cast<std::size_t>(a - k_min)];
    // Tiny relative slack admits tables whose probability ties the observed
    // one but rounds differently.
    const double cutoff = u_obs * (1.0 + 1e-10);
    double sum = 0.0;
    for (double v : u) {
        if (v <= cutoff) {
            sum += v;
        }
    }
    return std::min(1.0, sum / total);
}

RegressionFit ols_fit(const std::vector<std::vector<double>>& design,
                      const std::vector<double>& y,
                      const std::vector<std::string>& columns) {
    const std::size_t n = design.size();
    if (n == 0 || n != y.size()) {
        throw DataError("ols: empty design or size mismatch");
    }
    const std::size_t p = design[0].size();
    if (p == 0 || p != columns.size()) {
        throw DataError("ols: empty design or label mismatch");
    }
    if (n <= p) {
        throw DataError("ols: need more rows (" + std::to_string(n) + ") than columns (" +
                        std::to_string(p) + ")");
    }
    Eigen::MatrixXd X(n, p);
    Eigen::VectorXd Y(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (design[i].size() != p) {
            throw DataError("ols: ragged design matrix");
        }
        for (std::size_t j = 0; j < p; ++j) {
            X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = design[i][j];
        }
        Y(static_cast<Eigen::Index>(i)) = y[i];
    }

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    qr.setThreshold(1e-10);
    const auto rank = qr.rank();
    if (rank < static_cast<Eigen::Index>(p)) {
        const auto& perm = qr.colsPermutation().indices();
        std::string names;
        for (Eigen::Index k = rank; k < static_cast<Eigen::Index>(p); ++k) {
            if (!names.empty()) {
                names += ", ";
            }
            names += columns[static_cast<std::size_t>(perm(k))];
        }
        throw DataError("ols: design matrix is rank deficient; collinear columns: " + names);
    }

    RegressionFit fit;
    fit.columns = columns;
    fit.n = n;
    fit.df_resid = n - p;

    Eigen::VectorXd beta = qr.solve(Y);
    Eigen::VectorXd resid = Y - X * beta;
    const double rss = resid.squaredNorm();
    fit.sigma2 = rss / static_cast<double>(fit.df_resid);

    // (X'X)^-1 = P R^-1 R^-T P' from the pivoted QR factor.
    Eigen::MatrixXd R = qr.matrixQR()
                            .topLeftCorner(static_cast<Eigen::Index>(p),
                                           static_cast<Eigen::Index>(p))
                            .triangularView<Eigen::Upper>();
    Eigen::MatrixXd Rinv = R.triangularView<Eigen::Upper>().solve(
        Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(p),
                                  static_cast<Eigen::Index>(p)));
    Eigen::MatrixXd M = Rinv * Rinv.transpose();
    const Eigen::MatrixXd Pm = qr.colsPermutation();
    Eigen::MatrixXd xtx_inv = Pm * M * Pm.transpose();

    const double y_mean = Y.mean();
    double tss = 0.0;
    for (Eigen::Index i = 0; i < Y.size(); ++i) {
        const double dv = Y(i) - y_mean;
        tss += dv * dv;
    }
    fit.r2 = tss > 0.0 ? 1.0 - rss / tss : 1.0;
    fit.adj_r2 = 1.0 - (1.0 - fit.r2) * static_cast<double>(n - 1) /
                           static_cast<double>(fit.df_resid);

    fit.coef.resize(p);
    fit.se.resize(p);
    fit.t_stat.resize(p);
    fit.p_value.resize(p);
    for (std::size_t j = 0; j < p; ++j) {
        fit.coef[j] = beta(static_cast<Eigen::Index>(j));
        const double var = fit.sigma2 * xtx_inv(static_cast<Eigen::Index>(j),
                                                static_cast<Eigen::Index>(j));
        fit.se[j] = std::sqrt(std::max(0.0, var));
        fit.t_stat[j] = fit.se[j] > 0.0 ? fit.coef[j] / fit.se[j]
                                        : std::numeric_limits<double>::infinity();
        fit.p_value[j] =
            student_t_two_sided_p(fit.t_stat[j], static_cast<double>(fit.df_resid));
    }
    fit.residuals.assign(resid.data(), resid.data() + resid.size());

    // VIF by auxiliary regression of each non-intercept column on the rest.
    fit.vif.assign(p, std::numeric_limits<double>::quiet_NaN());
    for (std::size_t j = 0; j < p; ++j) {
        bool is_intercept = true;
        for (std::size_t i = 0; i < n && is_intercept; ++i) {
            is_intercept = design[i][j] == 1.0;
        }
        if (is_intercept) {
            continue;
        }
        Eigen::MatrixXd Xo(n, p - 1);
        Eigen::VectorXd xj(n);
        for (std::size_t i = 0; i < n; ++i) {
            Eigen::Index cc = 0;
            for (std::size_t k = 0; k < p; ++k) {
                if (k == j) {
                    continue;
                }
                Xo(static_cast<Eigen::Index>(i), cc++) = design[i][k];
            }
            xj(static_cast<Eigen::Index>(i)) = design[i][j];
        }
        Eigen::VectorXd bj = Xo.colPivHouseholderQr().solve(xj);
        const double rss_j = (xj - Xo * bj).squaredNorm();
        const double mean_j = xj.mean();
        double tss_j = 0.0;
        for (Eigen::Index i = 0; i < xj.size(); ++i) {
            const double dv = xj(i) - mean_j;
            tss_j += dv * dv;
        }
        if (tss_j <= 0.0) {
            continue;
        }
        const double r2_j = 1.0 - rss_j / tss_j;
        fit.vif[j] = r2_j >= 1.0 ? std::numeric_limits<double>::infinity()
                                 : 1.0 / (1.0 - r2_j);
    }
    return fit;
}

RegressionFit ols(const DifferencedPanel& panel, const OlsSpec& spec) {
    if (panel.rows.empty()) {
        throw DataError("ols: empty panel");
    }
    std::set<std::string> entity_set;
    for (const DiffRow& r : panel.rows) {
        entity_set.insert(r.entity);
    }
    std::string reference = spec.reference_entity;
    if (reference.empty()) {
        reference = *entity_set.begin();
    } else if (!entity_set.count(reference)) {
        throw ConfigError("ols: reference entity '" + reference + "' not in panel");
    }

    std::vector<std::string> columns;
    columns.push_back("const");
    if (spec.time_trend) {
        columns.push_back("time");
    }
    std::vector<std::string> dummy_entities;
    if (spec.entity_dummies) {
        for (const std::string& e : entity_set) {
            if (e != reference) {
                dummy_entities.push_back(e);
                columns.push_back("entity[" + e + "]");
            }
        }
    }
    for (MetricField f : spec.predictors) {
        columns.push_back("d_" + metric_field_name(f));
    }

    std::vector<std::vector<double>> design;
    std::vector<double> y;
    for (const DiffRow& r : panel.rows) {
        std::vector<double> row;
        row.push_back(1.0);
        if (spec.time_trend) {
            row.push_back(static_cast<double>(r.period));
        }
        for (const std::string& e : dummy_entities) {
            row.push_back(r.entity == e ? 1.0 : 0.0);
        }
        bool complete = true;
        for (MetricField f : spec.predictors) {
            const double v = r.metric(f);
            if (std::isnan(v)) {
                complete = false;
                break;
            }
            row.push_back(v);
        }
        if (!complete) {
            continue;
        }
        design.push_back(std::move(row));
        y.push_back(r.d_outcome);
    }
    return ols_fit(design, y, columns);
}

NbEncoding nb_encoding_from_string(const std::string& name) {
    if (name == "sign") return NbEncoding::Sign;
    if (name == "gaussian") return NbEncoding::Gaussian;
    throw ConfigError("unknown nb encoding '" + name + "'");
}

NbModel NbModel::train(const std::vector<std::vector<double>>& features,
                       const std::vector<int>& labels, NbEncoding encoding) {
    const std::size_t n = features.size();
    if (n == 0 || n != labels.size()) {
        throw DataError("nb_train: empty training set or label mismatch");
    }
    const std::size_t k = features[0].size();
    int64_t count[2] = {0, 0};
    for (int l : labels) {
        if (l != 0 && l != 1) {
            throw DataError("nb_train: labels must be 0 or 1");
        }
        ++count[l];
    }
    if (count[0] == 0 || count[1] == 0) {
        throw DataError("nb_train: training set contains a single class");
    }
    NbModel model;
    model.encoding_ = encoding;
    model.log_prior_[0] = std::log(static_cast<double>(count[0]) / static_cast<double>(n));
    model.log_prior_[1] = std::log(static_cast<double>(count[1]) / static_cast<double>(n));
    if (encoding == NbEncoding::Sign) {
        model.log_p_pos_.resize(k);
        model.log_p_neg_.resize(k);
        for (std::size_t f = 0; f < k; ++f) {
            int64_t pos_given[2] = {0, 0};
            for (std::size_t i = 0; i < n; ++i) {
                if (features[i][f] >= 0.0) {
                    ++pos_given[labels[i]];
                }
            }
            for (int c = 0; c < 2; ++c) {
                const double p1 = (static_cast<double>(pos_given[c]) + 1.0) /
                                  (static_cast<double>(count[c]) + 2.0);
                model.log_p_pos_[f][c] = std::log(p1);
                model.log_p_neg_[f][c] = std::log(1.0 - p1);
            }
        }
    } else {
        model.mean_.resize(k);
        model.var_.resize(k);
        for (std::size_t f = 0; f < k; ++f) {
            double pooled_mean = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                pooled_mean += features[i][f];
            }
            pooled_mean /= static_cast<double>(n);
            double pooled_var = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double d = features[i][f] - pooled_mean;
                pooled_var += d * d;
            }
            pooled_var /= static_cast<double>(n);
            const double floor = std::max(1e-9 * pooled_var, 1e-12);
            for (int c = 0; c < 2; ++c) {
                double mean = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    if (labels[i] == c) {
                        mean += features[i][f];
                    }
                }
                mean /= static_cast<double>(count[c]);
                double var = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    if (labels[i] == c) {
                        const double d = features[i][f] - mean;
                        var += d * d;
                    }
                }
                var = count[c] > 1 ? var / static_cast<double>(count[c] - 1) : 0.0;
                model.mean_[f][c] = mean;
                model.var_[f][c] = std::max(var, floor);
            }
        }
    }
    return model;
}

std::pair<int, double> NbModel::predict(const std::vector<double>& features) const {
    double log_post[2] = {log_prior_[0], log_prior_[1]};
    if (encoding_ == NbEncoding::Sign) {
        if (features.size() != log_p_pos_.size()) {
            throw DataError("nb_predict: feature count mismatch");
        }
        for (std::size_t f = 0; f < features.size(); ++f) {
            for (int c = 0; c < 2; ++c) {
                log_post[c] += features[f] >= 0.0 ? log_p_pos_[f][c] : log_p_neg_[f][c];
            }
        }
    } else {
        if (features.size() != mean_.size()) {
            throw DataError("nb_predict: feature count mismatch");
        }
        for (std::size_t f = 0; f < features.size(); ++f) {
            for (int c = 0; c < 2; ++c) {
                const double d = features[f] - mean_[f][c];
                log_post[c] += -0.5 * (std::log(2.0 * M_PI * var_[f][c]) +
                                       d * d / var_[f][c]);
            }
        }
    }
    const double m = std::max(log_post[0], log_post[1]);
    const double e0 = std::exp(log_post[0] - m);
    const double e1 = std::exp(log_post[1] - m);
    const double p1 = e1 / (e0 + e1);
    return {p1 >= 0.5 ? 1 : 0, p1};
}

double cohen_kappa(int64_t tp, int64_t fp, int64_t fn, int64_t tn) {
    const double n = static_cast<double>(tp + fp + fn + tn);
    if (n <= 0) {
        return 0.0;
    }
    const double po = static_cast<double>(tp + tn) / n;
    const double pe = (static_cast<double>(tp + fp) * static_cast<double>(tp + fn) +
                       static_cast<double>(fn + tn) * static_cast<double>(fp + tn)) /
                      (n * n);
    if (pe >= 1.0) {
        return po >= 1.0 ? 1.0 : 0.0;
    }
    return (po - pe) / (1.0 - pe);
}

double roc_auc(const std::vector<double>& scores, const std::vector<int>& labels) {
    const std::size_t n = scores.size();
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
    double rank_sum_pos = 0.0;
    int64_t n_pos = 0, n_neg = 0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && scores[idx[j]] == scores[idx[i]]) {
            ++j;
        }
        const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);  // 1-based
        for (std::size_t k = i; k < j; ++k) {
            if (labels[idx[k]] == 1) {
                rank_sum_pos += avg_rank;
                ++n_pos;
            } else {
                ++n_neg;
            }
        }
        i = j;
    }
    if (n_pos == 0 || n_neg == 0) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    return (rank_sum_pos - 0.5 * static_cast<double>(n_pos) *
                               static_cast<double>(n_pos + 1)) /
           (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

ClassifierEvaluation evaluate_classifier(const DifferencedPanel& panel,
                                         const ClassifierConfig& config) {
    if (config.split <= 0.0 || config.split >= 1.0) {
        throw ConfigError("classifier split must be in (0, 1)");
    }
    if (config.repetitions < 1) {
        throw ConfigError("classifier repetitions must be >= 1");
    }
    // Rows with a zero outcome difference have no sign class; rows missing
    // a feature value cannot be scored.
    std::vector<std::vector<double>> features;
    std::vector<int> labels;
    std::size_t zeros = 0;
    for (const DiffRow& r : panel.rows) {
        const int s = sign_of(r.d_outcome);
        if (s == 0) {
            ++zeros;
            continue;
        }
        std::vector<double> f;
        f.reserve(config.features.size());
        bool complete = true;
        for (MetricField m : config.features) {
            const double v = r.metric(m);
            if (std::isnan(v)) {
                complete = false;
                break;
            }
            f.push_back(v);
        }
        if (!complete) {
            ++zeros;
            continue;
        }
        features.push_back(std::move(f));
        labels.push_back(s > 0 ? 1 : 0);
    }
    const std::size_t n = features.size();
    if (n < 10) {
        throw DataError("evaluate_classifier: need at least 10 usable rows, have " +
                        std::to_string(n));
    }
    std::vector<std::size_t> class_idx[2];
    for (std::size_t i = 0; i < n; ++i) {
        class_idx[labels[i]].push_back(i);
    }
    if (class_idx[0].empty() || class_idx[1].empty()) {
        throw DataError("evaluate_classifier: both outcome classes must be present");
    }

    struct RepResult {
        bool ok = false;
        double accuracy = 0.0;
        double kappa = 0.0;
        double auc = 0.0;
    };
    std::vector<RepResult> results(static_cast<std::size_t>(config.repetitions));

    auto run_rep = [&](std::size_t rep) {
        Rng rng(Rng::substream_seed(config.seed, rep));
        RepResult res;
        for (int attempt = 0; attempt < 5 && !res.ok; ++attempt) {
            std::vector<std::size_t> train, test;
            bool valid = true;
            for (int c = 0; c < 2; ++c) {
                std::vector<std::size_t> pool = class_idx[c];
                if (pool.size() < 2) {
                    valid = false;
                    break;
                }
                rng.shuffle(pool);
                std::size_t take = static_cast<std::size_t>(
                    std::floor(config.split * static_cast<double>(pool.size()) + 0.5));
                take = std::clamp<std::size_t>(take, 1, pool.size() - 1);
                train.insert(train.end(), pool.begin(), pool.begin() + take);
                test.insert(test.end(), pool.begin() + take, pool.end());
            }
            if (!valid) {
                break;
            }
            std::sort(train.begin(), train.end());
            std::sort(test.begin(), test.end());
            std::vector<std::vector<double>> xtr;
            std::vector<int> ytr;
            for (std::size_t i : train) {
                xtr.push_back(features[i]);
                ytr.push_back(labels[i]);
            }
            bool single_class = true;
            for (std::size_t i = 1; i < ytr.size(); ++i) {
                if (ytr[i] != ytr[0]) {
                    single_class = false;
                    break;
                }
            }
            if (single_class) {
                continue;  // redraw
            }
            const NbModel model = NbModel::train(xtr, ytr, config.encoding);
            int64_t tp = 0, fp = 0, fn = 0, tn = 0;
            std::vector<double> scores;
            std::vector<int> truth;
            for (std::size_t i : test) {
                const auto [cls, prob] = model.predict(features[i]);
                scores.push_back(prob);
                truth.push_back(labels[i]);
                if (cls == 1 && labels[i] == 1) ++tp;
                else if (cls == 1) ++fp;
                else if (labels[i] == 1) ++fn;
                else ++tn;
            }
            res.accuracy = static_cast<double>(tp + tn) /
                           static_cast<double>(tp + fp + fn + tn);
            res.kappa = cohen_kappa(tp, fp, fn, tn);
            res.auc = roc_auc(scores, truth);
            res.ok = !std::isnan(res.auc);
        }
        results[rep] = res;
    };

    const int nthreads = std::max(1, config.threads);
    if (nthreads == 1) {
        for (std::size_t rep = 0; rep < results.size(); ++rep) {
            run_rep(rep);
        }
    } else {
        std::atomic<std::size_t> next{0};
        auto worker = [&]() {
            while (true) {
                const std::size_t rep = next.fetch_add(1);
                if (rep >= results.size()) {
                    break;
                }
                run_rep(rep);
            }
        };
        std::vector<std::thread> pool;
        for (int t = 0; t < nthreads; ++t) {
            pool.emplace_back(worker);
        }
        for (auto& t : pool) {
            t.join();
        }
    }

    ClassifierEvaluation eval;
    eval.config = config;
    eval.rows_used = n;
    eval.zeros_excluded = zeros;
    for (const RepResult& r : results) {
        if (!r.ok) {
            ++eval.failed_repetitions;
            continue;
        }
        eval.accuracy.push_back(r.accuracy);
        eval.kappa.push_back(r.kappa);
        eval.auc.push_back(r.auc);
    }
    if (eval.accuracy.empty()) {
        throw DataError("evaluate_classifier: every repetition failed");
    }
    auto mean = [](const std::vector<double>& v) {
        double s = 0.0;
        for (double x : v) s += x;
        return s / static_cast<double>(v.size());
    };
    eval.mean_accuracy = mean(eval.accuracy);
    eval.mean_kappa = mean(eval.kappa);
    eval.mean_auc = mean(eval.auc);
    return eval;
}

}  // namespace sbs
