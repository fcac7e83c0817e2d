#include "sbs/pipeline.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <set>
#include <sstream>

#include "sbs/csv.hpp"
#include "sbs/util.hpp"

namespace sbs {

namespace fs = std::filesystem;
using nlohmann::json;

std::string tool_version() { return "1.0.0"; }

namespace {

std::string resolve_path(const fs::path& base, const std::string& p) {
    if (p.empty()) {
        return p;
    }
    fs::path path(p);
    if (path.is_absolute() || base.empty()) {
        return path.lexically_normal().string();
    }
    return (base / path).lexically_normal().string();
}

int64_t to_int(const std::string& value, const std::string& key) {
    try {
        std::size_t consumed = 0;
        const int64_t v = std::stoll(value, &consumed);
        if (consumed != value.size()) {
            throw std::invalid_argument(value);
        }
        return v;
    } catch (const std::exception&) {
        throw ConfigError("option " + key + ": invalid integer '" + value + "'");
    }
}

double to_double(const std::string& value, const std::string& key) {
    try {
        std::size_t consumed = 0;
        const double v = std::stod(value, &consumed);
        if (consumed != value.size()) {
            throw std::invalid_argument(value);
        }
        return v;
    } catch (const std::exception&) {
        throw ConfigError("option " + key + ": invalid number '" + value + "'");
    }
}

std::vector<MetricField> parse_fields(const json& arr, const std::string& where) {
    if (!arr.is_array()) {
        throw ConfigError(where + " must be an array of metric names");
    }
    std::vector<MetricField> out;
    for (const auto& item : arr) {
        if (!item.is_string()) {
            throw ConfigError(where + " entries must be strings");
        }
        out.push_back(metric_field_from_string(item.get<std::string>()));
    }
    return out;
}

const json* find(const json& obj, const char* key) {
    const auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
}

std::string require_string(const json& obj, const char* key, const std::string& where) {
    const json* v = find(obj, key);
    if (!v || !v->is_string()) {
        throw ConfigError(where + ": missing or non-string field '" + key + "'");
    }
    return v->get<std::string>();
}

}  // namespace

PipelineConfig PipelineConfig::load(const std::string& path) {
    std::string raw;
    try {
        raw = read_file(path);
    } catch (const DataError& e) {
        throw ConfigError(e.what());
    }
    json doc = json::parse(raw, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
        throw ConfigError(path + ": config is not a JSON object");
    }
    const fs::path base = fs::path(path).parent_path();
    PipelineConfig cfg;

    const json* corpus = find(doc, "corpus");
    if (!corpus || !corpus->is_object()) {
        throw ConfigError(path + ": missing 'corpus' object");
    }
    cfg.corpus_path = resolve_path(base, require_string(*corpus, "path", "corpus"));
    cfg.corpus_format =
        corpus_format_from_string(require_string(*corpus, "format", "corpus"));

    if (const json* v = find(doc, "aliases")) {
        cfg.alias_path = resolve_path(base, v->get<std::string>());
    }
    if (const json* v = find(doc, "stopwords")) {
        cfg.stopword_path = resolve_path(base, v->get<std::string>());
    }
    if (const json* v = find(doc, "lexicon")) {
        cfg.lexicon_path = resolve_path(base, v->get<std::string>());
    }
    if (const json* v = find(doc, "outcomes")) {
        cfg.outcome_path = resolve_path(base, v->get<std::string>());
    }
    if (const json* v = find(doc, "window")) {
        cfg.window = v->get<int>();
    }
    if (const json* v = find(doc, "min_weight")) {
        cfg.min_weight = v->get<int>();
    }
    if (const json* v = find(doc, "output_dir")) {
        cfg.output_dir = resolve_path(base, v->get<std::string>());
    }
    if (const json* v = find(doc, "threads")) {
        cfg.threads = v->get<int>();
    }
    if (const json* v = find(doc, "brands")) {
        if (!v->is_array()) {
            throw ConfigError("'brands' must be an array");
        }
        for (const auto& item : *v) {
            BrandSpec spec;
            if (item.is_string()) {
                spec.token = item.get<std::string>();
            } else if (item.is_object()) {
                spec.token = require_string(item, "token", "brands");
                if (const json* s = find(item, "source")) {
                    spec.source = s->get<std::string>();
                }
            } else {
                throw ConfigError("'brands' entries must be strings or objects");
            }
            cfg.brands.push_back(std::move(spec));
        }
    }
    if (const json* v = find(doc, "analysis")) {
        if (!v->is_object()) {
            throw ConfigError("'analysis' must be an object");
        }
        AnalysisConfig& a = cfg.analysis;
        if (const json* x = find(*v, "lag")) a.lag = x->get<int>();
        if (const json* x = find(*v, "seed")) a.seed = x->get<uint64_t>();
        if (const json* x = find(*v, "split")) a.split = x->get<double>();
        if (const json* x = find(*v, "repetitions")) a.repetitions = x->get<int>();
        if (const json* x = find(*v, "reference_entity"))
            a.reference_entity = x->get<std::string>();
        if (const json* x = find(*v, "nb_features"))
            a.nb_features = parse_fields(*x, "analysis.nb_features");
        if (const json* x = find(*v, "nb_encoding"))
            a.nb_encoding = nb_encoding_from_string(x->get<std::string>());
        if (const json* x = find(*v, "concordance_predictor"))
            a.concordance_predictor = metric_field_from_string(x->get<std::string>());
        if (const json* x = find(*v, "models")) {
            if (!x->is_array()) {
                throw ConfigError("analysis.models must be an array");
            }
            for (const auto& m : *x) {
                ModelSpec spec;
                spec.name = require_string(m, "name", "analysis.models");
                if (const json* p = find(m, "predictors")) {
                    spec.predictors = parse_fields(*p, "analysis.models.predictors");
                }
                a.models.push_back(std::move(spec));
            }
        }
    }
    return cfg;
}

void PipelineConfig::set_option(const std::string& key, const std::string& value) {
    if (key == "corpus") {
        corpus_path = value;
    } else if (key == "corpus_format" || key == "format") {
        corpus_format = corpus_format_from_string(value);
    } else if (key == "aliases") {
        alias_path = value;
    } else if (key == "stopwords") {
        stopword_path = value;
    } else if (key == "lexicon") {
        lexicon_path = value;
    } else if (key == "outcomes") {
        outcome_path = value;
    } else if (key == "window") {
        window = static_cast<int>(to_int(value, key));
    } else if (key == "min_weight") {
        min_weight = static_cast<int>(to_int(value, key));
    } else if (key == "output_dir") {
        output_dir = value;
    } else if (key == "threads") {
        threads = static_cast<int>(to_int(value, key));
    } else if (key == "lag") {
        analysis.lag = static_cast<int>(to_int(value, key));
    } else if (key == "seed") {
        analysis.seed = static_cast<uint64_t>(to_int(value, key));
    } else if (key == "split") {
        analysis.split = to_double(value, key);
    } else if (key == "repetitions") {
        analysis.repetitions = static_cast<int>(to_int(value, key));
    } else if (key == "reference_entity") {
        analysis.reference_entity = value;
    } else if (key == "nb_encoding") {
        analysis.nb_encoding = nb_encoding_from_string(value);
    } else if (key == "concordance_predictor") {
        analysis.concordance_predictor = metric_field_from_string(value);
    } else {
        throw ConfigError("unknown option '" + key + "'");
    }
}

void PipelineConfig::validate_for(const std::string& stage) const {
    auto must_exist = [](const std::string& p, const std::string& what) {
        if (!p.empty() && !fs::exists(p)) {
            throw ConfigError(what + " file not found: " + p);
        }
    };
    if (corpus_path.empty()) {
        throw ConfigError("corpus path not configured");
    }
    must_exist(corpus_path, "corpus");
    must_exist(alias_path, "alias map");
    must_exist(stopword_path, "stopword");
    must_exist(lexicon_path, "lexicon");
    if (window < 2) {
        throw ConfigError("window size must be >= 2");
    }
    if (min_weight < 1) {
        throw ConfigError("min edge weight must be >= 1");
    }
    if (threads < 0) {
        throw ConfigError("threads must be >= 0");
    }
    std::set<std::string> seen;
    for (const BrandSpec& b : brands) {
        if (b.token.empty()) {
            throw ConfigError("brand token must be non-empty");
        }
        if (!seen.insert(b.token).second) {
            throw ConfigError("duplicate brand token '" + b.token + "'");
        }
    }
    const bool needs_brands = stage == "score" || stage == "analyze" || stage == "run";
    if (needs_brands && brands.empty()) {
        throw ConfigError("stage '" + stage + "' requires a non-empty brand list");
    }
    const bool needs_outcomes = stage == "analyze" || stage == "run";
    if (needs_outcomes) {
        if (outcome_path.empty()) {
            throw ConfigError("stage '" + stage + "' requires an outcomes file");
        }
        must_exist(outcome_path, "outcomes");
        if (analysis.split <= 0.0 || analysis.split >= 1.0) {
            throw ConfigError("analysis.split must be in (0, 1)");
        }
        if (analysis.repetitions < 1) {
            throw ConfigError("analysis.repetitions must be >= 1");
        }
        if (analysis.lag < 0) {
            throw ConfigError("analysis.lag must be >= 0");
        }
    }
}

std::string PipelineConfig::canonical_json() const {
    json doc;
    doc["corpus"] = {{"path", corpus_path},
                     {"format", corpus_format == CorpusFormat::DelimitedTable
                                    ? "delimited-table"
                                    : "line-delimited-records"}};
    doc["aliases"] = alias_path;
    doc["stopwords"] = stopword_path;
    doc["lexicon"] = lexicon_path;
    doc["outcomes"] = outcome_path;
    doc["window"] = window;
    doc["min_weight"] = min_weight;
    doc["output_dir"] = output_dir;
    doc["threads"] = threads;
    json brand_arr = json::array();
    for (const BrandSpec& b : brands) {
        brand_arr.push_back({{"token", b.token}, {"source", b.source}});
    }
    doc["brands"] = brand_arr;
    json a;
    a["lag"] = analysis.lag;
    a["seed"] = analysis.seed;
    a["split"] = analysis.split;
    a["repetitions"] = analysis.repetitions;
    a["reference_entity"] = analysis.reference_entity;
    json feats = json::array();
    for (MetricField f : analysis.nb_features) {
        feats.push_back(metric_field_name(f));
    }
    a["nb_features"] = feats;
    a["nb_encoding"] = analysis.nb_encoding == NbEncoding::Sign ? "sign" : "gaussian";
    a["concordance_predictor"] = metric_field_name(analysis.concordance_predictor);
    json models = json::array();
    for (const ModelSpec& m : analysis.models) {
        json preds = json::array();
        for (MetricField f : m.predictors) {
            preds.push_back(metric_field_name(f));
        }
        models.push_back({{"name", m.name}, {"predictors", preds}});
    }
    a["models"] = models;
    doc["analysis"] = a;
    return doc.dump();
}

int PipelineConfig::effective_threads() const {
    if (threads > 0) {
        return threads;
    }
    if (const char* env = std::getenv("SBS_THREADS")) {
        try {
            const int v = std::stoi(env);
            if (v > 0) {
                return v;
            }
        } catch (const std::exception&) {
            // fall through to default
        }
    }
    return 1;
}

Pipeline::Pipeline(PipelineConfig config) : config_(std::move(config)) {}

void Pipeline::ensure_inputs() {
    if (loaded_) {
        return;
    }
    if (!config_.alias_path.empty()) {
        aliases_ = AliasMap::load(config_.alias_path);
    }
    // Brand tokens act as canonical tokens even without an alias entry so
    // they are exempt from stopword removal and stemming.
    for (const BrandSpec& b : config_.brands) {
        if (!aliases_.canonical_tokens().count(b.token)) {
            aliases_.add(b.token, b.token);
        }
    }
    stopwords_ = config_.stopword_path.empty() ? StopwordList::default_english()
                                               : StopwordList::load(config_.stopword_path);
    if (!config_.lexicon_path.empty()) {
        lexicon_ = PolarityLexicon::load(config_.lexicon_path);
    }
    LoadReport report;
    corpus_ = load_corpus(config_.corpus_path, config_.corpus_format, &report);
    if (report.invalid_utf8_replacements > 0) {
        warnings_.push_back("corpus: replaced " +
                            std::to_string(report.invalid_utf8_replacements) +
                            " invalid UTF-8 sequences");
    }
    if (corpus_.empty()) {
        warnings_.push_back("corpus: no documents loaded");
    }
    loaded_ = true;
}

void Pipeline::ensure_streams() {
    ensure_inputs();
    if (!streams_.empty() || corpus_.empty()) {
        return;
    }
    for (const auto& [key, slice] : corpus_.partition()) {
        std::vector<TokenStream> streams;
        streams.reserve(slice.size());
        for (const Document& doc : slice.documents()) {
            streams.push_back(preprocess(doc, aliases_, stopwords_));
        }
        streams_.emplace(key, std::move(streams));
    }
}

void Pipeline::ensure_networks() {
    ensure_streams();
    if (!networks_.empty()) {
        return;
    }
    for (const auto& [key, streams] : streams_) {
        CoocNetwork net = build_network(streams, WindowSpec{config_.window});
        CoocNetwork pruned = prune(net, config_.min_weight);
        pruned.source = key.first;
        pruned.period = key.second;
        networks_.emplace(key, std::move(pruned));
    }
}

void Pipeline::ensure_metrics() {
    ensure_networks();
    if (metrics_ready_) {
        return;
    }
    const int threads = config_.effective_threads();
    for (const auto& [key, net] : networks_) {
        if (net.node_count() == 0) {
            warnings_.push_back("slice " + key.first + ":" + std::to_string(key.second) +
                                ": empty network, no scores computed");
            continue;
        }
        const SliceScores scores = score_slice(net, threads);
        if (scores.prevalence_meta.degenerate_scale ||
            scores.diversity_meta.degenerate_scale ||
            scores.connectivity_meta.degenerate_scale) {
            warnings_.push_back("slice " + key.first + ":" + std::to_string(key.second) +
                                ": degenerate IQR, median-centering only");
        }
        for (const BrandSpec& b : config_.brands) {
            metrics_.push_back(brand_metrics(b.token, net, scores,
                                             lexicon_ ? &*lexicon_ : nullptr));
        }
    }
    std::sort(metrics_.begin(), metrics_.end(),
              [](const BrandMetrics& a, const BrandMetrics& b) {
                  if (a.source != b.source) return a.source < b.source;
                  if (a.period != b.period) return a.period < b.period;
                  return a.brand < b.brand;
              });
    metrics_ready_ = true;
}

std::string Pipeline::slice_file_stem(const SliceKey& key) const {
    std::string s;
    for (char c : key.first) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                        (c >= '0' && c <= '9') || c == '-' || c == '_';
        s.push_back(ok ? c : '_');
    }
    return s + "_" + std::to_string(key.second);
}

std::string Pipeline::out_path(const std::string& relative) const {
    return (fs::path(config_.output_dir) / relative).string();
}

void Pipeline::write_output(StageRecord& record, const std::string& relative,
                            std::string_view content) {
    atomic_write_file(out_path(relative), content);
    record.outputs[relative] = sha256_hex(content);
}

StageRecord Pipeline::cmd_preprocess() {
    config_.validate_for("preprocess");
    const auto start = std::chrono::steady_clock::now();
    StageRecord record;
    record.name = "preprocess";
    ensure_streams();
    std::set<std::string> stems;
    for (const auto& [key, streams] : streams_) {
        const std::string stem = slice_file_stem(key);
        if (!stems.insert(stem).second) {
            throw ConfigError("source labels collide after sanitization: " + stem);
        }
        std::string out;
        for (const TokenStream& ts : streams) {
            out += ts.doc_id;
            out += '\t';
            for (std::size_t i = 0; i < ts.tokens.size(); ++i) {
                if (i) {
                    out += ' ';
                }
                out += ts.tokens[i];
            }
            out += '\n';
        }
        write_output(record, "tokens/" + stem + ".tsv", out);
    }
    record.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                         .count();
    return record;
}

StageRecord Pipeline::cmd_network() {
    config_.validate_for("network");
    const auto start = std::chrono::steady_clock::now();
    StageRecord record;
    record.name = "network";
    ensure_networks();
    for (const auto& [key, net] : networks_) {
        write_output(record, "networks/" + slice_file_stem(key) + ".tsv",
                     serialize_network(net));
    }
    record.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                         .count();
    return record;
}

StageRecord Pipeline::cmd_score() {
    config_.validate_for("score");
    const auto start = std::chrono::steady_clock::now();
    StageRecord record;
    record.name = "score";
    ensure_metrics();

    std::string csv = "source,period,brand,prevalence,diversity,connectivity,"
                      "std_prevalence,std_diversity,std_connectivity,sbs,sentiment\n";
    for (const BrandMetrics& m : metrics_) {
        std::vector<std::string> fields = {
            m.source,
            std::to_string(m.period),
            m.brand,
            format_double(m.prevalence),
            format_double(m.diversity),
            format_double(m.connectivity),
            format_double(m.std_prevalence),
            format_double(m.std_diversity),
            format_double(m.std_connectivity),
            format_double(m.sbs),
            m.sentiment ? format_double(*m.sentiment) : "NA",
        };
        csv += csv_join(fields);
        csv += '\n';
    }
    write_output(record, "scores/metrics.csv", csv);

    json meta = json::array();
    for (const auto& [key, net] : networks_) {
        if (net.node_count() == 0) {
            continue;
        }
        // Standardization metadata per slice so the quartile convention is
        // auditable from the output alone.
        const SliceScores scores = score_slice(net, config_.effective_threads());
        auto meta_of = [](const ComponentMeta& m) {
            return json{{"median", m.median},
                        {"iqr", m.iqr},
                        {"degenerate_scale", m.degenerate_scale}};
        };
        meta.push_back({{"source", key.first},
                        {"period", key.second},
                        {"nodes", net.node_count()},
                        {"edges", net.edge_count()},
                        {"quartile_method", "inclusive-linear-interpolation"},
                        {"prevalence", meta_of(scores.prevalence_meta)},
                        {"diversity", meta_of(scores.diversity_meta)},
                        {"connectivity", meta_of(scores.connectivity_meta)}});
    }
    write_output(record, "scores/metadata.json", meta.dump(2) + "\n");
    record.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                         .count();
    return record;
}

namespace {

std::string significance_stars(double p) {
    if (p < 0.001) return "***";
    if (p < 0.01) return "**";
    if (p < 0.05) return "*";
    return "";
}

}  // namespace

StageRecord Pipeline::cmd_analyze() {
    config_.validate_for("analyze");
    const auto start = std::chrono::steady_clock::now();
    StageRecord record;
    record.name = "analyze";
    ensure_metrics();

    const std::vector<OutcomeRow> outcomes = load_outcomes(config_.outcome_path);

    // Each brand's panel rows come from its home source.
    std::set<std::string> sources;
    for (const BrandMetrics& m : metrics_) {
        sources.insert(m.source);
    }
    std::vector<BrandMetrics> selected;
    for (const BrandSpec& b : config_.brands) {
        std::string home = b.source;
        if (home.empty()) {
            if (sources.size() == 1) {
                home = *sources.begin();
            } else {
                throw ConfigError("brand '" + b.token +
                                  "' needs an explicit source: corpus has " +
                                  std::to_string(sources.size()) + " sources");
            }
        } else if (!sources.count(home)) {
            throw ConfigError("brand '" + b.token + "': source '" + home +
                              "' not present in corpus");
        }
        for (const BrandMetrics& m : metrics_) {
            if (m.brand == b.token && m.source == home) {
                selected.push_back(m);
            }
        }
    }

    PanelJoinReport join_report;
    const std::vector<PanelObservation> panel =
        build_panel(selected, outcomes, &join_report);
    for (const std::string& k : join_report.unmatched_outcomes) {
        warnings_.push_back("outcome row without metrics: " + k);
    }
    for (const std::string& k : join_report.unmatched_metrics) {
        warnings_.push_back("metrics row without outcome: " + k);
    }

    const DifferencedPanel dpanel = first_difference(panel, config_.analysis.lag);
    for (const std::string& e : dpanel.dropped_entities) {
        warnings_.push_back("entity dropped from differenced panel (too few periods): " + e);
    }

    const std::vector<VariableStats> stats = describe(panel);

    const MetricField cpred = config_.analysis.concordance_predictor;
    const ContingencyTable table = concordance(dpanel, cpred);
    const ChiSquareResult chi2 = chi_square_test(table);
    const double fisher_p = fisher_exact_test(table);

    std::vector<ModelSpec> models = config_.analysis.models;
    if (models.empty()) {
        const bool with_sentiment = lexicon_.has_value();
        models.push_back({"Model 1", {}});
        models.push_back({"Model 2", {MetricField::Prevalence}});
        models.push_back({"Model 3", {MetricField::Diversity}});
        models.push_back({"Model 4", {MetricField::Connectivity}});
        if (with_sentiment) {
            models.push_back({"Model 5", {MetricField::Sentiment}});
        }
        models.push_back({"Model 6", {MetricField::Prevalence, MetricField::Diversity,
                                      MetricField::Connectivity}});
        models.push_back({"Model 7", {MetricField::Sbs}});
        if (with_sentiment) {
            models.push_back({"Model 8", {MetricField::Sbs, MetricField::Sentiment}});
        }
    }
    std::vector<RegressionFit> fits;
    for (const ModelSpec& m : models) {
        OlsSpec spec;
        spec.predictors = m.predictors;
        spec.time_trend = true;
        spec.entity_dummies = true;
        spec.reference_entity = config_.analysis.reference_entity;
        fits.push_back(ols(dpanel, spec));
    }

    ClassifierConfig cc;
    cc.split = config_.analysis.split;
    cc.repetitions = config_.analysis.repetitions;
    cc.seed = config_.analysis.seed;
    cc.features = config_.analysis.nb_features;
    cc.encoding = config_.analysis.nb_encoding;
    cc.threads = config_.effective_threads();
    const ClassifierEvaluation eval = evaluate_classifier(dpanel, cc);

    // ---- human-readable report -------------------------------------------
    std::ostringstream txt;
    txt << "semantic brand score analysis report\n";
    txt << "=====================================\n\n";
    txt << "descriptive statistics (levels panel, n = " << panel.size() << ")\n";
    txt << "variable\tn\tmean\tsd\tmin\tmax\n";
    for (const VariableStats& s : stats) {
        txt << s.name << '\t' << s.n << '\t' << format_double(s.mean) << '\t'
            << (s.sd ? format_double(*s.sd) : "NA") << '\t' << format_double(s.min)
            << '\t' << format_double(s.max) << '\n';
    }
    txt << "\nconcordance of d_" << metric_field_name(cpred) << " with d_outcome\n";
    txt << "\td_outcome>0\td_outcome<0\n";
    txt << "d_" << metric_field_name(cpred) << ">0\t" << table.pos_pos << '\t'
        << table.pos_neg << '\n';
    txt << "d_" << metric_field_name(cpred) << "<0\t" << table.neg_pos << '\t'
        << table.neg_neg << '\n';
    txt << "zeros excluded\t" << table.zeros_excluded << '\n';
    txt << "concordance rate\t" << format_double(table.concordance_rate()) << '\n';
    txt << "pearson chi-square\t" << format_double(chi2.statistic) << "\tdf\t" << chi2.df
        << "\tp\t" << format_double(chi2.p_value) << '\n';
    txt << "fisher exact (two-sided)\tp\t" << format_double(fisher_p) << '\n';

    txt << "\nregression models (dependent variable: d_outcome)\n";
    {
        std::vector<std::string> row_labels;
        for (const RegressionFit& fit : fits) {
            for (const std::string& c : fit.columns) {
                if (std::find(row_labels.begin(), row_labels.end(), c) == row_labels.end()) {
                    row_labels.push_back(c);
                }
            }
        }
        txt << "term";
        for (const ModelSpec& m : models) {
            txt << '\t' << m.name;
        }
        txt << '\n';
        for (const std::string& label : row_labels) {
            txt << label;
            for (const RegressionFit& fit : fits) {
                txt << '\t';
                const auto it = std::find(fit.columns.begin(), fit.columns.end(), label);
                if (it != fit.columns.end()) {
                    const std::size_t j =
                        static_cast<std::size_t>(it - fit.columns.begin());
                    txt << format_double(fit.coef[j]) << significance_stars(fit.p_value[j]);
                }
            }
            txt << '\n';
        }
        auto stat_row = [&](const std::string& name, auto getter) {
            txt << name;
            for (const RegressionFit& fit : fits) {
                txt << '\t' << getter(fit);
            }
            txt << '\n';
        };
        stat_row("n", [](const RegressionFit& f) { return std::to_string(f.n); });
        stat_row("R-Squared", [](const RegressionFit& f) { return format_double(f.r2); });
        stat_row("Adj R-Squared",
                 [](const RegressionFit& f) { return format_double(f.adj_r2); });
        stat_row("max VIF", [](const RegressionFit& f) {
            double mx = 0.0;
            bool any = false;
            for (double v : f.vif) {
                if (!std::isnan(v)) {
                    mx = std::max(mx, v);
                    any = true;
                }
            }
            return any ? format_double(mx) : std::string("NA");
        });
        txt << "significance: * p<.05, ** p<.01, *** p<.001\n";
    }

    txt << "\nnaive bayes direction classifier\n";
    txt << "encoding\t" << (cc.encoding == NbEncoding::Sign ? "sign" : "gaussian") << '\n';
    txt << "features";
    for (MetricField f : cc.features) {
        txt << "\td_" << metric_field_name(f);
    }
    txt << '\n';
    txt << "train fraction\t" << format_double(cc.split) << '\n';
    txt << "repetitions\t" << cc.repetitions << '\n';
    txt << "seed\t" << cc.seed << '\n';
    txt << "rows used\t" << eval.rows_used << '\n';
    txt << "rows excluded (zero/undefined)\t" << eval.zeros_excluded << '\n';
    txt << "failed repetitions\t" << eval.failed_repetitions << '\n';
    txt << "mean accuracy\t" << format_double(eval.mean_accuracy) << '\n';
    txt << "mean cohen kappa\t" << format_double(eval.mean_kappa) << '\n';
    txt << "mean roc auc\t" << format_double(eval.mean_auc) << '\n';
    write_output(record, "analysis/report.txt", txt.str());

    // ---- machine-readable report -----------------------------------------
    json jr;
    json jstats = json::array();
    for (const VariableStats& s : stats) {
        json row{{"variable", s.name}, {"n", s.n},       {"mean", s.mean},
                 {"min", s.min},       {"max", s.max}};
        if (s.sd) {
            row["sd"] = *s.sd;
        } else {
            row["sd"] = nullptr;
        }
        jstats.push_back(row);
    }
    jr["descriptive_statistics"] = jstats;
    jr["concordance"] = {
        {"predictor", "d_" + metric_field_name(cpred)},
        {"table",
         {{"pos_pos", table.pos_pos},
          {"pos_neg", table.pos_neg},
          {"neg_pos", table.neg_pos},
          {"neg_neg", table.neg_neg}}},
        {"zeros_excluded", table.zeros_excluded},
        {"rate", table.concordance_rate()},
        {"chi_square", {{"statistic", chi2.statistic}, {"df", chi2.df},
                        {"p_value", chi2.p_value}}},
        {"fisher_exact_p", fisher_p},
    };
    json jmodels = json::array();
    for (std::size_t i = 0; i < fits.size(); ++i) {
        const RegressionFit& fit = fits[i];
        json coeffs = json::array();
        for (std::size_t j = 0; j < fit.columns.size(); ++j) {
            json c{{"term", fit.columns[j]}, {"coef", fit.coef[j]},   {"se", fit.se[j]},
                   {"t", fit.t_stat[j]},     {"p", fit.p_value[j]}};
            if (std::isnan(fit.vif[j])) {
                c["vif"] = nullptr;
            } else if (std::isinf(fit.vif[j])) {
                c["vif"] = "inf";
            } else {
                c["vif"] = fit.vif[j];
            }
            coeffs.push_back(c);
        }
        jmodels.push_back({{"name", models[i].name},
                           {"n", fit.n},
                           {"r2", fit.r2},
                           {"adj_r2", fit.adj_r2},
                           {"coefficients", coeffs}});
    }
    jr["regression"] = {{"models", jmodels}};
    json jfeat = json::array();
    for (MetricField f : cc.features) {
        jfeat.push_back("d_" + metric_field_name(f));
    }
    jr["classifier"] = {
        {"encoding", cc.encoding == NbEncoding::Sign ? "sign" : "gaussian"},
        {"features", jfeat},
        {"split", cc.split},
        {"repetitions", cc.repetitions},
        {"seed", cc.seed},
        {"rows_used", eval.rows_used},
        {"rows_excluded", eval.zeros_excluded},
        {"failed_repetitions", eval.failed_repetitions},
        {"mean_accuracy", eval.mean_accuracy},
        {"mean_kappa", eval.mean_kappa},
        {"mean_auc", eval.mean_auc},
    };
    jr["lag"] = config_.analysis.lag;
    write_output(record, "analysis/report.json", jr.dump(2) + "\n");

    record.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                         .count();
    return record;
}

RunManifest Pipeline::cmd_run() {
    config_.validate_for("run");
    RunManifest manifest;
    manifest.tool_version = tool_version();
    manifest.config_digest = sha256_hex(config_.canonical_json());
    manifest.stages.push_back(cmd_preprocess());
    manifest.stages.push_back(cmd_network());
    manifest.stages.push_back(cmd_score());
    manifest.stages.push_back(cmd_analyze());
    manifest.warnings = warnings_;
    atomic_write_file(out_path("manifest.json"), manifest.to_json());
    return manifest;
}

std::string RunManifest::to_json() const {
    json doc;
    doc["tool_version"] = tool_version;
    doc["config_digest"] = config_digest;
    json jstages = json::array();
    for (const StageRecord& s : stages) {
        json outputs;
        for (const auto& [path, digest] : s.outputs) {
            outputs[path] = digest;
        }
        jstages.push_back({{"name", s.name}, {"seconds", s.seconds},
                           {"outputs", outputs}});
    }
    doc["stages"] = jstages;
    doc["warnings"] = warnings;
    return doc.dump(2) + "\n";
}

}  // namespace sbs
