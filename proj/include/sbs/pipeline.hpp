#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sbs/brandscore.hpp"
#include "sbs/coocgraph.hpp"
#include "sbs/corpus.hpp"
#include "sbs/panelstats.hpp"
#include "sbs/textprep.hpp"

namespace sbs {

struct ModelSpec {
    std::string name;
    std::vector<MetricField> predictors;
};

struct AnalysisConfig {
    int lag = 0;
    uint64_t seed = 42;
    double split = 0.70;
    int repetitions = 500;
    std::string reference_entity;  // dummy-coding reference; default lexicographic first
    std::vector<MetricField> nb_features = {MetricField::Sbs, MetricField::Prevalence,
                                            MetricField::Diversity,
                                            MetricField::Connectivity};
    NbEncoding nb_encoding = NbEncoding::Sign;
    MetricField concordance_predictor = MetricField::Sbs;
    std::vector<ModelSpec> models;  // empty -> default model battery
};

struct BrandSpec {
    std::string token;   // canonical brand token
    std::string source;  // home source for the panel; may be empty
};

// Everything one run needs, loaded from a single JSON document. Relative
// paths resolve against the config file's directory.
struct PipelineConfig {
    std::string corpus_path;
    CorpusFormat corpus_format = CorpusFormat::DelimitedTable;
    std::string alias_path;     // optional
    std::string stopword_path;  // optional; built-in English list when empty
    std::string lexicon_path;   // optional; sentiment undefined when empty
    std::string outcome_path;   // required by analyze
    int window = 5;
    int min_weight = 5;
    std::vector<BrandSpec> brands;
    std::string output_dir = "sbs_out";
    int threads = 0;  // 0 -> SBS_THREADS env var -> 1
    AnalysisConfig analysis;

    static PipelineConfig load(const std::string& path);

    // flag > config > default precedence; keys mirror the config fields.
    void set_option(const std::string& key, const std::string& value);

    // Checks referenced files exist and parameters are in range.
    void validate_for(const std::string& stage) const;

    std::string canonical_json() const;

    int effective_threads() const;
};

struct StageRecord {
    std::string name;
    double seconds = 0.0;
    // output path (relative to output_dir) -> sha256 of the bytes written
    std::map<std::string, std::string> outputs;
};

struct RunManifest {
    std::string tool_version;
    std::string config_digest;
    std::vector<StageRecord> stages;
    std::vector<std::string> warnings;

    std::string to_json() const;
};

// Caches intermediates so `run` computes each stage once; individual stage
// commands recompute what they need from the immutable inputs.
class Pipeline {
public:
    explicit Pipeline(PipelineConfig config);

    const PipelineConfig& config() const { return config_; }
    const std::vector<std::string>& warnings() const { return warnings_; }

    StageRecord cmd_preprocess();
    StageRecord cmd_network();
    StageRecord cmd_score();
    StageRecord cmd_analyze();
    RunManifest cmd_run();

private:
    PipelineConfig config_;
    std::vector<std::string> warnings_;

    // lazily computed shared state
    bool loaded_ = false;
    Corpus corpus_;
    AliasMap aliases_;
    StopwordList stopwords_;
    std::optional<PolarityLexicon> lexicon_;
    std::map<SliceKey, std::vector<TokenStream>> streams_;
    std::map<SliceKey, CoocNetwork> networks_;  // pruned
    std::vector<BrandMetrics> metrics_;
    bool metrics_ready_ = false;

    void ensure_inputs();
    void ensure_streams();
    void ensure_networks();
    void ensure_metrics();
    std::string slice_file_stem(const SliceKey& key) const;
    std::string out_path(const std::string& relative) const;
    void write_output(StageRecord& record, const std::string& relative,
                      std::string_view content);
};

std::string tool_version();

}  // namespace sbs
