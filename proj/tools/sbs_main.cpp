#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sbs.h"

namespace {

struct StageOptions {
    std::string config_path;
    std::map<std::string, std::string> overrides;
};

void add_common_options(CLI::App* cmd, StageOptions& opts) {
    cmd->add_option("-c,--config", opts.config_path, "pipeline config file (JSON)")
        ->required();
    auto add_override = [cmd, &opts](const std::string& flag, const std::string& key,
                                     const std::string& help) {
        auto* opt = cmd->add_option_function<std::string>(
            flag, [&opts, key](const std::string& v) { opts.overrides[key] = v; }, help);
        opt->expected(1);
    };
    add_override("--window", "window", "co-occurrence window size (default 5)");
    add_override("--min-weight", "min_weight", "minimum edge weight kept (default 5)");
    add_override("--output-dir", "output_dir", "output directory");
    add_override("--threads", "threads", "worker threads (default $SBS_THREADS or 1)");
    add_override("--lag", "lag", "predictor lag in periods");
    add_override("--seed", "seed", "classifier evaluation seed");
    add_override("--split", "split", "classifier training fraction");
    add_override("--repetitions", "repetitions", "classifier split repetitions");
    add_override("--reference-entity", "reference_entity",
                 "reference entity for dummy coding");
    add_override("--nb-encoding", "nb_encoding", "naive bayes encoding: sign|gaussian");
    add_override("--concordance-predictor", "concordance_predictor",
                 "field for the concordance table");
    add_override("--corpus", "corpus", "corpus file path");
    add_override("--corpus-format", "corpus_format",
                 "delimited-table|line-delimited-records");
    add_override("--aliases", "aliases", "alias map file");
    add_override("--stopwords", "stopwords", "stopword file");
    add_override("--lexicon", "lexicon", "polarity lexicon file");
    add_override("--outcomes", "outcomes", "outcome series file");
}

int run_stage(const char* stage, const StageOptions& opts) {
    sbs_pipeline* pipeline = nullptr;
    sbs_status st = sbs_pipeline_open(opts.config_path.c_str(), &pipeline);
    if (st != SBS_OK) {
        std::fprintf(stderr, "sbs: %s\n",
                     pipeline ? sbs_pipeline_last_error(pipeline) : "cannot open config");
        sbs_pipeline_close(pipeline);
        return st;
    }
    for (const auto& [key, value] : opts.overrides) {
        st = sbs_pipeline_set_option(pipeline, key.c_str(), value.c_str());
        if (st != SBS_OK) {
            std::fprintf(stderr, "sbs: %s\n", sbs_pipeline_last_error(pipeline));
            sbs_pipeline_close(pipeline);
            return st;
        }
    }
    st = sbs_pipeline_run_stage(pipeline, stage);
    const size_t warnings = sbs_pipeline_warning_count(pipeline);
    for (size_t i = 0; i < warnings; ++i) {
        std::fprintf(stderr, "sbs: warning: %s\n", sbs_pipeline_warning(pipeline, i));
    }
    if (st != SBS_OK) {
        std::fprintf(stderr, "sbs: %s\n", sbs_pipeline_last_error(pipeline));
    } else {
        std::fprintf(stdout, "sbs: %s complete, outputs in %s\n", stage,
                     sbs_pipeline_output_dir(pipeline));
    }
    sbs_pipeline_close(pipeline);
    return st;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"semantic brand score pipeline"};
    app.set_version_flag("--version", std::string(sbs_version()));
    app.require_subcommand(1);

    const std::vector<std::pair<const char*, const char*>> stages = {
        {"preprocess", "normalize documents into per-slice token streams"},
        {"network", "build and prune per-slice co-occurrence networks"},
        {"score", "compute brand prevalence/diversity/connectivity/SBS/sentiment"},
        {"analyze", "panel statistics: tests, regressions, classifier"},
        {"run", "all stages in sequence plus a run manifest"},
    };
    std::map<std::string, StageOptions> options;
    for (const auto& [name, help] : stages) {
        auto* cmd = app.add_subcommand(name, help);
        add_common_options(cmd, options[name]);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : SBS_ERR_CONFIG;
    }

    for (const auto& [name, help] : stages) {
        if (app.got_subcommand(name)) {
            return run_stage(name, options[name]);
        }
    }
    return SBS_ERR_CONFIG;
}
