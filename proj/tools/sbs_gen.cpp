// Synthetic corpus/outcome generator for desk-scale experiments: builds a
// panel whose brand-activity swings are large enough that the computed SBS
// direction tracks the generator's intent, then wires outcome changes to
// agree with those intents at a configurable rate.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "sbs/csv.hpp"
#include "sbs/util.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using sbs::Rng;

namespace {

struct GenParams {
    std::string out_dir;
    uint64_t seed = 7;
    int entities = 5;
    int periods = 10;
    int sources = 3;
    double target = 0.7333;
    int repetitions = 500;
    int background_docs = 180;   // per slice
    int brand_docs_base = 24;    // scaled by intensity
    double step = 1.6;           // intensity multiplier per intended up-move
    int64_t total_docs = 0;      // when > 0, background docs are scaled to hit this
};

std::string entity_name(int i) {
    std::string name = "museum_";
    name.push_back(static_cast<char>('a' + i % 26));
    if (i >= 26) {
        name += std::to_string(i / 26);
    }
    return name;
}

std::string entity_surface(int i) {
    // Surface form used in the raw text; the alias map folds it back to the
    // canonical token.
    std::string name = "Museum ";
    name.push_back(static_cast<char>('A' + i % 26));
    if (i >= 26) {
        name += std::to_string(i / 26);
    }
    return name;
}

std::string source_name(int i) {
    static const char* kCities[] = {"paris", "rome", "prague", "vienna", "lisbon",
                                    "madrid", "berlin", "athens"};
    if (i < 8) {
        return std::string("forum_") + kCities[i];
    }
    return "forum_" + std::to_string(i);
}

struct Vocab {
    std::vector<std::vector<std::string>> clusters;  // topical backbone
    std::vector<std::string> connectors;             // shared hub words
};

Vocab make_vocab(const std::string& source, int clusters, int words_per_cluster,
                 int connectors) {
    Vocab v;
    for (int c = 0; c < clusters; ++c) {
        std::vector<std::string> words;
        for (int w = 0; w < words_per_cluster; ++w) {
            words.push_back(source + "_t" + std::to_string(c) + "w" + std::to_string(w));
        }
        v.clusters.push_back(std::move(words));
    }
    for (int w = 0; w < connectors; ++w) {
        v.connectors.push_back(source + "_hub" + std::to_string(w));
    }
    return v;
}

// Balanced up/down moves keep intensity paths inside a workable range.
std::vector<int> intended_signs(Rng& rng, int diffs) {
    std::vector<int> signs;
    for (int i = 0; i < diffs; ++i) {
        signs.push_back(i % 2 == 0 ? 1 : -1);
    }
    rng.shuffle(signs);
    return signs;
}

struct BrandPlan {
    std::string token;
    std::string surface;
    std::string source;
    std::vector<double> intensity;  // per period
    std::vector<int> intended;      // per diff
    std::vector<std::string> context_pool;
};

int run_generator(const GenParams& params) {
    Rng rng(params.seed);
    fs::create_directories(params.out_dir);
    const auto out = [&](const std::string& name) {
        return (fs::path(params.out_dir) / name).string();
    };

    const int first_period = 2007;
    std::vector<std::string> sources;
    for (int s = 0; s < params.sources; ++s) {
        sources.push_back(source_name(s));
    }
    std::map<std::string, Vocab> vocab;
    for (const std::string& s : sources) {
        vocab.emplace(s, make_vocab(s, 6, 20, 10));
    }

    std::vector<BrandPlan> brands;
    for (int e = 0; e < params.entities; ++e) {
        BrandPlan plan;
        plan.token = entity_name(e);
        plan.surface = entity_surface(e);
        plan.source = sources[static_cast<std::size_t>(e) % sources.size()];
        plan.intended = intended_signs(rng, params.periods - 1);
        plan.intensity.push_back(1.0);
        for (int d = 0; d < params.periods - 1; ++d) {
            const double prev = plan.intensity.back();
            plan.intensity.push_back(plan.intended[static_cast<std::size_t>(d)] > 0
                                         ? prev * params.step
                                         : prev / params.step);
        }
        for (int w = 0; w < 60; ++w) {
            plan.context_pool.push_back(plan.token + "_ctx" + std::to_string(w));
        }
        brands.push_back(std::move(plan));
    }

    int background_docs = params.background_docs;
    if (params.total_docs > 0) {
        // Approximate the requested corpus size by scaling the background.
        int64_t brand_docs = 0;
        for (const BrandPlan& b : brands) {
            for (double i : b.intensity) {
                brand_docs += std::llround(params.brand_docs_base * i);
            }
        }
        const int64_t slices = static_cast<int64_t>(params.sources) * params.periods;
        background_docs = static_cast<int>(
            std::max<int64_t>(20, (params.total_docs - brand_docs) / slices));
    }

    // ---- corpus ------------------------------------------------------------
    std::string corpus = "id,source,period,text\n";
    int64_t doc_counter = 0;
    auto emit_doc = [&](const std::string& source, int period,
                        const std::vector<std::string>& words) {
        std::string text;
        for (std::size_t i = 0; i < words.size(); ++i) {
            if (i) {
                text.push_back(' ');
            }
            text += words[i];
        }
        ++doc_counter;
        corpus += sbs::csv_join({"d" + std::to_string(doc_counter), source,
                                 std::to_string(period), text});
        corpus += '\n';
    };

    for (int p = 0; p < params.periods; ++p) {
        const int period = first_period + p;
        for (const std::string& source : sources) {
            const Vocab& v = vocab.at(source);
            for (int d = 0; d < background_docs; ++d) {
                const auto& cluster =
                    v.clusters[static_cast<std::size_t>(rng.below(v.clusters.size()))];
                std::vector<std::string> words;
                for (int w = 0; w < 16; ++w) {
                    words.push_back(
                        cluster[static_cast<std::size_t>(rng.below(cluster.size()))]);
                }
                for (int w = 0; w < 4; ++w) {
                    words.push_back(v.connectors[static_cast<std::size_t>(
                        rng.below(v.connectors.size()))]);
                }
                rng.shuffle(words);
                emit_doc(source, period, words);
            }
            for (const BrandPlan& brand : brands) {
                if (brand.source != source) {
                    continue;
                }
                const double intensity = brand.intensity[static_cast<std::size_t>(p)];
                const int docs = static_cast<int>(
                    std::llround(params.brand_docs_base * intensity));
                const int pool = std::clamp(static_cast<int>(std::llround(10 * intensity)),
                                            5, 60);
                for (int d = 0; d < docs; ++d) {
                    std::vector<std::string> words;
                    for (int w = 0; w < 8; ++w) {
                        words.push_back(brand.context_pool[static_cast<std::size_t>(
                            rng.below(static_cast<uint64_t>(pool)))]);
                    }
                    words.push_back(v.connectors[static_cast<std::size_t>(
                        rng.below(v.connectors.size()))]);
                    words.push_back(v.connectors[static_cast<std::size_t>(
                        rng.below(3))]);
                    const auto& cluster = v.clusters[static_cast<std::size_t>(
                        rng.below(v.clusters.size()))];
                    words.push_back(
                        cluster[static_cast<std::size_t>(rng.below(cluster.size()))]);
                    rng.shuffle(words);
                    const std::size_t at = static_cast<std::size_t>(
                        rng.below(words.size() + 1));
                    words.insert(words.begin() + static_cast<std::ptrdiff_t>(at),
                                 brand.surface);
                    emit_doc(source, period, words);
                }
            }
        }
    }
    sbs::atomic_write_file(out("corpus.csv"), corpus);

    // ---- outcomes: agree with the intended SBS direction at the target rate
    const int diffs = params.periods - 1;
    const int slots = params.entities * diffs;
    const int agree_count = static_cast<int>(std::llround(params.target * slots));
    std::vector<int> agree(static_cast<std::size_t>(slots), 0);
    for (int i = 0; i < agree_count; ++i) {
        agree[static_cast<std::size_t>(i)] = 1;
    }
    rng.shuffle(agree);

    std::string outcomes = "entity,period,value\n";
    int slot = 0;
    for (int e = 0; e < params.entities; ++e) {
        const BrandPlan& brand = brands[static_cast<std::size_t>(e)];
        double value = 800000.0 + 150000.0 * e;
        outcomes += sbs::csv_join({brand.token, std::to_string(first_period),
                                   sbs::format_double(std::round(value))});
        outcomes += '\n';
        for (int d = 0; d < diffs; ++d) {
            const int direction = agree[static_cast<std::size_t>(slot)] != 0
                                      ? brand.intended[static_cast<std::size_t>(d)]
                                      : -brand.intended[static_cast<std::size_t>(d)];
            ++slot;
            const double frac = 0.06 + 0.10 * rng.real();
            value *= 1.0 + direction * frac;
            outcomes += sbs::csv_join({brand.token, std::to_string(first_period + d + 1),
                                       sbs::format_double(std::round(value))});
            outcomes += '\n';
        }
    }
    sbs::atomic_write_file(out("outcomes.csv"), outcomes);

    // ---- aliases ------------------------------------------------------------
    std::string aliases = "canonical,alias\n";
    for (const BrandPlan& brand : brands) {
        aliases += sbs::csv_join({brand.token, brand.surface});
        aliases += '\n';
        std::string spaced = brand.token;
        std::replace(spaced.begin(), spaced.end(), '_', ' ');
        aliases += sbs::csv_join({brand.token, spaced});
        aliases += '\n';
    }
    sbs::atomic_write_file(out("aliases.csv"), aliases);

    // ---- lexicon: mixed polarities over brand context words + connectors ----
    std::string lexicon = "token,polarity\n";
    for (const BrandPlan& brand : brands) {
        for (std::size_t w = 0; w < brand.context_pool.size(); ++w) {
            const double polarity = (w % 5 == 4) ? -0.4 : (w % 2 == 0 ? 0.6 : 0.2);
            lexicon += sbs::csv_join({brand.context_pool[w], sbs::format_double(polarity)});
            lexicon += '\n';
        }
    }
    for (const std::string& s : sources) {
        for (const std::string& hub : vocab.at(s).connectors) {
            lexicon += sbs::csv_join({hub, sbs::format_double(0.3)});
            lexicon += '\n';
        }
    }
    sbs::atomic_write_file(out("lexicon.csv"), lexicon);

    // ---- pipeline config -----------------------------------------------------
    json config;
    config["corpus"] = {{"path", "corpus.csv"}, {"format", "delimited-table"}};
    config["aliases"] = "aliases.csv";
    config["lexicon"] = "lexicon.csv";
    config["outcomes"] = "outcomes.csv";
    config["window"] = 5;
    config["min_weight"] = 5;
    config["output_dir"] = "out";
    json jbrands = json::array();
    for (const BrandPlan& brand : brands) {
        jbrands.push_back({{"token", brand.token}, {"source", brand.source}});
    }
    config["brands"] = jbrands;
    config["analysis"] = {{"lag", 0},
                          {"seed", 20240601},
                          {"split", 0.70},
                          {"repetitions", params.repetitions}};
    sbs::atomic_write_file(out("config.json"), config.dump(2) + "\n");

    // ---- generator manifest ----------------------------------------------------
    json manifest;
    manifest["seed"] = params.seed;
    manifest["entities"] = params.entities;
    manifest["periods"] = params.periods;
    manifest["sources"] = params.sources;
    manifest["documents"] = doc_counter;
    manifest["target_concordance"] = params.target;
    manifest["agree_slots"] = agree_count;
    manifest["total_slots"] = slots;
    manifest["realized_intended_agreement"] =
        static_cast<double>(agree_count) / static_cast<double>(slots);
    json intents = json::object();
    for (const BrandPlan& brand : brands) {
        intents[brand.token] = brand.intended;
    }
    manifest["intended_signs"] = intents;
    sbs::atomic_write_file(out("generator_manifest.json"), manifest.dump(2) + "\n");

    std::fprintf(stdout, "sbs-gen: wrote %lld documents to %s\n",
                 static_cast<long long>(doc_counter), params.out_dir.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"synthetic corpus and panel generator"};
    app.require_subcommand(1);

    GenParams panel_params;
    auto* panel = app.add_subcommand(
        "panel", "desk-scale panel: 5 entities x 10 periods at a target concordance");
    panel->add_option("--out", panel_params.out_dir, "output directory")->required();
    panel->add_option("--seed", panel_params.seed, "generator seed");
    panel->add_option("--entities", panel_params.entities, "number of brands");
    panel->add_option("--periods", panel_params.periods, "number of periods");
    panel->add_option("--sources", panel_params.sources, "number of sources");
    panel->add_option("--target", panel_params.target, "target sign concordance");
    panel->add_option("--repetitions", panel_params.repetitions,
                      "classifier repetitions in the emitted config");

    GenParams corpus_params;
    corpus_params.seed = 11;
    corpus_params.entities = 3;
    corpus_params.periods = 5;
    corpus_params.total_docs = 100000;
    auto* corpus = app.add_subcommand(
        "corpus", "scale corpus: many documents over sources x periods");
    corpus->add_option("--out", corpus_params.out_dir, "output directory")->required();
    corpus->add_option("--seed", corpus_params.seed, "generator seed");
    corpus->add_option("--docs", corpus_params.total_docs, "total document count");
    corpus->add_option("--sources", corpus_params.sources, "number of sources");
    corpus->add_option("--periods", corpus_params.periods, "number of periods");
    corpus->add_option("--entities", corpus_params.entities, "number of brands");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }
    try {
        if (app.got_subcommand(panel)) {
            if (panel_params.periods < 2 || panel_params.entities < 1 ||
                panel_params.sources < 1) {
                throw sbs::ConfigError("panel: need >= 2 periods and >= 1 entity/source");
            }
            return run_generator(panel_params);
        }
        if (app.got_subcommand(corpus)) {
            if (corpus_params.periods < 2 || corpus_params.entities < 1 ||
                corpus_params.sources < 1) {
                throw sbs::ConfigError("corpus: need >= 2 periods and >= 1 entity/source");
            }
            return run_generator(corpus_params);
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "sbs-gen: %s\n", e.what());
        return 1;
    }
    return 1;
}
