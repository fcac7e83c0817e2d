#include <doctest.h>

#include <filesystem>

#include "sbs/textprep.hpp"
#include "sbs/util.hpp"

using namespace sbs;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "sbs_textprep_test";
    fs::create_directories(dir);
    const std::string path = (dir / name).string();
    atomic_write_file(path, content);
    return path;
}

}  // namespace

TEST_CASE("tokenize lowercases and strips punctuation") {
    CHECK(tokenize("Hello, Paris!!") == std::vector<std::string>{"hello", "paris"});
    CHECK(tokenize("don't") == std::vector<std::string>{"dont"});
    CHECK(tokenize("don\xE2\x80\x99t stop") == std::vector<std::string>{"dont", "stop"});
    CHECK(tokenize("").empty());
    CHECK(tokenize("...!?").empty());
    CHECK(tokenize("year 2016 rocks") ==
          std::vector<std::string>{"year", "2016", "rocks"});
    CHECK(tokenize("keep_under-score") ==
          std::vector<std::string>{"keep_under", "score"});
}

TEST_CASE("alias replacement is word-boundary anchored and case-insensitive") {
    AliasMap map;
    map.add("borghese_gallery", "Borghese Gallery");
    CHECK(map.apply("the Borghese Gallery is nice") == "the borghese_gallery is nice");
    CHECK(map.apply("BORGHESE   GALLERY!") == "borghese_gallery!");
    // no partial-word matches
    CHECK(map.apply("borghese galleryx") == "borghese galleryx");
    CHECK(map.apply("xborghese gallery") == "xborghese gallery");
    // unrelated text unchanged
    CHECK(map.apply("a plain sentence") == "a plain sentence");
}

TEST_CASE("alias replacement picks the longest match once") {
    AliasMap map;
    map.add("louvre", "louvre museum");
    map.add("louvre", "louvre");
    const std::string out = map.apply("the louvre museum entrance");
    CHECK(out == "the louvre entrance");

    // brute-force check: exactly one canonical token in the output
    std::size_t count = 0;
    for (const std::string& tok : tokenize(out)) {
        if (tok == "louvre") {
            ++count;
        }
    }
    CHECK(count == 1);
}

TEST_CASE("overlapping alias definitions are a configuration error") {
    AliasMap map;
    map.add("louvre", "the big museum");
    CHECK_THROWS_AS(map.add("pompidou", "THE BIG MUSEUM"), ConfigError);
    CHECK_THROWS_AS(map.add("bad canonical", "x"), ConfigError);
}

TEST_CASE("alias map loads from a delimited file") {
    const std::string path = write_temp("aliases.csv",
                                        "canonical,alias\n"
                                        "louvre,Louvre Museum\n"
                                        "louvre,Le Louvre\n"
                                        "vittoriano,Il Vittoriano\n");
    const AliasMap map = AliasMap::load(path);
    CHECK(map.canonical_tokens().count("louvre") == 1);
    CHECK(map.apply("Le Louvre and Il Vittoriano") == "louvre and vittoriano");

    const std::string bad = write_temp("bad.csv", "canonical\nlouvre\n");
    CHECK_THROWS_AS(AliasMap::load(bad), ConfigError);
}

TEST_CASE("stopword removal preserves order and spares brand tokens") {
    StopwordList stops(std::vector<std::string>{"the", "and", "national_gallery"});
    const std::vector<std::string> tokens = {"the", "louvre", "and", "art"};
    CHECK(remove_stopwords(tokens, stops, {}) ==
          std::vector<std::string>{"louvre", "art"});
    CHECK(remove_stopwords({"the", "and"}, stops, {}).empty());
    CHECK(remove_stopwords({"national_gallery"}, stops, {"national_gallery"}) ==
          std::vector<std::string>{"national_gallery"});
}

TEST_CASE("stopword file accepts comments and is tokenizer-normalized") {
    const std::string path = write_temp("stops.txt",
                                        "# common words\n"
                                        "the\n"
                                        "you're   # contraction\n"
                                        "\n"
                                        "AND\n");
    const StopwordList stops = StopwordList::load(path);
    CHECK(stops.contains("the"));
    CHECK(stops.contains("youre"));
    CHECK(stops.contains("and"));
    CHECK(!stops.contains("louvre"));
}

TEST_CASE("default english stopword list is the standard ~180 word list") {
    const StopwordList stops = StopwordList::default_english();
    CHECK(stops.size() >= 150);
    CHECK(stops.size() <= 200);
    CHECK(stops.contains("the"));
    CHECK(stops.contains("dont"));
    CHECK(stops.contains("shouldve"));
}

TEST_CASE("stemming exempts brand tokens") {
    const std::vector<std::string> tokens = {"museums", "borghese_gallery", "running"};
    CHECK(stem_tokens(tokens, {"borghese_gallery"}) ==
          std::vector<std::string>{"museum", "borghese_gallery", "run"});
}

TEST_CASE("preprocess composes the four stages in order") {
    AliasMap aliases;
    aliases.add("louvre", "louvre");
    StopwordList stops(std::vector<std::string>{"the", "visit"});
    const Document doc{"d1", "paris", 2007, "Visit the LOUVRE museums!"};
    const TokenStream ts = preprocess(doc, aliases, stops);
    CHECK(ts.doc_id == "d1");
    CHECK(ts.tokens == std::vector<std::string>{"louvre", "museum"});

    const Document empty{"d2", "paris", 2007, ""};
    CHECK(preprocess(empty, aliases, stops).tokens.empty());
}

TEST_CASE("preprocess equals the explicit stage composition") {
    AliasMap aliases;
    aliases.add("national_gallery", "National Gallery");
    StopwordList stops = StopwordList::default_english();
    const std::string text =
        "The National Gallery in Prague was surprisingly crowded; paintings everywhere!";
    const Document doc{"d", "prague", 2010, text};
    const TokenStream ts = preprocess(doc, aliases, stops);
    const auto expected =
        stem_tokens(remove_stopwords(tokenize(aliases.apply(text)), stops,
                                     aliases.canonical_tokens()),
                    aliases.canonical_tokens());
    CHECK(ts.tokens == expected);
}

TEST_CASE("brand token count survives the whole pipeline") {
    AliasMap aliases;
    aliases.add("louvre", "louvre museum");
    aliases.add("louvre", "louvre");
    StopwordList stops = StopwordList::default_english();
    const std::string text =
        "The Louvre Museum is huge. I love the LOUVRE. Near the louvre museum cafe.";
    const Document doc{"d", "paris", 2007, text};
    const TokenStream ts = preprocess(doc, aliases, stops);
    std::size_t count = 0;
    for (const std::string& tok : ts.tokens) {
        if (tok == "louvre") {
            ++count;
        }
    }
    CHECK(count == 3);
}

TEST_CASE("preprocess is idempotent on its own output") {
    AliasMap aliases;
    aliases.add("louvre", "louvre");
    StopwordList stops = StopwordList::default_english();
    const Document doc{"d", "paris", 2007,
                       "Crowded galleries: visitors photographed marble statues near the "
                       "Louvre entrance, enjoying beautiful paintings afterwards."};
    const TokenStream once = preprocess(doc, aliases, stops);
    std::string joined;
    for (const std::string& tok : once.tokens) {
        joined += tok;
        joined += ' ';
    }
    const TokenStream twice = preprocess({"d", "paris", 2007, joined}, aliases, stops);
    CHECK(once.tokens == twice.tokens);
}
