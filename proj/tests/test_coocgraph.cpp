#include <doctest.h>

#include <map>
#include <string>
#include <vector>

#include "sbs/coocgraph.hpp"
#include "sbs/util.hpp"

#include "oracles.hpp"

using namespace sbs;

namespace {

std::vector<TokenStream> make_streams(const std::vector<std::vector<std::string>>& docs) {
    std::vector<TokenStream> out;
    for (std::size_t i = 0; i < docs.size(); ++i) {
        out.push_back({"d" + std::to_string(i), docs[i]});
    }
    return out;
}

}  // namespace

TEST_CASE("build_network on the worked examples") {
    const auto net1 = build_network(make_streams({{"a", "b", "c"}}), WindowSpec{5});
    CHECK(oracles::edges_of(net1) == oracles::EdgeMap{{{"a", "b"}, 1}, {{"a", "c"}, 1}, {{"b", "c"}, 1}});

    const auto net2 = build_network(make_streams({{"a", "b", "a"}}), WindowSpec{5});
    CHECK(oracles::edges_of(net2) == oracles::EdgeMap{{{"a", "b"}, 2}});
    CHECK(net2.freq[*net2.node_index("a")] == 2);
    CHECK(net2.freq[*net2.node_index("b")] == 1);

    const auto net3 = build_network(make_streams({{"a"}, {"b"}}), WindowSpec{5});
    CHECK(net3.edge_count() == 0);
    CHECK(net3.node_count() == 2);
}

TEST_CASE("window never spans document boundaries") {
    const auto joined = build_network(make_streams({{"a", "b", "c", "d"}}), WindowSpec{3});
    const auto split =
        build_network(make_streams({{"a", "b"}, {"c", "d"}}), WindowSpec{3});
    CHECK(oracles::edges_of(joined).count({"b", "c"}) == 1);
    CHECK(oracles::edges_of(split).count({"b", "c"}) == 0);
}

TEST_CASE("build_network matches the positional oracle on random streams") {
    Rng rng(2024);
    for (int iter = 0; iter < 300; ++iter) {
        const int window = 2 + static_cast<int>(rng.below(6));
        const int ndocs = 1 + static_cast<int>(rng.below(4));
        std::vector<std::vector<std::string>> docs;
        for (int d = 0; d < ndocs; ++d) {
            const int len = static_cast<int>(rng.below(51));
            std::vector<std::string> doc;
            for (int i = 0; i < len; ++i) {
                doc.push_back(std::string(1, static_cast<char>('a' + rng.below(10))));
            }
            docs.push_back(std::move(doc));
        }
        const auto net = build_network(make_streams(docs), WindowSpec{window});
        CHECK(oracles::edges_of(net) == oracles::cooc_oracle(docs, window));

        // word_freq covers every occurrence
        std::map<std::string, int64_t> freq;
        for (const auto& d : docs) {
            for (const auto& t : d) {
                freq[t] += 1;
            }
        }
        REQUIRE(net.tokens.size() == freq.size());
        for (std::size_t i = 0; i < net.tokens.size(); ++i) {
            CHECK(net.freq[i] == freq[net.tokens[i]]);
        }
    }
}

TEST_CASE("additivity: concatenation equals merged counts") {
    Rng rng(555);
    for (int iter = 0; iter < 50; ++iter) {
        std::vector<std::vector<std::string>> docs_a, docs_b;
        for (int d = 0; d < 3; ++d) {
            std::vector<std::string> doc;
            for (uint64_t i = 0, len = rng.below(40); i < len; ++i) {
                doc.push_back(std::string(1, static_cast<char>('a' + rng.below(8))));
            }
            (d % 2 == 0 ? docs_a : docs_b).push_back(std::move(doc));
        }
        auto all = docs_a;
        all.insert(all.end(), docs_b.begin(), docs_b.end());
        const auto net_all = build_network(make_streams(all), WindowSpec{4});
        const auto net_a = build_network(make_streams(docs_a), WindowSpec{4});
        const auto net_b = build_network(make_streams(docs_b), WindowSpec{4});
        oracles::EdgeMap merged = oracles::edges_of(net_a);
        for (const auto& [k, w] : oracles::edges_of(net_b)) {
            merged[k] += w;
        }
        CHECK(oracles::edges_of(net_all) == merged);
    }
}

TEST_CASE("prune thresholds edges and keeps isolated nodes") {
    std::vector<TokenStream> streams;
    // a-b co-occurs 4 times, a-c 5 times, b-d 7 times
    for (int i = 0; i < 4; ++i) streams.push_back({"x", {"a", "b"}});
    for (int i = 0; i < 5; ++i) streams.push_back({"y", {"a", "c"}});
    for (int i = 0; i < 7; ++i) streams.push_back({"z", {"b", "d"}});
    const auto net = build_network(streams, WindowSpec{5});

    const auto pruned = prune(net, 5);
    const auto edges = oracles::edges_of(pruned);
    CHECK(edges == oracles::EdgeMap{{{"a", "c"}, 5}, {{"b", "d"}, 7}});
    CHECK(pruned.node_count() == 4);  // nodes survive
    CHECK(pruned.freq == net.freq);

    CHECK(prune(net, 1) == net);  // identity at min weight 1

    // weights {4,5,7}: threshold keeps {5,7}
    CHECK(prune(net, 5).edge_count() == 2);
    CHECK_THROWS_AS(prune(net, 0), ConfigError);
}

TEST_CASE("prune is monotone and idempotent") {
    Rng rng(99);
    std::vector<std::vector<std::string>> docs;
    for (int d = 0; d < 20; ++d) {
        std::vector<std::string> doc;
        for (int i = 0; i < 30; ++i) {
            doc.push_back(std::string(1, static_cast<char>('a' + rng.below(6))));
        }
        docs.push_back(std::move(doc));
    }
    const auto net = build_network(make_streams(docs), WindowSpec{5});
    std::size_t prev = net.edge_count();
    for (int k = 1; k <= 12; ++k) {
        const auto p = prune(net, k);
        CHECK(p.edge_count() <= prev);
        prev = p.edge_count();
        CHECK(prune(p, k) == p);
    }
}

TEST_CASE("serialization round-trips and is lexicographically ordered") {
    auto net = build_network(
        make_streams({{"delta", "alpha", "casa"}, {"alpha", "casa", "bravo"}}),
        WindowSpec{5});
    net.source = "paris";
    net.period = 2007;
    const std::string text = serialize_network(net);
    CHECK(text.substr(0, 31) == "# cooc-net v1 slice=paris:2007\n");
    // node block sorted
    CHECK(text.find("alpha\t2\n") != std::string::npos);
    const CoocNetwork back = parse_network(text);
    CHECK(back == net);
    CHECK(back.source == "paris");
    CHECK(back.period == 2007);

    CoocNetwork empty;
    empty.source = "x";
    empty.period = 1;
    CHECK(parse_network(serialize_network(empty)) == empty);
}

TEST_CASE("deserialize rejects corrupt files") {
    CHECK_THROWS_AS(parse_network("garbage\n"), DataError);
    CHECK_THROWS_AS(parse_network("# cooc-net v1 slice=s:1\na\tn\n"), DataError);
    // negative weight
    CHECK_THROWS_AS(parse_network("# cooc-net v1 slice=s:1\na\t1\nb\t1\n\na\tb\t-2\n"),
                    DataError);
    // endpoint missing from the node block
    CHECK_THROWS_AS(parse_network("# cooc-net v1 slice=s:1\na\t1\n\na\tz\t3\n"),
                    DataError);
    // unordered nodes
    CHECK_THROWS_AS(parse_network("# cooc-net v1 slice=s:1\nb\t1\na\t1\n\n"), DataError);
}

TEST_CASE("window spec must be at least 2") {
    CHECK_THROWS_AS(build_network({}, WindowSpec{1}), ConfigError);
}
