#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sbs/textprep.hpp"

namespace sbs {

struct WindowSpec {
    int size = 5;  // maximum token-position distance + 1; must be >= 2
};

// Undirected weighted word co-occurrence network for one corpus slice.
// Nodes are kept in lexicographic order and edges as (a, b) index pairs
// with a < b, sorted, so serialization is byte-stable.
struct CoocNetwork {
    std::string source;  // slice labels, informational
    int64_t period = 0;

    std::vector<std::string> tokens;  // sorted, unique
    std::vector<int64_t> freq;       // total occurrence count per token
    struct Edge {
        uint32_t a;
        uint32_t b;
        int64_t weight;
    };
    std::vector<Edge> edges;  // a < b, sorted by (a, b)

    std::size_t node_count() const { return tokens.size(); }
    std::size_t edge_count() const { return edges.size(); }

    std::optional<uint32_t> node_index(std::string_view token) const;

    bool operator==(const CoocNetwork& other) const;
};

// Counts one co-occurrence per ordered position pair p < q with
// q - p <= window.size - 1 inside a single document; windows never span
// document boundaries and equal tokens never form an edge.
CoocNetwork build_network(std::span<const TokenStream> streams, WindowSpec window);

// Drops edges below min_weight; nodes (and their frequencies) survive so
// the slice vocabulary stays intact for standardization.
CoocNetwork prune(const CoocNetwork& net, int64_t min_weight);

std::string serialize_network(const CoocNetwork& net);
void save_network(const CoocNetwork& net, const std::string& path);

CoocNetwork parse_network(std::string_view data);
CoocNetwork load_network(const std::string& path);

}  // namespace sbs
