#include "sbs/coocgraph.hpp"

#include <algorithm>
#include <charconv>
#include <unordered_map>

#include "sbs/util.hpp"

namespace sbs {

namespace {

int64_t parse_int(std::string_view s, const std::string& where) {
    int64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) {
        throw DataError(where + ": invalid integer '" + std::string(s) + "'");
    }
    return v;
}

}  // namespace

std::optional<uint32_t> CoocNetwork::node_index(std::string_view token) const {
    auto it = std::lower_bound(tokens.begin(), tokens.end(), token);
    if (it == tokens.end() || *it != token) {
        return std::nullopt;
    }
    return static_cast<uint32_t>(it - tokens.begin());
}

bool CoocNetwork::operator==(const CoocNetwork& other) const {
    if (tokens != other.tokens || freq != other.freq ||
        edges.size() != other.edges.size()) {
        return false;
    }
    for (std::size_t i = 0; i < edges.size(); ++i) {
        if (edges[i].a != other.edges[i].a || edges[i].b != other.edges[i].b ||
            edges[i].weight != other.edges[i].weight) {
            return false;
        }
    }
    return true;
}

CoocNetwork build_network(std::span<const TokenStream> streams, WindowSpec window) {
    if (window.size < 2) {
        throw ConfigError("window size must be >= 2");
    }
    // Intern tokens in first-seen order, then remap to lexicographic ids.
    std::unordered_map<std::string, uint32_t> ids;
    std::vector<std::string> names;
    std::vector<int64_t> freq;
    std::unordered_map<uint64_t, int64_t> pair_counts;
    std::vector<uint32_t> doc_ids;

    auto intern = [&](const std::string& tok) -> uint32_t {
        auto [it, inserted] = ids.emplace(tok, static_cast<uint32_t>(names.size()));
        if (inserted) {
            names.push_back(tok);
            freq.push_back(0);
        }
        return it->second;
    };

    const std::size_t span = static_cast<std::size_t>(window.size) - 1;
    for (const TokenStream& stream : streams) {
        doc_ids.clear();
        doc_ids.reserve(stream.tokens.size());
        for (const std::string& tok : stream.tokens) {
            const uint32_t id = intern(tok);
            freq[id] += 1;
            doc_ids.push_back(id);
        }
        const std::size_t n = doc_ids.size();
        for (std::size_t p = 0; p < n; ++p) {
            const std::size_t limit = std::min(n, p + span + 1);
            for (std::size_t q = p + 1; q < limit; ++q) {
                const uint32_t x = doc_ids[p];
                const uint32_t y = doc_ids[q];
                if (x == y) {
                    continue;
                }
                const uint64_t key = x < y
                    ? (static_cast<uint64_t>(x) << 32) | y
                    : (static_cast<uint64_t>(y) << 32) | x;
                pair_counts[key] += 1;
            }
        }
    }

    // Remap interned ids to lexicographic order.
    std::vector<uint32_t> order(names.size());
    for (uint32_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](uint32_t a, uint32_t b) { return names[a] < names[b]; });
    std::vector<uint32_t> rank(names.size());
    for (uint32_t i = 0; i < order.size(); ++i) rank[order[i]] = i;

    CoocNetwork net;
    net.tokens.reserve(names.size());
    net.freq.reserve(names.size());
    for (uint32_t i = 0; i < order.size(); ++i) {
        net.tokens.push_back(std::move(names[order[i]]));
        net.freq.push_back(freq[order[i]]);
    }
    net.edges.reserve(pair_counts.size());
    for (const auto& [key, count] : pair_counts) {
        uint32_t a = rank[static_cast<uint32_t>(key >> 32)];
        uint32_t b = rank[static_cast<uint32_t>(key & 0xFFFFFFFFu)];
        if (a > b) {
            std::swap(a, b);
        }
        net.edges.push_back({a, b, count});
    }
    std::sort(net.edges.begin(), net.edges.end(), [](const auto& e1, const auto& e2) {
        return e1.a != e2.a ? e1.a < e2.a : e1.b < e2.b;
    });
    return net;
}

CoocNetwork prune(const CoocNetwork& net, int64_t min_weight) {
    if (min_weight < 1) {
        throw ConfigError("min edge weight must be >= 1");
    }
    CoocNetwork out;
    out.source = net.source;
    out.period = net.period;
    out.tokens = net.tokens;
    out.freq = net.freq;
    out.edges.reserve(net.edges.size());
    for (const auto& e : net.edges) {
        if (e.weight >= min_weight) {
            out.edges.push_back(e);
        }
    }
    return out;
}

std::string serialize_network(const CoocNetwork& net) {
    std::string out;
    out += "# cooc-net v1 slice=" + net.source + ":" + std::to_string(net.period) + "\n";
    for (std::size_t i = 0; i < net.tokens.size(); ++i) {
        out += net.tokens[i];
        out += '\t';
        out += std::to_string(net.freq[i]);
        out += '\n';
    }
    out += '\n';
    for (const auto& e : net.edges) {
        out += net.tokens[e.a];
        out += '\t';
        out += net.tokens[e.b];
        out += '\t';
        out += std::to_string(e.weight);
        out += '\n';
    }
    return out;
}

void save_network(const CoocNetwork& net, const std::string& path) {
    atomic_write_file(path, serialize_network(net));
}

CoocNetwork parse_network(std::string_view data) {
    CoocNetwork net;
    std::size_t pos = 0;
    std::size_t line_no = 0;
    auto next_line = [&](std::string_view& line) -> bool {
        if (pos > data.size()) {
            return false;
        }
        if (pos == data.size()) {
            pos = data.size() + 1;
            return false;
        }
        std::size_t nl = data.find('\n', pos);
        if (nl == std::string_view::npos) {
            nl = data.size();
        }
        line = data.substr(pos, nl - pos);
        pos = nl + 1;
        ++line_no;
        return true;
    };

    std::string_view line;
    if (!next_line(line) || line.substr(0, 20) != "# cooc-net v1 slice=") {
        throw DataError("network file: missing '# cooc-net v1' header");
    }
    const std::string_view slice = line.substr(20);
    const std::size_t colon = slice.rfind(':');
    if (colon == std::string_view::npos) {
        throw DataError("network file: malformed slice label");
    }
    net.source = std::string(slice.substr(0, colon));
    net.period = parse_int(slice.substr(colon + 1), "network header");

    bool in_edges = false;
    while (next_line(line)) {
        const std::string where = "network file line " + std::to_string(line_no);
        if (line.empty()) {
            if (in_edges) {
                throw DataError(where + ": unexpected blank line");
            }
            in_edges = true;
            continue;
        }
        const std::size_t t1 = line.find('\t');
        if (t1 == std::string_view::npos) {
            throw DataError(where + ": expected tab-separated fields");
        }
        if (!in_edges) {
            const std::string token(line.substr(0, t1));
            const int64_t f = parse_int(line.substr(t1 + 1), where);
            if (f < 0) {
                throw DataError(where + ": negative frequency");
            }
            if (!net.tokens.empty() && token <= net.tokens.back()) {
                throw DataError(where + ": node tokens out of order");
            }
            net.tokens.push_back(token);
            net.freq.push_back(f);
        } else {
            const std::size_t t2 = line.find('\t', t1 + 1);
            if (t2 == std::string_view::npos) {
                throw DataError(where + ": expected tokenA<TAB>tokenB<TAB>weight");
            }
            const std::string ta(line.substr(0, t1));
            const std::string tb(line.substr(t1 + 1, t2 - t1 - 1));
            const int64_t w = parse_int(line.substr(t2 + 1), where);
            if (w < 1) {
                throw DataError(where + ": edge weight must be >= 1");
            }
            auto ia = net.node_index(ta);
            auto ib = net.node_index(tb);
            if (!ia || !ib) {
                throw DataError(where + ": edge endpoint not in node block");
            }
            if (*ia >= *ib) {
                throw DataError(where + ": edge tokens out of order");
            }
            if (!net.edges.empty() &&
                (net.edges.back().a > *ia ||
                 (net.edges.back().a == *ia && net.edges.back().b >= *ib))) {
                throw DataError(where + ": edges out of order");
            }
            net.edges.push_back({*ia, *ib, w});
        }
    }
    return net;
}

CoocNetwork load_network(const std::string& path) {
    return parse_network(read_file(path));
}

}  // namespace sbs
