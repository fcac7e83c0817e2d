#include "sbs/brandscore.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <queue>
#include <thread>

#include "sbs/csv.hpp"
#include "sbs/stemmer.hpp"
#include "sbs/util.hpp"

namespace sbs {

namespace {

struct Csr {
    std::vector<std::size_t> offsets;
    std::vector<uint32_t> neighbors;
    std::vector<double> lengths;  // 1 / weight
    std::vector<int64_t> weights;
};

Csr build_csr(const CoocNetwork& net) {
    const std::size_t n = net.node_count();
    Csr csr;
    std::vector<std::size_t> degree(n, 0);
    for (const auto& e : net.edges) {
        ++degree[e.a];
        ++degree[e.b];
    }
    csr.offsets.assign(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) {
        csr.offsets[i + 1] = csr.offsets[i] + degree[i];
    }
    csr.neighbors.resize(csr.offsets[n]);
    csr.lengths.resize(csr.offsets[n]);
    csr.weights.resize(csr.offsets[n]);
    std::vector<std::size_t> fill(csr.offsets.begin(), csr.offsets.end() - 1);
    for (const auto& e : net.edges) {
        const double len = 1.0 / static_cast<double>(e.weight);
        csr.neighbors[fill[e.a]] = e.b;
        csr.lengths[fill[e.a]] = len;
        csr.weights[fill[e.a]] = e.weight;
        ++fill[e.a];
        csr.neighbors[fill[e.b]] = e.a;
        csr.lengths[fill[e.b]] = len;
        csr.weights[fill[e.b]] = e.weight;
        ++fill[e.b];
    }
    // Neighbor lists sorted so dependency accumulation has a fixed order.
    for (std::size_t v = 0; v < n; ++v) {
        const std::size_t lo = csr.offsets[v];
        const std::size_t hi = csr.offsets[v + 1];
        std::vector<std::size_t> idx(hi - lo);
        for (std::size_t k = 0; k < idx.size(); ++k) idx[k] = lo + k;
        std::sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) {
            return csr.neighbors[x] < csr.neighbors[y];
        });
        std::vector<uint32_t> nb(idx.size());
        std::vector<double> ln(idx.size());
        std::vector<int64_t> wt(idx.size());
        for (std::size_t k = 0; k < idx.size(); ++k) {
            nb[k] = csr.neighbors[idx[k]];
            ln[k] = csr.lengths[idx[k]];
            wt[k] = csr.weights[idx[k]];
        }
        std::copy(nb.begin(), nb.end(), csr.neighbors.begin() + lo);
        std::copy(ln.begin(), ln.end(), csr.lengths.begin() + lo);
        std::copy(wt.begin(), wt.end(), csr.weights.begin() + lo);
    }
    return csr;
}

// Single-source shortest paths + Brandes dependency accumulation.
// Adds this source's pair dependencies into `acc`.
void accumulate_source(const Csr& csr, uint32_t s, std::vector<double>& acc,
                       std::vector<double>& dist, std::vector<double>& sigma,
                       std::vector<double>& delta, std::vector<uint32_t>& touched,
                       std::vector<char>& settled, std::vector<uint32_t>& order) {
    const double inf = std::numeric_limits<double>::infinity();
    touched.clear();
    order.clear();
    using Item = std::pair<double, uint32_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
    dist[s] = 0.0;
    sigma[s] = 1.0;
    touched.push_back(s);
    heap.push({0.0, s});
    while (!heap.empty()) {
        const auto [d, u] = heap.top();
        heap.pop();
        if (settled[u]) {
            continue;
        }
        settled[u] = 1;
        order.push_back(u);
        for (std::size_t k = csr.offsets[u]; k < csr.offsets[u + 1]; ++k) {
            const uint32_t v = csr.neighbors[k];
            const double nd = d + csr.lengths[k];
            if (nd < dist[v]) {
                if (dist[v] == inf) {
                    touched.push_back(v);
                }
                dist[v] = nd;
                sigma[v] = sigma[u];
                heap.push({nd, v});
            } else if (nd == dist[v] && !settled[v]) {
                sigma[v] += sigma[u];
            }
        }
    }
    // Process in decreasing distance (ties by node index) so floating-point
    // accumulation order does not depend on heap behavior.
    std::sort(order.begin(), order.end(), [&](uint32_t a, uint32_t b) {
        return dist[a] != dist[b] ? dist[a] > dist[b] : a < b;
    });
    for (uint32_t w : order) {
        const double coeff = (1.0 + delta[w]) / sigma[w];
        for (std::size_t k = csr.offsets[w]; k < csr.offsets[w + 1]; ++k) {
            const uint32_t v = csr.neighbors[k];
            if (dist[v] + csr.lengths[k] == dist[w]) {
                delta[v] += sigma[v] * coeff;
            }
        }
        if (w != s) {
            acc[w] += delta[w];
        }
    }
    for (uint32_t v : touched) {
        dist[v] = inf;
        sigma[v] = 0.0;
        delta[v] = 0.0;
        settled[v] = 0;
    }
}

}  // namespace

std::vector<double> prevalence_all(const CoocNetwork& net) {
    std::vector<double> out(net.freq.size());
    for (std::size_t i = 0; i < net.freq.size(); ++i) {
        out[i] = static_cast<double>(net.freq[i]);
    }
    return out;
}

std::vector<double> diversity_all(const CoocNetwork& net) {
    std::vector<double> out(net.node_count(), 0.0);
    for (const auto& e : net.edges) {
        out[e.a] += 1.0;
        out[e.b] += 1.0;
    }
    return out;
}

std::vector<double> connectivity_all(const CoocNetwork& net, int threads) {
    const std::size_t n = net.node_count();
    std::vector<double> result(n, 0.0);
    if (n == 0 || net.edges.empty()) {
        return result;
    }
    const Csr csr = build_csr(net);

    // Sources are grouped into blocks whose layout depends only on n, so
    // per-block partial sums reduce in the same order for any thread count.
    const std::size_t block = std::max<std::size_t>(64, (n + 255) / 256);
    const std::size_t num_blocks = (n + block - 1) / block;
    std::vector<std::vector<double>> partials(num_blocks);

    int nthreads = threads > 0 ? threads : 1;
    nthreads = static_cast<int>(std::min<std::size_t>(nthreads, num_blocks));
    std::atomic<std::size_t> next_block{0};
    auto worker = [&]() {
        const double inf = std::numeric_limits<double>::infinity();
        std::vector<double> dist(n, inf);
        std::vector<double> sigma(n, 0.0);
        std::vector<double> delta(n, 0.0);
        std::vector<char> settled(n, 0);
        std::vector<uint32_t> touched;
        std::vector<uint32_t> order;
        while (true) {
            const std::size_t b = next_block.fetch_add(1);
            if (b >= num_blocks) {
                break;
            }
            std::vector<double> acc(n, 0.0);
            const std::size_t lo = b * block;
            const std::size_t hi = std::min(n, lo + block);
            for (std::size_t s = lo; s < hi; ++s) {
                accumulate_source(csr, static_cast<uint32_t>(s), acc, dist, sigma, delta,
                                  touched, settled, order);
            }
            partials[b] = std::move(acc);
        }
    };
    if (nthreads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(nthreads);
        for (int t = 0; t < nthreads; ++t) {
            pool.emplace_back(worker);
        }
        for (auto& t : pool) {
            t.join();
        }
    }
    for (std::size_t b = 0; b < num_blocks; ++b) {
        for (std::size_t v = 0; v < n; ++v) {
            result[v] += partials[b][v];
        }
    }
    // Brandes over ordered sources counts each unordered pair twice.
    for (double& v : result) {
        v *= 0.5;
    }
    return result;
}

namespace {

double quantile_inclusive(const std::vector<double>& sorted, double q) {
    const std::size_t m = sorted.size();
    if (m == 1) {
        return sorted[0];
    }
    const double h = q * static_cast<double>(m - 1);
    const std::size_t lo = static_cast<std::size_t>(h);
    if (lo + 1 >= m) {
        return sorted[m - 1];
    }
    const double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace

StandardizeResult standardize(const std::vector<double>& raw) {
    if (raw.empty()) {
        throw DataError("standardize: empty value set");
    }
    StandardizeResult res;
    std::vector<double> sorted(raw);
    std::sort(sorted.begin(), sorted.end());
    res.median = quantile_inclusive(sorted, 0.5);
    res.q1 = quantile_inclusive(sorted, 0.25);
    res.q3 = quantile_inclusive(sorted, 0.75);
    res.iqr = res.q3 - res.q1;
    res.degenerate_scale = res.iqr <= 0.0;
    const double scale = res.degenerate_scale ? 1.0 : res.iqr;
    res.values.resize(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        res.values[i] = (raw[i] - res.median) / scale;
    }
    return res;
}

SliceScores score_slice(const CoocNetwork& net, int threads) {
    if (net.node_count() == 0) {
        throw DataError("score_slice: empty network");
    }
    SliceScores s;
    s.prevalence = prevalence_all(net);
    s.diversity = diversity_all(net);
    s.connectivity = connectivity_all(net, threads);
    StandardizeResult r = standardize(s.prevalence);
    s.std_prevalence = std::move(r.values);
    s.prevalence_meta = {r.median, r.iqr, r.degenerate_scale};
    r = standardize(s.diversity);
    s.std_diversity = std::move(r.values);
    s.diversity_meta = {r.median, r.iqr, r.degenerate_scale};
    r = standardize(s.connectivity);
    s.std_connectivity = std::move(r.values);
    s.connectivity_meta = {r.median, r.iqr, r.degenerate_scale};
    return s;
}

BrandMetrics brand_metrics(const std::string& brand, const CoocNetwork& net,
                           const SliceScores& scores, const PolarityLexicon* lexicon) {
    BrandMetrics m;
    m.brand = brand;
    m.source = net.source;
    m.period = net.period;
    const auto idx = net.node_index(brand);
    if (idx) {
        m.prevalence = scores.prevalence[*idx];
        m.diversity = scores.diversity[*idx];
        m.connectivity = scores.connectivity[*idx];
        m.std_prevalence = scores.std_prevalence[*idx];
        m.std_diversity = scores.std_diversity[*idx];
        m.std_connectivity = scores.std_connectivity[*idx];
    } else {
        // Absent brand: raw zeros standardized against this slice.
        auto center = [](const ComponentMeta& meta) {
            return (0.0 - meta.median) / (meta.degenerate_scale ? 1.0 : meta.iqr);
        };
        m.prevalence = 0.0;
        m.diversity = 0.0;
        m.connectivity = 0.0;
        m.std_prevalence = center(scores.prevalence_meta);
        m.std_diversity = center(scores.diversity_meta);
        m.std_connectivity = center(scores.connectivity_meta);
    }
    m.sbs = m.std_prevalence + m.std_diversity + m.std_connectivity;
    if (lexicon) {
        m.sentiment = brand_sentiment(brand, net, *lexicon);
    }
    return m;
}

BrandMetrics sbs_score(const std::string& brand, const CoocNetwork& net,
                       const PolarityLexicon* lexicon, int threads) {
    const SliceScores scores = score_slice(net, threads);
    return brand_metrics(brand, net, scores, lexicon);
}

std::optional<double> brand_sentiment(const std::string& brand, const CoocNetwork& net,
                                      const PolarityLexicon& lexicon) {
    const auto idx = net.node_index(brand);
    if (!idx) {
        return std::nullopt;
    }
    double weighted_sum = 0.0;
    double weight_total = 0.0;
    for (const auto& e : net.edges) {
        uint32_t other;
        if (e.a == *idx) {
            other = e.b;
        } else if (e.b == *idx) {
            other = e.a;
        } else {
            continue;
        }
        const auto p = lexicon.polarity(net.tokens[other]);
        if (!p) {
            continue;
        }
        weighted_sum += static_cast<double>(e.weight) * (*p);
        weight_total += static_cast<double>(e.weight);
    }
    if (weight_total <= 0.0) {
        return std::nullopt;
    }
    const double s = weighted_sum / weight_total;
    return (s + 1.0) / 2.0;
}

void PolarityLexicon::add(const std::string& token, double polarity, bool stem_key) {
    const double clamped = std::clamp(polarity, -1.0, 1.0);
    const std::string key = stem_key ? stem_english(token) : token;
    Acc& acc = merged_[key];
    acc.sum += clamped;
    acc.count += 1;
}

std::optional<double> PolarityLexicon::polarity(const std::string& token) const {
    const auto it = merged_.find(token);
    if (it == merged_.end()) {
        return std::nullopt;
    }
    return it->second.sum / static_cast<double>(it->second.count);
}

PolarityLexicon PolarityLexicon::load(const std::string& path, bool stem_keys) {
    std::string raw;
    try {
        raw = read_file(path);
    } catch (const DataError& e) {
        throw ConfigError(e.what());
    }
    CsvReader reader(raw);
    std::vector<std::string> fields;
    if (!reader.next(fields) || fields.size() < 2 || fields[0] != "token" ||
        fields[1] != "polarity") {
        throw ConfigError(path + ": expected header token,polarity");
    }
    PolarityLexicon lex;
    while (reader.next(fields)) {
        if (fields.size() < 2 || fields[0].empty()) {
            throw DataError(path + ": row " + std::to_string(reader.record_index() - 1) +
                            ": expected token,polarity");
        }
        double p = 0.0;
        try {
            std::size_t consumed = 0;
            p = std::stod(fields[1], &consumed);
            if (consumed != fields[1].size()) {
                throw std::invalid_argument(fields[1]);
            }
        } catch (const std::exception&) {
            throw DataError(path + ": row " + std::to_string(reader.record_index() - 1) +
                            ": non-numeric polarity '" + fields[1] + "'");
        }
        lex.add(fields[0], p, stem_keys);
    }
    return lex;
}

}  // namespace sbs
