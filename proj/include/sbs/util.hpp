#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sbs {

// Error taxonomy. ConfigError maps to exit code 1, DataError to 2,
// anything else that escapes to 3 (internal).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class DataError : public Error {
public:
    using Error::Error;
};

// Floating-point serialization with 17 significant digits so that
// round-tripping and golden-file comparison are exact.
std::string format_double(double v);

std::string read_file(const std::string& path);

// Writes to a temporary file in the same directory, then renames over
// the target. An interrupted run never leaves a partially written file.
void atomic_write_file(const std::string& path, std::string_view content);

std::string sha256_hex(std::string_view data);

// Replaces invalid UTF-8 byte sequences with U+FFFD. Returns the number
// of replacements through `replaced` when non-null.
std::string sanitize_utf8(std::string_view in, std::size_t* replaced = nullptr);

uint64_t splitmix64(uint64_t& state);

// Deterministic RNG used everywhere randomness is needed. std distributions
// are not bit-stable across standard library implementations, so the
// bounded-int / real / shuffle / normal draws are implemented here.
class Rng {
public:
    explicit Rng(uint64_t seed) : engine_(seed) {}

    uint64_t next_u64() { return engine_(); }

    // Uniform in [0, bound) by rejection sampling.
    uint64_t below(uint64_t bound);

    // Uniform integer in [lo, hi] inclusive.
    int64_t range(int64_t lo, int64_t hi);

    // Uniform real in [0, 1) with 53-bit resolution.
    double real();

    // Standard normal via Box-Muller.
    double normal();

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    // Derives an independent stream for a repetition or worker index.
    static uint64_t substream_seed(uint64_t master, uint64_t index);

private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace sbs
