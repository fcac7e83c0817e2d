#include "sbs/util.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace sbs {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot open file: " + path);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void atomic_write_file(const std::string& path, std::string_view content) {
    namespace fs = std::filesystem;
    fs::path target(path);
    if (target.has_parent_path()) {
        fs::create_directories(target.parent_path());
    }
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw DataError("cannot write file: " + tmp.string());
        }
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) {
            throw DataError("write failed: " + tmp.string());
        }
    }
    fs::rename(tmp, target);
}

std::string sha256_hex(std::string_view data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (!EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr)) {
        throw Error("sha256 digest failed");
    }
    static const char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xF]);
    }
    return out;
}

std::string sanitize_utf8(std::string_view in, std::size_t* replaced) {
    std::string out;
    out.reserve(in.size());
    std::size_t bad = 0;
    std::size_t i = 0;
    const auto* s = reinterpret_cast<const unsigned char*>(in.data());
    const std::size_t n = in.size();
    auto is_cont = [&](std::size_t k) { return k < n && (s[k] & 0xC0) == 0x80; };
    while (i < n) {
        unsigned char c = s[i];
        std::size_t need = 0;
        if (c < 0x80) {
            out.push_back(static_cast<char>(c));
            ++i;
            continue;
        } else if ((c & 0xE0) == 0xC0 && c >= 0xC2) {
            need = 1;
        } else if ((c & 0xF0) == 0xE0) {
            need = 2;
        } else if ((c & 0xF8) == 0xF0 && c <= 0xF4) {
            need = 3;
        } else {
            ++bad;
            out += "\xEF\xBF\xBD";
            ++i;
            continue;
        }
        bool ok = true;
        for (std::size_t k = 1; k <= need; ++k) {
            if (!is_cont(i + k)) {
                ok = false;
                break;
            }
        }
        // Reject overlong / surrogate / out-of-range encodings.
        if (ok && need == 2) {
            if (c == 0xE0 && s[i + 1] < 0xA0) ok = false;
            if (c == 0xED && s[i + 1] >= 0xA0) ok = false;
        }
        if (ok && need == 3) {
            if (c == 0xF0 && s[i + 1] < 0x90) ok = false;
            if (c == 0xF4 && s[i + 1] >= 0x90) ok = false;
        }
        if (ok) {
            out.append(reinterpret_cast<const char*>(s + i), need + 1);
            i += need + 1;
        } else {
            ++bad;
            out += "\xEF\xBF\xBD";
            ++i;
        }
    }
    if (replaced) {
        *replaced = bad;
    }
    return out;
}

uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

uint64_t Rng::below(uint64_t bound) {
    if (bound == 0) {
        throw Error("Rng::below: zero bound");
    }
    const uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    uint64_t x;
    do {
        x = engine_();
    } while (x >= limit);
    return x % bound;
}

int64_t Rng::range(int64_t lo, int64_t hi) {
    return lo + static_cast<int64_t>(below(static_cast<uint64_t>(hi - lo + 1)));
}

double Rng::real() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u1 = real();
    while (u1 <= 0.0) {
        u1 = real();
    }
    const double u2 = real();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * M_PI * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
}

uint64_t Rng::substream_seed(uint64_t master, uint64_t index) {
    uint64_t state = master + 0x9E3779B97F4A7C15ULL * (index + 1);
    return splitmix64(state);
}

}  // namespace sbs
