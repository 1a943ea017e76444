#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mc {

// Base class for all pipeline faults. Validation findings are data, not
// exceptions; see validate.hpp.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class ParseError : public Error {
public:
    explicit ParseError(const std::string& what) : Error(what) {}
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(what) {}
};

class StageError : public Error {
public:
    explicit StageError(const std::string& what) : Error(what) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error(what) {}
};

// 64-bit FNV-1a. Used for content digests and for deriving per-entity RNG
// streams; not cryptographic.
constexpr std::uint64_t fnv1a64(std::string_view data,
                                std::uint64_t seed = 0xcbf29ce484222325ull) {
    std::uint64_t h = seed;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string to_hex16(std::uint64_t value);

// Deterministic RNG wrapper. mt19937_64's output stream is fully specified
// by the standard; the std:: distributions are not, so bounded draws,
// unit draws and shuffling are done by hand here.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // Uniform integer in [0, n). n must be > 0.
    std::uint64_t bounded(std::uint64_t n);

    // Uniform double in [0, 1).
    double unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    template <typename T>
    const T& pick(const std::vector<T>& items) {
        return items[bounded(items.size())];
    }

    template <typename T>
    void shuffle(std::vector<T>& items) {
        // Fisher-Yates
        for (std::size_t i = items.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(bounded(i));
            std::swap(items[i - 1], items[j]);
        }
    }

private:
    std::mt19937_64 gen_;
};

// Derives a child seed from a parent seed and a label, so separate pipeline
// entities get independent deterministic streams.
inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view label) {
    return fnv1a64(label, seed ^ 0x9e3779b97f4a7c15ull);
}

// ---- string helpers ----

std::string trim(std::string_view s);
std::string to_lower(std::string_view s);
bool starts_with(std::string_view s, std::string_view prefix);
std::vector<std::string> split_lines(std::string_view text);

// Case-insensitive, whitespace-normalized comparison key (criterion names
// from agents vary in casing and spacing).
std::string normalize_name(std::string_view s);

// ---- filesystem helpers ----

std::string read_file(const std::string& path);
void write_file_atomic(const std::string& path, std::string_view content);
bool file_exists(const std::string& path);

}  // namespace mc
