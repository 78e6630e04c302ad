#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace keynmf {

/// Error type for all contract violations and runtime failures in the core.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// -------- hashing / deterministic randomness --------

constexpr std::uint64_t kFnvOffset = 14695981039346656037ULL;
constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

inline std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed = kFnvOffset) {
    std::uint64_t h = seed;
    for (unsigned char c : data) {
        h ^= c;
        h *= kFnvPrime;
    }
    return h;
}

/// splitmix64 stream; used everywhere a seeded RNG is needed so results are
/// reproducible across platforms and standard library versions.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in (0, 1].
    double next_uniform() {
        return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller.
    double next_normal();

private:
    std::uint64_t state_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

// -------- time --------

/// Epoch seconds, UTC. Parses "YYYY-MM-DDTHH:MM:SS" with optional fractional
/// seconds (truncated) and "Z" / "+hh:mm" / "-hh:mm" offset (absent = UTC).
std::int64_t parse_iso8601(const std::string& text);

/// Formats epoch seconds as "YYYY-MM-DDTHH:MM:SSZ".
std::string format_iso8601(std::int64_t epoch_seconds);

/// Parses a duration like "6h", "90m", "45s", "2d" to seconds.
std::int64_t parse_duration_seconds(const std::string& text);

// -------- small file helpers --------

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

/// Newline-delimited UTF-8 token list; '#' lines ignored, first whitespace
/// field taken (so lexicon files with a frequency column work unchanged).
std::vector<std::string> read_token_file(const std::filesystem::path& path);

/// FNV-1a digest of a file's bytes as 16 hex chars.
std::string file_digest(const std::filesystem::path& path);

/// Shortest round-trip decimal form of a double (std::to_chars).
std::string format_double(double v);

// -------- utf-8 --------

std::u32string utf8_decode(std::string_view text);
std::string utf8_encode(std::u32string_view code_points);
std::string utf8_encode(char32_t code_point);

}  // namespace keynmf
