#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace debate_audit {

/// Incremental SHA-256 (FIPS 180-4). Content hashes name prompts and cache
/// entries, so the digest must be stable across platforms and builds.
class Sha256 {
public:
    Sha256() { reset(); }

    void reset();
    void update(const void* data, std::size_t len);
    void update(std::string_view s) { update(s.data(), s.size()); }
    std::array<std::uint8_t, 32> finish();

private:
    void process_block(const std::uint8_t* block);

    std::array<std::uint32_t, 8> state_{};
    std::array<std::uint8_t, 64> buffer_{};
    std::uint64_t total_len_ = 0;
    std::size_t buffer_len_ = 0;
};

std::array<std::uint8_t, 32> sha256(std::string_view data);

/// Lowercase hex digest of the input.
std::string sha256_hex(std::string_view data);

/// First 8 digest bytes as a big-endian integer; seeds derived generators.
std::uint64_t sha256_prefix64(std::string_view data);

}  // namespace debate_audit
