#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace toyaudit {

struct TokenSpace {
    std::string alphabet{"ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789"};
    int prefix_len{3};
    int suffix_len{9};
};

void validate_token_space(const TokenSpace& space);

// A^P, A^S, A^(P+S); throws InvalidParameter if the count overflows 64 bits.
std::uint64_t prefix_universe(const TokenSpace& space);
std::uint64_t suffix_universe(const TokenSpace& space);
std::uint64_t total_universe(const TokenSpace& space);

// base-A rendering, most significant character first, zero-padded to len
std::string index_to_string(const TokenSpace& space, std::uint64_t index, int len);
std::uint64_t string_to_index(const TokenSpace& space, const std::string& s);

std::string prefix_at(const TokenSpace& space, std::uint64_t index);
std::string suffix_at(const TokenSpace& space, std::uint64_t index);

// Seeded bijection over [0, A^S): a balanced Feistel network wide enough to
// cover the domain, cycle-walking values that land outside it. Nothing is
// materialized, so the full 36^9 space costs the same as a toy one.
class SuffixPermutation {
  public:
    SuffixPermutation(const TokenSpace& space, const std::string& prefix, std::uint64_t seed);

    std::uint64_t size() const { return n_; }
    std::uint64_t at(std::uint64_t index) const;

  private:
    std::uint64_t encrypt_once(std::uint64_t value) const;

    static constexpr int kRounds = 8;
    std::uint64_t n_{0};
    int half_bits_{0};
    std::uint64_t half_mask_{0};
    std::array<std::uint64_t, kRounds> round_keys_{};
};

// One worker's share of the shuffled suffix universe: permutation positions
// worker, worker+workers, worker+2*workers, ... Streams with the same seed are
// reproducible; across workers they are disjoint and cover everything.
class SuffixStream {
  public:
    SuffixStream(const TokenSpace& space, const std::string& prefix, std::uint64_t seed,
                 int worker, int workers);

    std::uint64_t size() const;
    bool next(std::string& suffix);  // false once exhausted
    void reset() { cursor_ = 0; }

    std::vector<std::string> collect();  // materializes; tests at tiny geometry

  private:
    TokenSpace space_;
    SuffixPermutation perm_;
    std::uint64_t cursor_{0};
    int worker_{0};
    int workers_{1};
};

std::vector<SuffixStream> partition_tokenspace(const TokenSpace& space, const std::string& prefix,
                                               int workers, std::uint64_t seed);

}  // namespace toyaudit
