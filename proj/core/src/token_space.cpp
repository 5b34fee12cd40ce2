#include <limits>
#include <set>

#include "toyaudit/errors.hpp"
#include "toyaudit/token_space.hpp"

namespace toyaudit {

namespace {

std::uint64_t checked_pow(std::uint64_t base, int exp) {
    std::uint64_t result = 1;
    for (int i = 0; i < exp; ++i) {
        if (result > std::numeric_limits<std::uint64_t>::max() / base)
            throw InvalidParameter("token universe exceeds 64 bits");
        result *= base;
    }
    return result;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t fold_string(std::uint64_t h, const std::string& s) {
    for (unsigned char c : s) h = splitmix64(h ^ c);
    return h;
}

}  // namespace

void validate_token_space(const TokenSpace& space) {
    if (space.alphabet.size() < 2) throw InvalidParameter("alphabet needs >= 2 characters");
    std::set<char> uniq(space.alphabet.begin(), space.alphabet.end());
    if (uniq.size() != space.alphabet.size())
        throw InvalidParameter("alphabet contains repeated characters");
    if (space.prefix_len < 1) throw InvalidParameter("prefix_len must be >= 1");
    if (space.suffix_len < 1) throw InvalidParameter("suffix_len must be >= 1");
}

std::uint64_t prefix_universe(const TokenSpace& space) {
    return checked_pow(space.alphabet.size(), space.prefix_len);
}

std::uint64_t suffix_universe(const TokenSpace& space) {
    return checked_pow(space.alphabet.size(), space.suffix_len);
}

std::uint64_t total_universe(const TokenSpace& space) {
    return checked_pow(space.alphabet.size(), space.prefix_len + space.suffix_len);
}

std::string index_to_string(const TokenSpace& space, std::uint64_t index, int len) {
    const std::uint64_t base = space.alphabet.size();
    std::string out(static_cast<std::size_t>(len), space.alphabet[0]);
    for (int pos = len - 1; pos >= 0; --pos) {
        out[static_cast<std::size_t>(pos)] = space.alphabet[index % base];
        index /= base;
    }
    if (index != 0) throw InvalidParameter("index does not fit in " + std::to_string(len) +
                                           " characters");
    return out;
}

std::uint64_t string_to_index(const TokenSpace& space, const std::string& s) {
    const std::uint64_t base = space.alphabet.size();
    std::uint64_t index = 0;
    for (char c : s) {
        const std::size_t digit = space.alphabet.find(c);
        if (digit == std::string::npos)
            throw InvalidParameter(std::string("character outside alphabet: ") + c);
        index = index * base + digit;
    }
    return index;
}

std::string prefix_at(const TokenSpace& space, std::uint64_t index) {
    return index_to_string(space, index, space.prefix_len);
}

std::string suffix_at(const TokenSpace& space, std::uint64_t index) {
    return index_to_string(space, index, space.suffix_len);
}

SuffixPermutation::SuffixPermutation(const TokenSpace& space, const std::string& prefix,
                                     std::uint64_t seed) {
    validate_token_space(space);
    n_ = suffix_universe(space);

    int bits = 2;
    while ((bits < 64) && ((bits % 2 != 0) || (std::uint64_t{1} << bits) < n_)) ++bits;
    half_bits_ = bits / 2;
    half_mask_ = (std::uint64_t{1} << half_bits_) - 1;

    // key schedule: seed stirred with the prefix and the space geometry
    std::uint64_t h = splitmix64(seed ^ 0x746f79617564ULL);
    h = fold_string(h, space.alphabet);
    h = splitmix64(h ^ static_cast<std::uint64_t>(space.prefix_len));
    h = splitmix64(h ^ static_cast<std::uint64_t>(space.suffix_len));
    h = fold_string(h, prefix);
    for (int r = 0; r < kRounds; ++r) {
        h = splitmix64(h);
        round_keys_[static_cast<std::size_t>(r)] = h;
    }
}

std::uint64_t SuffixPermutation::encrypt_once(std::uint64_t value) const {
    std::uint64_t left = value >> half_bits_;
    std::uint64_t right = value & half_mask_;
    for (int r = 0; r < kRounds; ++r) {
        const std::uint64_t f =
            splitmix64(right ^ round_keys_[static_cast<std::size_t>(r)]) & half_mask_;
        const std::uint64_t next_right = left ^ f;
        left = right;
        right = next_right;
    }
    return (left << half_bits_) | right;
}

std::uint64_t SuffixPermutation::at(std::uint64_t index) const {
    if (index >= n_) throw InvalidParameter("permutation index out of range");
    std::uint64_t value = encrypt_once(index);
    while (value >= n_) value = encrypt_once(value);  // walk the cycle back into range
    return value;
}

SuffixStream::SuffixStream(const TokenSpace& space, const std::string& prefix, std::uint64_t seed,
                           int worker, int workers)
    : space_(space), perm_(space, prefix, seed), worker_(worker), workers_(workers) {
    if (workers < 1) throw InvalidParameter("workers must be >= 1");
    if (worker < 0 || worker >= workers) throw InvalidParameter("worker index out of range");
}

std::uint64_t SuffixStream::size() const {
    const std::uint64_t n = perm_.size();
    const auto w = static_cast<std::uint64_t>(worker_);
    if (w >= n) return 0;
    return (n - w - 1) / static_cast<std::uint64_t>(workers_) + 1;
}

bool SuffixStream::next(std::string& suffix) {
    const std::uint64_t position =
        static_cast<std::uint64_t>(worker_) +
        cursor_ * static_cast<std::uint64_t>(workers_);
    if (position >= perm_.size()) return false;
    suffix = suffix_at(space_, perm_.at(position));
    ++cursor_;
    return true;
}

std::vector<std::string> SuffixStream::collect() {
    reset();
    std::vector<std::string> out;
    out.reserve(static_cast<std::size_t>(size()));
    std::string suffix;
    while (next(suffix)) out.push_back(suffix);
    reset();
    return out;
}

std::vector<SuffixStream> partition_tokenspace(const TokenSpace& space, const std::string& prefix,
                                               int workers, std::uint64_t seed) {
    if (workers < 1) throw InvalidParameter("workers must be >= 1");
    std::vector<SuffixStream> streams;
    streams.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) streams.emplace_back(space, prefix, seed, w, workers);
    return streams;
}

}  // namespace toyaudit
