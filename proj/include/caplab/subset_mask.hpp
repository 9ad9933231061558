#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace caplab {

// Subset of a fixed ground set {0, ..., n-1}, packed into 64-bit words.
// Bit i corresponds to point i of the owning space. Word 0 holds bits 0..63.
// Unused tail bits of the last word are always zero.
class SubsetMask {
public:
    SubsetMask() : n_(0) {}
    explicit SubsetMask(std::size_t n) : n_(n), words_((n + 63) / 64, 0) {}

    static SubsetMask empty_set(std::size_t n) { return SubsetMask(n); }
    static SubsetMask full_set(std::size_t n);
    static SubsetMask from_bits(std::size_t n, std::uint64_t bits);
    static SubsetMask from_indices(std::size_t n, const std::vector<std::size_t>& idx);
    // Accepts "0x1f" or "1f"; lowercase or uppercase digits.
    static SubsetMask from_hex(std::size_t n, std::string_view hex);

    std::size_t universe_size() const { return n_; }

    bool test(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1u; }
    void set(std::size_t i) { words_[i >> 6] |= std::uint64_t(1) << (i & 63); }
    void reset(std::size_t i) { words_[i >> 6] &= ~(std::uint64_t(1) << (i & 63)); }

    std::size_t count() const;
    bool none() const;
    bool is_full() const;

    // True when every element of other is also an element of *this.
    bool contains(const SubsetMask& other) const;
    bool intersects(const SubsetMask& other) const;

    SubsetMask operator&(const SubsetMask& o) const;
    SubsetMask operator|(const SubsetMask& o) const;
    SubsetMask operator^(const SubsetMask& o) const;
    SubsetMask minus(const SubsetMask& o) const;
    SubsetMask complement() const;

    SubsetMask& operator|=(const SubsetMask& o);
    SubsetMask& operator&=(const SubsetMask& o);

    bool operator==(const SubsetMask& o) const { return n_ == o.n_ && words_ == o.words_; }
    bool operator!=(const SubsetMask& o) const { return !(*this == o); }

    // Orders masks by their value as big-endian unsigned integers. Used for
    // deterministic tie-breaks between optima of equal capacity.
    int compare_value(const SubsetMask& o) const;

    // Dilation in index space: every set bit also sets the r nearest indices
    // on both sides. Only meaningful on uniform grids where index distance
    // is proportional to metric distance.
    SubsetMask dilate(std::size_t r) const;

    // Requires n <= 64.
    std::uint64_t low_bits() const;
    // Reuses the existing storage; requires n <= 64.
    void assign_bits(std::uint64_t bits);

    std::vector<std::size_t> indices() const;

    // Uniformly random subset; draws one 64-bit word per storage word.
    template <typename Gen>
    static SubsetMask random(std::size_t n, Gen&& gen) {
        SubsetMask m(n);
        for (auto& w : m.words_) w = gen();
        m.clear_tail();
        return m;
    }

    template <typename F>
    void for_each(F&& f) const {
        for (std::size_t w = 0; w < words_.size(); ++w) {
            std::uint64_t word = words_[w];
            while (word) {
                const unsigned b = static_cast<unsigned>(__builtin_ctzll(word));
                f(w * 64 + b);
                word &= word - 1;
            }
        }
    }

    // Minimal lowercase hex digits with a "0x" prefix, e.g. "0x0", "0x1f".
    std::string to_hex() const;

private:
    void clear_tail();
    std::size_t n_;
    std::vector<std::uint64_t> words_;
};

}  // namespace caplab
