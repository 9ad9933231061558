#include "caplab/subset_mask.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

namespace caplab {

namespace {
int hex_digit(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}
}  // namespace

void SubsetMask::clear_tail() {
    const std::size_t used = n_ & 63;
    if (used != 0 && !words_.empty()) {
        words_.back() &= (std::uint64_t(1) << used) - 1;
    }
}

SubsetMask SubsetMask::full_set(std::size_t n) {
    SubsetMask m(n);
    for (auto& w : m.words_) w = ~std::uint64_t(0);
    m.clear_tail();
    return m;
}

SubsetMask SubsetMask::from_bits(std::size_t n, std::uint64_t bits) {
    if (n > 64) throw std::invalid_argument("from_bits: universe larger than 64");
    SubsetMask m(n);
    m.words_[0] = bits;
    m.clear_tail();
    if (n < 64 && (bits >> n) != 0) throw std::invalid_argument("from_bits: bits outside universe");
    return m;
}

SubsetMask SubsetMask::from_indices(std::size_t n, const std::vector<std::size_t>& idx) {
    SubsetMask m(n);
    for (std::size_t i : idx) {
        if (i >= n) throw std::invalid_argument("from_indices: index outside universe");
        m.set(i);
    }
    return m;
}

SubsetMask SubsetMask::from_hex(std::size_t n, std::string_view hex) {
    if (hex.size() >= 2 && hex[0] == '0' && (hex[1] == 'x' || hex[1] == 'X')) {
        hex.remove_prefix(2);
    }
    if (hex.empty()) throw std::invalid_argument("from_hex: empty digit string");
    SubsetMask m(n);
    std::size_t bit = 0;
    for (std::size_t pos = hex.size(); pos-- > 0;) {
        const int d = hex_digit(hex[pos]);
        if (d < 0) throw std::invalid_argument("from_hex: invalid digit");
        for (int b = 0; b < 4; ++b) {
            if (d & (1 << b)) {
                if (bit + b >= n) throw std::invalid_argument("from_hex: bits outside universe");
                m.set(bit + b);
            }
        }
        bit += 4;
    }
    return m;
}

std::size_t SubsetMask::count() const {
    std::size_t c = 0;
    for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
    return c;
}

bool SubsetMask::none() const {
    for (auto w : words_) {
        if (w != 0) return false;
    }
    return true;
}

bool SubsetMask::is_full() const {
    return count() == n_;
}

bool SubsetMask::contains(const SubsetMask& other) const {
    for (std::size_t i = 0; i < words_.size(); ++i) {
        if ((other.words_[i] & ~words_[i]) != 0) return false;
    }
    return true;
}

bool SubsetMask::intersects(const SubsetMask& other) const {
    for (std::size_t i = 0; i < words_.size(); ++i) {
        if ((words_[i] & other.words_[i]) != 0) return true;
    }
    return false;
}

SubsetMask SubsetMask::operator&(const SubsetMask& o) const {
    SubsetMask r(n_);
    for (std::size_t i = 0; i < words_.size(); ++i) r.words_[i] = words_[i] & o.words_[i];
    return r;
}

SubsetMask SubsetMask::operator|(const SubsetMask& o) const {
    SubsetMask r(n_);
    for (std::size_t i = 0; i < words_.size(); ++i) r.words_[i] = words_[i] | o.words_[i];
    return r;
}

SubsetMask SubsetMask::operator^(const SubsetMask& o) const {
    SubsetMask r(n_);
    for (std::size_t i = 0; i < words_.size(); ++i) r.words_[i] = words_[i] ^ o.words_[i];
    return r;
}

SubsetMask SubsetMask::minus(const SubsetMask& o) const {
    SubsetMask r(n_);
    for (std::size_t i = 0; i < words_.size(); ++i) r.words_[i] = words_[i] & ~o.words_[i];
    return r;
}

SubsetMask SubsetMask::complement() const {
    SubsetMask r(n_);
    for (std::size_t i = 0; i < words_.size(); ++i) r.words_[i] = ~words_[i];
    r.clear_tail();
    return r;
}

SubsetMask& SubsetMask::operator|=(const SubsetMask& o) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
    return *this;
}

SubsetMask& SubsetMask::operator&=(const SubsetMask& o) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
    return *this;
}

int SubsetMask::compare_value(const SubsetMask& o) const {
    for (std::size_t i = words_.size(); i-- > 0;) {
        if (words_[i] != o.words_[i]) return words_[i] < o.words_[i] ? -1 : 1;
    }
    return 0;
}

SubsetMask SubsetMask::dilate(std::size_t r) const {
    SubsetMask out = *this;
    if (out.none() || r == 0) return out;
    if (r >= n_) return full_set(n_);
    // Smear set bits outward by doubling: after each round the set is the
    // exact dilation by `done`, so composing rounds stays exact.
    const auto shift_left = [this](const std::vector<std::uint64_t>& src, std::size_t k) {
        std::vector<std::uint64_t> dst(src.size(), 0);
        const std::size_t wordshift = k / 64, bitshift = k % 64;
        for (std::size_t i = src.size(); i-- > 0;) {
            if (i >= wordshift) {
                dst[i] = src[i - wordshift] << bitshift;
                if (bitshift != 0 && i > wordshift) {
                    dst[i] |= src[i - wordshift - 1] >> (64 - bitshift);
                }
            }
        }
        return dst;
    };
    const auto shift_right = [](const std::vector<std::uint64_t>& src, std::size_t k) {
        std::vector<std::uint64_t> dst(src.size(), 0);
        const std::size_t wordshift = k / 64, bitshift = k % 64;
        for (std::size_t i = 0; i < src.size(); ++i) {
            if (i + wordshift < src.size()) {
                dst[i] = src[i + wordshift] >> bitshift;
                if (bitshift != 0 && i + wordshift + 1 < src.size()) {
                    dst[i] |= src[i + wordshift + 1] << (64 - bitshift);
                }
            }
        }
        return dst;
    };
    std::size_t done = 0, step = 1;
    while (done < r) {
        const std::size_t take = std::min(step, r - done);
        const auto left = shift_left(out.words_, take);
        const auto right = shift_right(out.words_, take);
        for (std::size_t i = 0; i < out.words_.size(); ++i) out.words_[i] |= left[i] | right[i];
        done += take;
        step *= 2;
    }
    out.clear_tail();
    return out;
}

std::uint64_t SubsetMask::low_bits() const {
    if (n_ > 64) throw std::logic_error("low_bits: universe larger than 64");
    return words_.empty() ? 0 : words_[0];
}

void SubsetMask::assign_bits(std::uint64_t bits) {
    if (n_ > 64) throw std::logic_error("assign_bits: universe larger than 64");
    words_[0] = bits;
    clear_tail();
}

std::vector<std::size_t> SubsetMask::indices() const {
    std::vector<std::size_t> out;
    out.reserve(count());
    for_each([&](std::size_t i) { out.push_back(i); });
    return out;
}

std::string SubsetMask::to_hex() const {
    static const char* digits = "0123456789abcdef";
    std::string s;
    bool leading = true;
    for (std::size_t w = words_.size(); w-- > 0;) {
        for (int shift = 60; shift >= 0; shift -= 4) {
            const unsigned d = static_cast<unsigned>((words_[w] >> shift) & 0xF);
            if (d == 0 && leading) continue;
            leading = false;
            s.push_back(digits[d]);
        }
    }
    if (s.empty()) s = "0";
    return "0x" + s;
}

}  // namespace caplab
