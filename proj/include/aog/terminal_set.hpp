#pragma once
#include <aog/param.hpp>

#include <algorithm>
#include <bit>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

namespace aog {

/// Set of terminal-instance indices of one data sample.
///
/// A fixed-width bitset; the first 64 indices live inline so samples of up to
/// 64 instances never allocate. Ordering is lexicographic over the sorted
/// index sequence.
class TerminalSet {
public:
    TerminalSet() = default;

    static TerminalSet singleton(std::size_t index)
    {
        TerminalSet s;
        s.insert(index);
        return s;
    }

    void insert(std::size_t index)
    {
        if (index < 64) {
            head_ |= std::uint64_t{1} << index;
            return;
        }
        const auto w = index / 64 - 1;
        if (tail_.size() <= w) tail_.resize(w + 1, 0);
        tail_[w] |= std::uint64_t{1} << (index % 64);
    }

    bool contains(std::size_t index) const
    {
        if (index < 64) return (head_ >> index) & 1U;
        const auto w = index / 64 - 1;
        return w < tail_.size() && ((tail_[w] >> (index % 64)) & 1U);
    }

    std::size_t count() const
    {
        std::size_t n = static_cast<std::size_t>(std::popcount(head_));
        for (auto w : tail_) n += static_cast<std::size_t>(std::popcount(w));
        return n;
    }

    bool empty() const { return count() == 0; }

    bool disjoint(const TerminalSet& other) const
    {
        if (head_ & other.head_) return false;
        const auto n = std::min(tail_.size(), other.tail_.size());
        for (std::size_t i = 0; i < n; ++i) {
            if (tail_[i] & other.tail_[i]) return false;
        }
        return true;
    }

    TerminalSet united(const TerminalSet& other) const
    {
        TerminalSet out = *this;
        out.head_ |= other.head_;
        if (out.tail_.size() < other.tail_.size()) out.tail_.resize(other.tail_.size(), 0);
        for (std::size_t i = 0; i < other.tail_.size(); ++i) out.tail_[i] |= other.tail_[i];
        return out;
    }

    std::vector<std::size_t> elements() const
    {
        std::vector<std::size_t> out;
        for (std::size_t w = 0; w <= tail_.size(); ++w) {
            auto bits = word(w);
            while (bits) {
                out.push_back(w * 64 + static_cast<std::size_t>(std::countr_zero(bits)));
                bits &= bits - 1;
            }
        }
        return out;
    }

    std::size_t hash() const
    {
        std::size_t h = std::hash<std::uint64_t>{}(head_);
        for (std::size_t i = 0; i < significant_tail(); ++i) h = hash_combine(h, std::hash<std::uint64_t>{}(tail_[i]));
        return h;
    }

    friend bool operator==(const TerminalSet& a, const TerminalSet& b)
    {
        if (a.head_ != b.head_) return false;
        const auto n = std::max(a.tail_.size(), b.tail_.size());
        for (std::size_t i = 0; i < n; ++i) {
            if (a.word(i + 1) != b.word(i + 1)) return false;
        }
        return true;
    }

    friend std::strong_ordering operator<=>(const TerminalSet& a, const TerminalSet& b)
    {
        // The set holding the smallest element of the symmetric difference
        // sorts first, unless the other set is a prefix of it.
        const auto n = std::max(a.tail_.size(), b.tail_.size()) + 1;
        for (std::size_t w = 0; w < n; ++w) {
            const auto x = a.word(w) ^ b.word(w);
            if (!x) continue;
            const auto bit = std::uint64_t{1} << std::countr_zero(x);
            const bool in_a = a.word(w) & bit;
            const TerminalSet& other = in_a ? b : a;
            bool other_has_larger = (other.word(w) & ~((bit << 1) - 1)) != 0;
            for (std::size_t v = w + 1; v < n && !other_has_larger; ++v) other_has_larger = other.word(v) != 0;
            if (in_a) return other_has_larger ? std::strong_ordering::less : std::strong_ordering::greater;
            return other_has_larger ? std::strong_ordering::greater : std::strong_ordering::less;
        }
        return std::strong_ordering::equal;
    }

private:
    std::uint64_t word(std::size_t w) const
    {
        if (w == 0) return head_;
        return w - 1 < tail_.size() ? tail_[w - 1] : 0;
    }

    std::size_t significant_tail() const
    {
        auto n = tail_.size();
        while (n > 0 && tail_[n - 1] == 0) --n;
        return n;
    }

    std::uint64_t head_ = 0;
    std::vector<std::uint64_t> tail_;
};

} // namespace aog
