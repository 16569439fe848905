#pragma once
#include <compare>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace aog {

/// Value of a node-instance parameter.
///
/// Every built-in domain uses discrete values so that chart keys can rely on
/// exact equality: a null value, an integer pair (string span, grid point,
/// time interval) or a finite tuple of other parameters. Tuples appear only
/// as the cached intermediate parameters introduced by binarization.
class Param {
public:
    enum class Kind : std::uint8_t { Null, Span, Point, Interval, Tuple };

    Param() = default;

    static Param null() { return {}; }
    static Param span(std::int64_t start, std::int64_t end) { return Param(Kind::Span, start, end); }
    static Param point(std::int64_t x, std::int64_t y) { return Param(Kind::Point, x, y); }
    static Param interval(std::int64_t start, std::int64_t end) { return Param(Kind::Interval, start, end); }
    static Param tuple(std::vector<Param> items);

    Kind kind() const { return kind_; }
    bool is_null() const { return kind_ == Kind::Null; }
    bool is_tuple() const { return kind_ == Kind::Tuple; }

    // Components of pair-valued kinds.
    std::int64_t first() const { return a_; }
    std::int64_t second() const { return b_; }

    const std::vector<Param>& items() const { return items_; }

    /// Number of scalar components, i.e. the parameter size.
    std::size_t size() const;

    std::size_t hash() const;
    std::string to_string() const;

    friend bool operator==(const Param& lhs, const Param& rhs);
    friend std::strong_ordering operator<=>(const Param& lhs, const Param& rhs);

private:
    Param(Kind kind, std::int64_t a, std::int64_t b) : kind_(kind), a_(a), b_(b) {}

    Kind kind_ = Kind::Null;
    std::int64_t a_ = 0;
    std::int64_t b_ = 0;
    std::vector<Param> items_;
};

struct ParamHash {
    std::size_t operator()(const Param& p) const { return p.hash(); }
};

// Boost-style hash mixing shared by the chart and parameter hashing.
inline std::size_t hash_combine(std::size_t seed, std::size_t value)
{
    return seed ^ (value + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

} // namespace aog
