#include <aog/param.hpp>

#include <algorithm>
#include <functional>

namespace aog {

Param Param::tuple(std::vector<Param> items)
{
    Param p;
    p.kind_ = Kind::Tuple;
    p.items_ = std::move(items);
    return p;
}

std::size_t Param::size() const
{
    switch (kind_) {
    case Kind::Null: return 0;
    case Kind::Tuple: {
        std::size_t total = 0;
        for (const auto& item : items_) total += item.size();
        return total;
    }
    default: return 2;
    }
}

std::size_t Param::hash() const
{
    std::size_t h = static_cast<std::size_t>(kind_);
    if (kind_ == Kind::Tuple) {
        for (const auto& item : items_) h = hash_combine(h, item.hash());
        return hash_combine(h, items_.size());
    }
    h = hash_combine(h, std::hash<std::int64_t>{}(a_));
    return hash_combine(h, std::hash<std::int64_t>{}(b_));
}

std::string Param::to_string() const
{
    switch (kind_) {
    case Kind::Null: return "null";
    case Kind::Tuple: {
        std::string out = "<";
        for (std::size_t i = 0; i < items_.size(); ++i) {
            if (i) out += ",";
            out += items_[i].to_string();
        }
        return out + ">";
    }
    default:
        return "(" + std::to_string(a_) + "," + std::to_string(b_) + ")";
    }
}

bool operator==(const Param& lhs, const Param& rhs)
{
    if (lhs.kind_ != rhs.kind_) return false;
    if (lhs.kind_ == Param::Kind::Tuple) return lhs.items_ == rhs.items_;
    return lhs.a_ == rhs.a_ && lhs.b_ == rhs.b_;
}

std::strong_ordering operator<=>(const Param& lhs, const Param& rhs)
{
    if (auto c = lhs.kind_ <=> rhs.kind_; c != 0) return c;
    if (lhs.kind_ == Param::Kind::Tuple) {
        const auto n = std::min(lhs.items_.size(), rhs.items_.size());
        for (std::size_t i = 0; i < n; ++i) {
            if (auto c = lhs.items_[i] <=> rhs.items_[i]; c != 0) return c;
        }
        return lhs.items_.size() <=> rhs.items_.size();
    }
    if (auto c = lhs.a_ <=> rhs.a_; c != 0) return c;
    return lhs.b_ <=> rhs.b_;
}

} // namespace aog
