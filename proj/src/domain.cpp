#include <aog/domain.hpp>
#include <aog/error.hpp>

#include <algorithm>

namespace aog {

namespace {

void require_empty_config(const Json& config, const std::string& key)
{
    if (!config.is_null() && !(config.is_object() && config.empty())) {
        throw ConfigError("'" + key + "' takes no configuration");
    }
}

void require_min_arity(std::size_t arity, std::size_t min, const std::string& key)
{
    if (arity < min) {
        throw ConfigError("'" + key + "' requires at least " + std::to_string(min) + " arguments, got "
                          + std::to_string(arity));
    }
}

std::pair<std::int64_t, std::int64_t> decode_pair(const Json& value, const char* what)
{
    if (!value.is_array() || value.size() != 2 || !value[0].is_number_integer() || !value[1].is_number_integer()) {
        throw FormatError(std::string("expected ") + what + " as a two-element integer array, got " + value.dump());
    }
    return {value[0].get<std::int64_t>(), value[1].get<std::int64_t>()};
}

Json encode_pair(const Param& p) { return Json::array({p.first(), p.second()}); }

void check_kind(const Param& p, Param::Kind kind, const char* domain)
{
    if (p.kind() != kind) {
        throw DomainError(std::string(domain) + " domain cannot handle parameter " + p.to_string());
    }
}

// A relation evaluated on every consecutive pair (θ_i, θ_{i+1}).
template <class Pred>
DomainBinding::RelationFactory chained(std::string key, Pred pred)
{
    return [key, pred](const Json& config, std::size_t arity) -> Relation {
        require_empty_config(config, key);
        require_min_arity(arity, 2, key);
        return [pred](std::span<const Param> args) {
            for (std::size_t i = 0; i + 1 < args.size(); ++i) {
                check_kind(args[i], Param::Kind::Interval, "interval");
                check_kind(args[i + 1], Param::Kind::Interval, "interval");
                if (!pred(args[i], args[i + 1])) return false;
            }
            return true;
        };
    };
}

std::pair<std::int64_t, std::int64_t> config_vec2(const Json& v, const std::string& key)
{
    try {
        return decode_pair(v, "2-vector");
    } catch (const FormatError& e) {
        throw ConfigError("'" + key + "': " + e.what());
    }
}

} // namespace

DomainBinding::DomainBinding(std::string name, Json config)
    : name_(std::move(name)), config_(std::move(config))
{}

Relation DomainBinding::relation(const DomainRef& ref, std::size_t arity) const
{
    auto it = relations_.find(ref.key);
    if (it == relations_.end()) {
        throw ConfigError("unknown relation '" + ref.key + "' in domain " + name_);
    }
    return it->second(ref.config, arity);
}

Function DomainBinding::function(const DomainRef& ref, std::size_t arity) const
{
    auto it = functions_.find(ref.key);
    if (it == functions_.end()) {
        throw ConfigError("unknown function '" + ref.key + "' in domain " + name_);
    }
    return it->second(ref.config, arity);
}

std::vector<std::string> DomainBinding::relation_keys() const
{
    std::vector<std::string> keys;
    for (const auto& [k, _] : relations_) keys.push_back(k);
    return keys;
}

std::vector<std::string> DomainBinding::function_keys() const
{
    std::vector<std::string> keys;
    for (const auto& [k, _] : functions_) keys.push_back(k);
    return keys;
}

Param DomainBinding::decode(const Json& value) const { return decode_(value); }
Json DomainBinding::encode(const Param& value) const { return encode_(value); }

std::optional<Param> DomainBinding::leaf_param(std::size_t position) const
{
    if (!leaf_) return std::nullopt;
    return leaf_(position);
}

std::optional<std::vector<Param>> DomainBinding::split(const DomainRef& relation, const DomainRef& function,
                                                       const Param& parent, std::size_t arity) const
{
    if (!split_) return std::nullopt;
    return split_(relation, function, parent, arity);
}

void DomainBinding::add_relation(const std::string& key, RelationFactory factory)
{
    relations_[key] = std::move(factory);
}

void DomainBinding::add_function(const std::string& key, FunctionFactory factory)
{
    functions_[key] = std::move(factory);
}

void DomainBinding::set_codec(Decoder decoder, Encoder encoder)
{
    decode_ = std::move(decoder);
    encode_ = std::move(encoder);
}

DomainPtr string_span_domain()
{
    auto d = std::make_shared<DomainBinding>("string_span");
    d->add_relation("adjacent", [](const Json& config, std::size_t arity) -> Relation {
        require_empty_config(config, "adjacent");
        require_min_arity(arity, 2, "adjacent");
        return [](std::span<const Param> args) {
            for (std::size_t i = 0; i + 1 < args.size(); ++i) {
                check_kind(args[i], Param::Kind::Span, "string_span");
                check_kind(args[i + 1], Param::Kind::Span, "string_span");
                if (args[i].second() != args[i + 1].first()) return false;
            }
            return true;
        };
    });
    d->add_function("concat", [](const Json& config, std::size_t arity) -> Function {
        require_empty_config(config, "concat");
        require_min_arity(arity, 1, "concat");
        return [](std::span<const Param> args) {
            check_kind(args.front(), Param::Kind::Span, "string_span");
            check_kind(args.back(), Param::Kind::Span, "string_span");
            return Param::span(args.front().first(), args.back().second());
        };
    });
    d->set_codec(
        [](const Json& v) {
            auto [s, e] = decode_pair(v, "span");
            if (!(0 <= s && s < e)) throw FormatError("span must satisfy 0 <= start < end: " + v.dump());
            return Param::span(s, e);
        },
        encode_pair);
    d->set_default_root(Param::span(0, 1));
    d->set_leaf_hook([](std::size_t k) {
        return std::optional<Param>(Param::span(static_cast<std::int64_t>(k), static_cast<std::int64_t>(k) + 1));
    });
    d->set_max_param_size(2);
    return d;
}

DomainPtr grid_domain()
{
    auto d = std::make_shared<DomainBinding>("grid");
    d->add_relation("offset", [](const Json& config, std::size_t arity) -> Relation {
        require_min_arity(arity, 2, "offset");
        if (!config.is_object() || !config.contains("offsets") || !config.at("offsets").is_array()) {
            throw ConfigError("'offset' requires {\"offsets\": [[dx, dy], ...]}");
        }
        const auto& raw = config.at("offsets");
        if (raw.size() != arity - 1) {
            throw ConfigError("'offset' lists " + std::to_string(raw.size()) + " offsets for an arity-"
                              + std::to_string(arity) + " rule (expected " + std::to_string(arity - 1) + ")");
        }
        std::vector<std::pair<std::int64_t, std::int64_t>> offsets;
        for (const auto& o : raw) offsets.push_back(config_vec2(o, "offset"));
        return [offsets](std::span<const Param> args) {
            const Param& base = args.front();
            check_kind(base, Param::Kind::Point, "grid");
            for (std::size_t i = 1; i < args.size(); ++i) {
                check_kind(args[i], Param::Kind::Point, "grid");
                if (args[i].first() - base.first() != offsets[i - 1].first
                    || args[i].second() - base.second() != offsets[i - 1].second) {
                    return false;
                }
            }
            return true;
        };
    });
    d->add_function("anchor", [](const Json& config, std::size_t arity) -> Function {
        require_min_arity(arity, 1, "anchor");
        std::pair<std::int64_t, std::int64_t> a{0, 0};
        if (config.is_object() && config.contains("anchor")) a = config_vec2(config.at("anchor"), "anchor");
        else if (!config.is_null() && !(config.is_object() && config.empty())) {
            throw ConfigError("'anchor' takes {\"anchor\": [ax, ay]}");
        }
        return [a](std::span<const Param> args) {
            check_kind(args.front(), Param::Kind::Point, "grid");
            return Param::point(args.front().first() + a.first, args.front().second() + a.second);
        };
    });
    d->set_codec(
        [](const Json& v) {
            auto [x, y] = decode_pair(v, "point");
            return Param::point(x, y);
        },
        encode_pair);
    d->set_default_root(Param::point(0, 0));
    // Top-down: θ_1 = parent - anchor, θ_i = θ_1 + offset_i.
    d->set_split_hook([](const DomainRef& rel, const DomainRef& fn, const Param& parent,
                         std::size_t arity) -> std::optional<std::vector<Param>> {
        if (rel.key != "offset" || fn.key != "anchor" || parent.kind() != Param::Kind::Point) return std::nullopt;
        std::pair<std::int64_t, std::int64_t> a{0, 0};
        if (fn.config.is_object() && fn.config.contains("anchor")) a = config_vec2(fn.config.at("anchor"), "anchor");
        const auto& offsets = rel.config.at("offsets");
        if (offsets.size() != arity - 1) return std::nullopt;
        std::vector<Param> out;
        const auto bx = parent.first() - a.first;
        const auto by = parent.second() - a.second;
        out.push_back(Param::point(bx, by));
        for (const auto& o : offsets) {
            auto [dx, dy] = config_vec2(o, "offset");
            out.push_back(Param::point(bx + dx, by + dy));
        }
        return out;
    });
    d->set_max_param_size(2);
    return d;
}

DomainPtr interval_domain()
{
    auto d = std::make_shared<DomainBinding>("interval");
    d->add_relation("meets", chained("meets", [](const Param& a, const Param& b) {
        return a.second() == b.first();
    }));
    d->add_relation("before", chained("before", [](const Param& a, const Param& b) {
        return a.second() < b.first();
    }));
    d->add_relation("equals", chained("equals", [](const Param& a, const Param& b) { return a == b; }));
    d->add_relation("during", chained("during", [](const Param& a, const Param& b) {
        return b.first() < a.first() && a.second() < b.second();
    }));
    d->add_function("hull", [](const Json& config, std::size_t arity) -> Function {
        require_empty_config(config, "hull");
        require_min_arity(arity, 1, "hull");
        return [](std::span<const Param> args) {
            auto lo = args.front().first();
            auto hi = args.front().second();
            for (const auto& p : args) {
                check_kind(p, Param::Kind::Interval, "interval");
                lo = std::min(lo, p.first());
                hi = std::max(hi, p.second());
            }
            return Param::interval(lo, hi);
        };
    });
    d->set_codec(
        [](const Json& v) {
            auto [s, e] = decode_pair(v, "interval");
            if (!(s < e)) throw FormatError("interval must satisfy start < end: " + v.dump());
            return Param::interval(s, e);
        },
        encode_pair);
    d->set_default_root(Param::interval(0, 1));
    d->set_leaf_hook([](std::size_t k) {
        return std::optional<Param>(
            Param::interval(static_cast<std::int64_t>(k), static_cast<std::int64_t>(k) + 1));
    });
    d->set_max_param_size(2);
    return d;
}

DomainPtr null_domain()
{
    auto d = std::make_shared<DomainBinding>("null");
    d->add_relation("true", [](const Json& config, std::size_t) -> Relation {
        require_empty_config(config, "true");
        return [](std::span<const Param>) { return true; };
    });
    d->add_function("null", [](const Json& config, std::size_t) -> Function {
        require_empty_config(config, "null");
        return [](std::span<const Param>) { return Param::null(); };
    });
    d->set_codec(
        [](const Json& v) {
            if (!v.is_null()) throw FormatError("null domain parameters must be null, got " + v.dump());
            return Param::null();
        },
        [](const Param&) { return Json(nullptr); });
    d->set_default_root(Param::null());
    d->set_leaf_hook([](std::size_t) { return std::optional<Param>(Param::null()); });
    d->set_split_hook([](const DomainRef&, const DomainRef&, const Param&, std::size_t arity) {
        return std::optional<std::vector<Param>>(std::vector<Param>(arity, Param::null()));
    });
    d->set_max_param_size(0);
    return d;
}

namespace {

std::vector<Param> unpack(std::span<const Param> args)
{
    if (args.empty() || !args.front().is_tuple()) {
        throw DomainError("expected a cached tuple as first argument");
    }
    std::vector<Param> flat = args.front().items();
    flat.insert(flat.end(), args.begin() + 1, args.end());
    return flat;
}

std::pair<DomainRef, std::size_t> inner_ref(const Json& config, const std::string& key)
{
    if (!config.is_object() || !config.contains("inner") || !config.contains("arity")
        || !config.at("arity").is_number_integer() || config.at("arity").get<long long>() < 2
        || !config.at("inner").is_object()
        || !config.at("inner").contains("key")) {
        throw ConfigError("'" + key + "' requires {\"inner\": {\"key\", \"config\"}, \"arity\": n}");
    }
    DomainRef ref{config.at("inner").at("key").get<std::string>(),
                  config.at("inner").value("config", Json::object())};
    return {ref, config.at("arity").get<std::size_t>()};
}

} // namespace

DomainPtr tuple_domain(DomainPtr base)
{
    auto d = std::make_shared<DomainBinding>("tuple", Json{{"base", {{"name", base->name()}, {"config", base->spec().config}}}});
    d->relations_ = base->relations_;
    d->functions_ = base->functions_;
    d->add_relation("always", [](const Json& config, std::size_t) -> Relation {
        require_empty_config(config, "always");
        return [](std::span<const Param>) { return true; };
    });
    d->add_function("pack", [](const Json& config, std::size_t) -> Function {
        require_empty_config(config, "pack");
        return [](std::span<const Param> args) { return Param::tuple({args.begin(), args.end()}); };
    });
    d->add_function("append", [](const Json& config, std::size_t arity) -> Function {
        require_empty_config(config, "append");
        require_min_arity(arity, 2, "append");
        return [](std::span<const Param> args) { return Param::tuple(unpack(args)); };
    });
    d->add_function("project", [](const Json& config, std::size_t arity) -> Function {
        if (arity != 1) throw ConfigError("'project' takes exactly one tuple argument");
        if (!config.is_object() || !config.contains("index") || !config.at("index").is_number_integer()
            || config.at("index").get<long long>() < 1) {
            throw ConfigError("'project' requires {\"index\": k} with k >= 1");
        }
        const auto k = config.at("index").get<std::size_t>();
        return [k](std::span<const Param> args) {
            const auto& items = args.front().items();
            if (!args.front().is_tuple() || k > items.size()) {
                throw DomainError("projection " + std::to_string(k) + " out of range for " + args.front().to_string());
            }
            return items[k - 1];
        };
    });
    auto base_copy = base;
    d->add_relation("apply_relation", [base_copy](const Json& config, std::size_t arity) -> Relation {
        if (arity != 2) throw ConfigError("'apply_relation' is binary");
        auto [ref, n] = inner_ref(config, "apply_relation");
        Relation inner = base_copy->relation(ref, n);
        return [inner, n](std::span<const Param> args) {
            auto flat = unpack(args);
            if (flat.size() != n) throw DomainError("cached tuple has wrong length for apply_relation");
            return inner(flat);
        };
    });
    d->add_function("apply_function", [base_copy](const Json& config, std::size_t arity) -> Function {
        if (arity != 2) throw ConfigError("'apply_function' is binary");
        auto [ref, n] = inner_ref(config, "apply_function");
        Function inner = base_copy->function(ref, n);
        return [inner, n](std::span<const Param> args) {
            auto flat = unpack(args);
            if (flat.size() != n) throw DomainError("cached tuple has wrong length for apply_function");
            return inner(flat);
        };
    });
    d->set_codec(
        [base_copy](const Json& v) {
            std::function<Param(const Json&)> rec = [&](const Json& j) -> Param {
                if (j.is_object() && j.size() == 1 && j.contains("tuple") && j.at("tuple").is_array()) {
                    std::vector<Param> items;
                    for (const auto& e : j.at("tuple")) items.push_back(rec(e));
                    return Param::tuple(std::move(items));
                }
                return base_copy->decode(j);
            };
            return rec(v);
        },
        [base_copy](const Param& p) {
            std::function<Json(const Param&)> rec = [&](const Param& q) -> Json {
                if (q.is_tuple()) {
                    Json arr = Json::array();
                    for (const auto& e : q.items()) arr.push_back(rec(e));
                    return Json{{"tuple", arr}};
                }
                return base_copy->encode(q);
            };
            return rec(p);
        });
    d->default_root_ = base->default_root_;
    d->leaf_ = base->leaf_;
    d->set_max_param_size(base->max_param_size());
    return d;
}

DomainPtr make_domain(const DomainSpec& spec)
{
    const auto no_config = spec.config.is_null() || (spec.config.is_object() && spec.config.empty());
    if (spec.name == "tuple") {
        if (!spec.config.is_object() || !spec.config.contains("base")) {
            throw ConfigError("tuple domain requires {\"base\": {\"name\", \"config\"}}");
        }
        const auto& b = spec.config.at("base");
        return tuple_domain(make_domain({b.at("name").get<std::string>(), b.value("config", Json::object())}));
    }
    if (!no_config) throw ConfigError("domain '" + spec.name + "' takes no configuration");
    if (spec.name == "string_span") return string_span_domain();
    if (spec.name == "grid") return grid_domain();
    if (spec.name == "interval") return interval_domain();
    if (spec.name == "null") return null_domain();
    throw ConfigError("unknown domain '" + spec.name + "'");
}

} // namespace aog
