#pragma once
#include <aog/param.hpp>

#include <json.hpp>

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace aog {

using Json = nlohmann::json;

/// Parameter relation t(θ_1, ..., θ_n).
using Relation = std::function<bool(std::span<const Param>)>;
/// Parameter function f(θ_1, ..., θ_n) producing the parent parameter.
using Function = std::function<Param(std::span<const Param>)>;

/// Serializable reference to a relation or function in a domain registry.
struct DomainRef {
    std::string key;
    Json config = Json::object();

    friend bool operator==(const DomainRef&, const DomainRef&) = default;
};

struct DomainSpec {
    std::string name;
    Json config = Json::object();

    friend bool operator==(const DomainSpec&, const DomainSpec&) = default;
};

/// Registry of parameter relations and functions for one data type, plus
/// the parameter codec and the hooks used by forward sampling.
///
/// Bindings are built once by the factory functions below and shared as
/// `std::shared_ptr<const DomainBinding>`. All registered relations and
/// functions are pure; each built-in runs in time linear in the arity and
/// the parameter size.
class DomainBinding {
public:
    using RelationFactory = std::function<Relation(const Json& config, std::size_t arity)>;
    using FunctionFactory = std::function<Function(const Json& config, std::size_t arity)>;
    /// Top-down realization of child parameters from a parent parameter.
    using SplitHook = std::function<std::optional<std::vector<Param>>(
        const DomainRef& relation, const DomainRef& function, const Param& parent, std::size_t arity)>;
    /// Parameter of the terminal instance at a left-to-right leaf position.
    using LeafHook = std::function<std::optional<Param>(std::size_t position)>;
    using Decoder = std::function<Param(const Json&)>;
    using Encoder = std::function<Json(const Param&)>;

    DomainBinding(std::string name, Json config = Json::object());

    const std::string& name() const { return name_; }
    DomainSpec spec() const { return {name_, config_}; }

    // Resolution throws ConfigError on unknown keys, bad configs or arity mismatch.
    Relation relation(const DomainRef& ref, std::size_t arity) const;
    Function function(const DomainRef& ref, std::size_t arity) const;

    bool has_relation(const std::string& key) const { return relations_.contains(key); }
    bool has_function(const std::string& key) const { return functions_.contains(key); }
    std::vector<std::string> relation_keys() const;
    std::vector<std::string> function_keys() const;

    Param decode(const Json& value) const;
    Json encode(const Param& value) const;

    /// Root parameter used when sampling top-down.
    Param default_root() const { return default_root_; }
    bool samples_bottom_up() const { return static_cast<bool>(leaf_); }
    std::optional<Param> leaf_param(std::size_t position) const;
    std::optional<std::vector<Param>> split(const DomainRef& relation, const DomainRef& function,
                                            const Param& parent, std::size_t arity) const;
    std::size_t max_param_size() const { return max_param_size_; }

    // Registration; only meaningful before the binding is shared.
    void add_relation(const std::string& key, RelationFactory factory);
    void add_function(const std::string& key, FunctionFactory factory);
    void set_codec(Decoder decoder, Encoder encoder);
    void set_default_root(Param root) { default_root_ = std::move(root); }
    void set_leaf_hook(LeafHook hook) { leaf_ = std::move(hook); }
    void set_split_hook(SplitHook hook) { split_ = std::move(hook); }
    void set_max_param_size(std::size_t size) { max_param_size_ = size; }

private:
    std::string name_;
    Json config_;
    std::map<std::string, RelationFactory> relations_;
    std::map<std::string, FunctionFactory> functions_;
    Decoder decode_;
    Encoder encode_;
    Param default_root_;
    LeafHook leaf_;
    SplitHook split_;
    std::size_t max_param_size_ = 0;

    friend std::shared_ptr<const DomainBinding> tuple_domain(std::shared_ptr<const DomainBinding>);
};

using DomainPtr = std::shared_ptr<const DomainBinding>;

/// θ = (start, end) with start < end. Relation `adjacent` (end_i = start_{i+1}),
/// function `concat` returning (start_1, end_n).
DomainPtr string_span_domain();

/// θ = (x, y). Relation `offset` with config {"offsets": [[dx, dy], ...]} (one
/// entry per child after the first, relative to the first child); function
/// `anchor` with config {"anchor": [ax, ay]} returning θ_1 + (ax, ay).
DomainPtr grid_domain();

/// θ = (start, end) with start < end. Relations `meets`, `before`, `equals`
/// and `during`, each holding between every consecutive pair of children;
/// function `hull`.
DomainPtr interval_domain();

/// Single null value; relation `true` and function `null` for every arity.
DomainPtr null_domain();

/// Tuples over `base` values, used by binarization. Adds relation `always`
/// and functions `pack`, `append`, `project` ({"index": k}, 1-based); the
/// relation `apply_relation` and function `apply_function` (config
/// {"inner": {"key", "config"}, "arity": n}) unpack a cached tuple plus the
/// last child and evaluate the referenced base relation/function. All base
/// keys stay available.
DomainPtr tuple_domain(DomainPtr base);

/// Factory by serialized name: string_span, grid, interval, null, tuple.
DomainPtr make_domain(const DomainSpec& spec);

} // namespace aog
