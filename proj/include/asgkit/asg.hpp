#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "asgkit/model.hpp"
#include "asgkit/parser.hpp"

namespace asgkit {

// Placeholder for a not-yet-linked @Reference member.  The key is the target
// element's @ID member lexemes in declaration order.
struct RefSlot {
    std::string target_type;
    std::vector<std::string> key;
    std::optional<int> resolved_to;
    SourceSpan span;

    bool operator==(const RefSlot&) const = default;
};

using FieldItem = std::variant<std::string, int, RefSlot>;  // scalar | node id | ref

struct Field {
    bool is_list = false;
    std::vector<FieldItem> items;

    bool operator==(const Field&) const = default;
};

struct AsgNode {
    int id = -1;
    std::string type;
    SourceSpan span;
    std::vector<std::pair<std::string, Field>> fields;  // member declaration order

    const Field* find(std::string_view name) const;
    // Single scalar convenience; nullopt when absent or not a scalar.
    std::optional<std::string> scalar(std::string_view name) const;
    std::optional<int> child(std::string_view name) const;
};

struct InstanceGraph {
    std::vector<AsgNode> nodes;  // indexed by node id
    int root = -1;
    std::vector<std::string> warnings;

    const AsgNode& node(int id) const { return nodes.at(static_cast<std::size_t>(id)); }
};

// First definition per (type, key) wins; collisions are recorded and surface
// as warnings during resolution.
struct SymbolTable {
    struct Duplicate {
        std::string type;
        std::vector<std::string> key;
        std::vector<int> node_ids;  // all definitions, first one is the entry
    };

    std::map<std::pair<std::string, std::vector<std::string>>, int> entries;
    std::vector<Duplicate> duplicates;
};

// One AsgNode per full-element derivation; @Reference derivations become
// RefSlots; every node with @ID members is registered under its key.
std::pair<InstanceGraph, SymbolTable> build_instances(const ParseTree& tree,
                                                      const ModelSet& model);

// Links every RefSlot to the table entry for its key, appending one warning
// per duplicate identifier.  The result may contain cycles.  Throws
// Error{UnresolvedReference} when a key has no definition.
void resolve_references(InstanceGraph& graph, const SymbolTable& table);

// A constraint hook returns a failure message, or nullopt to pass.
using ConstraintFn =
    std::function<std::optional<std::string>(const AsgNode&, const InstanceGraph&)>;

class ConstraintRegistry {
public:
    void add(std::string name, ConstraintFn fn) { fns_[std::move(name)] = std::move(fn); }
    const ConstraintFn* find(std::string_view name) const;

private:
    std::map<std::string, ConstraintFn, std::less<>> fns_;
};

struct ConstraintFailure {
    std::string constraint;
    std::string element;
    int node_id = -1;
    SourceSpan span;
    std::string message;
};

struct ConstraintReport {
    std::vector<ConstraintFailure> failures;
    bool ok() const { return failures.empty(); }
};

// Runs every element's @Constraint hooks depth-first from the root, visiting
// each node once (safe on cyclic graphs).
ConstraintReport check_constraints(const InstanceGraph& graph, const ModelSet& model,
                                   const ConstraintRegistry& registry);

std::string asg_to_json(const InstanceGraph& graph);
std::string asg_to_dot(const InstanceGraph& graph);

}  // namespace asgkit
