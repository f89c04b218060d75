#include "asgkit/asg.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "json.hpp"

namespace asgkit {

const Field* AsgNode::find(std::string_view name) const {
    for (const auto& [fname, field] : fields)
        if (fname == name) return &field;
    return nullptr;
}

std::optional<std::string> AsgNode::scalar(std::string_view name) const {
    const Field* f = find(name);
    if (!f || f->items.size() != 1) return std::nullopt;
    if (const std::string* s = std::get_if<std::string>(&f->items[0])) return *s;
    return std::nullopt;
}

std::optional<int> AsgNode::child(std::string_view name) const {
    const Field* f = find(name);
    if (!f || f->items.size() != 1) return std::nullopt;
    if (const int* id = std::get_if<int>(&f->items[0])) return *id;
    return std::nullopt;
}

const ConstraintFn* ConstraintRegistry::find(std::string_view name) const {
    auto it = fns_.find(name);
    return it == fns_.end() ? nullptr : &it->second;
}

namespace {

// Source text of a subtree: token lexemes joined with single spaces.  Used as
// the normalized form of multi-token @ID member values.
void collect_lexemes(const ParseTree::Node& node, std::string& out) {
    if (!node.production) {
        if (!out.empty()) out += ' ';
        out += node.lexeme;
        return;
    }
    for (const ParseTree::Node& c : node.children) collect_lexemes(c, out);
}

std::string value_text(const ParseTree::Node& node) {
    std::string out;
    collect_lexemes(node, out);
    return out;
}

struct BasicValue {
    std::string type;
    std::string lexeme;
};

using WalkValue = std::variant<BasicValue, int, RefSlot>;

class Instantiator {
public:
    Instantiator(const ParseTree& tree, const ModelSet& model)
        : tree_(tree), model_(model) {}

    std::pair<InstanceGraph, SymbolTable> run() {
        WalkValue v = walk(tree_.root);
        if (const BasicValue* b = std::get_if<BasicValue>(&v))
            graph_.root = materialize(*b, {tree_.root.begin, tree_.root.end});
        else
            graph_.root = std::get<int>(v);
        return {std::move(graph_), std::move(table_)};
    }

private:
    WalkValue walk(const ParseTree::Node& node) {
        switch (node.production->origin) {
            case ProductionOrigin::token_wrap:
                return BasicValue{node.production->owner, node.children.at(0).lexeme};
            case ProductionOrigin::selection_alt: {
                for (std::size_t i = 0; i < node.children.size(); ++i) {
                    if (node.production->roles[i].kind != RoleKind::alternative) continue;
                    WalkValue v = walk(node.children[i]);
                    // A basic alternative still yields a typed node, so the
                    // concrete choice stays observable in the graph.
                    if (const BasicValue* b = std::get_if<BasicValue>(&v))
                        return materialize(*b, {node.children[i].begin,
                                                node.children[i].end});
                    return v;
                }
                throw Error(ErrorCode::MalformedElement,
                            "selection production without alternative");
            }
            case ProductionOrigin::composite:
                return instantiate_composite(node);
            case ProductionOrigin::reference:
                return make_ref_slot(node);
            default:
                throw Error(ErrorCode::MalformedElement,
                            "unexpected production origin during instantiation");
        }
    }

    int instantiate_composite(const ParseTree::Node& node) {
        const ElementModel& element = model_.element(node.production->owner);
        int id = static_cast<int>(graph_.nodes.size());
        graph_.nodes.push_back({id, element.name, {node.begin, node.end}, {}});

        std::map<std::string, Field> fields;
        std::map<std::string, std::string> id_texts;
        fill_fields(node, fields, id_texts);

        AsgNode& out = graph_.nodes[static_cast<std::size_t>(id)];
        for (const Member& m : element.members) {
            bool is_list = m.maximum != 1;
            auto it = fields.find(m.name);
            if (it == fields.end()) {
                if (is_list) out.fields.emplace_back(m.name, Field{true, {}});
                continue;  // absent optional member
            }
            it->second.is_list = is_list;
            out.fields.emplace_back(m.name, std::move(it->second));
        }

        if (!element.id_members.empty()) {
            std::vector<std::string> key;
            for (const Member& m : element.members)
                if (std::count(element.id_members.begin(), element.id_members.end(),
                               m.name))
                    key.push_back(id_texts[m.name]);
            auto [it, inserted] = table_.entries.emplace(
                std::make_pair(element.name, key), id);
            if (!inserted) {
                auto dup = std::find_if(table_.duplicates.begin(), table_.duplicates.end(),
                                        [&](const SymbolTable::Duplicate& d) {
                                            return d.type == element.name && d.key == key;
                                        });
                if (dup == table_.duplicates.end()) {
                    table_.duplicates.push_back(
                        {element.name, key, {it->second, id}});
                } else {
                    dup->node_ids.push_back(id);
                }
            }
        }
        return id;
    }

    // Walks one production's children, accumulating member values; descends
    // into repetition and free-order auxiliaries.
    void fill_fields(const ParseTree::Node& node, std::map<std::string, Field>& fields,
                     std::map<std::string, std::string>& id_texts) {
        const Production& prod = *node.production;
        const ElementModel& element = model_.element(prod.owner);
        for (std::size_t i = 0; i < node.children.size(); ++i) {
            const RhsRole& role = prod.roles[i];
            const ParseTree::Node& child = node.children[i];
            switch (role.kind) {
                case RoleKind::literal:
                    break;
                case RoleKind::member:
                case RoleKind::item: {
                    const Member* m = element.find_member(role.member);
                    if (!m)
                        throw Error(ErrorCode::MalformedElement,
                                    "role names unknown member " + role.member);
                    append_member_value(*m, child, fields, id_texts);
                    break;
                }
                case RoleKind::group:
                case RoleKind::recurse:
                    fill_fields(child, fields, id_texts);
                    break;
                default:
                    throw Error(ErrorCode::MalformedElement,
                                "unexpected role during instantiation");
            }
        }
    }

    void append_member_value(const Member& m, const ParseTree::Node& child,
                             std::map<std::string, Field>& fields,
                             std::map<std::string, std::string>& id_texts) {
        // The child may itself be a cardinality auxiliary; flatten it.
        if (child.production &&
            child.production->origin == ProductionOrigin::repetition) {
            fill_fields(child, fields, id_texts);
            return;
        }

        FieldItem item = unit_value(m, child);
        if (const std::string* s = std::get_if<std::string>(&item))
            id_texts[m.name] = *s;
        else if (std::get_if<int>(&item))
            id_texts[m.name] = value_text(child);
        fields[m.name].items.push_back(std::move(item));
    }

    FieldItem unit_value(const Member& m, const ParseTree::Node& child) {
        if (m.is_reference) return make_ref_slot(child);
        WalkValue v = walk(child);
        if (const BasicValue* b = std::get_if<BasicValue>(&v)) {
            const ElementModel& target = model_.element(m.element_type);
            if (target.kind == ElementKind::basic) return b->lexeme;
            return materialize(*b, {child.begin, child.end});
        }
        if (const int* id = std::get_if<int>(&v)) return *id;
        return std::get<RefSlot>(v);
    }

    RefSlot make_ref_slot(const ParseTree::Node& node) {
        RefSlot slot;
        slot.target_type = node.production->owner;
        slot.span = {node.begin, node.end};
        for (std::size_t i = 0; i < node.children.size(); ++i)
            if (node.production->roles[i].kind == RoleKind::id_member)
                slot.key.push_back(value_text(node.children[i]));
        return slot;
    }

    int materialize(const BasicValue& value, SourceSpan span) {
        const ElementModel& element = model_.element(value.type);
        int id = static_cast<int>(graph_.nodes.size());
        AsgNode node{id, value.type, span, {}};
        node.fields.emplace_back(element.pattern ? element.pattern->value_binding : "value",
                                 Field{false, {value.lexeme}});
        graph_.nodes.push_back(std::move(node));
        return id;
    }

    const ParseTree& tree_;
    const ModelSet& model_;
    InstanceGraph graph_;
    SymbolTable table_;
};

std::string join_key(const std::vector<std::string>& key) {
    std::string out;
    for (const std::string& k : key) {
        if (!out.empty()) out += ' ';
        out += k;
    }
    return out;
}

}  // namespace

std::pair<InstanceGraph, SymbolTable> build_instances(const ParseTree& tree,
                                                      const ModelSet& model) {
    return Instantiator(tree, model).run();
}

void resolve_references(InstanceGraph& graph, const SymbolTable& table) {
    for (const SymbolTable::Duplicate& dup : table.duplicates)
        graph.warnings.push_back("duplicate identifier '" + join_key(dup.key) + "' for " +
                                 dup.type + " (" + std::to_string(dup.node_ids.size()) +
                                 " definitions); first definition wins");

    for (AsgNode& node : graph.nodes) {
        for (auto& [name, field] : node.fields) {
            for (FieldItem& item : field.items) {
                RefSlot* slot = std::get_if<RefSlot>(&item);
                if (!slot) continue;
                auto it = table.entries.find(std::make_pair(slot->target_type, slot->key));
                if (it == table.entries.end())
                    throw Error(ErrorCode::UnresolvedReference,
                                "unresolved reference to " + slot->target_type + " '" +
                                    join_key(slot->key) + "'",
                                slot->span);
                slot->resolved_to = it->second;
            }
        }
    }
}

ConstraintReport check_constraints(const InstanceGraph& graph, const ModelSet& model,
                                   const ConstraintRegistry& registry) {
    ConstraintReport report;
    std::set<int> visited;
    std::vector<int> stack;
    if (graph.root >= 0) stack.push_back(graph.root);

    while (!stack.empty()) {
        int id = stack.back();
        stack.pop_back();
        if (!visited.insert(id).second) continue;
        const AsgNode& node = graph.node(id);

        const ElementModel* element = model.find(node.type);
        if (element) {
            for (const std::string& name : element->constraints) {
                const ConstraintFn* fn = registry.find(name);
                if (!fn) {
                    report.failures.push_back({name, node.type, id, node.span,
                                               "constraint hook is not registered"});
                    continue;
                }
                if (auto message = (*fn)(node, graph))
                    report.failures.push_back({name, node.type, id, node.span,
                                               std::move(*message)});
            }
        }

        // Children pushed in reverse so traversal order is field order.
        std::vector<int> next;
        for (const auto& [name, field] : node.fields) {
            for (const FieldItem& item : field.items) {
                if (const int* child = std::get_if<int>(&item)) next.push_back(*child);
                if (const RefSlot* slot = std::get_if<RefSlot>(&item))
                    if (slot->resolved_to) next.push_back(*slot->resolved_to);
            }
        }
        for (auto it = next.rbegin(); it != next.rend(); ++it) stack.push_back(*it);
    }
    return report;
}

std::string asg_to_json(const InstanceGraph& graph) {
    using json = nlohmann::ordered_json;
    json out;
    out["root"] = graph.root;
    out["nodes"] = json::array();
    for (const AsgNode& node : graph.nodes) {
        json jn;
        jn["id"] = node.id;
        jn["type"] = node.type;
        jn["span"] = {node.span.begin, node.span.end};
        json jf = json::object();
        for (const auto& [name, field] : node.fields) {
            auto encode = [](const FieldItem& item) -> json {
                if (const std::string* s = std::get_if<std::string>(&item)) return *s;
                if (const int* id = std::get_if<int>(&item)) return *id;
                const RefSlot& slot = std::get<RefSlot>(item);
                json jr;
                jr["ref"] = slot.resolved_to ? json(*slot.resolved_to) : json(nullptr);
                return jr;
            };
            if (field.is_list) {
                json arr = json::array();
                for (const FieldItem& item : field.items) arr.push_back(encode(item));
                jf[name] = arr;
            } else {
                jf[name] = encode(field.items.at(0));
            }
        }
        jn["fields"] = jf;
        out["nodes"].push_back(jn);
    }
    out["warnings"] = graph.warnings;
    return out.dump(2) + "\n";
}

std::string asg_to_dot(const InstanceGraph& graph) {
    std::ostringstream os;
    os << "digraph asg {\n  node [shape=box];\n";
    for (const AsgNode& node : graph.nodes) {
        os << "  n" << node.id << " [label=\"" << node.id << ": " << node.type;
        for (const auto& [name, field] : node.fields)
            for (const FieldItem& item : field.items)
                if (const std::string* s = std::get_if<std::string>(&item))
                    os << "\\n" << name << "=" << *s;
        os << "\"];\n";
    }
    for (const AsgNode& node : graph.nodes) {
        for (const auto& [name, field] : node.fields) {
            for (const FieldItem& item : field.items) {
                if (const int* child = std::get_if<int>(&item))
                    os << "  n" << node.id << " -> n" << *child << " [label=\"" << name
                       << "\"];\n";
                if (const RefSlot* slot = std::get_if<RefSlot>(&item))
                    if (slot->resolved_to)
                        os << "  n" << node.id << " -> n" << *slot->resolved_to
                           << " [style=dashed, label=\"ref\"];\n";
            }
        }
    }
    os << "}\n";
    return os.str();
}

}  // namespace asgkit
