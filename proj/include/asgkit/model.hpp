#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "asgkit/diagnostics.hpp"

namespace asgkit {

enum class ElementKind { composite, selection, basic };

enum class Assoc { none, left, right };
enum class Composition { eager, lazy };

struct DisambiguationSpec {
    Assoc associativity = Assoc::none;
    Composition composition = Composition::eager;
    int priority = 0;  // larger binds tighter

    bool operator==(const DisambiguationSpec&) const = default;
};

struct PatternSpec {
    std::string regex;
    std::string value_binding = "value";

    bool operator==(const PatternSpec&) const = default;
};

// Sentinel for unbounded @Maximum.
inline constexpr int kUnbounded = -1;

struct Member {
    std::string name;
    std::string element_type;
    bool optional = false;
    int minimum = 1;
    int maximum = 1;  // kUnbounded for no upper bound
    std::vector<std::string> separators;
    std::vector<std::string> prefixes;
    std::vector<std::string> suffixes;
    bool is_reference = false;
    std::string free_order_group;  // empty: not in a group

    bool operator==(const Member&) const = default;
};

struct ElementModel {
    std::string name;
    ElementKind kind = ElementKind::composite;
    std::vector<Member> members;               // composite
    std::vector<std::string> alternatives;     // selection
    std::optional<PatternSpec> pattern;        // basic
    std::vector<std::string> prefixes;
    std::vector<std::string> suffixes;
    std::vector<std::string> id_members;
    std::vector<std::string> constraints;      // registered predicate names
    DisambiguationSpec disambiguation;

    const Member* find_member(std::string_view name) const;

    bool operator==(const ElementModel&) const = default;
};

// Immutable set of element models with a designated start element.
// Built by build_model(); safe to share across threads afterwards.
class ModelSet {
public:
    const std::vector<ElementModel>& elements() const { return elements_; }
    const std::string& start() const { return start_; }

    const ElementModel* find(std::string_view name) const;
    const ElementModel& element(std::string_view name) const;

    bool operator==(const ModelSet& other) const {
        return start_ == other.start_ && elements_ == other.elements_;
    }

private:
    friend ModelSet build_model(std::vector<ElementModel> definitions,
                                std::string start);

    std::vector<ElementModel> elements_;
    std::unordered_map<std::string, std::size_t> index_;
    std::string start_;
};

enum class IssueCode {
    IdOptionalConflict,
    ReferenceWithoutId,
    UnreachableElement,
    IdMemberUnknown,
    IdMemberIsReference,
    BadCardinality,
    FreeOrderNotContiguous,
    FreeOrderMemberCardinality,
    BadPattern,
};

struct ValidationIssue {
    IssueCode code;
    bool is_error = true;  // false: warning
    std::string element;
    std::string member;
    std::string message;

    bool operator==(const ValidationIssue&) const = default;
};

struct ValidationReport {
    std::vector<ValidationIssue> issues;

    std::size_t error_count() const;
    bool ok() const { return error_count() == 0; }

    bool operator==(const ValidationReport&) const = default;
};

// Resolves all element-type names and freezes the model set.
// Throws Error{UnknownType, DuplicateElementName, MalformedElement}.
ModelSet build_model(std::vector<ElementModel> definitions, std::string start);

// Pure semantic check; the model is usable only when the report has no errors.
ValidationReport validate_model(const ModelSet& model);

}  // namespace asgkit
