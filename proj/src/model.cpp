#include "asgkit/model.hpp"

#include <algorithm>
#include <regex>
#include <set>

namespace asgkit {

LineCol line_col_at(const std::string& text, std::size_t offset) {
    LineCol lc;
    for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++lc.line;
            lc.column = 1;
        } else {
            ++lc.column;
        }
    }
    return lc;
}

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::UnknownType: return "E301";
        case ErrorCode::DuplicateElementName: return "E302";
        case ErrorCode::MalformedElement: return "E303";
        case ErrorCode::ModelFileError: return "E304";
        case ErrorCode::LexError: return "E101";
        case ErrorCode::SyntaxError: return "E102";
        case ErrorCode::AmbiguityError: return "E103";
        case ErrorCode::FreeOrderTooLarge: return "E305";
        case ErrorCode::UnresolvedReference: return "E201";
        case ErrorCode::ConstraintViolation: return "E202";
        case ErrorCode::NextOutsideInvocation: return "E203";
        case ErrorCode::NegativeParam: return "E204";
        case ErrorCode::EvalError: return "E205";
        case ErrorCode::IoError: return "E401";
    }
    return "E000";
}

const Member* ElementModel::find_member(std::string_view member_name) const {
    for (const Member& m : members)
        if (m.name == member_name) return &m;
    return nullptr;
}

const ElementModel* ModelSet::find(std::string_view name) const {
    auto it = index_.find(std::string(name));
    return it == index_.end() ? nullptr : &elements_[it->second];
}

const ElementModel& ModelSet::element(std::string_view name) const {
    const ElementModel* e = find(name);
    if (!e) throw Error(ErrorCode::UnknownType, "unknown element: " + std::string(name));
    return *e;
}

std::size_t ValidationReport::error_count() const {
    return static_cast<std::size_t>(
        std::count_if(issues.begin(), issues.end(),
                      [](const ValidationIssue& i) { return i.is_error; }));
}

namespace {

bool is_identifier(const std::string& s) {
    if (s.empty()) return false;
    if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_') return false;
    return std::all_of(s.begin(), s.end(), [](unsigned char c) {
        return std::isalnum(c) || c == '_';
    });
}

void check_shape(const ElementModel& e) {
    auto malformed = [&](const std::string& why) {
        throw Error(ErrorCode::MalformedElement, "element '" + e.name + "': " + why);
    };
    if (!is_identifier(e.name)) malformed("name is not an identifier");
    for (const Member& m : e.members)
        if (!is_identifier(m.name)) malformed("member name '" + m.name + "' is not an identifier");
    switch (e.kind) {
        case ElementKind::composite:
            if (!e.alternatives.empty()) malformed("composite with alternatives");
            if (e.pattern) malformed("composite with pattern");
            // A composite with no members is a keyword marker; it must still
            // have concrete syntax of its own.
            if (e.members.empty() && e.prefixes.empty() && e.suffixes.empty())
                malformed("composite with neither members nor delimiters");
            break;
        case ElementKind::selection:
            if (!e.members.empty()) malformed("selection with members");
            if (e.pattern) malformed("selection with pattern");
            if (e.alternatives.empty()) malformed("selection with no alternatives");
            break;
        case ElementKind::basic:
            if (!e.members.empty() || !e.alternatives.empty())
                malformed("basic element with members or alternatives");
            if (!e.pattern) malformed("basic element without pattern");
            break;
    }
}

}  // namespace

ModelSet build_model(std::vector<ElementModel> definitions, std::string start) {
    if (definitions.empty())
        throw Error(ErrorCode::MalformedElement, "empty model definition set");

    ModelSet set;
    set.elements_ = std::move(definitions);
    set.start_ = std::move(start);

    for (std::size_t i = 0; i < set.elements_.size(); ++i) {
        const ElementModel& e = set.elements_[i];
        check_shape(e);
        if (!set.index_.emplace(e.name, i).second)
            throw Error(ErrorCode::DuplicateElementName,
                        "duplicate element name: " + e.name);
    }

    auto require = [&](const std::string& name, const std::string& where) {
        if (!set.index_.count(name))
            throw Error(ErrorCode::UnknownType,
                        "unknown element type '" + name + "' referenced by " + where);
    };
    for (const ElementModel& e : set.elements_) {
        for (const Member& m : e.members)
            require(m.element_type, e.name + "." + m.name);
        for (const std::string& alt : e.alternatives)
            require(alt, "selection " + e.name);
    }
    require(set.start_, "start designation");
    return set;
}

ValidationReport validate_model(const ModelSet& model) {
    ValidationReport report;
    auto issue = [&](IssueCode code, bool is_error, const std::string& element,
                     const std::string& member, std::string message) {
        report.issues.push_back({code, is_error, element, member, std::move(message)});
    };

    for (const ElementModel& e : model.elements()) {
        // Cardinality sanity per member.
        for (const Member& m : e.members) {
            int min = m.optional ? 0 : m.minimum;
            if (m.maximum != kUnbounded && min > m.maximum)
                issue(IssueCode::BadCardinality, true, e.name, m.name,
                      "minimum exceeds maximum");
            if (m.minimum < 0)
                issue(IssueCode::BadCardinality, true, e.name, m.name,
                      "negative minimum");
            if (m.is_reference) {
                const ElementModel* target = model.find(m.element_type);
                if (target && target->id_members.empty())
                    issue(IssueCode::ReferenceWithoutId, true, e.name, m.name,
                          "@Reference to '" + m.element_type +
                              "', which has no @ID members");
            }
            if (!m.free_order_group.empty() &&
                (m.maximum != 1 || (m.minimum != 1 && !(m.optional || m.minimum == 0))))
                issue(IssueCode::FreeOrderMemberCardinality, true, e.name, m.name,
                      "free-order members must have cardinality 0..1 or 1..1");
        }

        // @ID members: must exist, be mandatory, and not be references.
        for (const std::string& id : e.id_members) {
            const Member* m = e.find_member(id);
            if (!m) {
                issue(IssueCode::IdMemberUnknown, true, e.name, id,
                      "@ID names a member that does not exist");
                continue;
            }
            if (m->optional || m->minimum == 0)
                issue(IssueCode::IdOptionalConflict, true, e.name, id,
                      "@ID member may not be @Optional or have minimum 0");
            if (m->is_reference)
                issue(IssueCode::IdMemberIsReference, true, e.name, id,
                      "@ID member may not itself be a @Reference");
        }

        // Free-order groups must be contiguous runs.
        std::set<std::string> closed;
        std::string open;
        for (const Member& m : e.members) {
            if (m.free_order_group != open) {
                if (!open.empty()) closed.insert(open);
                open = m.free_order_group;
                if (!open.empty() && closed.count(open))
                    issue(IssueCode::FreeOrderNotContiguous, true, e.name, m.name,
                          "free-order group '" + open + "' is not contiguous");
            }
        }

        // Basic patterns must compile and must not accept the empty string.
        if (e.kind == ElementKind::basic) {
            const PatternSpec& p = *e.pattern;
            if (p.regex.empty()) {
                issue(IssueCode::BadPattern, true, e.name, "", "empty pattern");
            } else {
                try {
                    std::regex re(p.regex);
                    if (std::regex_match(std::string(), re))
                        issue(IssueCode::BadPattern, true, e.name, "",
                              "pattern accepts the empty string");
                } catch (const std::regex_error& ex) {
                    issue(IssueCode::BadPattern, true, e.name, "",
                          std::string("pattern does not compile: ") + ex.what());
                }
            }
        }
    }

    // Reachability from the start element (warning only).
    std::set<std::string> reachable;
    std::vector<std::string> work{model.start()};
    while (!work.empty()) {
        std::string name = std::move(work.back());
        work.pop_back();
        if (!reachable.insert(name).second) continue;
        const ElementModel* e = model.find(name);
        if (!e) continue;
        for (const Member& m : e->members) work.push_back(m.element_type);
        for (const std::string& alt : e->alternatives) work.push_back(alt);
    }
    for (const ElementModel& e : model.elements())
        if (!reachable.count(e.name))
            report.issues.push_back({IssueCode::UnreachableElement, false, e.name, "",
                                     "element is not reachable from the start element"});

    return report;
}

}  // namespace asgkit
