#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "asgkit/model.hpp"

namespace asgkit {

// Token symbols are either literal strings ('draw') or compiled patterns
// (@Number); nonterminal symbols carry the element name they were made from.
struct TokenDef {
    bool is_literal = false;
    std::string text;  // the literal itself, or the regex source

    bool operator==(const TokenDef&) const = default;
};

enum class ProductionOrigin {
    composite,
    selection_alt,
    repetition,
    free_order_perm,
    reference,
    token_wrap,
};

const char* origin_name(ProductionOrigin origin);

// What each right-hand-side position stands for, so the instantiator can map
// parse trees back onto model members without re-deriving the synthesis rules.
enum class RoleKind {
    literal,       // element/member prefix, suffix or separator
    member,        // a member's value symbol (or its cardinality aux symbol)
    group,         // a free-order group's aux symbol
    item,          // one repetition item inside an aux production
    recurse,       // recursive tail of an unbounded repetition
    alternative,   // the chosen alternative of a selection
    token_value,   // the token of a basic element
    id_member,     // an @ID member inside a reference production
};

struct RhsRole {
    RoleKind kind = RoleKind::literal;
    std::string member;  // member or group name where applicable

    bool operator==(const RhsRole&) const = default;
};

struct Production {
    std::string lhs;
    std::vector<std::string> rhs;
    std::vector<RhsRole> roles;  // parallel to rhs
    ProductionOrigin origin = ProductionOrigin::composite;
    std::string owner;  // owning element; for selection-alt, the alternative
    DisambiguationSpec disambiguation;

    bool operator==(const Production&) const = default;
};

struct Grammar {
    std::string start_symbol;
    std::vector<Production> productions;
    std::map<std::string, TokenDef> tokens;

    bool is_token(const std::string& symbol) const { return tokens.count(symbol) != 0; }

    bool operator==(const Grammar&) const = default;
};

struct SynthOptions {
    std::size_t free_order_bound = 5;
};

inline std::string token_symbol(const std::string& element) { return "@" + element; }
inline std::string literal_symbol(const std::string& text) { return "'" + text + "'"; }
inline std::string ref_symbol(const std::string& element) { return "Ref(" + element + ")"; }

// Grammar synthesis from a validated model. Pure and deterministic.
Grammar synthesize(const ModelSet& model, const SynthOptions& options = {});

// Auxiliary productions implementing a member's cardinality.  `aux` is the
// nonterminal standing for the whole repetition and `unit` the symbol of one
// item (reference symbol when the member is a @Reference).
std::vector<Production> expand_multiplicity(const Member& member,
                                            const std::string& owner,
                                            const std::string& aux,
                                            const std::string& unit);

// One production per permutation of the group, optional members expanded
// before permuting.  Throws Error{FreeOrderTooLarge} above the bound.
std::vector<Production> permute_free_order(std::span<const Member> group,
                                           const std::string& owner,
                                           const std::string& aux,
                                           const std::vector<std::string>& unit_symbols,
                                           std::size_t bound = 5);

// `LHS ::= sym sym … # origin=…, owner=…`, one production per line, in
// element declaration order.
std::string dump_grammar(const Grammar& grammar);

}  // namespace asgkit
