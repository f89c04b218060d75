#include "asgkit/grammar.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace asgkit {

const char* origin_name(ProductionOrigin origin) {
    switch (origin) {
        case ProductionOrigin::composite: return "composite";
        case ProductionOrigin::selection_alt: return "selection-alt";
        case ProductionOrigin::repetition: return "repetition";
        case ProductionOrigin::free_order_perm: return "free-order-perm";
        case ProductionOrigin::reference: return "reference";
        case ProductionOrigin::token_wrap: return "token-wrap";
    }
    return "?";
}

namespace {

struct RhsBuilder {
    std::vector<std::string> rhs;
    std::vector<RhsRole> roles;

    void literal(const std::string& text) {
        rhs.push_back(literal_symbol(text));
        roles.push_back({RoleKind::literal, ""});
    }
    void literals(const std::vector<std::string>& texts) {
        for (const std::string& t : texts) literal(t);
    }
    void symbol(const std::string& sym, RoleKind kind, const std::string& member) {
        rhs.push_back(sym);
        roles.push_back({kind, member});
    }
};

// One item occurrence: member prefixes, the unit symbol, member suffixes.
void append_unit(RhsBuilder& b, const Member& m, const std::string& unit, RoleKind kind) {
    b.literals(m.prefixes);
    b.symbol(unit, kind, m.name);
    b.literals(m.suffixes);
}

Production make_production(std::string lhs, RhsBuilder b, ProductionOrigin origin,
                           std::string owner, DisambiguationSpec disambiguation = {}) {
    return Production{std::move(lhs), std::move(b.rhs), std::move(b.roles),
                      origin, std::move(owner), disambiguation};
}

}  // namespace

std::vector<Production> expand_multiplicity(const Member& member, const std::string& owner,
                                            const std::string& aux, const std::string& unit) {
    std::vector<Production> out;
    const int min = member.optional ? 0 : member.minimum;
    const int max = member.optional && member.maximum == 1 ? 1 : member.maximum;
    const std::vector<std::string>& seps = member.separators;

    // Fixed item count, separators interleaved, never trailing.  With several
    // alternative separators every position picks independently.
    auto emit_counted = [&](const std::string& lhs, int count,
                            const std::string& tail) {
        std::vector<RhsBuilder> partial(1);
        for (int i = 0; i < count; ++i) {
            std::vector<RhsBuilder> next;
            for (RhsBuilder& b : partial) {
                if (i == 0 || seps.empty()) {
                    RhsBuilder nb = b;
                    append_unit(nb, member, unit, RoleKind::item);
                    next.push_back(std::move(nb));
                } else {
                    for (const std::string& sep : seps) {
                        RhsBuilder nb = b;
                        nb.literal(sep);
                        append_unit(nb, member, unit, RoleKind::item);
                        next.push_back(std::move(nb));
                    }
                }
            }
            partial = std::move(next);
        }
        for (RhsBuilder& b : partial) {
            if (!tail.empty()) {
                if (seps.empty()) {
                    RhsBuilder nb = b;
                    nb.symbol(tail, RoleKind::recurse, member.name);
                    out.push_back(make_production(lhs, std::move(nb),
                                                  ProductionOrigin::repetition, owner));
                } else {
                    for (const std::string& sep : seps) {
                        RhsBuilder nb = b;
                        nb.literal(sep);
                        nb.symbol(tail, RoleKind::recurse, member.name);
                        out.push_back(make_production(lhs, std::move(nb),
                                                      ProductionOrigin::repetition, owner));
                    }
                }
            } else {
                out.push_back(make_production(lhs, std::move(b),
                                              ProductionOrigin::repetition, owner));
            }
        }
    };

    if (max != kUnbounded) {
        for (int c = min; c <= max; ++c) {
            if (c == 0)
                out.push_back(make_production(aux, RhsBuilder{},
                                              ProductionOrigin::repetition, owner));
            else
                emit_counted(aux, c, "");
        }
        return out;
    }

    // Unbounded: right-recursive one-or-more core, prefixed by the mandatory
    // items when the minimum exceeds one.
    if (min == 0) {
        // A separate one-or-more core keeps the single-item case unambiguous
        // (aux -> unit and aux -> unit aux(-> empty) must not both exist).
        const std::string more = aux + "#more";
        out.push_back(make_production(aux, RhsBuilder{},
                                      ProductionOrigin::repetition, owner));
        RhsBuilder b;
        b.symbol(more, RoleKind::recurse, member.name);
        out.push_back(make_production(aux, std::move(b),
                                      ProductionOrigin::repetition, owner));
        emit_counted(more, 1, "");
        emit_counted(more, 1, more);
    } else if (min == 1) {
        emit_counted(aux, 1, "");     // aux -> unit
        emit_counted(aux, 1, aux);    // aux -> unit sep aux
    } else {
        const std::string more = aux + "#more";
        emit_counted(aux, min - 1, more);
        emit_counted(more, 1, "");
        emit_counted(more, 1, more);
    }
    return out;
}

std::vector<Production> permute_free_order(std::span<const Member> group,
                                           const std::string& owner, const std::string& aux,
                                           const std::vector<std::string>& unit_symbols,
                                           std::size_t bound) {
    if (group.size() > bound)
        throw Error(ErrorCode::FreeOrderTooLarge,
                    "free-order group in '" + owner + "' has " +
                        std::to_string(group.size()) + " members, bound is " +
                        std::to_string(bound));

    std::vector<std::size_t> required, opt;
    for (std::size_t i = 0; i < group.size(); ++i) {
        if (group[i].optional || group[i].minimum == 0)
            opt.push_back(i);
        else
            required.push_back(i);
    }

    std::vector<Production> out;
    for (std::size_t mask = 0; mask < (std::size_t(1) << opt.size()); ++mask) {
        std::vector<std::size_t> present = required;
        for (std::size_t b = 0; b < opt.size(); ++b)
            if (mask & (std::size_t(1) << b)) present.push_back(opt[b]);
        std::sort(present.begin(), present.end());

        if (present.empty()) {
            out.push_back(make_production(aux, RhsBuilder{},
                                          ProductionOrigin::free_order_perm, owner));
            continue;
        }
        do {
            RhsBuilder b;
            for (std::size_t idx : present)
                append_unit(b, group[idx], unit_symbols[idx], RoleKind::member);
            out.push_back(make_production(aux, std::move(b),
                                          ProductionOrigin::free_order_perm, owner));
        } while (std::next_permutation(present.begin(), present.end()));
    }
    return out;
}

Grammar synthesize(const ModelSet& model, const SynthOptions& options) {
    Grammar g;
    g.start_symbol = model.start();

    auto add_literal_tokens = [&](const Production& p) {
        for (std::size_t i = 0; i < p.rhs.size(); ++i)
            if (p.roles[i].kind == RoleKind::literal) {
                const std::string& sym = p.rhs[i];
                g.tokens[sym] = TokenDef{true, sym.substr(1, sym.size() - 2)};
            }
    };
    auto push = [&](Production p) {
        add_literal_tokens(p);
        g.productions.push_back(std::move(p));
    };

    for (const ElementModel& e : model.elements()) {
        std::vector<Production> deferred;  // aux productions after the main one

        switch (e.kind) {
            case ElementKind::basic: {
                const std::string tok = token_symbol(e.name);
                g.tokens[tok] = TokenDef{false, e.pattern->regex};
                RhsBuilder b;
                b.symbol(tok, RoleKind::token_value, "");
                push(make_production(e.name, std::move(b), ProductionOrigin::token_wrap,
                                     e.name, e.disambiguation));
                break;
            }
            case ElementKind::selection: {
                for (const std::string& alt : e.alternatives) {
                    RhsBuilder b;
                    b.literals(e.prefixes);
                    b.symbol(alt, RoleKind::alternative, "");
                    b.literals(e.suffixes);
                    push(make_production(e.name, std::move(b),
                                         ProductionOrigin::selection_alt, alt,
                                         model.element(alt).disambiguation));
                }
                break;
            }
            case ElementKind::composite: {
                RhsBuilder b;
                b.literals(e.prefixes);
                for (std::size_t i = 0; i < e.members.size();) {
                    const Member& m = e.members[i];
                    if (!m.free_order_group.empty()) {
                        std::size_t j = i;
                        while (j < e.members.size() &&
                               e.members[j].free_order_group == m.free_order_group)
                            ++j;
                        const std::string aux = e.name + "." + m.free_order_group;
                        std::vector<std::string> units;
                        for (std::size_t k = i; k < j; ++k) {
                            const Member& gm = e.members[k];
                            units.push_back(gm.is_reference ? ref_symbol(gm.element_type)
                                                            : gm.element_type);
                        }
                        b.symbol(aux, RoleKind::group, m.free_order_group);
                        auto perms = permute_free_order(
                            std::span<const Member>(e.members.data() + i, j - i), e.name,
                            aux, units, options.free_order_bound);
                        deferred.insert(deferred.end(), perms.begin(), perms.end());
                        i = j;
                        continue;
                    }
                    const std::string unit =
                        m.is_reference ? ref_symbol(m.element_type) : m.element_type;
                    const int min = m.optional ? 0 : m.minimum;
                    if (min == 1 && m.maximum == 1) {
                        append_unit(b, m, unit, RoleKind::member);
                    } else {
                        const std::string aux = e.name + "." + m.name;
                        b.symbol(aux, RoleKind::member, m.name);
                        auto reps = expand_multiplicity(m, e.name, aux, unit);
                        deferred.insert(deferred.end(), reps.begin(), reps.end());
                    }
                    ++i;
                }
                b.literals(e.suffixes);
                push(make_production(e.name, std::move(b), ProductionOrigin::composite,
                                     e.name, e.disambiguation));
                break;
            }
        }

        for (Production& p : deferred) push(std::move(p));

        // Reference syntax: the @ID members in declaration order, with their
        // own prefixes and suffixes.
        if (!e.id_members.empty()) {
            RhsBuilder b;
            for (const Member& m : e.members) {
                if (std::find(e.id_members.begin(), e.id_members.end(), m.name) ==
                    e.id_members.end())
                    continue;
                append_unit(b, m, m.element_type, RoleKind::id_member);
            }
            push(make_production(ref_symbol(e.name), std::move(b),
                                 ProductionOrigin::reference, e.name, e.disambiguation));
        }
    }
    return g;
}

std::string dump_grammar(const Grammar& grammar) {
    std::ostringstream os;
    for (const Production& p : grammar.productions) {
        os << p.lhs << " ::=";
        if (p.rhs.empty()) {
            os << " <empty>";
        } else {
            for (const std::string& sym : p.rhs) os << ' ' << sym;
        }
        os << " # origin=" << origin_name(p.origin) << ", owner=" << p.owner << '\n';
    }
    return os.str();
}

}  // namespace asgkit
