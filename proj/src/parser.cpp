#include "asgkit/parser.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace asgkit {

namespace {

// Interned-symbol view of the grammar plus dense lattice positions.
struct ParseContext {
    const Grammar& grammar;
    const TokenLattice& lattice;

    std::vector<std::string> sym_names;
    std::unordered_map<std::string, int> sym_ids;
    std::vector<bool> sym_is_token;

    struct Prod {
        int lhs;
        std::vector<int> rhs;
        const Production* source;
    };
    std::vector<Prod> prods;
    std::unordered_map<int, std::vector<int>> prods_by_lhs;

    std::vector<std::size_t> positions;  // sorted dense chart positions
    std::unordered_map<std::size_t, int> position_index;

    struct EdgeOut {
        int symbol;
        int to;  // dense index
        std::size_t begin, end;
        const std::string* lexeme;
    };
    std::vector<std::vector<EdgeOut>> edges_from;

    int start_sym = -1;

    int intern(const std::string& name, bool is_token) {
        auto it = sym_ids.find(name);
        if (it != sym_ids.end()) return it->second;
        int id = static_cast<int>(sym_names.size());
        sym_ids.emplace(name, id);
        sym_names.push_back(name);
        sym_is_token.push_back(is_token);
        return id;
    }

    explicit ParseContext(const Grammar& g, const TokenLattice& l)
        : grammar(g), lattice(l) {
        for (const Production& p : g.productions) {
            Prod prod;
            prod.lhs = intern(p.lhs, false);
            for (const std::string& s : p.rhs) prod.rhs.push_back(intern(s, g.is_token(s)));
            prod.source = &p;
            prods_by_lhs[prod.lhs].push_back(static_cast<int>(prods.size()));
            prods.push_back(std::move(prod));
        }
        start_sym = intern(g.start_symbol, g.is_token(g.start_symbol));

        std::set<std::size_t> pos_set;
        pos_set.insert(l.skip_ws(0));
        pos_set.insert(l.input.size());
        for (const TokenEdge& e : l.edges) {
            pos_set.insert(e.begin);
            pos_set.insert(l.skip_ws(e.end));
        }
        for (std::size_t p : pos_set) {
            position_index.emplace(p, static_cast<int>(positions.size()));
            positions.push_back(p);
        }

        edges_from.resize(positions.size());
        for (const TokenEdge& e : l.edges) {
            auto sym_it = sym_ids.find(e.symbol);
            if (sym_it == sym_ids.end()) continue;  // token unused by the grammar
            int from = position_index.at(e.begin);
            int to = position_index.at(l.skip_ws(e.end));
            edges_from[from].push_back({sym_it->second, to, e.begin, e.end, &e.lexeme});
        }
    }
};

struct Item {
    int prod;
    int dot;
    int origin;

    bool operator==(const Item&) const = default;
};

struct ItemHash {
    std::size_t operator()(const Item& it) const {
        return std::hash<long long>()((static_cast<long long>(it.prod) << 40) ^
                                      (static_cast<long long>(it.dot) << 24) ^ it.origin);
    }
};

class EarleyRun {
public:
    explicit EarleyRun(const ParseContext& ctx) : ctx_(ctx) {
        chart_.resize(ctx.positions.size());
        seen_.resize(ctx.positions.size());
        empty_done_.resize(ctx.positions.size());
        recognize();
    }

    // All completed spans, for forest reconstruction.
    const std::vector<int>* completed_ends(int symbol, int from) const {
        auto it = completed_.find(key(symbol, from));
        return it == completed_.end() ? nullptr : &it->second;
    }

    bool accepted() const {
        const std::vector<int>* ends = completed_ends(ctx_.start_sym, 0);
        int last = static_cast<int>(ctx_.positions.size()) - 1;
        return ends && std::find(ends->begin(), ends->end(), last) != ends->end();
    }

    [[noreturn]] void throw_syntax_error() const {
        int furthest = 0;
        for (int p = 0; p < static_cast<int>(chart_.size()); ++p)
            if (!chart_[p].empty()) furthest = p;
        std::set<std::string> expected;
        for (const Item& it : chart_[furthest]) {
            const auto& prod = ctx_.prods[it.prod];
            if (it.dot < static_cast<int>(prod.rhs.size()) &&
                ctx_.sym_is_token[prod.rhs[it.dot]])
                expected.insert(ctx_.sym_names[prod.rhs[it.dot]]);
        }
        std::size_t offset = ctx_.positions[furthest];
        LineCol lc = line_col_at(ctx_.lattice.input, offset);
        std::ostringstream os;
        os << "syntax error at line " << lc.line << ", column " << lc.column;
        if (offset >= ctx_.lattice.input.size()) os << " (end of input)";
        if (!expected.empty()) {
            os << ": expected ";
            bool first = true;
            for (const std::string& s : expected) {
                if (!first) os << ", ";
                os << s;
                first = false;
            }
        }
        throw Error(ErrorCode::SyntaxError, os.str(), {offset, offset});
    }

private:
    static long long key(int symbol, int from) {
        return (static_cast<long long>(symbol) << 24) | from;
    }

    void add(int pos, Item item) {
        if (!seen_[pos].insert(item).second) return;
        chart_[pos].push_back(item);
        const auto& prod = ctx_.prods[item.prod];
        // An already-found empty completion must advance items added later.
        if (item.dot < static_cast<int>(prod.rhs.size())) {
            int next = prod.rhs[item.dot];
            if (!ctx_.sym_is_token[next] && empty_done_[pos].count(next))
                add(pos, {item.prod, item.dot + 1, item.origin});
        }
    }

    void recognize() {
        auto start_it = ctx_.prods_by_lhs.find(ctx_.start_sym);
        if (start_it != ctx_.prods_by_lhs.end())
            for (int p : start_it->second) add(0, {p, 0, 0});

        for (int pos = 0; pos < static_cast<int>(chart_.size()); ++pos) {
            for (std::size_t i = 0; i < chart_[pos].size(); ++i) {
                Item item = chart_[pos][i];
                const auto& prod = ctx_.prods[item.prod];
                if (item.dot == static_cast<int>(prod.rhs.size())) {
                    complete(pos, item, prod.lhs);
                } else {
                    int sym = prod.rhs[item.dot];
                    if (ctx_.sym_is_token[sym]) {
                        for (const auto& edge : ctx_.edges_from[pos])
                            if (edge.symbol == sym)
                                add(edge.to, {item.prod, item.dot + 1, item.origin});
                    } else {
                        auto it = ctx_.prods_by_lhs.find(sym);
                        if (it != ctx_.prods_by_lhs.end())
                            for (int p : it->second) add(pos, {p, 0, pos});
                    }
                }
            }
        }
    }

    void complete(int pos, Item item, int lhs) {
        auto& ends = completed_[key(lhs, item.origin)];
        if (std::find(ends.begin(), ends.end(), pos) == ends.end()) ends.push_back(pos);
        if (item.origin == pos) empty_done_[pos].insert(lhs);
        // Snapshot by index; items added during this loop are handled by the
        // empty-completion check in add().
        auto& origin_chart = chart_[item.origin];
        for (std::size_t i = 0; i < origin_chart.size(); ++i) {
            Item waiting = origin_chart[i];
            const auto& wprod = ctx_.prods[waiting.prod];
            if (waiting.dot < static_cast<int>(wprod.rhs.size()) &&
                wprod.rhs[waiting.dot] == lhs)
                add(pos, {waiting.prod, waiting.dot + 1, waiting.origin});
        }
    }

    const ParseContext& ctx_;
    std::vector<std::vector<Item>> chart_;
    std::vector<std::unordered_set<Item, ItemHash>> seen_;
    std::vector<std::unordered_set<int>> empty_done_;
    std::unordered_map<long long, std::vector<int>> completed_;
};

class ForestBuilder {
public:
    ForestBuilder(const ParseContext& ctx, const EarleyRun& run,
                  std::deque<ForestNode>& pool)
        : ctx_(ctx), run_(run), pool_(pool) {}

    // Returns the unique packed node for (symbol, span).  The node is
    // allocated and memoized before its derivations are computed, so the
    // derivation lists are complete regardless of which parent asked first.
    // Every candidate child comes straight from the recognizer's completion
    // table, which already proves the child span is derivable; a child that
    // is itself mid-construction is linked by pointer without recursing, so
    // a cyclic grammar yields a cyclic forest rather than an infinite loop.
    const ForestNode* build(int symbol, int from, int to) {
        long long k = key(symbol, from, to);
        auto it = memo_.find(k);
        if (it != memo_.end()) return it->second;

        ForestNode& node = pool_.emplace_back();
        node.symbol = ctx_.sym_names[symbol];
        node.begin = ctx_.positions[from];
        node.end = ctx_.positions[to];
        memo_.emplace(k, &node);
        on_path_.insert(k);

        auto pit = ctx_.prods_by_lhs.find(symbol);
        if (pit != ctx_.prods_by_lhs.end()) {
            for (int prod_index : pit->second) {
                std::vector<ForestChild> children;
                match(ctx_.prods[prod_index], 0, from, to, children,
                      node.derivations);
            }
        }

        on_path_.erase(k);
        return &node;
    }

private:
    static long long key(int symbol, int from, int to) {
        return (static_cast<long long>(symbol) << 40) |
               (static_cast<long long>(from) << 20) | to;
    }

    void match(const ParseContext::Prod& prod, std::size_t r, int pos, int to,
               std::vector<ForestChild>& children, std::vector<Derivation>& out) {
        if (r == prod.rhs.size()) {
            if (pos == to) out.push_back({prod.source, children});
            return;
        }
        int sym = prod.rhs[r];
        if (ctx_.sym_is_token[sym]) {
            for (const auto& edge : ctx_.edges_from[pos]) {
                if (edge.symbol != sym || edge.to > to) continue;
                children.push_back(TokenLeaf{ctx_.sym_names[sym], *edge.lexeme,
                                             edge.begin, edge.end});
                match(prod, r + 1, edge.to, to, children, out);
                children.pop_back();
            }
        } else {
            const std::vector<int>* ends = run_.completed_ends(sym, pos);
            if (!ends) return;
            std::vector<int> sorted_ends(*ends);
            std::sort(sorted_ends.begin(), sorted_ends.end());
            for (int q : sorted_ends) {
                if (q > to) continue;
                long long ck = key(sym, pos, q);
                const ForestNode* child;
                if (auto mit = memo_.find(ck); mit != memo_.end()) {
                    child = mit->second;
                    // A finished node without derivations is unusable; one
                    // still being expanded will be completed by then.
                    if (on_path_.count(ck) == 0 && child->derivations.empty())
                        continue;
                } else {
                    child = build(sym, pos, q);
                    if (child->derivations.empty()) continue;
                }
                children.push_back(child);
                match(prod, r + 1, q, to, children, out);
                children.pop_back();
            }
        }
    }

    const ParseContext& ctx_;
    const EarleyRun& run_;
    std::deque<ForestNode>& pool_;
    std::unordered_map<long long, const ForestNode*> memo_;
    std::unordered_set<long long> on_path_;
};

}  // namespace

ParseForest parse(const Grammar& grammar, const TokenLattice& lattice) {
    ParseContext ctx(grammar, lattice);
    EarleyRun run(ctx);
    if (!run.accepted()) run.throw_syntax_error();

    ParseForest forest;
    forest.input_ = lattice.input;
    ForestBuilder builder(ctx, run, forest.pool_);
    const ForestNode* root =
        builder.build(ctx.start_sym, 0, static_cast<int>(ctx.positions.size()) - 1);
    if (!root || root->derivations.empty()) run.throw_syntax_error();
    forest.root_ = root;
    return forest;
}

namespace {

struct DisambiguationState {
    // Survivors per packed node plus the node's effective owners (selection
    // chains unwrapped), computed bottom-up.
    std::unordered_map<const ForestNode*, std::vector<const Derivation*>> survivors;
    std::unordered_map<const ForestNode*, std::set<std::string>> owners;
};

std::set<std::string> effective_owners(const ForestNode* node,
                                       const DisambiguationState& state) {
    auto it = state.owners.find(node);
    return it == state.owners.end() ? std::set<std::string>{} : it->second;
}

bool child_is_nested(const ForestChild& child, const std::string& owner,
                     const DisambiguationState& state) {
    const ForestNode* const* n = std::get_if<const ForestNode*>(&child);
    return n && effective_owners(*n, state).count(owner) != 0;
}

std::size_t child_span(const ForestChild& child) {
    if (const ForestNode* const* n = std::get_if<const ForestNode*>(&child))
        return (*n)->end - (*n)->begin;
    return 0;
}

void filter_node(const ForestNode& node, DisambiguationState& state) {
    std::vector<const Derivation*> alts;
    for (const Derivation& d : node.derivations) alts.push_back(&d);

    // 1. Priority: the tighter-binding (higher-priority) element is pushed
    // deeper, so the minimum priority wins at the packed node.
    if (alts.size() > 1) {
        int best = alts[0]->production->disambiguation.priority;
        for (const Derivation* d : alts)
            best = std::min(best, d->production->disambiguation.priority);
        std::erase_if(alts, [&](const Derivation* d) {
            return d->production->disambiguation.priority > best;
        });
    }

    // 2. Associativity: a left-associative element may not reappear in any
    // recursive slot other than the leftmost one (and symmetrically).
    if (alts.size() > 1) {
        auto violates = [&](const Derivation* d) {
            Assoc assoc = d->production->disambiguation.associativity;
            if (assoc == Assoc::none) return false;
            const std::string& owner = d->production->owner;
            const auto& rhs = d->production->rhs;
            for (std::size_t i = 0; i < d->children.size(); ++i) {
                if (!child_is_nested(d->children[i], owner, state)) continue;
                bool bad = false;
                if (assoc == Assoc::left) {
                    for (std::size_t j = 0; j < i && !bad; ++j)
                        if (rhs[j] == rhs[i]) bad = true;
                } else {
                    for (std::size_t j = i + 1; j < rhs.size() && !bad; ++j)
                        if (rhs[j] == rhs[i]) bad = true;
                }
                if (bad) return true;
            }
            return false;
        };
        std::vector<const Derivation*> kept;
        for (const Derivation* d : alts)
            if (!violates(d)) kept.push_back(d);
        if (!kept.empty()) alts = std::move(kept);
    }

    // 3. Composition: among same-owner alternatives, eager prefers the widest
    // nested composite, lazy the narrowest.
    if (alts.size() > 1) {
        bool same_owner = std::all_of(alts.begin(), alts.end(), [&](const Derivation* d) {
            return d->production->owner == alts[0]->production->owner;
        });
        if (same_owner) {
            Composition comp = alts[0]->production->disambiguation.composition;
            auto nested_span = [&](const Derivation* d) {
                std::size_t span = 0;
                for (const ForestChild& c : d->children)
                    if (child_is_nested(c, d->production->owner, state))
                        span = std::max(span, child_span(c));
                return span;
            };
            std::size_t best = nested_span(alts[0]);
            for (const Derivation* d : alts) {
                std::size_t s = nested_span(d);
                best = comp == Composition::eager ? std::max(best, s) : std::min(best, s);
            }
            std::erase_if(alts, [&](const Derivation* d) { return nested_span(d) != best; });
        }
    }

    std::set<std::string> owners;
    for (const Derivation* d : alts) {
        if (d->production->origin == ProductionOrigin::selection_alt) {
            for (const ForestChild& c : d->children)
                if (const ForestNode* const* n = std::get_if<const ForestNode*>(&c)) {
                    auto sub = effective_owners(*n, state);
                    owners.insert(sub.begin(), sub.end());
                }
        } else {
            owners.insert(d->production->owner);
        }
    }
    state.owners[&node] = std::move(owners);
    state.survivors[&node] = std::move(alts);
}

ParseTree::Node extract(const ForestNode* node, const DisambiguationState& state,
                        std::set<const ForestNode*>& path) {
    if (!path.insert(node).second)
        throw Error(ErrorCode::AmbiguityError,
                    "cyclic derivation for " + node->symbol +
                        ": the grammar derives this span through itself",
                    {node->begin, node->end});
    const auto& alts = state.survivors.at(node);
    if (alts.size() != 1) {
        std::ostringstream os;
        os << "ambiguous parse: " << node->symbol << " [" << node->begin << ".."
           << node->end << ") has " << alts.size() << " readings (owners:";
        for (const Derivation* d : alts) os << ' ' << d->production->owner;
        os << ")";
        throw Error(ErrorCode::AmbiguityError, os.str(), {node->begin, node->end});
    }
    const Derivation* d = alts.front();
    ParseTree::Node out;
    out.production = d->production;
    out.symbol = node->symbol;
    out.begin = node->begin;
    out.end = node->end;
    for (const ForestChild& c : d->children) {
        if (const ForestNode* const* child = std::get_if<const ForestNode*>(&c)) {
            out.children.push_back(extract(*child, state, path));
        } else {
            const TokenLeaf& leaf = std::get<TokenLeaf>(c);
            ParseTree::Node t;
            t.symbol = leaf.symbol;
            t.lexeme = leaf.lexeme;
            t.begin = leaf.begin;
            t.end = leaf.end;
            out.children.push_back(std::move(t));
        }
    }
    path.erase(node);
    return out;
}

}  // namespace

namespace {

// Post-order walk from the root so children are filtered before parents
// (the builder's pool is not in bottom-up order).
void filter_bottom_up(const ForestNode* node, DisambiguationState& state,
                      std::set<const ForestNode*>& done) {
    if (!done.insert(node).second) return;
    for (const Derivation& d : node->derivations)
        for (const ForestChild& c : d.children)
            if (const ForestNode* const* child = std::get_if<const ForestNode*>(&c))
                filter_bottom_up(*child, state, done);
    filter_node(*node, state);
}

}  // namespace

ParseTree disambiguate(const ParseForest& forest, const Grammar&) {
    DisambiguationState state;
    std::set<const ForestNode*> done;
    filter_bottom_up(forest.root(), state, done);

    ParseTree tree;
    tree.input = forest.input();
    std::set<const ForestNode*> path;
    tree.root = extract(forest.root(), state, path);
    return tree;
}

namespace {

unsigned long long count_node(
    const ForestNode* node,
    std::unordered_map<const ForestNode*, unsigned long long>& memo) {
    auto it = memo.find(node);
    if (it != memo.end()) return it->second;
    // Seed 0 so a cyclic forest contributes nothing for the re-entered node:
    // only trees that never revisit a packed node along a path are counted,
    // which keeps the count finite for cyclic grammars.
    memo.emplace(node, 0);
    unsigned long long total = 0;
    for (const Derivation& d : node->derivations) {
        unsigned long long combo = 1;
        for (const ForestChild& c : d.children)
            if (const ForestNode* const* child = std::get_if<const ForestNode*>(&c))
                combo *= count_node(*child, memo);
        total += combo;
    }
    memo[node] = total;
    return total;
}

}  // namespace

unsigned long long count_trees(const ParseForest& forest) {
    std::unordered_map<const ForestNode*, unsigned long long> memo;
    return count_node(forest.root(), memo);
}

namespace {

void describe_child(std::ostringstream& os, const ForestChild& c) {
    if (const ForestNode* const* n = std::get_if<const ForestNode*>(&c))
        os << (*n)->symbol << "[" << (*n)->begin << ".." << (*n)->end << ")";
    else
        os << "'" << std::get<TokenLeaf>(c).lexeme << "'";
}

}  // namespace

std::string dump_forest(const ParseForest& forest) {
    std::ostringstream os;
    for (const ForestNode& node : forest.nodes()) {
        os << node.symbol << " [" << node.begin << ".." << node.end << ")";
        if (&node == forest.root()) os << " <root>";
        os << "\n";
        for (const Derivation& d : node.derivations) {
            os << "  =";
            if (d.children.empty()) os << " <empty>";
            for (const ForestChild& c : d.children) {
                os << ' ';
                describe_child(os, c);
            }
            os << " # owner=" << d.production->owner << "\n";
        }
    }
    return os.str();
}

namespace {

void dump_tree_node(std::ostringstream& os, const ParseTree::Node& node, int depth) {
    for (int i = 0; i < depth; ++i) os << "  ";
    if (node.production)
        os << node.symbol << " [" << node.begin << ".." << node.end << ")\n";
    else
        os << node.symbol << " \"" << node.lexeme << "\"\n";
    for (const ParseTree::Node& c : node.children) dump_tree_node(os, c, depth + 1);
}

}  // namespace

std::string dump_tree(const ParseTree& tree) {
    std::ostringstream os;
    dump_tree_node(os, tree.root, 0);
    return os.str();
}

}  // namespace asgkit
