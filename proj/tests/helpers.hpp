#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "asgkit/asg.hpp"
#include "asgkit/grammar.hpp"
#include "asgkit/lattice.hpp"
#include "asgkit/model.hpp"
#include "asgkit/parser.hpp"

namespace testing {

inline std::string corpus_path(const std::string& name) {
    return std::string(ASGKIT_CORPUS_DIR) + "/" + name;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

// Infix arithmetic over integers with left-associative operators; '*' binds
// tighter than '+'.  Small enough to hand-derive every expected tree.
inline asgkit::ModelSet make_arith_model(bool with_disambiguation = true) {
    using namespace asgkit;
    ElementModel expr;
    expr.name = "Expr";
    expr.kind = ElementKind::selection;
    expr.alternatives = {"AddExpr", "MulExpr", "Num"};

    ElementModel add;
    add.name = "AddExpr";
    add.kind = ElementKind::composite;
    add.members.push_back({.name = "left", .element_type = "Expr"});
    add.members.push_back({.name = "right", .element_type = "Expr", .prefixes = {"+"}});
    if (with_disambiguation) add.disambiguation = {Assoc::left, Composition::eager, 1};

    ElementModel mul;
    mul.name = "MulExpr";
    mul.kind = ElementKind::composite;
    mul.members.push_back({.name = "left", .element_type = "Expr"});
    mul.members.push_back({.name = "right", .element_type = "Expr", .prefixes = {"*"}});
    if (with_disambiguation) mul.disambiguation = {Assoc::left, Composition::eager, 2};

    ElementModel num;
    num.name = "Num";
    num.kind = ElementKind::basic;
    num.pattern = PatternSpec{.regex = "[0-9]+"};

    return build_model({expr, add, mul, num}, "Expr");
}

struct Parsed {
    asgkit::Grammar grammar;
    asgkit::ParseForest forest;
    asgkit::ParseTree tree;
    asgkit::InstanceGraph graph;
    asgkit::SymbolTable table;
};

// Full front end minus constraints: scan, parse, disambiguate, instantiate,
// resolve.  Throws the pipeline's own errors.
inline Parsed run_pipeline(const asgkit::ModelSet& model, const std::string& input) {
    Parsed p;
    p.grammar = asgkit::synthesize(model);
    asgkit::TokenLattice lattice = asgkit::scan(input, p.grammar);
    p.forest = asgkit::parse(p.grammar, lattice);
    p.tree = asgkit::disambiguate(p.forest, p.grammar);
    auto [graph, table] = asgkit::build_instances(p.tree, model);
    p.graph = std::move(graph);
    p.table = std::move(table);
    asgkit::resolve_references(p.graph, p.table);
    return p;
}

// Renders a disambiguated tree as a bracketed expression skeleton: composite
// nodes become `Owner(child,...)`, token leaves their lexeme, wrapper symbols
// are passed through.  Gives compact hand-checkable tree shapes.
inline std::string tree_shape(const asgkit::ParseTree::Node& node) {
    if (!node.production) return node.lexeme;
    std::string inner;
    for (const auto& child : node.children) {
        std::string part = tree_shape(child);
        if (part.empty()) continue;
        if (!inner.empty()) inner += " ";
        inner += part;
    }
    using PO = asgkit::ProductionOrigin;
    if (node.production->origin == PO::composite)
        return node.production->owner + "(" + inner + ")";
    return inner;
}

inline std::string tree_shape(const asgkit::ParseTree& tree) {
    return tree_shape(tree.root);
}

}  // namespace testing
