#pragma once

#include <deque>
#include <string>
#include <variant>
#include <vector>

#include "asgkit/grammar.hpp"
#include "asgkit/lattice.hpp"

namespace asgkit {

struct TokenLeaf {
    std::string symbol;
    std::string lexeme;
    std::size_t begin = 0;
    std::size_t end = 0;
};

struct ForestNode;

using ForestChild = std::variant<const ForestNode*, TokenLeaf>;

struct Derivation {
    const Production* production = nullptr;
    std::vector<ForestChild> children;
};

// Packed node: one entry per (symbol, span), alternative derivations listed.
struct ForestNode {
    std::string symbol;
    std::size_t begin = 0;
    std::size_t end = 0;
    std::vector<Derivation> derivations;
};

class ParseForest {
public:
    ParseForest() = default;
    ParseForest(const ParseForest&) = delete;
    ParseForest& operator=(const ParseForest&) = delete;
    ParseForest(ParseForest&&) = default;
    ParseForest& operator=(ParseForest&&) = default;

    const ForestNode* root() const { return root_; }
    // One packed node per (symbol, span), in discovery order.
    const std::deque<ForestNode>& nodes() const { return pool_; }
    const std::string& input() const { return input_; }

private:
    friend ParseForest parse(const Grammar&, const TokenLattice&);

    std::deque<ForestNode> pool_;
    const ForestNode* root_ = nullptr;
    std::string input_;
};

struct ParseTree {
    struct Node {
        const Production* production = nullptr;  // null for token leaves
        std::string symbol;
        std::string lexeme;  // token leaves only
        std::size_t begin = 0;
        std::size_t end = 0;
        std::vector<Node> children;
    };

    Node root;
    std::string input;
};

// Earley recognition over the token lattice, with epsilon support, packed
// into a shared forest.  Throws Error{SyntaxError} carrying the furthest
// reached position and the expected token symbols.
ParseForest parse(const Grammar& grammar, const TokenLattice& lattice);

// Applies priority, associativity, then composition filters at every packed
// node; throws Error{AmbiguityError} when more than one derivation survives
// on the path actually taken.  The returned tree references productions owned
// by `grammar`.
ParseTree disambiguate(const ParseForest& forest, const Grammar& grammar);

// Total number of distinct parse trees represented by the forest.
unsigned long long count_trees(const ParseForest& forest);

std::string dump_forest(const ParseForest& forest);
std::string dump_tree(const ParseTree& tree);

}  // namespace asgkit
