#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "asgkit/grammar.hpp"

namespace asgkit {

struct TokenEdge {
    std::size_t begin = 0;
    std::size_t end = 0;  // exclusive; end > begin
    std::string symbol;
    std::string lexeme;

    bool operator==(const TokenEdge&) const = default;
};

// Every candidate token match over the input.  Lexical ambiguity (keyword vs
// name, integer vs real) is kept in the lattice and left to the parser.
struct TokenLattice {
    std::string input;
    std::vector<TokenEdge> edges;  // sorted by (begin, symbol, end)

    // First non-whitespace position at or after `pos`.
    std::size_t skip_ws(std::size_t pos) const;
};

// Maximal-munch match per token symbol at every non-whitespace position.
// Throws Error{LexError} when some non-whitespace character is covered by no
// edge.
TokenLattice scan(std::string_view input, const Grammar& grammar);

// One edge per line: `start..end SYMBOL "lexeme"`.
std::string dump_tokens(const TokenLattice& lattice);

}  // namespace asgkit
