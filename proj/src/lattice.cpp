#include "asgkit/lattice.hpp"

#include <algorithm>
#include <regex>
#include <sstream>

namespace asgkit {

namespace {

bool is_ws(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

}  // namespace

std::size_t TokenLattice::skip_ws(std::size_t pos) const {
    while (pos < input.size() && is_ws(input[pos])) ++pos;
    return pos;
}

TokenLattice scan(std::string_view input, const Grammar& grammar) {
    TokenLattice lattice;
    lattice.input.assign(input);

    struct CompiledPattern {
        std::string symbol;
        std::regex regex;
    };
    std::vector<CompiledPattern> patterns;
    std::vector<std::pair<std::string, std::string>> literals;  // symbol, text
    for (const auto& [symbol, def] : grammar.tokens) {
        if (def.is_literal)
            literals.emplace_back(symbol, def.text);
        else
            patterns.push_back({symbol, std::regex(def.text)});
    }

    std::vector<char> covered(lattice.input.size(), 0);
    for (std::size_t pos = 0; pos < lattice.input.size(); ++pos) {
        if (is_ws(lattice.input[pos])) continue;
        for (const auto& [symbol, text] : literals) {
            if (lattice.input.compare(pos, text.size(), text) == 0) {
                lattice.edges.push_back({pos, pos + text.size(), symbol, text});
                std::fill(covered.begin() + pos, covered.begin() + pos + text.size(), 1);
            }
        }
        for (const CompiledPattern& p : patterns) {
            std::cmatch m;
            const char* first = lattice.input.data() + pos;
            const char* last = lattice.input.data() + lattice.input.size();
            if (std::regex_search(first, last, m, p.regex,
                                  std::regex_constants::match_continuous) &&
                m.length(0) > 0) {
                std::size_t end = pos + static_cast<std::size_t>(m.length(0));
                lattice.edges.push_back({pos, end, p.symbol, std::string(m[0])});
                std::fill(covered.begin() + pos, covered.begin() + end, 1);
            }
        }
    }

    for (std::size_t pos = 0; pos < lattice.input.size(); ++pos) {
        if (!is_ws(lattice.input[pos]) && !covered[pos]) {
            LineCol lc = line_col_at(lattice.input, pos);
            throw Error(ErrorCode::LexError,
                        "no token matches at line " + std::to_string(lc.line) +
                            ", column " + std::to_string(lc.column),
                        {pos, pos + 1});
        }
    }

    std::sort(lattice.edges.begin(), lattice.edges.end(),
              [](const TokenEdge& a, const TokenEdge& b) {
                  return std::tie(a.begin, a.symbol, a.end) <
                         std::tie(b.begin, b.symbol, b.end);
              });
    return lattice;
}

std::string dump_tokens(const TokenLattice& lattice) {
    std::ostringstream os;
    for (const TokenEdge& e : lattice.edges)
        os << e.begin << ".." << e.end << ' ' << e.symbol << " \"" << e.lexeme << "\"\n";
    return os.str();
}

}  // namespace asgkit
