#include "asgkit/model_io.hpp"

#include <sstream>
#include <vector>

namespace asgkit {

namespace {

std::string quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    out += '"';
    return out;
}

void write_quoted_list(std::ostringstream& os, const char* key, int indent,
                       const std::vector<std::string>& values) {
    if (values.empty()) return;
    os << std::string(static_cast<std::size_t>(indent), ' ') << key << ":";
    for (const std::string& v : values) os << ' ' << quote(v);
    os << '\n';
}

void write_name_list(std::ostringstream& os, const char* key, int indent,
                     const std::vector<std::string>& values) {
    if (values.empty()) return;
    os << std::string(static_cast<std::size_t>(indent), ' ') << key << ":";
    for (const std::string& v : values) os << ' ' << v;
    os << '\n';
}

void write_disambiguation(std::ostringstream& os, int indent,
                          const DisambiguationSpec& d) {
    std::string pad(static_cast<std::size_t>(indent), ' ');
    if (d.associativity != Assoc::none)
        os << pad << "associativity: " << (d.associativity == Assoc::left ? "left" : "right")
           << '\n';
    if (d.composition != Composition::eager) os << pad << "composition: lazy\n";
    if (d.priority != 0) os << pad << "priority: " << d.priority << '\n';
}

}  // namespace

std::string write_model(const ModelSet& model) {
    std::ostringstream os;
    os << "asm-version: 1\n";
    os << "start: " << model.start() << "\n";
    for (const ElementModel& e : model.elements()) {
        os << "\nelement " << e.name << " {\n";
        switch (e.kind) {
            case ElementKind::composite: os << "  kind: composite\n"; break;
            case ElementKind::selection: os << "  kind: selection\n"; break;
            case ElementKind::basic: os << "  kind: basic\n"; break;
        }
        write_quoted_list(os, "prefix", 2, e.prefixes);
        write_quoted_list(os, "suffix", 2, e.suffixes);
        if (e.kind == ElementKind::basic) {
            os << "  pattern: " << e.pattern->regex << '\n';
            if (e.pattern->value_binding != "value")
                os << "  value: " << e.pattern->value_binding << '\n';
        }
        write_name_list(os, "alternatives", 2, e.alternatives);
        write_name_list(os, "id", 2, e.id_members);
        write_name_list(os, "constraint", 2, e.constraints);
        write_disambiguation(os, 2, e.disambiguation);
        for (const Member& m : e.members) {
            os << "  member " << m.name << " {\n";
            os << "    type: " << m.element_type << '\n';
            if (m.optional) os << "    optional: true\n";
            if (m.minimum != 1) os << "    minimum: " << m.minimum << '\n';
            if (m.maximum == kUnbounded)
                os << "    maximum: unbounded\n";
            else if (m.maximum != 1)
                os << "    maximum: " << m.maximum << '\n';
            write_quoted_list(os, "separator", 4, m.separators);
            write_quoted_list(os, "prefix", 4, m.prefixes);
            write_quoted_list(os, "suffix", 4, m.suffixes);
            if (m.is_reference) os << "    reference: true\n";
            if (!m.free_order_group.empty()) os << "    group: " << m.free_order_group << '\n';
            os << "  }\n";
        }
        os << "}\n";
    }
    return os.str();
}

namespace {

struct Reader {
    std::vector<std::string> lines;
    std::size_t pos = 0;

    explicit Reader(std::string_view text) {
        std::string current;
        for (char c : text) {
            if (c == '\n') {
                lines.push_back(std::move(current));
                current.clear();
            } else {
                current += c;
            }
        }
        if (!current.empty()) lines.push_back(std::move(current));
    }

    [[noreturn]] void fail(const std::string& why) const {
        throw Error(ErrorCode::ModelFileError,
                    "model file line " + std::to_string(pos) + ": " + why);
    }

    static std::string trim(const std::string& s) {
        std::size_t b = s.find_first_not_of(" \t\r");
        if (b == std::string::npos) return "";
        std::size_t e = s.find_last_not_of(" \t\r");
        return s.substr(b, e - b + 1);
    }

    // Next non-empty trimmed line, or nullopt at end.
    std::optional<std::string> next() {
        while (pos < lines.size()) {
            std::string t = trim(lines[pos++]);
            if (!t.empty()) return t;
        }
        return std::nullopt;
    }

    std::vector<std::string> parse_quoted_list(const std::string& text) {
        std::vector<std::string> out;
        std::size_t i = 0;
        while (i < text.size()) {
            while (i < text.size() && (text[i] == ' ' || text[i] == '\t')) ++i;
            if (i >= text.size()) break;
            if (text[i] != '"') fail("expected quoted string in: " + text);
            ++i;
            std::string value;
            while (i < text.size() && text[i] != '"') {
                if (text[i] == '\\' && i + 1 < text.size()) ++i;
                value += text[i++];
            }
            if (i >= text.size()) fail("unterminated string in: " + text);
            ++i;
            out.push_back(std::move(value));
        }
        return out;
    }

    static std::vector<std::string> split_names(const std::string& text) {
        std::vector<std::string> out;
        std::istringstream is(text);
        std::string word;
        while (is >> word) out.push_back(word);
        return out;
    }
};

}  // namespace

ModelSet read_model(std::string_view text) {
    Reader reader(text);

    auto header = reader.next();
    if (!header || *header != "asm-version: 1")
        reader.fail("missing or unsupported 'asm-version: 1' header");

    std::string start;
    std::vector<ElementModel> elements;

    auto split_kv = [&](const std::string& line,
                        std::string& key) -> std::optional<std::string> {
        std::size_t colon = line.find(':');
        if (colon == std::string::npos) return std::nullopt;
        key = Reader::trim(line.substr(0, colon));
        return Reader::trim(line.substr(colon + 1));
    };

    auto parse_member = [&](const std::string& name) {
        Member m;
        m.name = name;
        while (true) {
            auto line = reader.next();
            if (!line) reader.fail("unterminated member block");
            if (*line == "}") break;
            std::string key;
            auto value = split_kv(*line, key);
            if (!value) reader.fail("expected 'key: value' in member block: " + *line);
            if (key == "type") m.element_type = *value;
            else if (key == "optional") m.optional = (*value == "true");
            else if (key == "minimum") m.minimum = std::stoi(*value);
            else if (key == "maximum")
                m.maximum = (*value == "unbounded") ? kUnbounded : std::stoi(*value);
            else if (key == "separator") m.separators = reader.parse_quoted_list(*value);
            else if (key == "prefix") m.prefixes = reader.parse_quoted_list(*value);
            else if (key == "suffix") m.suffixes = reader.parse_quoted_list(*value);
            else if (key == "reference") m.is_reference = (*value == "true");
            else if (key == "group") m.free_order_group = *value;
            else reader.fail("unknown member key: " + key);
        }
        return m;
    };

    auto parse_element = [&](const std::string& name) {
        ElementModel e;
        e.name = name;
        while (true) {
            auto line = reader.next();
            if (!line) reader.fail("unterminated element block");
            if (*line == "}") break;
            if (line->rfind("member ", 0) == 0) {
                std::string rest = Reader::trim(line->substr(7));
                if (rest.size() < 2 || rest.back() != '{')
                    reader.fail("expected 'member NAME {': " + *line);
                e.members.push_back(parse_member(Reader::trim(rest.substr(0, rest.size() - 1))));
                continue;
            }
            std::string key;
            auto value = split_kv(*line, key);
            if (!value) reader.fail("expected 'key: value' in element block: " + *line);
            if (key == "kind") {
                if (*value == "composite") e.kind = ElementKind::composite;
                else if (*value == "selection") e.kind = ElementKind::selection;
                else if (*value == "basic") e.kind = ElementKind::basic;
                else reader.fail("unknown kind: " + *value);
            } else if (key == "prefix") e.prefixes = reader.parse_quoted_list(*value);
            else if (key == "suffix") e.suffixes = reader.parse_quoted_list(*value);
            else if (key == "pattern") {
                if (!e.pattern) e.pattern = PatternSpec{};
                e.pattern->regex = *value;
            } else if (key == "value") {
                if (!e.pattern) e.pattern = PatternSpec{};
                e.pattern->value_binding = *value;
            } else if (key == "alternatives") e.alternatives = Reader::split_names(*value);
            else if (key == "id") e.id_members = Reader::split_names(*value);
            else if (key == "constraint") e.constraints = Reader::split_names(*value);
            else if (key == "associativity")
                e.disambiguation.associativity = (*value == "left") ? Assoc::left
                                                : (*value == "right") ? Assoc::right
                                                                      : Assoc::none;
            else if (key == "composition")
                e.disambiguation.composition =
                    (*value == "lazy") ? Composition::lazy : Composition::eager;
            else if (key == "priority") e.disambiguation.priority = std::stoi(*value);
            else reader.fail("unknown element key: " + key);
        }
        return e;
    };

    while (auto line = reader.next()) {
        if (line->rfind("element ", 0) == 0) {
            std::string rest = Reader::trim(line->substr(8));
            if (rest.size() < 2 || rest.back() != '{')
                reader.fail("expected 'element NAME {': " + *line);
            elements.push_back(parse_element(Reader::trim(rest.substr(0, rest.size() - 1))));
            continue;
        }
        std::string key;
        auto value = split_kv(*line, key);
        if (value && key == "start") {
            start = *value;
            continue;
        }
        reader.fail("unexpected line: " + *line);
    }

    if (start.empty()) reader.fail("missing 'start:' designation");
    return build_model(std::move(elements), std::move(start));
}

}  // namespace asgkit
