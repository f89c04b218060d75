#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "asgkit/model.hpp"
#include "asgkit/model_io.hpp"
#include "asgkit/scene3d.hpp"

#include "helpers.hpp"

using namespace asgkit;

namespace {

ElementModel basic(const std::string& name, const std::string& regex) {
    ElementModel e;
    e.name = name;
    e.kind = ElementKind::basic;
    e.pattern = PatternSpec{.regex = regex};
    return e;
}

ElementModel composite(const std::string& name, std::vector<Member> members) {
    ElementModel e;
    e.name = name;
    e.kind = ElementKind::composite;
    e.members = std::move(members);
    return e;
}

bool has_issue(const ValidationReport& report, IssueCode code) {
    for (const ValidationIssue& issue : report.issues)
        if (issue.code == code) return true;
    return false;
}

}  // namespace

TEST_CASE("build_model resolves names and freezes the set") {
    ModelSet model = build_model(
        {composite("Pair", {{.name = "a", .element_type = "Word"},
                            {.name = "b", .element_type = "Word"}}),
         basic("Word", "[a-z]+")},
        "Pair");
    CHECK(model.start() == "Pair");
    CHECK(model.elements().size() == 2);
    CHECK(model.find("Word") != nullptr);
    CHECK(model.find("Missing") == nullptr);
    CHECK(model.element("Pair").members.size() == 2);
}

TEST_CASE("build_model rejects unknown member types") {
    try {
        build_model({composite("A", {{.name = "x", .element_type = "Nope"}})}, "A");
        FAIL("expected Error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::UnknownType);
        CHECK(std::string(e.what()).find("Nope") != std::string::npos);
    }
}

TEST_CASE("build_model rejects duplicate element names") {
    try {
        build_model({basic("W", "[a-z]+"), basic("W", "[0-9]+")}, "W");
        FAIL("expected Error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DuplicateElementName);
    }
}

TEST_CASE("build_model rejects an unknown start element") {
    try {
        build_model({basic("W", "[a-z]+")}, "Root");
        FAIL("expected Error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::UnknownType);
    }
}

TEST_CASE("build_model rejects malformed elements") {
    ElementModel no_pattern;
    no_pattern.name = "B";
    no_pattern.kind = ElementKind::basic;  // basic without a pattern
    try {
        build_model({no_pattern}, "B");
        FAIL("expected Error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::MalformedElement);
    }
}

TEST_CASE("validate: optional @ID member is an error") {
    ElementModel def = composite(
        "Def", {{.name = "name", .element_type = "Word", .optional = true}});
    def.id_members = {"name"};
    ModelSet model = build_model({def, basic("Word", "[a-z]+")}, "Def");
    ValidationReport report = validate_model(model);
    CHECK_FALSE(report.ok());
    CHECK(has_issue(report, IssueCode::IdOptionalConflict));
}

TEST_CASE("validate: reference to an element without @ID is an error") {
    ModelSet model = build_model(
        {composite("Use", {{.name = "target",
                            .element_type = "Def",
                            .is_reference = true}}),
         composite("Def", {{.name = "name", .element_type = "Word"}}),
         basic("Word", "[a-z]+")},
        "Use");
    ValidationReport report = validate_model(model);
    CHECK_FALSE(report.ok());
    CHECK(has_issue(report, IssueCode::ReferenceWithoutId));
}

TEST_CASE("validate: free-order members must have cardinality at most one") {
    ModelSet model = build_model(
        {composite("G", {{.name = "xs",
                          .element_type = "Word",
                          .minimum = 0,
                          .maximum = kUnbounded,
                          .free_order_group = "g"},
                         {.name = "y",
                          .element_type = "Word",
                          .optional = true,
                          .free_order_group = "g"}}),
         basic("Word", "[a-z]+")},
        "G");
    ValidationReport report = validate_model(model);
    CHECK_FALSE(report.ok());
    CHECK(has_issue(report, IssueCode::FreeOrderMemberCardinality));
}

TEST_CASE("validate: free-order groups must be contiguous") {
    ModelSet model = build_model(
        {composite("G", {{.name = "a", .element_type = "Word", .free_order_group = "g"},
                         {.name = "mid", .element_type = "Word"},
                         {.name = "b", .element_type = "Word", .free_order_group = "g"}}),
         basic("Word", "[a-z]+")},
        "G");
    CHECK(has_issue(validate_model(model), IssueCode::FreeOrderNotContiguous));
}

TEST_CASE("validate: bad cardinality bounds") {
    ModelSet model = build_model(
        {composite("G", {{.name = "a", .element_type = "Word",
                          .minimum = 3, .maximum = 2}}),
         basic("Word", "[a-z]+")},
        "G");
    CHECK(has_issue(validate_model(model), IssueCode::BadCardinality));
}

TEST_CASE("validate: unknown @ID member and reference @ID member") {
    ElementModel def = composite("Def", {{.name = "name", .element_type = "Word"}});
    def.id_members = {"nom"};
    CHECK(has_issue(validate_model(build_model({def, basic("Word", "[a-z]+")}, "Def")),
                    IssueCode::IdMemberUnknown));

    ElementModel self = composite(
        "Def", {{.name = "name", .element_type = "Word"},
                {.name = "other", .element_type = "Def", .is_reference = true}});
    self.id_members = {"name", "other"};
    CHECK(has_issue(validate_model(build_model({self, basic("Word", "[a-z]+")}, "Def")),
                    IssueCode::IdMemberIsReference));
}

TEST_CASE("validate: broken and empty-matching patterns are errors") {
    CHECK(has_issue(validate_model(build_model({basic("B", "[unclosed")}, "B")),
                    IssueCode::BadPattern));
    CHECK(has_issue(validate_model(build_model({basic("B", "x*")}, "B")),
                    IssueCode::BadPattern));
}

TEST_CASE("validate: unreachable elements warn but do not fail") {
    ModelSet model = build_model(
        {composite("Root", {{.name = "w", .element_type = "Word"}}),
         basic("Word", "[a-z]+"), basic("Orphan", "[0-9]+")},
        "Root");
    ValidationReport report = validate_model(model);
    CHECK(report.ok());
    CHECK(has_issue(report, IssueCode::UnreachableElement));
}

TEST_CASE("the built-in scene model validates cleanly") {
    ValidationReport report = validate_model(scene3d::build_scene3d_model());
    for (const ValidationIssue& issue : report.issues)
        CAPTURE(issue.message);
    CHECK(report.ok());
}

TEST_CASE("model file round-trip preserves the model exactly") {
    ModelSet model = scene3d::build_scene3d_model();
    std::string text = write_model(model);
    CHECK(text.rfind("asm-version: 1\n", 0) == 0);
    ModelSet reread = read_model(text);
    CHECK(reread == model);
    // Idempotence: writing the reread model reproduces the bytes.
    CHECK(write_model(reread) == text);
}

TEST_CASE("model file round-trip for the arithmetic model") {
    ModelSet model = testing::make_arith_model();
    CHECK(read_model(write_model(model)) == model);
}

TEST_CASE("read_model diagnostics") {
    try {
        read_model("start: X\n");
        FAIL("expected Error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ModelFileError);
        CHECK(std::string(e.what()).find("asm-version") != std::string::npos);
    }
    try {
        read_model("asm-version: 1\nelement A {\n  kind: composite\n");
        FAIL("expected Error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ModelFileError);
    }
    try {
        read_model("asm-version: 1\nelement A {\n  kind: composite\n}\n");
        FAIL("expected Error");  // no start designation
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ModelFileError);
    }
}

TEST_CASE("reading a model file from the corpus") {
    ModelSet model = read_model(testing::read_file(testing::corpus_path("links.asm")));
    CHECK(model.start() == "File");
    CHECK(validate_model(model).ok());
    CHECK(model.element("Node").id_members == std::vector<std::string>{"name"});
    CHECK(model.element("Edge").members[0].is_reference);
}
