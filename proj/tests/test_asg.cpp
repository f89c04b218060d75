#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "json.hpp"

#include "asgkit/asg.hpp"
#include "asgkit/model_io.hpp"
#include "asgkit/scene3d.hpp"

#include "helpers.hpp"

using namespace asgkit;

namespace {

ModelSet links_model() {
    return read_model(testing::read_file(testing::corpus_path("links.asm")));
}

const AsgNode* first_of(const InstanceGraph& graph, const std::string& type) {
    for (const AsgNode& n : graph.nodes)
        if (n.type == type) return &n;
    return nullptr;
}

std::vector<const AsgNode*> all_of(const InstanceGraph& graph, const std::string& type) {
    std::vector<const AsgNode*> out;
    for (const AsgNode& n : graph.nodes)
        if (n.type == type) out.push_back(&n);
    return out;
}

}  // namespace

TEST_CASE("instantiation maps members to fields in declaration order") {
    testing::Parsed p = testing::run_pipeline(links_model(), "node a\nedge a a\n");
    const AsgNode& root = p.graph.node(p.graph.root);
    CHECK(root.type == "File");
    REQUIRE(root.fields.size() == 1);
    CHECK(root.fields[0].first == "items");
    CHECK(root.fields[0].second.is_list);
    CHECK(root.fields[0].second.items.size() == 2);

    const AsgNode* node = first_of(p.graph, "Node");
    REQUIRE(node != nullptr);
    CHECK(node->scalar("name") == "a");  // basic members become scalars

    const AsgNode* edge = first_of(p.graph, "Edge");
    REQUIRE(edge != nullptr);
    CHECK(edge->fields.size() == 2);
    CHECK(edge->fields[0].first == "from");
    CHECK(edge->fields[1].first == "to");
}

TEST_CASE("node ids are creation-ordered with parents before children") {
    testing::Parsed p = testing::run_pipeline(links_model(), "node a\nnode b\n");
    CHECK(p.graph.root == 0);
    for (const AsgNode& n : p.graph.nodes)
        for (const auto& [name, field] : n.fields)
            for (const FieldItem& item : field.items)
                if (const int* child = std::get_if<int>(&item))
                    CHECK(*child > n.id);
}

TEST_CASE("references resolve by @ID key, forwards and backwards") {
    SUBCASE("anaphora") {
        testing::Parsed p =
            testing::run_pipeline(links_model(), "node a\nnode b\nedge a b\n");
        const AsgNode* edge = first_of(p.graph, "Edge");
        const RefSlot& from = std::get<RefSlot>(edge->find("from")->items[0]);
        const RefSlot& to = std::get<RefSlot>(edge->find("to")->items[0]);
        CHECK(from.target_type == "Node");
        CHECK(from.key == std::vector<std::string>{"a"});
        CHECK(from.resolved_to == first_of(p.graph, "Node")->id);
        CHECK(to.resolved_to == all_of(p.graph, "Node")[1]->id);
    }
    SUBCASE("cataphora: uses before definitions") {
        testing::Parsed p =
            testing::run_pipeline(links_model(), "edge a b\nnode a\nnode b\n");
        const AsgNode* edge = first_of(p.graph, "Edge");
        const RefSlot& from = std::get<RefSlot>(edge->find("from")->items[0]);
        CHECK(from.resolved_to.has_value());
        CHECK(p.graph.node(*from.resolved_to).scalar("name") == "a");
    }
}

TEST_CASE("unresolved references raise an error naming the key") {
    try {
        testing::run_pipeline(links_model(), "edge a b\nnode a\n");
        FAIL("expected Error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::UnresolvedReference);
        CHECK(std::string(e.what()).find("'b'") != std::string::npos);
    }
}

TEST_CASE("duplicate identifiers: first definition wins, one warning per key") {
    testing::Parsed p = testing::run_pipeline(
        links_model(), "node a\nnode a\nnode a\nedge a a\n");
    REQUIRE(p.graph.warnings.size() == 1);
    CHECK(p.graph.warnings[0].find("'a'") != std::string::npos);
    CHECK(p.graph.warnings[0].find("3 definitions") != std::string::npos);
    const AsgNode* edge = first_of(p.graph, "Edge");
    const RefSlot& from = std::get<RefSlot>(edge->find("from")->items[0]);
    CHECK(from.resolved_to == all_of(p.graph, "Node")[0]->id);
}

TEST_CASE("recursive references form cycles in the graph") {
    ModelSet model = scene3d::build_scene3d_model();
    std::string source = testing::read_file(testing::corpus_path("snail.s3d"));
    testing::Parsed p = testing::run_pipeline(model, source);

    const AsgNode* definition = first_of(p.graph, "Definition");
    REQUIRE(definition != nullptr);
    CHECK(definition->scalar("name") == "snail");

    // Both draw sites reference the same definition: the one inside the
    // definition's own body closes a cycle.
    auto defined = all_of(p.graph, "DefinedObject");
    REQUIRE(defined.size() == 2);
    for (const AsgNode* d : defined) {
        const RefSlot& slot = std::get<RefSlot>(d->find("ref")->items[0]);
        CHECK(slot.resolved_to == definition->id);
    }
    // One of them sits inside the definition's own span: a true cycle.
    bool inside = false;
    for (const AsgNode* d : defined)
        if (d->span.begin >= definition->span.begin &&
            d->span.end <= definition->span.end)
            inside = true;
    CHECK(inside);
}

TEST_CASE("constraint hooks run once per node, cycles included") {
    ModelSet model = scene3d::build_scene3d_model();
    testing::Parsed p = testing::run_pipeline(
        model, testing::read_file(testing::corpus_path("snail.s3d")));

    int visits = 0;
    ConstraintRegistry registry = scene3d::make_constraint_registry();
    registry.add("draw-param-integer",
                 [&](const AsgNode&, const InstanceGraph&) -> std::optional<std::string> {
                     ++visits;
                     return std::nullopt;
                 });
    ConstraintReport report = check_constraints(p.graph, model, registry);
    CHECK(report.ok());
    CHECK(visits == 4);  // four draw statements in the snail program
}

TEST_CASE("constraint failures carry element, node and span") {
    ModelSet model = scene3d::build_scene3d_model();
    testing::Parsed p = testing::run_pipeline(model, "scene [ repeat 2.5 times [ ] ]");
    ConstraintReport report =
        check_constraints(p.graph, model, scene3d::make_constraint_registry());
    REQUIRE(report.failures.size() == 1);
    const ConstraintFailure& f = report.failures[0];
    CHECK(f.element == "RepeatStatement");
    CHECK(f.constraint == "repeat-count-integer");
    CHECK(f.message.find("2.5") != std::string::npos);
    CHECK(p.graph.node(f.node_id).type == "RepeatStatement");
    CHECK(f.span.begin == 8);
}

TEST_CASE("free-order orderings produce field-identical nodes") {
    ModelSet model = scene3d::build_scene3d_model();
    const char* orderings[] = {
        "scene [ scale x 1 y 2 z 3 ]", "scene [ scale x 1 z 3 y 2 ]",
        "scene [ scale y 2 x 1 z 3 ]", "scene [ scale y 2 z 3 x 1 ]",
        "scene [ scale z 3 x 1 y 2 ]", "scene [ scale z 3 y 2 x 1 ]"};
    std::vector<std::vector<std::pair<std::string, Field>>> fields;
    for (const char* source : orderings) {
        testing::Parsed p = testing::run_pipeline(model, source);
        const AsgNode* scale = first_of(p.graph, "ScaleStatement");
        REQUIRE(scale != nullptr);
        fields.push_back(scale->fields);
    }
    for (std::size_t i = 1; i < fields.size(); ++i) CHECK(fields[i] == fields[0]);
    // And the declared member order wins in the node, not the source order.
    CHECK(fields[0].size() == 3);
    CHECK(fields[0][0].first == "x");
    CHECK(fields[0][1].first == "y");
    CHECK(fields[0][2].first == "z");
}

TEST_CASE("omitted free-order members are simply absent") {
    ModelSet model = scene3d::build_scene3d_model();
    testing::Parsed p = testing::run_pipeline(
        model, "scene [ color relative red -0.05 green +0.05 alpha -0.008 ]");
    const AsgNode* color = first_of(p.graph, "ColorStatement");
    REQUIRE(color != nullptr);
    CHECK(color->scalar("red") == "-0.05");
    CHECK(color->scalar("green") == "+0.05");
    CHECK(color->scalar("alpha") == "-0.008");
    CHECK(color->find("blue") == nullptr);
    CHECK(color->find("relative") != nullptr);  // the marker was present
}

TEST_CASE("asg_to_json is valid JSON with stable structure") {
    testing::Parsed p =
        testing::run_pipeline(links_model(), "node a\nedge a a\n");
    nlohmann::json doc = nlohmann::json::parse(asg_to_json(p.graph));
    CHECK(doc["root"] == 0);
    REQUIRE(doc["nodes"].is_array());
    CHECK(doc["nodes"].size() == p.graph.nodes.size());
    const auto& edge = doc["nodes"][2];
    CHECK(edge["type"] == "Edge");
    CHECK(edge["fields"]["from"]["ref"].is_number());
    CHECK(doc["warnings"].is_array());
}

TEST_CASE("asg_to_dot marks reference edges as dashed") {
    testing::Parsed p =
        testing::run_pipeline(links_model(), "node a\nedge a a\n");
    std::string dot = asg_to_dot(p.graph);
    CHECK(dot.find("digraph") != std::string::npos);
    CHECK(dot.find("style=dashed") != std::string::npos);
    CHECK(dot.find("Edge") != std::string::npos);
}
