#include "asgkit/scene3d.hpp"

#include <cmath>
#include <cstdio>
#include <optional>
#include <ostream>
#include <regex>

#include "json.hpp"

namespace asgkit::scene3d {

Mat4 Mat4::identity() {
    Mat4 out;
    out.m[0] = out.m[5] = out.m[10] = out.m[15] = 1.0;
    return out;
}

Mat4 Mat4::scaling(double sx, double sy, double sz) {
    Mat4 out;
    out.m[0] = sx;
    out.m[5] = sy;
    out.m[10] = sz;
    out.m[15] = 1.0;
    return out;
}

Mat4 Mat4::translation(double tx, double ty, double tz) {
    Mat4 out = identity();
    out.m[3] = tx;
    out.m[7] = ty;
    out.m[11] = tz;
    return out;
}

Mat4 Mat4::rotation(double ax, double ay, double az, double angle_deg) {
    double norm = std::sqrt(ax * ax + ay * ay + az * az);
    if (norm == 0.0)
        throw Error(ErrorCode::EvalError, "rotation axis must be nonzero");
    double x = ax / norm, y = ay / norm, z = az / norm;
    double rad = angle_deg * M_PI / 180.0;
    double c = std::cos(rad), s = std::sin(rad), t = 1.0 - c;

    Mat4 out;
    out.m = {t * x * x + c,     t * x * y - s * z, t * x * z + s * y, 0,
             t * x * y + s * z, t * y * y + c,     t * y * z - s * x, 0,
             t * x * z - s * y, t * y * z + s * x, t * z * z + c,     0,
             0,                 0,                 0,                 1};
    return out;
}

Mat4 Mat4::operator*(const Mat4& other) const {
    Mat4 out;
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) {
            double acc = 0;
            for (int k = 0; k < 4; ++k) acc += m[r * 4 + k] * other.m[k * 4 + c];
            out.m[r * 4 + c] = acc;
        }
    return out;
}

std::array<double, 3> Mat4::apply(double x, double y, double z) const {
    return {m[0] * x + m[1] * y + m[2] * z + m[3],
            m[4] * x + m[5] * y + m[6] * z + m[7],
            m[8] * x + m[9] * y + m[10] * z + m[11]};
}

namespace {

ElementModel composite(std::string name, std::vector<std::string> prefixes,
                       std::vector<Member> members,
                       std::vector<std::string> suffixes = {}) {
    ElementModel e;
    e.name = std::move(name);
    e.kind = ElementKind::composite;
    e.prefixes = std::move(prefixes);
    e.members = std::move(members);
    e.suffixes = std::move(suffixes);
    return e;
}

ElementModel selection(std::string name, std::vector<std::string> alternatives) {
    ElementModel e;
    e.name = std::move(name);
    e.kind = ElementKind::selection;
    e.alternatives = std::move(alternatives);
    return e;
}

ElementModel basic(std::string name, std::string regex) {
    ElementModel e;
    e.name = std::move(name);
    e.kind = ElementKind::basic;
    e.pattern = PatternSpec{std::move(regex), "value"};
    return e;
}

Member member(std::string name, std::string type) {
    Member m;
    m.name = std::move(name);
    m.element_type = std::move(type);
    return m;
}

Member axis_member(std::string name, std::string marker, std::string group) {
    Member m = member(std::move(name), "Number");
    m.optional = true;
    m.minimum = 0;
    m.prefixes = {std::move(marker)};
    m.free_order_group = std::move(group);
    return m;
}

}  // namespace

ModelSet build_scene3d_model() {
    std::vector<ElementModel> elements;

    {
        Member items = member("items", "ProgramItem");
        items.minimum = 1;
        items.maximum = kUnbounded;
        elements.push_back(composite("Program", {}, {items}));
    }
    elements.push_back(selection("ProgramItem", {"Definition", "Scene"}));
    {
        ElementModel e = composite("Definition", {"define"},
                                   {member("name", "ObjectName"),
                                    member("body", "CompositeStatement")});
        e.id_members = {"name"};
        elements.push_back(e);
    }
    elements.push_back(composite("Scene", {"scene"}, {member("body", "CompositeStatement")}));
    elements.push_back(selection(
        "Statement", {"ScopedStatement", "CompositeStatement", "RepeatStatement",
                      "DrawStatement", "ScaleStatement", "RotateStatement",
                      "TranslateStatement", "ColorStatement"}));
    {
        Member statements = member("statements", "Statement");
        statements.minimum = 0;
        statements.maximum = kUnbounded;
        elements.push_back(composite("ScopedStatement", {"{"}, {statements}, {"}"}));
        elements.push_back(composite("CompositeStatement", {"["}, {statements}, {"]"}));
    }
    {
        Member count = member("count", "Number");
        count.suffixes = {"times"};
        ElementModel e = composite("RepeatStatement", {"repeat"},
                                   {count, member("body", "Statement")});
        e.constraints = {"repeat-count-integer"};
        elements.push_back(e);
    }
    {
        Member param = member("param", "Parameter");
        param.optional = true;
        param.minimum = 0;
        ElementModel e = composite("DrawStatement", {"draw"},
                                   {member("object", "Object"), param});
        e.constraints = {"draw-param-integer"};
        elements.push_back(e);
    }
    elements.push_back(selection("Object", {"PrimitiveObject", "DefinedObject"}));
    elements.push_back(composite("PrimitiveObject", {"cube"}, {}));
    {
        Member ref = member("ref", "Definition");
        ref.is_reference = true;
        ElementModel e = composite("DefinedObject", {}, {ref});
        // The keyword reading of an object word must win over a reference;
        // see the priority filter (lower priority survives at a packed node).
        e.disambiguation.priority = 1;
        elements.push_back(e);
    }
    elements.push_back(selection("Parameter", {"Number", "NextKeyword"}));
    elements.push_back(composite("NextKeyword", {"next"}, {}));
    {
        Member factor = member("factor", "Number");
        factor.optional = true;
        factor.minimum = 0;
        ElementModel e = composite("ScaleStatement", {"scale"},
                                   {factor, axis_member("x", "x", "axes"),
                                    axis_member("y", "y", "axes"),
                                    axis_member("z", "z", "axes")});
        e.constraints = {"scale-nonempty"};
        elements.push_back(e);
    }
    {
        Member angle = member("angle", "Number");
        angle.prefixes = {"angle"};
        ElementModel e = composite("RotateStatement", {"rotate"},
                                   {axis_member("x", "x", "axes"),
                                    axis_member("y", "y", "axes"),
                                    axis_member("z", "z", "axes"), angle});
        e.constraints = {"rotate-axis-nonzero"};
        elements.push_back(e);
    }
    {
        ElementModel e = composite("TranslateStatement", {"translate"},
                                   {axis_member("x", "x", "axes"),
                                    axis_member("y", "y", "axes"),
                                    axis_member("z", "z", "axes")});
        e.constraints = {"translate-nonempty"};
        elements.push_back(e);
    }
    {
        Member relative = member("relative", "RelativeMarker");
        relative.optional = true;
        relative.minimum = 0;
        relative.free_order_group = "channels";
        ElementModel e = composite(
            "ColorStatement", {"color"},
            {relative, axis_member("red", "red", "channels"),
             axis_member("green", "green", "channels"),
             axis_member("blue", "blue", "channels"),
             axis_member("alpha", "alpha", "channels")});
        e.constraints = {"color-nonempty"};
        elements.push_back(e);
    }
    elements.push_back(composite("RelativeMarker", {"relative"}, {}));
    elements.push_back(basic("ObjectName", "[a-zA-Z_][a-zA-Z0-9_]*"));
    elements.push_back(basic("Number", "[+-]?[0-9]+(\\.[0-9]+)?"));

    return build_model(std::move(elements), "Program");
}

namespace {

bool is_integer_lexeme(const std::string& s) {
    static const std::regex re("[+-]?[0-9]+");
    return std::regex_match(s, re);
}

double scalar_number(const AsgNode& node, std::string_view field, double fallback) {
    auto s = node.scalar(field);
    return s ? std::stod(*s) : fallback;
}

std::optional<std::string> require_any_field(const AsgNode& node,
                                             std::initializer_list<const char*> names,
                                             const char* message) {
    for (const char* name : names)
        if (node.find(name)) return std::nullopt;
    return std::string(message);
}

}  // namespace

ConstraintRegistry make_constraint_registry() {
    ConstraintRegistry registry;

    registry.add("repeat-count-integer",
                 [](const AsgNode& node, const InstanceGraph&) -> std::optional<std::string> {
                     auto count = node.scalar("count");
                     if (count && !is_integer_lexeme(*count))
                         return "repeat count must be an integer, got '" + *count + "'";
                     return std::nullopt;
                 });

    registry.add("draw-param-integer",
                 [](const AsgNode& node,
                    const InstanceGraph& graph) -> std::optional<std::string> {
                     auto param = node.child("param");
                     if (!param) return std::nullopt;
                     const AsgNode& p = graph.node(*param);
                     if (p.type == "Number") {
                         auto value = p.scalar("value");
                         if (value && !is_integer_lexeme(*value))
                             return "draw parameter must be an integer, got '" + *value +
                                    "'";
                     }
                     return std::nullopt;
                 });

    registry.add("scale-nonempty", [](const AsgNode& node, const InstanceGraph&) {
        return require_any_field(node, {"factor", "x", "y", "z"},
                                 "scale statement requires a factor or axis value");
    });
    registry.add("translate-nonempty", [](const AsgNode& node, const InstanceGraph&) {
        return require_any_field(node, {"x", "y", "z"},
                                 "translate statement requires at least one axis value");
    });
    registry.add("color-nonempty", [](const AsgNode& node, const InstanceGraph&) {
        return require_any_field(node, {"relative", "red", "green", "blue", "alpha"},
                                 "color statement requires at least one channel");
    });
    registry.add("rotate-axis-nonzero",
                 [](const AsgNode& node, const InstanceGraph&) -> std::optional<std::string> {
                     double x = scalar_number(node, "x", 0.0);
                     double y = scalar_number(node, "y", 0.0);
                     double z = scalar_number(node, "z", 0.0);
                     if (x == 0.0 && y == 0.0 && z == 0.0)
                         return "rotation axis must be nonzero";
                     return std::nullopt;
                 });

    return registry;
}

namespace {

class Evaluator {
public:
    Evaluator(const InstanceGraph& graph, const EvalOptions& options)
        : graph_(graph), options_(options) {}

    std::vector<CubeInstance> run() {
        const AsgNode& root = graph_.node(graph_.root);
        const Field* items = root.find("items");
        if (root.type != "Program" || !items)
            throw Error(ErrorCode::EvalError, "graph root is not a scene3d Program");

        bool any_scene = false;
        for (const FieldItem& item : items->items) {
            const int* id = std::get_if<int>(&item);
            if (!id) continue;
            const AsgNode& node = graph_.node(*id);
            if (node.type != "Scene") continue;
            any_scene = true;
            matrix_stack_.assign(1, Mat4::identity());
            color_ = Rgba{0, 0, 0, 1};
            current_param_.reset();
            exec(*node.child("body"));
        }
        if (!any_scene) throw Error(ErrorCode::EvalError, "program contains no scene");
        return std::move(cubes_);
    }

private:
    Mat4& top() { return matrix_stack_.back(); }

    void exec_list(const AsgNode& node) {
        const Field* statements = node.find("statements");
        if (!statements) return;
        for (const FieldItem& item : statements->items)
            exec(std::get<int>(item));
    }

    void exec(int id) {
        const AsgNode& node = graph_.node(id);
        if (node.type == "ScopedStatement") {
            matrix_stack_.push_back(top());
            Rgba saved_color = color_;
            exec_list(node);
            matrix_stack_.pop_back();
            if (options_.scoped_color) color_ = saved_color;
        } else if (node.type == "CompositeStatement") {
            exec_list(node);
        } else if (node.type == "RepeatStatement") {
            long n = std::lround(std::stod(*node.scalar("count")));
            int body = *node.child("body");
            for (long i = 0; i < n; ++i) exec(body);
        } else if (node.type == "DrawStatement") {
            exec_draw(node);
        } else if (node.type == "ScaleStatement") {
            double factor = scalar_number(node, "factor", 1.0);
            top() = top() * Mat4::scaling(scalar_number(node, "x", factor),
                                          scalar_number(node, "y", factor),
                                          scalar_number(node, "z", factor));
        } else if (node.type == "RotateStatement") {
            top() = top() * Mat4::rotation(scalar_number(node, "x", 0.0),
                                           scalar_number(node, "y", 0.0),
                                           scalar_number(node, "z", 0.0),
                                           scalar_number(node, "angle", 0.0));
        } else if (node.type == "TranslateStatement") {
            top() = top() * Mat4::translation(scalar_number(node, "x", 0.0),
                                              scalar_number(node, "y", 0.0),
                                              scalar_number(node, "z", 0.0));
        } else if (node.type == "ColorStatement") {
            bool relative = node.find("relative") != nullptr;
            apply_channel(relative, node, "red", &Rgba::r);
            apply_channel(relative, node, "green", &Rgba::g);
            apply_channel(relative, node, "blue", &Rgba::b);
            apply_channel(relative, node, "alpha", &Rgba::a);
        } else {
            throw Error(ErrorCode::EvalError, "unknown statement type " + node.type,
                        node.span);
        }
    }

    void apply_channel(bool relative, const AsgNode& node, std::string_view name,
                       double Rgba::* channel) {
        auto s = node.scalar(name);
        if (!s) return;
        double value = std::stod(*s);
        double& target = color_.*channel;
        target = relative ? target + value : value;
        target = std::min(1.0, std::max(0.0, target));
    }

    void exec_draw(const AsgNode& node) {
        long param = 1;
        if (auto param_id = node.child("param")) {
            const AsgNode& p = graph_.node(*param_id);
            if (p.type == "NextKeyword") {
                if (!current_param_)
                    throw Error(ErrorCode::NextOutsideInvocation,
                                "'next' used outside a parameterized invocation",
                                p.span);
                param = *current_param_ - 1;
            } else {
                param = std::stol(*p.scalar("value"));
                if (param < 0)
                    throw Error(ErrorCode::NegativeParam,
                                "draw parameter must be non-negative", p.span);
            }
        }
        if (param == 0) return;  // draw statements do not run at parameter 0

        const AsgNode& object = graph_.node(*node.child("object"));
        if (object.type == "PrimitiveObject") {
            cubes_.push_back({top(), color_});
            return;
        }
        // DefinedObject: run the referenced definition's body with the new
        // parameter; matrix and color state is shared with the caller.
        const Field* ref = object.find("ref");
        const RefSlot& slot = std::get<RefSlot>(ref->items.at(0));
        const AsgNode& definition = graph_.node(*slot.resolved_to);
        std::optional<long> saved = std::exchange(current_param_, param);
        exec(*definition.child("body"));
        current_param_ = saved;
    }

    const InstanceGraph& graph_;
    EvalOptions options_;
    std::vector<CubeInstance> cubes_;
    std::vector<Mat4> matrix_stack_;
    Rgba color_;
    std::optional<long> current_param_;
};

std::string fmt(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", value);
    return buf;
}

}  // namespace

std::vector<CubeInstance> evaluate(const InstanceGraph& graph, const EvalOptions& options) {
    return Evaluator(graph, options).run();
}

void export_obj(const std::vector<CubeInstance>& cubes, std::ostream& out) {
    out << "# scene export, " << cubes.size() << " cubes\n";
    // Unit cube corners, bit pattern zyx over {-0.5, +0.5}.
    static const int quads[6][4] = {{0, 2, 3, 1}, {4, 5, 7, 6}, {0, 1, 5, 4},
                                    {2, 6, 7, 3}, {0, 4, 6, 2}, {1, 3, 7, 5}};
    std::size_t base = 1;
    for (std::size_t i = 0; i < cubes.size(); ++i) {
        const CubeInstance& cube = cubes[i];
        out << "# cube " << i << " color " << fmt(cube.color.r) << ' ' << fmt(cube.color.g)
            << ' ' << fmt(cube.color.b) << ' ' << fmt(cube.color.a) << '\n';
        for (int corner = 0; corner < 8; ++corner) {
            double x = (corner & 1) ? 0.5 : -0.5;
            double y = (corner & 2) ? 0.5 : -0.5;
            double z = (corner & 4) ? 0.5 : -0.5;
            auto p = cube.transform.apply(x, y, z);
            out << "v " << fmt(p[0]) << ' ' << fmt(p[1]) << ' ' << fmt(p[2]) << '\n';
        }
        for (const int* q : quads) {
            out << "f " << base + q[0] << ' ' << base + q[1] << ' ' << base + q[2] << '\n';
            out << "f " << base + q[0] << ' ' << base + q[2] << ' ' << base + q[3] << '\n';
        }
        base += 8;
    }
}

void export_json(const std::vector<CubeInstance>& cubes, std::ostream& out) {
    nlohmann::json arr = nlohmann::json::array();
    for (const CubeInstance& cube : cubes) {
        nlohmann::json jc;
        jc["transform"] = cube.transform.m;
        jc["color"] = {cube.color.r, cube.color.g, cube.color.b, cube.color.a};
        arr.push_back(jc);
    }
    out << arr.dump(2) << '\n';
}

}  // namespace asgkit::scene3d
