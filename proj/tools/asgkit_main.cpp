#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "asgkit/asg.hpp"
#include "asgkit/grammar.hpp"
#include "asgkit/lattice.hpp"
#include "asgkit/model_io.hpp"
#include "asgkit/parser.hpp"
#include "asgkit/scene3d.hpp"

namespace {

constexpr const char* kVersion = "asgkit 1.0.0 (asm-version 1)";

struct RunConfig {
    std::string model_source = "scene3d";
    std::string input_path;
    std::string output_path;
    std::string format = "obj";
    bool dump_tokens = false;
    bool dump_grammar = false;
    bool dump_forest = false;
    bool dump_tree = false;
    bool dump_asg_json = false;
    bool dump_asg_dot = false;
    bool dump_model = false;
    bool strict = false;
    bool scoped_color = false;
};

int exit_code_for(asgkit::ErrorCode code) {
    using EC = asgkit::ErrorCode;
    switch (code) {
        case EC::LexError:
        case EC::SyntaxError:
        case EC::AmbiguityError:
            return 1;
        case EC::UnresolvedReference:
        case EC::ConstraintViolation:
        case EC::NextOutsideInvocation:
        case EC::NegativeParam:
        case EC::EvalError:
            return 2;
        case EC::UnknownType:
        case EC::DuplicateElementName:
        case EC::MalformedElement:
        case EC::ModelFileError:
        case EC::FreeOrderTooLarge:
            return 3;
        case EC::IoError:
            return 1;
    }
    return 1;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw asgkit::Error(asgkit::ErrorCode::IoError, "cannot open " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void diagnose(const RunConfig& config, const asgkit::Error& error,
              const std::string* source) {
    std::string location = config.input_path.empty() ? config.model_source
                                                     : config.input_path;
    if (source) {
        asgkit::LineCol lc = asgkit::line_col_at(*source, error.span().begin);
        location += ":" + std::to_string(lc.line) + ":" + std::to_string(lc.column);
    }
    std::cerr << location << ": error[" << asgkit::error_code_name(error.code())
              << "]: " << error.what() << "\n";
}

struct LoadedModel {
    asgkit::ModelSet model;
    asgkit::ConstraintRegistry registry;
};

LoadedModel load_model(const RunConfig& config) {
    if (config.model_source == "scene3d")
        return {asgkit::scene3d::build_scene3d_model(),
                asgkit::scene3d::make_constraint_registry()};
    return {asgkit::read_model(read_file(config.model_source)), {}};
}

// Validation issues go to the diagnostic stream; nonzero when errors exist.
int report_validation(const RunConfig& config, const asgkit::ValidationReport& report) {
    for (const asgkit::ValidationIssue& issue : report.issues) {
        std::cerr << config.model_source << ": "
                  << (issue.is_error ? "error[E306]" : "warning[W002]") << ": "
                  << issue.element;
        if (!issue.member.empty()) std::cerr << "." << issue.member;
        std::cerr << ": " << issue.message << "\n";
    }
    return report.ok() ? 0 : 3;
}

int run_check(const RunConfig& config) {
    LoadedModel loaded = load_model(config);
    asgkit::ValidationReport report = asgkit::validate_model(loaded.model);
    int rc = report_validation(config, report);
    if (rc != 0) return rc;
    if (config.dump_model) std::cout << asgkit::write_model(loaded.model);
    if (config.dump_grammar)
        std::cout << asgkit::dump_grammar(asgkit::synthesize(loaded.model));
    return 0;
}

struct PipelineOutput {
    asgkit::Grammar grammar;
    asgkit::InstanceGraph graph;
    int exit_code = 0;
};

PipelineOutput run_front_end(const RunConfig& config, const LoadedModel& loaded,
                             const std::string& source) {
    PipelineOutput out;
    out.grammar = asgkit::synthesize(loaded.model);
    if (config.dump_grammar) std::cout << asgkit::dump_grammar(out.grammar);

    asgkit::TokenLattice lattice = asgkit::scan(source, out.grammar);
    if (config.dump_tokens) std::cout << asgkit::dump_tokens(lattice);

    asgkit::ParseForest forest = asgkit::parse(out.grammar, lattice);
    if (config.dump_forest) std::cout << asgkit::dump_forest(forest);

    asgkit::ParseTree tree = asgkit::disambiguate(forest, out.grammar);
    if (config.dump_tree) std::cout << asgkit::dump_tree(tree);

    auto [graph, table] = asgkit::build_instances(tree, loaded.model);
    asgkit::resolve_references(graph, table);
    for (const std::string& warning : graph.warnings)
        std::cerr << config.input_path << ": warning[W001]: " << warning << "\n";
    if (config.strict && !graph.warnings.empty()) {
        std::cerr << config.input_path
                  << ": error[E206]: warnings are errors in strict mode\n";
        out.exit_code = 2;
        return out;
    }

    asgkit::ConstraintReport constraints =
        asgkit::check_constraints(graph, loaded.model, loaded.registry);
    if (!constraints.ok()) {
        for (const asgkit::ConstraintFailure& f : constraints.failures) {
            asgkit::LineCol lc = asgkit::line_col_at(source, f.span.begin);
            std::cerr << config.input_path << ":" << lc.line << ":" << lc.column
                      << ": error[E202]: " << f.element << ": " << f.message << "\n";
        }
        out.exit_code = 2;
        return out;
    }

    if (config.dump_asg_json) std::cout << asgkit::asg_to_json(graph);
    if (config.dump_asg_dot) std::cout << asgkit::asg_to_dot(graph);
    out.graph = std::move(graph);
    return out;
}

int run_parse(const RunConfig& config) {
    LoadedModel loaded = load_model(config);
    int rc = report_validation(config, asgkit::validate_model(loaded.model));
    if (rc != 0) return rc;

    std::string source = read_file(config.input_path);
    try {
        return run_front_end(config, loaded, source).exit_code;
    } catch (const asgkit::Error& error) {
        diagnose(config, error, &source);
        return exit_code_for(error.code());
    }
}

int run_render(const RunConfig& config) {
    if (config.model_source != "scene3d") {
        std::cerr << "asgkit: error[E401]: render requires the builtin scene3d model\n";
        return 3;
    }
    LoadedModel loaded = load_model(config);
    std::string source = read_file(config.input_path);
    try {
        PipelineOutput out = run_front_end(config, loaded, source);
        if (out.exit_code != 0) return out.exit_code;

        asgkit::scene3d::EvalOptions options;
        options.scoped_color = config.scoped_color;
        std::vector<asgkit::scene3d::CubeInstance> cubes =
            asgkit::scene3d::evaluate(out.graph, options);

        std::ostringstream artifact;
        if (config.format == "json")
            asgkit::scene3d::export_json(cubes, artifact);
        else
            asgkit::scene3d::export_obj(cubes, artifact);

        if (config.output_path.empty()) {
            std::cout << artifact.str();
        } else {
            std::ofstream file(config.output_path, std::ios::binary);
            if (!file)
                throw asgkit::Error(asgkit::ErrorCode::IoError,
                                    "cannot write " + config.output_path);
            file << artifact.str();
        }
        return 0;
    } catch (const asgkit::Error& error) {
        diagnose(config, error, &source);
        return exit_code_for(error.code());
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"model-driven parser generator with reference resolution"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    RunConfig config;

    auto add_common = [&](CLI::App* cmd, bool with_input) {
        cmd->add_option("--model", config.model_source,
                        "builtin model name or model-description file")
            ->capture_default_str();
        if (with_input)
            cmd->add_option("input", config.input_path, "source file")->required();
        cmd->add_flag("--strict", config.strict, "treat warnings as errors");
        cmd->add_flag("--dump-grammar", config.dump_grammar, "print the synthesized grammar");
    };

    CLI::App* check = app.add_subcommand("check", "validate a model");
    add_common(check, false);
    check->add_flag("--dump-model", config.dump_model,
                    "print the model-description file");

    CLI::App* parse = app.add_subcommand("parse", "parse input into an ASG");
    add_common(parse, true);
    parse->add_flag("--dump-tokens", config.dump_tokens, "print the token lattice");
    parse->add_flag("--dump-forest", config.dump_forest, "print the packed parse forest");
    parse->add_flag("--dump-tree", config.dump_tree, "print the disambiguated tree");
    parse->add_flag("--dump-asg-json", config.dump_asg_json, "print the ASG as JSON");
    parse->add_flag("--dump-asg-dot", config.dump_asg_dot, "print the ASG as DOT");

    CLI::App* render = app.add_subcommand("render", "parse, evaluate and export geometry");
    add_common(render, true);
    render->add_option("-o,--output", config.output_path, "output file (default stdout)");
    render->add_option("--format", config.format, "obj or json")->capture_default_str();
    render->add_flag("--scoped-color", config.scoped_color,
                     "restore color state on scope exit");

    CLI11_PARSE(app, argc, argv);

    try {
        if (check->parsed()) return run_check(config);
        if (parse->parsed()) return run_parse(config);
        return run_render(config);
    } catch (const asgkit::Error& error) {
        diagnose(config, error, nullptr);
        return exit_code_for(error.code());
    }
}
