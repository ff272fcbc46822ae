#include "varkit/cli.hpp"

#include "varkit/customization.hpp"
#include "varkit/error.hpp"
#include "varkit/model_io.hpp"
#include "varkit/product.hpp"
#include "varkit/service.hpp"
#include "varkit/session.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace varkit::cli {

namespace {

int status_for(ErrorCode code)
{
    switch (code) {
    case ErrorCode::ParseError:
    case ErrorCode::MissingAttribute:
    case ErrorCode::UnknownElement:
    case ErrorCode::NotFound:
    case ErrorCode::UnknownArea:
    case ErrorCode::DuplicateAnswer:
    case ErrorCode::DuplicateElementId:
    case ErrorCode::DanglingEdge:
        return kUsage;
    default:
        return kFindings;
    }
}

std::string join(const std::vector<std::string>& items, std::string_view separator)
{
    std::string out;
    for (const auto& item : items) {
        if (!out.empty())
            out += separator;
        out += item;
    }
    return out;
}

std::string join(const std::vector<Ref>& refs, std::string_view separator)
{
    std::vector<std::string> ids;
    for (const auto& ref : refs)
        ids.push_back(ref.id);
    return join(ids, separator);
}

void write_file(const std::string& path, const std::string& content)
{
    std::ofstream file(path, std::ios::binary);
    if (!file || !(file << content))
        throw Error(ErrorCode::NotFound, "cannot write '" + path + "'");
}

void print_findings(const ValidationReport& report, std::ostream& out)
{
    for (const auto& f : report.errors)
        out << "error " << f.code << (f.location.empty() ? "" : " " + f.location) << ": " << f.message << "\n";
    for (const auto& f : report.warnings)
        out << "warning " << f.code << (f.location.empty() ? "" : " " + f.location) << ": " << f.message << "\n";
}

void print_warnings(const std::vector<Finding>& warnings, std::ostream& err)
{
    for (const auto& w : warnings)
        err << "warning " << w.code << " " << w.location << ": " << w.message << "\n";
}

// Loads and validates; returns nullopt after printing the report if invalid.
std::optional<VariabilityModel> load_valid_model(const std::string& path, std::ostream& err)
{
    auto model = parse_model(read_file(path));
    auto report = validate_model(model);
    if (!report.valid()) {
        print_findings(report, err);
        err << report.errors.size() << " errors\n";
        return std::nullopt;
    }
    return model;
}

void print_conflicts(const std::vector<Conflict>& conflicts, std::ostream& out)
{
    for (const auto& c : conflicts)
        out << "conflict " << c.code << " " << c.ref << ": " << c.message << "\n";
}

struct BatchResult {
    std::optional<ConfigurationSession> session;
    std::vector<Conflict> conflicts;
    std::string rejected;  // the decision that clashed
};

// Applies answers first, then exclusions, stopping at the first clash.
BatchResult run_answers(const VariabilityModel& model, const std::string& area, const AnswersDocument& answers)
{
    BatchResult result;
    result.session.emplace(model, area);
    auto& session = *result.session;
    if (!session.inherent_conflicts().empty()) {
        result.conflicts = session.inherent_conflicts();
        return result;
    }
    auto apply = [&](const std::string& variant, const std::vector<std::string>& values) {
        auto outcome = session.answer(variant, values);
        if (!outcome.accepted()) {
            result.conflicts = outcome.conflicts;
            result.rejected = variant;
            return false;
        }
        return true;
    };
    for (const auto& entry : answers.answers)
        if (!apply(entry.variant, entry.values))
            return result;
    for (const auto& variant : answers.exclusions)
        if (!apply(variant, {}))
            return result;
    return result;
}

AnswersDocument load_answers(const std::string& path, const std::string& area)
{
    auto answers = parse_answers(read_file(path));
    if (answers.area != area)
        throw Error(ErrorCode::UnknownArea, "answers file is for area '" + answers.area + "', not '" + area + "'");
    return answers;
}

// The requirement document seen as a model transformation: empty answers
// read as exclusions, as they do in a session.
AnswersDocument as_requirements(AnswersDocument answers)
{
    AnswersDocument requirements;
    requirements.area = answers.area;
    requirements.exclusions = answers.exclusions;
    for (auto& entry : answers.answers) {
        if (entry.values.empty())
            requirements.exclusions.push_back(entry.variant);
        else
            requirements.answers.push_back(std::move(entry));
    }
    return requirements;
}

void print_pending(const ConfigurationSession& session, std::ostream& out)
{
    for (const auto& decision : session.pending_decisions()) {
        const auto& row = decision.row;
        out << "[" << row.trace << "] " << row.question << " (" << to_string(row.relation) << ")";
        if (decision.blocked)
            out << " blocked: requires " << join(decision.unmet, ", ");
        out << "\n";
        for (const auto& option : row.options)
            out << "    " << option.id << " " << option.name << " [" << to_string(session.value_state(option.id))
                << "]\n";
    }
}

int interactive(ConfigurationSession& session, std::istream& in, std::ostream& out)
{
    out << "Answer with '<variant> <value>...', '<variant> none' to exclude, 'retract <variant>', or 'quit'.\n";
    std::string line;
    for (;;) {
        if (session.current_configuration().complete())
            break;
        print_pending(session, out);
        out << "> " << std::flush;
        if (!std::getline(in, line))
            break;
        std::istringstream words(line);
        std::vector<std::string> tokens;
        for (std::string token; words >> token;)
            tokens.push_back(token);
        if (tokens.empty())
            continue;
        if (tokens[0] == "quit" || tokens[0] == "exit")
            break;
        try {
            PropagationOutcome outcome;
            if (tokens[0] == "retract" && tokens.size() == 2) {
                outcome = session.retract(normalize_tag(tokens[1]));
            } else {
                std::vector<std::string> values(tokens.begin() + 1, tokens.end());
                if (values.size() == 1 && values[0] == "none")
                    values.clear();
                outcome = session.answer(normalize_tag(tokens[0]), values);
            }
            if (!outcome.accepted()) {
                print_conflicts(outcome.conflicts, out);
                continue;
            }
            if (!outcome.forced.empty())
                out << "forced: " << join(outcome.forced, ", ") << "\n";
            if (!outcome.excluded.empty())
                out << "excluded: " << join(outcome.excluded, ", ") << "\n";
            if (!outcome.released.empty())
                out << "released: " << join(outcome.released, ", ") << "\n";
        } catch (const Error& e) {
            out << e.what() << "\n";
        }
    }
    return 0;
}

void print_status(const ConfigurationSession& session, std::ostream& out)
{
    auto status = session.current_configuration();
    if (status.complete()) {
        out << "configuration: complete\n" << format_configuration(session.scope(), *status.configuration);
    } else {
        out << "configuration: incomplete\nundecided: " << join(status.undecided, ", ") << "\n";
    }
}

std::string configuration_line(const VariabilityModel& scope, const Configuration& configuration)
{
    std::string text = format_configuration(scope, configuration);
    if (text.empty())
        return "(nothing selected)";
    std::replace(text.begin(), text.end(), '\n', ';');
    text.pop_back();
    return text;
}

} // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Variability model toolkit: validate, prune, configure and derive family members", "varkit"};
    app.require_subcommand(1);

    std::string model_path, area, output, answers_path, product_path, graph_path, model_dir, static_dir, host;
    bool interactive_mode = false, count_only = false, force = false;
    int port = 8080;
    long idle_seconds = 24 * 3600;

    auto* validate = app.add_subcommand("validate", "check a model and print its findings");
    validate->add_option("model", model_path, "model file (.vml.xml)")->required();

    auto* prune = app.add_subcommand("prune", "keep only the variants applicable in one area");
    prune->add_option("model", model_path)->required();
    prune->add_option("--area", area)->required();
    prune->add_option("-o,--output", output, "write the pruned model here instead of stdout");

    auto* table = app.add_subcommand("table", "print the derived decision table");
    table->add_option("model", model_path)->required();
    table->add_option("--area", area, "prune to this area first");

    auto* render = app.add_subcommand("render", "print the variant table");
    render->add_option("model", model_path)->required();

    auto* configure = app.add_subcommand("configure", "apply answers (batch) or run an interactive session");
    configure->add_option("model", model_path)->required();
    configure->add_option("--area", area)->required();
    auto* answers_opt = configure->add_option("--answers", answers_path, "answers file (.answers.json)");
    auto* interactive_opt = configure->add_flag("--interactive", interactive_mode, "prompt on stdin/stdout");
    configure->add_option("-o,--output", output, "write the customized model here");
    answers_opt->excludes(interactive_opt);
    interactive_opt->excludes(answers_opt);

    auto* derive = app.add_subcommand("derive", "derive a customized product model");
    derive->add_option("model", model_path)->required();
    derive->add_option("--area", area)->required();
    derive->add_option("--answers", answers_path)->required();
    derive->add_option("--product", product_path)->required();
    derive->add_option("-o,--output", output)->required();
    derive->add_option("--graph", graph_path, "also write the graph text export here");
    derive->add_flag("--force", force, "downgrade unresolved tags to warnings");

    auto* enumerate = app.add_subcommand("enumerate", "list every valid configuration of an area (brute force)");
    enumerate->add_option("model", model_path)->required();
    enumerate->add_option("--area", area)->required();
    enumerate->add_flag("--count-only", count_only);

    auto* serve = app.add_subcommand("serve", "run the configuration service");
    if (const char* env = std::getenv("VARKIT_PORT"))
        port = std::atoi(env);
    if (const char* env = std::getenv("VARKIT_MODEL_DIR"))
        model_dir = env;
    host = "127.0.0.1";
    serve->add_option("--port", port, "listen port (env VARKIT_PORT)")->check(CLI::Range(0, 65535));
    serve->add_option("--model-dir", model_dir, "preload *.vml.xml models (env VARKIT_MODEL_DIR)");
    serve->add_option("--host", host);
    serve->add_option("--idle-timeout", idle_seconds, "session idle expiry in seconds")->check(CLI::PositiveNumber);
    serve->add_option("--static-dir", static_dir, "serve static assets (the configurator UI) from here");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return kSuccess;
        }
        err << "varkit: " << e.what() << "\n" << "run 'varkit --help' for usage\n";
        return kUsage;
    }

    try {
        if (validate->parsed()) {
            auto model = parse_model(read_file(model_path));
            auto report = validate_model(model);
            print_findings(report, out);
            out << report.errors.size() << " errors\n";
            if (!report.warnings.empty())
                out << report.warnings.size() << " warnings\n";
            return report.valid() ? kSuccess : kFindings;
        }

        if (serve->parsed()) {
            service::ServiceOptions options;
            options.idle_timeout = std::chrono::seconds(idle_seconds);
            service::ConfigService svc(options);
            if (!model_dir.empty())
                for (const auto& problem : svc.load_model_dir(model_dir))
                    err << "skipped " << problem << "\n";
            service::HttpFrontend frontend(svc, static_dir);
            int bound = frontend.bind(host, port);
            if (bound < 0) {
                err << "varkit: cannot listen on " << host << ":" << port << "\n";
                return kUsage;
            }
            out << "listening on http://" << host << ":" << bound << "\n" << std::flush;
            frontend.listen();
            return kSuccess;
        }

        auto model = load_valid_model(model_path, err);
        if (!model)
            return kFindings;

        if (prune->parsed()) {
            auto pruned = prune_by_area(*model, area);
            print_warnings(pruned.warnings, err);
            auto document = write_model(pruned.model);
            if (output.empty())
                out << document;
            else
                write_file(output, document);
            return kSuccess;
        }

        if (table->parsed()) {
            auto scope = area.empty() ? *model : prune_by_area(*model, area).model;
            out << render_decision_table(derive_decision_table(scope));
            return kSuccess;
        }

        if (render->parsed()) {
            out << render_variant_table(*model);
            return kSuccess;
        }

        if (configure->parsed()) {
            if (interactive_mode) {
                ConfigurationSession session(*model, area);
                interactive(session, in, out);
                print_status(session, out);
                return kSuccess;
            }
            if (answers_path.empty()) {
                err << "varkit: configure needs --answers <file> or --interactive\n";
                return kUsage;
            }
            auto answers = load_answers(answers_path, area);
            auto batch = run_answers(*model, area, answers);
            if (!batch.conflicts.empty()) {
                if (!batch.rejected.empty())
                    out << "rejected decision for " << batch.rejected << "\n";
                print_conflicts(batch.conflicts, out);
                return kFindings;
            }
            auto customized = apply_requirements(prune_by_area(*model, area).model, as_requirements(answers));
            print_warnings(customized.warnings, err);
            out << render_variant_table(customized.model);
            if (!output.empty())
                write_file(output, write_model(customized.model));
            print_status(*batch.session, out);
            return kSuccess;
        }

        if (derive->parsed()) {
            auto answers = load_answers(answers_path, area);
            auto product = parse_product_model(read_file(product_path));
            auto batch = run_answers(*model, area, answers);
            if (!batch.conflicts.empty()) {
                print_conflicts(batch.conflicts, out);
                return kFindings;
            }
            auto status = batch.session->current_configuration();
            if (!status.complete()) {
                out << "configuration incomplete; undecided: " << join(status.undecided, ", ") << "\n";
                return kFindings;
            }
            auto derivation = derive_customized_product(*model, product, *status.configuration, {force});
            for (const auto& warning : derivation.report.warnings)
                err << "warning " << warning << "\n";
            write_file(output, write_product_model(derivation.product));
            if (!graph_path.empty())
                write_file(graph_path, export_graph_text(derivation.product));
            out << "retained " << derivation.product.elements.size() << " of " << product.elements.size()
                << " elements\n";
            for (const auto& removed : derivation.report.removed)
                out << "removed " << removed.id << (removed.tag ? " (" + removed.tag->id + ")" : "") << "\n";
            for (const auto& end : derivation.report.dangling)
                out << "dangling " << (end.outgoing ? "outgoing" : "incoming") << " " << end.element << ": "
                    << end.edge.from << " -> " << end.edge.to << "\n";
            return kSuccess;
        }

        if (enumerate->parsed()) {
            auto configurations = enumerate_configurations(*model, area);
            if (!count_only) {
                auto scope = prune_by_area(*model, area).model;
                for (const auto& configuration : configurations)
                    out << configuration_line(scope, configuration) << "\n";
            }
            out << configurations.size() << (count_only ? "\n" : " configurations\n");
            return kSuccess;
        }
    } catch (const Error& e) {
        err << "varkit: " << e.what() << "\n";
        return status_for(e.code());
    }
    return kUsage;
}

} // namespace varkit::cli
