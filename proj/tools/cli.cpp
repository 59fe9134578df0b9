#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <fstream>
#include <map>
#include <memory>
#include <ostream>

#include "commands.hpp"
#include "fraccalc/error.hpp"
#include "io.hpp"

namespace fraccalc::cli {

namespace {

struct Bound {
    const CommandSpec* spec = nullptr;
    CLI::App* app = nullptr;
    std::map<std::string, std::string> values;  ///< option name -> text given on the command line
    std::map<std::string, bool> flags;
    std::map<std::string, CLI::Option*> options;
};

json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open config '" + path + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw UsageError("config '" + path + "': " + e.what());
    }
    if (!doc.is_object()) throw UsageError("config '" + path + "' must be a JSON object");
    for (const auto& [k, v] : doc.items()) {
        if (k != "command" && k != "format" && k != "args") throw UsageError("config: unknown key '" + k + "'");
    }
    if (doc.contains("args") && !doc["args"].is_object()) throw UsageError("config: 'args' must be an object");
    return doc;
}

std::string config_value_text(const std::string& key, const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number_integer() || v.is_number_unsigned()) return v.dump();
    if (v.is_number_float()) return format_number(v.get<double>());
    throw UsageError("config: value of '" + key + "' must be a string, number or boolean");
}

int dispatch(Bound& cmd, const json& file_config, const std::string& cli_format, const std::string& out_path,
             std::ostream& out) {
    std::map<std::string, std::string> values;
    for (const OptionSpec& o : cmd.spec->options) {
        values[o.name] = o.flag ? "false" : o.fallback;
    }
    if (file_config.contains("args")) {
        for (const auto& [k, v] : file_config["args"].items()) {
            if (!values.count(k)) throw UsageError("config: '" + cmd.spec->name + "' has no option '" + k + "'");
            values[k] = config_value_text(k, v);
        }
    }
    for (const OptionSpec& o : cmd.spec->options) {
        if (o.flag) {
            if (cmd.flags[o.name]) values[o.name] = "true";
        } else if (cmd.options[o.name]->count() > 0) {
            values[o.name] = cmd.values[o.name];
        }
    }

    const Output result = cmd.spec->handler(Args(values));

    std::string format = cli_format;
    if (format.empty()) format = file_config.value("format", std::string());
    if (format.empty()) format = result.default_format;
    if (format != "csv" && format != "json") throw UsageError("--format must be csv or json, got '" + format + "'");

    json echo;
    echo["command"] = cmd.spec->name;
    echo["format"] = format;
    json& args = echo["args"] = json::object();
    for (const OptionSpec& o : cmd.spec->options) {
        if (!values[o.name].empty()) args[o.name] = values[o.name];
    }

    if (out_path.empty()) {
        write_output(result, echo, format, out);
    } else {
        std::ofstream file(out_path);
        if (!file) throw UsageError("cannot write '" + out_path + "'");
        write_output(result, echo, format, file);
    }
    return kSuccess;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Fractional calculus toolkit", "fraccalc_tool"};
    app.require_subcommand(0, 1);
    std::string out_path;
    std::string format;
    std::string config_path;
    bool version = false;
    app.add_option("--out,-o", out_path, "write results to this file instead of stdout");
    app.add_option("--format", format, "csv or json");
    app.add_option("--config", config_path, "JSON file {\"command\", \"format\", \"args\": {...}}");
    app.add_flag("--version", version, "print the version");

    std::vector<std::unique_ptr<Bound>> bound;
    for (const CommandSpec& spec : command_specs()) {
        auto b = std::make_unique<Bound>();
        b->spec = &spec;
        b->app = app.add_subcommand(spec.name, spec.help);
        b->app->fallthrough();
        for (const OptionSpec& o : spec.options) {
            std::string help = o.help;
            if (!o.fallback.empty()) help += " [" + o.fallback + "]";
            if (o.flag) {
                b->options[o.name] = b->app->add_flag("--" + o.name, b->flags[o.name], help);
            } else {
                b->options[o.name] = b->app->add_option("--" + o.name, b->values[o.name], help);
            }
        }
        bound.push_back(std::move(b));
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            app.exit(e, out, err);
            return kSuccess;
        }
        err << "error: " << e.what() << "\n";
        return kUsage;
    }

    if (version) {
        out << "fraccalc_tool " << kVersion << "\n";
        return kSuccess;
    }

    try {
        json file_config = json::object();
        if (!config_path.empty()) file_config = load_config(config_path);

        Bound* chosen = nullptr;
        for (auto& b : bound) {
            if (b->app->parsed()) chosen = b.get();
        }
        if (file_config.contains("command")) {
            const std::string name = config_value_text("command", file_config["command"]);
            if (chosen && chosen->spec->name != name) {
                throw UsageError("config is for '" + name + "' but the command line asks for '" + chosen->spec->name + "'");
            }
            if (!chosen) {
                for (auto& b : bound) {
                    if (b->spec->name == name) chosen = b.get();
                }
                if (!chosen) throw UsageError("config: unknown command '" + name + "'");
            }
        }
        if (!chosen) {
            err << app.help();
            return kUsage;
        }
        return dispatch(*chosen, file_config, format, out_path, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const ModelRestriction& e) {
        err << "error: " << e.what() << "\n";
        return kRestriction;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kNumerical;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    }
}

}  // namespace fraccalc::cli
