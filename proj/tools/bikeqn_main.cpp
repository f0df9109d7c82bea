// Command-line front end. Links the C API only (bikeqn.h); all analysis
// happens behind the shared library boundary.

#include <bikeqn.h>

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

namespace {

using nlohmann::json;

struct OwnedString {
    char* value = nullptr;
    ~OwnedString() { bqn_string_free(value); }
    std::string str() const { return value ? std::string(value) : std::string(); }
    char** out() { return &value; }
};

int fail(const std::string& message, int code) {
    std::cerr << "error: " << message << "\n";
    return code;
}

std::optional<std::string> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

bool write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) return false;
    out << content;
    return bool(out);
}

void emit(const std::string& content, const std::string& out_path) {
    if (out_path.empty())
        std::cout << content;
    else if (!write_file(out_path, content))
        std::cerr << "error: cannot write " << out_path << "\n";
}

// Side files land next to --out (result.json -> result.routing.csv), or in
// the working directory when writing to stdout.
std::string side_file(const std::string& out_path, const std::string& suffix) {
    if (out_path.empty()) return suffix;
    std::filesystem::path p(out_path);
    p.replace_extension();
    return p.string() + "." + suffix;
}

void print_error_payload(const std::string& payload) {
    if (!payload.empty()) std::cerr << payload;
}

struct SolverFlags {
    double tol = -1.0;
    double damping = -1.0;
    int max_iter = -1;
    long long max_states = -1;
    std::string convention;

    void add_to(CLI::App* cmd) {
        cmd->add_option("--tol", tol, "fixed-point residual tolerance");
        cmd->add_option("--damping", damping, "Picard damping factor in (0,1]");
        cmd->add_option("--max-iter", max_iter, "fixed-point iteration cap");
        cmd->add_option("--max-states", max_states, "state-space size cap");
        cmd->add_option("--road-factor-convention", convention,
                        "road factor form: paper or bcmp")
            ->check(CLI::IsMember({"paper", "bcmp"}));
    }

    void apply(json& options) const {
        if (tol >= 0.0) options["tol"] = tol;
        if (damping >= 0.0) options["damping"] = damping;
        if (max_iter >= 0) options["max_iter"] = max_iter;
        if (max_states >= 0) {
            options["max_states"] = max_states;
        } else if (const char* env = std::getenv("CQN_MAX_STATES")) {
            try {
                options["max_states"] = std::stoll(env);
            } catch (const std::exception&) {
                std::cerr << "warning: ignoring unparsable CQN_MAX_STATES=" << env << "\n";
            }
        }
        if (!convention.empty()) options["road_factor_convention"] = convention;
    }
};

struct ParsedModel {
    bqn_model* handle = nullptr;
    ~ParsedModel() { bqn_model_free(handle); }
};

// Parses the config file; on failure prints the findings and returns the
// exit code (0 means success).
int load_model(const std::string& path, ParsedModel& model) {
    auto text = read_file(path);
    if (!text) return fail("cannot read " + path, 1);
    OwnedString error;
    bqn_status status = bqn_model_parse(text->c_str(), &model.handle, error.out());
    if (status != BQN_OK) {
        print_error_payload(error.str());
        return static_cast<int>(status);
    }
    return 0;
}

int cmd_validate(const std::string& path, bool echo_config) {
    auto text = read_file(path);
    if (!text) return fail("cannot read " + path, 1);

    ParsedModel model;
    OwnedString error;
    bqn_status status = bqn_model_parse(text->c_str(), &model.handle, error.out());
    if (status != BQN_OK) {
        json findings = json::parse(error.str(), nullptr, false);
        if (findings.is_discarded()) findings = json::array();
        // schema failures arrive as one {"message": ...} object
        if (findings.is_object())
            findings = json::array({{{"code", "schema"},
                                     {"where", "config"},
                                     {"message", findings.value("message", "")}}});
        json doc;
        doc["findings"] = findings;
        doc["valid"] = false;
        std::cout << doc.dump(2) << "\n";
        return static_cast<int>(status);
    }

    if (echo_config) {
        OwnedString config;
        bqn_model_echo_config(model.handle, config.out());
        std::cout << config.str();
        return 0;
    }

    bool irreducible = bqn_model_is_irreducible(model.handle) != 0;
    json doc;
    doc["findings"] = json::array();
    doc["valid"] = true;
    doc["path_graph"] = irreducible ? "irreducible" : "reducible";
    std::cout << doc.dump(2) << "\n";
    return irreducible ? 0 : 3;
}

int cmd_solve(const std::string& path, const SolverFlags& flags, const std::string& out_path,
              bool dump_routing, bool marginals) {
    ParsedModel model;
    if (int code = load_model(path, model)) return code;

    json options = json::object();
    flags.apply(options);
    if (dump_routing) options["emit_routing_csv"] = true;
    if (marginals) options["emit_marginals_csv"] = true;

    OwnedString result, error;
    bqn_status status = bqn_solve(model.handle, options.dump().c_str(), result.out(), error.out());
    if (status != BQN_OK && status != BQN_ERR_NO_CONVERGENCE) {
        print_error_payload(error.str());
        return static_cast<int>(status);
    }

    json doc = json::parse(result.str());
    if (dump_routing) {
        std::string csv_path = side_file(out_path, "routing.csv");
        if (!write_file(csv_path, doc["routing_csv"].get<std::string>()))
            std::cerr << "error: cannot write " << csv_path << "\n";
        doc.erase("routing_csv");
    }
    if (marginals) {
        std::string csv_path = side_file(out_path, "marginals.csv");
        if (!write_file(csv_path, doc["marginals_csv"].get<std::string>()))
            std::cerr << "error: cannot write " << csv_path << "\n";
        doc.erase("marginals_csv");
    }
    emit(doc.dump(2) + "\n", out_path);
    if (status == BQN_ERR_NO_CONVERGENCE) {
        print_error_payload(error.str());
        return 4;
    }
    return 0;
}

int cmd_report(const std::string& path, const SolverFlags& flags, const std::string& out_path,
               bool marginals) {
    ParsedModel model;
    if (int code = load_model(path, model)) return code;

    json options = json::object();
    flags.apply(options);
    options["emit_stations_csv"] = true;
    if (marginals) options["emit_marginals_csv"] = true;

    OwnedString result, error;
    bqn_status status = bqn_report(model.handle, options.dump().c_str(), result.out(), error.out());
    if (status != BQN_OK && status != BQN_ERR_NO_CONVERGENCE) {
        print_error_payload(error.str());
        return static_cast<int>(status);
    }

    json doc = json::parse(result.str());
    std::string stations_path = side_file(out_path, "stations.csv");
    if (!write_file(stations_path, doc["stations_csv"].get<std::string>()))
        std::cerr << "error: cannot write " << stations_path << "\n";
    doc.erase("stations_csv");
    if (marginals) {
        std::string csv_path = side_file(out_path, "marginals.csv");
        if (!write_file(csv_path, doc["marginals_csv"].get<std::string>()))
            std::cerr << "error: cannot write " << csv_path << "\n";
        doc.erase("marginals_csv");
    }
    emit(doc.dump(2) + "\n", out_path);
    if (status == BQN_ERR_NO_CONVERGENCE) {
        print_error_payload(error.str());
        return 4;
    }
    return 0;
}

int cmd_simulate(const std::string& path, const SolverFlags& flags, const std::string& out_path,
                 long long events, long long seed, int replications, double warmup, bool compare) {
    ParsedModel model;
    if (int code = load_model(path, model)) return code;

    if (!bqn_model_is_irreducible(model.handle))
        std::cerr << "warning: path graph is not strongly connected; the physical system is "
                     "simulated anyway, but the analytic solver would reject this model\n";

    json options = json::object();
    if (events >= 0) options["events"] = events;
    if (seed >= 0) options["seed"] = seed;
    if (replications >= 0) options["replications"] = replications;
    if (warmup >= 0.0) options["warmup"] = warmup;
    if (compare) {
        options["compare"] = true;
        flags.apply(options);
    }

    OwnedString result, error;
    bqn_status status =
        bqn_simulate(model.handle, options.dump().c_str(), result.out(), error.out());
    if (status != BQN_OK) {
        print_error_payload(error.str());
        return static_cast<int>(status);
    }
    emit(result.str(), out_path);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Closed queueing network analysis of bike sharing systems"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_path;
    bool echo_config = false;
    bool dump_routing = false;
    bool marginals = false;
    bool compare = false;
    long long events = -1;
    long long seed = -1;
    int replications = -1;
    double warmup = -1.0;
    SolverFlags solver_flags;

    CLI::App* validate = app.add_subcommand(
        "validate", "check a config file and report the irreducibility verdict");
    validate->add_option("config", config_path, "model config JSON")->required();
    validate->add_flag("--echo-config", echo_config,
                       "print the canonical form of the parsed config and exit");

    CLI::App* solve =
        app.add_subcommand("solve", "solve the fixed point and print the result document");
    solve->add_option("config", config_path, "model config JSON")->required();
    solve->add_option("--out", out_path, "write the JSON document here instead of stdout");
    solve->add_flag("--dump-routing", dump_routing,
                    "also write the routing matrix at the converged point as CSV");
    solve->add_flag("--marginals", marginals, "also write per-station marginal CSVs");
    solver_flags.add_to(solve);

    CLI::App* report =
        app.add_subcommand("report", "solve and print the performance report");
    report->add_option("config", config_path, "model config JSON")->required();
    report->add_option("--out", out_path, "write the JSON report here instead of stdout");
    report->add_flag("--marginals", marginals, "also write per-station marginal CSVs");
    solver_flags.add_to(report);

    CLI::App* simulate =
        app.add_subcommand("simulate", "run the discrete-event simulation of the physical system");
    simulate->add_option("config", config_path, "model config JSON")->required();
    simulate->add_option("--out", out_path, "write the JSON report here instead of stdout");
    simulate->add_option("--events", events, "scheduler events per replication");
    simulate->add_option("--seed", seed, "reproducibility seed");
    simulate->add_option("--replications", replications, "independent replications");
    simulate->add_option("--warmup", warmup, "warmup fraction of events in [0, 0.9]");
    simulate->add_flag("--compare", compare,
                       "also solve analytically and tabulate per-station gaps");
    solver_flags.add_to(simulate);

    CLI11_PARSE(app, argc, argv);

    try {
        if (validate->parsed()) return cmd_validate(config_path, echo_config);
        if (solve->parsed())
            return cmd_solve(config_path, solver_flags, out_path, dump_routing, marginals);
        if (report->parsed()) return cmd_report(config_path, solver_flags, out_path, marginals);
        if (simulate->parsed())
            return cmd_simulate(config_path, solver_flags, out_path, events, seed, replications,
                                warmup, compare);
    } catch (const std::exception& e) {
        return fail(e.what(), 7);
    }
    return 1;
}
