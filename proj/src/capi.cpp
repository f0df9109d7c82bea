#include "bikeqn.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <memory>
#include <string>

#include <json.hpp>

#include "bikeqn/config.hpp"
#include "bikeqn/pathgraph.hpp"

using nlohmann::json;

struct bqn_model {
    bikeqn::ParsedConfig config;
    bikeqn::BikeShareModel model;
    bool irreducible = false;
};

namespace {

char* copy_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out) std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

void set_error(char** error, const std::string& message) {
    if (error) *error = copy_string(json{{"message", message}}.dump() + "\n");
}

bqn_status status_of(const bikeqn::Error& e) {
    return static_cast<bqn_status>(static_cast<int>(e.error_class()));
}

// Applies option overrides on top of the config file's solver section.
bikeqn::SolverOptions merge_solver_options(const bqn_model& handle, const json& options) {
    bikeqn::SolverOptions merged = handle.config.solver;
    if (options.contains("tol")) merged.tol = options.at("tol").get<double>();
    if (options.contains("damping")) merged.damping = options.at("damping").get<double>();
    if (options.contains("max_iter")) merged.max_iter = options.at("max_iter").get<int>();
    if (options.contains("max_states")) {
        std::int64_t cap = options.at("max_states").get<std::int64_t>();
        if (cap < 1) throw bikeqn::DimensionError("max_states must be >= 1");
        merged.max_states = static_cast<std::uint64_t>(cap);
    }
    if (options.contains("init")) {
        const json& init = options.at("init");
        if (init.is_number()) {
            merged.init = Eigen::VectorXd::Constant(handle.model.station_count,
                                                    init.get<double>());
        } else {
            Eigen::VectorXd v(init.size());
            for (size_t i = 0; i < init.size(); ++i) v(static_cast<int>(i)) = init[i].get<double>();
            merged.init = v;
        }
    }
    if (options.contains("road_factor_convention")) {
        std::string name = options.at("road_factor_convention").get<std::string>();
        if (name == "paper")
            merged.convention = bikeqn::RoadFactorConvention::paper;
        else if (name == "bcmp")
            merged.convention = bikeqn::RoadFactorConvention::bcmp;
        else
            throw bikeqn::DimensionError("road_factor_convention must be \"paper\" or \"bcmp\"");
    }
    return merged;
}

json parse_options(const char* options_json) {
    if (!options_json || !*options_json) return json::object();
    json options = json::parse(options_json, nullptr, false);
    if (options.is_discarded() || !options.is_object())
        throw bikeqn::DimensionError("options must be a JSON object");
    return options;
}

struct SolveOutcome {
    bikeqn::FixedPointResult result;
    bikeqn::ProductFormContext ctx;
    bikeqn::PerformanceReport report;
};

SolveOutcome run_solve(const bqn_model& handle, const bikeqn::SolverOptions& options) {
    if (!handle.irreducible)
        throw bikeqn::ReducibleMatrix(
            "path graph is not strongly connected; the solver requires an irreducible model");
    bikeqn::FixedPointConfig cfg = bikeqn::to_fixed_point_config(options);
    bikeqn::FixedPointResult result = bikeqn::solve_fixed_point(handle.model, cfg);
    bikeqn::ProductFormContext ctx =
        bikeqn::build_context(handle.model, result.pi, cfg.convention, cfg.max_states);
    bikeqn::PerformanceReport report = bikeqn::build_report(ctx);
    return SolveOutcome{std::move(result), std::move(ctx), std::move(report)};
}

void attach_csv_fields(json& doc, const SolveOutcome& outcome, const bqn_model& handle,
                       const json& options) {
    if (options.value("emit_routing_csv", false)) {
        bikeqn::RoutingMatrix routing =
            bikeqn::build_routing_matrix(handle.model, outcome.result.pi);
        doc["routing_csv"] = bikeqn::routing_csv(routing);
    }
    if (options.value("emit_marginals_csv", false))
        doc["marginals_csv"] = bikeqn::marginals_csv(outcome.ctx);
    if (options.value("emit_stations_csv", false))
        doc["stations_csv"] = bikeqn::stations_csv(outcome.report);
}

}  // namespace

extern "C" {

const char* bqn_version(void) { return "1.0.0"; }

const char* bqn_status_name(bqn_status status) {
    switch (status) {
        case BQN_OK: return "ok";
        case BQN_ERR_SCHEMA: return "schema_error";
        case BQN_ERR_MODEL: return "model_error";
        case BQN_ERR_REDUCIBLE: return "reducible";
        case BQN_ERR_NO_CONVERGENCE: return "no_convergence";
        case BQN_ERR_STATE_SPACE: return "state_space_too_large";
        case BQN_ERR_BAD_ARGUMENT: return "bad_argument";
        case BQN_ERR_INTERNAL: return "internal_error";
    }
    return "unknown";
}

void bqn_string_free(char* s) { std::free(s); }

bqn_status bqn_model_parse(const char* config_json, bqn_model** out, char** error) {
    if (!config_json || !out) {
        set_error(error, "config_json and out must be non-NULL");
        return BQN_ERR_BAD_ARGUMENT;
    }
    *out = nullptr;
    try {
        auto handle = std::make_unique<bqn_model>();
        handle->config = bikeqn::parse_config(config_json);
        handle->model = bikeqn::validate_model(handle->config.raw);
        handle->irreducible = bikeqn::is_irreducible(bikeqn::build_path_graph(handle->model));
        *out = handle.release();
        return BQN_OK;
    } catch (const bikeqn::ValidationError& e) {
        if (error) *error = copy_string(bikeqn::findings_to_json(e.findings()));
        return status_of(e);
    } catch (const bikeqn::Error& e) {
        set_error(error, e.what());
        return status_of(e);
    } catch (const json::exception& e) {
        set_error(error, e.what());
        return BQN_ERR_BAD_ARGUMENT;
    } catch (const std::exception& e) {
        set_error(error, e.what());
        return BQN_ERR_INTERNAL;
    }
}

void bqn_model_free(bqn_model* model) { delete model; }

int bqn_model_station_count(const bqn_model* model) {
    return model ? model->model.station_count : 0;
}

int bqn_model_is_irreducible(const bqn_model* model) {
    return model && model->irreducible ? 1 : 0;
}

bqn_status bqn_model_echo_config(const bqn_model* model, char** json_out) {
    if (!model || !json_out) return BQN_ERR_BAD_ARGUMENT;
    *json_out = copy_string(bikeqn::echo_config(model->config));
    return BQN_OK;
}

bqn_status bqn_solve(const bqn_model* model, const char* options_json, char** result_json,
                     char** error) {
    if (!model || !result_json) {
        set_error(error, "model and result_json must be non-NULL");
        return BQN_ERR_BAD_ARGUMENT;
    }
    *result_json = nullptr;
    try {
        json options = parse_options(options_json);
        bikeqn::SolverOptions solver = merge_solver_options(*model, options);
        SolveOutcome outcome = run_solve(*model, solver);
        json doc = json::parse(
            bikeqn::solve_result_to_json(outcome.result, outcome.report));
        attach_csv_fields(doc, outcome, *model, options);
        *result_json = copy_string(doc.dump(2) + "\n");
        if (!outcome.result.converged) {
            set_error(error, "fixed point did not reach tolerance within max_iter");
            return BQN_ERR_NO_CONVERGENCE;
        }
        return BQN_OK;
    } catch (const bikeqn::Error& e) {
        set_error(error, e.what());
        return status_of(e);
    } catch (const json::exception& e) {
        set_error(error, e.what());
        return BQN_ERR_BAD_ARGUMENT;
    } catch (const std::exception& e) {
        set_error(error, e.what());
        return BQN_ERR_INTERNAL;
    }
}

bqn_status bqn_report(const bqn_model* model, const char* options_json, char** report_json,
                      char** error) {
    if (!model || !report_json) {
        set_error(error, "model and report_json must be non-NULL");
        return BQN_ERR_BAD_ARGUMENT;
    }
    *report_json = nullptr;
    try {
        json options = parse_options(options_json);
        bikeqn::SolverOptions solver = merge_solver_options(*model, options);
        SolveOutcome outcome = run_solve(*model, solver);
        json doc = json::parse(bikeqn::report_to_json(outcome.report));
        attach_csv_fields(doc, outcome, *model, options);
        *report_json = copy_string(doc.dump(2) + "\n");
        if (!outcome.result.converged) {
            set_error(error, "fixed point did not reach tolerance within max_iter");
            return BQN_ERR_NO_CONVERGENCE;
        }
        return BQN_OK;
    } catch (const bikeqn::Error& e) {
        set_error(error, e.what());
        return status_of(e);
    } catch (const json::exception& e) {
        set_error(error, e.what());
        return BQN_ERR_BAD_ARGUMENT;
    } catch (const std::exception& e) {
        set_error(error, e.what());
        return BQN_ERR_INTERNAL;
    }
}

bqn_status bqn_routing_csv(const bqn_model* model, const double* pi, int pi_len, char** csv_out,
                           char** error) {
    if (!model || !pi || !csv_out) {
        set_error(error, "model, pi and csv_out must be non-NULL");
        return BQN_ERR_BAD_ARGUMENT;
    }
    *csv_out = nullptr;
    try {
        Eigen::VectorXd vec = Eigen::Map<const Eigen::VectorXd>(pi, pi_len);
        bikeqn::RoutingMatrix routing = bikeqn::build_routing_matrix(model->model, vec);
        *csv_out = copy_string(bikeqn::routing_csv(routing));
        return BQN_OK;
    } catch (const bikeqn::Error& e) {
        set_error(error, e.what());
        return status_of(e);
    } catch (const json::exception& e) {
        set_error(error, e.what());
        return BQN_ERR_BAD_ARGUMENT;
    } catch (const std::exception& e) {
        set_error(error, e.what());
        return BQN_ERR_INTERNAL;
    }
}

bqn_status bqn_simulate(const bqn_model* model, const char* options_json, char** report_json,
                        char** error) {
    if (!model || !report_json) {
        set_error(error, "model and report_json must be non-NULL");
        return BQN_ERR_BAD_ARGUMENT;
    }
    *report_json = nullptr;
    try {
        json options = parse_options(options_json);
        bikeqn::SimConfig sim = model->config.sim;
        if (options.contains("events")) sim.events = options.at("events").get<std::uint64_t>();
        if (options.contains("warmup")) sim.warmup = options.at("warmup").get<double>();
        if (options.contains("seed")) sim.seed = options.at("seed").get<std::uint64_t>();
        if (options.contains("replications"))
            sim.replications = options.at("replications").get<int>();

        bikeqn::SimReport report = bikeqn::simulate(model->model, sim);
        json sim_doc = json::parse(bikeqn::sim_report_to_json(report));

        if (!options.value("compare", false)) {
            *report_json = copy_string(sim_doc.dump(2) + "\n");
            return BQN_OK;
        }

        bikeqn::SolverOptions solver = merge_solver_options(*model, options);
        SolveOutcome outcome = run_solve(*model, solver);
        json doc;
        doc["simulation"] = sim_doc;
        doc["analytic"] = json::parse(bikeqn::report_to_json(outcome.report));
        json comparison = json::array();
        for (int i = 0; i < model->model.station_count; ++i) {
            double analytic = outcome.report.full_prob(i);
            double empirical = report.mean.full_prob(i);
            comparison.push_back({{"station", i + 1},
                                  {"analytic_full", analytic},
                                  {"empirical_full", empirical},
                                  {"abs_gap", std::abs(analytic - empirical)}});
        }
        doc["comparison"] = comparison;
        *report_json = copy_string(doc.dump(2) + "\n");
        return BQN_OK;
    } catch (const bikeqn::Error& e) {
        set_error(error, e.what());
        return status_of(e);
    } catch (const json::exception& e) {
        set_error(error, e.what());
        return BQN_ERR_BAD_ARGUMENT;
    } catch (const std::exception& e) {
        set_error(error, e.what());
        return BQN_ERR_INTERNAL;
    }
}

}  // extern "C"
