#include "kamgrid/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "kamgrid/errors.hpp"
#include "kamgrid/toml.hpp"

namespace kamgrid {

namespace {

double number_or(const toml::Table& t, const std::string& key, double fallback) {
    const toml::Value* v = toml::find(t, key);
    return v ? v->as_number() : fallback;
}

std::int64_t integer_or(const toml::Table& t, const std::string& key, std::int64_t fallback) {
    const toml::Value* v = toml::find(t, key);
    return v ? v->as_integer() : fallback;
}

std::string string_or(const toml::Table& t, const std::string& key, const std::string& fallback) {
    const toml::Value* v = toml::find(t, key);
    return v ? v->as_string() : fallback;
}

bool bool_or(const toml::Table& t, const std::string& key, bool fallback) {
    const toml::Value* v = toml::find(t, key);
    return v ? v->as_bool() : fallback;
}

std::vector<double> number_list(const toml::Value& v, const std::string& key) {
    if (!v.is_array()) throw ConfigError("config: '" + key + "' must be an array");
    std::vector<double> out;
    for (const auto& item : v.as_array()) out.push_back(item.as_number());
    return out;
}

std::vector<int> integer_list(const toml::Value& v, const std::string& key) {
    if (!v.is_array()) throw ConfigError("config: '" + key + "' must be an array");
    std::vector<int> out;
    for (const auto& item : v.as_array()) out.push_back(static_cast<int>(item.as_integer()));
    return out;
}

} // namespace

ProblemConfig parse_problem_config(const std::string& toml_text) {
    toml::Table root = toml::parse(toml_text);
    ProblemConfig cfg;

    if (const toml::Value* v = toml::find(root, "problem")) {
        const auto& t = v->as_table();
        cfg.dimension = static_cast<int>(integer_or(t, "dimension", cfg.dimension));
        cfg.resolution = static_cast<int>(integer_or(t, "resolution", cfg.resolution));
        if (const toml::Value* a = toml::find(t, "anchor"))
            cfg.anchor = integer_list(*a, "problem.anchor");
    }

    if (const toml::Value* v = toml::find(root, "lagrangian")) {
        const auto& t = v->as_table();
        if (const toml::Value* e = toml::find(t, "exponents"))
            cfg.exponents = number_list(*e, "lagrangian.exponents");
        if (const toml::Value* w = toml::find(t, "weights"))
            cfg.weights = number_list(*w, "lagrangian.weights");
    }

    if (const toml::Value* v = toml::find(root, "potential")) {
        const auto& t = v->as_table();
        cfg.potential_kind = string_or(t, "kind", cfg.potential_kind);
        if (const toml::Value* terms = toml::find(t, "terms")) {
            if (!terms->is_array()) throw ConfigError("config: potential.terms must be an array");
            for (const auto& row : terms->as_array()) {
                auto nums = number_list(row, "potential.terms entry");
                if (static_cast<int>(nums.size()) != cfg.dimension + 2)
                    throw ConfigError("config: potential.terms rows need d wave numbers, "
                                      "a cosine and a sine coefficient");
                TrigTerm term;
                for (int a = 0; a < cfg.dimension; ++a)
                    term.wave.push_back(static_cast<int>(std::llround(nums[a])));
                term.cos_coeff = nums[cfg.dimension];
                term.sin_coeff = nums[cfg.dimension + 1];
                cfg.trig_terms.push_back(std::move(term));
            }
        }
        cfg.table_path = string_or(t, "path", cfg.table_path);
        cfg.table_resolution = static_cast<int>(integer_or(t, "resolution", cfg.table_resolution));
        if (const toml::Value* vals = toml::find(t, "values"))
            cfg.table_values = number_list(*vals, "potential.values");
    }

    if (const toml::Value* v = toml::find(root, "solver")) {
        const auto& t = v->as_table();
        cfg.tolerance = number_or(t, "tolerance", cfg.tolerance);
        cfg.max_policy_iterations =
            static_cast<int>(integer_or(t, "max_policy_iterations", cfg.max_policy_iterations));
        cfg.max_inner_iterations =
            static_cast<int>(integer_or(t, "max_inner_iterations", cfg.max_inner_iterations));
        cfg.method = string_or(t, "method", cfg.method);
        cfg.sampling_resolution =
            static_cast<int>(integer_or(t, "sampling_resolution", cfg.sampling_resolution));
    }

    if (const toml::Value* v = toml::find(root, "schedule")) {
        const auto& t = v->as_table();
        cfg.lambda0 = number_or(t, "lambda0", cfg.lambda0);
        cfg.ratio = number_or(t, "ratio", cfg.ratio);
        cfg.lambda_min = number_or(t, "lambda_min", cfg.lambda_min);
        cfg.step_tolerance = number_or(t, "step_tolerance", cfg.step_tolerance);
    }

    if (const toml::Value* v = toml::find(root, "discounted")) {
        const auto& t = v->as_table();
        cfg.discount = number_or(t, "lambda", cfg.discount);
    }

    if (const toml::Value* v = toml::find(root, "simulate")) {
        const auto& t = v->as_table();
        cfg.seed = static_cast<std::uint64_t>(integer_or(t, "seed", static_cast<std::int64_t>(cfg.seed)));
        cfg.samples = static_cast<int>(integer_or(t, "samples", cfg.samples));
        cfg.horizon = number_or(t, "horizon", cfg.horizon);
        if (const toml::Value* times = toml::find(t, "times"))
            cfg.record_times = number_list(*times, "simulate.times");
        cfg.sim_policy = string_or(t, "policy", cfg.sim_policy);
        if (const toml::Value* cv = toml::find(t, "constant_velocity"))
            cfg.constant_velocity = number_list(*cv, "simulate.constant_velocity");
        if (const toml::Value* cs = toml::find(t, "chain_start"))
            cfg.chain_start = integer_list(*cs, "simulate.chain_start");
        if (const toml::Value* fs = toml::find(t, "flow_start"))
            cfg.flow_start = number_list(*fs, "simulate.flow_start");
    }

    if (const toml::Value* v = toml::find(root, "mather")) {
        const auto& t = v->as_table();
        cfg.velocity_grid_min = number_or(t, "velocity_grid_min", cfg.velocity_grid_min);
        cfg.velocity_grid_max = number_or(t, "velocity_grid_max", cfg.velocity_grid_max);
        cfg.velocity_grid_step = number_or(t, "velocity_grid_step", cfg.velocity_grid_step);
        cfg.holonomic_random_tests =
            static_cast<int>(integer_or(t, "random_tests", cfg.holonomic_random_tests));
        cfg.augment_policy_velocities =
            bool_or(t, "augment_policy_velocities", cfg.augment_policy_velocities);
    }

    if (const toml::Value* v = toml::find(root, "converge")) {
        const auto& t = v->as_table();
        cfg.sweep = string_or(t, "sweep", cfg.sweep);
        if (const toml::Value* res = toml::find(t, "resolutions"))
            cfg.resolution_sweep = integer_list(*res, "converge.resolutions");
        if (const toml::Value* ls = toml::find(t, "lambdas"))
            cfg.lambda_sweep = number_list(*ls, "converge.lambdas");
        cfg.reference = string_or(t, "reference", cfg.reference);
        cfg.reference_resolution =
            static_cast<int>(integer_or(t, "reference_resolution", cfg.reference_resolution));
    }

    if (cfg.exponents.empty()) cfg.exponents.assign(cfg.dimension, 2.0);
    if (cfg.weights.empty()) cfg.weights.assign(cfg.dimension, 1.0);
    cfg.validate();
    return cfg;
}

ProblemConfig load_problem_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_problem_config(buf.str());
}

void ProblemConfig::validate() const {
    if (dimension < 1) throw ConfigError("config: dimension must be >= 1");
    if (resolution < 2) throw ConfigError("config: resolution must be >= 2");
    if (static_cast<int>(exponents.size()) != dimension)
        throw ConfigError("config: lagrangian.exponents must have one entry per axis");
    if (static_cast<int>(weights.size()) != dimension)
        throw ConfigError("config: lagrangian.weights must have one entry per axis");
    for (double e : exponents)
        if (!(e > 1.0)) throw ConfigError("config: kinetic exponents must exceed 1");
    for (double w : weights)
        if (!(w > 0.0)) throw ConfigError("config: kinetic weights must be positive");
    if (potential_kind != "zero" && potential_kind != "trig" && potential_kind != "tabulated")
        throw ConfigError("config: potential.kind must be zero, trig or tabulated");
    if (potential_kind == "tabulated" && table_path.empty() && table_values.empty())
        throw ConfigError("config: tabulated potential needs values or a path");
    if (!(tolerance > 0.0)) throw ConfigError("config: solver.tolerance must be positive");
    if (method != "policy_iteration" && method != "value_iteration")
        throw ConfigError("config: solver.method must be policy_iteration or value_iteration");
    if (!(ratio > 0.0 && ratio < 1.0)) throw ConfigError("config: schedule.ratio must lie in (0,1)");
    if (!(lambda0 > 0.0) || !(lambda_min > 0.0) || lambda_min > lambda0)
        throw ConfigError("config: schedule must satisfy 0 < lambda_min <= lambda0");
    if (!(discount > 0.0)) throw ConfigError("config: discounted.lambda must be positive");
    if (samples < 1) throw ConfigError("config: simulate.samples must be >= 1");
    if (horizon < 0.0) throw ConfigError("config: simulate.horizon must be >= 0");
    if (sim_policy != "solver" && sim_policy != "constant")
        throw ConfigError("config: simulate.policy must be solver or constant");
    if (!(velocity_grid_step > 0.0))
        throw ConfigError("config: mather.velocity_grid_step must be positive");
    if (velocity_grid_min > velocity_grid_max)
        throw ConfigError("config: mather velocity grid is empty");
    if (!anchor.empty() && static_cast<int>(anchor.size()) != dimension)
        throw ConfigError("config: problem.anchor must have one entry per axis");
}

Potential build_potential(const ProblemConfig& cfg) {
    if (cfg.potential_kind == "zero") return Potential::zero(cfg.dimension);
    if (cfg.potential_kind == "trig") return Potential::trig(cfg.dimension, cfg.trig_terms);
    std::vector<double> values = cfg.table_values;
    int res = cfg.table_resolution;
    if (values.empty()) {
        std::ifstream in(cfg.table_path);
        if (!in) throw ConfigError("config: cannot open potential table '" + cfg.table_path + "'");
        double x = 0.0;
        while (in >> x) values.push_back(x);
    }
    if (res == 0) {
        // infer a d-th root when unspecified
        double guess = std::pow(static_cast<double>(values.size()), 1.0 / cfg.dimension);
        res = static_cast<int>(std::llround(guess));
    }
    return Potential::tabulated(cfg.dimension, res, std::move(values));
}

LagrangianSpec build_lagrangian(const ProblemConfig& cfg) {
    std::vector<KineticAxis> axes(cfg.dimension);
    for (int a = 0; a < cfg.dimension; ++a) axes[a] = {cfg.exponents[a], cfg.weights[a]};
    return power_lagrangian(std::move(axes), build_potential(cfg));
}

LatticeProblem build_problem(const ProblemConfig& cfg) {
    return build_problem_at(cfg, cfg.resolution);
}

LatticeProblem build_problem_at(const ProblemConfig& cfg, int resolution) {
    return LatticeProblem(Lattice(cfg.dimension, resolution), build_lagrangian(cfg));
}

SolverConfig build_solver_config(const ProblemConfig& cfg) {
    SolverConfig sc;
    sc.tolerance = cfg.tolerance;
    sc.max_policy_iterations = cfg.max_policy_iterations;
    sc.max_inner_iterations = cfg.max_inner_iterations;
    sc.method = cfg.method == "value_iteration" ? SolverConfig::Method::value_iteration
                                                : SolverConfig::Method::policy_iteration;
    sc.sampling_resolution = cfg.sampling_resolution;
    return sc;
}

ContinuationSchedule build_schedule(const ProblemConfig& cfg) {
    ContinuationSchedule s;
    s.lambda0 = cfg.lambda0;
    s.ratio = cfg.ratio;
    s.lambda_min = cfg.lambda_min;
    s.step_tolerance = cfg.step_tolerance;
    return s;
}

std::size_t anchor_node(const ProblemConfig& cfg, const Lattice& lat) {
    if (cfg.anchor.empty()) return 0;
    return lat.flat_index(cfg.anchor);
}

std::string to_toml(const ProblemConfig& cfg) {
    std::ostringstream os;
    os.precision(17);
    os << "[problem]\n";
    os << "dimension = " << cfg.dimension << "\n";
    os << "resolution = " << cfg.resolution << "\n";
    if (!cfg.anchor.empty()) {
        os << "anchor = [";
        for (std::size_t i = 0; i < cfg.anchor.size(); ++i)
            os << (i ? ", " : "") << cfg.anchor[i];
        os << "]\n";
    }
    os << "\n[lagrangian]\n";
    os << "exponents = [";
    for (std::size_t i = 0; i < cfg.exponents.size(); ++i)
        os << (i ? ", " : "") << cfg.exponents[i];
    os << "]\nweights = [";
    for (std::size_t i = 0; i < cfg.weights.size(); ++i) os << (i ? ", " : "") << cfg.weights[i];
    os << "]\n";
    os << "\n[potential]\n";
    os << "kind = \"" << cfg.potential_kind << "\"\n";
    if (!cfg.trig_terms.empty()) {
        os << "terms = [";
        for (std::size_t i = 0; i < cfg.trig_terms.size(); ++i) {
            const auto& t = cfg.trig_terms[i];
            os << (i ? ", " : "") << "[";
            for (int k : t.wave) os << k << ", ";
            os << t.cos_coeff << ", " << t.sin_coeff << "]";
        }
        os << "]\n";
    }
    if (!cfg.table_path.empty()) os << "path = \"" << cfg.table_path << "\"\n";
    if (cfg.table_resolution > 0) os << "resolution = " << cfg.table_resolution << "\n";
    os << "\n[solver]\n";
    os << "tolerance = " << cfg.tolerance << "\n";
    os << "max_policy_iterations = " << cfg.max_policy_iterations << "\n";
    os << "max_inner_iterations = " << cfg.max_inner_iterations << "\n";
    os << "method = \"" << cfg.method << "\"\n";
    os << "\n[schedule]\n";
    os << "lambda0 = " << cfg.lambda0 << "\n";
    os << "ratio = " << cfg.ratio << "\n";
    os << "lambda_min = " << cfg.lambda_min << "\n";
    os << "step_tolerance = " << cfg.step_tolerance << "\n";
    os << "\n[discounted]\n";
    os << "lambda = " << cfg.discount << "\n";
    os << "\n[simulate]\n";
    os << "seed = " << cfg.seed << "\n";
    os << "samples = " << cfg.samples << "\n";
    os << "horizon = " << cfg.horizon << "\n";
    os << "times = [";
    for (std::size_t i = 0; i < cfg.record_times.size(); ++i)
        os << (i ? ", " : "") << cfg.record_times[i];
    os << "]\n";
    os << "policy = \"" << cfg.sim_policy << "\"\n";
    if (!cfg.constant_velocity.empty()) {
        os << "constant_velocity = [";
        for (std::size_t i = 0; i < cfg.constant_velocity.size(); ++i)
            os << (i ? ", " : "") << cfg.constant_velocity[i];
        os << "]\n";
    }
    os << "\n[mather]\n";
    os << "velocity_grid_min = " << cfg.velocity_grid_min << "\n";
    os << "velocity_grid_max = " << cfg.velocity_grid_max << "\n";
    os << "velocity_grid_step = " << cfg.velocity_grid_step << "\n";
    os << "random_tests = " << cfg.holonomic_random_tests << "\n";
    os << "augment_policy_velocities = " << (cfg.augment_policy_velocities ? "true" : "false")
       << "\n";
    os << "\n[converge]\n";
    os << "sweep = \"" << cfg.sweep << "\"\n";
    if (!cfg.resolution_sweep.empty()) {
        os << "resolutions = [";
        for (std::size_t i = 0; i < cfg.resolution_sweep.size(); ++i)
            os << (i ? ", " : "") << cfg.resolution_sweep[i];
        os << "]\n";
    }
    if (!cfg.lambda_sweep.empty()) {
        os << "lambdas = [";
        for (std::size_t i = 0; i < cfg.lambda_sweep.size(); ++i)
            os << (i ? ", " : "") << cfg.lambda_sweep[i];
        os << "]\n";
    }
    os << "reference = \"" << cfg.reference << "\"\n";
    if (cfg.reference_resolution > 0)
        os << "reference_resolution = " << cfg.reference_resolution << "\n";
    return os.str();
}

} // namespace kamgrid
