#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kamgrid/discounted.hpp"
#include "kamgrid/weak_kam.hpp"

namespace kamgrid {

/// Problem + run configuration mirroring the TOML layout. Validation checks
/// the structural growth/convexity preconditions (exponents > 1, weights > 0)
/// and the solver/schedule invariants.
struct ProblemConfig {
    // [problem]
    int dimension = 1;
    int resolution = 16;
    std::vector<int> anchor; // node index, defaults to the origin

    // [lagrangian]
    std::vector<double> exponents; // default: quadratic
    std::vector<double> weights;   // default: 1

    // [potential]
    std::string potential_kind = "zero"; // zero | trig | tabulated
    std::vector<TrigTerm> trig_terms;
    std::string table_path;
    int table_resolution = 0;
    std::vector<double> table_values;

    // [solver]
    double tolerance = 1e-10;
    int max_policy_iterations = 200;
    int max_inner_iterations = 20000;
    std::string method = "policy_iteration";
    int sampling_resolution = 0;

    // [schedule]
    double lambda0 = 1.0;
    double ratio = 0.5;
    double lambda_min = 1e-7;
    double step_tolerance = 1e-9;

    // [discounted]
    double discount = 1.0;

    // [simulate]
    std::uint64_t seed = 12345;
    int samples = 10000;
    double horizon = 1.0;
    std::vector<double> record_times{0.25, 0.5, 1.0};
    std::string sim_policy = "solver"; // solver | constant
    std::vector<double> constant_velocity;
    std::vector<int> chain_start;  // node index, defaults to the origin
    std::vector<double> flow_start; // torus point, defaults to the chain start

    // [mather]
    double velocity_grid_min = -3.0;
    double velocity_grid_max = 3.0;
    double velocity_grid_step = 0.25;
    int holonomic_random_tests = 20;
    bool augment_policy_velocities = true;

    // [converge]
    std::string sweep = "N"; // N | lambda | discounted | mather
    std::vector<int> resolution_sweep;
    std::vector<double> lambda_sweep;
    std::string reference = "analytic"; // analytic | self
    int reference_resolution = 0;

    void validate() const; // throws ConfigError
};

ProblemConfig load_problem_config(const std::string& path);
ProblemConfig parse_problem_config(const std::string& toml_text);

Potential build_potential(const ProblemConfig& cfg);
LagrangianSpec build_lagrangian(const ProblemConfig& cfg);
LatticeProblem build_problem(const ProblemConfig& cfg);
LatticeProblem build_problem_at(const ProblemConfig& cfg, int resolution);
SolverConfig build_solver_config(const ProblemConfig& cfg);
ContinuationSchedule build_schedule(const ProblemConfig& cfg);
std::size_t anchor_node(const ProblemConfig& cfg, const Lattice& lat);

/// Round-trips the configuration back to TOML (used by outputs so a run can
/// be reproduced from its artifacts alone).
std::string to_toml(const ProblemConfig& cfg);

} // namespace kamgrid
