#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "indesign/design.hpp"

namespace indesign::io {

/// Config or flag value that cannot be turned into a valid problem; carries
/// the offending field for the CLI's exit-2 diagnostics.
struct ConfigError : Error {
    std::string field;
    ConfigError(const std::string& field_name, const std::string& what)
        : Error(what), field(field_name) {}
};

struct ProblemConfig {
    design::DesignProblem problem;
    design::SolverOptions solver;
    std::uint64_t seed = 0;
    std::string out_dir;
};

ProblemConfig parse_config(const nlohmann::json& j);
ProblemConfig parse_config_file(const std::filesystem::path& path);
nlohmann::json config_to_json(const ProblemConfig& config);

design::Criterion parse_criterion(const std::string& text);
std::string criterion_name(design::Criterion criterion);

/// Everything one design-plus-inversion run produces.
struct RunArtifact {
    ProblemConfig config;
    Eigen::VectorXd r_star;
    Eigen::VectorXd w_star;
    double objective = 0.0;
    double certificate = 0.0;
    int iterations = 0;
    bool converged = false;
    Eigen::MatrixXd inputs;      // one generated input per row (may be empty)
    Eigen::MatrixXd membership;  // matching (l1, scaled) rows
};

/// Writes artifact.json plus inputs.csv / membership.csv when present.
void write_artifact(const std::filesystem::path& dir, const RunArtifact& artifact);
RunArtifact read_artifact(const std::filesystem::path& dir);

}  // namespace indesign::io
