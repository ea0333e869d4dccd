#include "indesign/config.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "indesign/serialize.hpp"

namespace indesign::io {

namespace {

using nlohmann::json;

template <typename T>
T require(const json& j, const std::string& field) {
    if (!j.contains(field)) throw ConfigError(field, "missing required field '" + field + "'");
    try {
        return j.at(field).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(field, "field '" + field + "' has the wrong type");
    }
}

template <typename T>
T optional_field(const json& j, const std::string& field, T fallback) {
    if (!j.contains(field)) return fallback;
    try {
        return j.at(field).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(field, "field '" + field + "' has the wrong type");
    }
}

design::KernelSpec parse_kernel(const json& j, int dim) {
    if (!j.contains("kernel")) throw ConfigError("kernel", "missing required field 'kernel'");
    const json& k = j.at("kernel");
    const std::string family = require<std::string>(k, "family");
    if (family == "tc") {
        return design::KernelSpec::tc(dim, require<double>(k, "scale"),
                                      require<double>(k, "decay"));
    }
    if (family == "dc") {
        return design::KernelSpec::dc(dim, require<double>(k, "scale"),
                                      require<double>(k, "decay"),
                                      require<double>(k, "correlation"));
    }
    throw ConfigError("kernel.family", "unknown kernel family '" + family + "'");
}

}  // namespace

design::Criterion parse_criterion(const std::string& text) {
    if (text == "d" || text == "D") return design::Criterion::D;
    if (text == "a" || text == "A") return design::Criterion::A;
    if (text == "e" || text == "E") return design::Criterion::E;
    throw ConfigError("criterion", "unknown criterion '" + text + "'");
}

std::string criterion_name(design::Criterion criterion) {
    switch (criterion) {
        case design::Criterion::D: return "d";
        case design::Criterion::A: return "a";
        case design::Criterion::E: return "e";
    }
    return "?";
}

ProblemConfig parse_config(const json& j) {
    ProblemConfig config;
    config.problem.n_signal = require<int>(j, "N");
    config.problem.n_params = require<int>(j, "n");
    config.problem.power = require<double>(j, "C");
    config.problem.sigma2 = require<double>(j, "sigma2");
    config.problem.criterion = parse_criterion(optional_field<std::string>(j, "criterion", "d"));
    config.problem.regularized = optional_field<bool>(j, "regularized", true);
    config.problem.e_min_eigenvalue_variant = optional_field<bool>(j, "e_min_variant", false);
    config.problem.kernel = parse_kernel(j, config.problem.n_params);

    if (j.contains("solver")) {
        const json& s = j.at("solver");
        config.solver.max_iter = optional_field<int>(s, "max_iter", config.solver.max_iter);
        config.solver.tol = optional_field<double>(s, "tol", config.solver.tol);
        config.solver.line_search =
            optional_field<bool>(s, "line_search", config.solver.line_search);
        const std::string variant = optional_field<std::string>(s, "variant", "standard");
        if (variant == "standard") {
            config.solver.variant = design::FwVariant::Standard;
        } else if (variant == "pairwise") {
            config.solver.variant = design::FwVariant::Pairwise;
        } else {
            throw ConfigError("solver.variant", "unknown variant '" + variant + "'");
        }
        config.solver.seed = optional_field<std::uint64_t>(s, "seed", config.solver.seed);
    }
    config.seed = optional_field<std::uint64_t>(j, "seed", 0);
    config.out_dir = optional_field<std::string>(j, "out_dir", "");

    try {
        config.problem.validate();
    } catch (const Error& e) {
        throw ConfigError("problem", e.what());
    }
    return config;
}

ProblemConfig parse_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config", "cannot open config file " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("config", std::string("config is not valid JSON: ") + e.what());
    }
    return parse_config(j);
}

nlohmann::json config_to_json(const ProblemConfig& config) {
    json k;
    switch (config.problem.kernel.family) {
        case design::KernelFamily::TC:
            k = {{"family", "tc"},
                 {"scale", config.problem.kernel.scale},
                 {"decay", config.problem.kernel.decay}};
            break;
        case design::KernelFamily::DC:
            k = {{"family", "dc"},
                 {"scale", config.problem.kernel.scale},
                 {"decay", config.problem.kernel.decay},
                 {"correlation", config.problem.kernel.correlation}};
            break;
        case design::KernelFamily::CustomDense:
            k = {{"family", "custom"}};
            break;
    }
    return json{
        {"N", config.problem.n_signal},
        {"n", config.problem.n_params},
        {"C", config.problem.power},
        {"sigma2", config.problem.sigma2},
        {"criterion", criterion_name(config.problem.criterion)},
        {"regularized", config.problem.regularized},
        {"e_min_variant", config.problem.e_min_eigenvalue_variant},
        {"kernel", k},
        {"solver",
         {{"max_iter", config.solver.max_iter},
          {"tol", config.solver.tol},
          {"line_search", config.solver.line_search},
          {"variant",
           config.solver.variant == design::FwVariant::Pairwise ? "pairwise" : "standard"},
          {"seed", config.solver.seed}}},
        {"seed", config.seed},
        // out_dir is run metadata, not part of the problem; leaving it out
        // keeps artifacts byte-identical across output locations.
    };
}

namespace {

json vector_to_json(const Eigen::VectorXd& v) {
    json arr = json::array();
    for (int i = 0; i < v.size(); ++i) arr.push_back(v[i]);
    return arr;
}

Eigen::VectorXd vector_from_json(const json& arr) {
    Eigen::VectorXd v(arr.size());
    for (std::size_t i = 0; i < arr.size(); ++i) v[static_cast<int>(i)] = arr[i].get<double>();
    return v;
}

}  // namespace

void write_artifact(const std::filesystem::path& dir, const RunArtifact& artifact) {
    std::filesystem::create_directories(dir);
    json j{
        {"config", config_to_json(artifact.config)},
        {"r_star", vector_to_json(artifact.r_star)},
        {"w_star", vector_to_json(artifact.w_star)},
        {"objective", artifact.objective},
        {"certificate", artifact.certificate},
        {"iterations", artifact.iterations},
        {"converged", artifact.converged},
        {"input_count", artifact.inputs.rows()},
    };
    std::ofstream out(dir / "artifact.json");
    if (!out) throw Error("cannot write " + (dir / "artifact.json").string());
    out << j.dump(2) << "\n";

    if (artifact.inputs.rows() > 0 || artifact.inputs.cols() > 0) {
        write_matrix_csv(dir / "inputs.csv", "inputs", artifact.inputs);
        write_matrix_csv(dir / "membership.csv", "membership", artifact.membership);
    }
}

RunArtifact read_artifact(const std::filesystem::path& dir) {
    std::ifstream in(dir / "artifact.json");
    if (!in) throw Error("cannot read " + (dir / "artifact.json").string());
    json j;
    in >> j;
    RunArtifact artifact;
    artifact.config = parse_config(j.at("config"));
    artifact.r_star = vector_from_json(j.at("r_star"));
    artifact.w_star = vector_from_json(j.at("w_star"));
    artifact.objective = j.at("objective").get<double>();
    artifact.certificate = j.at("certificate").get<double>();
    artifact.iterations = j.at("iterations").get<int>();
    artifact.converged = j.at("converged").get<bool>();
    if (std::filesystem::exists(dir / "inputs.csv")) {
        artifact.inputs = read_matrix_csv(dir / "inputs.csv");
        artifact.membership = read_matrix_csv(dir / "membership.csv");
    }
    return artifact;
}

}  // namespace indesign::io
