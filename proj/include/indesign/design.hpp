#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "indesign/inversion.hpp"

namespace indesign::design {

enum class KernelFamily { TC, DC, CustomDense };

/// Kernel matrix specification. TC: K(i,j) = scale * decay^max(i,j) with
/// 1-based indices; DC adds a correlation factor corr^|i-j| on top of
/// scale * decay^{(i+j)/2}.
struct KernelSpec {
    KernelFamily family = KernelFamily::TC;
    int dim = 1;
    double scale = 1.0;
    double decay = 0.5;
    double correlation = 0.0;
    Eigen::MatrixXd custom;

    static KernelSpec tc(int dim, double scale, double decay);
    static KernelSpec dc(int dim, double scale, double decay, double correlation);
    static KernelSpec dense(Eigen::MatrixXd k);
};

Eigen::MatrixXd realize_kernel(const KernelSpec& spec);

enum class Criterion { D, A, E };

struct DesignProblem {
    int n_signal = 1;   // N
    int n_params = 1;   // n
    double power = 1.0; // C
    double sigma2 = 1.0;
    KernelSpec kernel;
    Criterion criterion = Criterion::D;
    bool regularized = true;            // false drops the sigma^2 K^{-1} term (LS design)
    bool e_min_eigenvalue_variant = false;  // E measures the smallest posterior eigenvalue

    void validate() const;
};

enum class FwVariant { Standard, Pairwise };

struct SolverOptions {
    int max_iter = 5000;
    double tol = 1e-6;          // stop when FW gap <= tol * (1 + |objective|)
    bool line_search = false;   // default is the open-loop 2/(t+2) step
    FwVariant variant = FwVariant::Standard;
    std::uint64_t seed = 0;
    double subgradient_step = 0.0;  // 0 = auto scale for the E criterion
    int plateau_window = 100;
    double plateau_tol = 1e-9;
    std::vector<double>* objective_trace = nullptr;  // per-iteration values when set
};

struct DesignSolution {
    inversion::Autocovariance r_star;
    inversion::SpectralWeights w_star;
    double objective = 0.0;
    double certificate = 0.0;  // FW gap, or projected-subgradient norm for E
    int iterations = 0;
    bool converged = false;
};

struct NotConverged : Error {
    DesignSolution best;
    NotConverged(const std::string& what, DesignSolution b) : Error(what), best(std::move(b)) {}
};

/// P = Toeplitz(r) + sigma^2 K^{-1} (the K term dropped when unregularized).
Eigen::MatrixXd information_matrix(const Eigen::VectorXd& r, const DesignProblem& p);

/// D: n log sigma^2 - logdet P;  A: sigma^2 tr P^{-1};  E: sigma^2 / lambda_min(P).
double objective_value(const Eigen::VectorXd& r, const DesignProblem& p);
Eigen::VectorXd objective_gradient(const Eigen::VectorXd& r, const DesignProblem& p);

/// Vertices of the feasible autocovariance polytope: r_i = C cos(2 pi k i / N)
/// for k = 0..floor(N/2).
std::vector<inversion::Autocovariance> feasible_vertices(int n_signal, int n_params, double power);

DesignSolution solve_design(const DesignProblem& p, const SolverOptions& opts = {});

/// Autocovariance of a uniformly random input on the power sphere.
inversion::Autocovariance random_feasible(int n_signal, int n_params, double power,
                                          std::uint64_t seed);

}  // namespace indesign::design
