#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "indesign/design.hpp"
#include "indesign/spectral.hpp"

namespace indesign::identify {

struct FirSystem {
    Eigen::VectorXd impulse_response;  // a_1 .. a_n
    double noise_variance = 1.0;

    int order() const { return static_cast<int>(impulse_response.size()); }
};

/// Circulant regressor built from one input period: row t holds the n most
/// recent samples ending at time t.
class Regressor {
public:
    Regressor(const spectral::PeriodicInput& input, int order);

    const Eigen::MatrixXd& matrix() const { return matrix_; }
    int order() const { return static_cast<int>(matrix_.cols()); }
    int sample_count() const { return static_cast<int>(matrix_.rows()); }

private:
    Eigen::MatrixXd matrix_;
};

enum class NoiseKind { Gaussian, Uniform };

/// y = Phi theta + noise; noiseless skips the noise draw entirely.
Eigen::VectorXd simulate(const FirSystem& system, const spectral::PeriodicInput& input,
                         std::uint64_t seed, bool noiseless = false,
                         NoiseKind kind = NoiseKind::Gaussian);

Eigen::VectorXd ls_estimate(const Regressor& phi, const Eigen::VectorXd& y);

struct RlsEstimate {
    Eigen::VectorXd theta;
    Eigen::MatrixXd posterior_covariance;  // sigma^2 (Phi^T Phi + sigma^2 K^{-1})^{-1}
};

RlsEstimate rls_estimate(const Regressor& phi, const Eigen::VectorXd& y, const Eigen::MatrixXd& k,
                         double sigma2);

struct TrialRecord {
    double designed_error;   // ||theta_hat - theta||^2 with the designed input
    double baseline_error;   // same under a random feasible autocovariance
    double baseline_objective;
};

struct DesignEvaluation {
    int trials = 0;
    double designed_objective = 0.0;
    double mean_designed_error = 0.0;
    double mean_baseline_error = 0.0;
    double mean_baseline_objective = 0.0;
    std::vector<TrialRecord> records;
};

/// Monte-Carlo comparison of the designed autocovariance against random
/// feasible baselines: draw inputs, simulate, estimate, accumulate errors.
DesignEvaluation evaluate_design(const design::DesignProblem& problem,
                                 const design::DesignSolution& solution, const FirSystem& system,
                                 int trials, std::uint64_t seed, bool noiseless = false);

}  // namespace indesign::identify
