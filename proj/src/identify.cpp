#include "indesign/identify.hpp"

#include <cmath>
#include <string>

#include "indesign/inversion.hpp"
#include "indesign/rng.hpp"

namespace indesign::identify {

Regressor::Regressor(const spectral::PeriodicInput& input, int order) {
    const int n_samples = input.size();
    if (order < 1 || order > n_samples) throw BadDimension("Regressor: need 1 <= n <= N");
    matrix_.resize(n_samples, order);
    for (int t = 0; t < n_samples; ++t)
        for (int c = 0; c < order; ++c)
            matrix_(t, c) = input.samples()[(t - c + n_samples) % n_samples];
}

Eigen::VectorXd simulate(const FirSystem& system, const spectral::PeriodicInput& input,
                         std::uint64_t seed, bool noiseless, NoiseKind kind) {
    const Regressor phi(input, system.order());
    Eigen::VectorXd y = phi.matrix() * system.impulse_response;
    if (noiseless) return y;
    if (!(system.noise_variance > 0.0)) {
        throw BadDimension("simulate: noise variance must be > 0 unless noiseless");
    }
    rng::SplitMix64 gen(seed);
    const double sigma = std::sqrt(system.noise_variance);
    if (kind == NoiseKind::Gaussian) {
        for (int t = 0; t < y.size(); ++t) y[t] += sigma * gen.gaussian();
    } else {
        const double half_width = std::sqrt(3.0 * system.noise_variance);
        for (int t = 0; t < y.size(); ++t) y[t] += gen.uniform(-half_width, half_width);
    }
    return y;
}

Eigen::VectorXd ls_estimate(const Regressor& phi, const Eigen::VectorXd& y) {
    if (y.size() != phi.sample_count()) throw BadDimension("ls_estimate: y has wrong length");
    const Eigen::MatrixXd gram = phi.matrix().transpose() * phi.matrix();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
    const double hi = eig.eigenvalues().maxCoeff();
    const double lo = eig.eigenvalues().minCoeff();
    if (!(hi > 0.0) || lo <= 1e-10 * hi) {
        throw IllConditioned("ls_estimate: Gram matrix condition beyond 1e10");
    }
    return phi.matrix().colPivHouseholderQr().solve(y);
}

RlsEstimate rls_estimate(const Regressor& phi, const Eigen::VectorXd& y, const Eigen::MatrixXd& k,
                         double sigma2) {
    if (y.size() != phi.sample_count()) throw BadDimension("rls_estimate: y has wrong length");
    const int n = phi.order();
    if (k.rows() != n || k.cols() != n) throw BadHyperparameter("rls_estimate: kernel size");
    if (!(sigma2 > 0.0)) throw BadHyperparameter("rls_estimate: sigma2 must be > 0");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(k, Eigen::EigenvaluesOnly);
    if (!(eig.eigenvalues().minCoeff() > 0.0)) {
        throw BadHyperparameter("rls_estimate: kernel is not positive definite");
    }
    const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);
    const Eigen::MatrixXd info = phi.matrix().transpose() * phi.matrix() +
                                 sigma2 * k.llt().solve(eye);
    Eigen::LLT<Eigen::MatrixXd> llt(info);
    if (llt.info() != Eigen::Success) throw IllConditioned("rls_estimate: singular system");
    RlsEstimate out;
    out.theta = llt.solve(phi.matrix().transpose() * y);
    out.posterior_covariance = sigma2 * llt.solve(eye);
    return out;
}

DesignEvaluation evaluate_design(const design::DesignProblem& problem,
                                 const design::DesignSolution& solution, const FirSystem& system,
                                 int trials, std::uint64_t seed, bool noiseless) {
    if (trials < 0) throw BadDimension("evaluate_design: trials must be >= 0");
    if (system.order() != problem.n_params) {
        throw BadDimension("evaluate_design: system order must equal n");
    }
    DesignEvaluation report;
    report.trials = trials;
    if (trials == 0) return report;

    const Eigen::MatrixXd kernel = design::realize_kernel(problem.kernel);
    report.designed_objective = design::objective_value(solution.r_star.values(), problem);

    // In the noiseless limit the regularizer vanishes with sigma^2, so the
    // estimator reduces to plain least squares there.
    const auto estimate = [&](const spectral::PeriodicInput& input, const Eigen::VectorXd& y) {
        const Regressor phi(input, problem.n_params);
        if (noiseless) return Eigen::VectorXd(phi.matrix().colPivHouseholderQr().solve(y));
        return rls_estimate(phi, y, kernel, problem.sigma2).theta;
    };

    const int n_signal = problem.n_signal;
    const std::complex<double> gamma{0.5, 0.0};
    for (int trial = 0; trial < trials; ++trial) {
        const std::uint64_t trial_seed = rng::derive(seed, trial);

        const auto designed_input = inversion::giie(
            solution.r_star, n_signal, gamma,
            inversion::PhaseAssignment::random(n_signal, rng::derive(trial_seed, 1)),
            rng::derive(trial_seed, 2));
        const Eigen::VectorXd y =
            simulate(system, designed_input, rng::derive(trial_seed, 3), noiseless);
        const Eigen::VectorXd designed_theta = estimate(designed_input, y);

        const auto baseline_r = design::random_feasible(n_signal, problem.n_params, problem.power,
                                                        rng::derive(trial_seed, 4));
        const auto baseline_input = inversion::giie(
            baseline_r, n_signal, gamma,
            inversion::PhaseAssignment::random(n_signal, rng::derive(trial_seed, 5)),
            rng::derive(trial_seed, 6));
        const Eigen::VectorXd y_baseline =
            simulate(system, baseline_input, rng::derive(trial_seed, 7), noiseless);
        const Eigen::VectorXd baseline_theta = estimate(baseline_input, y_baseline);

        TrialRecord record;
        record.designed_error = (designed_theta - system.impulse_response).squaredNorm();
        record.baseline_error = (baseline_theta - system.impulse_response).squaredNorm();
        record.baseline_objective = design::objective_value(baseline_r.values(), problem);
        report.mean_designed_error += record.designed_error;
        report.mean_baseline_error += record.baseline_error;
        report.mean_baseline_objective += record.baseline_objective;
        report.records.push_back(record);
    }
    report.mean_designed_error /= trials;
    report.mean_baseline_error /= trials;
    report.mean_baseline_objective /= trials;
    return report;
}

}  // namespace indesign::identify
