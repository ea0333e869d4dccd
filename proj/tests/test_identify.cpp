#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "indesign/design.hpp"
#include "indesign/identify.hpp"
#include "indesign/rng.hpp"
#include "indesign/spectral.hpp"

using namespace indesign;
using identify::FirSystem;
using identify::Regressor;
using spectral::PeriodicInput;

namespace {

PeriodicInput random_input(int n, std::uint64_t seed) {
    rng::SplitMix64 gen(seed);
    Eigen::VectorXd u(n);
    for (int t = 0; t < n; ++t) u[t] = gen.gaussian();
    return PeriodicInput(u);
}

FirSystem make_system(int n, double sigma2, std::uint64_t seed) {
    rng::SplitMix64 gen(seed);
    FirSystem sys;
    sys.impulse_response.resize(n);
    for (int i = 0; i < n; ++i) sys.impulse_response[i] = gen.gaussian() * std::pow(0.8, i);
    sys.noise_variance = sigma2;
    return sys;
}

}  // namespace

TEST_CASE("regressor columns are cyclic shifts and the Gram matches the autocovariance") {
    for (int n_signal = 2; n_signal <= 32; n_signal += 5) {
        const auto u = random_input(n_signal, n_signal);
        const int n = std::max(1, n_signal / 2);
        const Regressor phi(u, n);
        for (int c = 1; c < n; ++c) {
            for (int t = 0; t < n_signal; ++t) {
                CHECK(phi.matrix()(t, c) ==
                      doctest::Approx(phi.matrix()((t - 1 + n_signal) % n_signal, c - 1)));
            }
        }
        const Eigen::MatrixXd gram = phi.matrix().transpose() * phi.matrix();
        const auto toeplitz = spectral::toeplitz_from_autocov(spectral::quadratic_map(u, n));
        CHECK((gram - toeplitz.dense()).cwiseAbs().maxCoeff() < 1e-9 * std::max(1.0, u.power()));
    }
}

TEST_CASE("noiseless simulation is the exact convolution") {
    const auto sys = make_system(3, 0.5, 1);
    const auto u = random_input(8, 2);
    const Eigen::VectorXd y = identify::simulate(sys, u, 42, /*noiseless=*/true);
    const Regressor phi(u, 3);
    CHECK((y - phi.matrix() * sys.impulse_response).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("unit impulse response shifts the impulse input") {
    FirSystem sys;
    sys.impulse_response = Eigen::VectorXd::Zero(2);
    sys.impulse_response[1] = 1.0;  // y_t = u_{t-2}
    Eigen::VectorXd u = Eigen::VectorXd::Zero(6);
    u[0] = 1.0;
    const Eigen::VectorXd y = identify::simulate(sys, PeriodicInput(u), 0, true);
    // Output samples start at t = 1, so a_2 puts the impulse one slot later.
    CHECK(y[1] == doctest::Approx(1.0));
    CHECK(std::abs(y.sum() - 1.0) < 1e-14);
}

TEST_CASE("noise sample variance approaches sigma squared") {
    const auto sys = make_system(2, 0.36, 3);
    const auto u = random_input(10, 4);
    const Regressor phi(u, 2);
    const Eigen::VectorXd clean = phi.matrix() * sys.impulse_response;
    double acc = 0.0;
    int count = 0;
    for (int rep = 0; rep < 10000; ++rep) {
        const Eigen::VectorXd y = identify::simulate(sys, u, 70000 + rep);
        acc += (y - clean).squaredNorm();
        count += static_cast<int>(y.size());
    }
    CHECK(acc / count == doctest::Approx(0.36).epsilon(0.03));
}

TEST_CASE("uniform noise also matches the requested variance") {
    const auto sys = make_system(2, 0.25, 5);
    const auto u = random_input(10, 6);
    const Regressor phi(u, 2);
    const Eigen::VectorXd clean = phi.matrix() * sys.impulse_response;
    double acc = 0.0;
    int count = 0;
    for (int rep = 0; rep < 10000; ++rep) {
        const Eigen::VectorXd y =
            identify::simulate(sys, u, 90000 + rep, false, identify::NoiseKind::Uniform);
        acc += (y - clean).squaredNorm();
        count += static_cast<int>(y.size());
    }
    CHECK(acc / count == doctest::Approx(0.25).epsilon(0.03));
}

TEST_CASE("least squares recovers the truth from noiseless data") {
    const auto sys = make_system(4, 0.5, 7);
    const auto u = random_input(12, 8);
    const Regressor phi(u, 4);
    const Eigen::VectorXd y = identify::simulate(sys, u, 0, true);
    const Eigen::VectorXd theta = identify::ls_estimate(phi, y);
    CHECK((theta - sys.impulse_response).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("least squares matches the dense normal equations") {
    for (int n_signal = 6; n_signal <= 16; n_signal += 2) {
        const auto sys = make_system(3, 0.4, n_signal);
        const auto u = random_input(n_signal, 100 + n_signal);
        const Regressor phi(u, 3);
        const Eigen::VectorXd y = identify::simulate(sys, u, 200 + n_signal);
        const Eigen::VectorXd theta = identify::ls_estimate(phi, y);
        const Eigen::MatrixXd gram = phi.matrix().transpose() * phi.matrix();
        const Eigen::VectorXd brute = gram.inverse() * phi.matrix().transpose() * y;
        CHECK((theta - brute).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("constant input cannot excite two parameters") {
    const Regressor phi(PeriodicInput(Eigen::VectorXd::Ones(8)), 2);
    CHECK_THROWS_AS(identify::ls_estimate(phi, Eigen::VectorXd::Ones(8)), IllConditioned);
}

TEST_CASE("regularized estimate approaches least squares as the prior widens") {
    const auto sys = make_system(3, 0.3, 9);
    const auto u = random_input(10, 10);
    const Regressor phi(u, 3);
    const Eigen::VectorXd y = identify::simulate(sys, u, 11);
    const Eigen::VectorXd ls = identify::ls_estimate(phi, y);
    const Eigen::MatrixXd huge_prior = 1e12 * Eigen::MatrixXd::Identity(3, 3);
    const auto rls = identify::rls_estimate(phi, y, huge_prior, 0.3);
    CHECK((rls.theta - ls).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("zero output gives the zero estimate") {
    const auto u = random_input(10, 12);
    const Regressor phi(u, 3);
    const auto rls = identify::rls_estimate(phi, Eigen::VectorXd::Zero(10),
                                            Eigen::MatrixXd::Identity(3, 3), 0.5);
    CHECK(rls.theta.cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("normal-equation and Bayesian forms of the regularized estimator agree") {
    for (int n_signal = 6; n_signal <= 16; n_signal += 5) {
        const int n = 3;
        const auto sys = make_system(n, 0.5, 13 + n_signal);
        const auto u = random_input(n_signal, 14 + n_signal);
        const Regressor phi(u, n);
        const Eigen::VectorXd y = identify::simulate(sys, u, 15 + n_signal);
        const Eigen::MatrixXd k =
            design::realize_kernel(design::KernelSpec::tc(n, 1.0, 0.8));
        const auto rls = identify::rls_estimate(phi, y, k, 0.5);
        const Eigen::MatrixXd outer =
            phi.matrix() * k * phi.matrix().transpose() +
            0.5 * Eigen::MatrixXd::Identity(n_signal, n_signal);
        const Eigen::VectorXd bayes = k * phi.matrix().transpose() * outer.llt().solve(y);
        CHECK((rls.theta - bayes).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("posterior covariance equals the scaled inverse information matrix") {
    const int n_signal = 12, n = 4;
    design::DesignProblem p;
    p.n_signal = n_signal;
    p.n_params = n;
    p.power = 3.0;
    p.sigma2 = 0.5;
    p.kernel = design::KernelSpec::tc(n, 1.0, 0.85);
    const auto u = random_input(n_signal, 21);
    const Eigen::VectorXd scaled =
        u.samples() * std::sqrt(p.power / u.power());
    const PeriodicInput input(scaled);
    const Regressor phi(input, n);
    const auto sys = make_system(n, 0.5, 22);
    const Eigen::VectorXd y = identify::simulate(sys, input, 23);
    const auto rls =
        identify::rls_estimate(phi, y, design::realize_kernel(p.kernel), p.sigma2);
    const Eigen::MatrixXd info =
        design::information_matrix(spectral::quadratic_map(input, n), p);
    const Eigen::MatrixXd expected =
        p.sigma2 * info.llt().solve(Eigen::MatrixXd::Identity(n, n));
    CHECK((rls.posterior_covariance - expected).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("non-spd kernel is rejected") {
    const auto u = random_input(8, 30);
    const Regressor phi(u, 2);
    Eigen::MatrixXd bad(2, 2);
    bad << 1, 2, 2, 1;
    CHECK_THROWS_AS(identify::rls_estimate(phi, Eigen::VectorXd::Zero(8), bad, 0.5),
                    BadHyperparameter);
}

TEST_CASE("zero trials produce an empty report") {
    design::DesignProblem p;
    p.n_signal = 8;
    p.n_params = 2;
    p.power = 2.0;
    p.sigma2 = 0.4;
    p.kernel = design::KernelSpec::tc(2, 1.0, 0.8);
    design::SolverOptions opts;
    opts.line_search = true;
    const auto solution = design::solve_design(p, opts);
    const auto sys = make_system(2, 0.4, 31);
    const auto report = identify::evaluate_design(p, solution, sys, 0, 1);
    CHECK(report.trials == 0);
    CHECK(report.records.empty());
}

TEST_CASE("designed objective dominates the baselines in every trial") {
    design::DesignProblem p;
    p.n_signal = 10;
    p.n_params = 3;
    p.power = 3.0;
    p.sigma2 = 0.5;
    p.kernel = design::KernelSpec::tc(3, 1.0, 0.85);
    design::SolverOptions opts;
    opts.line_search = true;
    const auto solution = design::solve_design(p, opts);
    const auto sys = make_system(3, 0.5, 32);
    const auto report = identify::evaluate_design(p, solution, sys, 8, 99);
    CHECK(report.trials == 8);
    for (const auto& record : report.records) {
        CHECK(report.designed_objective <= record.baseline_objective + 1e-7);
    }
}

TEST_CASE("noiseless evaluation reports zero error in both arms") {
    design::DesignProblem p;
    p.n_signal = 8;
    p.n_params = 2;
    p.power = 2.0;
    p.sigma2 = 0.4;
    p.kernel = design::KernelSpec::tc(2, 1.0, 0.8);
    design::SolverOptions opts;
    opts.line_search = true;
    const auto solution = design::solve_design(p, opts);
    const auto sys = make_system(2, 0.4, 33);
    const auto report = identify::evaluate_design(p, solution, sys, 4, 7, /*noiseless=*/true);
    CHECK(report.mean_designed_error < 1e-10);
    CHECK(report.mean_baseline_error < 1e-10);
}
