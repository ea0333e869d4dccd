#include "indesign/inversion.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "indesign/rng.hpp"

namespace indesign::inversion {

namespace {

using std::complex;

constexpr double kTwoPi = 2.0 * std::numbers::pi;

int half_bin_count(int n_signal) { return n_signal / 2 + 1; }

/// min 0.5 ||A x - target||^2 s.t. x >= 0, by projected gradient with
/// Nesterov acceleration and function-value restarts.
struct NnlsOutcome {
    Eigen::VectorXd x;
    double residual;
    int iterations;
};

NnlsOutcome accelerated_projected_nnls(const Eigen::MatrixXd& a, const Eigen::VectorXd& target,
                                       const Eigen::VectorXd& start, double power,
                                       const SpectrumSolveOptions& opts) {
    const Eigen::MatrixXd gram = a.transpose() * a;
    const Eigen::VectorXd rhs = a.transpose() * target;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
    double lips = eig.eigenvalues().maxCoeff();
    if (!(lips > 0.0)) lips = 1.0;

    const double residual_stop = opts.residual_stop_factor * std::max(power, 1e-300);

    Eigen::VectorXd x = start.cwiseMax(0.0);
    Eigen::VectorXd y = x;
    Eigen::VectorXd res_x = a * x - target;
    double f_x = 0.5 * res_x.squaredNorm();
    double theta = 1.0;

    int t = 0;
    while (t < opts.max_iter) {
        if (res_x.norm() <= residual_stop) break;
        ++t;

        Eigen::VectorXd grad_y = gram * y - rhs;
        Eigen::VectorXd x_next = (y - grad_y / lips).cwiseMax(0.0);
        Eigen::VectorXd res_next = a * x_next - target;
        double f_next = 0.5 * res_next.squaredNorm();

        if (f_next > f_x) {
            // Momentum overshot: plain projected step from x, reset momentum.
            const Eigen::VectorXd grad_x = gram * x - rhs;
            const double stationarity = (x - (x - grad_x).cwiseMax(0.0)).norm();
            x_next = (x - grad_x / lips).cwiseMax(0.0);
            res_next = a * x_next - target;
            f_next = 0.5 * res_next.squaredNorm();
            y = x_next;
            theta = 1.0;
            if (stationarity <= opts.projection_stop) {
                x = x_next;
                res_x = res_next;
                break;
            }
        } else {
            const double theta_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * theta * theta));
            y = x_next + ((theta - 1.0) / theta_next) * (x_next - x);
            theta = theta_next;
        }
        x = x_next;
        res_x = res_next;
        f_x = f_next;

        if (t % 64 == 0) {
            const Eigen::VectorXd grad_x = gram * x - rhs;
            if ((x - (x - grad_x).cwiseMax(0.0)).norm() <= opts.projection_stop) break;
        }
    }
    return {std::move(x), res_x.norm(), t};
}

Eigen::VectorXd dirichlet_start(int bins, double total, std::uint64_t seed) {
    rng::SplitMix64 gen(seed);
    Eigen::VectorXd x(bins);
    for (int i = 0; i < bins; ++i) x[i] = gen.exponential();
    return x * (total / x.sum());
}

void check_negative(const Eigen::VectorXd& x, double power, double factor, const char* where) {
    const double low = x.minCoeff();
    if (low < -factor * std::max(power, 1.0)) {
        throw DegenerateNegative(std::string(where) + ": entry " + std::to_string(low) +
                                 " below tolerance");
    }
}

void check_feasible(double residual, double power, double factor, const char* where) {
    if (residual > factor * std::max(power, 1e-300)) {
        throw Infeasible(std::string(where) + ": best residual " + std::to_string(residual) +
                         " exceeds " + std::to_string(factor) + " * C",
                         residual);
    }
}

/// Feasibility step shared by fdie/giie: reduced nonnegative solve, or the
/// closed-form unique solution when N = n.
SpectralWeights solve_reduced(const Eigen::MatrixXd& reduced, const Autocovariance& r,
                              int n_signal, std::uint64_t seed, const SpectrumSolveOptions& opts) {
    const int n = r.size();
    const double power = r.power();

    if (n_signal == n) {
        // Unique solution: the scaled forward transform of r itself.
        const spectral::RootTable roots(n);
        const double scale = 1.0 / static_cast<double>(n);  // (1/sqrt(n)) * (1/sqrt(n))
        Eigen::VectorXd w(n);
        for (int k = 0; k < n; ++k) {
            double acc = 0.0;
            for (int i = 0; i < n; ++i) {
                acc += r.values()[i] * roots.cosine(static_cast<long long>(k) * i);
            }
            w[k] = scale * acc;
        }
        // Symmetrize; asymmetry only arises for infeasible r and is caught by
        // the residual check.
        for (int k = 1; k <= (n - 1) / 2; ++k) {
            const double avg = 0.5 * (w[k] + w[n - k]);
            w[k] = avg;
            w[n - k] = avg;
        }
        check_negative(w, power, opts.negative_factor, "solve_spectrum");
        w = w.cwiseMax(0.0);
        const double residual = (reduced * reduce_full_weights(w) - r.values()).norm();
        check_feasible(residual, power, opts.feasibility_factor, "solve_spectrum");
        return SpectralWeights(std::move(w));
    }

    const Eigen::VectorXd start = dirichlet_start(static_cast<int>(reduced.cols()), power, seed);
    NnlsOutcome out = accelerated_projected_nnls(reduced, r.values(), start, power, opts);
    check_negative(out.x, power, opts.negative_factor, "solve_spectrum");
    check_feasible(out.residual, power, opts.feasibility_factor, "solve_spectrum");
    return SpectralWeights(expand_half_weights(out.x, n_signal));
}

}  // namespace

Autocovariance::Autocovariance(Eigen::VectorXd values) : values_(std::move(values)) {
    if (values_.size() < 1) throw BadDimension("Autocovariance: n must be >= 1");
    spectral::ToeplitzGram validate(values_);  // throws NotPSD beyond tolerance
}

SpectralWeights::SpectralWeights(Eigen::VectorXd weights) : weights_(std::move(weights)) {
    const int n = static_cast<int>(weights_.size());
    if (n < 1) throw BadDimension("SpectralWeights: N must be >= 1");
    const double scale = std::max(1.0, weights_.cwiseAbs().maxCoeff());
    for (int k = 1; k < n; ++k) {
        if (std::abs(weights_[k] - weights_[n - k]) > 1e-10 * scale) {
            throw SymmetryViolation("SpectralWeights: bins " + std::to_string(k) + " and " +
                                    std::to_string(n - k) + " differ");
        }
    }
    const double low = weights_.minCoeff();
    if (low < -1e-12 * scale) {
        throw DegenerateNegative("SpectralWeights: negative entry " + std::to_string(low));
    }
    weights_ = weights_.cwiseMax(0.0);
}

PhaseAssignment PhaseAssignment::zeros(int n_signal) {
    PhaseAssignment p;
    p.phases = Eigen::VectorXd::Zero(phase_count(n_signal));
    return p;
}

PhaseAssignment PhaseAssignment::random(int n_signal, std::uint64_t seed) {
    rng::SplitMix64 gen(seed);
    PhaseAssignment p;
    p.sign_zero = gen.sign();
    p.sign_half = gen.sign();
    p.phases.resize(phase_count(n_signal));
    for (int i = 0; i < p.phases.size(); ++i) p.phases[i] = gen.uniform(0.0, kTwoPi);
    return p;
}

Eigen::MatrixXd fold_spectrum_matrix(const Eigen::MatrixXcd& full_map) {
    const int n = static_cast<int>(full_map.rows());
    const int n_signal = static_cast<int>(full_map.cols());
    const int bins = half_bin_count(n_signal);
    Eigen::MatrixXcd folded(n, bins);
    folded.col(0) = full_map.col(0);
    for (int k = 1; k <= (n_signal - 1) / 2; ++k) {
        folded.col(k) = 0.5 * (full_map.col(k) + full_map.col(n_signal - k));
    }
    if (n_signal % 2 == 0 && n_signal >= 2) folded.col(bins - 1) = full_map.col(n_signal / 2);
    const double scale = std::max(1.0, full_map.cwiseAbs().maxCoeff());
    const double residue = folded.imag().cwiseAbs().maxCoeff();
    if (residue > 1e-9 * scale) {
        throw Error("fold_spectrum_matrix: imaginary residue " + std::to_string(residue));
    }
    return folded.real();
}

Eigen::MatrixXd half_spectrum_matrix(int n_signal, int n_autocov) {
    return fold_spectrum_matrix(embeddings::fde_spectrum_matrix(n_signal, n_autocov));
}

Eigen::VectorXd expand_half_weights(const Eigen::VectorXd& reduced, int n_signal) {
    if (reduced.size() != half_bin_count(n_signal)) {
        throw BadDimension("expand_half_weights: reduced size mismatch");
    }
    Eigen::VectorXd w(n_signal);
    w[0] = reduced[0];
    for (int k = 1; k <= (n_signal - 1) / 2; ++k) {
        w[k] = 0.5 * reduced[k];
        w[n_signal - k] = w[k];
    }
    if (n_signal % 2 == 0 && n_signal >= 2) w[n_signal / 2] = reduced[n_signal / 2];
    return w;
}

Eigen::VectorXd reduce_full_weights(const Eigen::VectorXd& weights) {
    const int n_signal = static_cast<int>(weights.size());
    Eigen::VectorXd reduced(half_bin_count(n_signal));
    reduced[0] = weights[0];
    for (int k = 1; k <= (n_signal - 1) / 2; ++k) reduced[k] = weights[k] + weights[n_signal - k];
    if (n_signal % 2 == 0 && n_signal >= 2) reduced[n_signal / 2] = weights[n_signal / 2];
    return reduced;
}

int affine_solution_dimension(int n_signal, int n_autocov) {
    const Eigen::MatrixXd reduced = half_spectrum_matrix(n_signal, n_autocov);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(reduced);
    const Eigen::VectorXd& sv = svd.singularValues();
    const double threshold = 1e-10 * sv.maxCoeff();
    int rank = 0;
    for (int i = 0; i < sv.size(); ++i) {
        if (sv[i] > threshold) ++rank;
    }
    return static_cast<int>(reduced.cols()) - rank;
}

SpectralWeights solve_spectrum(const Autocovariance& r, int n_signal, std::uint64_t seed,
                               const SpectrumSolveOptions& opts) {
    if (n_signal < r.size()) throw BadDimension("solve_spectrum: N must be >= n");
    return solve_reduced(half_spectrum_matrix(n_signal, r.size()), r, n_signal, seed, opts);
}

SpectralWeights solve_spectrum_gie(const Autocovariance& r, int n_signal, complex<double> gamma,
                                   std::uint64_t seed, const SpectrumSolveOptions& opts) {
    if (n_signal < r.size()) throw BadDimension("solve_spectrum_gie: N must be >= n");
    const Eigen::MatrixXd reduced =
        fold_spectrum_matrix(embeddings::gie_spectrum_matrix(n_signal, r.size(), gamma));
    return solve_reduced(reduced, r, n_signal, seed, opts);
}

spectral::DftSpectrum assign_phases(const SpectralWeights& weights, const PhaseAssignment& p) {
    const int n = weights.size();
    if (p.phases.size() != PhaseAssignment::phase_count(n)) {
        throw BadPhaseCount("assign_phases: expected " +
                            std::to_string(PhaseAssignment::phase_count(n)) + " phases, got " +
                            std::to_string(p.phases.size()));
    }
    if (std::abs(p.sign_zero) != 1.0 || std::abs(p.sign_half) != 1.0) {
        throw BadPhaseCount("assign_phases: signs must be +1 or -1");
    }
    Eigen::VectorXcd u(n);
    u[0] = p.sign_zero * std::sqrt(weights.weights()[0]);
    if (n % 2 == 0 && n >= 2) u[n / 2] = p.sign_half * std::sqrt(weights.weights()[n / 2]);
    for (int k = 1; k <= PhaseAssignment::phase_count(n); ++k) {
        const double mag = std::sqrt(weights.weights()[k]);
        const double beta = p.phases[k - 1];
        u[k] = std::polar(mag, beta);
        u[n - k] = std::conj(u[k]);
    }
    return spectral::DftSpectrum(std::move(u));
}

SpectralWeights weights_from_spectrum(const spectral::DftSpectrum& u) {
    return SpectralWeights(u.coefficients().cwiseAbs2());
}

PhaseAssignment phases_from_spectrum(const spectral::DftSpectrum& u) {
    const int n = u.size();
    PhaseAssignment p;
    p.sign_zero = u.coefficients()[0].real() < 0.0 ? -1.0 : 1.0;
    if (n % 2 == 0 && n >= 2) {
        p.sign_half = u.coefficients()[n / 2].real() < 0.0 ? -1.0 : 1.0;
    }
    p.phases.resize(PhaseAssignment::phase_count(n));
    for (int k = 1; k <= PhaseAssignment::phase_count(n); ++k) {
        double beta = std::arg(u.coefficients()[k]);
        if (beta < 0.0) beta += kTwoPi;
        if (beta >= kTwoPi) beta = 0.0;
        p.phases[k - 1] = beta;
    }
    return p;
}

FdieResult fdie_full(const Autocovariance& r, int n_signal, const PhaseAssignment& p,
                     std::uint64_t seed, const SpectrumSolveOptions& opts) {
    SpectralWeights w = solve_spectrum(r, n_signal, seed, opts);
    spectral::DftSpectrum u = assign_phases(w, p);
    spectral::PeriodicInput input = spectral::idft(u);
    return {std::move(input), std::move(u), std::move(w)};
}

spectral::PeriodicInput fdie(const Autocovariance& r, int n_signal, const PhaseAssignment& p,
                             std::uint64_t seed, const SpectrumSolveOptions& opts) {
    return fdie_full(r, n_signal, p, seed, opts).input;
}

FdieResult giie_full(const Autocovariance& r, int n_signal, complex<double> gamma,
                     const PhaseAssignment& p, std::uint64_t seed,
                     const SpectrumSolveOptions& opts) {
    SpectralWeights w = solve_spectrum_gie(r, n_signal, gamma, seed, opts);
    spectral::DftSpectrum u = assign_phases(w, p);
    spectral::PeriodicInput input = spectral::idft(u);
    return {std::move(input), std::move(u), std::move(w)};
}

spectral::PeriodicInput giie(const Autocovariance& r, int n_signal, complex<double> gamma,
                             const PhaseAssignment& p, std::uint64_t seed,
                             const SpectrumSolveOptions& opts) {
    return giie_full(r, n_signal, gamma, p, seed, opts).input;
}

TdieResult tdie_full(const Autocovariance& r, int n_signal, const std::vector<int>& signs,
                     std::uint64_t seed, const SpectrumSolveOptions& opts) {
    if (n_signal < r.size()) throw BadDimension("tdie: N must be >= n");
    if (static_cast<int>(signs.size()) != n_signal) {
        throw BadDimension("tdie: need one sign per bin");
    }
    for (int s : signs) {
        if (s != 1 && s != -1) throw BadDimension("tdie: signs must be +1 or -1");
    }
    const Eigen::MatrixXd s = embeddings::tde_spectrum_matrix(n_signal, r.size());
    const Eigen::VectorXd start = dirichlet_start(n_signal, r.power(), seed);
    NnlsOutcome out = accelerated_projected_nnls(s, r.values(), start, r.power(), opts);
    check_negative(out.x, r.power(), opts.negative_factor, "tdie");
    check_feasible(out.residual, r.power(), opts.feasibility_factor, "tdie");

    Eigen::VectorXd z(n_signal);
    for (int k = 0; k < n_signal; ++k) z[k] = signs[k] * std::sqrt(out.x[k]);
    spectral::PeriodicInput input(embeddings::tde_basis(n_signal) * z);
    return {std::move(input), std::move(z), std::move(out.x)};
}

spectral::PeriodicInput tdie(const Autocovariance& r, int n_signal, const std::vector<int>& signs,
                             std::uint64_t seed, const SpectrumSolveOptions& opts) {
    return tdie_full(r, n_signal, signs, seed, opts).input;
}

Eigen::VectorXd cross_map_fde_to_tde(const spectral::DftSpectrum& u) {
    const int n = u.size();
    const double root2 = std::sqrt(2.0);
    Eigen::VectorXd z(n);
    z[0] = u.coefficients()[0].real();
    if (n % 2 == 0 && n >= 2) z[n / 2] = u.coefficients()[n / 2].real();
    for (int k = 1; k <= (n - 1) / 2; ++k) {
        z[k] = root2 * u.coefficients()[k].real();
        z[n - k] = -root2 * u.coefficients()[k].imag();
    }
    return z;
}

spectral::DftSpectrum cross_map_tde_to_fde(const Eigen::VectorXd& z) {
    const int n = static_cast<int>(z.size());
    if (n < 1) throw BadDimension("cross_map_tde_to_fde: N must be >= 1");
    const double inv_root2 = 1.0 / std::sqrt(2.0);
    Eigen::VectorXcd u(n);
    u[0] = z[0];
    if (n % 2 == 0 && n >= 2) u[n / 2] = z[n / 2];
    for (int k = 1; k <= (n - 1) / 2; ++k) {
        u[k] = complex<double>(inv_root2 * z[k], -inv_root2 * z[n - k]);
        u[n - k] = std::conj(u[k]);
    }
    return spectral::DftSpectrum(std::move(u));
}

MembershipReport membership_check(const spectral::PeriodicInput& u, const Autocovariance& r) {
    if (r.size() > u.size()) throw BadDimension("membership_check: n must be <= N");
    const Eigen::VectorXd mapped = spectral::quadratic_map(u, r.size());
    const double residual = (mapped - r.values()).norm();
    const double l1 = u.samples().lpNorm<1>();
    const double scaled = (residual + 1.0) * l1;
    const bool pass = l1 > 0.0 ? (scaled - l1) <= 1e-6 * l1 : residual <= 1e-6;
    return {l1, scaled, pass};
}

}  // namespace indesign::inversion
