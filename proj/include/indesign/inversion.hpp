#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <vector>

#include "indesign/embeddings.hpp"
#include "indesign/spectral.hpp"

namespace indesign::inversion {

/// Autocovariance vector r with r0 = C. Construction validates that the
/// induced symmetric Toeplitz matrix is PSD within tolerance; membership in
/// the feasible polytope is certified separately by solve_spectrum.
class Autocovariance {
public:
    explicit Autocovariance(Eigen::VectorXd values);

    const Eigen::VectorXd& values() const { return values_; }
    double power() const { return values_[0]; }
    int size() const { return static_cast<int>(values_.size()); }

private:
    Eigen::VectorXd values_;
};

/// Nonnegative squared-magnitude spectrum |U|^2, symmetric across k <-> N-k.
class SpectralWeights {
public:
    explicit SpectralWeights(Eigen::VectorXd weights);

    const Eigen::VectorXd& weights() const { return weights_; }
    double total() const { return weights_.sum(); }
    int size() const { return static_cast<int>(weights_.size()); }

private:
    Eigen::VectorXd weights_;
};

/// Signs for the self-paired bins plus one free phase per coupled bin pair.
struct PhaseAssignment {
    double sign_zero = 1.0;
    double sign_half = 1.0;   // only used when N is even
    Eigen::VectorXd phases;   // beta_k for k = 1..ceil(N/2)-1, each in [0, 2pi)

    static int phase_count(int n_signal) { return (n_signal + 1) / 2 - 1; }
    static PhaseAssignment zeros(int n_signal);
    static PhaseAssignment random(int n_signal, std::uint64_t seed);
};

struct SpectrumSolveOptions {
    int max_iter = 100000;
    double residual_stop_factor = 1e-10;  // stop once ||Ax - r|| <= factor * C
    double projection_stop = 1e-12;       // ... or the gradient-projection norm drops below
    double feasibility_factor = 1e-6;     // Infeasible beyond this * C
    double negative_factor = 1e-8;        // DegenerateNegative below -this * C
};

/// Reduced half-spectrum map: fold of the complex spectrum-to-autocov matrix
/// onto the symmetric weights [w0, 2 w1, ..., w_{N/2}]. For the FDE fold the
/// entries are cos(w i k).
Eigen::MatrixXd half_spectrum_matrix(int n_signal, int n_autocov);
Eigen::MatrixXd fold_spectrum_matrix(const Eigen::MatrixXcd& full_map);

/// Expand reduced weights back to the full symmetric N-vector.
Eigen::VectorXd expand_half_weights(const Eigen::VectorXd& reduced, int n_signal);
Eigen::VectorXd reduce_full_weights(const Eigen::VectorXd& weights);

/// Dimension of the affine space of symmetric (not necessarily nonnegative)
/// spectra mapping to some r: columns of the reduced system minus its rank.
int affine_solution_dimension(int n_signal, int n_autocov);

/// Find a nonnegative symmetric spectrum with map * |U|^2 = r. Seeds pick the
/// starting point of the accelerated projected-gradient solve, so repeated
/// calls sample distinct members when the solution set has positive
/// dimension. N = n uses the closed-form unique solution.
SpectralWeights solve_spectrum(const Autocovariance& r, int n_signal, std::uint64_t seed,
                               const SpectrumSolveOptions& opts = {});

/// Same feasibility step taken through the graph-induced map for the given
/// gamma; the folded system is gamma-independent by construction.
SpectralWeights solve_spectrum_gie(const Autocovariance& r, int n_signal,
                                   std::complex<double> gamma, std::uint64_t seed,
                                   const SpectrumSolveOptions& opts = {});

/// U_0 = sign * sqrt(w_0); U_{N/2} likewise for even N; U_k = sqrt(w_k) e^{j beta_k}.
spectral::DftSpectrum assign_phases(const SpectralWeights& weights, const PhaseAssignment& p);

/// Decompose a spectrum into its weights and phases (inverse of assign_phases).
SpectralWeights weights_from_spectrum(const spectral::DftSpectrum& u);
PhaseAssignment phases_from_spectrum(const spectral::DftSpectrum& u);

struct FdieResult {
    spectral::PeriodicInput input;
    spectral::DftSpectrum spectrum;
    SpectralWeights weights;
};

struct TdieResult {
    spectral::PeriodicInput input;
    Eigen::VectorXd z;
    Eigen::VectorXd z_squared;
};

/// Frequency-domain inverse embedding: spectrum feasibility, phase
/// assignment, inverse DFT.
FdieResult fdie_full(const Autocovariance& r, int n_signal, const PhaseAssignment& p,
                     std::uint64_t seed, const SpectrumSolveOptions& opts = {});
spectral::PeriodicInput fdie(const Autocovariance& r, int n_signal, const PhaseAssignment& p,
                             std::uint64_t seed, const SpectrumSolveOptions& opts = {});

/// Graph-induced inverse embedding; produces the same input set for every gamma.
FdieResult giie_full(const Autocovariance& r, int n_signal, std::complex<double> gamma,
                     const PhaseAssignment& p, std::uint64_t seed,
                     const SpectrumSolveOptions& opts = {});
spectral::PeriodicInput giie(const Autocovariance& r, int n_signal, std::complex<double> gamma,
                             const PhaseAssignment& p, std::uint64_t seed,
                             const SpectrumSolveOptions& opts = {});

/// Time-domain inverse embedding: nonnegative solve of S z^2 = r over the
/// full N bins, sign choice, then u = W z.
TdieResult tdie_full(const Autocovariance& r, int n_signal, const std::vector<int>& signs,
                     std::uint64_t seed, const SpectrumSolveOptions& opts = {});
spectral::PeriodicInput tdie(const Autocovariance& r, int n_signal, const std::vector<int>& signs,
                             std::uint64_t seed, const SpectrumSolveOptions& opts = {});

/// z = Lambda U and U = Lambda^H z, the bijection between the two routes.
Eigen::VectorXd cross_map_fde_to_tde(const spectral::DftSpectrum& u);
spectral::DftSpectrum cross_map_tde_to_fde(const Eigen::VectorXd& z);

struct MembershipReport {
    double l1;
    double scaled;  // (||f(u) - r||_2 + 1) * ||u||_1
    bool pass;      // relative gap <= 1e-6
};

MembershipReport membership_check(const spectral::PeriodicInput& u, const Autocovariance& r);

}  // namespace indesign::inversion
