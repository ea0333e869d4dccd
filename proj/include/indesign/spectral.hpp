#pragma once

#include <Eigen/Dense>
#include <complex>

#include "indesign/errors.hpp"

namespace indesign::spectral {

/// Table of the N-th roots of unity. Entries for k and N-k are reflections of
/// each other bitwise, so conjugate-symmetry identities that hold on paper
/// also hold exactly in floating point.
class RootTable {
public:
    explicit RootTable(int n);

    int size() const { return static_cast<int>(cos_.size()); }

    double cosine(long long k) const { return cos_[index(k)]; }
    double sine(long long k) const { return sin_[index(k)]; }

    /// e^{-j 2 pi k / N}
    std::complex<double> forward(long long k) const {
        const int m = index(k);
        return {cos_[m], -sin_[m]};
    }

    /// e^{+j 2 pi k / N}
    std::complex<double> inverse(long long k) const {
        const int m = index(k);
        return {cos_[m], sin_[m]};
    }

private:
    int index(long long k) const {
        const int n = size();
        long long m = k % n;
        if (m < 0) m += n;
        return static_cast<int>(m);
    }

    Eigen::VectorXd cos_;
    Eigen::VectorXd sin_;
};

/// One period of an N-periodic real input signal together with its power.
class PeriodicInput {
public:
    /// Power is computed from the samples.
    explicit PeriodicInput(Eigen::VectorXd samples);

    /// Validates that the sample energy matches the declared power to 1e-10
    /// relative.
    PeriodicInput(Eigen::VectorXd samples, double declared_power);

    const Eigen::VectorXd& samples() const { return samples_; }
    double power() const { return power_; }
    int size() const { return static_cast<int>(samples_.size()); }

private:
    Eigen::VectorXd samples_;
    double power_;
};

/// Unitary DFT coefficients of a real periodic signal. Construction enforces
/// the conjugate pairing coeff[N-k] = conj(coeff[k]).
class DftSpectrum {
public:
    explicit DftSpectrum(Eigen::VectorXcd coefficients);

    const Eigen::VectorXcd& coefficients() const { return coefficients_; }
    int size() const { return static_cast<int>(coefficients_.size()); }

    /// max_k |U[N-k] - conj(U[k])|
    static double symmetry_defect(const Eigen::VectorXcd& u);

private:
    Eigen::VectorXcd coefficients_;
};

/// Circulant matrix held by its first row.
struct CirculantMatrix {
    Eigen::VectorXcd generator;

    explicit CirculantMatrix(Eigen::VectorXcd first_row);
    static CirculantMatrix from_real(const Eigen::VectorXd& first_row);

    int size() const { return static_cast<int>(generator.size()); }
    Eigen::MatrixXcd dense() const;
};

/// Symmetric Toeplitz Gram matrix induced by an autocovariance vector.
/// Construction rejects matrices whose smallest eigenvalue falls below
/// -1e-8 * r0.
class ToeplitzGram {
public:
    explicit ToeplitzGram(Eigen::VectorXd first_column);

    const Eigen::VectorXd& first_column() const { return first_column_; }
    int size() const { return static_cast<int>(first_column_.size()); }
    double min_eigenvalue() const { return min_eigenvalue_; }
    Eigen::MatrixXd dense() const;

private:
    Eigen::VectorXd first_column_;
    double min_eigenvalue_;
};

struct CirculantEig {
    Eigen::VectorXcd eigenvalues;
    Eigen::MatrixXcd eigenvectors;  // unitary, column m is the m-th eigenvector
};

/// Unitary forward transform U_k = N^{-1/2} sum_t u_t e^{-j 2 pi k t / N}.
DftSpectrum dft(const PeriodicInput& u);

/// Inverse of dft(). The result is real by the symmetry enforced on the input.
PeriodicInput idft(const DftSpectrum& u);

/// Cyclic autocovariance r_i = sum_t u_t u_{(t-i) mod N}, i = 0..n-1.
Eigen::VectorXd quadratic_map(const PeriodicInput& u, int n);

/// Eigendecomposition of a circulant matrix: eigenvalue m is the generator's
/// DFT sample, eigenvector m the unit Fourier vector.
CirculantEig circulant_eig(const CirculantMatrix& b);

ToeplitzGram toeplitz_from_autocov(const Eigen::VectorXd& r);

/// u^T A^i u with A the one-step cyclic delay; equals lag-i autocovariance.
double graph_shift_power_form(const PeriodicInput& u, int lag);

/// Adjacency matrix of the directed ring graph (one cyclic delay).
Eigen::MatrixXd ring_adjacency(int n);

}  // namespace indesign::spectral
