#include "indesign/spectral.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <utility>

namespace indesign::spectral {

namespace {

double symmetry_tolerance(const Eigen::VectorXcd& u) {
    const double scale = u.size() > 0 ? u.cwiseAbs().maxCoeff() : 0.0;
    return 1e-10 * std::max(1.0, scale);
}

}  // namespace

RootTable::RootTable(int n) {
    if (n < 1) throw BadDimension("RootTable: N must be >= 1, got " + std::to_string(n));
    cos_.resize(n);
    sin_.resize(n);
    const double step = 2.0 * std::numbers::pi / n;
    for (int m = 0; m <= n / 2; ++m) {
        cos_[m] = std::cos(step * m);
        sin_[m] = std::sin(step * m);
    }
    for (int m = n / 2 + 1; m < n; ++m) {
        cos_[m] = cos_[n - m];
        sin_[m] = -sin_[n - m];
    }
}

PeriodicInput::PeriodicInput(Eigen::VectorXd samples) : samples_(std::move(samples)) {
    if (samples_.size() < 1) throw BadDimension("PeriodicInput: N must be >= 1");
    power_ = samples_.squaredNorm();
}

PeriodicInput::PeriodicInput(Eigen::VectorXd samples, double declared_power)
    : samples_(std::move(samples)), power_(declared_power) {
    if (samples_.size() < 1) throw BadDimension("PeriodicInput: N must be >= 1");
    if (declared_power < 0.0) throw BadDimension("PeriodicInput: power must be >= 0");
    const double actual = samples_.squaredNorm();
    if (std::abs(actual - declared_power) > 1e-10 * std::max(1.0, declared_power)) {
        throw BadDimension("PeriodicInput: sample energy " + std::to_string(actual) +
                           " does not match declared power " + std::to_string(declared_power));
    }
}

double DftSpectrum::symmetry_defect(const Eigen::VectorXcd& u) {
    const int n = static_cast<int>(u.size());
    double worst = 0.0;
    for (int k = 1; k < n; ++k) {
        worst = std::max(worst, std::abs(u[n - k] - std::conj(u[k])));
    }
    return worst;
}

DftSpectrum::DftSpectrum(Eigen::VectorXcd coefficients) : coefficients_(std::move(coefficients)) {
    if (coefficients_.size() < 1) throw BadDimension("DftSpectrum: N must be >= 1");
    const double defect = symmetry_defect(coefficients_);
    if (defect > symmetry_tolerance(coefficients_)) {
        throw SymmetryViolation("DftSpectrum: conjugate symmetry defect " + std::to_string(defect));
    }
}

CirculantMatrix::CirculantMatrix(Eigen::VectorXcd first_row) : generator(std::move(first_row)) {
    if (generator.size() < 1) throw BadDimension("CirculantMatrix: N must be >= 1");
}

CirculantMatrix CirculantMatrix::from_real(const Eigen::VectorXd& first_row) {
    return CirculantMatrix(first_row.cast<std::complex<double>>());
}

Eigen::MatrixXcd CirculantMatrix::dense() const {
    const int n = size();
    Eigen::MatrixXcd b(n, n);
    for (int i = 0; i < n; ++i)
        for (int t = 0; t < n; ++t) b(i, t) = generator[(t - i + n) % n];
    return b;
}

ToeplitzGram::ToeplitzGram(Eigen::VectorXd first_column) : first_column_(std::move(first_column)) {
    if (first_column_.size() < 1) throw BadDimension("ToeplitzGram: n must be >= 1");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(dense(), Eigen::EigenvaluesOnly);
    min_eigenvalue_ = eig.eigenvalues().minCoeff();
    const double r0 = first_column_[0];
    if (min_eigenvalue_ < -1e-8 * std::max(r0, 0.0) || r0 < 0.0) {
        throw NotPSD("ToeplitzGram: min eigenvalue " + std::to_string(min_eigenvalue_) +
                     " below tolerance for r0 = " + std::to_string(r0));
    }
}

Eigen::MatrixXd ToeplitzGram::dense() const {
    const int n = size();
    Eigen::MatrixXd t(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) t(i, j) = first_column_[std::abs(i - j)];
    return t;
}

DftSpectrum dft(const PeriodicInput& u) {
    const int n = u.size();
    const RootTable roots(n);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    Eigen::VectorXcd out(n);
    for (int k = 0; k < n; ++k) {
        std::complex<double> acc{0.0, 0.0};
        for (int t = 0; t < n; ++t) {
            acc += u.samples()[t] * roots.forward(static_cast<long long>(k) * t);
        }
        out[k] = scale * acc;
    }
    return DftSpectrum(std::move(out));
}

PeriodicInput idft(const DftSpectrum& u) {
    const int n = u.size();
    const RootTable roots(n);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    Eigen::VectorXd out(n);
    for (int t = 0; t < n; ++t) {
        std::complex<double> acc{0.0, 0.0};
        for (int k = 0; k < n; ++k) {
            acc += u.coefficients()[k] * roots.inverse(static_cast<long long>(k) * t);
        }
        out[t] = scale * acc.real();
    }
    return PeriodicInput(std::move(out));
}

Eigen::VectorXd quadratic_map(const PeriodicInput& u, int n) {
    const int big_n = u.size();
    if (n < 1 || n > big_n) {
        throw BadDimension("quadratic_map: need 1 <= n <= N, got n = " + std::to_string(n) +
                           ", N = " + std::to_string(big_n));
    }
    Eigen::VectorXd r(n);
    for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int t = 0; t < big_n; ++t) {
            acc += u.samples()[t] * u.samples()[(t - i + big_n) % big_n];
        }
        r[i] = acc;
    }
    return r;
}

CirculantEig circulant_eig(const CirculantMatrix& b) {
    const int n = b.size();
    const RootTable roots(n);
    CirculantEig result;
    result.eigenvalues.resize(n);
    result.eigenvectors.resize(n, n);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (int m = 0; m < n; ++m) {
        std::complex<double> acc{0.0, 0.0};
        for (int k = 0; k < n; ++k) {
            acc += b.generator[k] * roots.forward(static_cast<long long>(m) * k);
        }
        result.eigenvalues[m] = acc;
        for (int t = 0; t < n; ++t) {
            result.eigenvectors(t, m) = scale * roots.forward(static_cast<long long>(t) * m);
        }
    }
    return result;
}

ToeplitzGram toeplitz_from_autocov(const Eigen::VectorXd& r) { return ToeplitzGram(r); }

double graph_shift_power_form(const PeriodicInput& u, int lag) {
    const int n = u.size();
    if (lag < 0 || lag >= n) {
        throw BadDimension("graph_shift_power_form: need 0 <= lag <= N-1, got " +
                           std::to_string(lag));
    }
    double acc = 0.0;
    for (int t = 0; t < n; ++t) acc += u.samples()[t] * u.samples()[(t - lag + n) % n];
    return acc;
}

Eigen::MatrixXd ring_adjacency(int n) {
    if (n < 1) throw BadDimension("ring_adjacency: N must be >= 1");
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) a(i, (i - 1 + n) % n) = 1.0;
    return a;
}

}  // namespace indesign::spectral
