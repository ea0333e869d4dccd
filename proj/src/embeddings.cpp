#include "indesign/embeddings.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "indesign/rng.hpp"

namespace indesign::embeddings {

namespace {

using std::complex;

constexpr std::uint64_t kIdentityCheckSeed = 0x5EEDC0FFEEULL;

Eigen::VectorXd cosine_column(const spectral::RootTable& roots, int j) {
    const int n = roots.size();
    Eigen::VectorXd v(n);
    for (int t = 0; t < n; ++t) v[t] = roots.cosine(static_cast<long long>(j) * t);
    return v;
}

Eigen::VectorXd sine_column(const spectral::RootTable& roots, int j) {
    const int n = roots.size();
    Eigen::VectorXd v(n);
    for (int t = 0; t < n; ++t) v[t] = roots.sine(static_cast<long long>(j) * t);
    return v;
}

}  // namespace

Embedding::Embedding(Eigen::MatrixXcd transform, Eigen::MatrixXcd spectrum_to_autocov,
                     bool real_valued, std::string label)
    : transform_(std::move(transform)),
      spectrum_to_autocov_(std::move(spectrum_to_autocov)),
      real_valued_(real_valued),
      label_(std::move(label)) {
    if (transform_.rows() != transform_.cols()) {
        throw BadDimension("Embedding: transform must be square");
    }
    if (spectrum_to_autocov_.cols() != transform_.rows()) {
        throw BadDimension("Embedding: map width must match the signal length");
    }
}

Eigen::MatrixXd Embedding::real_transform() const {
    if (!real_valued_) throw BadStructure("Embedding: " + label_ + " is not a real embedding");
    const double residue = transform_.imag().cwiseAbs().maxCoeff();
    if (residue > 1e-12) {
        throw BadStructure("Embedding: imaginary residue " + std::to_string(residue) +
                           " on a real transform");
    }
    return transform_.real();
}

Eigen::VectorXd Embedding::forward(const spectral::PeriodicInput& u) const {
    if (u.size() != signal_size()) {
        throw BadDimension("Embedding::forward: input length " + std::to_string(u.size()) +
                           " != " + std::to_string(signal_size()));
    }
    const Eigen::VectorXcd v = transform_ * u.samples().cast<complex<double>>();
    const Eigen::VectorXd sq = v.cwiseAbs2();
    const Eigen::VectorXcd r = spectrum_to_autocov_ * sq.cast<complex<double>>();
    const double residue = r.imag().cwiseAbs().maxCoeff();
    if (residue > 1e-10 * std::max(1.0, u.power())) {
        throw Error("Embedding::forward: imaginary residue " + std::to_string(residue));
    }
    return r.real();
}

double Embedding::unitarity_defect() const {
    const Eigen::MatrixXcd gram = transform_.adjoint() * transform_;
    const Eigen::MatrixXcd eye = Eigen::MatrixXcd::Identity(gram.rows(), gram.cols());
    return (gram - eye).cwiseAbs().maxCoeff();
}

ConnectorMatrix::ConnectorMatrix(Eigen::MatrixXcd matrix) : matrix_(std::move(matrix)) {
    const int n = static_cast<int>(matrix_.rows());
    if (n < 1 || matrix_.cols() != n) throw BadStructure("ConnectorMatrix: must be square, N >= 1");
    constexpr double tol = 1e-12;
    Eigen::MatrixXcd residual = matrix_;
    residual(0, 0) -= 1.0;
    if (n % 2 == 0) residual(n / 2, n / 2) -= 1.0;
    for (int k = 1; k <= pair_count(n); ++k) {
        residual(k, k) = 0.0;
        residual(k, n - k) = 0.0;
        residual(n - k, k) = 0.0;
        residual(n - k, n - k) = 0.0;
    }
    const double defect = residual.cwiseAbs().maxCoeff();
    if (defect > tol) {
        throw BadStructure("ConnectorMatrix: off-pattern entries up to " + std::to_string(defect));
    }
}

Eigen::Matrix2cd ConnectorMatrix::block(int k) const {
    const int n = size();
    if (k < 1 || k > pair_count(n)) throw BadDimension("ConnectorMatrix::block: bad pair index");
    Eigen::Matrix2cd b;
    b << matrix_(k, k), matrix_(k, n - k), matrix_(n - k, k), matrix_(n - k, n - k);
    return b;
}

Eigen::MatrixXd tde_basis(int n_signal) {
    const spectral::RootTable roots(n_signal);
    const int n = n_signal;
    Eigen::MatrixXd w(n, n);
    const double scale = std::sqrt(2.0 / n);
    const double half = 1.0 / std::sqrt(2.0);
    int col = 0;
    w.col(col++) = scale * half * cosine_column(roots, 0);
    if (n % 2 == 0) {
        for (int j = 1; j <= n / 2 - 1; ++j) w.col(col++) = scale * cosine_column(roots, j);
        if (n >= 2) w.col(col++) = scale * half * cosine_column(roots, n / 2);
        for (int j = n / 2 - 1; j >= 1; --j) w.col(col++) = scale * sine_column(roots, j);
    } else {
        for (int j = 1; j <= (n - 1) / 2; ++j) w.col(col++) = scale * cosine_column(roots, j);
        for (int j = (n - 1) / 2; j >= 1; --j) w.col(col++) = scale * sine_column(roots, j);
    }
    return w;
}

Eigen::MatrixXd tde_spectrum_matrix(int n_signal, int n) {
    if (n < 1 || n > n_signal) throw BadDimension("tde_spectrum_matrix: need 1 <= n <= N");
    const spectral::RootTable roots(n_signal);
    Eigen::MatrixXd s(n, n_signal);
    for (int i = 0; i < n; ++i)
        for (int t = 0; t < n_signal; ++t) s(i, t) = roots.cosine(static_cast<long long>(i) * t);
    return s;
}

Eigen::MatrixXcd dft_matrix(int n_signal) {
    const spectral::RootTable roots(n_signal);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n_signal));
    Eigen::MatrixXcd w(n_signal, n_signal);
    for (int k = 0; k < n_signal; ++k)
        for (int t = 0; t < n_signal; ++t)
            w(k, t) = scale * roots.forward(static_cast<long long>(k) * t);
    return w;
}

Eigen::MatrixXcd fde_spectrum_matrix(int n_signal, int n) {
    if (n < 1 || n > n_signal) throw BadDimension("fde_spectrum_matrix: need 1 <= n <= N");
    const spectral::RootTable roots(n_signal);
    Eigen::MatrixXcd s(n, n_signal);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n_signal; ++k) s(i, k) = roots.inverse(static_cast<long long>(i) * k);
    return s;
}

Eigen::MatrixXcd gie_spectrum_matrix(int n_signal, int n, complex<double> gamma) {
    if (n < 1 || n > n_signal) throw BadDimension("gie_spectrum_matrix: need 1 <= n <= N");
    const spectral::RootTable roots(n_signal);
    const complex<double> cogamma = 1.0 - gamma;
    Eigen::MatrixXcd s(n, n_signal);
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < n_signal; ++k) {
            const long long m = static_cast<long long>(i) * k;
            s(i, k) = gamma * roots.forward(m) + cogamma * roots.inverse(m);
        }
    }
    return s;
}

Embedding build_tde(int n_signal, int n_autocov) {
    return Embedding(tde_basis(n_signal).transpose().cast<complex<double>>(),
                     tde_spectrum_matrix(n_signal, n_autocov).cast<complex<double>>(),
                     /*real_valued=*/true, "tde");
}

Embedding build_fde(int n_signal, int n_autocov) {
    return Embedding(dft_matrix(n_signal), fde_spectrum_matrix(n_signal, n_autocov),
                     /*real_valued=*/false, "fde");
}

Embedding build_gie(int n_signal, int n_autocov, complex<double> gamma) {
    const std::string label =
        "gie:" + std::to_string(gamma.real()) + "," + std::to_string(gamma.imag());
    return Embedding(dft_matrix(n_signal), gie_spectrum_matrix(n_signal, n_autocov, gamma),
                     /*real_valued=*/false, label);
}

ConnectorMatrix build_lambda(int n_signal) {
    const int n = n_signal;
    if (n < 1) throw BadDimension("build_lambda: N must be >= 1");
    Eigen::MatrixXcd lam = Eigen::MatrixXcd::Zero(n, n);
    const double half = 1.0 / std::sqrt(2.0);
    const complex<double> jh{0.0, half};
    lam(0, 0) = 1.0;
    if (n % 2 == 0) lam(n / 2, n / 2) = 1.0;
    for (int k = 1; k <= ConnectorMatrix::pair_count(n); ++k) {
        lam(k, k) = half;
        lam(k, n - k) = half;
        lam(n - k, k) = jh;
        lam(n - k, n - k) = -jh;
    }
    return ConnectorMatrix(std::move(lam));
}

const std::array<Eigen::Matrix2cd, 8>& real_block_candidates() {
    static const std::array<Eigen::Matrix2cd, 8> candidates = [] {
        const double h = 1.0 / std::sqrt(2.0);
        const complex<double> jh{0.0, h};
        std::array<Eigen::Matrix2cd, 8> c;
        c[0] << h, h, -jh, jh;
        c[1] << -h, -h, -jh, jh;
        c[2] << h, h, jh, -jh;
        c[3] << -h, -h, jh, -jh;
        c[4] << -jh, jh, h, h;
        c[5] << -jh, jh, -h, -h;
        c[6] << jh, -jh, h, h;
        c[7] << jh, -jh, -h, -h;
        return c;
    }();
    return candidates;
}

std::uint64_t real_embedding_count(int n_signal) {
    if (n_signal < 1) throw BadDimension("real_embedding_count: N must be >= 1");
    const int pairs = ConnectorMatrix::pair_count(n_signal);
    std::uint64_t count = 1;
    for (int i = 0; i < pairs; ++i) count *= 8;
    return count;
}

namespace {

/// Rows k and N-k of connector * Wtilde, assembled pairwise so conjugate
/// cancellation is exact and the result is real to the last bit.
Eigen::MatrixXcd connector_times_dft(const ConnectorMatrix& connector,
                                     const Eigen::MatrixXcd& wtilde) {
    const int n = connector.size();
    Eigen::MatrixXcd out(n, n);
    out.row(0) = wtilde.row(0);
    if (n % 2 == 0) out.row(n / 2) = wtilde.row(n / 2);
    for (int k = 1; k <= ConnectorMatrix::pair_count(n); ++k) {
        const Eigen::Matrix2cd q = connector.block(k);
        out.row(k) = q(0, 0) * wtilde.row(k) + q(0, 1) * wtilde.row(n - k);
        out.row(n - k) = q(1, 0) * wtilde.row(k) + q(1, 1) * wtilde.row(n - k);
    }
    return out;
}

std::string base8_label(std::uint64_t index, int pairs) {
    if (pairs == 0) return "real:0";
    std::string digits;
    std::uint64_t v = index;
    for (int i = 0; i < pairs; ++i) {
        digits.insert(digits.begin(), static_cast<char>('0' + (v & 7)));
        v >>= 3;
    }
    return "real:" + digits;
}

}  // namespace

Embedding real_embedding_at(int n_signal, int n_autocov, std::uint64_t index) {
    const int pairs = ConnectorMatrix::pair_count(n_signal);
    if (index >= real_embedding_count(n_signal)) {
        throw BadDimension("real_embedding_at: index out of range");
    }
    Eigen::MatrixXcd lam = Eigen::MatrixXcd::Zero(n_signal, n_signal);
    lam(0, 0) = 1.0;
    if (n_signal % 2 == 0) lam(n_signal / 2, n_signal / 2) = 1.0;
    std::uint64_t v = index;
    for (int k = 1; k <= pairs; ++k) {
        const Eigen::Matrix2cd& q = real_block_candidates()[v & 7];
        v >>= 3;
        lam(k, k) = q(0, 0);
        lam(k, n_signal - k) = q(0, 1);
        lam(n_signal - k, k) = q(1, 0);
        lam(n_signal - k, n_signal - k) = q(1, 1);
    }
    const ConnectorMatrix connector(std::move(lam));
    Eigen::MatrixXcd transform = connector_times_dft(connector, dft_matrix(n_signal));
    Eigen::MatrixXcd map =
        gie_spectrum_matrix(n_signal, n_autocov, 0.5).real().cast<complex<double>>();
    return Embedding(std::move(transform), std::move(map), /*real_valued=*/true,
                     base8_label(index, pairs));
}

std::vector<Embedding> enumerate_real_embeddings(int n_signal, int n_autocov, std::uint64_t cap) {
    const std::uint64_t count = real_embedding_count(n_signal);
    if (count > cap) {
        throw EnumerationTooLarge("enumerate_real_embeddings: " + std::to_string(count) +
                                  " members exceed cap " + std::to_string(cap));
    }
    std::vector<Embedding> out;
    out.reserve(count);
    for (std::uint64_t index = 0; index < count; ++index) {
        out.push_back(real_embedding_at(n_signal, n_autocov, index));
    }
    return out;
}

Embedding embedding_from_label(const std::string& label, int n_signal, int n_autocov) {
    if (label == "tde") return build_tde(n_signal, n_autocov);
    if (label == "fde") return build_fde(n_signal, n_autocov);
    if (label.rfind("gie:", 0) == 0) {
        const std::string args = label.substr(4);
        const auto comma = args.find(',');
        try {
            if (comma == std::string::npos) {
                return build_gie(n_signal, n_autocov, {std::stod(args), 0.0});
            }
            return build_gie(n_signal, n_autocov,
                             {std::stod(args.substr(0, comma)), std::stod(args.substr(comma + 1))});
        } catch (const std::logic_error&) {
            throw Error("embedding_from_label: bad weight in '" + label + "'");
        }
    }
    if (label.rfind("real:", 0) == 0) {
        const std::string digits = label.substr(5);
        if (digits.empty()) throw Error("embedding_from_label: empty index in '" + label + "'");
        std::uint64_t index = 0;
        for (const char c : digits) {
            if (c < '0' || c > '7') {
                throw Error("embedding_from_label: '" + label + "' is not a base-8 index");
            }
            index = index * 8 + static_cast<std::uint64_t>(c - '0');
        }
        return real_embedding_at(n_signal, n_autocov, index);
    }
    throw Error("embedding_from_label: unknown label '" + label + "'");
}

bool verify_embedding_identity(const ConnectorMatrix& connector, int n_signal, int n_autocov) {
    if (connector.size() != n_signal) {
        throw BadDimension("verify_embedding_identity: connector size mismatch");
    }
    const Eigen::MatrixXcd transform = connector_times_dft(connector, dft_matrix(n_signal));
    const Eigen::MatrixXcd map = gie_spectrum_matrix(n_signal, n_autocov, 0.5);

    rng::SplitMix64 gen(rng::derive(kIdentityCheckSeed, static_cast<std::uint64_t>(n_signal)));
    constexpr int kTrials = 32;
    for (int trial = 0; trial < kTrials; ++trial) {
        Eigen::VectorXd samples(n_signal);
        for (int t = 0; t < n_signal; ++t) samples[t] = gen.gaussian();
        const spectral::PeriodicInput u(std::move(samples));
        const Eigen::VectorXd want = spectral::quadratic_map(u, n_autocov);

        const Eigen::VectorXcd v = transform * u.samples().cast<complex<double>>();
        const Eigen::VectorXcd got = map * v.cwiseAbs2().cast<complex<double>>();
        const double scale = std::max(1.0, u.power());
        if ((got.real() - want).cwiseAbs().maxCoeff() > 1e-9 * scale) return false;
        if (got.imag().cwiseAbs().maxCoeff() > 1e-9 * scale) return false;
    }
    return true;
}

MirrorSpectrum mirror_graph_spectrum(int n_signal) {
    const spectral::RootTable roots(n_signal);
    MirrorSpectrum out;
    out.eigenvalues.resize(n_signal);
    for (int m = 0; m < n_signal; ++m) out.eigenvalues[m] = roots.cosine(m);
    out.eigenvectors = tde_basis(n_signal);
    return out;
}

}  // namespace indesign::embeddings
