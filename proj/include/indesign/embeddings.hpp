#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "indesign/spectral.hpp"

namespace indesign::embeddings {

/// A factorization of the quadratic map u -> r into
///   linear transform -> elementwise |.|^2 -> linear spectrum-to-autocov map.
class Embedding {
public:
    Embedding(Eigen::MatrixXcd transform, Eigen::MatrixXcd spectrum_to_autocov, bool real_valued,
              std::string label);

    const Eigen::MatrixXcd& transform() const { return transform_; }
    const Eigen::MatrixXcd& spectrum_to_autocov() const { return spectrum_to_autocov_; }
    bool real_valued() const { return real_valued_; }
    const std::string& label() const { return label_; }

    int signal_size() const { return static_cast<int>(transform_.rows()); }
    int autocov_size() const { return static_cast<int>(spectrum_to_autocov_.rows()); }

    /// Transform matrix as a real orthogonal matrix; only for real embeddings.
    Eigen::MatrixXd real_transform() const;

    /// r = spectrum_to_autocov * |transform * u|^2. The imaginary residue is
    /// checked against 1e-10 * max(1, power) and discarded.
    Eigen::VectorXd forward(const spectral::PeriodicInput& u) const;

    /// max |transform^H transform - I|
    double unitarity_defect() const;

private:
    Eigen::MatrixXcd transform_;
    Eigen::MatrixXcd spectrum_to_autocov_;
    bool real_valued_;
    std::string label_;
};

/// Unitary connector with identity entries on bin 0 (and N/2 for even N) and
/// a 2x2 block coupling each bin pair (k, N-k). Construction validates the
/// sparsity pattern; unitarity of the blocks is the member's contract and is
/// what verify_embedding_identity probes.
class ConnectorMatrix {
public:
    explicit ConnectorMatrix(Eigen::MatrixXcd matrix);

    const Eigen::MatrixXcd& matrix() const { return matrix_; }
    int size() const { return static_cast<int>(matrix_.rows()); }

    /// Number of coupled (k, N-k) bin pairs: floor((N-1)/2).
    static int pair_count(int n) { return (n - 1) / 2; }

    /// The 2x2 block [ (k,k) (k,N-k) ; (N-k,k) (N-k,N-k) ], 1 <= k <= pair_count.
    Eigen::Matrix2cd block(int k) const;

private:
    Eigen::MatrixXcd matrix_;
};

/// Time-domain embedding (W^T, S): real cosine/sine basis and cosine map.
Embedding build_tde(int n_signal, int n_autocov);

/// Frequency-domain embedding (unitary DFT matrix, complex exponential map).
Embedding build_fde(int n_signal, int n_autocov);

/// Graph-induced embedding: same transform as the FDE, with map entry
/// gamma e^{-j w k i} + (1 - gamma) e^{+j w k i}.
Embedding build_gie(int n_signal, int n_autocov, std::complex<double> gamma);

/// The connector satisfying W^T = Lambda * Wtilde and z = Lambda * U.
ConnectorMatrix build_lambda(int n_signal);

/// The eight 2x2 unitary blocks that make a connector times the DFT matrix real.
const std::array<Eigen::Matrix2cd, 8>& real_block_candidates();

/// Number of real embeddings of the half-weight cosine map: 8^floor((N-1)/2),
/// with the degenerate N = 1, 2 cases counting 1.
std::uint64_t real_embedding_count(int n_signal);

/// All real embeddings, addressed by a base-8 integer (least significant
/// digit = pair k = 1). Throws EnumerationTooLarge above the cap.
std::vector<Embedding> enumerate_real_embeddings(int n_signal, int n_autocov,
                                                 std::uint64_t cap = 1000000);

/// Build the single real embedding with the given base-8 index.
Embedding real_embedding_at(int n_signal, int n_autocov, std::uint64_t index);

/// Resolve a label string: "tde", "fde", "gie:<re>[,<im>]", "real:<base8>".
Embedding embedding_from_label(const std::string& label, int n_signal, int n_autocov);

/// True iff (connector * DFT matrix, half-weight cosine map) reproduces the
/// quadratic map on a deterministic randomized battery to 1e-9 relative.
bool verify_embedding_identity(const ConnectorMatrix& connector, int n_signal, int n_autocov);

struct MirrorSpectrum {
    Eigen::VectorXd eigenvalues;   // cos(2 pi m / N), aligned with the columns
    Eigen::MatrixXd eigenvectors;  // the time-domain basis W
};

/// Eigenstructure of the symmetrized ring adjacency (A + A^T)/2.
MirrorSpectrum mirror_graph_spectrum(int n_signal);

// Raw matrix builders shared with the inversion routines.
Eigen::MatrixXd tde_basis(int n_signal);                     // W (columns = basis)
Eigen::MatrixXd tde_spectrum_matrix(int n_signal, int n);    // S, entries cos(w i t)
Eigen::MatrixXcd dft_matrix(int n_signal);                   // Wtilde
Eigen::MatrixXcd fde_spectrum_matrix(int n_signal, int n);   // Stilde, entries e^{j w i k}
Eigen::MatrixXcd gie_spectrum_matrix(int n_signal, int n, std::complex<double> gamma);

}  // namespace indesign::embeddings
