#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <complex>

#include "indesign/embeddings.hpp"
#include "indesign/rng.hpp"
#include "indesign/spectral.hpp"

using namespace indesign;
using spectral::PeriodicInput;
using std::complex;

namespace {

PeriodicInput random_input(int n, std::uint64_t seed) {
    rng::SplitMix64 gen(seed);
    Eigen::VectorXd u(n);
    for (int t = 0; t < n; ++t) u[t] = gen.gaussian();
    return PeriodicInput(u);
}

void check_soundness(const embeddings::Embedding& e, int n_signal, int n, int trials,
                     std::uint64_t seed, double tol = 1e-9) {
    for (int trial = 0; trial < trials; ++trial) {
        const auto u = random_input(n_signal, rng::derive(seed, trial));
        const auto got = e.forward(u);
        const auto want = spectral::quadratic_map(u, n);
        CHECK((got - want).cwiseAbs().maxCoeff() < tol * std::max(1.0, u.power()));
    }
}

}  // namespace

TEST_CASE("time-domain basis is orthogonal for all small N") {
    for (int n = 1; n <= 16; ++n) {
        const Eigen::MatrixXd w = embeddings::tde_basis(n);
        CHECK((w.transpose() * w - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("time-domain embedding N=4 example") {
    const auto tde = embeddings::build_tde(4, 3);
    CHECK(tde.unitarity_defect() < 1e-12);
    Eigen::VectorXd u(4);
    u << 1, 1, -1, 1;
    const Eigen::VectorXd r = tde.forward(PeriodicInput(u));
    CHECK(r[0] == doctest::Approx(4.0));
    CHECK(r[1] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(r[2] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("cosine map entries") {
    const int n_signal = 7, n = 4;
    const Eigen::MatrixXd s = embeddings::tde_spectrum_matrix(n_signal, n);
    const spectral::RootTable roots(n_signal);
    for (int i = 0; i < n; ++i)
        for (int t = 0; t < n_signal; ++t)
            CHECK(s(i, t) == doctest::Approx(roots.cosine(static_cast<long long>(i) * t)));
}

TEST_CASE("time-domain embedding soundness") {
    for (int n_signal : {1, 2, 3, 4, 5, 8, 11, 16}) {
        const int n = std::max(1, n_signal - 2);
        check_soundness(embeddings::build_tde(n_signal, n), n_signal, n, 10, 100 + n_signal);
    }
}

TEST_CASE("frequency-domain embedding soundness on random inputs") {
    for (int trial = 0; trial < 100; ++trial) {
        const int n_signal = 2 + trial % 15;
        const int n = 1 + trial % n_signal;
        const auto fde = embeddings::build_fde(n_signal, n);
        const auto u = random_input(n_signal, 600 + trial);
        CHECK((fde.forward(u) - spectral::quadratic_map(u, n)).cwiseAbs().maxCoeff() <
              1e-9 * std::max(1.0, u.power()));
    }
}

TEST_CASE("impulse input has flat spectrum and white autocovariance") {
    const int n_signal = 6;
    const double c = 3.0;
    Eigen::VectorXd u = Eigen::VectorXd::Zero(n_signal);
    u[0] = std::sqrt(c);
    const auto fde = embeddings::build_fde(n_signal, 4);
    const PeriodicInput input(u, c);
    const Eigen::VectorXcd spectrum =
        fde.transform() * input.samples().cast<complex<double>>();
    for (int k = 0; k < n_signal; ++k) {
        CHECK(std::norm(spectrum[k]) == doctest::Approx(c / n_signal));
    }
    const Eigen::VectorXd r = fde.forward(input);
    CHECK(r[0] == doctest::Approx(c));
    for (int i = 1; i < 4; ++i) CHECK(r[i] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("first row of the frequency map is all ones") {
    const auto s = embeddings::fde_spectrum_matrix(9, 4);
    for (int k = 0; k < 9; ++k) CHECK(std::abs(s(0, k) - complex<double>(1.0, 0.0)) < 1e-15);
}

TEST_CASE("graph-induced map at gamma = 1 agrees with the frequency map on symmetric weights") {
    const int n_signal = 8, n = 5;
    const auto s1 = embeddings::gie_spectrum_matrix(n_signal, n, 1.0);
    const auto s = embeddings::fde_spectrum_matrix(n_signal, n);
    rng::SplitMix64 gen(7);
    Eigen::VectorXd x(n_signal);
    x[0] = gen.next_double();
    x[n_signal / 2] = gen.next_double();
    for (int k = 1; k < n_signal / 2; ++k) {
        x[k] = gen.next_double();
        x[n_signal - k] = x[k];
    }
    const Eigen::VectorXcd via_gie = s1 * x.cast<complex<double>>();
    const Eigen::VectorXcd via_fde = s * x.cast<complex<double>>();
    CHECK((via_gie - via_fde).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("graph-induced map at gamma = 1/2 is the real cosine matrix") {
    const auto s = embeddings::gie_spectrum_matrix(6, 4, 0.5);
    const spectral::RootTable roots(6);
    for (int i = 0; i < 4; ++i) {
        for (int k = 0; k < 6; ++k) {
            CHECK(s(i, k).imag() == doctest::Approx(0.0).epsilon(1e-16));
            CHECK(s(i, k).real() ==
                  doctest::Approx(roots.cosine(static_cast<long long>(i) * k)));
        }
    }
}

TEST_CASE("graph-induced embedding soundness for complex gamma") {
    check_soundness(embeddings::build_gie(9, 5, {0.3, 0.7}), 9, 5, 20, 42);
    check_soundness(embeddings::build_gie(8, 5, {2.0, -3.0}), 8, 5, 20, 43);
    check_soundness(embeddings::build_gie(7, 7, {0.0, 0.0}), 7, 7, 20, 44);
}

TEST_CASE("graph-induced maps agree with the frequency map on all symmetric vectors") {
    const int n_signal = 9, n = 5;
    const auto s = embeddings::fde_spectrum_matrix(n_signal, n);
    const complex<double> gammas[] = {{0.0, 0.0}, {0.5, 0.0}, {1.0, 0.0}, {2.0, -3.0}};
    rng::SplitMix64 gen(64);
    for (int trial = 0; trial < 10; ++trial) {
        Eigen::VectorXd x(n_signal);
        x[0] = gen.next_double();
        for (int k = 1; k <= (n_signal - 1) / 2; ++k) {
            x[k] = gen.next_double();
            x[n_signal - k] = x[k];
        }
        const Eigen::VectorXcd reference = s * x.cast<complex<double>>();
        for (const auto gamma : gammas) {
            const auto sg = embeddings::gie_spectrum_matrix(n_signal, n, gamma);
            const Eigen::VectorXcd mapped = sg * x.cast<complex<double>>();
            CHECK((mapped - reference).cwiseAbs().maxCoeff() < 1e-12);
        }
    }
}

TEST_CASE("embedding labels resolve to the right families") {
    const int n_signal = 6, n = 4;
    CHECK(embeddings::embedding_from_label("tde", n_signal, n).label() == "tde");
    CHECK(embeddings::embedding_from_label("fde", n_signal, n).label() == "fde");
    const auto gie = embeddings::embedding_from_label("gie:0.3,0.7", n_signal, n);
    const auto direct = embeddings::build_gie(n_signal, n, {0.3, 0.7});
    CHECK((gie.spectrum_to_autocov() - direct.spectrum_to_autocov()).cwiseAbs().maxCoeff() <
          1e-15);
    const auto real_member = embeddings::embedding_from_label("real:12", n_signal, n);
    const auto direct_member = embeddings::real_embedding_at(n_signal, n, 012);
    CHECK((real_member.transform() - direct_member.transform()).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(real_member.label() == "real:12");
    CHECK_THROWS_AS(embeddings::embedding_from_label("nope", n_signal, n), Error);
    CHECK_THROWS_AS(embeddings::embedding_from_label("real:9", n_signal, n), Error);
}

TEST_CASE("imaginary residue through complex-gamma embeddings stays tiny") {
    const int n_signal = 10, n = 6;
    const auto gie = embeddings::build_gie(n_signal, n, {1.25, -0.75});
    for (int trial = 0; trial < 20; ++trial) {
        const auto u = random_input(n_signal, 900 + trial);
        const Eigen::VectorXcd v = gie.transform() * u.samples().cast<complex<double>>();
        const Eigen::VectorXcd r =
            gie.spectrum_to_autocov() * v.cwiseAbs2().cast<complex<double>>();
        CHECK(r.imag().cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("connector matches the worked N=4 matrix") {
    const auto lambda = embeddings::build_lambda(4);
    const double h = 1.0 / std::sqrt(2.0);
    Eigen::MatrixXcd expected(4, 4);
    // Sine-row couplings carry +j on column k and -j on column N-k; the
    // worked 4x4 example prints them with the opposite sign, which is
    // inconsistent with its own phase bookkeeping.
    expected << 1, 0, 0, 0,                                      //
        0, h, 0, h,                                              //
        0, 0, 1, 0,                                              //
        0, complex<double>(0, h), 0, complex<double>(0, -h);
    CHECK((lambda.matrix() - expected).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("connector is unitary") {
    for (int n = 1; n <= 12; ++n) {
        const auto lambda = embeddings::build_lambda(n);
        const Eigen::MatrixXcd gram = lambda.matrix().adjoint() * lambda.matrix();
        CHECK((gram - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("connector identities across N = 3..16") {
    for (int n_signal = 3; n_signal <= 16; ++n_signal) {
        const int n = std::max(1, n_signal / 2);
        const auto lambda = embeddings::build_lambda(n_signal);
        const Eigen::MatrixXcd wt =
            embeddings::tde_basis(n_signal).transpose().cast<complex<double>>();
        const Eigen::MatrixXcd product = lambda.matrix() * embeddings::dft_matrix(n_signal);
        CHECK((wt - product).cwiseAbs().maxCoeff() < 1e-10);

        const Eigen::MatrixXcd s_tilde = embeddings::fde_spectrum_matrix(n_signal, n);
        const Eigen::MatrixXd s = embeddings::tde_spectrum_matrix(n_signal, n);
        const Eigen::MatrixXcd averaged = 0.5 * (s_tilde + s_tilde.conjugate());
        CHECK((averaged - s.cast<complex<double>>()).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("transformed coordinates agree through the connector") {
    for (int trial = 0; trial < 50; ++trial) {
        const int n_signal = 2 + trial % 13;
        const auto u = random_input(n_signal, 7000 + trial);
        const Eigen::VectorXd z =
            embeddings::tde_basis(n_signal).transpose() * u.samples();
        const Eigen::VectorXcd spectrum =
            embeddings::dft_matrix(n_signal) * u.samples().cast<complex<double>>();
        const Eigen::VectorXcd mapped = embeddings::build_lambda(n_signal).matrix() * spectrum;
        CHECK((mapped - z.cast<complex<double>>()).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("real embedding counts for N = 1..6") {
    CHECK(embeddings::real_embedding_count(1) == 1);
    CHECK(embeddings::real_embedding_count(2) == 1);
    CHECK(embeddings::real_embedding_count(3) == 8);
    CHECK(embeddings::real_embedding_count(4) == 8);
    CHECK(embeddings::real_embedding_count(5) == 64);
    CHECK(embeddings::real_embedding_count(6) == 64);
    CHECK(embeddings::enumerate_real_embeddings(3, 2).size() == 8);
    CHECK(embeddings::enumerate_real_embeddings(4, 3).size() == 8);
    CHECK(embeddings::enumerate_real_embeddings(5, 3).size() == 64);
    CHECK(embeddings::enumerate_real_embeddings(6, 3).size() == 64);
}

TEST_CASE("enumeration cap is enforced") {
    CHECK_THROWS_AS(embeddings::enumerate_real_embeddings(16, 4, 1000), EnumerationTooLarge);
}

TEST_CASE("every real embedding is orthogonal and sound") {
    for (int n_signal : {3, 4, 5, 6}) {
        const int n = n_signal - 1;
        const auto members = embeddings::enumerate_real_embeddings(n_signal, n);
        for (const auto& e : members) {
            CHECK(e.real_valued());
            const Eigen::MatrixXd t = e.real_transform();
            CHECK((t.transpose() * t - Eigen::MatrixXd::Identity(n_signal, n_signal))
                      .cwiseAbs()
                      .maxCoeff() < 1e-12);
            check_soundness(e, n_signal, n, 20, 1234 + n_signal);
        }
    }
}

TEST_CASE("eight block candidates are unitary and exhaust the real members") {
    const auto& candidates = embeddings::real_block_candidates();
    for (const auto& q : candidates) {
        CHECK((q.adjoint() * q - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff() < 1e-15);
    }
    // The canonical connector's blocks are the third candidate.
    const auto lambda = embeddings::build_lambda(6);
    for (int k = 1; k <= embeddings::ConnectorMatrix::pair_count(6); ++k) {
        CHECK((lambda.block(k) - candidates[2]).cwiseAbs().maxCoeff() < 1e-15);
    }
}

TEST_CASE("identity check accepts members of the block family") {
    const int n_signal = 6, n = 3;
    CHECK(embeddings::verify_embedding_identity(embeddings::build_lambda(n_signal), n_signal, n));
    CHECK(embeddings::verify_embedding_identity(
        embeddings::ConnectorMatrix(Eigen::MatrixXcd::Identity(n_signal, n_signal)), n_signal, n));
}

TEST_CASE("identity check rejects non-unitary blocks and bad patterns") {
    const int n_signal = 6, n = 3;
    Eigen::MatrixXcd lam = embeddings::build_lambda(n_signal).matrix();
    lam(1, 1) *= 3.0;  // block stays in pattern but is no longer unitary
    CHECK_FALSE(embeddings::verify_embedding_identity(embeddings::ConnectorMatrix(lam), n_signal, n));

    Eigen::MatrixXcd off_pattern = embeddings::build_lambda(n_signal).matrix();
    off_pattern(0, 3) = 0.5;
    CHECK_THROWS_AS(embeddings::ConnectorMatrix{off_pattern}, BadStructure);
}

TEST_CASE("random unitary blocks pass the identity check") {
    const int n_signal = 8, n = 4;
    rng::SplitMix64 gen(99);
    Eigen::MatrixXcd lam = Eigen::MatrixXcd::Zero(n_signal, n_signal);
    lam(0, 0) = 1.0;
    lam(n_signal / 2, n_signal / 2) = 1.0;
    for (int k = 1; k <= embeddings::ConnectorMatrix::pair_count(n_signal); ++k) {
        // Random 2x2 unitary from a complex Givens construction.
        const double c = std::cos(gen.uniform(0, 1.5));
        const double s = std::sqrt(1 - c * c);
        const complex<double> phase1 = std::polar(1.0, gen.uniform(0, 6.28));
        const complex<double> phase2 = std::polar(1.0, gen.uniform(0, 6.28));
        lam(k, k) = c * phase1;
        lam(k, n_signal - k) = s * phase2;
        lam(n_signal - k, k) = -s * std::conj(phase2);
        lam(n_signal - k, n_signal - k) = c * std::conj(phase1);
    }
    CHECK(embeddings::verify_embedding_identity(embeddings::ConnectorMatrix(lam), n_signal, n));
}

TEST_CASE("mirror graph spectrum at N = 4") {
    const auto mirror = embeddings::mirror_graph_spectrum(4);
    Eigen::VectorXd expected(4);
    expected << 1, 0, -1, 0;
    CHECK((mirror.eigenvalues - expected).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("time-domain basis diagonalizes the mirror graph") {
    for (int n : {3, 4, 5, 8, 9, 12}) {
        const auto mirror = embeddings::mirror_graph_spectrum(n);
        const Eigen::MatrixXd a = spectral::ring_adjacency(n);
        const Eigen::MatrixXd sym = 0.5 * (a + a.transpose());
        const Eigen::MatrixXd rebuilt = mirror.eigenvectors *
                                        mirror.eigenvalues.asDiagonal() *
                                        mirror.eigenvectors.transpose();
        CHECK((rebuilt - sym).cwiseAbs().maxCoeff() < 1e-10);
        CHECK((mirror.eigenvectors - embeddings::tde_basis(n)).cwiseAbs().maxCoeff() < 1e-14);
    }
}

TEST_CASE("cosine map rows hold the eigenvalues of the symmetrized i-step shift") {
    const int n_signal = 9;
    const Eigen::MatrixXd s = embeddings::tde_spectrum_matrix(n_signal, n_signal);
    Eigen::MatrixXd a = spectral::ring_adjacency(n_signal);
    Eigen::MatrixXd power = Eigen::MatrixXd::Identity(n_signal, n_signal);
    for (int i = 0; i < n_signal; ++i) {
        const Eigen::MatrixXd sym = 0.5 * (power + power.transpose());
        const auto eig = spectral::circulant_eig(
            spectral::CirculantMatrix(sym.row(0).transpose().cast<complex<double>>()));
        for (int t = 0; t < n_signal; ++t) {
            CHECK(std::abs(eig.eigenvalues[t] - complex<double>(s(i, t), 0.0)) < 1e-10);
        }
        power *= a;
    }
}
