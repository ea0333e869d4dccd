// indesign — optimal input design for regularized FIR identification.
//
// Subcommands: design, invert, verify, simulate, reproduce-paper.
// Exit codes: 0 success, 2 config error, 3 solver not converged,
// 4 infeasible autocovariance, 1 any other failure.

#include <CLI11.hpp>

#include <atomic>
#include <chrono>
#include <complex>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "indesign/config.hpp"
#include "indesign/design.hpp"
#include "indesign/embeddings.hpp"
#include "indesign/identify.hpp"
#include "indesign/inversion.hpp"
#include "indesign/rng.hpp"
#include "indesign/serialize.hpp"
#include "indesign/spectral.hpp"

namespace {

using namespace indesign;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

constexpr int kExitConfig = 2;
constexpr int kExitNotConverged = 3;
constexpr int kExitInfeasible = 4;

double elapsed_seconds(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

/// Deterministic parallel map: work is addressed by index, so the output is
/// identical no matter how many threads run it (INDESIGN_THREADS=1 to force
/// serial execution).
template <typename Fn>
void parallel_for(int count, Fn&& fn) {
    unsigned threads = std::thread::hardware_concurrency();
    if (const char* env = std::getenv("INDESIGN_THREADS")) {
        threads = static_cast<unsigned>(std::max(1, std::atoi(env)));
    }
    threads = std::min<unsigned>(std::max<unsigned>(threads, 1), 64);
    if (threads <= 1 || count <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::exception_ptr> errors(threads);
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned w = 0; w < threads; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (int i; (i = next.fetch_add(1)) < count;) fn(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

struct Route {
    enum Kind { Fdie, Tdie, Giie } kind = Giie;
    std::complex<double> gamma{0.5, 0.0};
    std::string text() const {
        switch (kind) {
            case Fdie: return "fdie";
            case Tdie: return "tdie";
            case Giie:
                return "giie:" + io::format_double(gamma.real()) + "," +
                       io::format_double(gamma.imag());
        }
        return "?";
    }
};

std::complex<double> parse_gamma(const std::string& text) {
    const auto comma = text.find(',');
    if (comma == std::string::npos) return {io::parse_double(text), 0.0};
    return {io::parse_double(text.substr(0, comma)), io::parse_double(text.substr(comma + 1))};
}

Route parse_route(const std::string& text, const std::optional<std::string>& gamma_flag) {
    Route route;
    if (text == "fdie") {
        route.kind = Route::Fdie;
    } else if (text == "tdie") {
        route.kind = Route::Tdie;
    } else if (text == "giie") {
        route.kind = Route::Giie;
    } else if (text.rfind("giie:", 0) == 0) {
        route.kind = Route::Giie;
        route.gamma = parse_gamma(text.substr(5));
    } else {
        throw io::ConfigError("route", "unknown route '" + text + "'");
    }
    if (gamma_flag) {
        if (route.kind != Route::Giie) {
            throw io::ConfigError("gamma", "--gamma only applies to the giie route");
        }
        route.gamma = parse_gamma(*gamma_flag);
    }
    return route;
}

/// One input drawn by the requested route with per-index seed derivation.
spectral::PeriodicInput draw_input(const inversion::Autocovariance& r, int n_signal,
                                   const Route& route, std::uint64_t master_seed, int index) {
    const std::uint64_t input_seed = rng::derive(master_seed, static_cast<std::uint64_t>(index));
    const std::uint64_t solver_seed = rng::derive(input_seed, 2);
    switch (route.kind) {
        case Route::Fdie:
            return inversion::fdie(r, n_signal,
                                   inversion::PhaseAssignment::random(
                                       n_signal, rng::derive(input_seed, 1)),
                                   solver_seed);
        case Route::Giie:
            return inversion::giie(r, n_signal, route.gamma,
                                   inversion::PhaseAssignment::random(
                                       n_signal, rng::derive(input_seed, 1)),
                                   solver_seed);
        case Route::Tdie: {
            rng::SplitMix64 gen(rng::derive(input_seed, 3));
            std::vector<int> signs(n_signal);
            for (auto& s : signs) s = gen.sign();
            return inversion::tdie(r, n_signal, signs, solver_seed);
        }
    }
    throw Error("draw_input: unknown route");
}

struct InversionBatch {
    Eigen::MatrixXd inputs;      // count x N
    Eigen::MatrixXd membership;  // count x 2, rows (l1, scaled)
    int passes = 0;
    double max_relative_residual = 0.0;  // ||f(u) - r||_2 / C
};

InversionBatch run_inversion(const inversion::Autocovariance& r, int n_signal, int count,
                             const Route& route, std::uint64_t seed) {
    InversionBatch batch;
    batch.inputs.resize(count, n_signal);
    batch.membership.resize(count, 2);
    std::vector<char> pass_flags(count, 0);
    std::vector<double> residuals(count, 0.0);
    parallel_for(count, [&](int i) {
        const auto input = draw_input(r, n_signal, route, seed, i);
        const auto report = inversion::membership_check(input, r);
        batch.inputs.row(i) = input.samples().transpose();
        batch.membership(i, 0) = report.l1;
        batch.membership(i, 1) = report.scaled;
        pass_flags[i] = report.pass ? 1 : 0;
        residuals[i] =
            (spectral::quadratic_map(input, r.size()) - r.values()).norm() / r.power();
    });
    for (int i = 0; i < count; ++i) {
        batch.passes += pass_flags[i];
        batch.max_relative_residual = std::max(batch.max_relative_residual, residuals[i]);
    }
    return batch;
}

std::string resolve_out_dir(const std::string& flag_value, const std::string& config_value) {
    if (!flag_value.empty()) return flag_value;
    if (!config_value.empty()) return config_value;
    if (const char* env = std::getenv("INDESIGN_OUT_DIR")) return env;
    return "out";
}

void write_summary(const std::filesystem::path& dir, const json& summary) {
    std::ofstream out(dir / "summary.json");
    if (!out) throw Error("cannot write " + (dir / "summary.json").string());
    out << summary.dump(2) << "\n";
}

void write_scatter(const std::filesystem::path& dir, const Eigen::MatrixXd& membership) {
    io::write_matrix_csv(dir / "scatter.csv", "l1_scaled_pairs", membership);
    Eigen::MatrixXd reference(2, 2);
    const double lo = membership.rows() > 0 ? membership.col(0).minCoeff() : 0.0;
    const double hi = membership.rows() > 0 ? membership.col(0).maxCoeff() : 1.0;
    reference << lo, lo, hi, hi;
    io::write_matrix_csv(dir / "reference.csv", "y_equals_x", reference);
}

// ---------------------------------------------------------------------------
// design

int cmd_design(const std::string& config_path, const std::string& out_dir_flag,
               const std::optional<std::string>& criterion_flag,
               const std::optional<double>& tol_flag, const std::optional<int>& max_iter_flag,
               const std::optional<std::uint64_t>& seed_flag, bool line_search_flag) {
    io::ProblemConfig config = io::parse_config_file(config_path);
    if (criterion_flag) config.problem.criterion = io::parse_criterion(*criterion_flag);
    if (tol_flag) config.solver.tol = *tol_flag;
    if (max_iter_flag) config.solver.max_iter = *max_iter_flag;
    if (seed_flag) config.seed = *seed_flag;
    if (line_search_flag) config.solver.line_search = true;
    config.out_dir = resolve_out_dir(out_dir_flag, config.out_dir);

    const auto start = Clock::now();
    std::optional<design::DesignSolution> solution;
    try {
        solution = design::solve_design(config.problem, config.solver);
    } catch (const design::NotConverged& e) {
        std::cerr << "design: " << e.what() << "\n";
        io::RunArtifact artifact{config,
                                 e.best.r_star.values(),
                                 e.best.w_star.weights(),
                                 e.best.objective,
                                 e.best.certificate,
                                 e.best.iterations,
                                 false,
                                 {},
                                 {}};
        io::write_artifact(config.out_dir, artifact);
        return kExitNotConverged;
    }

    io::RunArtifact artifact{config,
                             solution->r_star.values(),
                             solution->w_star.weights(),
                             solution->objective,
                             solution->certificate,
                             solution->iterations,
                             solution->converged,
                             {},
                             {}};
    io::write_artifact(config.out_dir, artifact);
    std::cout << "design: objective " << io::format_double(solution->objective)
              << ", certificate " << io::format_double(solution->certificate) << ", "
              << solution->iterations << " iterations, "
              << io::format_double(elapsed_seconds(start)) << " s -> " << config.out_dir << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// invert

int cmd_invert(const std::string& artifact_dir, int count, const std::string& route_text,
               const std::optional<std::string>& gamma_flag, std::uint64_t seed,
               const std::string& out_dir_flag) {
    const Route route = parse_route(route_text, gamma_flag);
    io::RunArtifact artifact = io::read_artifact(artifact_dir);
    const std::string out_dir = out_dir_flag.empty() ? artifact_dir : out_dir_flag;

    const inversion::Autocovariance r(artifact.r_star);
    const int n_signal = artifact.config.problem.n_signal;
    const auto start = Clock::now();
    const InversionBatch batch = run_inversion(r, n_signal, count, route, seed);

    artifact.inputs = batch.inputs;
    artifact.membership = batch.membership;
    io::write_artifact(out_dir, artifact);
    write_scatter(out_dir, batch.membership);
    write_summary(out_dir, json{{"command", "invert"},
                                {"route", route.text()},
                                {"count", count},
                                {"passes", batch.passes},
                                {"max_relative_residual", batch.max_relative_residual},
                                {"seed", seed},
                                {"seconds", elapsed_seconds(start)}});
    std::cout << "invert: " << batch.passes << "/" << count << " membership passes via "
              << route.text() << " -> " << out_dir << "\n";
    return batch.passes == count ? 0 : 1;
}

// ---------------------------------------------------------------------------
// verify

struct VerifyReport {
    int failures = 0;
    void item(const std::string& name, bool pass, const std::string& detail = "") {
        std::cout << (pass ? "PASS " : "FAIL ") << name;
        if (!pass && !detail.empty()) std::cout << " (" << detail << ")";
        std::cout << "\n";
        if (!pass) ++failures;
    }
};

int cmd_verify(int n_signal, int n_params, std::uint64_t cap,
               const std::vector<std::string>& embedding_labels) {
    VerifyReport report;
    rng::SplitMix64 gen(2718281828);

    const auto random_input = [&](int size, std::uint64_t seed) {
        rng::SplitMix64 local(seed);
        Eigen::VectorXd u(size);
        for (int t = 0; t < size; ++t) u[t] = local.gaussian();
        return spectral::PeriodicInput(u);
    };

    {  // transform round trip
        double worst = 0.0;
        for (int trial = 0; trial < 25; ++trial) {
            const auto u = random_input(n_signal, gen.next_u64());
            const auto back = spectral::idft(spectral::dft(u));
            worst = std::max(worst, (back.samples() - u.samples()).cwiseAbs().maxCoeff());
        }
        report.item("dft-round-trip", worst <= 1e-10, "worst " + io::format_double(worst));
    }

    {  // embedding soundness across the families
        double worst = 0.0;
        const embeddings::Embedding members[] = {
            embeddings::build_tde(n_signal, n_params),
            embeddings::build_fde(n_signal, n_params),
            embeddings::build_gie(n_signal, n_params, {0.5, 0.0}),
            embeddings::build_gie(n_signal, n_params, {0.3, 0.7}),
        };
        for (const auto& e : members) {
            for (int trial = 0; trial < 25; ++trial) {
                const auto u = random_input(n_signal, gen.next_u64());
                const auto got = e.forward(u);
                const auto want = spectral::quadratic_map(u, n_params);
                worst = std::max(worst,
                                 (got - want).cwiseAbs().maxCoeff() / std::max(1.0, u.power()));
            }
        }
        report.item("embedding-soundness", worst <= 1e-9, "worst " + io::format_double(worst));
    }

    {  // connector identities
        const Eigen::MatrixXcd lambda = embeddings::build_lambda(n_signal).matrix();
        const double basis_defect =
            (embeddings::tde_basis(n_signal).transpose().cast<std::complex<double>>() -
             lambda * embeddings::dft_matrix(n_signal))
                .cwiseAbs()
                .maxCoeff();
        const Eigen::MatrixXcd s_tilde = embeddings::fde_spectrum_matrix(n_signal, n_params);
        const double map_defect =
            (0.5 * (s_tilde + s_tilde.conjugate()) -
             embeddings::tde_spectrum_matrix(n_signal, n_params).cast<std::complex<double>>())
                .cwiseAbs()
                .maxCoeff();
        report.item("connector-identities", basis_defect <= 1e-10 && map_defect <= 1e-10,
                    io::format_double(basis_defect) + " / " + io::format_double(map_defect));
    }

    {  // real embedding enumeration
        const std::uint64_t count = embeddings::real_embedding_count(n_signal);
        if (count > cap) {
            report.item("real-embedding-count", true,
                        "skipped: " + std::to_string(count) + " members over cap");
        } else {
            const auto members = embeddings::enumerate_real_embeddings(n_signal, n_params, cap);
            bool sound = members.size() == count;
            for (const auto& e : members) {
                const auto u = random_input(n_signal, gen.next_u64());
                const auto got = e.forward(u);
                const auto want = spectral::quadratic_map(u, n_params);
                sound = sound &&
                        (got - want).cwiseAbs().maxCoeff() <= 1e-9 * std::max(1.0, u.power());
                sound = sound && e.real_valued();
            }
            report.item("real-embedding-count", sound,
                        std::to_string(members.size()) + " members");
        }
    }

    {  // feasibility-set dimension and seed behavior
        const int expected =
            n_signal >= 2 * n_params ? n_signal / 2 - n_params + 1 : 0;
        const int dim = inversion::affine_solution_dimension(n_signal, n_params);
        bool pass = dim == expected;
        std::string detail = "dimension " + std::to_string(dim);
        const auto r = inversion::Autocovariance(
            spectral::quadratic_map(random_input(n_signal, gen.next_u64()), n_params));
        const auto w1 = inversion::solve_spectrum(r, n_signal, 1);
        const auto w2 = inversion::solve_spectrum(r, n_signal, 2);
        const double spread = (w1.weights() - w2.weights()).cwiseAbs().maxCoeff();
        if (n_signal < 2 * n_params) {
            pass = pass && spread <= 1e-8 * r.power();
            detail += ", singleton spread " + io::format_double(spread);
        }
        report.item("spectrum-solution-dimension", pass, detail);
    }

    {  // circulant eigenstructure
        double worst = 0.0;
        for (int trial = 0; trial < 10; ++trial) {
            Eigen::VectorXcd generator(n_signal);
            for (int k = 0; k < n_signal; ++k) {
                generator[k] = std::complex<double>(gen.gaussian(), gen.gaussian());
            }
            const spectral::CirculantMatrix b(generator);
            const auto eig = spectral::circulant_eig(b);
            const Eigen::MatrixXcd dense = b.dense();
            worst = std::max(worst, (eig.eigenvectors * eig.eigenvalues.asDiagonal() *
                                         eig.eigenvectors.adjoint() -
                                     dense)
                                        .norm() /
                                        dense.norm());
        }
        const spectral::RootTable roots(n_signal);
        const Eigen::MatrixXd a = spectral::ring_adjacency(n_signal);
        const auto shift_eig = spectral::circulant_eig(
            spectral::CirculantMatrix(a.row(0).transpose().cast<std::complex<double>>()));
        const auto mirror = embeddings::mirror_graph_spectrum(n_signal);
        double spectra = 0.0;
        for (int m = 0; m < n_signal; ++m) {
            spectra = std::max(spectra, std::abs(shift_eig.eigenvalues[m] - roots.inverse(m)));
            spectra = std::max(spectra, std::abs(mirror.eigenvalues[m] - roots.cosine(m)));
        }
        report.item("circulant-reconstruction", worst <= 1e-10 && spectra <= 1e-10,
                    io::format_double(worst) + " / " + io::format_double(spectra));
    }

    for (const std::string& label : embedding_labels) {
        try {
            const auto e = embeddings::embedding_from_label(label, n_signal, n_params);
            double worst = 0.0;
            for (int trial = 0; trial < 50; ++trial) {
                const auto u = random_input(n_signal, gen.next_u64());
                const auto got = e.forward(u);
                const auto want = spectral::quadratic_map(u, n_params);
                worst = std::max(worst,
                                 (got - want).cwiseAbs().maxCoeff() / std::max(1.0, u.power()));
            }
            report.item("embedding " + label,
                        worst <= 1e-9 && e.unitarity_defect() <= 1e-10,
                        "worst " + io::format_double(worst));
        } catch (const Error& e) {
            report.item("embedding " + label, false, e.what());
        }
    }

    std::cout << (report.failures == 0 ? "verify: all checks passed"
                                       : "verify: " + std::to_string(report.failures) + " failed")
              << "\n";
    return report.failures == 0 ? 0 : 1;
}

// ---------------------------------------------------------------------------
// simulate

int cmd_simulate(const std::string& config_path, int trials, std::uint64_t seed,
                 const std::string& out_dir_flag, bool noiseless) {
    io::ProblemConfig config = io::parse_config_file(config_path);
    config.out_dir = resolve_out_dir(out_dir_flag, config.out_dir);

    std::optional<design::DesignSolution> maybe_solution;
    try {
        maybe_solution = design::solve_design(config.problem, config.solver);
    } catch (const design::NotConverged& e) {
        std::cerr << "simulate: " << e.what() << "\n";
        return kExitNotConverged;
    }
    const design::DesignSolution& solution = *maybe_solution;

    // Ground truth drawn from the kernel prior, matching the estimator model.
    identify::FirSystem system;
    system.noise_variance = config.problem.sigma2;
    const Eigen::MatrixXd kernel = design::realize_kernel(config.problem.kernel);
    const Eigen::LLT<Eigen::MatrixXd> llt(kernel);
    rng::SplitMix64 gen(rng::derive(seed == 0 ? config.seed : seed, 0xF1));
    Eigen::VectorXd white(config.problem.n_params);
    for (int i = 0; i < white.size(); ++i) white[i] = gen.gaussian();
    system.impulse_response = llt.matrixL() * white;

    const auto report = identify::evaluate_design(config.problem, solution, system, trials,
                                                  seed == 0 ? config.seed : seed, noiseless);

    std::filesystem::create_directories(config.out_dir);
    json trials_json = json::array();
    for (const auto& record : report.records) {
        trials_json.push_back(json{{"designed_error", record.designed_error},
                                   {"baseline_error", record.baseline_error},
                                   {"baseline_objective", record.baseline_objective}});
    }
    write_summary(config.out_dir,
                  json{{"command", "simulate"},
                       {"trials", report.trials},
                       {"designed_objective", report.designed_objective},
                       {"mean_designed_error", report.mean_designed_error},
                       {"mean_baseline_error", report.mean_baseline_error},
                       {"mean_baseline_objective", report.mean_baseline_objective},
                       {"records", trials_json}});
    std::cout << "simulate: mean error designed "
              << io::format_double(report.mean_designed_error) << " vs baseline "
              << io::format_double(report.mean_baseline_error) << " over " << report.trials
              << " trials -> " << config.out_dir << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// reproduce-paper

int cmd_reproduce_paper(int trials, const std::string& route_text,
                        const std::optional<std::string>& gamma_flag,
                        const std::string& out_dir_flag, std::uint64_t seed,
                        const std::string& criterion_text) {
    const Route route = parse_route(route_text, gamma_flag);
    const auto start = Clock::now();

    io::ProblemConfig config;
    config.problem.n_signal = 120;
    config.problem.n_params = 50;
    config.problem.power = 120.0;
    config.problem.sigma2 = 0.5;
    config.problem.kernel = design::KernelSpec::tc(50, 1.0, 0.85);
    config.problem.criterion = io::parse_criterion(criterion_text);
    config.solver.line_search = true;
    config.solver.max_iter = 200000;
    config.solver.tol = 1e-6;
    config.seed = seed;
    config.out_dir = resolve_out_dir(out_dir_flag, "");

    std::string stage = "design";
    try {
        design::DesignSolution solution = design::solve_design(config.problem, config.solver);
        const double design_seconds = elapsed_seconds(start);
        const double gap_bound = config.solver.tol * (1.0 + std::abs(solution.objective));
        std::cout << "design: objective " << io::format_double(solution.objective)
                  << ", certificate " << io::format_double(solution.certificate) << " <= "
                  << io::format_double(gap_bound) << ", " << io::format_double(design_seconds)
                  << " s\n";

        stage = "invert";
        const InversionBatch batch =
            run_inversion(solution.r_star, config.problem.n_signal, trials, route, seed);
        std::cout << "invert: " << batch.passes << "/" << trials
                  << " membership passes, max relative residual "
                  << io::format_double(batch.max_relative_residual) << "\n";

        stage = "report";
        const double total_seconds = elapsed_seconds(start);
        const bool certificate_ok = solution.certificate <= gap_bound;
        const bool members_ok = batch.passes == trials;
        const bool residual_ok = batch.max_relative_residual <= 1e-6;
        io::RunArtifact artifact{config,
                                 solution.r_star.values(),
                                 solution.w_star.weights(),
                                 solution.objective,
                                 solution.certificate,
                                 solution.iterations,
                                 solution.converged,
                                 batch.inputs,
                                 batch.membership};
        io::write_artifact(config.out_dir, artifact);
        write_scatter(config.out_dir, batch.membership);
        write_summary(config.out_dir,
                      json{{"command", "reproduce-paper"},
                           {"route", route.text()},
                           {"trials", trials},
                           {"objective", solution.objective},
                           {"certificate", solution.certificate},
                           {"certificate_bound", gap_bound},
                           {"certificate_ok", certificate_ok},
                           {"membership_passes", batch.passes},
                           {"membership_ok", members_ok},
                           {"max_relative_residual", batch.max_relative_residual},
                           {"residual_ok", residual_ok},
                           {"seconds", total_seconds},
                           {"seed", seed}});
        const bool all_ok = certificate_ok && members_ok && residual_ok;
        std::cout << (all_ok ? "reproduce-paper: PASS" : "reproduce-paper: FAIL") << " in "
                  << io::format_double(total_seconds) << " s -> " << config.out_dir << "\n";
        return all_ok ? 0 : 1;
    } catch (const design::NotConverged& e) {
        std::cerr << "reproduce-paper: stage " << stage << ": " << e.what() << "\n";
        return kExitNotConverged;
    } catch (const Infeasible& e) {
        std::cerr << "reproduce-paper: stage " << stage << ": " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const std::exception& e) {
        std::cerr << "reproduce-paper: stage " << stage << ": " << e.what() << "\n";
        return 1;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Optimal input design for regularized FIR identification"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::string artifact_dir;
    std::string route_text = "giie";
    std::string criterion_text;
    std::optional<std::string> gamma_flag;
    std::optional<double> tol_flag;
    std::optional<int> max_iter_flag;
    std::optional<std::uint64_t> seed_flag;
    std::uint64_t seed = 0;
    int count = 100;
    int trials = 100;
    int verify_n_signal = 8;
    int verify_n_params = 3;
    std::uint64_t cap = 1000000;
    bool line_search = false;
    bool noiseless = false;

    auto* design_cmd = app.add_subcommand("design", "Solve the convex autocovariance design");
    design_cmd->add_option("--config", config_path, "JSON problem config")->required();
    design_cmd->add_option("--out-dir", out_dir, "Output directory")
        ->envname("INDESIGN_OUT_DIR");
    design_cmd->add_option("--criterion", criterion_text, "d | a | e");
    design_cmd->add_option("--tol", tol_flag, "Relative certificate tolerance");
    design_cmd->add_option("--max-iter", max_iter_flag, "Iteration budget");
    design_cmd->add_option("--seed", seed_flag, "Run seed");
    design_cmd->add_flag("--line-search", line_search, "Enable exact line search");

    auto* invert_cmd = app.add_subcommand("invert", "Draw inputs matching a designed r*");
    invert_cmd->add_option("--artifact", artifact_dir, "Directory with artifact.json")
        ->required();
    invert_cmd->add_option("--count", count, "Number of inputs to draw");
    invert_cmd->add_option("--route", route_text, "fdie | tdie | giie[:re,im]");
    invert_cmd->add_option("--gamma", gamma_flag, "Graph weight for the giie route, 're[,im]'");
    invert_cmd->add_option("--seed", seed, "Master seed (per-input seeds derive from it)");
    invert_cmd->add_option("--out-dir", out_dir, "Output directory (defaults to the artifact)")
        ->envname("INDESIGN_OUT_DIR");

    auto* verify_cmd = app.add_subcommand("verify", "Run the structural invariant battery");
    verify_cmd->add_option("--N", verify_n_signal, "Signal length");
    verify_cmd->add_option("--n", verify_n_params, "Autocovariance length");
    verify_cmd->add_option("--cap", cap, "Real-embedding enumeration cap");
    std::vector<std::string> embedding_labels;
    verify_cmd->add_option("--embedding", embedding_labels,
                           "Additionally check a named embedding: tde | fde | gie:re[,im] | "
                           "real:<base8>");

    auto* simulate_cmd = app.add_subcommand("simulate", "Monte-Carlo identification comparison");
    simulate_cmd->add_option("--config", config_path, "JSON problem config")->required();
    simulate_cmd->add_option("--trials", trials, "Monte-Carlo trials");
    simulate_cmd->add_option("--seed", seed, "Master seed");
    simulate_cmd->add_option("--out-dir", out_dir, "Output directory")
        ->envname("INDESIGN_OUT_DIR");
    simulate_cmd->add_flag("--noiseless", noiseless, "Run the noiseless limit");

    auto* reproduce_cmd =
        app.add_subcommand("reproduce-paper", "Full design + inversion reference run");
    reproduce_cmd->add_option("--trials", trials, "Number of inputs to draw");
    reproduce_cmd->add_option("--route", route_text, "fdie | tdie | giie[:re,im]");
    reproduce_cmd->add_option("--gamma", gamma_flag, "Graph weight for the giie route");
    reproduce_cmd->add_option("--criterion", criterion_text, "d | a | e");
    reproduce_cmd->add_option("--seed", seed, "Master seed");
    reproduce_cmd->add_option("--out-dir", out_dir, "Output directory")
        ->envname("INDESIGN_OUT_DIR");

    CLI11_PARSE(app, argc, argv);

    try {
        if (design_cmd->parsed()) {
            return cmd_design(config_path, out_dir,
                              criterion_text.empty()
                                  ? std::nullopt
                                  : std::optional<std::string>(criterion_text),
                              tol_flag, max_iter_flag, seed_flag, line_search);
        }
        if (invert_cmd->parsed()) {
            return cmd_invert(artifact_dir, count, route_text, gamma_flag, seed, out_dir);
        }
        if (verify_cmd->parsed()) {
            return cmd_verify(verify_n_signal, verify_n_params, cap, embedding_labels);
        }
        if (simulate_cmd->parsed()) {
            return cmd_simulate(config_path, trials, seed, out_dir, noiseless);
        }
        if (reproduce_cmd->parsed()) {
            return cmd_reproduce_paper(trials, route_text, gamma_flag, out_dir, seed,
                                       criterion_text.empty() ? "d" : criterion_text);
        }
    } catch (const io::ConfigError& e) {
        std::cerr << "config error: field '" << e.field << "': " << e.what() << "\n";
        return kExitConfig;
    } catch (const design::NotConverged& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNotConverged;
    } catch (const Infeasible& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
