// Acceptance suite: one pass/fail line per criterion, exit 0 iff every
// requested criterion passes.
//
//   acceptance [--cli <path-to-discern>] [criterion numbers...]
//
// With no numbers, all 11 criteria run. Criterion 11 shells out to the
// discern binary and needs --cli (or the DISCERN_CLI environment variable).

#include <sys/wait.h>

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "qdiscern/discernment.hpp"
#include "qdiscern/states.hpp"
#include "qdiscern/symmetry.hpp"

using namespace qdiscern;

namespace {

std::string g_cli_path;

struct Criterion {
    int number;
    std::string title;
    std::function<void(std::ostringstream&)> run;  // throws on failure
};

struct CriterionFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require(bool ok, const std::string& message) {
    if (!ok) throw CriterionFailure(message);
}

double max_abs_diff(const CMatrix& a, const CMatrix& b) {
    return (a - b).cwiseAbs().maxCoeff();
}

std::vector<CVector> sector_basis_vectors(Index d, int n, Sector sector) {
    const Operator proj =
        sector == Sector::Symmetric ? symmetrizer(d, n) : antisymmetrizer(d, n);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(proj.matrix);
    std::vector<CVector> basis;
    for (Index k = 0; k < es.eigenvalues().size(); ++k)
        if (es.eigenvalues()[k] > 0.5) basis.push_back(es.eigenvectors().col(k));
    return basis;
}

// 1. sum_ij (P^(x)_ij)^2 = 2(d-1) identity, entrywise 1e-10.
void criterion_1(std::ostringstream& info) {
    for (Index d : {2, 3, 4, 5}) {
        for (std::uint64_t fseed : {0u, 1u, 2u}) {
            const ProjectorFamily f =
                random_projector_family(d, 1000 + 7 * static_cast<std::uint64_t>(d) + fseed);
            for (int x : {1, 2}) {
                const Operator sum = pij_sum_operator(f, x, x);
                const CMatrix expected = 2.0 * static_cast<double>(d - 1) *
                                         CMatrix::Identity(d * d, d * d);
                const double dev = max_abs_diff(sum.matrix, expected);
                require(dev <= 1e-10,
                        "d=" + std::to_string(d) + ": deviation " +
                            std::to_string(dev));
            }
        }
    }
    info << "d in {2,3,4,5}, 3 random rank-1 families each";
}

// 2. Every antisymmetric-sector basis state is a -2 eigenstate of the
//    cross sum, residual < 1e-10.
void criterion_2(std::ostringstream& info) {
    int states_checked = 0;
    for (Index d : {2, 3, 4, 5}) {
        const std::vector<ProjectorFamily> families = {
            standard_projector_family(d),
            random_projector_family(d, 2000 + static_cast<std::uint64_t>(d))};
        const auto basis = sector_basis_vectors(d, 2, Sector::Antisymmetric);
        require(static_cast<Index>(basis.size()) == d * (d - 1) / 2,
                "antisymmetric sector dimension wrong for d=" + std::to_string(d));
        for (const auto& f : families) {
            const Operator sum = pij_sum_operator(f, 1, 2);
            for (const auto& v : basis) {
                const double residual = (sum.matrix * v + 2.0 * v).norm();
                require(residual < 1e-10, "d=" + std::to_string(d) +
                                              ": residual " +
                                              std::to_string(residual));
                ++states_checked;
            }
        }
    }
    info << states_checked << " antisymmetric basis states, eigenvalue -2";
}

// 3. SMS3 constants: spectrum, exact diagonal multiple, dual-polarity table.
void criterion_3(std::ostringstream& info) {
    for (double hbar : {1.0, 0.5}) {
        const double h2 = hbar * hbar;
        {
            const SpinConfig half{0.5, hbar};
            const Operator same = total_spin_squared(half, 1, 1);
            require(max_abs_diff(same.matrix,
                                 3.0 * h2 * CMatrix::Identity(4, 4)) == 0.0,
                    "|2S1|^2 must equal 3 hbar^2 exactly");
            Eigen::SelfAdjointEigenSolver<CMatrix> es(
                total_spin_squared(half, 1, 2).matrix);
            const auto& ev = es.eigenvalues();
            require(std::abs(ev[0]) <= 1e-9, "singlet eigenvalue not 0");
            for (int k = 1; k < 4; ++k)
                require(std::abs(ev[k] - 2.0 * h2) <= 1e-9,
                        "triplet eigenvalue not 2 hbar^2");
            TruthTable table(2);
            for (int x = 1; x <= 2; ++x)
                for (int y = 1; y <= 2; ++y)
                    table.at(x, y) = {eval_relation_T(half, x, y), 0.0};
            require(table.at(1, 1).holds && table.at(2, 2).holds &&
                        !table.at(1, 2).holds && !table.at(2, 1).holds,
                    "T truth table polarity wrong");
            require(classify(table) == Verdict::WeaklyDiscerned,
                    "T table must weakly discern (dual polarity)");
        }
        for (double s : {1.0, 1.5}) {
            const SpinConfig cfg{s, hbar};
            Eigen::SelfAdjointEigenSolver<CMatrix> es(
                total_spin_squared(cfg, 1, 2).matrix);
            const double max_eig = es.eigenvalues().maxCoeff();
            const double bound = 2.0 * s * (2.0 * s + 1.0) * h2;
            const double target = 4.0 * s * (s + 1.0) * h2;
            require(std::abs(max_eig - bound) <= 1e-9 * (1.0 + bound),
                    "max eigenvalue not (2s)(2s+1) hbar^2 for s=" +
                        std::to_string(s));
            require(max_eig < target, "bound fails to separate T for s=" +
                                          std::to_string(s));
        }
    }
    info << "s in {1/2, 1, 3/2}, hbar in {1, 0.5}";
}

// 4. The three variance forms agree entrywise at 1e-12; the operator is
//    permutation invariant and positive semidefinite.
void criterion_4(std::ostringstream& info) {
    int checked = 0;
    for (Index d : {2, 3}) {
        for (int n : {2, 3, 4}) {
            for (int rep = 0; rep < 20; ++rep) {
                const Operator a = random_hermitian(
                    d, 4000 + static_cast<std::uint64_t>(100 * d + 10 * n + rep));
                const Operator mean_form = variance_operator(a, n);
                const Operator pairwise = variance_pairwise_form(a, n);
                const Operator a2(CMatrix(a.matrix * a.matrix), a.dims, true);
                CMatrix cross = (1.0 - 1.0 / n) * mean_operator(a2, n).matrix;
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j) {
                        if (i == j) continue;
                        cross -= embed_single(a, i, n).matrix *
                                 embed_single(a, j, n).matrix /
                                 (static_cast<double>(n) * n);
                    }
                require(max_abs_diff(mean_form.matrix, pairwise.matrix) <= 1e-12,
                        "mean vs pairwise form disagree");
                require(max_abs_diff(mean_form.matrix, cross) <= 1e-12,
                        "mean vs cross-term form disagree");
                require(is_permutation_invariant(mean_form),
                        "variance operator must be permutation invariant");
                Eigen::SelfAdjointEigenSolver<CMatrix> es(mean_form.matrix);
                require(es.eigenvalues().minCoeff() >= -1e-10,
                        "variance operator must be positive semidefinite");
                ++checked;
            }
        }
    }
    info << checked << " (a, n, d) configurations";
}

// 5. Closed-form eigenbasis expectation equals the trace form at 1e-10.
void criterion_5(std::ostringstream& info) {
    int checked = 0;
    for (Index d : {2, 3, 4}) {
        const Operator a =
            random_hermitian(d, 5000 + static_cast<std::uint64_t>(d));
        const Operator var = variance_operator(a, 2);
        const auto states =
            random_states({5100 + static_cast<std::uint64_t>(d), Sector::Full,
                           {d, d}, 100});
        for (const auto& s : states) {
            const double closed = expected_variance_closed_form(a, s);
            const double trace = expectation(s, var);
            require(std::abs(closed - trace) <= 1e-10,
                    "closed form deviates by " + std::to_string(closed - trace));
            ++checked;
        }
    }
    info << checked << " random states across d in {2,3,4}";
}

// 6. Positive position variance on every random two-particle state, per
//    sector, L in {8, 16}.
void criterion_6(std::ostringstream& info) {
    int checked = 0;
    for (Index L : {8, 16}) {
        const LatticeConfig lat{L, 1.0, 1.0, true};
        const Operator var = variance_operator(lattice_position(lat), 2);
        std::uint64_t group = 0;
        for (Sector sector :
             {Sector::Full, Sector::Symmetric, Sector::Antisymmetric}) {
            const auto states = random_states(
                {6000 + 13 * static_cast<std::uint64_t>(L) + group++, sector,
                 {L, L}, 500});
            for (const auto& s : states) {
                const double w = expectation(s, var);
                require(w > 1e-12,
                        "L=" + std::to_string(L) + " " + sector_name(sector) +
                            ": witness " + std::to_string(w));
                ++checked;
            }
        }
    }
    info << checked << " random states (500 per sector, L in {8,16})";
}

// 7. Point-mass states: position variance annihilates, momentum variance
//    spreads; the Q-or-P disjunction discerns every tested state.
void criterion_7(std::ostringstream& info) {
    int discerned = 0, total = 0;
    for (Index L : {4, 8, 16}) {
        const LatticeConfig lat{L, 1.0, 1.0, true};
        const Operator var_q = variance_operator(lattice_position(lat), 2);
        const Operator var_p = variance_operator(lattice_momentum(lat), 2);

        auto disjunction = [&](const AssemblyState& s) {
            const bool q_branch = !is_eigenstate(var_q, s, 0.0);
            const bool p_branch = !is_eigenstate(var_p, s, 0.0);
            require(q_branch || p_branch, "neither Q nor P discerns a state");
            const double wq = expectation(s, var_q);
            const double wp = expectation(s, var_p);
            require(wq > 1e-12 || wp > 1e-12, "probabilistic disjunction fails");
            ++discerned;
            ++total;
        };

        for (int rep = 0; rep < 10; ++rep) {
            const auto f = random_pointmass_profile(
                L, 7000 + 17 * static_cast<std::uint64_t>(L) +
                       static_cast<std::uint64_t>(rep));
            const AssemblyState pm = diagonal_pointmass(f, lat, 2);
            const double residual =
                (var_q.matrix * pm.pure_vector()).norm();
            require(residual < 1e-12, "point-mass position residual " +
                                          std::to_string(residual));
            require(expectation(pm, var_p) > 1e-8,
                    "point-mass momentum variance too small");
            disjunction(pm);
        }
        std::uint64_t group = 0;
        for (Sector sector :
             {Sector::Full, Sector::Symmetric, Sector::Antisymmetric}) {
            const auto states = random_states(
                {7100 + 19 * static_cast<std::uint64_t>(L) + group++, sector,
                 {L, L}, 100});
            for (const auto& s : states) disjunction(s);
        }
    }
    require(discerned == total, "disjunction must succeed on 100% of states");
    info << total << " states (point-mass + random), 100% discerned";
}

// 8. N-particle relation: all pairs on random triples, exact-zero diagonal,
//    the momentum escape for point-mass states, and the n=2 reduction.
void criterion_8(std::ostringstream& info) {
    int checked = 0;
    for (Index L : {4, 8}) {
        const LatticeConfig lat{L, 1.0, 1.0, true};
        std::uint64_t group = 0;
        for (Sector sector :
             {Sector::Full, Sector::Symmetric, Sector::Antisymmetric}) {
            const auto states = random_states(
                {8000 + 23 * static_cast<std::uint64_t>(L) + group++, sector,
                 {L, L, L}, 200});
            for (const auto& s : states) {
                for (int x = 1; x <= 3; ++x) {
                    const EvalResult diag = eval_relation_Dprime(lat, s, x, x);
                    require(!diag.holds && std::abs(diag.witness) <= 1e-12,
                            "diagonal witness must vanish");
                }
                for (int x = 1; x <= 3; ++x)
                    for (int y = x + 1; y <= 3; ++y)
                        require(eval_relation_Dprime(lat, s, x, y).holds,
                                "Dprime must hold for distinct particles");
                ++checked;
            }
        }

        // Triple point-mass: Dprime fails, DprimeP discerns every pair.
        for (int rep = 0; rep < 10; ++rep) {
            const auto f = random_pointmass_profile(
                L, 8200 + static_cast<std::uint64_t>(rep));
            const AssemblyState pm = diagonal_pointmass(f, lat, 3);
            for (int x = 1; x <= 3; ++x)
                for (int y = x + 1; y <= 3; ++y) {
                    require(!eval_relation_Dprime(lat, pm, x, y).holds,
                            "point-mass must evade Dprime");
                    require(eval_relation_DprimeP(lat, pm, x, y).holds,
                            "point-mass must be caught by DprimeP");
                }
        }

        // n = 2 reduction to R'(Q), exact verdict agreement.
        const Operator q = lattice_position(lat);
        const auto pairs = random_states(
            {8300 + static_cast<std::uint64_t>(L), Sector::Full, {L, L}, 200});
        for (const auto& s : pairs) {
            const EvalResult d2 = eval_relation_Dprime(lat, s, 1, 2);
            const EvalResult r2 = eval_relation_Rprime(q, s, 1, 2);
            require(d2.holds == r2.holds, "D'(2) and R'(Q) verdicts differ");
            require(std::abs(d2.witness - r2.witness) <= 1e-10,
                    "D'(2) and R'(Q) witnesses differ");
        }
    }
    info << checked << " random triples plus point-mass and n=2 reduction";
}

// 9. Golden audit table.
void criterion_9(std::ostringstream& info) {
    RelationSpec rt = make_relation_spec(RelationKind::Rt);
    rt.family = standard_projector_family(2);
    const PhysicalityAudit rt_audit = physicality_audit(rt);
    require(rt_audit.unphysical_building_blocks &&
                rt_audit.trivial_multiple_of_identity,
            "Rt must audit as unphysical + trivial");

    RelationSpec c = make_relation_spec(RelationKind::C);
    c.lattice = LatticeConfig{4, 1.0, 1.0, true};
    const PhysicalityAudit c_audit = physicality_audit(c);
    require(c_audit.unphysical_building_blocks &&
                !c_audit.trivial_multiple_of_identity,
            "C must audit as unphysical only");

    for (RelationKind kind : {RelationKind::T, RelationKind::Tprime}) {
        RelationSpec spec = make_relation_spec(kind);
        spec.spin = SpinConfig{0.5, 1.0};
        require(physicality_audit(spec).physical(),
                relation_name(kind) + " must audit as physical");
    }
    for (RelationKind kind : {RelationKind::R, RelationKind::Rprime}) {
        RelationSpec spec = make_relation_spec(kind);
        spec.quantity = lattice_position({4, 1.0, 1.0, true});
        spec.quantity_name = "Q";
        require(physicality_audit(spec).physical(),
                relation_name(kind) + " must audit as physical");
    }
    for (RelationKind kind : {RelationKind::Dprime, RelationKind::DprimeP}) {
        RelationSpec spec = make_relation_spec(kind);
        spec.lattice = LatticeConfig{4, 1.0, 1.0, true};
        spec.n_particles = 3;
        require(physicality_audit(spec).physical(),
                relation_name(kind) + " must audit as physical");
    }
    info << "Rt: unphysical+trivial; C: unphysical; T,T',R,R',D',D'P: physical";
}

// 10. Equal reduced density operators on the (anti)symmetric sectors.
void criterion_10(std::ostringstream& info) {
    int checked = 0;
    for (Index d : {2, 3}) {
        for (Sector sector : {Sector::Symmetric, Sector::Antisymmetric}) {
            const auto states = random_states(
                {10000 + static_cast<std::uint64_t>(d), sector, {d, d}, 100});
            for (const auto& s : states) {
                const double dev = max_abs_diff(partial_trace(s, 0).matrix,
                                                partial_trace(s, 1).matrix);
                require(dev <= 1e-10, "reductions differ by " +
                                          std::to_string(dev));
                ++checked;
            }
        }
    }
    info << checked << " sector states, reductions equal within 1e-10";
}

struct RunResult {
    int exit_code = -1;
    std::string output;
};

RunResult run_cli(const std::string& args) {
    const std::string cmd = g_cli_path + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    require(pipe != nullptr, "cannot spawn the discern binary");
    RunResult result;
    std::array<char, 4096> buf;
    std::size_t got = 0;
    while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0)
        result.output.append(buf.data(), got);
    const int status = pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

// 11. Byte-identical verify reports per seed.
void criterion_11(std::ostringstream& info) {
    require(!g_cli_path.empty(),
            "criterion 11 needs --cli <path> or DISCERN_CLI");
    const std::string base = "verify --theorem 1 --seed 7";
    const RunResult a = run_cli(base);
    const RunResult b = run_cli(base);
    require(a.exit_code == 0, "verify --theorem 1 must pass");
    require(!a.output.empty() && a.output == b.output,
            "text reports differ between reruns");
    const RunResult ja = run_cli(base + " --format json");
    const RunResult jb = run_cli(base + " --format json");
    require(ja.exit_code == 0, "json verify run must pass");
    require(!ja.output.empty() && ja.output == jb.output,
            "json reports differ between reruns");
    info << "verify --theorem 1 --seed 7: text and json byte-identical";
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<Criterion> criteria = {
        {1, "Eq. (3) identity 2(d-1)*I", criterion_1},
        {2, "Eq. (2) eigenvalue -2 on the antisymmetric sector", criterion_2},
        {3, "total-spin constants and dual-polarity table", criterion_3},
        {4, "variance operator: three forms, IP, positivity", criterion_4},
        {5, "closed-form variance oracle bridge", criterion_5},
        {6, "positive position variance on random pairs", criterion_6},
        {7, "Q-or-P disjunction incl. point-mass states", criterion_7},
        {8, "N-particle relation, diagonal zeros, momentum escape", criterion_8},
        {9, "physicality audit golden table", criterion_9},
        {10, "equal reduced density operators (folklore)", criterion_10},
        {11, "deterministic verify reports", criterion_11},
    };

    std::set<int> selected;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--cli" && i + 1 < argc) {
            g_cli_path = argv[++i];
        } else {
            try {
                selected.insert(std::stoi(arg));
            } catch (...) {
                std::cerr << "unknown argument: " << arg << "\n";
                return 2;
            }
        }
    }
    if (g_cli_path.empty())
        if (const char* env = std::getenv("DISCERN_CLI")) g_cli_path = env;

    bool all_pass = true;
    for (const auto& criterion : criteria) {
        if (!selected.empty() && !selected.count(criterion.number)) continue;
        const auto start = std::chrono::steady_clock::now();
        std::ostringstream detail;
        bool pass = true;
        std::string failure;
        try {
            criterion.run(detail);
        } catch (const std::exception& e) {
            pass = false;
            failure = e.what();
        }
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                          start)
                .count();
        std::printf("[%s] criterion %2d: %s (%s%s) [%.2fs]\n",
                    pass ? "PASS" : "FAIL", criterion.number,
                    criterion.title.c_str(), detail.str().c_str(),
                    pass ? "" : ("; " + failure).c_str(), seconds);
        all_pass = all_pass && pass;
    }
    return all_pass ? 0 : 1;
}
