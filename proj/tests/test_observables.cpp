#include <doctest.h>

#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "qdiscern/observables.hpp"
#include "qdiscern/states.hpp"
#include "qdiscern/symmetry.hpp"

using namespace qdiscern;

namespace {

double max_abs_diff(const CMatrix& a, const CMatrix& b) {
    return (a - b).cwiseAbs().maxCoeff();
}

CMatrix pauli_x() {
    CMatrix m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}

}  // namespace

TEST_CASE("projector_family_from_basis: standard and x bases") {
    const ProjectorFamily std2 = standard_projector_family(2);
    CHECK(max_abs_diff(std2.projectors[0].matrix,
                       (CMatrix(2, 2) << 1, 0, 0, 0).finished()) == 0.0);
    CHECK(max_abs_diff(std2.projectors[1].matrix,
                       (CMatrix(2, 2) << 0, 0, 0, 1).finished()) == 0.0);

    const double r = 1.0 / std::sqrt(2.0);
    std::vector<CVector> xbasis(2, CVector(2));
    xbasis[0] << r, r;
    xbasis[1] << r, -r;
    const ProjectorFamily fx = projector_family_from_basis(xbasis);
    CHECK(max_abs_diff(fx.projectors[0].matrix,
                       (CMatrix::Identity(2, 2) + pauli_x()) / 2.0) < 1e-15);
    CHECK(max_abs_diff(fx.projectors[1].matrix,
                       (CMatrix::Identity(2, 2) - pauli_x()) / 2.0) < 1e-15);

    CMatrix sum = CMatrix::Zero(2, 2);
    for (const auto& e : fx.projectors) sum += e.matrix;
    CHECK(max_abs_diff(sum, CMatrix::Identity(2, 2)) < 1e-12);
}

TEST_CASE("projector_family_from_basis: rejects non-orthonormal input") {
    std::vector<CVector> bad(2, CVector(2));
    bad[0] << 1, 0;
    bad[1] << 1, 0;
    CHECK_THROWS_AS(projector_family_from_basis(bad), ContractError);
}

TEST_CASE("pij_sum_operator: closed-form values") {
    const ProjectorFamily f2 = standard_projector_family(2);
    CHECK(max_abs_diff(pij_sum_operator(f2, 1, 1).matrix,
                       2.0 * CMatrix::Identity(4, 4)) < 1e-12);
    CHECK(max_abs_diff(pij_sum_operator(f2, 2, 2).matrix,
                       2.0 * CMatrix::Identity(4, 4)) < 1e-12);

    const CVector s = singlet().pure_vector();
    CHECK((pij_sum_operator(f2, 1, 2).matrix * s + 2.0 * s).norm() < 1e-12);
}

TEST_CASE("pij_sum_operator: eigenvalue -2 on the antisymmetric sector, d=3") {
    const ProjectorFamily f = random_projector_family(3, 5);
    const Operator sum = pij_sum_operator(f, 1, 2);
    for (const auto& s : random_states({8, Sector::Antisymmetric, {3, 3}, 20})) {
        const CVector& v = s.pure_vector();
        CHECK((sum.matrix * v + 2.0 * v).norm() < 1e-12);
    }
}

TEST_CASE("pij_sum_operator: x = y value is family independent") {
    for (Index d : {2, 3, 4}) {
        const Operator a = pij_sum_operator(standard_projector_family(d), 1, 1);
        const Operator b = pij_sum_operator(random_projector_family(d, 31), 2, 2);
        const CMatrix expected = 2.0 * static_cast<double>(d - 1) *
                                 CMatrix::Identity(d * d, d * d);
        CHECK(max_abs_diff(a.matrix, expected) < 1e-12);
        CHECK(max_abs_diff(b.matrix, expected) < 1e-10);
    }
}

TEST_CASE("spin_operators: s = 1/2 Pauli convention") {
    for (double hbar : {1.0, 0.5}) {
        const SpinOperators ops = spin_operators({0.5, hbar});
        CMatrix sz(2, 2);
        sz << hbar / 2, 0, 0, -hbar / 2;
        CHECK(max_abs_diff(ops.sz.matrix, sz) == 0.0);
        const CMatrix casimir = ops.sx.matrix * ops.sx.matrix +
                                ops.sy.matrix * ops.sy.matrix +
                                ops.sz.matrix * ops.sz.matrix;
        CHECK(max_abs_diff(casimir, 0.75 * hbar * hbar * CMatrix::Identity(2, 2)) <
              1e-12);
    }
}

TEST_CASE("spin_operators: s = 1 ladder construction") {
    const SpinOperators ops = spin_operators({1.0, 1.0});
    CMatrix sz(3, 3);
    sz << 1, 0, 0, 0, 0, 0, 0, 0, -1;
    CHECK(max_abs_diff(ops.sz.matrix, sz) == 0.0);
    const double r = 1.0 / std::sqrt(2.0);
    CMatrix sx(3, 3);
    sx << 0, r, 0, r, 0, r, 0, r, 0;
    CHECK(max_abs_diff(ops.sx.matrix, sx) < 1e-15);
}

TEST_CASE("spin_operators: commutation relations for s up to 2") {
    for (double s : {0.5, 1.0, 1.5, 2.0}) {
        for (double hbar : {1.0, 0.5}) {
            const SpinOperators ops = spin_operators({s, hbar});
            const CMatrix lhs =
                ops.sx.matrix * ops.sy.matrix - ops.sy.matrix * ops.sx.matrix;
            const CMatrix rhs = Complex(0, 1) * hbar * ops.sz.matrix;
            CHECK(max_abs_diff(lhs, rhs) < 1e-10);
        }
    }
}

TEST_CASE("spin_operators: s = 0 is degenerate") {
    CHECK_THROWS_AS(spin_operators({0.0, 1.0}), DegenerateSpinError);
    CHECK_THROWS_AS(spin_operators({0.3, 1.0}), ConfigError);
}

TEST_CASE("total_spin_squared: constants and spectrum for s = 1/2") {
    const SpinConfig cfg{0.5, 1.0};
    CHECK(max_abs_diff(total_spin_squared(cfg, 1, 1).matrix,
                       3.0 * CMatrix::Identity(4, 4)) == 0.0);

    Eigen::SelfAdjointEigenSolver<CMatrix> es(total_spin_squared(cfg, 1, 2).matrix);
    const auto& ev = es.eigenvalues();
    CHECK(std::abs(ev[0] - 0.0) < 1e-12);  // singlet
    for (int k = 1; k < 4; ++k) CHECK(std::abs(ev[k] - 2.0) < 1e-12);  // triplet
    CHECK(ev.maxCoeff() < 3.0);  // (2s)(2s+1) = 2 < 4s(s+1) = 3
}

TEST_CASE("lattice_position: definition instances") {
    const Operator q2 = lattice_position({2, 1.0, 1.0, true});
    CHECK(q2.matrix(0, 0).real() == -0.5);
    CHECK(q2.matrix(1, 1).real() == 0.5);
    const Operator q3 = lattice_position({3, 0.5, 1.0, false});
    CHECK(q3.matrix(2, 2).real() == 1.0);  // uncentered: j * spacing
}

TEST_CASE("dft_matrix is unitary") {
    for (Index L : {2, 4, 7}) {
        const CMatrix f = dft_matrix(L);
        CHECK(max_abs_diff(f.adjoint() * f, CMatrix::Identity(L, L)) < 1e-12);
    }
}

TEST_CASE("lattice_momentum: spectrum for L = 4 and hermiticity") {
    const Operator p = lattice_momentum({4, 1.0, 1.0, true});
    CHECK(is_hermitian(p.matrix));
    Eigen::SelfAdjointEigenSolver<CMatrix> es(p.matrix);
    const double pi = std::numbers::pi;
    const std::array<double, 4> expected = {-pi, -pi / 2, 0.0, pi / 2};
    for (int k = 0; k < 4; ++k)
        CHECK(es.eigenvalues()[k] == doctest::Approx(expected[k]).epsilon(1e-12));
}

TEST_CASE("lattice: cross-slot commutation exactly zero, same-slot bounded away") {
    for (Index L : {4, 8}) {
        const LatticeConfig lat{L, 1.0, 1.0, true};
        const Operator q = lattice_position(lat);
        const Operator p = lattice_momentum(lat);
        const Operator cross =
            commutator(embed_single(p, 0, 2), embed_single(q, 1, 2));
        CHECK(max_abs(cross.matrix) < 1e-14);

        const CMatrix same = commutator(p, q).matrix;
        Eigen::JacobiSVD<CMatrix> svd(same);
        CHECK(svd.singularValues().maxCoeff() > 0.1);  // units of hbar = 1
    }
}

TEST_CASE("mean_operator: identity and basis action") {
    CMatrix z(2, 2);
    z << 1, 0, 0, -1;
    const Operator a(z, {2}, true);
    CHECK(max_abs_diff(mean_operator(a, 1).matrix, a.matrix) == 0.0);
    CHECK(max_abs_diff(mean_operator(identity_operator({2}), 3).matrix,
                       CMatrix::Identity(8, 8)) == 0.0);

    CVector v01 = CVector::Zero(4);
    v01[1] = 1.0;
    CHECK((mean_operator(a, 2).matrix * v01).norm() == 0.0);  // (1 + -1)/2

    CHECK(is_permutation_invariant(mean_operator(a, 3)));
}

TEST_CASE("variance_operator: annihilates equal-factor eigenstates") {
    CMatrix z(2, 2);
    z << 1, 0, 0, -1;
    const Operator a(z, {2}, true);
    const Operator var = variance_operator(a, 2);
    CVector v00 = CVector::Zero(4);
    v00[0] = 1.0;
    CHECK((var.matrix * v00).norm() == 0.0);

    // singlet is an eigenstate with eigenvalue hbar^2/4 for a = sz*hbar/2
    for (double hbar : {1.0, 0.5}) {
        const Operator sz(CMatrix(z * (hbar / 2.0)), {2}, true);
        const Operator v = variance_operator(sz, 2);
        const CVector s = singlet().pure_vector();
        CHECK((v.matrix * s - (hbar * hbar / 4.0) * s).norm() < 1e-15);
    }
}

TEST_CASE("variance_operator: lattice position acts as ((x-y)/2)^2 pointwise") {
    const LatticeConfig lat{4, 1.0, 1.0, true};
    const Operator q = lattice_position(lat);
    const Operator var = variance_operator(q, 2);
    for (Index x = 0; x < 4; ++x)
        for (Index y = 0; y < 4; ++y) {
            CVector basis = CVector::Zero(16);
            basis[x * 4 + y] = 1.0;
            const double gap =
                (q.matrix(x, x).real() - q.matrix(y, y).real()) / 2.0;
            CHECK((var.matrix * basis - gap * gap * basis).norm() < 1e-13);
        }
}

TEST_CASE("variance_operator: contract errors") {
    CMatrix z(2, 2);
    z << 1, 0, 0, -1;
    CHECK_THROWS_AS(variance_operator(Operator(z, {2}, true), 1), ContractError);
    CMatrix nh(2, 2);
    nh << 0, 1, 0, 0;
    CHECK_THROWS_AS(variance_operator(Operator(nh, {2}), 2), ContractError);
}

TEST_CASE("variance_operator: three algebraic forms agree") {
    for (Index d : {2, 3}) {
        for (int n : {2, 3, 4}) {
            for (std::uint64_t seed : {101u, 102u}) {
                const Operator a = random_hermitian(d, seed + d * 10 + n);
                const Operator var = variance_operator(a, n);  // mean form
                const Operator pairwise = variance_pairwise_form(a, n);

                // Cross-term form: (1 - 1/n) mean(a^2) - (1/n^2) sum_{i != j}
                // A^(i) A^(j), the n-particle analogue of halving the
                // anti-correlator.
                const Operator a2(CMatrix(a.matrix * a.matrix), a.dims, true);
                CMatrix cross =
                    (1.0 - 1.0 / n) * mean_operator(a2, n).matrix;
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j) {
                        if (i == j) continue;
                        cross -= embed_single(a, i, n).matrix *
                                 embed_single(a, j, n).matrix /
                                 (static_cast<double>(n) * n);
                    }

                CHECK(max_abs_diff(var.matrix, pairwise.matrix) < 1e-12);
                CHECK(max_abs_diff(var.matrix, cross) < 1e-12);

                CHECK(is_permutation_invariant(var));
                Eigen::SelfAdjointEigenSolver<CMatrix> es(var.matrix);
                CHECK(es.eigenvalues().minCoeff() >= -1e-10);
            }
        }
    }
}

TEST_CASE("expected_variance_closed_form: frozen constants") {
    CMatrix z(2, 2);
    z << 1, 0, 0, -1;
    CMatrix x = pauli_x();
    for (double hbar : {1.0, 0.5}) {
        const Operator sz(CMatrix(z * (hbar / 2.0)), {2}, true);
        const Operator sx(CMatrix(x * (hbar / 2.0)), {2}, true);
        CVector v00 = CVector::Zero(4);
        v00[0] = 1.0;
        const AssemblyState s00 = AssemblyState::pure(v00, {2, 2});
        CHECK(expected_variance_closed_form(sz, singlet()) ==
              doctest::Approx(hbar * hbar / 4.0).epsilon(1e-12));
        CHECK(expected_variance_closed_form(sz, s00) == 0.0);
        CHECK(expected_variance_closed_form(sx, s00) ==
              doctest::Approx(hbar * hbar / 8.0).epsilon(1e-12));
    }
}

TEST_CASE("expected_variance_closed_form: rejects degenerate quantities") {
    CHECK_THROWS_AS(
        expected_variance_closed_form(identity_operator({2}), singlet()),
        ContractError);
}

TEST_CASE("expected_variance_closed_form agrees with the trace route") {
    for (Index d : {2, 3}) {
        const Operator a = random_hermitian(d, 555 + d);
        const Operator var = variance_operator(a, 2);
        const auto states =
            random_states({919 + static_cast<std::uint64_t>(d), Sector::Full,
                           {d, d}, 100});
        for (const auto& s : states) {
            const double closed = expected_variance_closed_form(a, s);
            const double trace = expectation(s, var);
            CHECK(closed == doctest::Approx(trace).epsilon(1e-10));
        }
    }
}

TEST_CASE("expected_variance_closed_form on mixed states") {
    CMatrix z(2, 2);
    z << 0.5, 0, 0, -0.5;
    const Operator a(z, {2}, true);
    std::vector<StateComponent> comps;
    comps.push_back({0.5, singlet().pure_vector()});
    CVector v00 = CVector::Zero(4);
    v00[0] = 1.0;
    comps.push_back({0.5, v00});
    const AssemblyState mixed = AssemblyState::mixed(comps, {2, 2});
    // 0.5 * (1/4) + 0.5 * 0
    CHECK(expected_variance_closed_form(a, mixed) ==
          doctest::Approx(0.125).epsilon(1e-12));
    CHECK(expectation(mixed, variance_operator(a, 2)) ==
          doctest::Approx(0.125).epsilon(1e-12));
}
