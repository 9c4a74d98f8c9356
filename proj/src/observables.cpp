#include "qdiscern/observables.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Eigenvalues>

namespace qdiscern {

namespace {

constexpr double kFamilyTol = 1e-12;

void validate_family(const ProjectorFamily& f) {
    if (f.projectors.empty()) throw ContractError("projector family is empty");
    const Index d = f.d;
    CMatrix sum = CMatrix::Zero(d, d);
    for (std::size_t i = 0; i < f.projectors.size(); ++i) {
        const CMatrix& e = f.projectors[i].matrix;
        if (e.rows() != d) throw ShapeError("projector dimension mismatch");
        if (!is_hermitian(e, kFamilyTol))
            throw ContractError("projector family member is not hermitian");
        if (max_abs(e * e - e) > kFamilyTol)
            throw ContractError("projector family member is not idempotent");
        for (std::size_t j = 0; j < i; ++j)
            if (max_abs(e * f.projectors[j].matrix) > kFamilyTol)
                throw ContractError("projector family is not mutually orthogonal");
        sum += e;
    }
    if (max_abs(sum - CMatrix::Identity(d, d)) > kFamilyTol)
        throw ContractError("projector family does not sum to the identity");
}

}  // namespace

void validate(const LatticeConfig& cfg) {
    if (cfg.sites < 2) throw ConfigError("lattice needs at least 2 sites");
    if (!(cfg.spacing > 0.0)) throw ConfigError("lattice spacing must be positive");
    if (!(cfg.hbar > 0.0)) throw ConfigError("hbar must be positive");
}

void validate(const SpinConfig& cfg) {
    const double two_s = 2.0 * cfg.s;
    if (cfg.s < 0.0 || std::abs(two_s - std::round(two_s)) > 1e-9)
        throw ConfigError("spin must satisfy 2s in {0, 1, 2, ...}");
    if (!(cfg.hbar > 0.0)) throw ConfigError("hbar must be positive");
}

ProjectorFamily projector_family_from_basis(const std::vector<CVector>& basis) {
    if (basis.empty()) throw ContractError("basis is empty");
    const Index d = basis.front().size();
    if (static_cast<Index>(basis.size()) != d)
        throw ContractError("basis must contain exactly d vectors");
    for (std::size_t i = 0; i < basis.size(); ++i) {
        if (basis[i].size() != d) throw ShapeError("basis vector length mismatch");
        for (std::size_t j = 0; j <= i; ++j) {
            const Complex overlap = basis[j].dot(basis[i]);
            const double target = (i == j) ? 1.0 : 0.0;
            if (std::abs(overlap - target) > 1e-10)
                throw ContractError("basis is not orthonormal within 1e-10");
        }
    }
    ProjectorFamily f;
    f.d = d;
    for (const auto& b : basis)
        f.projectors.emplace_back(CMatrix(b * b.adjoint()), std::vector<Index>{d},
                                  true);
    validate_family(f);
    return f;
}

ProjectorFamily standard_projector_family(Index d) {
    std::vector<CVector> basis;
    for (Index i = 0; i < d; ++i) {
        CVector b = CVector::Zero(d);
        b[i] = 1.0;
        basis.push_back(std::move(b));
    }
    return projector_family_from_basis(basis);
}

Operator pij_sum_operator(const ProjectorFamily& f, int x, int y) {
    if (x < 1 || x > 2 || y < 1 || y > 2)
        throw IndexError("pij_sum_operator particle labels must be 1 or 2");
    validate_family(f);
    const Index d = f.d;
    const Index total = d * d;
    const std::vector<Index> dims{d, d};

    CMatrix sum = CMatrix::Zero(total, total);
    for (Index i = 0; i < d; ++i)
        for (Index j = 0; j < d; ++j) {
            const CMatrix pij = f.projectors[static_cast<std::size_t>(i)].matrix -
                                f.projectors[static_cast<std::size_t>(j)].matrix;
            const Operator p(pij, {d}, true);
            const Operator left = embed_single(p, x - 1, 2);
            const Operator right = embed_single(p, y - 1, 2);
            sum += left.matrix * right.matrix;
        }

    // Cross-check against the closed form. For x != y the literal sum equals
    // 2(d · sum_i E_i x E_i - 1 x 1); the factor d is verifiable by direct
    // expansion (the i- and j-sums each contribute d copies of E_k x E_k).
    CMatrix closed;
    if (x == y) {
        closed = 2.0 * static_cast<double>(d - 1) *
                 CMatrix::Identity(total, total);
    } else {
        CMatrix ee = CMatrix::Zero(total, total);
        for (const auto& e : f.projectors)
            ee += tensor(e, e).matrix;
        closed = 2.0 * (static_cast<double>(d) * ee -
                        CMatrix::Identity(total, total));
    }
    if (max_abs(sum - closed) > 1e-10)
        throw NumericalIntegrityError(
            "pij sum disagrees with its closed form beyond 1e-10");

    return Operator(std::move(sum), dims, true);
}

SpinOperators spin_operators(const SpinConfig& cfg) {
    validate(cfg);
    if (cfg.s == 0.0)
        throw DegenerateSpinError(
            "spin relations are undefined for s = 0 (one-dimensional spin space)");
    const double s = cfg.s;
    const Index m = static_cast<Index>(std::llround(2.0 * s)) + 1;

    // Basis index k holds |s, m = s - k>; ladder matrix elements
    // S+ |s,m> = hbar sqrt(s(s+1) - m(m+1)) |s,m+1>.
    CMatrix splus = CMatrix::Zero(m, m);
    for (Index k = 1; k < m; ++k) {
        const double mm = s - static_cast<double>(k);
        splus(k - 1, k) = cfg.hbar * std::sqrt(s * (s + 1.0) - mm * (mm + 1.0));
    }
    const CMatrix sminus = splus.adjoint();

    CMatrix sz = CMatrix::Zero(m, m);
    for (Index k = 0; k < m; ++k)
        sz(k, k) = cfg.hbar * (s - static_cast<double>(k));

    const Complex i(0.0, 1.0);
    return SpinOperators{
        Operator((splus + sminus) / 2.0, {m}, true),
        Operator((splus - sminus) / (2.0 * i), {m}, true),
        Operator(std::move(sz), {m}, true),
    };
}

Operator total_spin_squared(const SpinConfig& cfg, int x, int y) {
    if (x < 1 || x > 2 || y < 1 || y > 2)
        throw IndexError("total_spin_squared particle labels must be 1 or 2");
    const auto ops = spin_operators(cfg);
    const Index m = ops.sz.side();
    const double casimir = cfg.s * (cfg.s + 1.0) * cfg.hbar * cfg.hbar;
    const Index total = m * m;
    if (x == y) {
        // |2S|^2 = 4 s(s+1) hbar^2 exactly, by construction.
        CMatrix out = 4.0 * casimir * CMatrix::Identity(total, total);
        return Operator(std::move(out), {m, m}, true);
    }
    CMatrix out = 2.0 * casimir * CMatrix::Identity(total, total);
    for (const Operator* sa : {&ops.sx, &ops.sy, &ops.sz})
        out += 2.0 * tensor(*sa, *sa).matrix;
    return Operator(std::move(out), {m, m}, true);
}

Operator lattice_position(const LatticeConfig& cfg) {
    validate(cfg);
    const Index L = cfg.sites;
    CMatrix q = CMatrix::Zero(L, L);
    const double offset = cfg.centered ? (static_cast<double>(L) - 1.0) / 2.0 : 0.0;
    for (Index j = 0; j < L; ++j)
        q(j, j) = (static_cast<double>(j) - offset) * cfg.spacing;
    return Operator(std::move(q), {L}, true);
}

CMatrix dft_matrix(Index sites) {
    const Index L = sites;
    CMatrix f(L, L);
    const double norm = 1.0 / std::sqrt(static_cast<double>(L));
    for (Index m = 0; m < L; ++m)
        for (Index j = 0; j < L; ++j) {
            const double phase = -2.0 * std::numbers::pi *
                                 static_cast<double>(m) * static_cast<double>(j) /
                                 static_cast<double>(L);
            f(m, j) = std::polar(norm, phase);
        }
    return f;
}

std::vector<double> lattice_momenta(const LatticeConfig& cfg) {
    validate(cfg);
    const Index L = cfg.sites;
    std::vector<double> k(static_cast<std::size_t>(L));
    for (Index m = 0; m < L; ++m) {
        double idx = static_cast<double>(m);
        if (cfg.centered && m >= (L + 1) / 2) idx -= static_cast<double>(L);
        k[static_cast<std::size_t>(m)] = cfg.hbar * 2.0 * std::numbers::pi * idx /
                                         (static_cast<double>(L) * cfg.spacing);
    }
    return k;
}

Operator lattice_momentum(const LatticeConfig& cfg) {
    const CMatrix f = dft_matrix(cfg.sites);
    const auto k = lattice_momenta(cfg);
    CVector diag(cfg.sites);
    for (Index m = 0; m < cfg.sites; ++m)
        diag[m] = k[static_cast<std::size_t>(m)];
    CMatrix p = f.adjoint() * diag.asDiagonal() * f;
    // Construction leaves rounding of order 1e-16; symmetrize so the
    // hermitian_hint invariant holds exactly.
    p = (p + p.adjoint().eval()) / 2.0;
    return Operator(std::move(p), {cfg.sites}, true);
}

namespace {

void require_single_factor_hermitian(const Operator& a, const char* what) {
    if (a.n_factors() != 1)
        throw ShapeError(std::string(what) + " expects a single-particle operator");
    if (!is_hermitian(a.matrix, kHermitianTol * (1.0 + max_abs(a.matrix))))
        throw ContractError(std::string(what) + " requires a hermitian operator");
}

}  // namespace

Operator mean_operator(const Operator& a, int n) {
    require_single_factor_hermitian(a, "mean_operator");
    if (n < 1) throw ContractError("mean_operator needs n >= 1");
    const Index d = a.side();
    CMatrix sum;
    for (int i = 0; i < n; ++i) {
        const Operator e = embed_single(a, i, n);
        if (i == 0)
            sum = e.matrix;
        else
            sum += e.matrix;
    }
    sum /= static_cast<double>(n);
    return Operator(std::move(sum), std::vector<Index>(static_cast<std::size_t>(n), d),
                    true);
}

Operator pair_variance_term(const Operator& a, int n, int i, int j) {
    require_single_factor_hermitian(a, "pair_variance_term");
    if (i == j) throw IndexError("pair_variance_term needs distinct slots");
    const CMatrix diff =
        embed_single(a, i, n).matrix - embed_single(a, j, n).matrix;
    CMatrix out = (diff * diff) / (static_cast<double>(n) * static_cast<double>(n));
    return Operator(std::move(out),
                    std::vector<Index>(static_cast<std::size_t>(n), a.side()), true);
}

Operator variance_pairwise_form(const Operator& a, int n) {
    if (n < 2) throw ContractError("variance needs n >= 2");
    CMatrix sum;
    bool first = true;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const Operator term = pair_variance_term(a, n, i, j);
            if (first) {
                sum = term.matrix;
                first = false;
            } else {
                sum += term.matrix;
            }
        }
    return Operator(std::move(sum),
                    std::vector<Index>(static_cast<std::size_t>(n), a.side()), true);
}

Operator variance_operator(const Operator& a, int n) {
    if (n < 2)
        throw ContractError(
            "variance_operator needs n >= 2 (one-particle variance is identically zero)");
    require_single_factor_hermitian(a, "variance_operator");
    const Operator a2(CMatrix(a.matrix * a.matrix), a.dims, true);
    const Operator m2 = mean_operator(a2, n);
    const Operator m1 = mean_operator(a, n);
    CMatrix var = m2.matrix - m1.matrix * m1.matrix;

    const Operator pairwise = variance_pairwise_form(a, n);
    if (max_abs(var - pairwise.matrix) > 1e-12)
        throw NumericalIntegrityError(
            "variance operator mean form and pairwise form disagree beyond 1e-12");

    return Operator(std::move(var),
                    std::vector<Index>(static_cast<std::size_t>(n), a.side()), true);
}

double expected_variance_closed_form(const Operator& a,
                                     const AssemblyState& state) {
    require_single_factor_hermitian(a, "expected_variance_closed_form");
    if (state.n_factors() != 2)
        throw ShapeError("closed-form variance expectation is two-particle only");
    const Index d = a.side();
    if (state.dims != std::vector<Index>{d, d})
        throw ShapeError("state factors do not match the quantity dimension");

    Eigen::SelfAdjointEigenSolver<CMatrix> solver(a.matrix);
    if (solver.info() != Eigen::Success)
        throw NumericalIntegrityError("eigensolver failed on the quantity");
    const Eigen::VectorXd evals = solver.eigenvalues();
    for (Index i = 1; i < d; ++i)
        if (std::abs(evals[i] - evals[i - 1]) <= 1e-9)
            throw ContractError(
                "closed-form variance expectation requires a non-degenerate quantity");
    const CMatrix v = solver.eigenvectors();

    double result = 0.0;
    for (const auto& comp : state.components) {
        // Reshape psi to a d x d matrix M (row = particle 1) and change both
        // factors to the eigenbasis: c = V^dagger M conj(V).
        Eigen::Map<const CMatrix> m_rowmajor(comp.amplitudes.data(), d, d);
        const CMatrix m = m_rowmajor.transpose();  // Eigen maps column-major
        const CMatrix c = v.adjoint() * m * v.conjugate();
        double acc = 0.0;
        for (Index i = 0; i < d; ++i)
            for (Index j = 0; j < d; ++j) {
                const double gap = evals[i] - evals[j];
                acc += std::norm(c(i, j)) * gap * gap;
            }
        result += comp.weight * acc / 4.0;
    }
    return result;
}

}  // namespace qdiscern
