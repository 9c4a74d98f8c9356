#ifndef QDISCERN_OBSERVABLES_HPP
#define QDISCERN_OBSERVABLES_HPP

#include <vector>

#include "qdiscern/hilbert.hpp"

namespace qdiscern {

/// Complete family of mutually orthogonal rank-1 projectors E_i with
/// sum_i E_i = 1 on a d-dimensional single-particle space.
struct ProjectorFamily {
    std::vector<Operator> projectors;
    Index d = 0;
};

/// One-dimensional periodic lattice; defines the position operator Q and
/// its DFT-conjugate momentum P.
struct LatticeConfig {
    Index sites = 8;
    double spacing = 1.0;
    double hbar = 1.0;
    bool centered = true;
};

struct SpinConfig {
    double s = 0.5;
    double hbar = 1.0;
};

void validate(const LatticeConfig& cfg);
void validate(const SpinConfig& cfg);

ProjectorFamily projector_family_from_basis(const std::vector<CVector>& basis);
ProjectorFamily standard_projector_family(Index d);

/// sum_{i,j} P^(x)_ij P^(y)_ij with P_ij = E_i - E_j on a two-particle
/// assembly, computed by literal summation and cross-checked against the
/// closed forms (2(d-1)·1x1 for x = y; 2(d·sum_i E_i x E_i - 1x1) otherwise).
/// Particle labels x, y are 1-based as in the relation definitions.
Operator pij_sum_operator(const ProjectorFamily& f, int x, int y);

struct SpinOperators {
    Operator sx, sy, sz;
};

/// Standard (2s+1)-dimensional angular momentum matrices from the ladder
/// construction; satisfies Sx^2+Sy^2+Sz^2 = s(s+1) hbar^2 · 1.
SpinOperators spin_operators(const SpinConfig& cfg);

/// |S_x + S_y|^2 on the two-particle spin space:
/// 2s(s+1)hbar^2·1x1 + 2 sum_a S_a x S_a for x != y, and the exact multiple
/// 4s(s+1)hbar^2·1x1 for x = y.
Operator total_spin_squared(const SpinConfig& cfg, int x, int y);

Operator lattice_position(const LatticeConfig& cfg);
Operator lattice_momentum(const LatticeConfig& cfg);

/// Unitary DFT, F(m, j) = exp(-2 pi i m j / L) / sqrt(L); maps the position
/// basis to the momentum basis.
CMatrix dft_matrix(Index sites);

/// Momentum eigenvalues in DFT row order: hbar · 2 pi m / (L · spacing) with
/// m centered when cfg.centered.
std::vector<double> lattice_momenta(const LatticeConfig& cfg);

/// (1/n) sum_i A^(i): the statistical mean of `a` over n particles.
Operator mean_operator(const Operator& a, int n);

/// mean(a^2) - mean(a)^2, verified against the pairwise form
/// (1/n^2) sum_{i<j} (A^(i) - A^(j))^2 at 1e-12. Requires n >= 2.
Operator variance_operator(const Operator& a, int n);

/// (1/n^2)(A^(i) - A^(j))^2 with 0-based slots i, j.
Operator pair_variance_term(const Operator& a, int n, int i, int j);

/// The pairwise form of the variance operator, assembled term by term.
Operator variance_pairwise_form(const Operator& a, int n);

/// Eigenbasis expansion (1/4) sum_ij |c_ij|^2 (a_i - a_j)^2 for a
/// non-degenerate hermitian `a` on a two-particle state. Serves as the
/// independent oracle for the trace-form expectation of the variance.
double expected_variance_closed_form(const Operator& a,
                                     const AssemblyState& state);

}  // namespace qdiscern

#endif
