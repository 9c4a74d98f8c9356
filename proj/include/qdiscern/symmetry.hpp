#ifndef QDISCERN_SYMMETRY_HPP
#define QDISCERN_SYMMETRY_HPP

#include <vector>

#include "qdiscern/hilbert.hpp"

namespace qdiscern {

/// Bijection on tensor-factor slots {0..n-1}; mapping[k] is the image of
/// slot k.
class Permutation {
  public:
    explicit Permutation(std::vector<int> mapping);

    static Permutation identity(int n);
    static Permutation transposition(int n, int i, int j);

    int size() const { return static_cast<int>(mapping_.size()); }
    int operator()(int slot) const { return mapping_[static_cast<std::size_t>(slot)]; }
    const std::vector<int>& mapping() const { return mapping_; }

    Permutation inverse() const;
    /// Composition acting as (*this ∘ inner): slot k -> this(inner(k)).
    Permutation compose(const Permutation& inner) const;
    int sign() const;

    bool operator==(const Permutation& other) const = default;

  private:
    std::vector<int> mapping_;
};

std::vector<Permutation> all_permutations(int n);

/// Amplitude-level action of U_p on a state vector (no matrix built).
CVector apply_permutation(const Permutation& p, const CVector& v,
                          const std::vector<Index>& dims);

/// Unitary 0/1 matrix with U(v_1 x ... x v_n) = v_{p^-1(1)} x ... x v_{p^-1(n)}
/// on n factors of dimension d.
Operator permutation_operator(const Permutation& p, Index d, int n);

/// (1/n!) sum_p U_p — hermitian idempotent projector onto the symmetric sector.
Operator symmetrizer(Index d, int n);

/// (1/n!) sum_p sgn(p) U_p. For n > d the projector is zero; the result is
/// returned with its zero_projector flag set rather than raising.
Operator antisymmetrizer(Index d, int n);

/// Project onto the requested sector and renormalize. Raises EmptySectorError
/// when the projection norm falls below 1e-12.
AssemblyState project_to_sector(const AssemblyState& state, Sector sector);

/// Indistinguishability-Postulate check: U_p O U_p^-1 = O for every
/// permutation of the factors. Conjugation by a permutation is an exact
/// entry relabeling, so the comparison carries no arithmetic error.
bool is_permutation_invariant(const Operator& o, const Tolerance& tol = {});

}  // namespace qdiscern

#endif
