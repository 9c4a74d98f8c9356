#ifndef QDISCERN_STATES_HPP
#define QDISCERN_STATES_HPP

#include <cstdint>
#include <filesystem>
#include <vector>

#include "qdiscern/hilbert.hpp"
#include "qdiscern/observables.hpp"

namespace qdiscern {

/// RNG stack used everywhere randomness appears; reports embed this name so
/// runs are reproducible from their own output.
inline constexpr const char* kRngAlgorithm =
    "splitmix64 sub-seeds + mt19937_64 + Box-Muller";

/// (|01> - |10>)/sqrt(2) on two qubits, tagged antisymmetric.
AssemblyState singlet();

/// sum_k c_k phi_k x phi_k for orthonormal phi_k; tagged symmetric.
AssemblyState correlated_boson_state(const std::vector<Complex>& coeffs,
                                     const std::vector<CVector>& basis);

/// Lattice state supported only on x_1 = ... = x_n configurations, with
/// amplitude f(x) on each diagonal point; tagged symmetric (no such state
/// antisymmetrizes to anything nonzero).
AssemblyState diagonal_pointmass(const std::vector<Complex>& f,
                                 const LatticeConfig& cfg, int n);

struct RandomSpec {
    std::uint64_t seed = 0;
    Sector sector = Sector::Full;
    std::vector<Index> dims;
    int count = 1;
};

/// Haar-like random pure states: complex standard-normal amplitudes,
/// projected to the requested sector and renormalized. Trial i draws from a
/// sub-seed derived deterministically from (seed, i), so outputs are
/// reproducible bitwise per (algorithm, seed).
std::vector<AssemblyState> random_states(const RandomSpec& spec);

/// Deterministic per-trial sub-seed derivation (splitmix64 of seed and index).
std::uint64_t derive_subseed(std::uint64_t seed, std::uint64_t index);

/// Seeded matrix of complex standard-normal entries.
CMatrix random_gaussian_matrix(Index rows, Index cols, std::uint64_t seed);

/// Haar-like random unitary (QR of a Gaussian matrix).
CMatrix random_unitary(Index d, std::uint64_t seed);

/// Seeded random hermitian matrix, entries O(1).
Operator random_hermitian(Index d, std::uint64_t seed);

/// Rank-1 projector family built from the columns of a random unitary.
ProjectorFamily random_projector_family(Index d, std::uint64_t seed);

/// Normalized random complex profile over L sites (for point-mass states).
std::vector<Complex> random_pointmass_profile(Index sites, std::uint64_t seed);

AssemblyState load_state(const std::filesystem::path& path);
void save_state(const AssemblyState& state, const std::filesystem::path& path);

}  // namespace qdiscern

#endif
