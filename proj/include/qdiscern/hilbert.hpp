#ifndef QDISCERN_HILBERT_HPP
#define QDISCERN_HILBERT_HPP

#include <complex>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qdiscern {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using Index = Eigen::Index;

// Dense desk scale: assemblies never exceed this total dimension.
inline constexpr Index kMaxTotalDim = 4096;

// Entrywise hermiticity tolerance used when validating hermitian_hint.
inline constexpr double kHermitianTol = 1e-12;

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ShapeError : Error { using Error::Error; };
struct IndexError : Error { using Error::Error; };
struct CapacityError : Error { using Error::Error; };
struct ContractError : Error { using Error::Error; };
struct NumericalIntegrityError : Error { using Error::Error; };
struct EmptySectorError : Error { using Error::Error; };
struct DegenerateSpinError : Error { using Error::Error; };
struct ParseError : Error { using Error::Error; };
struct ValidationError : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };

struct Tolerance {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
};

enum class Sector { Full, Symmetric, Antisymmetric };

std::string sector_name(Sector s);
Sector sector_from_name(const std::string& name);

/// Dense operator on a tensor-product space. `dims` lists the factor
/// dimensions in order; their product equals the matrix side.
struct Operator {
    CMatrix matrix;
    std::vector<Index> dims;
    std::optional<bool> hermitian_hint;

    // Provenance flags. `embedded_single` marks operators built as
    // 1 x ... x A x ... x 1; the physicality audit reads it.
    bool embedded_single = false;
    bool zero_projector = false;

    Operator(CMatrix m, std::vector<Index> d,
             std::optional<bool> hermitian = std::nullopt);

    Index side() const { return matrix.rows(); }
    int n_factors() const { return static_cast<int>(dims.size()); }
};

Operator identity_operator(std::vector<Index> dims);

/// Cheap upper bound on the spectral norm: side * max |entry|.
double operator_norm_bound(const Operator& o);

double max_abs(const CMatrix& m);
bool is_hermitian(const CMatrix& m, double tol = kHermitianTol);

struct StateComponent {
    double weight;
    CVector amplitudes;
};

/// Pure state or explicit convex combination of pure states on a
/// tensor-product space, tagged with its permutation sector. Sector tags
/// are verified at construction, not trusted.
struct AssemblyState {
    enum class Kind { Pure, Mixed };

    Kind kind;
    std::vector<StateComponent> components;  // pure: one component, weight 1
    std::vector<Index> dims;
    Sector sector;

    static AssemblyState pure(CVector v, std::vector<Index> dims,
                              Sector sector = Sector::Full);
    static AssemblyState mixed(std::vector<StateComponent> components,
                               std::vector<Index> dims,
                               Sector sector = Sector::Full);

    /// Materialize sum_i p_i |psi_i><psi_i| as a dense matrix.
    CMatrix density() const;

    int n_factors() const { return static_cast<int>(dims.size()); }
    Index total_dim() const;
    const CVector& pure_vector() const;
};

namespace detail {

Index product_of_dims(const std::vector<Index>& dims);

/// Reorder the amplitudes of `v` so that the factor in slot k moves to
/// slot mapping[k]. Row-major flattening, last factor fastest.
CVector permute_tensor_factors(const CVector& v, const std::vector<Index>& dims,
                               const std::vector<int>& mapping);

int mapping_sign(const std::vector<int>& mapping);
void require_bijection(const std::vector<int>& mapping);
bool dims_homogeneous(const std::vector<Index>& dims);

}  // namespace detail

// --- operations -----------------------------------------------------------

/// Kronecker product; dims concatenate. (a x b)(u x v) = au x bv.
Operator tensor(const Operator& a, const Operator& b,
                Index max_total_dim = kMaxTotalDim);

Operator adjoint(const Operator& a);

/// ab - ba. Operands must share dims.
Operator commutator(const Operator& a, const Operator& b);

/// 1 x ... x a x ... x 1 with `a` in the given slot of an n-factor space
/// of identical factors. The result is flagged for the physicality audit.
Operator embed_single(const Operator& a, int slot, int n_factors,
                      Index max_total_dim = kMaxTotalDim);

/// Reduced density operator of the kept factor.
Operator partial_trace(const AssemblyState& rho, int keep);

/// (1 x ... x a x ... x 1) v without building the embedded matrix.
CVector apply_embedded(const Operator& a, int slot, const CVector& v,
                       const std::vector<Index>& dims);

/// Tr(rho O). `o` must be hermitian; the imaginary residue is checked
/// against 1e-8 and discarded.
double expectation(const AssemblyState& rho, const Operator& o,
                   const Tolerance& tol = {});

/// True iff every pure component psi of rho satisfies
/// ||O psi - lambda psi|| <= abs_tol * (1 + norm bound of O).
bool is_eigenstate(const Operator& o, const AssemblyState& rho,
                   double eigenvalue, const Tolerance& tol = {});

/// Largest per-component residual ||O psi - lambda psi||; the witness
/// behind is_eigenstate.
double eigenstate_residual(const Operator& o, const AssemblyState& rho,
                           double eigenvalue);

}  // namespace qdiscern

#endif
