#include "qdiscern/hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace qdiscern {

std::string sector_name(Sector s) {
    switch (s) {
        case Sector::Full: return "full";
        case Sector::Symmetric: return "symmetric";
        case Sector::Antisymmetric: return "antisymmetric";
    }
    return "?";
}

Sector sector_from_name(const std::string& name) {
    if (name == "full") return Sector::Full;
    if (name == "symmetric") return Sector::Symmetric;
    if (name == "antisymmetric") return Sector::Antisymmetric;
    throw ParseError("unknown sector name: '" + name + "'");
}

namespace detail {

Index product_of_dims(const std::vector<Index>& dims) {
    Index p = 1;
    for (Index d : dims) {
        if (d < 1) throw ShapeError("factor dimensions must be positive");
        p *= d;
    }
    return p;
}

bool dims_homogeneous(const std::vector<Index>& dims) {
    return std::all_of(dims.begin(), dims.end(),
                       [&](Index d) { return d == dims.front(); });
}

void require_bijection(const std::vector<int>& mapping) {
    const int n = static_cast<int>(mapping.size());
    std::vector<bool> seen(n, false);
    for (int v : mapping) {
        if (v < 0 || v >= n || seen[v])
            throw ValidationError("permutation mapping is not a bijection");
        seen[v] = true;
    }
}

int mapping_sign(const std::vector<int>& mapping) {
    int inversions = 0;
    const int n = static_cast<int>(mapping.size());
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (mapping[i] > mapping[j]) ++inversions;
    return (inversions % 2 == 0) ? 1 : -1;
}

CVector permute_tensor_factors(const CVector& v, const std::vector<Index>& dims,
                               const std::vector<int>& mapping) {
    const int n = static_cast<int>(dims.size());
    if (static_cast<int>(mapping.size()) != n)
        throw ShapeError("permutation size does not match factor count");
    require_bijection(mapping);
    if (v.size() != product_of_dims(dims))
        throw ShapeError("vector length does not match dims");

    // Strides for row-major flattening with the last factor fastest.
    std::vector<Index> stride(n, 1);
    for (int k = n - 2; k >= 0; --k) stride[k] = stride[k + 1] * dims[k + 1];

    CVector out(v.size());
    std::vector<Index> multi(n, 0);
    for (Index flat = 0; flat < v.size(); ++flat) {
        Index target = 0;
        for (int k = 0; k < n; ++k) target += multi[k] * stride[mapping[k]];
        out[target] = v[flat];
        for (int k = n - 1; k >= 0; --k) {
            if (++multi[k] < dims[k]) break;
            multi[k] = 0;
        }
    }
    return out;
}

namespace {

// All n! slot mappings, or just the transpositions (which generate the
// group) when enumeration would be too large. Used for sector checks only.
std::vector<std::vector<int>> sector_check_mappings(int n) {
    std::vector<std::vector<int>> out;
    if (n <= 6) {
        std::vector<int> m(n);
        std::iota(m.begin(), m.end(), 0);
        do {
            out.push_back(m);
        } while (std::next_permutation(m.begin(), m.end()));
    } else {
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                std::vector<int> m(n);
                std::iota(m.begin(), m.end(), 0);
                std::swap(m[i], m[j]);
                out.push_back(m);
            }
    }
    return out;
}

constexpr double kSectorTol = 1e-10;

void check_sector_tag(const CVector& v, const std::vector<Index>& dims,
                      Sector sector) {
    if (sector == Sector::Full || dims.size() < 2) return;
    if (!dims_homogeneous(dims))
        throw ShapeError("sector tags require equal factor dimensions");
    for (const auto& m : sector_check_mappings(static_cast<int>(dims.size()))) {
        const double sign =
            (sector == Sector::Antisymmetric && mapping_sign(m) < 0) ? -1.0 : 1.0;
        const CVector permuted = permute_tensor_factors(v, dims, m);
        const double dev = (permuted - sign * v).cwiseAbs().maxCoeff();
        if (dev > kSectorTol) {
            std::ostringstream msg;
            msg << "state tagged " << sector_name(sector)
                << " violates its sector invariant (deviation " << dev << ")";
            throw ValidationError(msg.str());
        }
    }
}

}  // namespace

}  // namespace detail

double max_abs(const CMatrix& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

bool is_hermitian(const CMatrix& m, double tol) {
    if (m.rows() != m.cols()) return false;
    return max_abs(m - m.adjoint().eval()) <= tol;
}

Operator::Operator(CMatrix m, std::vector<Index> d, std::optional<bool> hermitian)
    : matrix(std::move(m)), dims(std::move(d)), hermitian_hint(hermitian) {
    if (matrix.rows() != matrix.cols())
        throw ShapeError("operator matrix must be square");
    if (matrix.rows() != detail::product_of_dims(dims))
        throw ShapeError("matrix side does not equal the product of dims");
    if (hermitian_hint.value_or(false) && !is_hermitian(matrix, kHermitianTol))
        throw ValidationError(
            "hermitian_hint set but matrix is not hermitian within 1e-12");
}

Operator identity_operator(std::vector<Index> dims) {
    const Index n = detail::product_of_dims(dims);
    return Operator(CMatrix::Identity(n, n), std::move(dims), true);
}

double operator_norm_bound(const Operator& o) {
    return static_cast<double>(o.side()) * max_abs(o.matrix);
}

Index AssemblyState::total_dim() const {
    return detail::product_of_dims(dims);
}

const CVector& AssemblyState::pure_vector() const {
    if (kind != Kind::Pure)
        throw ContractError("pure_vector called on a mixed state");
    return components.front().amplitudes;
}

AssemblyState AssemblyState::pure(CVector v, std::vector<Index> dims,
                                  Sector sector) {
    if (v.size() != detail::product_of_dims(dims))
        throw ShapeError("amplitude count does not match dims");
    const double norm = v.norm();
    if (std::abs(norm - 1.0) > 1e-12)
        throw ValidationError("pure vector has unit norm: violated (norm " +
                              std::to_string(norm) + ")");
    detail::check_sector_tag(v, dims, sector);
    AssemblyState s;
    s.kind = Kind::Pure;
    s.components.push_back({1.0, std::move(v)});
    s.dims = std::move(dims);
    s.sector = sector;
    return s;
}

AssemblyState AssemblyState::mixed(std::vector<StateComponent> components,
                                   std::vector<Index> dims, Sector sector) {
    if (components.empty())
        throw ValidationError("mixed state needs at least one component");
    const Index total = detail::product_of_dims(dims);
    double weight_sum = 0.0;
    for (const auto& c : components) {
        if (c.weight <= 0.0)
            throw ValidationError("mixed weights are positive: violated");
        if (c.amplitudes.size() != total)
            throw ShapeError("component amplitude count does not match dims");
        if (std::abs(c.amplitudes.norm() - 1.0) > 1e-12)
            throw ValidationError(
                "each component vector has unit norm: violated");
        weight_sum += c.weight;
    }
    if (std::abs(weight_sum - 1.0) > 1e-12)
        throw ValidationError("mixed weights sum to 1: violated (sum " +
                              std::to_string(weight_sum) + ")");
    for (const auto& c : components)
        detail::check_sector_tag(c.amplitudes, dims, sector);
    AssemblyState s;
    s.kind = Kind::Mixed;
    s.components = std::move(components);
    s.dims = std::move(dims);
    s.sector = sector;
    return s;
}

CMatrix AssemblyState::density() const {
    const Index n = total_dim();
    CMatrix rho = CMatrix::Zero(n, n);
    for (const auto& c : components)
        rho.noalias() += c.weight * (c.amplitudes * c.amplitudes.adjoint());
    return rho;
}

Operator tensor(const Operator& a, const Operator& b, Index max_total_dim) {
    const Index ra = a.side(), rb = b.side();
    if (ra > 0 && rb > max_total_dim / ra)
        throw CapacityError("tensor product exceeds the maximum total dimension " +
                            std::to_string(max_total_dim));
    CMatrix out(ra * rb, ra * rb);
    for (Index i = 0; i < ra; ++i)
        for (Index k = 0; k < ra; ++k)
            out.block(i * rb, k * rb, rb, rb) = a.matrix(i, k) * b.matrix;
    std::vector<Index> dims = a.dims;
    dims.insert(dims.end(), b.dims.begin(), b.dims.end());
    std::optional<bool> herm;
    if (a.hermitian_hint.has_value() && b.hermitian_hint.has_value())
        herm = *a.hermitian_hint && *b.hermitian_hint;
    return Operator(std::move(out), std::move(dims), herm);
}

Operator adjoint(const Operator& a) {
    return Operator(a.matrix.adjoint(), a.dims, a.hermitian_hint);
}

Operator commutator(const Operator& a, const Operator& b) {
    if (a.dims != b.dims)
        throw ShapeError("commutator operands must share factor dimensions");
    return Operator(a.matrix * b.matrix - b.matrix * a.matrix, a.dims);
}

Operator embed_single(const Operator& a, int slot, int n_factors,
                      Index max_total_dim) {
    if (n_factors < 1) throw IndexError("n_factors must be at least 1");
    if (slot < 0 || slot >= n_factors)
        throw IndexError("embed slot " + std::to_string(slot) +
                         " out of range [0, " + std::to_string(n_factors) + ")");
    const Index d = a.side();
    Index total = 1;
    for (int k = 0; k < n_factors; ++k) {
        if (total > max_total_dim / d)
            throw CapacityError("embedding exceeds the maximum total dimension");
        total *= d;
    }
    Index left = 1;
    for (int k = 0; k < slot; ++k) left *= d;
    const Index right = total / (left * d);

    // total = left * d * right with identity blocks around the slot.
    CMatrix out = CMatrix::Zero(total, total);
    for (Index l = 0; l < left; ++l)
        for (Index i = 0; i < d; ++i)
            for (Index k = 0; k < d; ++k) {
                const Complex v = a.matrix(i, k);
                if (v == Complex(0.0, 0.0)) continue;
                for (Index r = 0; r < right; ++r)
                    out((l * d + i) * right + r, (l * d + k) * right + r) = v;
            }
    std::vector<Index> dims(static_cast<std::size_t>(n_factors), d);
    Operator op(std::move(out), std::move(dims), a.hermitian_hint);
    op.embedded_single = true;
    return op;
}

Operator partial_trace(const AssemblyState& rho, int keep) {
    const int n = rho.n_factors();
    if (n < 2) throw ShapeError("partial_trace needs at least two factors");
    if (keep < 0 || keep >= n)
        throw IndexError("partial_trace keep index " + std::to_string(keep) +
                         " out of range");
    const Index d = rho.dims[static_cast<std::size_t>(keep)];
    Index outer = 1, inner = 1;
    for (int k = 0; k < keep; ++k) outer *= rho.dims[static_cast<std::size_t>(k)];
    for (int k = keep + 1; k < n; ++k)
        inner *= rho.dims[static_cast<std::size_t>(k)];

    CMatrix red = CMatrix::Zero(d, d);
    for (const auto& c : rho.components) {
        const CVector& psi = c.amplitudes;
        for (Index a = 0; a < d; ++a)
            for (Index b = 0; b < d; ++b) {
                Complex sum(0.0, 0.0);
                for (Index o = 0; o < outer; ++o) {
                    const Index base_a = (o * d + a) * inner;
                    const Index base_b = (o * d + b) * inner;
                    for (Index in = 0; in < inner; ++in)
                        sum += psi[base_a + in] * std::conj(psi[base_b + in]);
                }
                red(a, b) += c.weight * sum;
            }
    }
    return Operator(std::move(red), {d}, true);
}

CVector apply_embedded(const Operator& a, int slot, const CVector& v,
                       const std::vector<Index>& dims) {
    const int n = static_cast<int>(dims.size());
    if (slot < 0 || slot >= n) throw IndexError("apply_embedded slot out of range");
    const Index d = dims[static_cast<std::size_t>(slot)];
    if (a.side() != d)
        throw ShapeError("operator does not match the slot dimension");
    if (v.size() != detail::product_of_dims(dims))
        throw ShapeError("vector length does not match dims");
    Index outer = 1, inner = 1;
    for (int k = 0; k < slot; ++k) outer *= dims[static_cast<std::size_t>(k)];
    for (int k = slot + 1; k < n; ++k) inner *= dims[static_cast<std::size_t>(k)];

    CVector out = CVector::Zero(v.size());
    for (Index o = 0; o < outer; ++o)
        for (Index i = 0; i < d; ++i) {
            const Index base_out = (o * d + i) * inner;
            for (Index k = 0; k < d; ++k) {
                const Complex aik = a.matrix(i, k);
                if (aik == Complex(0.0, 0.0)) continue;
                const Index base_in = (o * d + k) * inner;
                for (Index r = 0; r < inner; ++r)
                    out[base_out + r] += aik * v[base_in + r];
            }
        }
    return out;
}

namespace {

void require_dims_match(const AssemblyState& rho, const Operator& o,
                        const char* what) {
    if (rho.dims != o.dims)
        throw ShapeError(std::string(what) +
                         ": state and operator factor dimensions differ");
}

}  // namespace

double expectation(const AssemblyState& rho, const Operator& o,
                   const Tolerance& tol) {
    require_dims_match(rho, o, "expectation");
    const double herm_tol = std::max(kHermitianTol, tol.abs_tol);
    if (!is_hermitian(o.matrix, herm_tol * (1.0 + max_abs(o.matrix))))
        throw ContractError("expectation requires a hermitian operator");
    Complex value(0.0, 0.0);
    for (const auto& c : rho.components)
        value += c.weight * c.amplitudes.dot(o.matrix * c.amplitudes);
    if (std::abs(value.imag()) > 1e-8)
        throw NumericalIntegrityError(
            "expectation has imaginary residue " + std::to_string(value.imag()));
    return value.real();
}

double eigenstate_residual(const Operator& o, const AssemblyState& rho,
                           double eigenvalue) {
    require_dims_match(rho, o, "is_eigenstate");
    double worst = 0.0;
    for (const auto& c : rho.components) {
        const double r =
            (o.matrix * c.amplitudes - eigenvalue * c.amplitudes).norm();
        worst = std::max(worst, r);
    }
    return worst;
}

bool is_eigenstate(const Operator& o, const AssemblyState& rho,
                   double eigenvalue, const Tolerance& tol) {
    const double threshold = tol.abs_tol * (1.0 + operator_norm_bound(o));
    return eigenstate_residual(o, rho, eigenvalue) <= threshold;
}

}  // namespace qdiscern
