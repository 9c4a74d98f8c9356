#include "qdiscern/symmetry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qdiscern {

Permutation::Permutation(std::vector<int> mapping) : mapping_(std::move(mapping)) {
    detail::require_bijection(mapping_);
}

Permutation Permutation::identity(int n) {
    std::vector<int> m(static_cast<std::size_t>(n));
    std::iota(m.begin(), m.end(), 0);
    return Permutation(std::move(m));
}

Permutation Permutation::transposition(int n, int i, int j) {
    Permutation p = identity(n);
    std::swap(p.mapping_[static_cast<std::size_t>(i)],
              p.mapping_[static_cast<std::size_t>(j)]);
    return p;
}

Permutation Permutation::inverse() const {
    std::vector<int> inv(mapping_.size());
    for (std::size_t k = 0; k < mapping_.size(); ++k)
        inv[static_cast<std::size_t>(mapping_[k])] = static_cast<int>(k);
    return Permutation(std::move(inv));
}

Permutation Permutation::compose(const Permutation& inner) const {
    std::vector<int> m(mapping_.size());
    for (std::size_t k = 0; k < mapping_.size(); ++k)
        m[k] = mapping_[static_cast<std::size_t>(inner.mapping_[k])];
    return Permutation(std::move(m));
}

int Permutation::sign() const { return detail::mapping_sign(mapping_); }

std::vector<Permutation> all_permutations(int n) {
    std::vector<int> m(static_cast<std::size_t>(n));
    std::iota(m.begin(), m.end(), 0);
    std::vector<Permutation> out;
    do {
        out.emplace_back(m);
    } while (std::next_permutation(m.begin(), m.end()));
    return out;
}

CVector apply_permutation(const Permutation& p, const CVector& v,
                          const std::vector<Index>& dims) {
    return detail::permute_tensor_factors(v, dims, p.mapping());
}

Operator permutation_operator(const Permutation& p, Index d, int n) {
    if (n < 1) throw ShapeError("permutation_operator needs n >= 1");
    if (p.size() != n)
        throw ShapeError("permutation size does not match factor count");
    const std::vector<Index> dims(static_cast<std::size_t>(n), d);
    const Index total = detail::product_of_dims(dims);
    CVector basis = CVector::Zero(total);
    CMatrix u = CMatrix::Zero(total, total);
    for (Index col = 0; col < total; ++col) {
        basis[col] = 1.0;
        u.col(col) = detail::permute_tensor_factors(basis, dims, p.mapping());
        basis[col] = 0.0;
    }
    return Operator(std::move(u), dims);
}

namespace {

Operator build_group_projector(Index d, int n, bool alternating) {
    const std::vector<Index> dims(static_cast<std::size_t>(n), d);
    const Index total = detail::product_of_dims(dims);
    if (total > kMaxTotalDim)
        throw CapacityError("projector exceeds the maximum total dimension");
    CMatrix proj = CMatrix::Zero(total, total);
    double count = 0.0;
    CVector basis = CVector::Zero(total);
    for (const auto& p : all_permutations(n)) {
        const double coef = alternating ? static_cast<double>(p.sign()) : 1.0;
        for (Index col = 0; col < total; ++col) {
            basis[col] = 1.0;
            proj.col(col) += coef * detail::permute_tensor_factors(basis, dims,
                                                                   p.mapping());
            basis[col] = 0.0;
        }
        count += 1.0;
    }
    proj /= count;
    Operator op(std::move(proj), dims, true);
    op.zero_projector = max_abs(op.matrix) < 1e-14;
    return op;
}

}  // namespace

Operator symmetrizer(Index d, int n) { return build_group_projector(d, n, false); }

Operator antisymmetrizer(Index d, int n) {
    return build_group_projector(d, n, true);
}

namespace {

CVector project_vector(const CVector& v, const std::vector<Index>& dims,
                       Sector sector) {
    const int n = static_cast<int>(dims.size());
    CVector out = CVector::Zero(v.size());
    double count = 0.0;
    for (const auto& p : all_permutations(n)) {
        const double coef =
            (sector == Sector::Antisymmetric) ? static_cast<double>(p.sign()) : 1.0;
        out += coef * detail::permute_tensor_factors(v, dims, p.mapping());
        count += 1.0;
    }
    return out / count;
}

}  // namespace

AssemblyState project_to_sector(const AssemblyState& state, Sector sector) {
    if (!detail::dims_homogeneous(state.dims))
        throw ShapeError("sector projection requires equal factor dimensions");
    if (sector == Sector::Full) {
        AssemblyState out = state;
        out.sector = Sector::Full;
        return out;
    }
    std::vector<StateComponent> projected;
    double total_weight = 0.0;
    for (const auto& c : state.components) {
        CVector w = project_vector(c.amplitudes, state.dims, sector);
        const double norm = w.norm();
        if (norm < 1e-12) continue;
        projected.push_back({c.weight * norm * norm, w / norm});
        total_weight += c.weight * norm * norm;
    }
    if (projected.empty() || total_weight < 1e-24)
        throw EmptySectorError("projection onto the " + sector_name(sector) +
                               " sector vanishes");
    for (auto& c : projected) c.weight /= total_weight;
    if (projected.size() == 1)
        return AssemblyState::pure(std::move(projected.front().amplitudes),
                                   state.dims, sector);
    return AssemblyState::mixed(std::move(projected), state.dims, sector);
}

bool is_permutation_invariant(const Operator& o, const Tolerance& tol) {
    if (!detail::dims_homogeneous(o.dims))
        throw ShapeError("invariance check requires equal factor dimensions");
    const int n = o.n_factors();
    if (n < 2) return true;
    const std::vector<Index>& dims = o.dims;
    const Index total = o.side();

    // Flat-index images under each permutation; O is invariant iff
    // O[p(a), p(b)] == O[a, b] for all entries.
    for (const auto& p : all_permutations(n)) {
        std::vector<Index> image(static_cast<std::size_t>(total));
        std::vector<Index> stride(static_cast<std::size_t>(n), 1);
        for (int k = n - 2; k >= 0; --k)
            stride[static_cast<std::size_t>(k)] =
                stride[static_cast<std::size_t>(k + 1)] * dims[static_cast<std::size_t>(k + 1)];
        std::vector<Index> multi(static_cast<std::size_t>(n), 0);
        for (Index flat = 0; flat < total; ++flat) {
            Index target = 0;
            for (int k = 0; k < n; ++k)
                target += multi[static_cast<std::size_t>(k)] *
                          stride[static_cast<std::size_t>(p(k))];
            image[static_cast<std::size_t>(flat)] = target;
            for (int k = n - 1; k >= 0; --k) {
                auto uk = static_cast<std::size_t>(k);
                if (++multi[uk] < dims[uk]) break;
                multi[uk] = 0;
            }
        }
        for (Index a = 0; a < total; ++a)
            for (Index b = 0; b < total; ++b) {
                const Complex diff =
                    o.matrix(image[static_cast<std::size_t>(a)],
                             image[static_cast<std::size_t>(b)]) -
                    o.matrix(a, b);
                if (std::abs(diff) > tol.abs_tol) return false;
            }
    }
    return true;
}

}  // namespace qdiscern
