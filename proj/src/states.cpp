#include "qdiscern/states.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "qdiscern/symmetry.hpp"

namespace qdiscern {

AssemblyState singlet() {
    CVector v = CVector::Zero(4);
    const double r = 1.0 / std::sqrt(2.0);
    v[1] = r;   // |01>
    v[2] = -r;  // |10>
    return AssemblyState::pure(std::move(v), {2, 2}, Sector::Antisymmetric);
}

AssemblyState correlated_boson_state(const std::vector<Complex>& coeffs,
                                     const std::vector<CVector>& basis) {
    if (coeffs.empty() || coeffs.size() > basis.size())
        throw ContractError("need one basis vector per coefficient");
    const Index d = basis.front().size();
    double norm2 = 0.0;
    for (const Complex& c : coeffs) norm2 += std::norm(c);
    if (std::abs(norm2 - 1.0) > 1e-12)
        throw ContractError("coefficients must satisfy sum |c_k|^2 = 1");
    for (std::size_t i = 0; i < basis.size(); ++i) {
        if (basis[i].size() != d) throw ShapeError("basis vector length mismatch");
        for (std::size_t j = 0; j <= i; ++j) {
            const double target = (i == j) ? 1.0 : 0.0;
            if (std::abs(basis[j].dot(basis[i]) - target) > 1e-10)
                throw ContractError("basis is not orthonormal within 1e-10");
        }
    }
    CVector v = CVector::Zero(d * d);
    for (std::size_t k = 0; k < coeffs.size(); ++k) {
        const CVector& phi = basis[k];
        for (Index a = 0; a < d; ++a)
            for (Index b = 0; b < d; ++b)
                v[a * d + b] += coeffs[k] * phi[a] * phi[b];
    }
    return AssemblyState::pure(std::move(v), {d, d}, Sector::Symmetric);
}

AssemblyState diagonal_pointmass(const std::vector<Complex>& f,
                                 const LatticeConfig& cfg, int n) {
    validate(cfg);
    if (n < 1) throw ContractError("diagonal_pointmass needs n >= 1");
    const Index L = cfg.sites;
    if (static_cast<Index>(f.size()) != L)
        throw ShapeError("point-mass profile length must equal the site count");
    double norm2 = 0.0;
    for (const Complex& c : f) norm2 += std::norm(c);
    if (std::abs(norm2 - 1.0) > 1e-12)
        throw ContractError("point-mass profile must satisfy sum |f(x)|^2 = 1");

    const std::vector<Index> dims(static_cast<std::size_t>(n), L);
    const Index total = detail::product_of_dims(dims);
    if (total > kMaxTotalDim)
        throw CapacityError("point-mass state exceeds the maximum total dimension");
    CVector v = CVector::Zero(total);
    for (Index x = 0; x < L; ++x) {
        Index flat = 0;
        for (int k = 0; k < n; ++k) flat = flat * L + x;
        v[flat] = f[static_cast<std::size_t>(x)];
    }
    return AssemblyState::pure(std::move(v), dims,
                               n >= 2 ? Sector::Symmetric : Sector::Full);
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

double uniform01(std::mt19937_64& eng) {
    // 53-bit mantissa in (0, 1]; avoids log(0) in Box-Muller.
    return (static_cast<double>(eng() >> 11) + 1.0) * 0x1.0p-53;
}

class GaussianStream {
  public:
    explicit GaussianStream(std::uint64_t seed) : eng_(seed) {}

    double next() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform01(eng_);
        const double u2 = uniform01(eng_);
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

  private:
    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace

std::uint64_t derive_subseed(std::uint64_t seed, std::uint64_t index) {
    return splitmix64(seed + 0x9E3779B97F4A7C15ULL * (index + 1));
}

CMatrix random_gaussian_matrix(Index rows, Index cols, std::uint64_t seed) {
    GaussianStream g(seed);
    CMatrix m(rows, cols);
    for (Index r = 0; r < rows; ++r)
        for (Index c = 0; c < cols; ++c) m(r, c) = Complex(g.next(), g.next());
    return m;
}

CMatrix random_unitary(Index d, std::uint64_t seed) {
    const CMatrix g = random_gaussian_matrix(d, d, seed);
    Eigen::HouseholderQR<CMatrix> qr(g);
    CMatrix q = qr.householderQ();
    // Fix the phase convention so the result is a deterministic function of
    // the seed alone (R's diagonal signs are QR-implementation detail).
    const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Index k = 0; k < d; ++k) {
        const Complex rkk = r(k, k);
        if (std::abs(rkk) > 0.0) q.col(k) *= rkk / std::abs(rkk);
    }
    return q;
}

Operator random_hermitian(Index d, std::uint64_t seed) {
    const CMatrix g = random_gaussian_matrix(d, d, seed);
    CMatrix h = (g + g.adjoint()) / 2.0;
    return Operator(std::move(h), {d}, true);
}

ProjectorFamily random_projector_family(Index d, std::uint64_t seed) {
    const CMatrix u = random_unitary(d, seed);
    std::vector<CVector> basis;
    for (Index k = 0; k < d; ++k) basis.push_back(u.col(k));
    return projector_family_from_basis(basis);
}

std::vector<Complex> random_pointmass_profile(Index sites, std::uint64_t seed) {
    GaussianStream g(seed);
    std::vector<Complex> f(static_cast<std::size_t>(sites));
    double norm2 = 0.0;
    for (auto& c : f) {
        c = Complex(g.next(), g.next());
        norm2 += std::norm(c);
    }
    const double inv = 1.0 / std::sqrt(norm2);
    for (auto& c : f) c *= inv;
    return f;
}

std::vector<AssemblyState> random_states(const RandomSpec& spec) {
    if (spec.count < 1) throw ContractError("random_states needs count >= 1");
    if (spec.dims.empty()) throw ShapeError("random_states needs dims");
    const Index total = detail::product_of_dims(spec.dims);
    if (total > kMaxTotalDim)
        throw CapacityError("random state exceeds the maximum total dimension");

    std::vector<AssemblyState> out;
    out.reserve(static_cast<std::size_t>(spec.count));
    for (int trial = 0; trial < spec.count; ++trial) {
        GaussianStream g(derive_subseed(spec.seed, static_cast<std::uint64_t>(trial)));
        bool done = false;
        for (int attempt = 0; attempt < 64 && !done; ++attempt) {
            CVector v(total);
            for (Index k = 0; k < total; ++k) v[k] = Complex(g.next(), g.next());
            v /= v.norm();
            if (spec.sector != Sector::Full) {
                try {
                    AssemblyState raw =
                        AssemblyState::pure(std::move(v), spec.dims, Sector::Full);
                    out.push_back(project_to_sector(raw, spec.sector));
                    done = true;
                } catch (const EmptySectorError&) {
                    continue;  // redraw from the same stream
                }
            } else {
                out.push_back(
                    AssemblyState::pure(std::move(v), spec.dims, Sector::Full));
                done = true;
            }
        }
        if (!done)
            throw EmptySectorError(
                "random draw kept projecting to zero after 64 attempts");
    }
    return out;
}

// --- state files ------------------------------------------------------------
//
// Line-oriented text format, full double precision, ordering declared and
// validated:
//
//   qdiscern-state v1
//   dims: 2 2
//   sector: antisymmetric
//   ordering: row-major-last-fastest
//   kind: pure
//   components: 1
//   weight: 1
//   amplitudes: 4
//   0 0
//   0.70710678118654746 0
//   -0.70710678118654746 0
//   0 0

namespace {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct LineReader {
    std::istream& in;
    int lineno = 0;

    std::string next(const char* what) {
        std::string line;
        while (std::getline(in, line)) {
            ++lineno;
            if (!line.empty() && line.front() == '#') continue;
            return line;
        }
        throw ParseError(std::string("unexpected end of file while reading ") +
                         what);
    }

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError("line " + std::to_string(lineno) + ": " + msg);
    }
};

std::string expect_field(LineReader& r, const std::string& key) {
    const std::string line = r.next(key.c_str());
    const std::string prefix = key + ":";
    if (line.rfind(prefix, 0) != 0)
        r.fail("expected '" + key + ":' field, got '" + line + "'");
    std::string value = line.substr(prefix.size());
    const auto start = value.find_first_not_of(" \t");
    return start == std::string::npos ? std::string() : value.substr(start);
}

double parse_double_token(LineReader& r, std::istringstream& ss,
                          const char* what) {
    double v = 0.0;
    if (!(ss >> v)) r.fail(std::string("malformed ") + what);
    return v;
}

}  // namespace

void save_state(const AssemblyState& state, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open '" + path.string() + "' for writing");
    out << "qdiscern-state v1\n";
    out << "dims:";
    for (Index d : state.dims) out << ' ' << d;
    out << '\n';
    out << "sector: " << sector_name(state.sector) << '\n';
    out << "ordering: row-major-last-fastest\n";
    out << "kind: "
        << (state.kind == AssemblyState::Kind::Pure ? "pure" : "mixed") << '\n';
    out << "components: " << state.components.size() << '\n';
    for (const auto& c : state.components) {
        out << "weight: " << format_double(c.weight) << '\n';
        out << "amplitudes: " << c.amplitudes.size() << '\n';
        for (Index k = 0; k < c.amplitudes.size(); ++k)
            out << format_double(c.amplitudes[k].real()) << ' '
                << format_double(c.amplitudes[k].imag()) << '\n';
    }
    if (!out) throw Error("failed writing '" + path.string() + "'");
}

AssemblyState load_state(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path.string() + "' for reading");
    LineReader r{in};

    const std::string magic = r.next("header");
    if (magic != "qdiscern-state v1")
        r.fail("not a qdiscern-state v1 file (header '" + magic + "')");

    std::vector<Index> dims;
    {
        std::istringstream ss(expect_field(r, "dims"));
        long long d = 0;
        while (ss >> d) {
            if (d < 1) r.fail("dims entries must be positive");
            dims.push_back(static_cast<Index>(d));
        }
        if (dims.empty()) r.fail("dims field is empty");
    }
    const Sector sector = sector_from_name(expect_field(r, "sector"));
    const std::string ordering = expect_field(r, "ordering");
    if (ordering != "row-major-last-fastest")
        r.fail("unsupported amplitude ordering '" + ordering + "'");
    const std::string kind = expect_field(r, "kind");
    if (kind != "pure" && kind != "mixed") r.fail("kind must be pure or mixed");

    long long n_components = 0;
    {
        std::istringstream ss(expect_field(r, "components"));
        if (!(ss >> n_components) || n_components < 1)
            r.fail("components must be a positive count");
    }
    if (kind == "pure" && n_components != 1)
        r.fail("pure state files carry exactly one component");

    const Index expected = detail::product_of_dims(dims);
    std::vector<StateComponent> components;
    for (long long c = 0; c < n_components; ++c) {
        StateComponent comp;
        {
            std::istringstream ss(expect_field(r, "weight"));
            comp.weight = parse_double_token(r, ss, "weight");
        }
        long long count = 0;
        {
            std::istringstream ss(expect_field(r, "amplitudes"));
            if (!(ss >> count) || count < 0) r.fail("malformed amplitude count");
        }
        if (count != expected) {
            std::ostringstream msg;
            msg << "dims [";
            for (std::size_t i = 0; i < dims.size(); ++i)
                msg << (i ? "," : "") << dims[i];
            msg << "] require " << expected << " amplitudes, file declares "
                << count;
            r.fail(msg.str());
        }
        comp.amplitudes.resize(expected);
        for (Index k = 0; k < expected; ++k) {
            std::istringstream ss(r.next("amplitude"));
            const double re = parse_double_token(r, ss, "amplitude real part");
            const double im = parse_double_token(r, ss, "amplitude imaginary part");
            std::string extra;
            if (ss >> extra) r.fail("trailing token '" + extra + "' after amplitude");
            comp.amplitudes[k] = Complex(re, im);
        }
        components.push_back(std::move(comp));
    }
    std::string tail;
    while (std::getline(in, tail)) {
        ++r.lineno;
        if (!tail.empty() && tail.front() != '#')
            r.fail("trailing content after the last component");
    }

    if (kind == "pure")
        return AssemblyState::pure(std::move(components.front().amplitudes),
                                   std::move(dims), sector);
    return AssemblyState::mixed(std::move(components), std::move(dims), sector);
}

}  // namespace qdiscern
