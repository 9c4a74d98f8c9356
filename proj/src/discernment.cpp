#include "qdiscern/discernment.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "qdiscern/states.hpp"
#include "qdiscern/symmetry.hpp"

namespace qdiscern {

std::string relation_name(RelationKind k) {
    switch (k) {
        case RelationKind::Rt: return "Rt";
        case RelationKind::C: return "C";
        case RelationKind::T: return "T";
        case RelationKind::Tprime: return "Tprime";
        case RelationKind::R: return "R";
        case RelationKind::Rprime: return "Rprime";
        case RelationKind::Dprime: return "Dprime";
        case RelationKind::DprimeP: return "DprimeP";
    }
    return "?";
}

std::optional<RelationKind> relation_from_name(const std::string& name) {
    for (RelationKind k :
         {RelationKind::Rt, RelationKind::C, RelationKind::T, RelationKind::Tprime,
          RelationKind::R, RelationKind::Rprime, RelationKind::Dprime,
          RelationKind::DprimeP})
        if (relation_name(k) == name) return k;
    return std::nullopt;
}

std::string mode_name(Mode m) {
    return m == Mode::Categorical ? "categorical" : "probabilistic";
}

std::string postulate_name(Postulate p) {
    return p == Postulate::StrongProperty ? "strong-property" : "born-rule";
}

std::string verdict_name(Verdict v) {
    return v == Verdict::WeaklyDiscerned ? "weakly-discerned" : "not-discerned";
}

Mode relation_mode(RelationKind k) {
    switch (k) {
        case RelationKind::Rt:
        case RelationKind::C:
        case RelationKind::T:
        case RelationKind::R:
            return Mode::Categorical;
        default:
            return Mode::Probabilistic;
    }
}

Postulate relation_postulate(RelationKind k) {
    return relation_mode(k) == Mode::Categorical ? Postulate::StrongProperty
                                                 : Postulate::BornRule;
}

RelationSpec make_relation_spec(RelationKind kind) {
    RelationSpec spec;
    spec.kind = kind;
    spec.audit_sector =
        kind == RelationKind::Rt ? Sector::Antisymmetric : Sector::Full;
    return spec;
}

// --- shared evaluation paths -------------------------------------------------

namespace {

std::string format_double_17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void require_label(int label, int n, const char* what) {
    if (label < 1 || label > n)
        throw IndexError(std::string(what) + ": particle label " +
                         std::to_string(label) + " out of range 1.." +
                         std::to_string(n));
}

void require_two_particles(const AssemblyState& rho, const char* what) {
    if (rho.n_factors() != 2)
        throw ShapeError(std::string(what) + " is defined on two-particle assemblies");
}

// ||K rho||_F / ||rho||_F via state components; never materializes rho.
double commutator_norm_ratio(const Operator& k, const AssemblyState& rho) {
    const std::size_t m = rho.components.size();
    CMatrix a(rho.total_dim(), static_cast<Index>(m));
    CMatrix ka(rho.total_dim(), static_cast<Index>(m));
    for (std::size_t c = 0; c < m; ++c) {
        const double w = std::sqrt(rho.components[c].weight);
        a.col(static_cast<Index>(c)) = w * rho.components[c].amplitudes;
        ka.col(static_cast<Index>(c)) = k.matrix * a.col(static_cast<Index>(c));
    }
    const CMatrix gram = a.adjoint() * a;          // m x m
    const CMatrix kgram = ka.adjoint() * ka;       // m x m
    const double num2 = (kgram * gram).trace().real();
    const double den2 = (gram * gram).trace().real();
    return den2 > 0.0 ? std::sqrt(std::max(0.0, num2)) / std::sqrt(den2) : 0.0;
}

// <(A^(i) - A^(j))^2> / n^2 through vector-level factor application; exact
// zero on states with no support off the (i, j) diagonal of a diagonal A.
double pair_difference_expectation(const Operator& a, int i, int j,
                                   const AssemblyState& rho) {
    const int n = rho.n_factors();
    double acc = 0.0;
    for (const auto& comp : rho.components) {
        const CVector w = apply_embedded(a, i, comp.amplitudes, rho.dims) -
                          apply_embedded(a, j, comp.amplitudes, rho.dims);
        acc += comp.weight * w.squaredNorm();
    }
    return acc / (static_cast<double>(n) * static_cast<double>(n));
}

EvalResult dprime_impl(const Operator& a, const AssemblyState& rho, int x, int y,
                       const Tolerance& tol) {
    const int n = rho.n_factors();
    if (n < 2)
        throw ContractError("Dprime needs an assembly of at least two particles");
    require_label(x, n, "Dprime");
    require_label(y, n, "Dprime");
    const int ex = std::min(x, y) - 1;
    const int ey = std::max(x, y) - 1;

    // Both sides as sums of pair-term expectations, accumulated in the same
    // order; for x = y nothing is excluded and the witness is exactly zero.
    double lhs = 0.0, rhs = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double e = pair_difference_expectation(a, i, j, rho);
            lhs += e;
            if (!(x != y && i == ex && j == ey)) rhs += e;
        }
    const double witness = lhs - rhs;
    return {witness > tol.abs_tol, witness};
}

Operator single_particle_quantity(const Operator& a) {
    if (a.n_factors() != 1)
        throw ShapeError("relation quantity must be a single-particle operator");
    return a;
}

void require_lattice_dims(const AssemblyState& rho, const LatticeConfig& cfg,
                          const char* what) {
    for (Index d : rho.dims)
        if (d != cfg.sites)
            throw ShapeError(std::string(what) +
                             ": state factors do not match the lattice size");
}

}  // namespace

EvalResult eval_relation_Rt(const ProjectorFamily& f, double t,
                            const AssemblyState& rho, int x, int y,
                            const Tolerance& tol) {
    require_two_particles(rho, "Rt");
    require_label(x, 2, "Rt");
    require_label(y, 2, "Rt");
    if (rho.dims != std::vector<Index>{f.d, f.d})
        throw ShapeError("Rt: state factors do not match the projector family");
    const Operator m = pij_sum_operator(f, x, y);
    return {is_eigenstate(m, rho, t, tol), eigenstate_residual(m, rho, t)};
}

EvalResult eval_relation_C(const LatticeConfig& cfg, const AssemblyState& rho,
                           int x, int y, double threshold) {
    validate(cfg);
    require_two_particles(rho, "C");
    require_label(x, 2, "C");
    require_label(y, 2, "C");
    require_lattice_dims(rho, cfg, "C");
    const Operator q = lattice_position(cfg);
    const Operator p = lattice_momentum(cfg);
    Operator k = (x == y)
                     ? embed_single(commutator(p, q), x - 1, 2)
                     : commutator(embed_single(p, x - 1, 2),
                                  embed_single(q, y - 1, 2));
    const double witness = commutator_norm_ratio(k, rho);
    return {witness > threshold * cfg.hbar, witness};
}

bool eval_relation_T(const SpinConfig& cfg, int x, int y, const Tolerance& tol) {
    const Operator m = total_spin_squared(cfg, x, y);
    const double target = 4.0 * cfg.s * (cfg.s + 1.0) * cfg.hbar * cfg.hbar;
    const CMatrix expected =
        target * CMatrix::Identity(m.side(), m.side());
    return max_abs(m.matrix - expected) <=
           tol.abs_tol + tol.rel_tol * std::abs(target);
}

EvalResult eval_relation_T_state(const SpinConfig& cfg, const AssemblyState& rho,
                                 int x, int y, const Tolerance& tol) {
    require_two_particles(rho, "T");
    const Operator m = total_spin_squared(cfg, x, y);
    const double target = 4.0 * cfg.s * (cfg.s + 1.0) * cfg.hbar * cfg.hbar;
    return {is_eigenstate(m, rho, target, tol),
            eigenstate_residual(m, rho, target)};
}

EvalResult eval_relation_Tprime(const SpinConfig& cfg, const AssemblyState& rho,
                                int x, int y, const Tolerance& tol) {
    require_two_particles(rho, "Tprime");
    const Operator m = total_spin_squared(cfg, x, y);
    const double target = 4.0 * cfg.s * (cfg.s + 1.0) * cfg.hbar * cfg.hbar;
    const double witness = expectation(rho, m, tol);
    return {std::abs(witness - target) <=
                tol.abs_tol + tol.rel_tol * std::abs(target),
            witness};
}

EvalResult eval_relation_R(const Operator& a, const AssemblyState& rho, int x,
                           int y, const Tolerance& tol) {
    require_two_particles(rho, "R");
    require_label(x, 2, "R");
    require_label(y, 2, "R");
    single_particle_quantity(a);
    if (x == y) return {false, 0.0};  // the difference operator is identically zero
    const Operator var = pair_variance_term(a, 2, x - 1, y - 1);
    return {!is_eigenstate(var, rho, 0.0, tol),
            eigenstate_residual(var, rho, 0.0)};
}

EvalResult eval_relation_Rprime(const Operator& a, const AssemblyState& rho,
                                int x, int y, const Tolerance& tol) {
    require_two_particles(rho, "Rprime");
    require_label(x, 2, "Rprime");
    require_label(y, 2, "Rprime");
    single_particle_quantity(a);
    if (x == y) return {false, 0.0};
    const double witness = pair_difference_expectation(a, x - 1, y - 1, rho);
    return {witness > tol.abs_tol, witness};
}

EvalResult eval_relation_Dprime(const LatticeConfig& cfg,
                                const AssemblyState& rho, int x, int y,
                                const Tolerance& tol) {
    validate(cfg);
    require_lattice_dims(rho, cfg, "Dprime");
    return dprime_impl(lattice_position(cfg), rho, x, y, tol);
}

EvalResult eval_relation_DprimeP(const LatticeConfig& cfg,
                                 const AssemblyState& rho, int x, int y,
                                 const Tolerance& tol) {
    validate(cfg);
    require_lattice_dims(rho, cfg, "DprimeP");
    return dprime_impl(lattice_momentum(cfg), rho, x, y, tol);
}

Verdict classify(const TruthTable& table) {
    for (int x = 1; x <= table.n; ++x)
        for (int y = x + 1; y <= table.n; ++y) {
            const bool xy = table.at(x, y).holds;
            const bool yx = table.at(y, x).holds;
            const bool xx = table.at(x, x).holds;
            const bool yy = table.at(y, y).holds;
            if (xy && yx && !xx && !yy) return Verdict::WeaklyDiscerned;
            if (!xy && !yx && xx && yy) return Verdict::WeaklyDiscerned;
        }
    return Verdict::NotDiscerned;
}

// --- physicality audit -------------------------------------------------------

namespace {

constexpr double kTrivialityTol = 1e-8;

// Orthonormal basis of the sector as matrix columns.
CMatrix sector_basis(const std::vector<Index>& dims, Sector sector) {
    const Index total = detail::product_of_dims(dims);
    if (sector == Sector::Full) return CMatrix::Identity(total, total);
    const Index d = dims.front();
    const int n = static_cast<int>(dims.size());
    const Operator proj =
        sector == Sector::Symmetric ? symmetrizer(d, n) : antisymmetrizer(d, n);
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(proj.matrix);
    std::vector<Index> keep;
    for (Index k = 0; k < total; ++k)
        if (solver.eigenvalues()[k] > 0.5) keep.push_back(k);
    CMatrix basis(total, static_cast<Index>(keep.size()));
    for (std::size_t c = 0; c < keep.size(); ++c)
        basis.col(static_cast<Index>(c)) = solver.eigenvectors().col(keep[c]);
    return basis;
}

bool multiple_of_identity_on_sector(const Operator& op, Sector sector) {
    const CMatrix basis = sector_basis(op.dims, sector);
    if (basis.cols() == 0) return true;  // empty sector: vacuous
    const CMatrix restricted = basis.adjoint() * op.matrix * basis;
    const Complex lambda = restricted.trace() / static_cast<double>(basis.cols());
    const CMatrix expected =
        lambda * CMatrix::Identity(basis.cols(), basis.cols());
    return max_abs(restricted - expected) <=
           kTrivialityTol * (1.0 + std::abs(lambda));
}

AuditBlock audit_block(std::string description, const Operator& op,
                       const Tolerance& tol) {
    return AuditBlock{std::move(description), is_permutation_invariant(op, tol),
                      op.embedded_single};
}

}  // namespace

std::string PhysicalityAudit::overall() const {
    if (physical()) return "physical";
    std::string out;
    if (unphysical_building_blocks) out = "unphysical-building-blocks";
    if (trivial_multiple_of_identity) {
        if (!out.empty()) out += "+";
        out += "trivial-multiple-of-identity";
    }
    return out;
}

PhysicalityAudit physicality_audit(const RelationSpec& spec) {
    PhysicalityAudit audit;
    audit.sector = spec.audit_sector;
    std::vector<const Operator*> assembled;
    std::vector<Operator> owned;
    owned.reserve(64);

    switch (spec.kind) {
        case RelationKind::Rt: {
            if (!spec.family) throw ConfigError("Rt audit needs a projector family");
            const ProjectorFamily& f = *spec.family;
            for (int slot = 0; slot < 2; ++slot)
                for (Index i = 0; i < f.d; ++i)
                    for (Index j = 0; j < f.d; ++j) {
                        if (i == j) continue;
                        const Operator pij(
                            CMatrix(f.projectors[static_cast<std::size_t>(i)].matrix -
                                    f.projectors[static_cast<std::size_t>(j)].matrix),
                            {f.d}, true);
                        std::ostringstream name;
                        name << "projector difference P[" << i + 1 << "," << j + 1
                             << "] embedded at particle " << slot + 1;
                        owned.push_back(embed_single(pij, slot, 2));
                        audit.blocks.push_back(
                            audit_block(name.str(), owned.back(), spec.tol));
                    }
            owned.push_back(pij_sum_operator(f, 1, 1));
            audit.blocks.push_back(
                audit_block("assembled sum, same particle (x=y)", owned.back(),
                            spec.tol));
            assembled.push_back(&owned.back());
            owned.push_back(pij_sum_operator(f, 1, 2));
            audit.blocks.push_back(
                audit_block("assembled sum, distinct particles (x!=y)",
                            owned.back(), spec.tol));
            assembled.push_back(&owned.back());
            break;
        }
        case RelationKind::C: {
            if (!spec.lattice) throw ConfigError("C audit needs a lattice config");
            const Operator q = lattice_position(*spec.lattice);
            const Operator p = lattice_momentum(*spec.lattice);
            for (int slot = 0; slot < 2; ++slot) {
                owned.push_back(embed_single(q, slot, 2));
                audit.blocks.push_back(audit_block(
                    "position embedded at particle " + std::to_string(slot + 1),
                    owned.back(), spec.tol));
                owned.push_back(embed_single(p, slot, 2));
                audit.blocks.push_back(audit_block(
                    "momentum embedded at particle " + std::to_string(slot + 1),
                    owned.back(), spec.tol));
            }
            owned.push_back(embed_single(commutator(p, q), 0, 2));
            audit.blocks.push_back(audit_block(
                "commutator [P(x), Q(y)], same particle", owned.back(), spec.tol));
            assembled.push_back(&owned.back());
            owned.push_back(
                commutator(embed_single(p, 0, 2), embed_single(q, 1, 2)));
            audit.blocks.push_back(
                audit_block("commutator [P(x), Q(y)], distinct particles",
                            owned.back(), spec.tol));
            assembled.push_back(&owned.back());
            break;
        }
        case RelationKind::T:
        case RelationKind::Tprime: {
            if (!spec.spin) throw ConfigError("T audit needs a spin config");
            owned.push_back(total_spin_squared(*spec.spin, 1, 2));
            audit.blocks.push_back(
                audit_block("combined total spin squared, distinct particles",
                            owned.back(), spec.tol));
            assembled.push_back(&owned.back());
            owned.push_back(total_spin_squared(*spec.spin, 1, 1));
            audit.blocks.push_back(
                audit_block("combined total spin squared, same particle",
                            owned.back(), spec.tol));
            assembled.push_back(&owned.back());
            break;
        }
        case RelationKind::R:
        case RelationKind::Rprime: {
            if (!spec.quantity) throw ConfigError("R audit needs a quantity");
            const std::string label =
                spec.quantity_name.empty() ? "A" : spec.quantity_name;
            owned.push_back(
                pair_variance_term(single_particle_quantity(*spec.quantity), 2, 0, 1));
            audit.blocks.push_back(audit_block(
                "variance operator of " + label + " (2 particles)", owned.back(),
                spec.tol));
            assembled.push_back(&owned.back());
            break;
        }
        case RelationKind::Dprime:
        case RelationKind::DprimeP: {
            if (!spec.lattice)
                throw ConfigError("Dprime audit needs a lattice config");
            if (spec.n_particles < 2)
                throw ContractError("Dprime audit needs at least two particles");
            const bool momentum = spec.kind == RelationKind::DprimeP;
            const Operator a = momentum ? lattice_momentum(*spec.lattice)
                                        : lattice_position(*spec.lattice);
            owned.push_back(variance_operator(a, spec.n_particles));
            audit.blocks.push_back(audit_block(
                std::string(momentum ? "momentum" : "position") +
                    " variance operator (" + std::to_string(spec.n_particles) +
                    " particles)",
                owned.back(), spec.tol));
            assembled.push_back(&owned.back());
            break;
        }
    }

    audit.unphysical_building_blocks =
        std::any_of(audit.blocks.begin(), audit.blocks.end(),
                    [](const AuditBlock& b) { return !b.permutation_invariant; });
    audit.trivial_multiple_of_identity =
        !assembled.empty() &&
        std::all_of(assembled.begin(), assembled.end(), [&](const Operator* op) {
            return multiple_of_identity_on_sector(*op, spec.audit_sector);
        });
    return audit;
}

// --- full evaluation ---------------------------------------------------------

TruthTable relation_truth_table(const RelationSpec& spec,
                                const AssemblyState& rho) {
    const int n = rho.n_factors();
    const bool many_particle = spec.kind == RelationKind::Dprime ||
                               spec.kind == RelationKind::DprimeP;
    if (!many_particle && n != 2)
        throw ConfigError(relation_name(spec.kind) +
                          " runs on two-particle assemblies");
    if (many_particle && n < 2)
        throw ConfigError("Dprime needs at least two particles");

    TruthTable table(n);

    // Precompute per-kind operators once; the table reuses them.
    switch (spec.kind) {
        case RelationKind::Rt: {
            if (!spec.family) throw ConfigError("Rt needs a projector family");
            if (rho.dims != std::vector<Index>{spec.family->d, spec.family->d})
                throw ShapeError("Rt: state factors do not match the family");
            const Operator m_same = pij_sum_operator(*spec.family, 1, 1);
            const Operator m_cross = pij_sum_operator(*spec.family, 1, 2);
            for (int x = 1; x <= 2; ++x)
                for (int y = 1; y <= 2; ++y) {
                    const Operator& m = (x == y) ? m_same : m_cross;
                    table.at(x, y) = {is_eigenstate(m, rho, spec.t, spec.tol),
                                      eigenstate_residual(m, rho, spec.t)};
                }
            break;
        }
        case RelationKind::C: {
            if (!spec.lattice) throw ConfigError("C needs a lattice config");
            require_lattice_dims(rho, *spec.lattice, "C");
            const Operator q = lattice_position(*spec.lattice);
            const Operator p = lattice_momentum(*spec.lattice);
            const double threshold = spec.c_threshold * spec.lattice->hbar;
            for (int x = 1; x <= 2; ++x)
                for (int y = 1; y <= 2; ++y) {
                    const Operator k =
                        (x == y) ? embed_single(commutator(p, q), x - 1, 2)
                                 : commutator(embed_single(p, x - 1, 2),
                                              embed_single(q, y - 1, 2));
                    const double witness = commutator_norm_ratio(k, rho);
                    table.at(x, y) = {witness > threshold, witness};
                }
            break;
        }
        case RelationKind::T: {
            if (!spec.spin) throw ConfigError("T needs a spin config");
            for (int x = 1; x <= 2; ++x)
                for (int y = 1; y <= 2; ++y)
                    table.at(x, y) =
                        eval_relation_T_state(*spec.spin, rho, x, y, spec.tol);
            break;
        }
        case RelationKind::Tprime: {
            if (!spec.spin) throw ConfigError("Tprime needs a spin config");
            for (int x = 1; x <= 2; ++x)
                for (int y = 1; y <= 2; ++y)
                    table.at(x, y) =
                        eval_relation_Tprime(*spec.spin, rho, x, y, spec.tol);
            break;
        }
        case RelationKind::R:
        case RelationKind::Rprime: {
            if (!spec.quantity) throw ConfigError("R needs a quantity");
            const Operator a = single_particle_quantity(*spec.quantity);
            if (rho.dims != std::vector<Index>{a.side(), a.side()})
                throw ShapeError("R: state factors do not match the quantity");
            const bool categorical = spec.kind == RelationKind::R;
            const Operator var = pair_variance_term(a, 2, 0, 1);
            for (int x = 1; x <= 2; ++x)
                for (int y = 1; y <= 2; ++y) {
                    if (x == y) {
                        table.at(x, y) = {false, 0.0};
                    } else if (categorical) {
                        table.at(x, y) = {!is_eigenstate(var, rho, 0.0, spec.tol),
                                          eigenstate_residual(var, rho, 0.0)};
                    } else {
                        const double w =
                            pair_difference_expectation(a, x - 1, y - 1, rho);
                        table.at(x, y) = {w > spec.tol.abs_tol, w};
                    }
                }
            break;
        }
        case RelationKind::Dprime:
        case RelationKind::DprimeP: {
            if (!spec.lattice) throw ConfigError("Dprime needs a lattice config");
            require_lattice_dims(rho, *spec.lattice, "Dprime");
            const Operator a = spec.kind == RelationKind::Dprime
                                   ? lattice_position(*spec.lattice)
                                   : lattice_momentum(*spec.lattice);
            for (int x = 1; x <= n; ++x)
                for (int y = 1; y <= n; ++y)
                    table.at(x, y) = dprime_impl(a, rho, x, y, spec.tol);
            break;
        }
    }
    return table;
}

DiscernmentReport evaluate(const RelationSpec& spec, const AssemblyState& rho) {
    DiscernmentReport report;
    report.kind = spec.kind;
    report.quantity_name = spec.quantity_name;
    report.mode = spec.mode();
    report.postulate = spec.postulate();
    report.lattice_analogue = spec.kind == RelationKind::C;
    report.tol = spec.tol;
    if (spec.lattice) report.hbar = spec.lattice->hbar;
    if (spec.spin) report.hbar = spec.spin->hbar;
    if (spec.kind == RelationKind::C)
        report.notes =
            "lattice analogue of the canonical commutation relation; "
            "witness is the norm ratio ||[P,Q] rho|| / ||rho||, threshold " +
            format_double_17(spec.c_threshold) + " * hbar";
    if (spec.kind == RelationKind::T)
        report.notes = "de-modalized form: eigenstate test on the given state";

    report.table = relation_truth_table(spec, rho);
    report.verdict = classify(report.table);
    RelationSpec audit_spec = spec;
    audit_spec.n_particles = rho.n_factors();
    report.audit = physicality_audit(audit_spec);
    return report;
}

// --- theorem scripts ----------------------------------------------------------

std::string theorem_name(TheoremId id) {
    switch (id) {
        case TheoremId::T1: return "1";
        case TheoremId::T2: return "2";
        case TheoremId::T3: return "3";
        case TheoremId::T4: return "4";
        case TheoremId::T5: return "5";
        case TheoremId::T6: return "6";
        case TheoremId::SMS1: return "SMS1";
        case TheoremId::SMS2: return "SMS2";
        case TheoremId::SMS3: return "SMS3";
    }
    return "?";
}

std::optional<TheoremId> parse_theorem_id(const std::string& text) {
    std::string t = text;
    std::transform(t.begin(), t.end(), t.begin(),
                   [](unsigned char c) { return std::toupper(c); });
    if (t == "1" || t == "T1") return TheoremId::T1;
    if (t == "2" || t == "T2") return TheoremId::T2;
    if (t == "3" || t == "T3") return TheoremId::T3;
    if (t == "4" || t == "T4") return TheoremId::T4;
    if (t == "5" || t == "T5") return TheoremId::T5;
    if (t == "6" || t == "T6") return TheoremId::T6;
    if (t == "SMS1") return TheoremId::SMS1;
    if (t == "SMS2") return TheoremId::SMS2;
    if (t == "SMS3") return TheoremId::SMS3;
    return std::nullopt;
}

namespace {

constexpr std::array<Sector, 3> kAllSectors = {
    Sector::Full, Sector::Symmetric, Sector::Antisymmetric};

struct Script {
    TheoremReport& report;

    void check(bool ok, const std::string& message) {
        if (!ok) report.failures.push_back(message);
    }
    void record(TrialRecord r) { report.records.push_back(std::move(r)); }
};

void require_config(bool ok, const std::string& message) {
    if (!ok) throw ContractError("theorem config: " + message);
}

void validate_common(const TheoremConfig& cfg) {
    require_config(cfg.trials >= 1, "trials must be at least 1");
    require_config(cfg.spacing > 0.0, "spacing must be positive");
    require_config(cfg.hbar > 0.0, "hbar must be positive");
    require_config(!cfg.lattice_sizes.empty(), "need at least one lattice size");
    for (Index L : cfg.lattice_sizes)
        require_config(L >= 2, "lattice sizes must be at least 2");
}

std::string group_label(Index sites, Sector sector) {
    return "L=" + std::to_string(sites) + " sector=" + sector_name(sector);
}

std::uint64_t group_seed(const TheoremConfig& cfg, std::uint64_t group_index) {
    return derive_subseed(cfg.seed, 0x5EC70ULL + group_index);
}

// Theorems 1 and 2: position variance discerns on every random lattice state.
void script_variance(TheoremId id, const TheoremConfig& cfg, Script& s) {
    validate_common(cfg);
    const bool categorical = id == TheoremId::T1;
    std::uint64_t group = 0;
    for (Index sites : cfg.lattice_sizes) {
        const LatticeConfig lat{sites, cfg.spacing, cfg.hbar, true};
        const Operator q = lattice_position(lat);
        const Operator var = pair_variance_term(q, 2, 0, 1);
        for (Sector sector : kAllSectors) {
            const std::string label = group_label(sites, sector);
            const auto states = random_states(
                {group_seed(cfg, group++), sector, {sites, sites}, cfg.trials});
            for (int trial = 0; trial < cfg.trials; ++trial) {
                const AssemblyState& psi = states[static_cast<std::size_t>(trial)];
                double witness = 0.0;
                bool off = false;
                if (categorical) {
                    witness = eigenstate_residual(var, psi, 0.0);
                    off = !is_eigenstate(var, psi, 0.0, cfg.tol);
                } else {
                    witness = expectation(psi, var, cfg.tol);
                    off = witness > cfg.tol.abs_tol;
                }
                TruthTable table(2);
                table.at(1, 2) = table.at(2, 1) = {off, witness};
                table.at(1, 1) = table.at(2, 2) = {false, 0.0};
                const bool discerned =
                    classify(table) == Verdict::WeaklyDiscerned;
                s.check(off && discerned,
                        label + " trial " + std::to_string(trial) +
                            ": position variance failed to discern (witness " +
                            std::to_string(witness) + ")");
                s.record({label, trial, 1, 2, witness, off, ""});
            }
        }
    }
}

// Theorems 3 and 4: the Q-or-P disjunction covers point-mass states too.
void script_disjunction(TheoremId id, const TheoremConfig& cfg, Script& s) {
    validate_common(cfg);
    const bool categorical = id == TheoremId::T3;
    std::uint64_t group = 0;
    for (Index sites : cfg.lattice_sizes) {
        const LatticeConfig lat{sites, cfg.spacing, cfg.hbar, true};
        const Operator q = lattice_position(lat);
        const Operator p = lattice_momentum(lat);
        const Operator var_q = pair_variance_term(q, 2, 0, 1);
        const Operator var_p = pair_variance_term(p, 2, 0, 1);

        auto eval_state = [&](const std::string& label, int trial,
                              const AssemblyState& psi, bool expect_p_branch) {
            EvalResult rq, rp;
            if (categorical) {
                rq = {!is_eigenstate(var_q, psi, 0.0, cfg.tol),
                      eigenstate_residual(var_q, psi, 0.0)};
                rp = {!is_eigenstate(var_p, psi, 0.0, cfg.tol),
                      eigenstate_residual(var_p, psi, 0.0)};
            } else {
                const double wq = expectation(psi, var_q, cfg.tol);
                const double wp = expectation(psi, var_p, cfg.tol);
                rq = {wq > cfg.tol.abs_tol, wq};
                rp = {wp > cfg.tol.abs_tol, wp};
            }
            const std::string branch = rq.holds ? "Q" : (rp.holds ? "P" : "none");
            s.check(rq.holds || rp.holds,
                    label + " trial " + std::to_string(trial) +
                        ": neither Q nor P discerns");
            if (expect_p_branch)
                s.check(!rq.holds && rp.holds,
                        label + " trial " + std::to_string(trial) +
                            ": point-mass state should discern via P only");
            s.record({label, trial, 1, 2, rq.holds ? rq.witness : rp.witness,
                      rq.holds || rp.holds, branch});
        };

        for (Sector sector : kAllSectors) {
            const std::string label = group_label(sites, sector);
            const auto states = random_states(
                {group_seed(cfg, group++), sector, {sites, sites}, cfg.trials});
            for (int trial = 0; trial < cfg.trials; ++trial)
                eval_state(label, trial,
                           states[static_cast<std::size_t>(trial)], false);
        }

        const std::string label = "L=" + std::to_string(sites) + " point-mass";
        const std::uint64_t pm_seed = group_seed(cfg, group++);
        for (int trial = 0; trial < 10; ++trial) {
            const auto f = random_pointmass_profile(
                sites, derive_subseed(pm_seed, static_cast<std::uint64_t>(trial)));
            eval_state(label, trial, diagonal_pointmass(f, lat, 2), true);
        }
    }
}

// Theorems 5 and 6: N-particle variance discerns every pair (via momentum
// for diagonal point-mass states).
void script_many_particle(TheoremId id, const TheoremConfig& cfg, Script& s) {
    validate_common(cfg);
    require_config(cfg.particles >= 2, "Dprime needs at least two particles");
    const bool with_momentum_escape = id == TheoremId::T6;
    const int n = cfg.particles;
    std::uint64_t group = 0;
    for (Index sites : cfg.lattice_sizes) {
        Index total = 1;
        for (int k = 0; k < n; ++k) {
            require_config(total <= kMaxTotalDim / sites,
                           "particles * log(sites) exceeds the dense capacity");
            total *= sites;
        }
        const LatticeConfig lat{sites, cfg.spacing, cfg.hbar, true};
        const Operator q = lattice_position(lat);
        const Operator p = lattice_momentum(lat);

        auto eval_all_pairs = [&](const std::string& label, int trial,
                                  const AssemblyState& psi, bool pointmass) {
            for (int x = 1; x <= n; ++x)
                for (int y = x; y <= n; ++y) {
                    const EvalResult dq = dprime_impl(q, psi, x, y, cfg.tol);
                    if (x == y) {
                        s.check(dq.witness == 0.0,
                                label + " trial " + std::to_string(trial) +
                                    ": diagonal Dprime witness must be exactly 0");
                        s.record({label, trial, x, y, dq.witness, dq.holds, "D'"});
                        continue;
                    }
                    if (!with_momentum_escape) {
                        s.check(dq.holds, label + " trial " +
                                              std::to_string(trial) + " pair (" +
                                              std::to_string(x) + "," +
                                              std::to_string(y) +
                                              "): Dprime failed");
                        s.record({label, trial, x, y, dq.witness, dq.holds, "D'"});
                        continue;
                    }
                    const EvalResult dp = dprime_impl(p, psi, x, y, cfg.tol);
                    const std::string branch =
                        dq.holds ? "D'" : (dp.holds ? "D'P" : "none");
                    s.check(dq.holds || dp.holds,
                            label + " trial " + std::to_string(trial) + " pair (" +
                                std::to_string(x) + "," + std::to_string(y) +
                                "): neither D' nor D'P discerns");
                    if (pointmass)
                        s.check(!dq.holds && dp.holds,
                                label + " trial " + std::to_string(trial) +
                                    ": point-mass state should take the D'P branch");
                    s.record({label, trial, x, y,
                              dq.holds ? dq.witness : dp.witness,
                              dq.holds || dp.holds, branch});
                }
        };

        const std::vector<Index> dims(static_cast<std::size_t>(n), sites);
        for (Sector sector : kAllSectors) {
            if (sector == Sector::Antisymmetric && sites < n) continue;
            const std::string label = group_label(sites, sector);
            const auto states = random_states(
                {group_seed(cfg, group++), sector, dims, cfg.trials});
            for (int trial = 0; trial < cfg.trials; ++trial) {
                const AssemblyState& psi = states[static_cast<std::size_t>(trial)];
                eval_all_pairs(label, trial, psi, false);
                if (n == 2) {
                    // D'^(2) must agree with R'(Q) on every state.
                    const EvalResult d2 = dprime_impl(q, psi, 1, 2, cfg.tol);
                    const EvalResult r2 =
                        eval_relation_Rprime(q, psi, 1, 2, cfg.tol);
                    s.check(d2.holds == r2.holds &&
                                std::abs(d2.witness - r2.witness) <= 1e-10,
                            label + " trial " + std::to_string(trial) +
                                ": D'(2) disagrees with R'(Q)");
                }
            }
        }
        if (with_momentum_escape) {
            const std::string label = "L=" + std::to_string(sites) + " point-mass";
            const std::uint64_t pm_seed = group_seed(cfg, group++);
            for (int trial = 0; trial < 10; ++trial) {
                const auto f = random_pointmass_profile(
                    sites,
                    derive_subseed(pm_seed, static_cast<std::uint64_t>(trial)));
                eval_all_pairs(label, trial, diagonal_pointmass(f, lat, n), true);
            }
        }
    }
}

// SMS1: the projector-sum relation weakly discerns on the antisymmetric
// sector, in both polarities of t.
void script_sms1(const TheoremConfig& cfg, Script& s) {
    require_config(cfg.trials >= 1, "trials must be at least 1");
    require_config(!cfg.family_dims.empty(), "need at least one family dimension");
    std::uint64_t group = 0;
    for (Index d : cfg.family_dims) {
        require_config(d >= 2, "projector families need dimension >= 2");
        const std::uint64_t seed = group_seed(cfg, group++);
        const std::array<ProjectorFamily, 2> families = {
            standard_projector_family(d),
            random_projector_family(d, derive_subseed(seed, 1))};
        const std::array<const char*, 2> family_names = {"standard", "random"};
        const auto states =
            random_states({derive_subseed(seed, 2), Sector::Antisymmetric,
                           {d, d}, cfg.trials});
        for (std::size_t fi = 0; fi < families.size(); ++fi) {
            const ProjectorFamily& f = families[fi];
            const Operator m_same = pij_sum_operator(f, 1, 1);
            const Operator m_cross = pij_sum_operator(f, 1, 2);
            const double t_same = 2.0 * static_cast<double>(d - 1);
            const std::string label =
                "d=" + std::to_string(d) + " family=" + family_names[fi];
            for (int trial = 0; trial < cfg.trials; ++trial) {
                const AssemblyState& psi = states[static_cast<std::size_t>(trial)];
                for (const double t : {-2.0, t_same}) {
                    TruthTable table(2);
                    for (int x = 1; x <= 2; ++x)
                        for (int y = 1; y <= 2; ++y) {
                            const Operator& m = (x == y) ? m_same : m_cross;
                            table.at(x, y) = {is_eigenstate(m, psi, t, cfg.tol),
                                              eigenstate_residual(m, psi, t)};
                        }
                    const bool expect_diag = t != -2.0;
                    const bool ok =
                        table.at(1, 1).holds == expect_diag &&
                        table.at(2, 2).holds == expect_diag &&
                        table.at(1, 2).holds == !expect_diag &&
                        table.at(2, 1).holds == !expect_diag &&
                        classify(table) == Verdict::WeaklyDiscerned;
                    const std::string branch =
                        t == -2.0 ? "t=-2" : "t=2(d-1)";
                    s.check(ok, label + " trial " + std::to_string(trial) + " " +
                                    branch + ": R_t table wrong");
                    s.record({label, trial, 1, 2, table.at(1, 2).witness,
                              table.at(1, 2).holds, branch});
                }
            }
        }
    }
}

// SMS2 lattice analogue: same-particle commutators bounded away from zero,
// cross commutators exactly zero.
void script_sms2(const TheoremConfig& cfg, Script& s) {
    validate_common(cfg);
    std::uint64_t group = 0;
    for (Index sites : cfg.lattice_sizes) {
        const LatticeConfig lat{sites, cfg.spacing, cfg.hbar, true};
        const Operator q = lattice_position(lat);
        const Operator p = lattice_momentum(lat);
        std::array<std::array<Operator, 2>, 2> k = {
            {{embed_single(commutator(p, q), 0, 2),
              commutator(embed_single(p, 0, 2), embed_single(q, 1, 2))},
             {commutator(embed_single(p, 1, 2), embed_single(q, 0, 2)),
              embed_single(commutator(p, q), 1, 2)}}};
        const double threshold = cfg.c_threshold * cfg.hbar;
        for (Sector sector : kAllSectors) {
            const std::string label = group_label(sites, sector);
            const auto states = random_states(
                {group_seed(cfg, group++), sector, {sites, sites}, cfg.trials});
            for (int trial = 0; trial < cfg.trials; ++trial) {
                const AssemblyState& psi = states[static_cast<std::size_t>(trial)];
                TruthTable table(2);
                for (int x = 1; x <= 2; ++x)
                    for (int y = 1; y <= 2; ++y) {
                        const double witness = commutator_norm_ratio(
                            k[static_cast<std::size_t>(x - 1)]
                             [static_cast<std::size_t>(y - 1)],
                            psi);
                        table.at(x, y) = {witness > threshold, witness};
                        s.record({label, trial, x, y, witness,
                                  table.at(x, y).holds, ""});
                    }
                s.check(table.at(1, 1).holds && table.at(2, 2).holds,
                        label + " trial " + std::to_string(trial) +
                            ": same-particle commutator below threshold");
                s.check(table.at(1, 2).witness == 0.0 &&
                            table.at(2, 1).witness == 0.0,
                        label + " trial " + std::to_string(trial) +
                            ": cross commutator witness must be exactly 0");
                s.check(classify(table) == Verdict::WeaklyDiscerned,
                        label + " trial " + std::to_string(trial) +
                            ": C table not weakly discerning");
            }
        }
    }
}

// SMS3: total-spin relations, operator facts plus the T' table on random
// spin states.
void script_sms3(const TheoremConfig& cfg, Script& s) {
    require_config(cfg.trials >= 1, "trials must be at least 1");
    const SpinConfig spin{cfg.spin, cfg.hbar};
    validate(spin);
    require_config(spin.s > 0.0, "SMS3 needs non-zero spin");
    const double hbar2 = cfg.hbar * cfg.hbar;
    const double target = 4.0 * spin.s * (spin.s + 1.0) * hbar2;
    const double bound = (2.0 * spin.s) * (2.0 * spin.s + 1.0) * hbar2;
    const std::string label = "s=" + std::to_string(spin.s);

    // Modal T as an operator identity.
    s.check(eval_relation_T(spin, 1, 1, cfg.tol) &&
                eval_relation_T(spin, 2, 2, cfg.tol),
            label + ": T(x,x) must hold as an operator identity");
    s.check(!eval_relation_T(spin, 1, 2, cfg.tol) &&
                !eval_relation_T(spin, 2, 1, cfg.tol),
            label + ": T(x,y) must fail for distinct particles");

    // Spectrum bound of the combined total spin.
    const Operator m_cross = total_spin_squared(spin, 1, 2);
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(m_cross.matrix);
    const double max_eig = solver.eigenvalues().maxCoeff();
    s.check(std::abs(max_eig - bound) <= 1e-9 * (1.0 + bound),
            label + ": max total-spin eigenvalue != (2s)(2s+1) hbar^2");
    s.check(max_eig < target, label + ": spectrum bound does not separate T");

    const Index d = static_cast<Index>(std::llround(2.0 * spin.s)) + 1;
    const auto states = random_states(
        {group_seed(cfg, 0), Sector::Full, {d, d}, cfg.trials});
    for (int trial = 0; trial < cfg.trials; ++trial) {
        const AssemblyState& psi = states[static_cast<std::size_t>(trial)];
        TruthTable table(2);
        for (int x = 1; x <= 2; ++x)
            for (int y = 1; y <= 2; ++y) {
                table.at(x, y) = eval_relation_Tprime(spin, psi, x, y, cfg.tol);
                s.record({label, trial, x, y, table.at(x, y).witness,
                          table.at(x, y).holds, ""});
            }
        s.check(table.at(1, 1).holds && table.at(2, 2).holds &&
                    !table.at(1, 2).holds && !table.at(2, 1).holds,
                label + " trial " + std::to_string(trial) +
                    ": T' table must have dual polarity");
        s.check(classify(table) == Verdict::WeaklyDiscerned,
                label + " trial " + std::to_string(trial) +
                    ": T' not weakly discerning");
    }
}

}  // namespace

TheoremReport verify_theorem(TheoremId id, const TheoremConfig& cfg) {
    TheoremReport report;
    report.id = id;
    report.config = cfg;
    report.rng_algorithm = kRngAlgorithm;
    Script s{report};

    switch (id) {
        case TheoremId::T1:
        case TheoremId::T2:
            script_variance(id, cfg, s);
            break;
        case TheoremId::T3:
        case TheoremId::T4:
            script_disjunction(id, cfg, s);
            break;
        case TheoremId::T5:
        case TheoremId::T6:
            script_many_particle(id, cfg, s);
            break;
        case TheoremId::SMS1:
            script_sms1(cfg, s);
            break;
        case TheoremId::SMS2:
            script_sms2(cfg, s);
            break;
        case TheoremId::SMS3:
            script_sms3(cfg, s);
            break;
    }

    report.pass = report.failures.empty();
    std::ostringstream summary;
    summary << "theorem " << theorem_name(id) << ": "
            << (report.pass ? "pass" : "FAIL") << " (" << report.records.size()
            << " recorded checks";
    if (!report.pass) summary << ", " << report.failures.size() << " failures";
    summary << ")";
    report.summary = summary.str();
    return report;
}

SampleReport sample_relation(const RelationSpec& spec, Sector sector,
                             std::uint64_t seed, int trials) {
    if (trials < 1) throw ConfigError("sample needs trials >= 1");
    SampleReport out;
    out.kind = spec.kind;
    out.quantity_name = spec.quantity_name;
    out.sector = sector;
    out.seed = seed;
    out.tol = spec.tol;
    if (spec.lattice) out.hbar = spec.lattice->hbar;
    if (spec.spin) out.hbar = spec.spin->hbar;
    out.rng_algorithm = kRngAlgorithm;

    int n = 2;
    Index d = 2;
    switch (spec.kind) {
        case RelationKind::Rt:
            if (!spec.family) throw ConfigError("Rt sample needs a projector family");
            d = spec.family->d;
            break;
        case RelationKind::C:
        case RelationKind::Dprime:
        case RelationKind::DprimeP:
            if (!spec.lattice) throw ConfigError("sample needs a lattice config");
            d = spec.lattice->sites;
            n = (spec.kind == RelationKind::C) ? 2 : spec.n_particles;
            break;
        case RelationKind::T:
        case RelationKind::Tprime:
            if (!spec.spin) throw ConfigError("sample needs a spin config");
            d = static_cast<Index>(std::llround(2.0 * spec.spin->s)) + 1;
            break;
        case RelationKind::R:
        case RelationKind::Rprime:
            if (!spec.quantity) throw ConfigError("sample needs a quantity");
            d = spec.quantity->side();
            break;
    }
    out.dims.assign(static_cast<std::size_t>(n), d);

    const auto states = random_states({seed, sector, out.dims, trials});
    double min_w = 0.0, max_w = 0.0, sum_w = 0.0;
    std::size_t count = 0;
    for (int trial = 0; trial < trials; ++trial) {
        const TruthTable table =
            relation_truth_table(spec, states[static_cast<std::size_t>(trial)]);
        const Verdict verdict = classify(table);
        for (int x = 1; x <= n; ++x)
            for (int y = 1; y <= n; ++y) {
                const EvalResult& e = table.at(x, y);
                out.rows.push_back({trial, x, y, e.witness, e.holds, verdict});
                if (x != y) {
                    if (count == 0) {
                        min_w = max_w = e.witness;
                    } else {
                        min_w = std::min(min_w, e.witness);
                        max_w = std::max(max_w, e.witness);
                    }
                    sum_w += e.witness;
                    ++count;
                }
            }
    }
    out.min_witness = min_w;
    out.max_witness = max_w;
    out.mean_witness = count ? sum_w / static_cast<double>(count) : 0.0;
    return out;
}

}  // namespace qdiscern
