#ifndef QDISCERN_DISCERNMENT_HPP
#define QDISCERN_DISCERNMENT_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qdiscern/hilbert.hpp"
#include "qdiscern/observables.hpp"

namespace qdiscern {

enum class RelationKind { Rt, C, T, Tprime, R, Rprime, Dprime, DprimeP };
enum class Mode { Categorical, Probabilistic };
enum class Postulate { StrongProperty, BornRule };
enum class Verdict { WeaklyDiscerned, NotDiscerned };

std::string relation_name(RelationKind k);
std::optional<RelationKind> relation_from_name(const std::string& name);
std::string mode_name(Mode m);
std::string postulate_name(Postulate p);
std::string verdict_name(Verdict v);

Mode relation_mode(RelationKind k);
Postulate relation_postulate(RelationKind k);

/// Which discernibility relation to evaluate, with its parameters. Only the
/// fields the kind needs are consulted.
struct RelationSpec {
    RelationKind kind = RelationKind::R;

    std::optional<ProjectorFamily> family;  // Rt
    double t = -2.0;                        // Rt
    std::optional<SpinConfig> spin;         // T, Tprime
    std::optional<Operator> quantity;       // R, Rprime
    std::string quantity_name;              // report label for `quantity`
    std::optional<LatticeConfig> lattice;   // C, Dprime, DprimeP
    double c_threshold = 1e-6;              // C; scaled by hbar
    int n_particles = 2;

    /// Sector on which the audit checks for trivial multiples of the
    /// identity (the paper's fermionic setting for Rt).
    Sector audit_sector = Sector::Full;

    Tolerance tol;

    Mode mode() const { return relation_mode(kind); }
    Postulate postulate() const { return relation_postulate(kind); }
};

RelationSpec make_relation_spec(RelationKind kind);

struct EvalResult {
    bool holds = false;
    double witness = 0.0;
};

// Per-relation evaluators; particle labels x, y are 1-based.
EvalResult eval_relation_Rt(const ProjectorFamily& f, double t,
                            const AssemblyState& rho, int x, int y,
                            const Tolerance& tol = {});
EvalResult eval_relation_C(const LatticeConfig& cfg, const AssemblyState& rho,
                           int x, int y, double threshold);
/// State-independent form of T: |S_x + S_y|^2 = 4s(s+1)hbar^2 as a matrix
/// identity (the quantification over all states collapses to this).
bool eval_relation_T(const SpinConfig& cfg, int x, int y,
                     const Tolerance& tol = {});
/// De-modalized T: eigenstate test on a given state.
EvalResult eval_relation_T_state(const SpinConfig& cfg, const AssemblyState& rho,
                                 int x, int y, const Tolerance& tol = {});
EvalResult eval_relation_Tprime(const SpinConfig& cfg, const AssemblyState& rho,
                                int x, int y, const Tolerance& tol = {});
EvalResult eval_relation_R(const Operator& a, const AssemblyState& rho, int x,
                           int y, const Tolerance& tol = {});
EvalResult eval_relation_Rprime(const Operator& a, const AssemblyState& rho,
                                int x, int y, const Tolerance& tol = {});
EvalResult eval_relation_Dprime(const LatticeConfig& cfg,
                                const AssemblyState& rho, int x, int y,
                                const Tolerance& tol = {});
EvalResult eval_relation_DprimeP(const LatticeConfig& cfg,
                                 const AssemblyState& rho, int x, int y,
                                 const Tolerance& tol = {});

/// Truth table over ordered particle pairs, 1-based labels.
struct TruthTable {
    int n = 2;
    std::vector<EvalResult> entries;  // row-major over (x, y)

    explicit TruthTable(int particles)
        : n(particles),
          entries(static_cast<std::size_t>(particles) *
                  static_cast<std::size_t>(particles)) {}

    EvalResult& at(int x, int y) {
        return entries[static_cast<std::size_t>((x - 1) * n + (y - 1))];
    }
    const EvalResult& at(int x, int y) const {
        return entries[static_cast<std::size_t>((x - 1) * n + (y - 1))];
    }
};

/// Weak-discernment classifier: some pair holds symmetrically off the
/// diagonal with both reflexive entries false, or the dual polarity
/// (diagonal true, off-diagonal false).
Verdict classify(const TruthTable& table);

struct AuditBlock {
    std::string description;
    bool permutation_invariant = false;
    bool embedded_single = false;
};

struct PhysicalityAudit {
    std::vector<AuditBlock> blocks;
    bool unphysical_building_blocks = false;
    /// Every verdict-deciding assembled operator is a multiple of the
    /// identity on the audit sector, so the relation cannot depend on the
    /// state at all.
    bool trivial_multiple_of_identity = false;
    Sector sector = Sector::Full;

    bool physical() const {
        return !unphysical_building_blocks && !trivial_multiple_of_identity;
    }
    std::string overall() const;
};

PhysicalityAudit physicality_audit(const RelationSpec& spec);

/// Full evaluation of a relation on a state: truth table over all ordered
/// pairs, verdict, witnesses, and the physicality audit.
struct DiscernmentReport {
    RelationKind kind = RelationKind::R;
    std::string quantity_name;
    Mode mode = Mode::Categorical;
    Postulate postulate = Postulate::StrongProperty;
    bool lattice_analogue = false;  // C substitutes a norm-threshold test
    TruthTable table{2};
    Verdict verdict = Verdict::NotDiscerned;
    PhysicalityAudit audit;
    double hbar = 1.0;
    Tolerance tol;
    std::string notes;
};

/// Truth table only (no audit); evaluate() composes this with classify and
/// the physicality audit.
TruthTable relation_truth_table(const RelationSpec& spec,
                                const AssemblyState& rho);

DiscernmentReport evaluate(const RelationSpec& spec, const AssemblyState& rho);

// --- theorem verification ---------------------------------------------------

enum class TheoremId { T1, T2, T3, T4, T5, T6, SMS1, SMS2, SMS3 };

std::string theorem_name(TheoremId id);
std::optional<TheoremId> parse_theorem_id(const std::string& text);

struct TheoremConfig {
    std::vector<Index> lattice_sizes = {8};
    double spacing = 1.0;
    double hbar = 1.0;
    double spin = 0.5;
    std::vector<Index> family_dims = {2, 3};  // SMS1
    int particles = 3;                        // T5, T6
    int trials = 100;
    std::uint64_t seed = 0;
    double c_threshold = 1e-6;
    Tolerance tol;
};

struct TrialRecord {
    std::string group;  // e.g. "L=8 sector=full"
    int trial = 0;
    int x = 1;
    int y = 2;
    double witness = 0.0;
    bool holds = false;
    std::string branch;  // e.g. "Q" / "P" for the disjunction theorems
};

struct TheoremReport {
    TheoremId id = TheoremId::T1;
    bool pass = false;
    TheoremConfig config;
    std::vector<TrialRecord> records;
    std::vector<std::string> failures;
    std::string summary;
    std::string rng_algorithm;
};

TheoremReport verify_theorem(TheoremId id, const TheoremConfig& cfg);

// --- sampling ----------------------------------------------------------------

struct SampleRow {
    int trial = 0;
    int x = 1;
    int y = 2;
    double witness = 0.0;
    bool holds = false;
    Verdict verdict = Verdict::NotDiscerned;
};

struct SampleReport {
    RelationKind kind = RelationKind::Rprime;
    std::string quantity_name;
    Sector sector = Sector::Full;
    std::vector<Index> dims;
    std::uint64_t seed = 0;
    double hbar = 1.0;
    Tolerance tol;
    std::vector<SampleRow> rows;
    double min_witness = 0.0;
    double mean_witness = 0.0;
    double max_witness = 0.0;
    std::string rng_algorithm;
};

/// Evaluate a relation's witness distribution over seeded random states;
/// one row per trial and ordered pair. Statistics cover the off-diagonal
/// witnesses.
SampleReport sample_relation(const RelationSpec& spec, Sector sector,
                             std::uint64_t seed, int trials);

}  // namespace qdiscern

#endif
