// Command-line front end: verify theorem suites, evaluate discernibility
// relations on state files, audit relation physicality, and sample witness
// distributions over seeded random states.
//
// Exit codes: 0 = evaluation completed (and, for verify, all checks passed),
// 1 = verify-suite failure, 2 = usage/config/file error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qdiscern/discernment.hpp"
#include "qdiscern/report_json.hpp"
#include "qdiscern/states.hpp"

namespace {

using namespace qdiscern;

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitUsage = 2;

void emit(const std::string& text, const std::string& output_path) {
    if (output_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(output_path, std::ios::binary);
    if (!out) throw Error("cannot open '" + output_path + "' for writing");
    out << text;
}

struct QuantityChoice {
    Operator op;
    std::string name;
};

QuantityChoice build_quantity(const std::string& name, Index dim, double spacing,
                              double hbar) {
    if (name == "Q" || name == "P") {
        const LatticeConfig lat{dim, spacing, hbar, true};
        return {name == "Q" ? lattice_position(lat) : lattice_momentum(lat), name};
    }
    if (name == "Sx" || name == "Sy" || name == "Sz") {
        const SpinConfig spin{(static_cast<double>(dim) - 1.0) / 2.0, hbar};
        const SpinOperators ops = spin_operators(spin);
        if (name == "Sx") return {ops.sx, name};
        if (name == "Sy") return {ops.sy, name};
        return {ops.sz, name};
    }
    throw ConfigError("unknown quantity '" + name +
                      "' (expected Q, P, Sx, Sy or Sz)");
}

struct CommandOptions {
    std::string theorem;
    std::string state_path;
    std::string relation = "Rprime";
    std::string quantity = "Q";
    std::string sector = "full";
    std::string audit_sector;  // empty: per-relation default
    std::string format = "text";
    std::string output;
    std::vector<long long> lattice_sites = {8};
    std::vector<long long> family_dims = {2, 3};
    double spacing = 1.0;
    double hbar = 1.0;
    double spin = 0.5;
    double t_value = -2.0;
    double threshold = 1e-6;
    int particles = 3;
    int trials = 100;
    std::uint64_t seed = 0;
    double tol_abs = 1e-10;
    double tol_rel = 1e-10;
};

Tolerance tolerance_of(const CommandOptions& opt) {
    return Tolerance{opt.tol_abs, opt.tol_rel};
}

RelationKind parse_relation(const std::string& name) {
    const auto kind = relation_from_name(name);
    if (!kind)
        throw ConfigError("unknown relation '" + name +
                          "' (expected Rt, C, T, Tprime, R, Rprime, Dprime or "
                          "DprimeP)");
    return *kind;
}

// Relation spec for a homogeneous assembly of n factors of dimension d.
RelationSpec build_spec(const CommandOptions& opt, RelationKind kind, Index d,
                        int n) {
    RelationSpec spec = make_relation_spec(kind);
    spec.tol = tolerance_of(opt);
    spec.t = opt.t_value;
    spec.c_threshold = opt.threshold;
    spec.n_particles = n;
    switch (kind) {
        case RelationKind::Rt:
            spec.family = standard_projector_family(d);
            break;
        case RelationKind::C:
        case RelationKind::Dprime:
        case RelationKind::DprimeP:
            spec.lattice = LatticeConfig{d, opt.spacing, opt.hbar, true};
            break;
        case RelationKind::T:
        case RelationKind::Tprime:
            spec.spin =
                SpinConfig{(static_cast<double>(d) - 1.0) / 2.0, opt.hbar};
            break;
        case RelationKind::R:
        case RelationKind::Rprime: {
            const QuantityChoice q =
                build_quantity(opt.quantity, d, opt.spacing, opt.hbar);
            spec.quantity = q.op;
            spec.quantity_name = q.name;
            break;
        }
    }
    if (!opt.audit_sector.empty())
        spec.audit_sector = sector_from_name(opt.audit_sector);
    return spec;
}

int run_verify(const CommandOptions& opt) {
    const auto id = parse_theorem_id(opt.theorem);
    if (!id) throw ConfigError("unknown theorem id '" + opt.theorem + "'");
    TheoremConfig cfg;
    cfg.lattice_sizes.assign(opt.lattice_sites.begin(), opt.lattice_sites.end());
    cfg.family_dims.assign(opt.family_dims.begin(), opt.family_dims.end());
    cfg.spacing = opt.spacing;
    cfg.hbar = opt.hbar;
    cfg.spin = opt.spin;
    cfg.particles = opt.particles;
    cfg.trials = opt.trials;
    cfg.seed = opt.seed;
    cfg.c_threshold = opt.threshold;
    cfg.tol = tolerance_of(opt);

    const TheoremReport report = verify_theorem(*id, cfg);
    if (opt.format == "json")
        emit(to_json(report).dump(2) + "\n", opt.output);
    else if (opt.format == "csv")
        emit(to_csv(report), opt.output);
    else
        emit(to_text(report), opt.output);
    return report.pass ? kExitOk : kExitVerifyFailed;
}

int run_discern(const CommandOptions& opt) {
    const RelationKind kind = parse_relation(opt.relation);
    const AssemblyState state = load_state(opt.state_path);
    if (!detail::dims_homogeneous(state.dims))
        throw ConfigError("relations need equal factor dimensions, state has not");
    const Index d = state.dims.front();
    const RelationSpec spec = build_spec(opt, kind, d, state.n_factors());
    const DiscernmentReport report = evaluate(spec, state);
    if (opt.format == "json")
        emit(to_json(report).dump(2) + "\n", opt.output);
    else if (opt.format == "text")
        emit(to_text(report), opt.output);
    else
        throw ConfigError("discern supports text or json output");
    return kExitOk;
}

int run_audit(const CommandOptions& opt) {
    const RelationKind kind = parse_relation(opt.relation);
    Index d = static_cast<Index>(opt.lattice_sites.front());
    if (kind == RelationKind::T || kind == RelationKind::Tprime ||
        ((kind == RelationKind::R || kind == RelationKind::Rprime) &&
         opt.quantity.front() == 'S'))
        d = static_cast<Index>(std::llround(2.0 * opt.spin)) + 1;
    const int n = (kind == RelationKind::Dprime || kind == RelationKind::DprimeP)
                      ? opt.particles
                      : 2;
    const RelationSpec spec = build_spec(opt, kind, d, n);
    const PhysicalityAudit audit = physicality_audit(spec);
    if (opt.format == "json")
        emit(to_json(audit).dump(2) + "\n", opt.output);
    else if (opt.format == "text")
        emit(to_text(audit), opt.output);
    else
        throw ConfigError("audit supports text or json output");
    return kExitOk;
}

int run_sample(const CommandOptions& opt) {
    if (opt.trials < 1) throw ConfigError("sample needs trials >= 1");
    const RelationKind kind = parse_relation(opt.relation);
    Index d = static_cast<Index>(opt.lattice_sites.front());
    if (kind == RelationKind::T || kind == RelationKind::Tprime ||
        ((kind == RelationKind::R || kind == RelationKind::Rprime) &&
         opt.quantity.front() == 'S'))
        d = static_cast<Index>(std::llround(2.0 * opt.spin)) + 1;
    const int n = (kind == RelationKind::Dprime || kind == RelationKind::DprimeP)
                      ? opt.particles
                      : 2;
    const RelationSpec spec = build_spec(opt, kind, d, n);
    const SampleReport report =
        sample_relation(spec, sector_from_name(opt.sector), opt.seed, opt.trials);
    if (opt.format == "json")
        emit(to_json(report).dump(2) + "\n", opt.output);
    else if (opt.format == "csv")
        emit(to_csv(report), opt.output);
    else
        emit(to_text(report), opt.output);
    return kExitOk;
}

void add_common_options(CLI::App* cmd, CommandOptions& opt) {
    cmd->add_option("--spacing", opt.spacing, "lattice spacing");
    cmd->add_option("--hbar", opt.hbar, "value of hbar");
    cmd->add_option("--seed", opt.seed, "RNG seed");
    cmd->add_option("--tol-abs", opt.tol_abs, "absolute tolerance");
    cmd->add_option("--tol-rel", opt.tol_rel, "relative tolerance");
    cmd->add_option("--format", opt.format, "output format (text|json|csv)");
    cmd->add_option("--output", opt.output, "output path (default stdout)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "discern: evaluate weak-discernibility relations on finite Hilbert "
        "spaces"};
    app.require_subcommand(1);
    CommandOptions opt;

    CLI::App* verify = app.add_subcommand(
        "verify", "run a theorem verification suite (exit 0 iff it passes)");
    verify->add_option("--theorem", opt.theorem, "theorem id: 1..6 or SMS1..SMS3")
        ->required();
    verify->add_option("--lattice-sites", opt.lattice_sites,
                       "lattice sizes to cover");
    verify->add_option("--family-dims", opt.family_dims,
                       "projector family dimensions (SMS1)");
    verify->add_option("--spin", opt.spin, "spin value (SMS3)");
    verify->add_option("--particles", opt.particles, "particle count (5, 6)");
    verify->add_option("--trials", opt.trials, "random trials per group");
    verify->add_option("--threshold", opt.threshold,
                       "commutator norm threshold (SMS2), scaled by hbar");
    add_common_options(verify, opt);

    CLI::App* discern = app.add_subcommand(
        "discern", "evaluate one relation on a state file (verdict is data)");
    discern->add_option("--state", opt.state_path, "state file path")->required();
    discern->add_option("--relation", opt.relation, "relation kind")->required();
    discern->add_option("--quantity", opt.quantity, "quantity for R/Rprime");
    discern->add_option("--t", opt.t_value, "eigenvalue parameter for Rt");
    discern->add_option("--threshold", opt.threshold,
                        "commutator norm threshold for C, scaled by hbar");
    discern->add_option("--audit-sector", opt.audit_sector,
                        "sector for the triviality audit");
    add_common_options(discern, opt);

    CLI::App* audit = app.add_subcommand(
        "audit", "report permutation invariance of a relation's building blocks");
    audit->add_option("--relation", opt.relation, "relation kind")->required();
    audit->add_option("--quantity", opt.quantity, "quantity for R/Rprime");
    audit->add_option("--lattice-sites", opt.lattice_sites, "lattice size");
    audit->add_option("--spin", opt.spin, "spin value for T/Tprime/S-quantities");
    audit->add_option("--particles", opt.particles, "particle count for Dprime");
    audit->add_option("--audit-sector", opt.audit_sector,
                      "sector for the triviality audit");
    add_common_options(audit, opt);

    CLI::App* sample = app.add_subcommand(
        "sample", "witness distribution of a relation over random states");
    sample->add_option("--relation", opt.relation, "relation kind");
    sample->add_option("--quantity", opt.quantity, "quantity for R/Rprime");
    sample->add_option("--trials", opt.trials, "number of random states");
    sample->add_option("--sector", opt.sector, "sector to sample from");
    sample->add_option("--lattice-sites", opt.lattice_sites, "lattice size");
    sample->add_option("--spin", opt.spin, "spin value");
    sample->add_option("--particles", opt.particles, "particle count for Dprime");
    sample->add_option("--t", opt.t_value, "eigenvalue parameter for Rt");
    sample->add_option("--threshold", opt.threshold, "threshold for C");
    add_common_options(sample, opt);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (opt.format != "text" && opt.format != "json" && opt.format != "csv")
            throw ConfigError("unknown format '" + opt.format + "'");
        if (app.got_subcommand(verify)) return run_verify(opt);
        if (app.got_subcommand(discern)) return run_discern(opt);
        if (app.got_subcommand(audit)) return run_audit(opt);
        if (app.got_subcommand(sample)) return run_sample(opt);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
