#include "qdiscern/report_json.hpp"

#include <cstdio>
#include <sstream>

namespace qdiscern {

using nlohmann::json;

std::string format_full(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

json tolerance_json(const Tolerance& tol) {
    return json{{"abs", tol.abs_tol}, {"rel", tol.rel_tol}};
}

json table_json(const TruthTable& table) {
    json rows = json::array();
    for (int x = 1; x <= table.n; ++x)
        for (int y = 1; y <= table.n; ++y) {
            const EvalResult& e = table.at(x, y);
            rows.push_back(json{{"x", x},
                                {"y", y},
                                {"holds", e.holds},
                                {"witness", e.witness}});
        }
    return rows;
}

}  // namespace

json to_json(const PhysicalityAudit& audit) {
    json blocks = json::array();
    for (const auto& b : audit.blocks)
        blocks.push_back(json{{"description", b.description},
                              {"permutation_invariant", b.permutation_invariant},
                              {"embedded_single", b.embedded_single}});
    return json{{"blocks", blocks},
                {"unphysical_building_blocks", audit.unphysical_building_blocks},
                {"trivial_multiple_of_identity", audit.trivial_multiple_of_identity},
                {"sector", sector_name(audit.sector)},
                {"overall", audit.overall()}};
}

json to_json(const DiscernmentReport& report) {
    return json{{"schema", "qdiscern-discernment-v1"},
                {"relation", relation_name(report.kind)},
                {"quantity", report.quantity_name},
                {"mode", mode_name(report.mode)},
                {"postulate", postulate_name(report.postulate)},
                {"lattice_analogue", report.lattice_analogue},
                {"particles", report.table.n},
                {"truth_table", table_json(report.table)},
                {"verdict", verdict_name(report.verdict)},
                {"audit", to_json(report.audit)},
                {"metadata",
                 json{{"hbar", report.hbar},
                      {"tolerance", tolerance_json(report.tol)},
                      {"notes", report.notes}}}};
}

json to_json(const TheoremReport& report) {
    json sizes = json::array();
    for (Index L : report.config.lattice_sizes) sizes.push_back(L);
    json dims = json::array();
    for (Index d : report.config.family_dims) dims.push_back(d);
    json records = json::array();
    for (const auto& r : report.records)
        records.push_back(json{{"group", r.group},
                               {"trial", r.trial},
                               {"x", r.x},
                               {"y", r.y},
                               {"witness", r.witness},
                               {"holds", r.holds},
                               {"branch", r.branch}});
    return json{{"schema", "qdiscern-theorem-v1"},
                {"theorem", theorem_name(report.id)},
                {"pass", report.pass},
                {"summary", report.summary},
                {"failures", report.failures},
                {"records", records},
                {"config",
                 json{{"lattice_sizes", sizes},
                      {"family_dims", dims},
                      {"spacing", report.config.spacing},
                      {"hbar", report.config.hbar},
                      {"spin", report.config.spin},
                      {"particles", report.config.particles},
                      {"trials", report.config.trials},
                      {"seed", report.config.seed},
                      {"c_threshold", report.config.c_threshold},
                      {"tolerance", tolerance_json(report.config.tol)}}},
                {"rng", report.rng_algorithm}};
}

json to_json(const SampleReport& report) {
    json rows = json::array();
    for (const auto& r : report.rows)
        rows.push_back(json{{"trial", r.trial},
                            {"x", r.x},
                            {"y", r.y},
                            {"witness", r.witness},
                            {"holds", r.holds},
                            {"verdict", verdict_name(r.verdict)}});
    json dims = json::array();
    for (Index d : report.dims) dims.push_back(d);
    return json{{"schema", "qdiscern-sample-v1"},
                {"relation", relation_name(report.kind)},
                {"quantity", report.quantity_name},
                {"sector", sector_name(report.sector)},
                {"dims", dims},
                {"seed", report.seed},
                {"hbar", report.hbar},
                {"tolerance", tolerance_json(report.tol)},
                {"rows", rows},
                {"summary",
                 json{{"min", report.min_witness},
                      {"mean", report.mean_witness},
                      {"max", report.max_witness}}},
                {"rng", report.rng_algorithm}};
}

std::string to_text(const PhysicalityAudit& audit) {
    std::ostringstream out;
    out << "physicality audit (sector: " << sector_name(audit.sector) << ")\n";
    for (const auto& b : audit.blocks)
        out << "  [" << (b.permutation_invariant ? "invariant" : "NOT invariant")
            << "] " << b.description << "\n";
    out << "overall: " << audit.overall() << "\n";
    return out.str();
}

std::string to_text(const DiscernmentReport& report) {
    std::ostringstream out;
    out << "relation " << relation_name(report.kind);
    if (!report.quantity_name.empty()) out << " (" << report.quantity_name << ")";
    out << ", " << mode_name(report.mode) << " mode, "
        << postulate_name(report.postulate) << " postulate\n";
    if (report.lattice_analogue) out << "note: lattice analogue\n";
    out << "truth table:\n";
    for (int x = 1; x <= report.table.n; ++x)
        for (int y = 1; y <= report.table.n; ++y) {
            const EvalResult& e = report.table.at(x, y);
            out << "  (" << x << "," << y << "): "
                << (e.holds ? "true " : "false") << "  witness "
                << format_full(e.witness) << "\n";
        }
    out << "verdict: " << verdict_name(report.verdict) << "\n";
    out << to_text(report.audit);
    return out.str();
}

std::string to_text(const TheoremReport& report) {
    std::ostringstream out;
    out << report.summary << "\n";
    for (const auto& f : report.failures) out << "failure: " << f << "\n";
    return out.str();
}

std::string to_text(const SampleReport& report) {
    std::ostringstream out;
    out << "sample of " << relation_name(report.kind);
    if (!report.quantity_name.empty()) out << " (" << report.quantity_name << ")";
    out << " over " << sector_name(report.sector) << "-sector states, seed "
        << report.seed << "\n";
    out << "off-diagonal witness: min " << format_full(report.min_witness)
        << "  mean " << format_full(report.mean_witness) << "  max "
        << format_full(report.max_witness) << "\n";
    return out.str();
}

std::string to_csv(const SampleReport& report) {
    std::ostringstream out;
    out << "trial,pair_x,pair_y,relation,witness,verdict\n";
    for (const auto& r : report.rows)
        out << r.trial << ',' << r.x << ',' << r.y << ','
            << relation_name(report.kind) << ',' << format_full(r.witness) << ','
            << verdict_name(r.verdict) << "\n";
    out << "# summary min=" << format_full(report.min_witness)
        << " mean=" << format_full(report.mean_witness)
        << " max=" << format_full(report.max_witness) << "\n";
    return out.str();
}

std::string to_csv(const TheoremReport& report) {
    std::ostringstream out;
    out << "group,trial,pair_x,pair_y,witness,holds,branch\n";
    for (const auto& r : report.records)
        out << '"' << r.group << "\"," << r.trial << ',' << r.x << ',' << r.y
            << ',' << format_full(r.witness) << ',' << (r.holds ? 1 : 0) << ','
            << r.branch << "\n";
    out << "# " << report.summary << "\n";
    return out.str();
}

}  // namespace qdiscern
