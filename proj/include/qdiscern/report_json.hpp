#ifndef QDISCERN_REPORT_JSON_HPP
#define QDISCERN_REPORT_JSON_HPP

#include <string>

#include <json.hpp>

#include "qdiscern/discernment.hpp"

namespace qdiscern {

// Machine-readable report schemas. Keys are emitted in sorted order and
// doubles round-trip exactly, so equal reports serialize to equal bytes.

nlohmann::json to_json(const PhysicalityAudit& audit);
nlohmann::json to_json(const DiscernmentReport& report);
nlohmann::json to_json(const TheoremReport& report);
nlohmann::json to_json(const SampleReport& report);

std::string to_text(const DiscernmentReport& report);
std::string to_text(const TheoremReport& report);
std::string to_text(const SampleReport& report);
std::string to_text(const PhysicalityAudit& audit);

/// trial, pair_x, pair_y, relation, witness, verdict rows plus a trailing
/// min/mean/max summary comment.
std::string to_csv(const SampleReport& report);
std::string to_csv(const TheoremReport& report);

/// %.17g: shortest text that reparses to the identical double.
std::string format_full(double v);

}  // namespace qdiscern

#endif
