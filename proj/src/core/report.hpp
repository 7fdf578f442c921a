#pragma once

#include <string>

#include "core/coding.hpp"
#include "core/graph.hpp"
#include "core/markov_operator.hpp"
#include "core/simulate.hpp"
#include "core/system.hpp"
#include "core/thermo.hpp"

namespace cms {

// Envelope shared by every machine-readable report:
//   {"tool": {"name", "version"}, "operation": ..., "params": {...}, ...body}
// Params deliberately exclude the thread count: reports are byte-identical
// across thread counts, and anything that cannot change the bytes stays out.
ojson report_envelope(const std::string& operation, ojson params);

ojson system_summary(const System& sys);

ojson violations_to_json(const ValidationReport& report);
ojson contraction_to_json(const System& sys, const ContractionReport& report);
ojson trace_to_json(const ConvergenceTrace& trace);
ojson decay_to_json(const DecayTable& table);
ojson pushforward_to_json(const PushforwardReport& report);
ojson cylinder_to_json(const CylinderEstimate& est);
ojson consistency_to_json(const CylinderConsistency& report);
ojson conditional_to_json(const ConditionalReport& report);
ojson oracle_to_json(const GMeasureOracle& oracle);
ojson ruelle_to_json(const RuelleReport& report);
ojson extension_to_json(const ExtensionReport& report);

std::string dump_report(const ojson& j);  // 2-space indent + newline

}  // namespace cms
