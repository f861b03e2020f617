#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "simplexflow/dynamics.hpp"
#include "simplexflow/energy.hpp"
#include "simplexflow/kernel.hpp"
#include "simplexflow/measure.hpp"
#include "simplexflow/minimize.hpp"
#include "simplexflow/transport.hpp"
#include "simplexflow/verify.hpp"

namespace simplexflow {

using Json = nlohmann::json;

/// Finite doubles become numbers; inf and nan become the strings "inf",
/// "-inf" and "nan" so nothing is silently turned into null.
Json number(double x);
double number_from(const Json& j);

Json vector_json(const Vector& v);
Json points_json(const PointSet& p);

/// {"dim": d, "points": [[...], ...], "weights": [...]}; weights default to
/// uniform when absent on input.
Json measure_json(const DiscreteMeasure& mu);
DiscreteMeasure measure_from_json(const Json& j);

Json params_json(const PowerLawParams& params);
Json flow_config_json(const FlowConfig& cfg);
Json minimize_config_json(const MinimizeConfig& cfg);
Json perturbation_config_json(const PerturbationConfig& cfg);

Json report_json(const EnergyReport& r);
Json report_json(const EulerLagrangeResidual& r);
Json report_json(const CouplingPlan& plan);
Json report_json(const TransportResult& r);
Json report_json(const FlowTrace& trace);
Json report_json(const MinimizerReport& r);
Json report_json(const CandidateEnergies& c);
Json report_json(const MaxVarianceResult& r);
Json report_json(const IsodiametricReport& r);
Json report_json(const VertexPotentialReport& r);
Json report_json(const LocalMinReport& r);
Json report_json(const ThresholdEstimate& r);
Json report_json(const GammaReport& r);
Json report_json(const std::vector<JungRow>& rows);

/// "t,E" rows for plotting.
std::string flow_trace_csv(const FlowTrace& trace);

/// Output documents are {"command": str, "config": obj, "result": obj|array}.
/// Returns the list of problems (empty when valid).
std::vector<std::string> validate_output_document(const Json& doc);

/// Canonical text form: two-space indent, trailing newline.
std::string dump(const Json& j);

}  // namespace simplexflow
