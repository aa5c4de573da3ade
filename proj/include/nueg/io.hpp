#pragma once

#include "nueg/bounds.hpp"
#include "nueg/gas.hpp"
#include "nueg/geometry.hpp"
#include "nueg/sce.hpp"

#include "json.hpp"

#include <string>
#include <vector>

namespace nueg::io {

using Json = nlohmann::json;

Json to_json(const Point& p);
Json to_json(const Matrix& m);  // row-major nested arrays
Json to_json(const RieszCost& cost);
Json to_json(const periodic::PeriodicField& field);
Json to_json(const DiscreteDensity& rho);
Json to_json(const GCPlan& plan);
Json to_json(const geometry::Domain& domain);
Json to_json(const geometry::Tiling24& tiling);
Json to_json(const SolverSpec& solver);
Json to_json(const gas::QuadratureSpec& quad);
Json to_json(const EnergyReport& report, bool with_plan = true);
Json to_json(const gas::EnergyPerVolume& e);
Json to_json(const gas::ThermoSequence& seq);
Json to_json(const gas::TetraRateReport& r);
Json to_json(const gas::GrafSchenkerReport& r);
Json to_json(const gas::ScalingCheck& r);
Json to_json(const bounds::ConstantsTable& t);
Json to_json(const bounds::LDARhs& r);
Json to_json(const bounds::LDACheck& r);
Json to_json(const bounds::AprioriBounds& r);
Json to_json(const bounds::SemiclassicalBounds& r);
Json to_json(const bounds::FourierIdentity& r);
Json to_json(const bounds::SkeletonMean& r);
Json to_json(const bounds::MorreyCheck& r);

// Parsers validate their result and throw ValidationError.
RieszCost cost_from_json(const Json& j);
periodic::PeriodicField field_from_json(const Json& j);
DiscreteDensity density_from_json(const Json& j);
GCPlan plan_from_json(const Json& j);
// {"kind": "cube", "d", "side", "center"?} | {"kind": "tetrahedron", "scale"}
// | {"kind": "polytope", "vertices"}
geometry::Domain domain_from_json(const Json& j);

// Every invariant violation found in a field, density or plan document
// (detected by its "type" key). Empty when valid.
std::vector<std::string> validate_document(const Json& j);

Json read_json(const std::string& path);
// Pretty-printed with a trailing newline; keys sorted, so output is stable.
void write_json(const std::string& path, const Json& j);
std::string dump(const Json& j);

} // namespace nueg::io
