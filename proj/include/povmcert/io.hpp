#pragma once

// JSON and CSV formats of the library's data types.

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "povmcert/experiment.hpp"
#include "povmcert/fidelity.hpp"
#include "povmcert/optimize.hpp"
#include "povmcert/qubit.hpp"
#include "povmcert/robustness.hpp"
#include "povmcert/witness.hpp"

namespace povmcert {

using Json = nlohmann::ordered_json;

/// Shortest round-trip decimal representation.
std::string format_double(double v);

// Parsing functions throw std::invalid_argument on malformed input.

Json to_json(const Povm& p);
Povm povm_from_json(const Json& j);

Json to_json(const WitnessSpec& w);
/// Scenario sizes are taken from "n_preparations" / "binary_settings" when
/// present, otherwise inferred from the largest coefficient indices.
WitnessSpec witness_from_json(const Json& j);

Json to_json(const Strategy& s);
Json to_json(const BoundResult& b);
BoundResult bound_from_json(const Json& j);

Json to_json(const EnvelopeCurve& e);
EnvelopeCurve envelope_from_json(const Json& j);

Json to_json(const ExperimentConfig& c);
ExperimentConfig config_from_json(const Json& j);

Json to_json(const WitnessReport& r);

/// Header x,y,b,p,stderr; y is a binary setting index or "povm".
void write_table_csv(std::ostream& os, const ProbabilityTable& t);
ProbabilityTable read_table_csv(std::istream& is, const Scenario& scenario);

/// Header x,y,b,n; lines starting with '#' and blank lines are skipped.
void write_counts_csv(std::ostream& os, const std::vector<CountsRecord>& records);
std::vector<CountsRecord> read_counts_csv(std::istream& is);

/// Header sample_id,A,F.
void write_samples_csv(std::ostream& os, const std::vector<SamplePoint>& points);

/// Header k,bound_kind,bound,v_crit.
void write_curve_csv(std::ostream& os, const std::vector<VisibilityResult>& curve);

/// Reads a whole file; throws std::runtime_error when it cannot be opened.
std::string read_file(const std::string& path);
/// Writes a whole file; throws std::runtime_error on failure.
void write_file(const std::string& path, const std::string& contents);

}  // namespace povmcert
