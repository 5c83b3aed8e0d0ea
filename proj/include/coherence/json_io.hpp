#pragma once

#include <nlohmann/json.hpp>

#include "coherence/convertibility.hpp"
#include "coherence/measures.hpp"
#include "coherence/oracle.hpp"
#include "coherence/states.hpp"
#include "coherence/synthesis.hpp"

// JSON interchange used by the CLI.
//   complex number  two-element array [re, im]
//   pure state      {"dim": d, "amplitudes": [[re, im], ...]}
//   ensemble        {"dim": d, "members": [{"weight": w, "state": ...}, ...]}
//   channel         {"dim": d, "kraus": [<matrix>, ...]}, matrix row-major
//   measure         {"kind": "tail"|"capped", "l": int, "k": double?}
//   verdict         {"convertible": bool, "violations": [{"l","k","lhs","rhs"}]}
// Doubles are emitted in shortest round-trip form, so parsing an emitted
// document reproduces every value bit for bit.

namespace coherence {

nlohmann::json complex_to_json(const Cx& c);
nlohmann::json matrix_to_json(const Mat& m);
nlohmann::json state_to_json(const PureState& psi);
nlohmann::json ensemble_to_json(const Ensemble& ens);
nlohmann::json channel_to_json(const IncoherentChannel& phi);
nlohmann::json raw_channel_to_json(int dim, const std::vector<Mat>& kraus);
nlohmann::json measure_to_json(const MeasureId& m);
nlohmann::json verdict_to_json(const ConversionVerdict& v);
nlohmann::json transition_to_json(const TransitionMatrix& t);
nlohmann::json plan_to_json(const EnsembleMapPlan& plan);
nlohmann::json report_to_json(const oracle::TransformationReport& rep);
nlohmann::json fuzz_report_to_json(const oracle::FuzzReport& rep);

// Same shape as ensemble_to_json with every double also rendered as a C99
// hex-float string, so near-tolerance fuzz counterexamples reproduce exactly.
nlohmann::json ensemble_to_hex_json(const Ensemble& ens);

// Parsers validate shape and construct through the checked types; malformed
// input raises std::invalid_argument (or nlohmann's parse exceptions).
Cx complex_from_json(const nlohmann::json& j);
Mat matrix_from_json(const nlohmann::json& j, int dim);
PureState state_from_json(const nlohmann::json& j);
Ensemble ensemble_from_json(const nlohmann::json& j);
MeasureId measure_from_json(const nlohmann::json& j);

// Channels parse into raw form first so validity checking (and reporting of
// invalid channels) is the caller's decision.
struct RawChannel {
  int dim = 0;
  std::vector<Mat> kraus;
};
RawChannel raw_channel_from_json(const nlohmann::json& j);

}  // namespace coherence
