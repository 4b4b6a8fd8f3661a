#ifndef HAARDY_JSON_IO_HPP
#define HAARDY_JSON_IO_HPP

#include <string>

#include <json.hpp>

#include "haardy/game.hpp"

namespace haardy {

using Json = nlohmann::json;

// Parses a file, turning parse failures into JsonError with byte/line
// location and missing files into JsonError as well.
Json load_json(const std::string& path);

Json to_json(const Rat& x);          // number when lossless, else "p/q"
Rat rat_from_json(const Json& j, const std::string& where);

Json to_json(const StepFun& f);
StepFun stepfun_from_json(const Json& j, const std::string& where = "stepfun");

Json to_json(const Expansion& e);
Expansion expansion_from_json(const Json& j, const std::string& where = "expansion");

Json to_json(const SpaceSpec& sp);
SpaceSpec space_from_json(const Json& j, const std::string& where = "space");

Json to_json(const HaarMultiplier& D);
HaarMultiplier multiplier_from_json(const Json& j, const std::string& where = "multiplier");

Json to_json(const OpMatrix& m);
OpMatrix matrix_from_json(const Json& j, const std::string& where = "matrix");

Json to_json(const FaithfulSystem& sys);
FaithfulSystem faithful_from_json(const Json& j, const std::string& where = "system");

Json to_json(const NormValue& v);
Json to_json(const NormCertificate& c);
Json to_json(const FactorizationWitness& w);
Json to_json(const WitnessReport& r);
Json to_json(const SystemReport& r);
Json to_json(const RandomizedSystem& rs);
Json to_json(const StabilizeResult& r);
Json to_json(const Theorem3Result& r);
Json to_json(const ProbStats& s);
Json to_json(const GameTranscript& t);
Json to_json(const ImpartialReport& r);
Json to_json(const ReducePositiveResult& r);
Json to_json(const UpperTauReport& r);
Json to_json(const StoppingReport& r);

AdversaryScript adversary_from_json(const Json& j, const std::string& where = "adversary");

}  // namespace haardy

#endif
