#pragma once

// Serialization. Distributions use {dim, arity, entries: [[index..., weight]]};
// set files hold one element per line with a `dim=n` header and `#` comments.

#include <iosfwd>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "pfr/cover.hpp"
#include "pfr/descent.hpp"
#include "pfr/dist.hpp"
#include "pfr/endgame.hpp"
#include "pfr/fibring.hpp"
#include "pfr/group.hpp"
#include "pfr/ruzsa.hpp"

namespace pfr::io {

using nlohmann::json;

/// Raised on malformed input files.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

json to_json(const Dist& x);
json to_json(const JointDist& j);
Dist dist_from_json(const json& j);
JointDist joint_from_json(const json& j);

/// Dense weight vector, separated by commas or whitespace; length 2^n.
Dist read_dist_csv(std::istream& in);
SetInput read_set(std::istream& in);
void write_set(std::ostream& out, const SetInput& a);

/// Dist from a JSON file, a set file (uniform on the set) or a CSV file.
Dist load_dist(const std::string& path);
SetInput load_set(const std::string& path);
std::string read_file(const std::string& path);

json to_json(const SubgroupBasis& h);
SubgroupBasis subgroup_from_json(const json& j);

json to_json(const IneqReport& r);
json to_json(const FibringReport& r);
json to_json(const BsgReport& r);
json to_json(const EndgameTables& t, bool include_table = true);
json to_json(const Move& m);
json to_json(const TraceStep& s);
json to_json(const MinimizerDiagnostics& d);
json to_json(const DescentState& st);
json to_json(const SubgroupCertificate& c);
json to_json(const CosetCover& c);

}  // namespace pfr::io
