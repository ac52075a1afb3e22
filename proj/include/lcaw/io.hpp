#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "lcaw/construction.hpp"
#include "lcaw/transform.hpp"

namespace lcaw {

using Json = nlohmann::ordered_json;

// Schema violation in an input file; the message names the file, line and field.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// "Q_5", "F_3((t))", "Q_2(sqrt2)", "Q_3(3^(1/2))"; short forms "Q5", "F3" are accepted.
Group parse_field(const std::string& name);
Group parse_group(const std::vector<std::string>& fields);
std::vector<std::string> field_names(const Group& g);

struct Config {
  std::string source;
  AlgorithmInput input;
  RunOptions options;
};

Config parse_config(const std::string& text, const std::string& source = "<config>");
Config load_config(const std::string& path);

// Group, automorphism and coset scheme.
Json scheme_to_json(const CosetScheme& D);
SchemePtr scheme_from_json(const Json& j);

// Array of {center, scale}.
Json ballset_to_json(const BallSet& X);
BallSet ballset_from_json(const Json& j, const GeometryPtr& g);

Json rational_json(const Rational& q);
Rational rational_from_json(const Json& j);

Json result_to_json(const ConstructionResult& r);

// Data read back from a construction result.
struct StoredResult {
  SchemePtr scheme;
  int M = 0;
  int m = 0;
  std::vector<BallSet> omega;
  std::vector<BallSet> envelope;
  Rational residual;
  // Limit sets pinned down by identify_limits; empty when none were found.
  std::vector<BallSet> identified;
};
StoredResult result_from_json(const Json& j);

struct VerifyOptions {
  int n0 = -4, n1 = 4;
  int gram_a0 = -2, gram_a1 = 2;
  long gram_reps = 0;
  bool exact = false;
  int threads = 1;
  // Check the identified limit sets (exactly) rather than the truncated ones, when present.
  bool use_identified = true;
};

struct VerifyOutcome {
  Json report;
  bool ok = false;
};
VerifyOutcome verify_result(const StoredResult& r, const VerifyOptions& opts);

// Values: {re, im} as numbers, plus the exact form when `exact`.
Json scalar_to_json(const ExactScalar& v, bool exact);
ExactScalar scalar_from_json(const Json& j);
Json cyclo_to_json(const Cyclo& v, bool exact);
Cyclo cyclo_from_json(const Json& j);

Json signal_to_json(const FiniteSignal& f, bool exact);
FiniteSignal signal_from_json(const Json& j, const GeometryPtr& g);
std::string signal_to_csv(const FiniteSignal& f);
FiniteSignal signal_from_csv(const std::string& text, const GeometryPtr& g, int L, int K);

Json coefficients_to_json(const Basis& B, const std::vector<ExactScalar>& c, int L, int K, bool exact);
std::vector<ExactScalar> coefficients_from_json(const Json& j, const Basis& B);

struct RenderStyle {
  int depth = 3;
  // Child to parent radius ratio; zero means |A|^(-1/2).
  double radius_ratio = 0;
  double size = 800;
};

struct RenderStats {
  std::size_t circles = 0;
  std::size_t filled = 0;
};

// Nested circles for the balls of the smallest origin ball holding every set, `depth` levels down.
std::string render_svg(const std::vector<BallSet>& sets, const RenderStyle& style, RenderStats* stats = nullptr);

std::string read_file(const std::string& path);
void write_output(const std::string& path, const std::string& text);

}  // namespace lcaw
