#pragma once

#include <string>
#include <string_view>

#include "mompoly/certificates.hpp"
#include "mompoly/measures.hpp"
#include "mompoly/problem.hpp"
#include "mompoly/pseudo_moments.hpp"

namespace mompoly {

class IoError : public Error {
 public:
  using Error::Error;
};

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

// {"n", "name", "S1", "S2", "rules", "binary", "independence", "objective", "sense",
//  "order", "cone", "mode", "perturbation", "M", "epsilon"}.  Variables in "binary"
// and "independence" are 1-based.  Malformed input throws SpecError.
ProblemSpec parse_spec(std::string_view json_text);
ProblemSpec load_spec(const std::string& path);
// Rules are written out one by one, so the result reparses to the same spec.
std::string spec_to_json(const ProblemSpec& spec);

// {"label", "n", "target", "rules", "binary", "blocks": [{"tag", "constraint", "G", "v"}]}
GramCertificate parse_certificate(std::string_view json_text);
GramCertificate load_certificate(const std::string& path);
std::string certificate_to_json(const GramCertificate& cert);

// {"atoms": [[...]], "weights": ["p/q", ...]}
FiniteMeasure parse_measure(std::string_view json_text);
std::string measure_to_json(const FiniteMeasure& mu);

// {"n", "degree", "values": {"x1^2": "1/3", ...}}
TruncatedFunctional parse_functional(std::string_view json_text);
std::string functional_to_json(const TruncatedFunctional& L);

}  // namespace mompoly
