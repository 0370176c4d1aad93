// JSON documents read and written by the command-line tool.
//
// Every document is an object with "kind" and "version" (currently 1) and an
// optional free-form "meta" object. Unknown or duplicate keys are rejected.
// Infinite box bounds are written as the strings "inf" and "-inf"; so are
// +inf conjugate values in reports. Numbers are written with 17 significant
// digits so binary64 values survive a round trip.

#ifndef DUALREP_CLI_DOCUMENT_H_
#define DUALREP_CLI_DOCUMENT_H_

#include <cstdint>
#include <string>
#include <string_view>

#include "dualrep/core.h"
#include "dualrep/exposed.h"
#include "json.hpp"

namespace dualrep::cli {

using Json = nlohmann::ordered_json;

inline constexpr int kDocumentVersion = 1;

struct Document {
  std::string kind;
  Json body;
  std::string source;  // file name, for diagnostics
  std::string digest;  // of the raw bytes
};

// Syntax errors are reported as InputError("source:line:column: ...").
Document parse_document(std::string_view text, const std::string& source);
Document load_document(const std::string& path);

MaxAffineFunction to_max_affine(const Json& doc);
GridFunction1D to_grid_function(const Json& doc);
OperatorSample to_operator_sample(const Json& doc);
PointBody to_body(const Json& doc);

Json from_max_affine(const MaxAffineFunction& f);
Json from_grid_function(const GridFunction1D& g);
Json from_operator_sample(const OperatorSample& s);
Json from_body(const PointBody& c);

Json vector_json(const Vector& v);
Json ext_json(const ExtReal& v);
Vector to_vector(const Json& j, const std::string& where);
double to_number(const Json& j, const std::string& where);

// Throws InputError when `obj` has a key outside `allowed`.
void expect_keys(const Json& obj, std::initializer_list<std::string_view> allowed,
                 const std::string& where);

// %.17g, with -0 printed as 0.
std::string format_number(double v);
// Two-space indented, keys in insertion order, trailing newline.
std::string dump(const Json& j);

// "fnv1a64:" followed by 16 hex digits.
std::string digest(std::string_view bytes);

}  // namespace dualrep::cli

#endif  // DUALREP_CLI_DOCUMENT_H_
