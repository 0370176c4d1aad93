#include "document.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <vector>

namespace dualrep::cli {
namespace {

std::string position(std::string_view text, std::size_t byte) {
  std::size_t line = 1, column = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  // nlohmann reports the byte after the offending character.
  if (column > 1) --column;
  return std::to_string(line) + ":" + std::to_string(column);
}

const Json& field(const Json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw InputError(where + ": missing field '" + key + "'");
  return *it;
}

std::size_t to_index(const Json& j, const std::string& where) {
  if (!j.is_number_integer() || j.get<long long>() < 0) {
    throw InputError(where + ": expected a nonnegative integer");
  }
  return j.get<std::size_t>();
}

double to_bound(const Json& j, const std::string& where) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    throw InputError(where + ": expected a number, \"inf\" or \"-inf\"");
  }
  if (!j.is_number()) throw InputError(where + ": expected a number");
  const double v = j.get<double>();
  if (std::isnan(v)) throw InputError(where + ": NaN bound");
  return v;
}

Json bound_json(double v) {
  if (std::isinf(v)) return v > 0 ? Json("inf") : Json("-inf");
  return v;
}

void check_header(const Json& doc, const char* kind) {
  if (!doc.is_object()) throw InputError("document must be a JSON object");
  const Json& k = field(doc, "kind", "document");
  if (!k.is_string() || k.get<std::string>() != kind) {
    throw InputError(std::string("expected a document of kind '") + kind + "'");
  }
  const Json& v = field(doc, "version", "document");
  if (!v.is_number_integer() || v.get<long long>() != kDocumentVersion) {
    throw InputError("unsupported document version (expected " +
                     std::to_string(kDocumentVersion) + ")");
  }
  if (auto it = doc.find("meta"); it != doc.end() && !it->is_object()) {
    throw InputError("meta must be an object");
  }
}

std::size_t check_dim(const Json& doc, const std::string& where) {
  const std::size_t d = to_index(field(doc, "dim", where), where + ".dim");
  if (d == 0) throw InputError(where + ".dim: must be >= 1");
  return d;
}

Vector sized_vector(const Json& j, std::size_t dim, const std::string& where) {
  Vector v = to_vector(j, where);
  if (v.size() != dim) {
    throw InputError(where + ": expected " + std::to_string(dim) + " coordinates");
  }
  return v;
}

Json header(const char* kind) {
  Json j = Json::object();
  j["kind"] = kind;
  j["version"] = kDocumentVersion;
  return j;
}

void write(std::ostringstream& os, const Json& j, int indent) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  const std::string inner(static_cast<std::size_t>(indent + 1) * 2, ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        return;
      }
      os << "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) os << ",\n";
        first = false;
        os << inner << Json(it.key()).dump() << ": ";
        write(os, it.value(), indent + 1);
      }
      os << "\n" << pad << "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        os << "[]";
        return;
      }
      // Flat numeric arrays stay on one line.
      const bool flat = std::all_of(j.begin(), j.end(), [](const Json& e) {
        return e.is_number() || e.is_string();
      });
      if (flat) {
        os << "[";
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) os << ", ";
          write(os, j[i], indent + 1);
        }
        os << "]";
        return;
      }
      os << "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) os << ",\n";
        os << inner;
        write(os, j[i], indent + 1);
      }
      os << "\n" << pad << "]";
      return;
    }
    case Json::value_t::number_float:
      os << format_number(j.get<double>());
      return;
    default:
      os << j.dump();
      return;
  }
}

}  // namespace

Document parse_document(std::string_view text, const std::string& source) {
  // Track keys per open object so duplicates are rejected.
  std::vector<std::set<std::string>> keys;
  std::string duplicate;
  auto cb = [&](int /*depth*/, Json::parse_event_t ev, Json& parsed) {
    switch (ev) {
      case Json::parse_event_t::object_start:
        keys.emplace_back();
        break;
      case Json::parse_event_t::object_end:
        keys.pop_back();
        break;
      case Json::parse_event_t::key:
        if (!keys.back().insert(parsed.get<std::string>()).second && duplicate.empty()) {
          duplicate = parsed.get<std::string>();
        }
        break;
      default:
        break;
    }
    return true;
  };
  Json j;
  try {
    j = Json::parse(text.begin(), text.end(), cb);
  } catch (const Json::parse_error& e) {
    std::string msg = e.what();
    if (auto p = msg.find(": "); p != std::string::npos) msg = msg.substr(p + 2);
    throw InputError(source + ":" + position(text, e.byte) + ": " + msg);
  }
  if (!duplicate.empty()) throw InputError(source + ": duplicate key '" + duplicate + "'");
  if (!j.is_object()) throw InputError(source + ": document must be a JSON object");
  auto k = j.find("kind");
  if (k == j.end() || !k->is_string()) throw InputError(source + ": missing string field 'kind'");
  return {k->get<std::string>(), std::move(j), source, digest(text)};
}

Document load_document(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_document(ss.str(), path);
}

void expect_keys(const Json& obj, std::initializer_list<std::string_view> allowed,
                 const std::string& where) {
  if (!obj.is_object()) throw InputError(where + ": expected an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (std::string_view a : allowed) ok = ok || it.key() == a;
    if (!ok) throw InputError(where + ": unknown field '" + it.key() + "'");
  }
}

double to_number(const Json& j, const std::string& where) {
  if (!j.is_number()) throw InputError(where + ": expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw InputError(where + ": expected a finite number");
  return v;
}

Vector to_vector(const Json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw InputError(where + ": expected a nonempty array");
  std::vector<double> c;
  for (std::size_t i = 0; i < j.size(); ++i) {
    c.push_back(to_number(j[i], where + "[" + std::to_string(i) + "]"));
  }
  return Vector(std::move(c));
}

Json vector_json(const Vector& v) {
  Json a = Json::array();
  for (double c : v) a.push_back(c);
  return a;
}

Json ext_json(const ExtReal& v) {
  if (!v.is_finite()) return "inf";
  return v.value();
}

MaxAffineFunction to_max_affine(const Json& doc) {
  check_header(doc, "max_affine");
  expect_keys(doc, {"kind", "version", "meta", "dim", "pieces", "box"}, "max_affine");
  const std::size_t d = check_dim(doc, "max_affine");
  const Json& pieces = field(doc, "pieces", "max_affine");
  if (!pieces.is_array() || pieces.empty()) {
    throw InputError("max_affine.pieces: expected a nonempty array");
  }
  std::vector<AffinePiece> out;
  for (std::size_t k = 0; k < pieces.size(); ++k) {
    const std::string where = "max_affine.pieces[" + std::to_string(k) + "]";
    expect_keys(pieces[k], {"slope", "intercept"}, where);
    out.push_back({sized_vector(field(pieces[k], "slope", where), d, where + ".slope"),
                   to_number(field(pieces[k], "intercept", where), where + ".intercept")});
  }
  std::optional<MaxAffineFunction::Box> box;
  if (auto it = doc.find("box"); it != doc.end()) {
    if (!it->is_array() || it->size() != d) {
      throw InputError("max_affine.box: expected " + std::to_string(d) + " intervals");
    }
    box.emplace();
    for (std::size_t i = 0; i < d; ++i) {
      const std::string where = "max_affine.box[" + std::to_string(i) + "]";
      const Json& iv = (*it)[i];
      if (!iv.is_array() || iv.size() != 2) throw InputError(where + ": expected [lo, hi]");
      box->push_back({to_bound(iv[0], where), to_bound(iv[1], where)});
    }
  }
  return MaxAffineFunction(std::move(out), std::move(box));
}

GridFunction1D to_grid_function(const Json& doc) {
  check_header(doc, "grid_function");
  expect_keys(doc, {"kind", "version", "meta", "xs", "values"}, "grid_function");
  const Vector xs = to_vector(field(doc, "xs", "grid_function"), "grid_function.xs");
  const Vector vs = to_vector(field(doc, "values", "grid_function"), "grid_function.values");
  return GridFunction1D({xs.begin(), xs.end()}, {vs.begin(), vs.end()});
}

OperatorSample to_operator_sample(const Json& doc) {
  check_header(doc, "operator_sample");
  expect_keys(doc, {"kind", "version", "meta", "dim", "pairs", "base"}, "operator_sample");
  const std::size_t d = check_dim(doc, "operator_sample");
  const Json& pairs = field(doc, "pairs", "operator_sample");
  if (!pairs.is_array() || pairs.empty()) {
    throw InputError("operator_sample.pairs: expected a nonempty array");
  }
  std::vector<DualPair> out;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const std::string where = "operator_sample.pairs[" + std::to_string(k) + "]";
    expect_keys(pairs[k], {"xstar", "x"}, where);
    out.push_back({sized_vector(field(pairs[k], "xstar", where), d, where + ".xstar"),
                   sized_vector(field(pairs[k], "x", where), d, where + ".x")});
  }
  std::size_t base = 0;
  if (auto it = doc.find("base"); it != doc.end()) base = to_index(*it, "operator_sample.base");
  return OperatorSample(std::move(out), base);
}

PointBody to_body(const Json& doc) {
  check_header(doc, "body");
  expect_keys(doc, {"kind", "version", "meta", "dim", "points"}, "body");
  const std::size_t d = check_dim(doc, "body");
  const Json& pts = field(doc, "points", "body");
  if (!pts.is_array() || pts.empty()) throw InputError("body.points: expected a nonempty array");
  std::vector<Vector> out;
  for (std::size_t k = 0; k < pts.size(); ++k) {
    out.push_back(sized_vector(pts[k], d, "body.points[" + std::to_string(k) + "]"));
  }
  return PointBody(std::move(out));
}

Json from_max_affine(const MaxAffineFunction& f) {
  Json j = header("max_affine");
  j["dim"] = f.dim();
  Json pieces = Json::array();
  for (const AffinePiece& p : f.pieces()) {
    Json pj = Json::object();
    pj["slope"] = vector_json(p.slope);
    pj["intercept"] = p.intercept;
    pieces.push_back(std::move(pj));
  }
  j["pieces"] = std::move(pieces);
  if (f.box()) {
    Json box = Json::array();
    for (const Interval& iv : *f.box()) box.push_back(Json::array({bound_json(iv.lo), bound_json(iv.hi)}));
    j["box"] = std::move(box);
  }
  return j;
}

Json from_grid_function(const GridFunction1D& g) {
  Json j = header("grid_function");
  j["xs"] = g.xs();
  j["values"] = g.values();
  return j;
}

Json from_operator_sample(const OperatorSample& s) {
  Json j = header("operator_sample");
  j["dim"] = s.dim();
  Json pairs = Json::array();
  for (const DualPair& p : s.pairs()) {
    Json pj = Json::object();
    pj["xstar"] = vector_json(p.xstar);
    pj["x"] = vector_json(p.x);
    pairs.push_back(std::move(pj));
  }
  j["pairs"] = std::move(pairs);
  j["base"] = s.base();
  return j;
}

Json from_body(const PointBody& c) {
  Json j = header("body");
  j["dim"] = c.dim();
  Json pts = Json::array();
  for (const Vector& p : c.points()) pts.push_back(vector_json(p));
  j["points"] = std::move(pts);
  return j;
}

std::string format_number(double v) {
  if (v == 0.0) return "0";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string dump(const Json& j) {
  std::ostringstream os;
  write(os, j, 0);
  os << "\n";
  return os.str();
}

std::string digest(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "fnv1a64:%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace dualrep::cli
