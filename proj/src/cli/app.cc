#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "document.h"
#include "dualrep/bronsted.h"
#include "dualrep/cli.h"
#include "dualrep/conjugate.h"
#include "dualrep/cyclic.h"
#include "dualrep/exposed.h"
#include "dualrep/reconstruct.h"
#include "dualrep/subdifferential.h"

namespace dualrep::cli {
namespace {

constexpr std::uint64_t kDefaultSeed = 42;

struct Options {
  std::string input;
  std::string out;
  std::string tol;
  std::string seed;
  std::string dual;
  std::string method;
  std::string at;
  std::string y;
  std::string base;
  std::string grid;
  std::string eval;
  std::string mode = "full";
  std::vector<std::string> grids;
  bool multivalued = false;
  bool sampled = false;
  double eps = 0.0;
  double beta = 0.0;
  std::size_t trials = 10000;
  std::size_t probes = 64;
  CLI::Option* eps_opt = nullptr;
  CLI::Option* beta_opt = nullptr;
};

struct Settings {
  std::uint64_t seed;
  ToleranceProfile tol;
};

struct Result {
  std::string text;
  bool falsified;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  return out;
}

double parse_double(const std::string& s, const std::string& what) {
  const char* begin = s.c_str();
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0' || errno == ERANGE || !std::isfinite(v)) {
    throw InputError(what + ": cannot parse '" + s + "' as a number");
  }
  return v;
}

ToleranceProfile parse_tolerance(const std::string& text) {
  const auto parts = split(text, ',');
  if (parts.empty() || parts.size() > 2) {
    throw InputError("--tol: expected 'eq' or 'eq,strict'");
  }
  ToleranceProfile tol;
  tol.eq_tol = parse_double(parts[0], "--tol");
  tol.strict_tol = parts.size() == 2 ? parse_double(parts[1], "--tol")
                                     : std::min(tol.strict_tol, tol.eq_tol);
  tol.validate();
  return tol;
}

std::uint64_t parse_seed(const std::string& text) {
  const char* begin = text.c_str();
  char* end = nullptr;
  errno = 0;
  const unsigned long long v = std::strtoull(begin, &end, 10);
  if (end == begin || *end != '\0' || errno == ERANGE || text.front() == '-') {
    throw InputError("seed: cannot parse '" + text + "'");
  }
  return v;
}

// Command line first, then DUALREP_SEED / DUALREP_TOL, then defaults.
Settings resolve(const Options& o) {
  Settings s{kDefaultSeed, {}};
  if (!o.seed.empty()) {
    s.seed = parse_seed(o.seed);
  } else if (const char* e = std::getenv("DUALREP_SEED"); e && *e) {
    s.seed = parse_seed(e);
  }
  if (!o.tol.empty()) {
    s.tol = parse_tolerance(o.tol);
  } else if (const char* e = std::getenv("DUALREP_TOL"); e && *e) {
    s.tol = parse_tolerance(e);
  }
  return s;
}

Vector parse_vector(const std::string& text, const std::string& what) {
  std::vector<double> c;
  for (const std::string& part : split(text, ',')) c.push_back(parse_double(part, what));
  if (c.empty()) throw InputError(what + ": empty vector");
  return Vector(std::move(c));
}

Json meta(const Document& in, const Settings& s) {
  Json m = Json::object();
  m["input_digest"] = in.digest;
  m["seed"] = s.seed;
  Json t = Json::object();
  t["eq_tol"] = s.tol.eq_tol;
  t["strict_tol"] = s.tol.strict_tol;
  m["tolerance"] = std::move(t);
  return m;
}

Result finish(const char* command, const Document& in, const Settings& s, Json result,
              bool falsified) {
  Json r = Json::object();
  r["kind"] = "report";
  r["version"] = kDocumentVersion;
  r["command"] = command;
  r["meta"] = meta(in, s);
  r["status"] = falsified ? "falsified" : "ok";
  r["result"] = std::move(result);
  return {dump(r), falsified};
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InputError(path + ": cannot open for writing");
  f << text;
  if (!f) throw InputError(path + ": write failed");
}

Json indices_json(const std::vector<std::size_t>& v) {
  Json a = Json::array();
  for (std::size_t i : v) a.push_back(i);
  return a;
}

Json cycle_json(const CycleCertificate& c) {
  Json j = Json::object();
  j["verdict"] = c.verdict == CycleVerdict::kViolated ? "violated" : "cyclically_monotone";
  if (c.verdict == CycleVerdict::kViolated) {
    j["cycle"] = indices_json(c.cycle);
    j["cycle_sum"] = *c.cycle_sum;
  }
  return j;
}

Json pair_json(const std::optional<DualPair>& p) {
  if (!p) return nullptr;
  Json j = Json::object();
  j["xstar"] = vector_json(p->xstar);
  j["x"] = vector_json(p->x);
  return j;
}

Json checks_json(const std::vector<BoundCheck>& checks) {
  Json a = Json::array();
  for (const BoundCheck& c : checks) {
    Json j = Json::object();
    j["name"] = c.name;
    j["pass"] = c.pass;
    j["value"] = c.value;
    j["bound"] = c.bound;
    j["margin"] = c.margin;
    a.push_back(std::move(j));
  }
  return a;
}

Json membership_json(const EpsMembershipCertificate& c) {
  Json j = Json::object();
  j["gap"] = ext_json(c.gap);
  j["eps"] = c.eps;
  j["verdict"] = c.verdict == Membership::kMember ? "member" : "nonmember";
  return j;
}

Vector find_node(const std::vector<Vector>& nodes, const std::string& base,
                 const ToleranceProfile& tol, std::size_t* index) {
  const std::size_t d = nodes.front().size();
  const Vector target = base.empty() ? Vector::zeros(d) : parse_vector(base, "--base");
  if (target.size() != d) throw InputError("--base: dimension mismatch");
  std::size_t best = 0;
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    if (distance(nodes[i], target) < distance(nodes[best], target)) best = i;
  }
  if (!base.empty() &&
      distance(nodes[best], target) > tol.strict_tol * std::max(1.0, norm(target))) {
    throw InputError("--base " + target.to_string() + " is not a dual grid node");
  }
  *index = best;
  return nodes[best];
}

std::vector<Vector> interior_nodes(const MaxAffineFunction& g, const std::string& spec,
                                   const ToleranceProfile& tol) {
  std::vector<Vector> out;
  for (Vector& p : tensor_grid(GridSpec::parse(spec), g.dim(), tol)) {
    if (g.in_interior(p)) out.push_back(std::move(p));
  }
  if (out.empty()) throw InputError("--grid " + spec + " has no node interior to dom g");
  return out;
}

Result cmd_conjugate(const Options& o, const Settings& s) {
  const Document in = load_document(o.input);
  Json r = Json::object();
  bool falsified = false;
  if (in.kind == "grid_function") {
    const GridFunction1D f = to_grid_function(in.body);
    const BiconjugateReport bic = biconjugate_check(f, s.tol);
    const std::vector<double> dual =
        o.dual.empty() ? bic.dual_grid : GridSpec::parse(o.dual).points(s.tol);
    ConjugateMethod method = ConjugateMethod::kFast1D;
    if (o.method == "brute") {
      method = ConjugateMethod::kBrute;
    } else if (!o.method.empty() && o.method != "fast1d") {
      throw InputError("--method: expected brute or fast1d for a grid function");
    }
    const ConjugateReport rep = conjugate_report(f, dual, method);
    const auto& fstar = std::get<GridFunction1D>(rep.dual_values);
    const bool young_ok = rep.max_young_violation <= s.tol.strict_tol;
    const bool bic_ok = bic.max_excess <= s.tol.eq_tol && bic.equality_points == bic.envelope_points;
    r["method"] = method == ConjugateMethod::kBrute ? "brute" : "fast1d";
    r["dual_xs"] = fstar.xs();
    r["values"] = fstar.values();
    r["max_young_violation"] = rep.max_young_violation;
    Json b = Json::object();
    b["dual_grid"] = bic.dual_grid;
    b["values"] = bic.biconjugate.values();
    b["max_excess"] = bic.max_excess;
    b["equality_points"] = indices_json(bic.equality_points);
    b["envelope_points"] = indices_json(bic.envelope_points);
    b["holds"] = bic_ok;
    r["biconjugate"] = std::move(b);
    falsified = !young_ok || !bic_ok;
  } else if (in.kind == "max_affine") {
    const MaxAffineFunction f = to_max_affine(in.body);
    if (o.dual.empty()) throw InputError("conjugate: --dual is required for max_affine input");
    const MaxAffineConjugate conj = conjugate_max_affine(f, s.tol);
    r["method"] = "exact_maxaffine";
    r["bounded_box"] = conj.bounded();
    Json vals = Json::array();
    bool consistent = true;
    for (const Vector& y : tensor_grid(GridSpec::parse(o.dual), f.dim(), s.tol)) {
      Json e = Json::object();
      e["y"] = vector_json(y);
      e["value"] = ext_json(conj(y));
      if (conj.bounded()) {
        const DenseGridCheck c = conj.cross_check(y);
        e["grid_lower_bound"] = c.grid_lower_bound;
        consistent = consistent && c.consistent;
      }
      vals.push_back(std::move(e));
    }
    r["values"] = std::move(vals);
    if (conj.bounded()) {
      r["vertices"] = conj.vertices().size();
      r["grid_consistent"] = consistent;
    }
    falsified = !consistent;
  } else {
    throw InputError(o.input + ": conjugate expects grid_function or max_affine, got '" +
                     in.kind + "'");
  }
  return finish("conjugate", in, s, std::move(r), falsified);
}

Result cmd_subdiff(const Options& o, const Settings& s) {
  const Document in = load_document(o.input);
  const MaxAffineFunction f = to_max_affine(in.body);
  if (o.at.empty()) throw InputError("subdiff: --at is required");
  const Vector x = parse_vector(o.at, "--at");
  const SubdiffSet sd = subdiff(f, x, s.tol);
  Json r = Json::object();
  r["at"] = vector_json(x);
  r["value"] = ext_json(evaluate(f, x));
  Json gens = Json::array();
  for (const Vector& g : sd.generators) gens.push_back(vector_json(g));
  r["generators"] = std::move(gens);
  r["pieces"] = indices_json(sd.pieces);
  Json dd = Json::array();
  for (std::size_t i = 0; i < f.dim(); ++i) {
    for (double sign : {1.0, -1.0}) {
      const Vector u = Vector::unit(f.dim(), i, sign);
      Json e = Json::object();
      e["u"] = vector_json(u);
      e["value"] = directional_derivative(f, x, u, s.tol);
      dd.push_back(std::move(e));
    }
  }
  r["directional_derivatives"] = std::move(dd);
  bool falsified = false;
  if (!o.y.empty()) {
    const Vector y = parse_vector(o.y, "--y");
    const MaxAffineConjugate conj = conjugate_max_affine(f, s.tol);
    const DualitySwapReport swap = duality_swap_check(f, conj, x, y, o.eps, s.tol);
    r["y"] = vector_json(y);
    r["membership"] = membership_json(swap.primal);
    Json sw = Json::object();
    sw["dual"] = membership_json(swap.dual);
    sw["gap_difference"] = swap.gap_difference;
    sw["gaps_equal"] = swap.gaps_equal;
    sw["verdicts_agree"] = swap.verdicts_agree;
    r["duality_swap"] = std::move(sw);
    falsified = !swap.verdicts_agree || !swap.gaps_equal;
  }
  return finish("subdiff", in, s, std::move(r), falsified);
}

Result cmd_check_cyclic(const Options& o, const Settings& s) {
  const Document in = load_document(o.input);
  const OperatorSample sample = to_operator_sample(in.body);
  const CycleCertificate mono = check_monotone(sample, s.tol);
  const CycleCertificate cyc = check_cyclic(sample, s.tol);
  Json r = Json::object();
  r["pairs"] = sample.size();
  r["monotone"] = cycle_json(mono);
  r["cyclic"] = cycle_json(cyc);
  return finish("check-cyclic", in, s, std::move(r), cyc.verdict == CycleVerdict::kViolated);
}

Result cmd_build_h(const Options& o, const Settings& s, std::string* h_text) {
  const Document in = load_document(o.input);
  OperatorSample sample = to_operator_sample(in.body);
  if (!o.base.empty()) {
    sample = sample.with_base(static_cast<std::size_t>(parse_seed(o.base)));
  }
  Json r = Json::object();
  r["base"] = sample.base();
  try {
    const AntiderivativeResult res = build_antiderivative(sample, s.tol);
    const InclusionReport inc = check_graph_inclusion(sample, res.h, s.seed, o.probes, s.tol);
    Json h = from_max_affine(res.h);
    h["meta"] = meta(in, s);
    r["chain_values"] = res.chain_values;
    r["h_at_base"] = evaluate(res.h, sample[sample.base()].xstar).value();
    Json i = Json::object();
    i["worst_slack"] = inc.worst_slack;
    i["worst_pair"] = inc.worst_pair;
    i["probes"] = inc.probes;
    i["holds"] = inc.holds;
    r["inclusion"] = std::move(i);
    if (o.out.empty()) {
      r["h"] = std::move(h);
    } else {
      r["h_path"] = o.out;
      *h_text = dump(h);
    }
    return finish("build-h", in, s, std::move(r), !inc.holds);
  } catch (const NotCyclicallyMonotone& e) {
    r["refused"] = "sample is not cyclically monotone";
    r["certificate"] = cycle_json(e.certificate());
    return finish("build-h", in, s, std::move(r), true);
  }
}

Result cmd_reconstruct(const Options& o, const Settings& s) {
  const Document in = load_document(o.input);
  const MaxAffineFunction g = to_max_affine(in.body);
  if (o.grid.empty() || o.eval.empty()) {
    throw InputError("reconstruct: --grid and --eval are required");
  }
  ReconstructMode mode = ReconstructMode::kFull;
  if (o.mode == "exposed") {
    mode = ReconstructMode::kExposedOnly;
  } else if (o.mode != "full") {
    throw InputError("--mode: expected full or exposed");
  }
  const std::vector<Vector> nodes = interior_nodes(g, o.grid, s.tol);
  std::size_t base = 0;
  find_node(nodes, o.base, s.tol, &base);
  const std::vector<Vector> eval = tensor_grid(GridSpec::parse(o.eval), g.dim(), s.tol);
  const ReconstructionReport rep = reconstruct(g, nodes, base, eval, mode, o.multivalued, s.tol);

  std::ostringstream csv;
  csv << "# dualrep reconstruct\n"
      << "# input_digest=" << in.digest << "\n"
      << "# seed=" << s.seed << "\n"
      << "# eq_tol=" << format_number(s.tol.eq_tol)
      << " strict_tol=" << format_number(s.tol.strict_tol) << "\n"
      << "# mode=" << to_string(mode) << " multivalued=" << (o.multivalued ? "true" : "false")
      << " base=" << nodes[base].to_string() << "\n"
      << "# grid=" << GridSpec::parse(o.grid).to_string()
      << " dual_points=" << rep.dual_points.size() << " pairs=" << rep.sample.size() << "\n"
      << "# sup_gap=" << format_number(rep.sup_gap) << "\n"
      << "# lower_bound_holds=" << (rep.lower_bound_holds ? "true" : "false") << "\n";
  if (g.dim() == 1) {
    csv << "y";
  } else {
    for (std::size_t i = 0; i < g.dim(); ++i) csv << (i ? "," : "") << "y" << i + 1;
  }
  csv << ",g,h,gap\n";
  for (std::size_t k = 0; k < eval.size(); ++k) {
    for (std::size_t i = 0; i < g.dim(); ++i) csv << (i ? "," : "") << format_number(eval[k][i]);
    csv << "," << format_number(rep.g_values[k]) << "," << format_number(rep.h_values[k])
        << "," << format_number(rep.true_minus_h[k]) << "\n";
  }
  return {csv.str(), !rep.lower_bound_holds};
}

Result cmd_exposed(const Options& o, const Settings& s) {
  const Document in = load_document(o.input);
  Json r = Json::object();
  if (in.kind == "body") {
    const PointBody c = to_body(in.body);
    const bool sampled = o.sampled || c.dim() > kMaxExactExpDim;
    const ExpPointsResult e =
        exp_points(c, sampled ? ExpMode::kSampled : ExpMode::kExact, s.seed, 1000, s.tol);
    Json ej = Json::object();
    ej["mode"] = sampled ? "sampled" : "exact";
    ej["approximate"] = e.approximate;
    ej["indices"] = indices_json(e.indices);
    Json pts = Json::array();
    for (std::size_t i : e.indices) pts.push_back(vector_json(c.points()[i]));
    ej["points"] = std::move(pts);
    r["exp_points"] = std::move(ej);
    const DensityReport d = density_check(c, o.trials, s.seed, s.tol);
    Json dj = Json::object();
    dj["trials"] = d.trials;
    dj["exposing"] = d.exposing;
    dj["fraction"] = d.fraction;
    r["density"] = std::move(dj);
  } else if (in.kind == "grid_function") {
    const GridFunction1D g = to_grid_function(in.body);
    const ExpGResult e = exp_g(g, s.tol);
    r["indices"] = indices_json(e.indices);
    r["exposing_slopes"] = e.exposing_slopes;
  } else if (in.kind == "max_affine") {
    r["epi_pointed"] = is_epi_pointed(to_max_affine(in.body));
  } else {
    throw InputError(o.input + ": exposed expects body, grid_function or max_affine, got '" +
                     in.kind + "'");
  }
  return finish("exposed", in, s, std::move(r), false);
}

SearchOptions search_options(const Json& body) {
  SearchOptions so;
  auto it = body.find("search");
  if (it == body.end()) return so;
  expect_keys(*it, {"levels", "factor", "points_per_axis", "constructive_candidates",
                    "hull_points_per_edge"},
              "experiment.search");
  auto count = [&](const char* key, std::size_t& dst) {
    if (auto f = it->find(key); f != it->end()) {
      if (!f->is_number_integer() || f->get<long long>() < 0) {
        throw InputError(std::string("experiment.search.") + key + ": expected an integer");
      }
      dst = f->get<std::size_t>();
    }
  };
  count("levels", so.levels);
  count("points_per_axis", so.points_per_axis);
  count("hull_points_per_edge", so.hull_points_per_edge);
  if (auto f = it->find("factor"); f != it->end()) {
    so.factor = to_number(*f, "experiment.search.factor");
  }
  if (auto f = it->find("constructive_candidates"); f != it->end()) {
    if (!f->is_boolean()) throw InputError("experiment.search.constructive_candidates: expected a boolean");
    so.constructive_candidates = f->get<bool>();
  }
  return so;
}

Result cmd_bronsted(const Options& o, const Settings& s) {
  const Document in = load_document(o.input);
  if (in.kind != "experiment") {
    throw InputError(o.input + ": bronsted expects an experiment document, got '" + in.kind + "'");
  }
  const Json& b = in.body;
  auto need = [&](const char* key) -> const Json& {
    auto it = b.find(key);
    if (it == b.end()) throw InputError(std::string("experiment: missing field '") + key + "'");
    return *it;
  };
  const Json& ver = need("version");
  if (!ver.is_number_integer() || ver.get<long long>() != kDocumentVersion) {
    throw InputError("experiment: unsupported version");
  }
  const Json& kind = need("experiment");
  if (!kind.is_string()) throw InputError("experiment.experiment: expected a string");
  const std::string ex = kind.get<std::string>();
  const MaxAffineFunction g = to_max_affine(need("function"));
  const SearchOptions so = search_options(b);
  auto vec = [&](const char* key) { return to_vector(need(key), std::string("experiment.") + key); };
  auto num = [&](const char* key, const CLI::Option* flag, double flag_value) {
    if (flag && flag->count() > 0) return flag_value;
    return to_number(need(key), std::string("experiment.") + key);
  };

  Json r = Json::object();
  r["experiment"] = ex;
  bool falsified = false;
  if (ex == "t0") {
    expect_keys(b, {"kind", "version", "meta", "experiment", "function", "search", "xstar0", "x0", "eps"},
                "experiment");
    const RefineReport rep = t0_refine(g, vec("xstar0"), vec("x0"), num("eps", o.eps_opt, o.eps), so, s.tol);
    r["found"] = pair_json(rep.found);
    r["xstar_distance"] = rep.xstar_distance;
    r["x_distance"] = rep.x_distance;
    r["bound"] = rep.bound;
    r["input_gap"] = rep.input_gap;
    r["outcome"] = to_string(rep.outcome);
    r["grid"] = rep.grid;
    r["candidates"] = rep.candidates;
    falsified = rep.outcome != SearchOutcome::kSuccess;
  } else if (ex == "t1") {
    expect_keys(b, {"kind", "version", "meta", "experiment", "function", "search", "xstar0", "x0", "eps", "beta"},
                "experiment");
    const BorweinCertificate c = t1_refine(g, vec("xstar0"), vec("x0"), num("eps", o.eps_opt, o.eps),
                                           num("beta", o.beta_opt, o.beta), s.seed, so, s.tol);
    r["eps"] = c.eps;
    r["beta"] = c.beta;
    r["found"] = pair_json(c.found);
    r["bounds"] = checks_json(c.bounds);
    r["valid"] = c.valid;
    r["rechecked"] = c.rechecked;
    r["sampled_v_agrees"] = c.sampled_v_agrees;
    r["probes"] = c.probes;
    r["outcome"] = to_string(c.outcome);
    r["grid"] = c.grid;
    r["candidates"] = c.candidates;
    falsified = !c.valid || !c.rechecked;
  } else if (ex == "l1" || ex == "l2") {
    LemmaResult res = [&] {
      if (ex == "l1") {
        expect_keys(b, {"kind", "version", "meta", "experiment", "function", "search", "xstar0", "alpha", "beta"},
                    "experiment");
        return l1_search(g, vec("xstar0"), num("alpha", nullptr, 0.0),
                         num("beta", o.beta_opt, o.beta), so, s.tol);
      }
      expect_keys(b, {"kind", "version", "meta", "experiment", "function", "search", "xstar"},
                  "experiment");
      return l2_search(g, vec("xstar"), so, s.tol);
    }();
    if (res.outcome == SearchOutcome::kBoundaryOnly) {
      throw UnsupportedInput(ex + ": every interior subgradient has norm >= alpha; "
                             "the pair would need normal-cone functionals at the box boundary");
    }
    r["found"] = pair_json(res.found);
    r["checks"] = checks_json(res.checks);
    r["infimum"] = res.infimum;
    r["outcome"] = to_string(res.outcome);
    r["grid"] = res.grid;
    r["candidates"] = res.candidates;
    falsified = res.outcome != SearchOutcome::kSuccess;
  } else if (ex == "density") {
    expect_keys(b, {"kind", "version", "meta", "experiment", "function", "search", "region", "trials", "eps"},
                "experiment");
    const Json& reg = need("region");
    if (!reg.is_array() || reg.size() != g.dim()) {
      throw InputError("experiment.region: expected one [lo, hi] per dimension");
    }
    MaxAffineFunction::Box region;
    for (std::size_t i = 0; i < reg.size(); ++i) {
      const Vector iv = to_vector(reg[i], "experiment.region[" + std::to_string(i) + "]");
      if (iv.size() != 2) throw InputError("experiment.region: expected [lo, hi]");
      region.push_back({iv[0], iv[1]});
    }
    const Json& tr = need("trials");
    if (!tr.is_number_integer() || tr.get<long long>() < 1) {
      throw InputError("experiment.trials: expected a positive integer");
    }
    const DensityProbeReport d = density_probe(g, region, tr.get<std::size_t>(),
                                               num("eps", o.eps_opt, o.eps), s.seed, so, s.tol);
    r["trials"] = d.trials;
    r["successes"] = d.successes;
    r["grid_resolution"] = d.grid_resolution;
    r["falsified"] = d.falsified;
    r["fraction"] = d.fraction;
    falsified = d.falsified > 0;
  } else {
    throw InputError("experiment: unknown experiment '" + ex + "' (t0, t1, l1, l2, density)");
  }
  return finish("bronsted", in, s, std::move(r), falsified);
}

Result cmd_convergence(const Options& o, const Settings& s) {
  const Document in = load_document(o.input);
  const MaxAffineFunction g = to_max_affine(in.body);
  if (o.grids.empty() || o.eval.empty()) {
    throw InputError("convergence: at least one --grid and --eval are required");
  }
  std::vector<GridSpec> specs;
  for (const std::string& t : o.grids) specs.push_back(GridSpec::parse(t));
  const Vector base = o.base.empty() ? Vector::zeros(g.dim()) : parse_vector(o.base, "--base");
  const std::vector<Vector> eval = tensor_grid(GridSpec::parse(o.eval), g.dim(), s.tol);
  const ConvergenceReport rep = convergence_study(g, specs, base, eval, o.multivalued, s.tol);
  Json r = Json::object();
  r["base"] = vector_json(base);
  r["multivalued"] = o.multivalued;
  Json rows = Json::array();
  for (const ConvergenceRow& row : rep.rows) {
    Json j = Json::object();
    j["spacing"] = row.spacing;
    j["dual_points"] = row.dual_points;
    j["sup_gap"] = row.sup_gap;
    rows.push_back(std::move(j));
  }
  r["rows"] = std::move(rows);
  r["nonincreasing"] = rep.nonincreasing;
  return finish("convergence", in, s, std::move(r), !rep.nonincreasing);
}

void add_common(CLI::App* sub, Options& o, bool with_out = true) {
  sub->add_option("input", o.input, "input document")->required();
  if (with_out) sub->add_option("--out", o.out, "write the report here instead of stdout");
  sub->add_option("--tol", o.tol, "tolerances 'eq[,strict]' (env DUALREP_TOL)");
  sub->add_option("--seed", o.seed, "random seed (env DUALREP_SEED)");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Subdifferential representation experiments for max-affine functions",
               "dualrep"};
  app.require_subcommand(1, 1);
  Options o;

  auto* conj = app.add_subcommand("conjugate", "Legendre-Fenchel transform and biconjugate check");
  add_common(conj, o);
  conj->add_option("--dual", o.dual, "dual grid lo:hi:step");
  conj->add_option("--method", o.method, "brute or fast1d (grid functions)");

  auto* sub = app.add_subcommand("subdiff", "subdifferential, eps-membership and duality swap");
  add_common(sub, o);
  sub->add_option("--at", o.at, "point x, comma separated");
  sub->add_option("--y", o.y, "candidate subgradient y");
  sub->add_option("--eps", o.eps, "eps >= 0");

  auto* cyc = app.add_subcommand("check-cyclic", "cyclic monotonicity with a witness cycle");
  add_common(cyc, o);

  auto* bh = app.add_subcommand("build-h", "chain antiderivative of an operator sample");
  add_common(bh, o);
  bh->add_option("--base", o.base, "base pair index");
  bh->add_option("--probes", o.probes, "random probes for the inclusion check");

  auto* rec = app.add_subcommand("reconstruct", "rebuild g from a subdifferential sample (CSV)");
  add_common(rec, o);
  rec->add_option("--grid", o.grid, "dual sample grid lo:hi:step");
  rec->add_option("--eval", o.eval, "evaluation grid lo:hi:step");
  rec->add_option("--base", o.base, "base dual point (default: node nearest 0)");
  rec->add_flag("--multivalued", o.multivalued, "one pair per active slope");
  rec->add_option("--mode", o.mode, "full or exposed");

  auto* exp = app.add_subcommand("exposed", "strongly exposed points and density check");
  add_common(exp, o);
  exp->add_option("--trials", o.trials, "random directions for the density check");
  exp->add_flag("--sampled", o.sampled, "sampled instead of exact exp_points");

  auto* br = app.add_subcommand("bronsted", "t0, t1, l1, l2 and density experiments");
  add_common(br, o);
  o.eps_opt = br->add_option("--eps", o.eps, "override eps");
  o.beta_opt = br->add_option("--beta", o.beta, "override beta");

  auto* conv = app.add_subcommand("convergence", "sup gap along refining grids");
  add_common(conv, o);
  conv->add_option("--grid", o.grids, "dual grid lo:hi:step (repeat)");
  conv->add_option("--eval", o.eval, "evaluation grid lo:hi:step");
  conv->add_option("--base", o.base, "base dual point (default 0)");
  conv->add_flag("--multivalued", o.multivalued, "one pair per active slope");

  std::vector<std::string> argv_store{"dualrep"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const std::string& a : argv_store) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInputError;
  }

  try {
    const Settings s = resolve(o);
    Result res;
    std::string h_text;
    bool to_stdout_only = false;
    if (conj->parsed()) {
      res = cmd_conjugate(o, s);
    } else if (sub->parsed()) {
      res = cmd_subdiff(o, s);
    } else if (cyc->parsed()) {
      res = cmd_check_cyclic(o, s);
    } else if (bh->parsed()) {
      res = cmd_build_h(o, s, &h_text);
      to_stdout_only = true;
    } else if (rec->parsed()) {
      res = cmd_reconstruct(o, s);
    } else if (exp->parsed()) {
      res = cmd_exposed(o, s);
    } else if (br->parsed()) {
      res = cmd_bronsted(o, s);
    } else {
      res = cmd_convergence(o, s);
    }
    // build-h uses --out for the h document; its report always goes to stdout.
    if (!h_text.empty()) write_file(o.out, h_text);
    if (o.out.empty() || to_stdout_only) {
      out << res.text;
    } else {
      write_file(o.out, res.text);
    }
    return res.falsified ? kExitFalsified : kExitOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace dualrep::cli
