#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli/document.h"
#include "doctest.h"
#include "dualrep/cli.h"

using namespace dualrep;
using namespace dualrep::cli;

namespace {

const std::string kCorpus = DUALREP_CORPUS_DIR;

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string corpus(const std::string& name) { return kCorpus + "/" + name; }

std::string temp_file(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / ("dualrep_test_" + name);
  std::ofstream(path) << text;
  return path.string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("documents round-trip") {
  const MaxAffineFunction f({{{1.0, -2.5}, 0.1}, {{0.0, 3.0}, -7.0}},
                            MaxAffineFunction::Box{{-1, 1}, {0, 2}});
  const std::string text = dump(from_max_affine(f));
  const Document d = parse_document(text, "mem");
  const MaxAffineFunction back = to_max_affine(d.body);
  CHECK(back.pieces() == f.pieces());
  CHECK(*back.box() == *f.box());
  CHECK(dump(from_max_affine(back)) == text);

  const OperatorSample s({{{0.1}, {1.0 / 3.0}}, {{2.0}, {-1.0}}}, 1);
  const OperatorSample sb = to_operator_sample(parse_document(dump(from_operator_sample(s)), "m").body);
  CHECK(sb.pairs() == s.pairs());
  CHECK(sb.base() == 1);

  const GridFunction1D g({0, 0.1, 0.7}, {1e-300, 2, -3});
  const GridFunction1D gb = to_grid_function(parse_document(dump(from_grid_function(g)), "m").body);
  CHECK(gb.values() == g.values());
  CHECK(gb.xs() == g.xs());

  const PointBody c({{0, 1}, {2, 3}});
  CHECK(to_body(parse_document(dump(from_body(c)), "m").body).points() == c.points());
}

TEST_CASE("infinite box bounds") {
  const double inf = std::numeric_limits<double>::infinity();
  const MaxAffineFunction f({{{1.0}, 0.0}}, MaxAffineFunction::Box{{-inf, 4}});
  const std::string text = dump(from_max_affine(f));
  CHECK(text.find("\"-inf\"") != std::string::npos);
  CHECK((*to_max_affine(parse_document(text, "m").body).box())[0].lo == -inf);
}

TEST_CASE("strict parsing") {
  CHECK_THROWS_WITH_AS(
      parse_document("{\"kind\": \"body\",\n \"kind\": \"body\"}", "dup.json"),
      doctest::Contains("duplicate key 'kind'"), InputError);
  const Document d = parse_document(
      R"({"kind": "body", "version": 1, "dim": 1, "points": [[0]], "colour": 3})", "x");
  CHECK_THROWS_WITH_AS(to_body(d.body), doctest::Contains("unknown field 'colour'"), InputError);
  const Document v = parse_document(R"({"kind": "body", "version": 2, "dim": 1, "points": [[0]]})", "x");
  CHECK_THROWS_AS(to_body(v.body), InputError);
  CHECK_THROWS_AS(to_max_affine(d.body), InputError);
  CHECK_THROWS_WITH_AS(load_document(corpus("malformed.json")),
                       doctest::Contains("malformed.json:5:"), InputError);
  const Document m = parse_document(
      R"({"kind": "body", "version": 1, "meta": {"note": "x"}, "dim": 1, "points": [[0]]})", "x");
  CHECK_NOTHROW(to_body(m.body));
}

TEST_CASE("number formatting") {
  CHECK(format_number(0.1) == "0.10000000000000001");
  CHECK(format_number(-0.0) == "0");
  CHECK(format_number(2) == "2");
  CHECK(digest("abc") == digest("abc"));
  CHECK(digest("abc") != digest("abd"));
  CHECK(digest("").rfind("fnv1a64:", 0) == 0);
}

TEST_CASE("exit codes") {
  auto r = invoke({"check-cyclic", corpus("swapped_pair.json")});
  CHECK(r.code == kExitFalsified);
  CHECK(r.out.find("\"cycle_sum\": -1") != std::string::npos);
  CHECK(r.out.find("\"status\": \"falsified\"") != std::string::npos);

  r = invoke({"check-cyclic", corpus("quadratic_sample.json")});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("\"status\": \"ok\"") != std::string::npos);

  CHECK(invoke({"conjugate", corpus("malformed.json")}).code == kExitInputError);
  CHECK(invoke({"conjugate", corpus("does_not_exist.json")}).code == kExitInputError);
  CHECK(invoke({"frobnicate"}).code == kExitInputError);
  CHECK(invoke({}).code == kExitInputError);
  CHECK(invoke({"--help"}).code == kExitOk);
  CHECK(invoke({"subdiff", corpus("abs_box.json"), "--at", "5"}).code == kExitInputError);
  CHECK(invoke({"reconstruct", corpus("abs_box.json"), "--grid", "-2:2"}).code == kExitInputError);
}

TEST_CASE("build-h writes the antiderivative") {
  const auto path = std::filesystem::temp_directory_path() / "dualrep_test_h.json";
  const auto r = invoke({"build-h", corpus("abs_kink_sample.json"), "--base", "0", "--out",
                      path.string()});
  REQUIRE(r.code == kExitOk);
  const MaxAffineFunction h = to_max_affine(load_document(path.string()).body);
  CHECK(h.pieces() == std::vector<AffinePiece>{{{1.0}, 0.0}, {{-1.0}, 0.0}});
  CHECK(r.out.find("\"holds\": true") != std::string::npos);

  const auto bad = invoke({"build-h", corpus("swapped_pair.json")});
  CHECK(bad.code == kExitFalsified);
  CHECK(bad.out.find("not cyclically monotone") != std::string::npos);
}

TEST_CASE("reconstruct csv") {
  const auto r = invoke({"reconstruct", corpus("abs_box.json"), "--grid", "-2:2:0.5", "--eval",
                      "-1:1:0.1", "--multivalued"});
  REQUIRE(r.code == kExitOk);
  CHECK(r.out.find("# sup_gap=0\n") != std::string::npos);
  CHECK(r.out.find("\ny,g,h,gap\n") != std::string::npos);
  std::size_t rows = 0;
  std::istringstream in(r.out);
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line[0] != '#' && line[0] != 'y') ++rows;
  }
  CHECK(rows == 21);

  const auto two = invoke({"reconstruct", corpus("max_xy_box.json"), "--grid", "-0.5:0.5:0.5",
                        "--eval", "-0.5:0.5:0.5"});
  CHECK(two.code == kExitOk);
  CHECK(two.out.find("y1,y2,g,h,gap") != std::string::npos);
}

TEST_CASE("seed and tolerance resolution") {
  auto r = invoke({"exposed", corpus("square_body.json"), "--trials", "10"});
  CHECK(r.out.find("\"seed\": 42") != std::string::npos);
  ::setenv("DUALREP_SEED", "9", 1);
  ::setenv("DUALREP_TOL", "1e-6", 1);
  r = invoke({"exposed", corpus("square_body.json"), "--trials", "10"});
  CHECK(r.out.find("\"seed\": 9") != std::string::npos);
  CHECK(r.out.find("\"eq_tol\": 9.9999999999999995e-07") != std::string::npos);
  r = invoke({"exposed", corpus("square_body.json"), "--trials", "10", "--seed", "5", "--tol",
           "1e-8,1e-13"});
  CHECK(r.out.find("\"seed\": 5") != std::string::npos);
  CHECK(r.out.find("\"strict_tol\": 1e-13") != std::string::npos);
  ::unsetenv("DUALREP_SEED");
  ::unsetenv("DUALREP_TOL");
  CHECK(invoke({"exposed", corpus("square_body.json"), "--seed", "x"}).code == kExitInputError);
  CHECK(invoke({"exposed", corpus("square_body.json"), "--tol", "1e-12,1e-9"}).code ==
        kExitInputError);
}

TEST_CASE("reports go to --out") {
  const auto path = std::filesystem::temp_directory_path() / "dualrep_test_report.json";
  const auto r = invoke({"subdiff", corpus("abs_box.json"), "--at", "0", "--out", path.string()});
  CHECK(r.code == kExitOk);
  CHECK(r.out.empty());
  CHECK(slurp(path.string()).find("\"generators\": [") != std::string::npos);
}

TEST_CASE("bronsted experiments") {
  auto r = invoke({"bronsted", corpus("t1_quadratic.json")});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("\"valid\": true") != std::string::npos);
  r = invoke({"bronsted", corpus("t0_coarse.json")});
  CHECK(r.code == kExitFalsified);
  CHECK(r.out.find("grid_resolution") != std::string::npos);
  // an eps too small for the input pair is a precondition failure
  r = invoke({"bronsted", corpus("t0_quadratic.json"), "--eps", "1e-9"});
  CHECK(r.code == kExitInputError);
  const std::string bad = temp_file(
      "bad_experiment.json",
      R"({"kind": "experiment", "version": 1, "experiment": "t9", "function": {}})");
  CHECK(invoke({"bronsted", bad}).code == kExitInputError);
}

TEST_CASE("same seed, same bytes") {
  for (const auto& args : std::vector<std::vector<std::string>>{
           {"bronsted", corpus("density_abs.json"), "--seed", "3"},
           {"exposed", corpus("cube_body_4d.json"), "--trials", "300"},
           {"build-h", corpus("quadratic_sample.json")}}) {
    CHECK(invoke(args).out == invoke(args).out);
  }
}
