#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "config.hpp"
#include "grammar.hpp"
#include "phivar/error.hpp"
#include "run.hpp"
#include "svg.hpp"

using namespace phivar;
using namespace phivar::cli;
using nlohmann::json;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "phivar_test_cli";
  std::filesystem::create_directories(dir);
  return dir / name;
}

RunConfig make(Command c) {
  RunConfig cfg;
  cfg.command = c;
  cfg.reproducible = true;
  cfg.threads = 2;
  return cfg;
}

}  // namespace

TEST_CASE("g-expressions") {
  CHECK(parse_g("const:2")(10.0) == 2.0);
  CHECK(parse_g("pow:1")(8.0) == 8.0);
  CHECK(parse_g("pow:2@3").expression() == "pow:2@3");
  CHECK(parse_g("spow:2")(1.0) == doctest::Approx(4.0));
  CHECK(parse_g("logpow:1")(0.0) == doctest::Approx(1.0));
  CHECK(parse_g("mul(const:2,logpow:1)").expression() == "mul(const:2,logpow:1)");
  CHECK(parse_g("table(1:1,10:5,100:2)")(10.0) == doctest::Approx(5.0));
  CHECK(parse_g("ell(b=2,L=const:1)")(8.0) == doctest::Approx(3.0));
  for (const char* bad : {"", "pow:", "pow:x", "foo:1", "mul(const:1", "table(1)", "ell(b=2)", "const:1e999"}) {
    CHECK_THROWS_AS(parse_g(bad), InvalidArgument);
  }
}

TEST_CASE("numbers and levels") {
  CHECK(parse_number("+1.5", "x") == 1.5);
  CHECK(parse_number("-2e-3", "x") == -2e-3);
  CHECK_THROWS_AS(parse_number("1.5x", "x"), InvalidArgument);
  CHECK_THROWS_AS(parse_number("nan", "x"), InvalidArgument);
  CHECK(parse_unsigned("42", "x") == 42u);
  CHECK_THROWS_AS(parse_unsigned("-1", "x"), InvalidArgument);
  CHECK(parse_levels("8") == std::vector<std::size_t>{8});
  CHECK(parse_levels("6,8,10") == std::vector<std::size_t>{6, 8, 10});
  CHECK(parse_levels("6:9") == std::vector<std::size_t>{6, 7, 8, 9});
  CHECK(parse_levels("6:14:4") == std::vector<std::size_t>{6, 10, 14});
  CHECK_THROWS_AS(parse_levels("9:6"), InvalidArgument);
  CHECK_THROWS_AS(parse_levels("1:2:0"), InvalidArgument);
}

TEST_CASE("scheme specs round trip through strings and json") {
  for (const char* text : {"takagi", "takagi:max=100", "geometric:a=0.70710678", "explicit:1,0.25,-0.5",
                           "faber", "faber:max=120", "prescribed-q:q=0.7,g=spow:2",
                           "prescribed-q:q=0.5,g=mul(const:2,logpow:1),max=64", "prescribed-q0:g=pow:2"}) {
    const auto s = SchemeSpec::parse(text);
    CHECK(s.to_string() == text);
    CHECK(SchemeSpec::from_json(s.to_json()) == s);
    CHECK(SchemeSpec::from_json(json(text)) == s);
    CHECK_NOTHROW(s.build());
  }
  const auto obj = SchemeSpec::from_json(json::parse(R"({"kind":"explicit","alphas":[1,0.25]})"));
  CHECK(obj.alphas == std::vector<double>{1, 0.25});
  CHECK(SchemeSpec::parse("geometric:a=0.5").build().description() == "geometric:a=0.5");
  CHECK(SchemeSpec::parse("takagi:max=100").build().max_level() == 100);
  for (const char* bad : {"nope", "geometric", "geometric:b=1", "explicit:", "prescribed-q:g=pow:1",
                          "prescribed-q:q=0.5,g=bad:1", "takagi:a=1"}) {
    CHECK_THROWS_AS(SchemeSpec::parse(bad), InvalidArgument);
  }
  CHECK_THROWS_AS(SchemeSpec::from_json(json::parse(R"({"kind":"geometric","a":0.5,"x":1})")), InvalidArgument);
}

TEST_CASE("signs, gauges, modes") {
  CHECK(parse_signs("classic").kind() == SignKind::classic);
  CHECK(parse_signs("random:seed=42").description() == "random:seed=42");
  CHECK(parse_signs("rule:thue-morse").description() == "rule:thue-morse");
  CHECK_THROWS_AS(parse_signs("random:42"), InvalidArgument);
  CHECK_THROWS_AS(parse_signs("rule:nope"), InvalidArgument);
  CHECK(describe(parse_gauge("power:p=2")) == "power:p=2");
  CHECK(describe(parse_gauge("phi:q=0,g=pow:1")) == "phi:q=0,g=pow:1");
  CHECK_THROWS_AS(parse_gauge("power:p=0"), InvalidArgument);
  CHECK_THROWS_AS(parse_gauge("phi:q=0.5"), InvalidArgument);
  CHECK(parse_mode("mc") == Mode::mc);
  CHECK_THROWS_AS(parse_mode("fast"), InvalidArgument);
}

TEST_CASE("config json round trip") {
  RunConfig c = make(Command::study);
  c.scheme = SchemeSpec::parse("prescribed-q:q=0.7,g=spow:2");
  c.signs = "random:seed=42";
  c.gauge = "phi:q=0.7,g=spow:2";
  c.n = {6, 8, 10};
  c.t = 0.25;
  c.mode = "mc";
  c.samples = 1234;
  c.seed = 99;
  c.L = "logpow:1";
  c.output.csv = "a.csv";
  c.output.svg = "a.svg";
  const auto j = to_json(c);
  CHECK(j["schema"] == "phivar/1");
  CHECK(j["scheme"]["kind"] == "prescribed-q");
  CHECK(config_from_json(j) == c);
  CHECK(config_from_json(json::parse(j.dump())) == c);
}

TEST_CASE("config errors are aggregated") {
  const auto j = json::parse(R"({
    "schema": "phivar/1", "command": "variation", "scheme": "geometric:a=2",
    "gauge": "power:p=-1", "n": [], "t": 3, "mode": "fast", "bogus": 1
  })");
  try {
    (void)config_from_json(j);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const auto& v = e.violations();
    CHECK(v.size() >= 6);
    auto mentions = [&](const std::string& needle) {
      return std::any_of(v.begin(), v.end(), [&](const std::string& s) { return s.find(needle) != std::string::npos; });
    };
    CHECK(mentions("bogus"));
    CHECK(mentions("'t'"));
    CHECK(mentions("'n'"));
    CHECK(mentions("mode"));
    CHECK(mentions("gauge"));
    CHECK(mentions("geometric"));
  }
  CHECK_THROWS_AS(config_from_json(json::parse(R"({"command":"nope"})")), ConfigError);
  CHECK_THROWS_AS(config_from_json(json::parse(R"({"command":"path","schema":"phivar/2"})")), ConfigError);
  CHECK_THROWS_AS(config_from_json(json::parse(R"({"command":"conditions"})")), ConfigError);
  CHECK_THROWS_AS(config_from_json(json::array()), ConfigError);
}

TEST_CASE("exit codes and error json") {
  CHECK(exit_code_for(ConfigError({"x"})) == kExitConfig);
  CHECK(exit_code_for(InvalidArgument("x")) == kExitConfig);
  CHECK(exit_code_for(CapExceeded("x")) == kExitCap);
  CHECK(exit_code_for(GaugeDomainError("x")) == kExitGaugeDomain);
  CHECK(exit_code_for(HypothesisViolation("x")) == kExitFailure);
  const auto j = error_json(ConfigError({"a", "b"}));
  CHECK(j["error"] == "config");
  CHECK(j["exit_code"] == 2);
  CHECK(j["violations"].size() == 2);
}

TEST_CASE("thread resolution") {
  CHECK(resolve_cli_threads(3u) == 3u);
  ::setenv("PHIVAR_THREADS", "5", 1);
  CHECK(resolve_cli_threads(std::nullopt) == 5u);
  ::setenv("PHIVAR_THREADS", "zero", 1);
  CHECK_THROWS_AS(resolve_cli_threads(std::nullopt), ConfigError);
  ::unsetenv("PHIVAR_THREADS");
  CHECK(resolve_cli_threads(std::nullopt) == 0u);
}

TEST_CASE("variation run writes csv and a json record that round trips") {
  auto c = make(Command::variation);
  c.gauge = "phi:q=0,g=pow:1";
  c.n = {16};
  c.mode = "binomial";
  c.output.json = scratch("variation.json").string();
  std::ostringstream console;
  const auto rec = run(c, console);
  std::istringstream lines(console.str());
  std::string header, row;
  std::getline(lines, header);
  std::getline(lines, row);
  CHECK(header == "n,t,mode,value,stderr,limit,deviation");
  CHECK(row.rfind("16,1,binomial,", 0) == 0);
  const double value = rec.results[0]["value"].get<double>();
  CHECK(value > 0.79);
  CHECK(value < 0.85);
  CHECK(rec.results[0]["limit"].get<double>() == doctest::Approx(std::sqrt(2 / M_PI)).epsilon(1e-12));

  const auto back = record_from_json(json::parse(slurp(*c.output.json)));
  CHECK(back == rec);
  CHECK(back.config == c);
}

TEST_CASE("same config and seed give byte-identical csv") {
  auto c = make(Command::study);
  c.scheme = SchemeSpec::parse("prescribed-q:q=0.7,g=const:1");
  c.signs = "random:seed=42";
  c.gauge = "phi:q=0.7,g=const:1";
  c.n = {8, 10};
  c.mode = "mc";
  c.samples = 20000;
  c.seed = 7;
  std::ostringstream a, b;
  run(c, a);
  c.threads = 1;
  run(c, b);
  CHECK(a.str() == b.str());
  CHECK(a.str().find("# phivar") == std::string::npos);

  c.reproducible = false;
  std::ostringstream stamped;
  run(c, stamped);
  CHECK(stamped.str().rfind("# phivar ", 0) == 0);
  CHECK(stamped.str().substr(stamped.str().find('\n') + 1) == a.str());
}

TEST_CASE("limits, clt, conditions and path commands") {
  {
    auto c = make(Command::limits);
    c.quantity = "moment";
    c.q = 0.5;
    c.r = 2.0;
    c.depth = 16;
    std::ostringstream out;
    const auto rec = run(c, out);
    CHECK(out.str().rfind("quantity,method,value,error_low,error_high,seed,depth\n", 0) == 0);
    CHECK(rec.results[0]["error_low"].get<double>() <= 1.0);
    CHECK(rec.results[0]["error_high"].get<double>() >= 1.0);
  }
  {
    auto c = make(Command::limits);
    c.quantity = "coupling";
    c.scheme = SchemeSpec::parse("prescribed-q:q=0.5,g=const:1");
    c.n = {10};
    std::ostringstream out;
    const auto rec = run(c, out);
    CHECK(std::fabs(rec.results[0]["value"].get<double>() - 0.031263) <= 1e-5);
  }
  {
    auto c = make(Command::clt);
    c.n = {64, 256};
    std::ostringstream out;
    const auto rec = run(c, out);
    CHECK(rec.results[1]["w1"].get<double>() < rec.results[0]["w1"].get<double>());
  }
  {
    auto c = make(Command::conditions);
    c.scheme = SchemeSpec::parse("geometric:a=0.70710678");
    c.q = 0.5;
    c.ell = "const:1";
    std::ostringstream out;
    const auto rec = run(c, out);
    CHECK(rec.results[0]["verdicts"]["iv"]["verdict"] == "converges-to-target");
    CHECK(out.str().find("# verdict (iv): converges-to-target") != std::string::npos);
  }
  {
    auto c = make(Command::path);
    c.scheme = SchemeSpec::parse("prescribed-q:q=0.7,g=spow:2");
    c.signs = "random:seed=42";
    c.level = 8;
    c.output.bin = scratch("p.bin").string();
    c.output.svg = scratch("p.svg").string();
    std::ostringstream out;
    run(c, out);
    std::istringstream lines(out.str());
    std::string line;
    int rows = -1;
    while (std::getline(lines, line)) ++rows;
    CHECK(rows == 257);
    CHECK(slurp(*c.output.bin).size() == 16 + 8 * 257);
    CHECK(slurp(*c.output.svg).find("viewBox=\"0 0 960 540\"") != std::string::npos);
  }
}

TEST_CASE("figure1 preset") {
  auto c = make(Command::path);
  c.preset = "figure1";
  c.level = 14;
  c.output.svg = scratch("fig1.svg").string();
  std::ostringstream out;
  const auto rec = run(c, out);
  CHECK(out.str().rfind("t,rho=-2,rho=0,rho=2\n", 0) == 0);
  CHECK(rec.results.size() == 3);
  const auto svg = slurp(*c.output.svg);
  CHECK(std::count(svg.begin(), svg.end(), '\n') > 3);
  std::size_t polylines = 0;
  for (auto pos = svg.find("<polyline"); pos != std::string::npos; pos = svg.find("<polyline", pos + 1)) ++polylines;
  CHECK(polylines == 3);
}

TEST_CASE("runtime errors surface as typed exceptions") {
  auto c = make(Command::path);
  c.level = 27;
  std::ostringstream out;
  CHECK_THROWS_AS(run(c, out), CapExceeded);
  auto v = make(Command::variation);
  v.scheme = SchemeSpec::parse("explicit:3");
  v.gauge = "phi:q=0.5,g=const:1";
  v.n = {1};
  CHECK_THROWS_AS(run(v, out), GaugeDomainError);
}

TEST_CASE("svg decimation") {
  Series s{"x", {}, {}};
  for (int i = 0; i < 100000; ++i) {
    s.x.push_back(i);
    s.y.push_back(std::sin(i * 0.001) + (i == 54321 ? 5.0 : 0.0));
  }
  const auto d = decimate(s);
  CHECK(d.x.size() <= kSvgMaxPoints);
  CHECK(d.x.front() == 0);
  CHECK(d.x.back() == 99999);
  CHECK(std::is_sorted(d.x.begin(), d.x.end()));
  CHECK(std::find(d.x.begin(), d.x.end(), 54321.0) != d.x.end());  // spike survives
  Series small{"y", {0, 1, 2}, {1, 2, 3}};
  CHECK(decimate(small).x.size() == 3);
  std::ostringstream svg;
  write_svg(svg, Chart{"t", "x", "y", {s}, 0.5, "rule"});
  CHECK(svg.str().find("viewBox=\"0 0 960 540\"") != std::string::npos);
  CHECK(svg.str().find("stroke-dasharray") != std::string::npos);
}
