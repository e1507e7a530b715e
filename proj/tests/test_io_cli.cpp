#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "horizonforge/base.hpp"
#include "horizonforge/checks.hpp"
#include "horizonforge/geomcore.hpp"
#include "horizonforge/io.hpp"
#include "horizonforge/schwarzschild.hpp"

using namespace hf;

TEST_CASE("profile documents round-trip bit-exactly") {
  auto m = geom::round_sphere(2, 1.37, 257);
  auto doc = io::from_metric(m);
  doc.metadata["name"] = "round_s2_137";
  auto bytes = io::serialize(doc);
  auto back = io::deserialize(bytes);
  CHECK(back.kind == doc.kind);
  CHECK(back.n == doc.n);
  CHECK(back.grid == doc.grid);
  REQUIRE(back.values.size() == doc.values.size());
  for (std::size_t i = 0; i < doc.values.size(); ++i)
    CHECK(back.values[i] == doc.values[i]); // bitwise
  CHECK(back.metadata.at("name") == "round_s2_137");
  CHECK(io::serialize(back) == bytes);

  auto band = schw::orbit(1.0, 0.3, 3).band(1.1, 2.0, 65);
  auto pdoc = io::from_planar(band);
  auto pback = io::to_planar(io::deserialize(io::serialize(pdoc)));
  for (std::size_t i = 0; i < band.x.size(); ++i) {
    CHECK(pback.x[i] == band.x[i]);
    CHECK(pback.y[i] == band.y[i]);
  }
}

TEST_CASE("non-finite values are rejected with an index") {
  auto m = geom::round_sphere(2, 1.0, 64);
  auto doc = io::from_metric(m);
  doc.values[17] = std::nan("");
  try {
    io::serialize(doc);
    FAIL("expected rejection");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("17") != std::string::npos);
  }
}

TEST_CASE("unsupported schema versions are rejected explicitly") {
  std::string v0 = R"({"schema_version":0,"kind":"warped_closed","n":2})";
  CHECK_THROWS_AS(io::deserialize(v0), ValidationError);
  std::string none = R"({"kind":"warped_closed","n":2})";
  CHECK_THROWS_AS(io::deserialize(none), ValidationError);
}

TEST_CASE("strict parsing rejects unknown keys by name") {
  std::string cfg = R"({"command":"lambda1","tolerancez":{"membership":1e-8}})";
  try {
    io::parse_run_config(cfg);
    FAIL("expected rejection");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("tolerancez") != std::string::npos);
  }
  std::string cfg2 = R"({"command":"x","tolerances":{"membershyp":1e-8}})";
  try {
    io::parse_run_config(cfg2);
    FAIL("expected rejection");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("membershyp") != std::string::npos);
  }
}

TEST_CASE("collar documents round-trip") {
  geom::CollarMetric c;
  c.slices.m = 2;
  c.slices.round = false;
  c.slices.closed = true;
  c.slices.x = {0.0, 1.0, 16};
  c.slices.t = {0.0, 0.5, 1.0};
  for (int it = 0; it < 3; ++it) {
    std::vector<double> q(16, 3.1 + it), p(16);
    for (int i = 0; i < 16; ++i) p[i] = std::sin(kPi * i / 15.0) * (1.0 + 0.1 * it);
    p.front() = p.back() = 0.0;
    c.slices.q.push_back(q);
    c.slices.p.push_back(p);
    c.lapse.push_back(std::vector<double>(16, 1.5));
  }
  c.A = 2.5;
  c.epsilon = 0.001;
  c.rho = {0.0, 0.25, 1.0};
  c.tau = {0.0, 0.5, 1.0};
  auto back = io::to_collar(io::deserialize(io::serialize(io::from_collar(c))));
  CHECK(back.A == c.A);
  CHECK(back.epsilon == c.epsilon);
  REQUIRE(back.slices.q.size() == 3);
  for (int it = 0; it < 3; ++it)
    for (int i = 0; i < 16; ++i) {
      CHECK(back.slices.q[it][i] == c.slices.q[it][i]);
      CHECK(back.slices.p[it][i] == c.slices.p[it][i]);
      CHECK(back.lapse[it][i] == c.lapse[it][i]);
    }
}

TEST_CASE("full check suite passes and reports deterministically") {
  auto r1 = checks::full_suite();
  CHECK(checks::all_pass(r1));
  auto r2 = checks::full_suite();
  CHECK(checks::format_report(r1) == checks::format_report(r2));
}

#ifdef HF_CLI_PATH
#include <cstdlib>

namespace {

int run_cli(const std::string& args) {
  std::string cmd = std::string(HF_CLI_PATH) + " " + args;
  int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

} // namespace

TEST_CASE("cli end to end") {
  auto m = geom::round_sphere(2, 1.0, 512);
  io::write_file("/tmp/hf_round_s2.json", io::serialize(io::from_metric(m)));

  SUBCASE("lambda1 emits the contract JSON") {
    REQUIRE(run_cli("lambda1 --metric /tmp/hf_round_s2.json --k 0.5 "
                    "--out /tmp/hf_lam.json") == 0);
    auto text = io::read_file("/tmp/hf_lam.json");
    CHECK(text.find("\"lambda1\"") != std::string::npos);
    auto j = text.find("\"lambda1\": ");
    double lam_val = std::stod(text.substr(j + 11));
    CHECK(lam_val == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(text.find("\"eigenfunction\"") != std::string::npos);
    CHECK(text.find("\"residual\"") != std::string::npos);
  }

  SUBCASE("geometry and flow produce CSV artifacts") {
    REQUIRE(run_cli("geometry --metric /tmp/hf_round_s2.json "
                    "--out /tmp/hf_geo.csv") == 0);
    CHECK(io::read_file("/tmp/hf_geo.csv").rfind("rho,R", 0) == 0);
  }

  SUBCASE("bend emits a phase-plane document that reloads") {
    REQUIRE(run_cli("bend --m1 1.0 --m2 1.05 --rho1 2.5 --rho2 4.0 --n 2 "
                    "--out /tmp/hf_bend.json") == 0);
    auto p = io::to_planar(io::deserialize(io::read_file("/tmp/hf_bend.json")));
    CHECK(schw::adm_mass(p) == doctest::Approx(1.05).epsilon(1e-9));
  }

  SUBCASE("malformed config exits 2 with the offending key") {
    io::write_file("/tmp/hf_bad.json",
                   R"({"command":"lambda1","tolerancez":{}})");
    CHECK(run_cli("run --config /tmp/hf_bad.json 2>/tmp/hf_err.json") == 2);
    CHECK(io::read_file("/tmp/hf_err.json").find("tolerancez") !=
          std::string::npos);
  }

  SUBCASE("check subcommand output is byte-identical across runs") {
    REQUIRE(run_cli("lambda1 --metric /tmp/hf_round_s2.json --k 0.5 --check "
                    "--out /tmp/hf_chk1.txt") == 0);
    REQUIRE(run_cli("lambda1 --metric /tmp/hf_round_s2.json --k 0.5 --check "
                    "--out /tmp/hf_chk2.txt") == 0);
    CHECK(io::read_file("/tmp/hf_chk1.txt") == io::read_file("/tmp/hf_chk2.txt"));
  }

  SUBCASE("bartnik-sequence writes the masses CSV, fanned out") {
    REQUIRE(run_cli("bartnik-sequence --horizon /tmp/hf_round_s2.json "
                    "--eps-count 4 --jobs 2 --out /tmp/hf_masses.csv") == 0);
    auto csv = io::read_file("/tmp/hf_masses.csv");
    CHECK(csv.rfind("i,epsilon,mass,min_R,min_psc_margin", 0) == 0);
    // strictly decreasing masses in column 3
    std::vector<double> masses;
    std::istringstream ss(csv);
    std::string line;
    std::getline(ss, line);
    while (std::getline(ss, line)) {
      std::size_t p1 = line.find(',', line.find(',') + 1);
      std::size_t p2 = line.find(',', p1 + 1);
      masses.push_back(std::stod(line.substr(p1 + 1, p2 - p1 - 1)));
    }
    REQUIRE(masses.size() == 4);
    for (std::size_t i = 1; i < masses.size(); ++i)
      CHECK(masses[i] < masses[i - 1]);
  }
}
#endif
