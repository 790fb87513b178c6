#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "pascs/io.hpp"
#include "pascs/sweep.hpp"

using namespace pascs;

TEST_CASE("csv escaping follows RFC-4180 quoting") {
  CHECK(csv_escape("plain") == "plain");
  CHECK(csv_escape("with,comma") == "\"with,comma\"");
  CHECK(csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(csv_escape("line\nbreak") == "\"line\nbreak\"");
  CHECK(csv_row({"a", "b,c"}) == "a,\"b,c\"\n");
}

TEST_CASE("kv config files parse flat key = value lines") {
  std::stringstream ss("op = add\nm=2\n# comment\nr = 0.4  # trailing\n\nbad line\n");
  auto kv = read_kv_file(ss);
  CHECK(kv.at("op") == "add");
  CHECK(kv.at("m") == "2");
  CHECK(kv.at("r") == "0.4");
  CHECK(kv.size() == 3);
}

TEST_CASE("witness CSV has matching header and row, fixed order") {
  auto rep = witness_report(StateSpec(Operation::Add, 1, std::polar(0.8, 0.4), 0.3, 0.0));
  std::string csv = witness_csv(rep);
  auto nl = csv.find('\n');
  std::string header = csv.substr(0, nl);
  std::string row = csv.substr(nl + 1, csv.size() - nl - 2);
  CHECK(std::count(header.begin(), header.end(), ',') ==
        std::count(row.begin(), row.end(), ','));
  CHECK(header.rfind("op,m,alpha_re,alpha_im,r,phi,Q,D1,", 0) == 0);
  CHECK(header.find("precision_demoted") != std::string::npos);
}

TEST_CASE("witness JSON marks undefined witnesses as null") {
  auto rep = witness_report(StateSpec(Operation::Add, 0, Complex(0, 0), 0.0, 0.0));  // vacuum
  auto j = witness_json(rep);
  CHECK(j["Q"].is_null());
  CHECK(j["D1"].is_number());
}

TEST_CASE("sweep output is deterministic and thread-count independent") {
  SweepConfig cfg;
  cfg.base = StateSpec(Operation::Add, 1, std::polar(0.8, k_two_pi / 6.0), 0.0, 0.0);
  cfg.axes = {{SweepParam::R, 0.05, 0.45, 5}, {SweepParam::M, 0, 2, 3}};
  cfg.quantities = {"Q", "D1", "d1", "A3"};
  auto run = [&](int threads) {
    SweepConfig c = cfg;
    c.threads = threads;
    std::stringstream ss;
    run_sweep(c, ss);
    return ss.str();
  };
  std::string one = run(1);
  CHECK(one == run(4));
  CHECK(one == run(1));
  CHECK(one.find("r,m_2,op,m,alpha_re,alpha_im,r,phi,Q,D1,d1,A3,degenerate") != std::string::npos);
}

TEST_CASE("degenerate sweep points become flagged rows, not omissions") {
  SweepConfig cfg;
  cfg.base = StateSpec(Operation::Subtract, 1, Complex(1, 0), 0.0, 0.0);
  cfg.axes = {{SweepParam::AlphaMod, 0.0, 1.0, 3}};  // first point is degenerate
  cfg.quantities = {"Q"};
  cfg.threads = 1;
  std::stringstream ss;
  run_sweep(cfg, ss);
  std::string out = ss.str();
  std::vector<std::string> lines;
  std::string line;
  std::stringstream parse(out);
  while (std::getline(parse, line)) lines.push_back(line);
  REQUIRE(lines.size() == 5);  // comment, header, 3 rows
  CHECK(lines[2].substr(lines[2].size() - 2) == ",1");  // degenerate flag set
  CHECK(lines[3].substr(lines[3].size() - 2) == ",0");
  CHECK(lines[2].find(",,") != std::string::npos);      // empty quantity cell
}

TEST_CASE("phi sweep over two periods repeats exactly to 1e-12") {
  SweepConfig cfg;
  cfg.base = StateSpec(Operation::Add, 1, std::polar(0.7, 0.3), 0.25, 0.0);
  cfg.axes = {{SweepParam::Phi, 0.0, 2.0 * k_two_pi, 17}};
  cfg.quantities = {"D1"};
  cfg.threads = 2;
  std::stringstream ss;
  run_sweep(cfg, ss);
  std::string line;
  std::getline(ss, line);  // comment
  std::getline(ss, line);  // header
  std::vector<double> values;
  while (std::getline(ss, line)) {
    auto pos = line.rfind(",0");
    auto prev = line.rfind(',', pos - 1);
    values.push_back(std::stod(line.substr(prev + 1, pos - prev - 1)));
  }
  REQUIRE(values.size() == 17);
  for (int k = 0; k < 8; ++k)
    CHECK(std::abs(values[k] - values[k + 8]) <= 1e-12 * std::max(1.0, std::abs(values[k])));
}

TEST_CASE("sweep JSON format emits one object per grid point") {
  SweepConfig cfg;
  cfg.base = StateSpec(Operation::Add, 1, std::polar(0.6, 0.2), 0.1, 0.0);
  cfg.axes = {{SweepParam::R, 0.1, 0.3, 3}};
  cfg.quantities = {"Q", "D1"};
  cfg.format = SweepFormat::Json;
  cfg.threads = 1;
  std::stringstream ss;
  run_sweep(cfg, ss);
  auto j = nlohmann::json::parse(ss.str());
  REQUIRE(j.is_array());
  REQUIRE(j.size() == 3);
  CHECK(j[0].contains("r"));
  CHECK(j[0].contains("Q"));
  CHECK(j[0]["degenerate"] == "0");
}

TEST_CASE("m axis sweeps integers") {
  SweepConfig cfg;
  cfg.base = StateSpec(Operation::Add, 0, std::polar(0.5, 0.0), 0.2, 0.0);
  cfg.axes = {{SweepParam::M, 0, 3, 4}};
  cfg.quantities = {"Q"};
  cfg.threads = 1;
  std::stringstream ss;
  run_sweep(cfg, ss);
  std::string out = ss.str();
  for (const char* want : {"\n0,add,", "\n1,add,", "\n2,add,", "\n3,add,"})
    CHECK(out.find(want) != std::string::npos);
}

TEST_CASE("figure presets expose the documented names") {
  auto names = preset_names();
  CHECK(names.size() == 28);
  for (const auto& n : names) CHECK_FALSE(preset_outputs(n, 1).empty());
  CHECK_THROWS_AS(preset_outputs("fig99", 1), argument_error);
  auto fig7 = preset_outputs("fig7", 1);
  REQUIRE(fig7.size() == 4);
  CHECK(fig7[0].filename == "fig7_m0.csv");
  CHECK(fig7[3].filename == "fig7_m3.csv");
}

TEST_CASE("fig5a preset emits Klyshko rows with negativity") {
  auto outs = preset_outputs("fig5a", 1);
  REQUIRE(outs.size() == 1);
  std::stringstream ss;
  outs[0].emit(ss);
  std::string out = ss.str();
  CHECK(out.find("op,m,alpha_re,alpha_im,r,phi,n,B\n") == 0);
  CHECK(out.find("-") != std::string::npos);
  int rows = std::count(out.begin(), out.end(), '\n') - 1;
  CHECK(rows == 2 * 3 * 11);  // both operations, three r values, n = 0..10
}

TEST_CASE("unknown sweep parameter and bad configs are rejected") {
  CHECK_THROWS_AS(sweep_param_from_string("bogus"), argument_error);
  SweepConfig cfg;
  cfg.base = StateSpec(Operation::Add, 0, Complex(1, 0), 0.0, 0.0);
  cfg.quantities = {"Q"};
  CHECK_THROWS_AS(run_sweep(cfg, std::cout), argument_error);  // no axes
  cfg.axes = {{SweepParam::R, 0.0, 1.0, 1}};
  CHECK_THROWS_AS(run_sweep(cfg, std::cout), argument_error);  // steps < 2
}
