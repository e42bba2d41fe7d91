#include "doctest.h"

#include "obslab/commands.hpp"
#include "obslab/error.hpp"
#include "obslab/numerics.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace obslab;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected an error");
    return ErrorKind::precondition;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("pi expressions parse exactly") {
    CHECK(parse_number("pi/2") == pi / 2);
    CHECK(parse_number("pi/2+0.3") == pi / 2 + 0.3);
    CHECK(parse_number("3pi/4") == 3 * pi / 4);
    CHECK(parse_number("3*pi/4") == 3 * pi / 4);
    CHECK(parse_number("-1e-3") == -1e-3);
    CHECK(parse_number(" (1+2)*2 ") == 6);
    CHECK_THROWS_AS(parse_number("pie"), Error);
    CHECK_THROWS_AS(parse_number(""), Error);
}

TEST_CASE("lists and ranges") {
    CHECK(parse_list("1,1.5,pi/2") == std::vector<double>{1, 1.5, pi / 2});
    CHECK(parse_list("25..28") == std::vector<double>{25, 26, 27, 28});
    CHECK(parse_list("0..100:50") == std::vector<double>{0, 50, 100});
    CHECK(parse_list("0..1:0.25").size() == 5);
    CHECK_THROWS_AS(parse_list("3..1"), Error);
    CHECK_THROWS_AS(parse_list("0..1:0"), Error);
}

TEST_CASE("set and potential specs") {
    CHECK(parse_set("halfline:1").kind == Family::half_line);
    CHECK(parse_set("periodic:1").param == 1);
    auto d = parse_set("dyadic:1,1");
    CHECK(d.kind == Family::dyadic_gap);
    CHECK(d.gap.power == 1);
    auto e = parse_set("intervals:-1:0,2:3.5");
    REQUIRE(e.pieces.size() == 2);
    CHECK(e.pieces[1] == Interval{2, 3.5});
    CHECK_THROWS_AS(parse_set("nothing:1"), Error);
    CHECK_THROWS_AS(parse_set("halfline"), Error);

    const auto dir = std::filesystem::temp_directory_path() / "obslab_cli_sets";
    std::filesystem::create_directories(dir);
    write_atomic(dir / "s.json", R"({"intervals": [[0, 1], [2, 4]]})");
    write_atomic(dir / "s.txt", "# two pieces\n0 1\n2 4\n");
    CHECK(parse_set("file:" + (dir / "s.json").string()).pieces.size() == 2);
    CHECK(parse_set("file:" + (dir / "s.txt").string()).pieces == parse_set("file:" + (dir / "s.json").string()).pieces);
    CHECK_THROWS_AS(parse_set("file:" + (dir / "missing.json").string()), Error);

    CHECK(parse_potential("2").m() == 2);
    CHECK(parse_potential("monomial:3").m() == 3);
    CHECK(parse_potential("shifted:1,1.5").kind() == Potential::Kind::shifted_power);
    CHECK_THROWS_AS(parse_potential("monomial:1.5"), Error);
}

TEST_CASE("json floats round-trip") {
    Json j;
    j["a"] = 0.1;
    j["b"] = pi;
    j["c"] = 2.0;
    j["n"] = 3;
    j["inf"] = finite_or_string(INFINITY);
    const auto text = dump_json(j);
    CHECK(text.find("0.10000000000000001") != std::string::npos);
    CHECK(text.find("\"c\": 2.0") != std::string::npos);
    CHECK(text.find("\"n\": 3") != std::string::npos);
    CHECK(text.find("\"inf\"") != std::string::npos);
    const auto back = Json::parse(text);
    CHECK(back["b"].get<double>() == pi);
    CHECK(back["c"].is_number_float());
}

TEST_CASE("config round-trips through json") {
    RunConfig c;
    c.command = "mintime";
    c.T_list = {pi / 2, pi / 2 + 0.3};
    c.k_list = {5, 10};
    c.seed = 99;
    const auto back = config_from_json(Json::parse(dump_json(to_json(c))));
    CHECK(back.command == c.command);
    CHECK(back.T_list == c.T_list);
    CHECK(back.seed == 99u);
    CHECK(dump_json(to_json(back)) == dump_json(to_json(c)));
    CHECK(kind_of([] { config_from_json(Json::object()); }) == ErrorKind::precondition);
}

TEST_CASE("spectrum command on the oscillator") {
    RunConfig c;
    c.command = "spectrum";
    c.K = 10;
    auto doc = run_command(c);
    const auto& lam = doc.body["results"]["spectrum"]["lambdas"];
    REQUIRE(lam.size() == 10);
    for (int k = 1; k <= 10; ++k) CHECK(lam[k - 1].get<double>() == doctest::Approx(2 * k - 1).epsilon(1e-6));
    CHECK(doc.body["results"]["gaps"]["regime"] == "uniform");
    CHECK(doc.files.size() == 1);

    c.K = 0;
    CHECK(kind_of([&] { run_command(c); }) == ErrorKind::precondition);
    CHECK(exit_code_for(ErrorKind::precondition) == 2);
    CHECK(exit_code_for(ErrorKind::no_convergence) == 3);
    c.command = "nope";
    CHECK_THROWS_AS(run_command(c), Error);
}

TEST_CASE("reports are deterministic and replay byte for byte") {
    const auto dir = std::filesystem::temp_directory_path() / "obslab_cli_replay";
    std::filesystem::remove_all(dir);
    RunConfig c;
    c.command = "mintime";
    c.set = "halfline:1";
    c.T_list = {1.0, pi / 2, 1.9};
    c.k_list = {5, 10};
    c.out_dir = dir.string();
    const auto path = write_report(run_command(c), c, -1);
    const std::string first = slurp(path);
    CHECK(first.find("wall_clock") == std::string::npos);
    CHECK(std::filesystem::exists(dir / "mintime.csv"));

    const auto replay = config_from_json(Json::parse(slurp(dir / "mintime.config.json")));
    auto c2 = replay;
    c2.out_dir = (dir / "again").string();
    const auto path2 = write_report(run_command(c2), c2, -1);
    CHECK(slurp(path2) == first);
    CHECK(slurp(dir / "again" / "mintime.csv") == slurp(dir / "mintime.csv"));

    const auto timed = write_report(run_command(c), c, 0.5);
    CHECK(Json::parse(slurp(timed))["meta"]["wall_clock_seconds"] == 0.5);
}

TEST_CASE("every result section carries a method and a tolerance") {
    RunConfig c;
    c.command = "setmass";
    c.potential = "1";
    c.set = "bounded:2";
    c.K = 20;
    c.decompose = 5;
    auto doc = run_command(c);
    for (auto it = doc.body["results"].begin(); it != doc.body["results"].end(); ++it) {
        INFO(it.key());
        CHECK(it.value().contains("method"));
        CHECK(it.value().contains("tolerance"));
    }
    CHECK(doc.body["results"]["classification"]["weakly_thick"] == false);
}
