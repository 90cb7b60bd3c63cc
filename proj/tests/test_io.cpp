#include "lnls/generators.hpp"
#include "lnls/instance_io.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <limits>
#include <sstream>

using namespace lnls;

TEST_CASE("reals round trip in shortest form") {
    for (double v : {0.0, 1.0, -1.0, 0.1, 1.0 / 3.0, -2.5e-300, 1e300, 123456.789}) {
        CHECK(parse_real(format_real(v)) == v);
    }
    CHECK(format_real(0.0) == "0");
    CHECK(format_real(-0.0) == "0");
    CHECK(format_real(1.5) == "1.5");
    CHECK_THROWS(parse_real("abc"));
    CHECK_THROWS(parse_real("1.5x"));
}

TEST_CASE("instances round trip byte for byte") {
    for (auto kind : {LatticeKind::cubic, LatticeKind::toric_pegasus}) {
        auto topo = build_lattice(kind, 3);
        std::vector<double> h(topo->num_vertices(), 0.0);
        h[2] = 0.25;
        h[5] = -1.0 / 3.0;
        auto J = gen_pm_j(topo, 7).J();
        const IsingModel m(topo, h, std::vector<double>(J.begin(), J.end()));
        std::stringstream a;
        write_instance(a, m, {"pmj", 7});
        const auto back = read_instance(a);
        CHECK(back.model == m);
        CHECK(back.header.ensemble == "pmj");
        CHECK(back.header.seed == 7);
        std::stringstream b;
        write_instance(b, back.model, back.header);
        CHECK(a.str() == b.str());
    }
}

TEST_CASE("malformed instances report the line") {
    std::stringstream in("# lnls-instance v1\nlattice cubic 3\nensemble pmj\nseed 1\ncouplers 2\nJ 0,0,0 0,0,1 1\nJ 0,0,0 5,5,5 1\n");
    try {
        read_instance(in);
        FAIL("expected a format error");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()).find("line") != std::string::npos);
    }
    std::stringstream empty("");
    CHECK_THROWS(read_instance(empty));
}

TEST_CASE("planted and E0 sidecars round trip") {
    const auto p = gen_tile_planted(4, solve_tile_distribution(-1.8), 2);
    std::stringstream a;
    write_planted(a, p.model.topology(), {p.planted, p.ground_energy});
    const auto back = read_planted(a, p.model.topology());
    CHECK(back.state == p.planted);
    CHECK(back.ground_energy == p.ground_energy);

    std::stringstream e;
    write_e0(e, {-123.5, "long-SA", "n=4,S=16384;seed=1"});
    const auto r = read_e0(e);
    CHECK(r.e0 == -123.5);
    CHECK(r.provenance == "long-SA");
    CHECK(r.budget == "n=4,S=16384;seed=1");
    CHECK(sidecar_path("dir/x.inst", "e0") == std::filesystem::path("dir/x.inst.e0"));
}

TEST_CASE("instances save and load through files") {
    const auto path = std::filesystem::temp_directory_path() / "lnls_io_test.inst";
    const auto m = gen_ferromagnet(build_cubic(3));
    save_instance(path, m, {"ferro", 0});
    CHECK(load_instance(path).model == m);
    std::filesystem::remove(path);
    CHECK_THROWS(load_instance(path));
}
