#include "lnls/embedding.hpp"
#include "lnls/generators.hpp"
#include "lnls/rng.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <set>
#include <sstream>

using namespace lnls;

TEST_CASE("P[16] has the published qubit and coupler counts") {
    const HardwareGraph hw(16);
    CHECK(hw.qubits().size() == 5640);
    CHECK(hw.couplers().size() == 40484);
    CHECK(hw.yielded_qubit_count() == 5640);
    CHECK(hw.yielded_coupler_count() == 40484);
    std::size_t max_degree = 0;
    for (auto q : hw.qubits()) {
        max_degree = std::max(max_degree, hw.neighbors(q).size());
        REQUIRE(hw.linear_index(hw.coord(q)) == q);
    }
    CHECK(max_degree == 15);
    CHECK(hw.h_range.lo == -4.0);
    CHECK(hw.J_range.lo == -2.0);
    CHECK_THROWS_AS(HardwareGraph(1), std::invalid_argument);
    CHECK_THROWS_AS(HardwareGraph(16, DefectSpec{{}, {}, 1.5, 0.0, 0}), std::invalid_argument);
}

TEST_CASE("explicit and random defects") {
    const HardwareGraph clean(6);
    const auto q = clean.qubits()[10];
    const auto c = clean.couplers()[20];
    const HardwareGraph hw(6, DefectSpec{{q}, {c}, 0.0, 0.0, 0});
    CHECK(!hw.qubit_yielded(q));
    CHECK(!hw.coupler_yielded(c.first, c.second));
    for (auto n : hw.neighbors(q)) {
        CHECK(!hw.coupler_yielded(q, n));
    }
    CHECK_THROWS_AS(HardwareGraph(6, DefectSpec{{9999999}, {}, 0, 0, 0}), std::invalid_argument);
    const HardwareGraph r1(8, DefectSpec{{}, {}, 0.05, 0.01, 3});
    const HardwareGraph r2(8, DefectSpec{{}, {}, 0.05, 0.01, 3});
    CHECK(r1.unyielded_qubits() == r2.unyielded_qubits());
    CHECK(r1.unyielded_couplers() == r2.unyielded_couplers());
    CHECK(!r1.unyielded_qubits().empty());
}

TEST_CASE("identity Pegasus embeddings are valid") {
    const HardwareGraph hw(16);
    const auto fabric = make_origin_embeddings(hw, SubspaceShape::pegasus_fabric(16));
    REQUIRE(fabric.size() == 1);
    CHECK(fabric[0].num_variables() == 5640);
    CHECK(validate_embedding(fabric[0], hw).empty());
    const auto square = make_origin_embeddings(hw, SubspaceShape::pegasus_square(15));
    CHECK(square[0].num_variables() == 5400);
    CHECK(validate_embedding(square[0], hw).empty());
    CHECK_THROWS_AS(make_origin_embeddings(HardwareGraph(8), SubspaceShape::pegasus_square(15)),
                    std::invalid_argument);
}

TEST_CASE("cubic chain-length-2 embeddings are valid up to 15 x 15 x 12") {
    const HardwareGraph hw(16);
    const auto layout = cubic_cell_layout();
    std::set<int> partners(layout.partner.begin(), layout.partner.end());
    std::set<int> path(layout.path.begin(), layout.path.end());
    CHECK(partners.size() == 12);
    CHECK(path.size() == 12);
    for (const auto& shape : {SubspaceShape::cuboid(15, 15, 12), SubspaceShape::cuboid(12, 15, 15),
                              SubspaceShape::cuboid(8, 8, 8), SubspaceShape::cuboid(2, 3, 4)}) {
        CAPTURE(shape.describe());
        const auto embs = make_origin_embeddings(hw, shape, EmbeddingOptions{3});
        REQUIRE(!embs.empty());
        for (const auto& e : embs) {
            CHECK(e.max_chain_length == 2);
            CHECK(e.num_vacancies() == 0);
            CHECK(validate_embedding(e, hw).empty());
        }
    }
    CHECK(make_origin_embeddings(hw, SubspaceShape::cuboid(15, 15, 12))[0].num_variables() == 2700);
    CHECK_THROWS_AS(make_origin_embeddings(hw, SubspaceShape::cuboid(16, 15, 12)),
                    std::invalid_argument);
}

TEST_CASE("validator names broken invariants") {
    const HardwareGraph hw(6);
    auto e = make_origin_embeddings(hw, SubspaceShape::cuboid(2, 2, 2))[0];
    REQUIRE(validate_embedding(e, hw).empty());

    auto overlap = e;
    overlap.chains[1][0] = overlap.chains[0][0];
    CHECK(!validate_embedding(overlap, hw).empty());

    auto disconnected = e;
    std::swap(disconnected.chains[0][1], disconnected.chains[5][1]);
    CHECK(!validate_embedding(disconnected, hw).empty());

    auto missing = e;
    missing.chains.pop_back();
    CHECK(!validate_embedding(missing, hw).empty());

    const HardwareGraph dead(6, DefectSpec{{e.chains[0][0]}, {}, 0, 0, 0});
    const auto msgs = validate_embedding(e, dead);
    REQUIRE(!msgs.empty());
    CHECK(msgs.front().find("variable (") != std::string::npos);
}

TEST_CASE("trimming vacates broken chains and a minimum cover of conflicts") {
    const HardwareGraph clean(6);
    const auto base = make_origin_embeddings(clean, SubspaceShape::cuboid(3, 3, 3))[0];
    // Kill one qubit of chain 4 and every coupler realizing edge 0.
    std::vector<QubitPair> bad(base.edge_couplers[0].begin(), base.edge_couplers[0].end());
    const auto& e0 = base.shape.native_edges()[0];
    const HardwareGraph hw(6, DefectSpec{{base.chains[13][1]}, bad, 0, 0, 0});
    const auto t = trim_for_defects(base, hw);
    CHECK(t.vacant[13] == 1);
    CHECK((t.vacant[e0.a] == 1) != (t.vacant[e0.b] == 1));
    CHECK(t.num_vacancies() == 2);
    CHECK(validate_embedding(t, hw).empty());
}

TEST_CASE("programming places fields and couplers on the first qubit and coupler") {
    const HardwareGraph hw(6);
    const auto emb = make_origin_embeddings(hw, SubspaceShape::cuboid(3, 3, 3))[0];
    const auto model = gen_pm_j(build_cubic(6), 4);
    Rng rng(2);
    SpinState state(model.size());
    for (auto& s : state) {
        s = rng.spin();
    }
    const auto sel = select_subspace(model.topology(), emb.shape, {1, 2, 3}, emb.vacant);
    const auto sub = build_subproblem(model, state, sel);
    const auto prog = program(sub, emb, hw, 2.0);
    CHECK(prog.qubits.size() == 54);
    CHECK(prog.intra_chain_couplers == 27);

    // With every chain aligned, the programmed energy equals the subproblem
    // energy minus the chain-coupler contribution.
    for (int trial = 0; trial < 10; ++trial) {
        SpinState y(sub.size());
        for (auto& s : y) {
            s = rng.spin();
        }
        SpinState q(prog.qubits.size());
        std::vector<std::uint32_t> local(hw.id_space(), 0);
        for (std::uint32_t i = 0; i < prog.qubits.size(); ++i) {
            local[prog.qubits[i]] = i;
        }
        for (std::size_t i = 0; i < sub.size(); ++i) {
            for (auto qb : emb.chains[sub.variables[i]]) {
                q[local[qb]] = y[i];
            }
        }
        const double chain = -2.0 * static_cast<double>(prog.intra_chain_couplers);
        CHECK(prog.sparse().energy(q) == doctest::Approx(sub.problem.energy(y) + chain));
        CHECK(readout(q, prog) == y);
    }
    CHECK_THROWS_AS(program(sub, emb, hw, 3.0), std::range_error);
    CHECK_THROWS_AS(program(sub, emb, hw, 0.0), std::invalid_argument);
}

TEST_CASE("fields outside h_range are rejected with the variable named") {
    const HardwareGraph hw(6);
    const auto emb = make_origin_embeddings(hw, SubspaceShape::cuboid(2, 2, 2))[0];
    auto t = build_cubic(4);
    const IsingModel m(t, std::vector<double>(64, 0.0), std::vector<double>(192, 2.0));
    const auto sel = select_subspace(*t, emb.shape, {0, 0, 0}, emb.vacant);
    const auto sub = build_subproblem(m, SpinState(64, 1), sel);
    try {
        program(sub, emb, hw, 2.0);
        FAIL("expected a range error");
    } catch (const std::range_error& e) {
        CHECK(std::string(e.what()).find("variable (") != std::string::npos);
    }
}

TEST_CASE("auto-scaling divides every value by the smallest sufficient factor") {
    const HardwareGraph hw(6);
    const auto emb = make_origin_embeddings(hw, SubspaceShape::cuboid(2, 2, 2))[0];
    auto t = build_cubic(4);
    const IsingModel m(t, std::vector<double>(64, 0.0), std::vector<double>(192, 2.0));
    const auto sel = select_subspace(*t, emb.shape, {0, 0, 0}, emb.vacant);
    const auto sub = build_subproblem(m, SpinState(64, 1), sel);
    const auto p = program(sub, emb, hw, 2.0, true);
    // J = 2 against J_range.hi = 1 dominates the boundary fields 3 * 2 = 6 against 4.
    CHECK(p.scale == 2.0);
    for (std::size_t i = 0; i < sub.variables.size(); ++i) {
        CHECK(p.h[p.readout_index[i]] == 3.0);
    }
    for (const auto& c : p.couplers) {
        CHECK(hw.J_range.contains(c.J));
    }
    for (const double h : p.h) {
        CHECK(hw.h_range.contains(h));
    }
    const auto in_range = program(sub, emb, hw, 1.0, true);
    CHECK(in_range.scale == 2.0);
}

TEST_CASE("embedding files round trip") {
    const HardwareGraph hw(8, DefectSpec{{}, {}, 0.02, 0.01, 5});
    for (const auto& shape : {SubspaceShape::cuboid(4, 5, 6), SubspaceShape::pegasus_square(3)}) {
        const auto e = make_origin_embeddings(hw, shape)[0];
        std::stringstream a;
        write_embedding(a, e, hw);
        const auto r = read_embedding(a, hw);
        CHECK(r.chains == e.chains);
        CHECK(r.vacant == e.vacant);
        CHECK(r.edge_couplers == e.edge_couplers);
        std::stringstream b;
        write_embedding(b, r, hw);
        CHECK(a.str() == b.str());
    }
    std::stringstream junk("# lnls-embedding v1\nlattice cubic\n");
    CHECK_THROWS(read_embedding(junk, hw));
}

TEST_CASE("embedding shapes must fit the lattice without wrap-around") {
    const HardwareGraph hw(16);
    const auto e = make_origin_embeddings(hw, SubspaceShape::cuboid(8, 8, 8))[0];
    CHECK_NOTHROW(check_embedding_lattice(e, *build_cubic(10)));
    CHECK_THROWS_AS(check_embedding_lattice(e, *build_cubic(8)), std::invalid_argument);
}
