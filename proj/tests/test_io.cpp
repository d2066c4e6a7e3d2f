#include <filesystem>
#include <fstream>
#include <random>

#include "doctest.h"
#include "kslab/error.hpp"
#include "kslab/hashing.hpp"
#include "kslab/io.hpp"
#include "support.hpp"

using namespace kslab;

namespace {
IntegratorOptions coarse(double dt, int every) {
    IntegratorOptions o;
    o.dt_max = dt;
    o.store_every = every;
    return o;
}
}  // namespace

TEST_CASE("SHA-1 and git blob hashes match known vectors") {
    CHECK(sha1_hex("") == "da39a3ee5e6b4b0d3255bfef95601890afd80709");
    CHECK(sha1_hex("abc") == "a9993e364706816aba3e25717850c26c9cd0d89d");
    CHECK(git_blob_hash("") == "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
    CHECK(git_blob_hash("hello\n") == "ce013625030ba8dba906f756967f9e9ca394464a");
    const std::string h1 = combine_hashes({{"a", "1"}, {"b", "2"}});
    CHECK(h1 == sha1_hex(std::string("a\0" "1\n", 4) + std::string("b\0" "2\n", 4)));
    CHECK(h1 != combine_hashes({{"b", "2"}, {"a", "1"}}));
}

TEST_CASE("binary fields round-trip bit-exactly in 1D and 2D") {
    test::ScratchDir dir("field");
    std::mt19937_64 rng(4);
    for (int dim : {1, 2}) {
        const Grid g{dim, 16, 3.5};
        const auto f = test::random_rough_field(g, rng, -2, 5);
        write_field_binary(dir / "f.ksf", f);
        const auto back = read_field_binary(dir / "f.ksf");
        CHECK(back.grid() == g);
        CHECK(back.data() == f.data());
        CHECK(file_blob_hash(dir / "f.ksf") == git_blob_hash(read_text(dir / "f.ksf")));
    }
}

TEST_CASE("malformed field files are rejected") {
    test::ScratchDir dir("bad");
    const Grid g{1, 8, 1.0};
    write_field_binary(dir / "ok.ksf", ScalarField(g, 1.0));
    const std::string good = read_text(dir / "ok.ksf");

    write_text(dir / "magic.ksf", "NOTFIELD" + good.substr(8));
    CHECK_THROWS_AS(read_field_binary(dir / "magic.ksf"), FormatError);
    write_text(dir / "short.ksf", good.substr(0, good.size() - 3));
    CHECK_THROWS_AS(read_field_binary(dir / "short.ksf"), FormatError);
    write_text(dir / "header.ksf", good.substr(0, 10));
    CHECK_THROWS_AS(read_field_binary(dir / "header.ksf"), FormatError);
    std::string wrong_dim = good;
    wrong_dim[8] = 3;
    write_text(dir / "dim.ksf", wrong_dim);
    CHECK_THROWS_AS(read_field_binary(dir / "dim.ksf"), FormatError);
    CHECK_THROWS_AS(read_field_binary(dir / "missing.ksf"), Error);
}

TEST_CASE("CSV fields carry coordinates and 17 digits") {
    test::ScratchDir dir("csv");
    const Grid g{2, 4, 1.0};
    ScalarField f(g);
    f[5] = 1.0 / 3.0;
    write_field_csv(dir / "f.csv", f);
    const std::string text = read_text(dir / "f.csv");
    CHECK(text.rfind("x,y,u\n", 0) == 0);
    CHECK(text.find("0.33333333333333331") != std::string::npos);
    CHECK(std::count(text.begin(), text.end(), '\n') == 17);
    CHECK_THROWS_AS(write_field_csv(dir / "big.csv", ScalarField(Grid{2, 512, 1.0})), PreconditionError);
    CHECK(format_number(0.1) == "0.10000000000000001");
}

TEST_CASE("trajectory checkpoints reload and resume like an uninterrupted run") {
    test::ScratchDir dir("traj");
    const auto p = test::params_1d(0.2, 5, 32);
    const auto c = test::heterogeneous_a(std::numbers::pi / 5);
    std::mt19937_64 rng(11);
    const auto u0 = test::random_smooth_field(p.grid(), rng, 0.3, 1.2);
    const auto opts = coarse(0.05, 4);

    const auto full = integrate(u0, 0, 2.0, c, p, opts);
    const auto first = integrate(u0, 0, 1.0, c, p, opts);
    save_trajectory(dir / "ck", first);
    const auto loaded = load_trajectory(dir / "ck", p);
    REQUIRE(loaded.states.size() == first.states.size());
    CHECK(loaded.back().t == first.back().t);
    CHECK(loaded.back().u.data() == first.back().u.data());
    CHECK(sup_distance(loaded.back().v, first.back().v) == 0.0);
    CHECK(loaded.steps.size() == first.steps.size());

    const auto resumed = resume_trajectory(loaded, 2.0, c, p, opts);
    CHECK(resumed.back().t == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(sup_distance(resumed.back().u, full.back().u) < 1e-12);
    CHECK_THROWS_AS(resume_trajectory(loaded, 0.5, c, p, opts), PreconditionError);
    CHECK_THROWS_AS(load_trajectory(dir / "ck", p.with_grid_points(64)), FormatError);
    CHECK_THROWS_AS(load_trajectory(dir / "nowhere", p), Error);
}

TEST_CASE("entire-solution checkpoints round-trip") {
    test::ScratchDir dir("entire");
    const auto p = test::params_1d(0.1, 5, 32);
    const auto c = test::heterogeneous_a(std::numbers::pi / 5);
    const auto sol = find_steady_state(c, p);
    save_entire(dir / "e", sol);
    const auto back = load_entire(dir / "e", p);
    CHECK(back.representation == sol.representation);
    CHECK(back.converged == sol.converged);
    CHECK(back.history == sol.history);
    CHECK(back.states.size() == sol.states.size());
    CHECK(back.states.front().u.data() == sol.states.front().u.data());
    CHECK(back.stats.grad_sup == sol.stats.grad_sup);
    CHECK(sup_distance(back.u_at(3.0), sol.u_at(3.0)) == 0.0);
}
