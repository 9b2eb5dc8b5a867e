#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "cpl/domain.hpp"

using namespace cpl;

namespace {

ChargeDensity random_charge(DomainSpec dom, Rng& rng) {
    std::vector<std::int8_t> v(dom.bottom_cells());
    for (auto& x : v) x = (rng.uniform() < 0.5) ? -1 : 1;
    if (dom.bc == BC::zero_flux) {
        // rebalance by flipping surplus entries
        std::int64_t s = 0;
        for (auto x : v) s += x;
        for (std::size_t i = 0; i < v.size() && s != 0; ++i) {
            if (s > 0 && v[i] == 1) { v[i] = -1; s -= 2; }
            else if (s < 0 && v[i] == -1) { v[i] = 1; s += 2; }
        }
    }
    return ChargeDensity(dom, std::move(v));
}

} // namespace

TEST_CASE("DomainSpec validates grid invariants", "[domain]") {
    CHECK_NOTHROW(DomainSpec(2, 8.0, 64, BC::periodic));
    CHECK_THROWS_AS(DomainSpec(4, 8.0, 64, BC::periodic), InvalidInput);
    CHECK_THROWS_AS(DomainSpec(2, -1.0, 64, BC::periodic), InvalidInput);
    CHECK_THROWS_AS(DomainSpec(2, 8.0, 2, BC::periodic), InvalidInput);
    CHECK_THROWS_AS(DomainSpec(2, 8.0, 64, 2, BC::periodic), InvalidInput);
    // h = L/N must resolve the unit pattern scale
    CHECK_THROWS_AS(DomainSpec(2, 8.0, 16, BC::periodic), InvalidInput);
    CHECK(DomainSpec(2, 8.0, 32, BC::periodic).h == 0.25);
    // zero_flux with an odd cell count is rejected at construction
    CHECK_THROWS_AS(DomainSpec(2, 8.0, 65, BC::zero_flux), Infeasible);
    CHECK_NOTHROW(DomainSpec(2, 8.0, 64, BC::zero_flux));
}

TEST_CASE("ChargeDensity enforces +-1 and the zero_flux balance", "[domain]") {
    DomainSpec dom(2, 8.0, 64, BC::periodic);
    std::vector<std::int8_t> bad(64, 1);
    bad[3] = 0;
    CHECK_THROWS_AS(ChargeDensity(dom, bad), InvalidInput);

    DomainSpec zf(2, 8.0, 64, BC::zero_flux);
    CHECK_THROWS_AS(ChargeDensity::constant(zf, 1), Infeasible);
}

TEST_CASE("perimeter counts opposite-sign facets", "[domain][perimeter]") {
    SECTION("half/half stripe on an 8-cell torus") {
        DomainSpec dom = DomainSpec::unchecked(2, 2.0, 8, 8, BC::periodic);
        std::vector<std::int8_t> v{1, 1, 1, 1, -1, -1, -1, -1};
        CHECK(perimeter(ChargeDensity(dom, v)) == 4.0);  // 2 jumps x 2 x h^0
    }
    SECTION("constant charge has no interface") {
        DomainSpec dom(2, 8.0, 64, BC::periodic);
        CHECK(perimeter(ChargeDensity::constant(dom, 1)) == 0.0);
    }
    SECTION("2x2 torus checkerboard, exhaustive facet enumeration oracle") {
        DomainSpec dom = DomainSpec::unchecked(3, 0.5, 2, 2, BC::periodic);
        std::vector<std::int8_t> v{1, -1, -1, 1};
        // oracle: enumerate every (cell, +direction) facet on the torus
        const int N = 2;
        int opposite = 0;
        for (int iy = 0; iy < N; ++iy)
            for (int ix = 0; ix < N; ++ix) {
                if (v[iy * N + ix] != v[iy * N + (ix + 1) % N]) ++opposite;
                if (v[iy * N + ix] != v[((iy + 1) % N) * N + ix]) ++opposite;
            }
        CHECK(opposite == 8);
        const double h = dom.h;
        CHECK(perimeter(ChargeDensity(dom, v)) == Catch::Approx(16.0 * h).epsilon(1e-15));
        CHECK(perimeter(ChargeDensity(dom, v)) == Catch::Approx(opposite * 2.0 * h).epsilon(1e-15));
    }
}

TEST_CASE("perimeter invariances", "[domain][perimeter]") {
    Rng rng(1234);
    DomainSpec dom(2, 8.0, 64, BC::periodic);
    for (int trial = 0; trial < 20; ++trial) {
        auto u = random_charge(dom, rng);
        const double p = perimeter(u);
        CHECK(perimeter(u.flipped_sign()) == p);
        // lattice translation on the torus
        const std::size_t shift = 1 + rng.below(63);
        std::vector<std::int8_t> tv(u.values.size());
        for (std::size_t i = 0; i < tv.size(); ++i) tv[i] = u.values[(i + shift) % tv.size()];
        CHECK(perimeter(ChargeDensity(dom, tv)) == p);
        // upper bound with equality iff checkerboard
        CHECK(p <= 2.0 * 64);
    }
    std::vector<std::int8_t> alt(64);
    for (int i = 0; i < 64; ++i) alt[i] = (i % 2) ? 1 : -1;
    CHECK(perimeter(ChargeDensity(dom, alt)) == 2.0 * 64);
}

TEST_CASE("total_energy assembles the ledger", "[domain][energy]") {
    DomainSpec dom(2, 8.0, 64, BC::periodic);
    std::vector<std::int8_t> v(64, 1);
    for (int i = 0; i < 16; ++i) v[i] = -1;  // some interfaces
    ChargeDensity u(dom, v);

    auto eb = total_energy(u, 6.0);
    CHECK(eb.interfacial == perimeter(u));
    CHECK(eb.field == 6.0);
    CHECK(eb.total == eb.interfacial + eb.field);
    CHECK(eb.per_area == Catch::Approx(eb.total / 8.0));
    CHECK(eb.per_volume == Catch::Approx(eb.total / 64.0));
    CHECK_THROWS_AS(total_energy(u, -1.0), InvalidInput);

    SECTION("explicit arithmetic example") {
        std::vector<std::int8_t> s(64, 1);
        for (int i = 32; i < 64; ++i) s[i] = -1;
        ChargeDensity stripe(dom, s);
        CHECK(perimeter(stripe) == 4.0);
        auto e = total_energy(stripe, 6.0);
        CHECK(e.total == 10.0);
        CHECK(e.per_area == Catch::Approx(10.0 / 8.0));
    }
}

TEST_CASE("admissibility_check returns violations without aborting", "[domain]") {
    DomainSpec zf(2, 8.0, 64, BC::zero_flux);
    Rng rng(7);
    auto balanced = random_charge(zf, rng);
    CHECK(admissibility_check(balanced).empty());

    DomainSpec per(2, 8.0, 64, BC::periodic);
    CHECK(admissibility_check(random_charge(per, rng)).empty());

    DomainSpec fx = DomainSpec::unchecked(2, 8.0, 64, 64, BC::flux);
    auto u = ChargeDensity::constant(fx, 1);
    auto viol = admissibility_check(u, 1.5 * 8.0);  // int g = 1.5 L^{d-1}
    REQUIRE(viol.size() == 1);
    CHECK(viol[0].what.find("flux exceeds bottom capacity") != std::string::npos);
    CHECK(admissibility_check(u, 0.5 * 8.0).empty());
}

TEST_CASE("charge serialization round-trips bit-exactly", "[domain][io]") {
    Rng rng(42);
    for (BC bc : {BC::periodic, BC::free_lateral, BC::zero_flux}) {
        DomainSpec dom(2, 8.0, 64, bc);
        auto u = random_charge(dom, rng);
        const std::string s1 = charge_to_string(u);
        auto v = charge_from_string(s1);
        CHECK(v.domain == u.domain);
        CHECK(v.values == u.values);
        CHECK(charge_to_string(v) == s1);
    }
    SECTION("d=3 and a non-dyadic side length") {
        DomainSpec dom(3, 8.125, 65, BC::periodic);
        auto u = random_charge(dom, rng);
        const std::string s1 = charge_to_string(u);
        auto v = charge_from_string(s1);
        CHECK(v.domain.L == u.domain.L);
        CHECK(v.values == u.values);
        CHECK(charge_to_string(v) == s1);
    }
}

TEST_CASE("SigmaEstimate sanity", "[domain]") {
    CHECK_THROWS_AS(SigmaEstimate(BC::periodic, 8.0, 0.0, SigmaMethod::stripe, true), InvalidInput);
    SigmaEstimate s(BC::periodic, 8.0, 1.0, SigmaMethod::anneal, true);
    CHECK(s.certified_upper);
}
