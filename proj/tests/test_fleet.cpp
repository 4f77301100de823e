#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "pevdr/errors.hpp"
#include "pevdr/fleet.hpp"

using namespace pevdr;

namespace {

std::string fixture_path(const std::string& name) {
    const char* root = std::getenv("PEVDR_SOURCE_DIR");
    REQUIRE(root != nullptr);
    return std::string(root) + "/data/fixtures/" + name;
}

std::string zeros24() {
    std::string out;
    for (int h = 0; h < 24; ++h) out += ",0";
    return out;
}

} // namespace

TEST_CASE("soc_at_arrival boundary and reference-pack values") {
    CHECK(soc_at_arrival(0.0, 24.0) == 24.0);
    CHECK(soc_at_arrival(24.0, 24.0) == 0.0);
    CHECK(soc_at_arrival(6.0, 24.0) == doctest::Approx(18.0).epsilon(1e-12));
    CHECK_THROWS_AS(soc_at_arrival(30.0, 24.0), InfeasibleError);
    CHECK_THROWS_AS(soc_at_arrival(-1.0, 24.0), InfeasibleError);
}

TEST_CASE("soc_at_arrival closure: SOC + E = 24 at the reference pack") {
    for (double e : {0.0, 3.7, 10.0, 16.0, 24.0}) {
        CHECK(soc_at_arrival(e, 24.0) + e == doctest::Approx(24.0).epsilon(1e-12));
    }
}

TEST_CASE("permissible_slots wrap, daytime and single-slot cases") {
    PevProfile overnight;
    overnight.arrival = 19;
    overnight.departure = 7;
    const auto wrap = permissible_slots(overnight);
    CHECK(wrap.size() == 13);
    CHECK(wrap.front() == 19);
    CHECK(wrap.back() == 7);

    PevProfile daytime;
    daytime.arrival = 9;
    daytime.departure = 17;
    const auto day = permissible_slots(daytime);
    CHECK(day.size() == 9);
    CHECK(day.front() == 9);
    CHECK(day.back() == 17);

    PevProfile single;
    single.arrival = 12;
    single.departure = 12;
    const auto one = permissible_slots(single);
    CHECK(one.size() == 1);
    CHECK(one.front() == 12);
}

TEST_CASE("permissible_slots always distinct, contains both endpoints") {
    for (int a = 1; a <= 24; ++a) {
        for (int b = 1; b <= 24; ++b) {
            PevProfile p;
            p.arrival = a;
            p.departure = b;
            auto slots = permissible_slots(p);
            CHECK(slots.size() >= 1);
            CHECK(slots.size() <= 24);
            CHECK(std::find(slots.begin(), slots.end(), a) != slots.end());
            CHECK(std::find(slots.begin(), slots.end(), b) != slots.end());
            auto sorted = slots;
            std::sort(sorted.begin(), sorted.end());
            CHECK(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end());
        }
    }
}

TEST_CASE("synthesize_fleet with point-mass distributions yields that profile") {
    FleetConfig cfg;
    cfg.n_users = 1;
    cfg.arrival_mean = 19.0;
    cfg.arrival_sd = 0.0;
    cfg.departure_mean = 7.0;
    cfg.departure_sd = 0.0;
    cfg.energy_min = 10.0;
    cfg.energy_max = 10.0;
    const auto users = synthesize_fleet(cfg, 42);
    REQUIRE(users.size() == 1);
    CHECK(users[0].pev.arrival == 19);
    CHECK(users[0].pev.departure == 7);
    CHECK(users[0].pev.energy_need == doctest::Approx(10.0).epsilon(1e-12));
    CHECK(users[0].pev.power_limit == 1.8);
    CHECK(users[0].pev.capacity == 24.0);
}

TEST_CASE("synthesize_fleet default draws all validate") {
    FleetConfig cfg;
    cfg.n_users = 1000;
    const auto users = synthesize_fleet(cfg, 7);
    REQUIRE(users.size() == 1000);
    for (const auto& u : users) {
        CHECK_NOTHROW(validate_profile(u.pev));
        CHECK_NOTHROW(validate_household(u.home));
        const auto window = permissible_slots(u.pev);
        CHECK(u.pev.energy_need <= u.pev.power_limit * static_cast<double>(window.size()) + 1e-9);
    }
}

TEST_CASE("synthesize_fleet is deterministic per seed") {
    FleetConfig cfg;
    cfg.n_users = 20;
    const auto a = synthesize_fleet(cfg, 99);
    const auto b = synthesize_fleet(cfg, 99);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].pev.arrival == b[i].pev.arrival);
        CHECK(a[i].pev.departure == b[i].pev.departure);
        CHECK(a[i].pev.energy_need == b[i].pev.energy_need);
        for (int h = 0; h < 24; ++h) {
            CHECK(a[i].home.baseline[static_cast<std::size_t>(h)] ==
                  b[i].home.baseline[static_cast<std::size_t>(h)]);
        }
    }
}

TEST_CASE("load_fleet parses a plain overnight row") {
    std::istringstream in("19,7,10,1.8,24" + zeros24() + "\n");
    const auto users = load_fleet(in);
    REQUIRE(users.size() == 1);
    CHECK(users[0].pev.arrival == 19);
    CHECK(users[0].pev.departure == 7);
    CHECK(users[0].pev.energy_need == 10.0);
    for (double v : users[0].home.baseline) CHECK(v == 0.0);
}

TEST_CASE("load_fleet rejects an undeliverable energy need naming the row") {
    // 2-slot window, 1.8 kW: at most 3.6 kWh deliverable.
    std::istringstream in("9,10,30,1.8,24" + zeros24() + "\n");
    CHECK_THROWS_WITH_AS(load_fleet(in), doctest::Contains("row 1"), ParseError);
}

TEST_CASE("load_fleet rejects wrong field counts") {
    std::istringstream in("19,7,10,1.8\n");
    CHECK_THROWS_AS(load_fleet(in), ParseError);
}

TEST_CASE("shipped fleet fixture loads with 50 validated users") {
    std::ifstream file(fixture_path("fleet.csv"));
    REQUIRE(file.good());
    const auto users = load_fleet(file);
    CHECK(users.size() == 50);
    for (const auto& u : users) CHECK_NOTHROW(validate_profile(u.pev));
}

TEST_CASE("synthesize_fleet rejects an impossible configuration") {
    FleetConfig cfg;
    cfg.n_users = 1;
    cfg.arrival_mean = 12.0;
    cfg.arrival_sd = 0.0;
    cfg.departure_mean = 12.0;
    cfg.departure_sd = 0.0;  // single-slot window
    cfg.energy_min = 20.0;
    cfg.energy_max = 20.0;   // cannot deliver 20 kWh in one 1.8 kW slot
    CHECK_THROWS_AS(synthesize_fleet(cfg, 1), ContractError);
}
