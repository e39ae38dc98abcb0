#include "doctest.h"

#include "contract_forge/model.hpp"
#include "support/fixtures.hpp"
#include "support/generators.hpp"

using namespace contract_forge;
namespace t = contract_forge::testing;

TEST_CASE("the two-type instance validates") {
    Instance inst = t::two_type_four_action();
    CHECK(!validate_instance(inst).has_value());
}

TEST_CASE("a leak of outcome 0 into an effortful action is caught") {
    Instance inst = t::two_type_four_action();
    inst.dist[2] = {rat(1, 10), rat(9, 10), Rat(0)};
    auto v = validate_instance(inst);
    REQUIRE(v.has_value());
    CHECK(v->assumption == "optout_monitoring");
    REQUIRE(v->witness.size() == 1);
    CHECK(v->witness[0] == 2);
}

TEST_CASE("swapped rewards break expected-reward monotonicity") {
    Instance inst = t::two_type_four_action();
    std::swap(inst.rewards[1], inst.rewards[2]);  // now (0, 30, 10)
    auto v = validate_instance(inst);
    REQUIRE(v.has_value());
    CHECK(v->assumption == "expected_reward_increasing");
}

TEST_CASE("row sums must be exactly one") {
    Instance inst = t::two_type_four_action();
    inst.dist[1] = {Rat(0), rat(99, 100), Rat(0)};
    auto v = validate_instance(inst);
    REQUIRE(v.has_value());
    CHECK(v->assumption == "row_stochastic");
    CHECK(v->witness[0] == 1);
}

TEST_CASE("gamma and base-value conventions are enforced") {
    Instance inst = t::two_type_four_action();
    inst.gammas[0] = 1;
    CHECK(validate_instance(inst)->assumption == "gamma_zero");

    inst = t::two_type_four_action();
    inst.gammas = {Rat(0), Rat(3), Rat(1), Rat(10)};
    CHECK(validate_instance(inst)->assumption == "gamma_ordering");

    inst = t::two_type_four_action();
    inst.rewards[0] = 1;
    CHECK(validate_instance(inst)->assumption == "reward_zero");
}

TEST_CASE("type spaces are validated") {
    Instance inst = t::two_type_four_action();
    inst.types = DiscreteTypes{{Rat(4), Rat(1)}, {rat(1, 2), rat(1, 2)}};
    CHECK(validate_instance(inst)->assumption == "type_support_increasing");

    inst.types = DiscreteTypes{{Rat(1), Rat(4)}, {rat(1, 2), rat(1, 3)}};
    CHECK(validate_instance(inst)->assumption == "type_mass_sum");

    inst.types = UniformTypes{Rat(0)};
    CHECK(validate_instance(inst)->assumption == "type_upper_positive");

    inst.types = TabulatedTypes{{Rat(0), Rat(1), Rat(2)},
                                {Rat(0), rat(1, 2), Rat(1)},
                                {rat(1, 2), Rat(0), rat(1, 2)}};
    CHECK(validate_instance(inst)->assumption == "type_density_positive");
}

TEST_CASE("expected rewards match hand values") {
    Instance inst = t::two_type_four_action();
    CHECK(expected_reward(inst, 0) == 0);
    CHECK(expected_reward(inst, 1) == 10);
    CHECK(expected_reward(inst, 2) == 20);
    CHECK(expected_reward(inst, 3) == 30);
    CHECK_THROWS_AS(expected_reward(inst, 4), std::out_of_range);

    Instance menu = t::menu_instance();
    CHECK(expected_reward(menu, 2) == rat(55, 2));  // 27.5
}

TEST_CASE("expected transfers match hand values") {
    Instance inst = t::two_type_four_action();
    const std::vector<Rat> t1 = {Rat(0), Rat(0), Rat(14)};
    const std::vector<Rat> t4 = {Rat(0), Rat(4), Rat(0)};
    CHECK(expected_transfer(inst, t1, 3) == 14);
    CHECK(expected_transfer(inst, t4, 2) == 2);
    const std::vector<Rat> t0 = {Rat(7), Rat(1), Rat(2)};
    CHECK(expected_transfer(inst, t0, 0) == 7);  // action 0 pays the base entry
    CHECK_THROWS_AS(expected_transfer(inst, std::vector<Rat>{Rat(0)}, 1),
                    std::invalid_argument);
}

TEST_CASE("validation is idempotent and rewards stay increasing on random instances") {
    t::Rng rng(7311);
    for (int i = 0; i < 60; ++i) {
        Instance inst = t::random_discrete_instance(rng, 3, 3, 3);
        CHECK(!validate_instance(inst).has_value());
        CHECK(!validate_instance(inst).has_value());  // unchanged, still valid
        Rat prev = expected_reward(inst, 0);
        for (int a = 1; a <= inst.n(); ++a) {
            Rat cur = expected_reward(inst, a);
            CHECK(cur > prev);
            prev = cur;
        }
    }
}

TEST_CASE("expected transfer is linear in the payment vector") {
    t::Rng rng(7312);
    for (int i = 0; i < 40; ++i) {
        Instance inst = t::random_discrete_instance(rng, 3, 3, 2);
        std::vector<Rat> pay(inst.m() + 1);
        for (auto& p : pay) p = rng.fraction(9, 4);
        std::vector<Rat> doubled(pay);
        for (auto& p : doubled) p *= 2;
        for (int a = 0; a <= inst.n(); ++a) {
            CHECK(expected_transfer(inst, doubled, a) ==
                  2 * expected_transfer(inst, pay, a));
        }
    }
}
