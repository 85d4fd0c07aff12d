#include <doctest.h>

#include <random>

#include "cfj/association.hpp"
#include "cfj/capacity.hpp"
#include "cfj/propagation.hpp"
#include "support.hpp"

using namespace cfj;

TEST_SUITE("association") {
  TEST_CASE("ties go to the lowest index") {
    const auto s = Scenario::make("t", {{0, 0}, {10, 0}, {30, 30}, {0, 10}, {20, 0}},
                                  {{10, 10}}, {});
    // APs 2 and 4 (1-based) are both exactly 10 m away.
    CHECK(associate_strongest_signal(gain_matrix(s)).ap == std::vector<std::size_t>{1});
  }

  TEST_CASE("single AP") {
    const auto s = Scenario::make("1", {{5, 5}}, {{1, 1}, {40, 40}}, {{3, 3}});
    const auto g = gain_matrix(s);
    CHECK(associate_strongest_signal(g).ap == std::vector<std::size_t>{0, 0});
    CHECK(associate_max_secrecy(s, g).ap == std::vector<std::size_t>{0, 0});
  }

  TEST_CASE("user at an AP picks it") {
    const auto s = Scenario::make("u", {{0, 0}, {20, 20}, {40, 0}}, {{20, 20}}, {});
    CHECK(associate_strongest_signal(gain_matrix(s))[0] == 1);
  }

  TEST_CASE("eve near the nearest AP pushes the user away") {
    // User is slightly nearer AP 1, but an eve sits on AP 1.
    const auto s = Scenario::make("e", {{0, 0}, {30, 0}}, {{14, 0}}, {{0.5, 0}});
    const auto g = gain_matrix(s);
    CHECK(associate_strongest_signal(g)[0] == 0);
    CHECK(associate_max_secrecy(s, g)[0] == 1);
  }

  TEST_CASE("no eves reduces to strongest signal") {
    std::mt19937_64 rng(8);
    for (int i = 0; i < 200; ++i) {
      RandomSpec spec;
      spec.n_aps = 1 + rng() % 8;
      spec.n_users = 1 + rng() % 5;
      spec.n_eves = 0;
      const auto s = generate_random_scenario(spec, rng());
      const auto g = gain_matrix(s);
      CHECK(associate_max_secrecy(s, g) == associate_strongest_signal(g));
    }
  }

  TEST_CASE("idle AP powers") {
    const Association a{{0, 2}};
    CHECK(idle_ap_powers(a, 4, IdleMode::baseline, 1.0).watts == std::vector<double>{1, 0, 1, 0});
    CHECK(idle_ap_powers(a, 4, IdleMode::jamming, 2.0).watts == std::vector<double>(4, 2.0));
    const Association all{{1, 0, 2}};
    CHECK(idle_ap_powers(all, 3, IdleMode::baseline, 1.0) ==
          idle_ap_powers(all, 3, IdleMode::jamming, 1.0));
  }

  TEST_CASE("argmax dominance and permutation equivariance") {
    std::mt19937_64 rng(123);
    for (int trial = 0; trial < 1000; ++trial) {
      const auto s = testing_support::random_small(rng, 6, 4, 3);
      const auto g = gain_matrix(s);
      const auto a = associate_max_secrecy(s, g);
      const auto p = PowerAllocation::uniform(s.n_aps(), s.radio().p_max_watts);
      for (std::size_t k = 0; k < s.n_users(); ++k) {
        const double chosen = user_capacity(g, p, a[k], k, s.radio()) -
                              max_eve_capacity(g, p, a[k], s.radio());
        for (std::size_t n = 0; n < s.n_aps(); ++n) {
          const double alt =
              user_capacity(g, p, n, k, s.radio()) - max_eve_capacity(g, p, n, s.radio());
          CHECK(chosen >= alt);
          if (n < a[k]) CHECK(chosen > alt);
        }
      }

      auto users = s.users();
      std::reverse(users.begin(), users.end());
      const auto r = Scenario::make("r", s.aps(), users, s.eves(), s.radio());
      auto ra = associate_max_secrecy(r, gain_matrix(r)).ap;
      std::reverse(ra.begin(), ra.end());
      CHECK(ra == a.ap);
    }
  }

  TEST_CASE("common scaling of gains and noise keeps both associations") {
    std::mt19937_64 rng(55);
    for (int trial = 0; trial < 100; ++trial) {
      const auto s = testing_support::random_small(rng, 6, 4, 3);
      auto radio = s.radio();
      radio.gain_tx *= 8.0;  // every gain scales by 8
      radio.noise_watts *= 8.0;
      const auto t = Scenario::make("t", s.aps(), s.users(), s.eves(), radio);
      CHECK(associate_strongest_signal(gain_matrix(t)) == associate_strongest_signal(gain_matrix(s)));
      CHECK(associate_max_secrecy(t, gain_matrix(t)) == associate_max_secrecy(s, gain_matrix(s)));
    }
  }

  TEST_CASE("users nearer than every eve keep the strongest-signal choice") {
    const auto s = builtin_scenario(2);
    const auto g = gain_matrix(s);
    CHECK(associate_max_secrecy(s, g) == associate_strongest_signal(g));
  }
}
