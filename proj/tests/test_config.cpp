#include <doctest.h>

#include <cmath>

#include "snappa/config.hpp"

using namespace snappa;

TEST_CASE("expressions") {
  CHECK(eval_expression("1.5") == 1.5);
  CHECK(eval_expression("-pi/2") == doctest::Approx(-kPi / 2));
  CHECK(eval_expression("sqrt(2/3)") == doctest::Approx(std::sqrt(2.0 / 3.0)));
  CHECK(eval_expression("2 * (3 + 4) - 1e-3") == doctest::Approx(13.999));
  CHECK(eval_expression("2^3^2") == 512.0);
  CHECK(eval_expression("-2^2") == -4.0);
  CHECK_THROWS_AS(eval_expression("2 +"), ConfigError);
  CHECK_THROWS_AS(eval_expression("tau"), ConfigError);
  CHECK_THROWS_AS(eval_expression("(1"), ConfigError);
  CHECK_THROWS_AS(eval_expression("1/0"), ConfigError);
}

TEST_CASE("units") {
  CHECK(parse_quantity("1.44 MHz", Quantity::frequency) == doctest::Approx(kTwoPi * 1.44e6));
  CHECK(parse_quantity("-300 kHz", Quantity::frequency) == doctest::Approx(-kTwoPi * 3e5));
  CHECK(parse_quantity("5.523 GHz", Quantity::frequency) == doctest::Approx(kTwoPi * 5.523e9));
  CHECK(parse_quantity("80 us", Quantity::time) == doctest::Approx(80e-6));
  CHECK(parse_quantity("4.2e-6 s", Quantity::time) == doctest::Approx(4.2e-6));
  CHECK(parse_quantity("-pi/2", Quantity::phase) == doctest::Approx(-kPi / 2));
  CHECK(parse_quantity("90 deg", Quantity::phase) == doctest::Approx(kPi / 2));
  CHECK_THROWS_AS(parse_quantity("1.44", Quantity::frequency), ConfigError);
  CHECK_THROWS_AS(parse_quantity("80 uS", Quantity::time), ConfigError);

  for (double x : {kTwoPi * 1.44e6, -kTwoPi * 303075.123456789, 0.1 + 0.2}) {
    CHECK(parse_quantity(format_frequency(x), Quantity::frequency) == doctest::Approx(x).epsilon(1e-15));
    CHECK(eval_expression(format_number(x)) == x);
  }
}

TEST_CASE("documents") {
  const Config c = Config::parse(R"(
# device
[system]
chi = 1.44 MHz   # dispersive shift
t1_qubit = 80 us

[sim]
levels = 12
flag = on
tones = 1, 3 ,5
)");
  CHECK(c.sections() == std::vector<std::string>{"system", "sim"});
  CHECK(c.get("system", "chi", Quantity::frequency) == doctest::Approx(kTwoPi * 1.44e6));
  CHECK(c.get_int("sim", "levels") == 12);
  CHECK(c.get_bool_or("sim", "flag", false));
  CHECK(c.get_list("sim", "tones") == std::vector<std::string>{"1", "3", "5"});
  CHECK(c.get_or("sim", "missing", Quantity::dimensionless, 7.0) == 7.0);
  CHECK_THROWS_AS(c.get("sim", "missing"), ConfigError);
  CHECK_THROWS_AS(c.get("nowhere", "chi"), ConfigError);
  CHECK_THROWS_AS(c.get_int("system", "chi"), ConfigError);

  CHECK_THROWS_AS(Config::parse("key = 1\n"), ConfigError);
  CHECK_THROWS_AS(Config::parse("[a]\nkey = 1\nkey = 2\n"), ConfigError);
  CHECK_THROWS_AS(Config::parse("[a]\n[a]\n"), ConfigError);
  CHECK_THROWS_AS(Config::parse("[a\n"), ConfigError);
  CHECK_THROWS_AS(Config::parse("[a]\njust words\n"), ConfigError);
  CHECK_THROWS_AS(Config::load("no/such/file.cfg"), ConfigError);

  const Config again = Config::parse(c.dump());
  CHECK(again.dump() == c.dump());
}

TEST_CASE("system parameters round trip through a document") {
  SystemParams p = SystemParams::table_s1();
  p.kerr_c = 0.0;
  Config c;
  write_system_params(c, p);
  const SystemParams back = system_params_from(Config::parse(c.dump()));
  CHECK(back.chi == doctest::Approx(p.chi).epsilon(1e-15));
  CHECK(back.kerr_c == 0.0);
  CHECK(back.t2_qubit == p.t2_qubit);
  CHECK(back.delta == doctest::Approx(p.delta).epsilon(1e-15));

  const SystemParams defaults = system_params_from(Config::parse("[system]\n"));
  CHECK(defaults.chi == SystemParams::table_s1().chi);
  CHECK_THROWS_AS(system_params_from(Config::parse("[system]\nt2_qubit = 500 us\n")), ConfigError);
  CHECK_THROWS_AS(stark_fit_from(Config::parse("[stark]\neta1 = -1\n")), ConfigError);
  CHECK(stark_fit_from(Config::parse("[stark]\n")).eta12 == 60.25);
  CHECK_FALSE(model_options_from(Config::parse("[model]\nfree_kerr = off\n")).free_kerr);
}
