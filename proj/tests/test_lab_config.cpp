#include <algorithm>
#include <string>

#include <doctest.h>

#include "frontlab/errors.hpp"
#include "frontlab/lab_config.hpp"

using namespace frontlab;

namespace {

const char* kMinimal = R"(name = "exp_spreading"
f = cubic(0.3)
seed = 4
out_dir = "out/spreading"

[exp_spreading]
h = 0.5
R = 12
eps = 0.08
)";

std::string error_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("minimal config round trips") {
  const auto c = parse_config(kMinimal);
  CHECK(c.name == "exp_spreading");
  CHECK(c.f == "cubic(0.3)");
  CHECK(c.seed == 4);
  CHECK(c.number("R") == 12.0);
  CHECK(c.number("h") == 0.5);
  const auto again = parse_config(serialize_config(c));
  CHECK(again == c);
  CHECK(serialize_config(again) == serialize_config(c));
}

TEST_CASE("lists, strings and comments") {
  const auto c = parse_config(R"(# grid search
name = "exp_supersolution"
f = cubic(0.3)
profile = "full"

[exp_supersolution]
sigma = [1, 2, 4]   # three values
delta = [0.05, 0.1]
alpha = 1.0471975511965976
)");
  CHECK(c.profile == "full");
  CHECK(c.list("sigma", {}) == std::vector<double>{1, 2, 4});
  CHECK(parse_config(serialize_config(c)) == c);
}

TEST_CASE("alpha below pi/4 names the bound") {
  const auto msg = error_of(R"(name = "exp_nonstandard"
f = cubic(0.3)

[exp_nonstandard]
alpha = 0.5
)");
  CHECK(msg.find("alpha") != std::string::npos);
  CHECK(msg.find("pi/4") != std::string::npos);
  CHECK(msg.find("line 5") != std::string::npos);
}

TEST_CASE("missing f") {
  CHECK(error_of("name = \"exp_profile\"\n") == "missing required key f");
}

TEST_CASE("unknown keys and malformed lines are rejected with line numbers") {
  const auto typo = error_of("name = \"exp_spreading\"\nf = cubic(0.3)\n[exp_spreading]\nRadius = 3\n");
  CHECK(typo.find("Radius") != std::string::npos);
  CHECK(typo.find("line 4") != std::string::npos);
  CHECK(error_of("name = \"exp_spreading\"\nf = cubic(0.3)\nwhat\n").find("line 3") != std::string::npos);
  CHECK(error_of("name = \"exp_nope\"\nf = cubic(0.3)\n").find("unknown experiment") != std::string::npos);
  CHECK(error_of("name = \"exp_spreading\"\nf = cubic(1.3)\n").find("line 2") != std::string::npos);
  CHECK_FALSE(error_of("name = \"exp_spreading\"\nf = cubic(0.3)\n[exp_profile]\ntol = 1e-8\n").empty());
  CHECK_FALSE(error_of("name = \"exp_spreading\"\nf = cubic(0.3)\n[exp_spreading]\nh = -1\n").empty());
  CHECK_FALSE(error_of("name = \"exp_spreading\"\nf = cubic(0.3)\n[exp_spreading]\nlevel = 1.5\n").empty());
}

TEST_CASE("registry") {
  const auto names = experiment_names();
  for (const char* n : {"exp_profile", "exp_front_speed", "exp_fife_mcleod", "exp_spreading", "exp_spreading_upper",
                        "exp_mean_speed", "exp_nonstandard", "exp_supersolution", "exp_terrace",
                        "exp_planar_liouville", "exp_metastable"})
    CHECK(std::find(names.begin(), names.end(), n) != names.end());
  const auto keys = experiment_keys("exp_spreading");
  CHECK(std::find(keys.begin(), keys.end(), "R") != keys.end());
  CHECK(std::find(keys.begin(), keys.end(), "h") != keys.end());
}
