#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "certsgd/config.hpp"

using namespace certsgd;
using nlohmann::json;

namespace {

json base() {
  return json::parse(R"({
    "problem": "quadratic", "dim": 2, "mu": [1, 2], "anchor": [0.3, -0.2],
    "region": {"kind": "ball", "center": [0, 0], "radius": 1.0},
    "noise": {"kind": "gaussian", "sigma": 1.0},
    "schedule": {"kind": "polynomial", "gamma": 0.75, "eta0": 0.5},
    "confidence": {"alpha": 0.05},
    "run": {"x1": [-0.6, 0.5], "t_cap": 500, "trace_stride": 10}
  })");
}

std::string error_of(const json& j) {
  try {
    parse_config(j);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Config, ParsesAllBlocks) {
  const auto c = parse_config(base());
  EXPECT_EQ(c.dim, 2);
  EXPECT_EQ(c.mu, (std::vector<double>{1, 2}));
  EXPECT_EQ(c.region_kind, "ball");
  EXPECT_EQ(c.schedule_kind, "polynomial");
  EXPECT_EQ(c.gamma, 0.75);
  EXPECT_EQ(c.eta0, 0.5);
  EXPECT_EQ(c.alpha, 0.05);
  EXPECT_EQ(c.t_cap, 500u);
  EXPECT_EQ(c.trace_stride, 10u);
  ASSERT_TRUE(c.x1);
  const auto s = build_setup(c);
  EXPECT_EQ(s.schedule.kind(), ScheduleKind::kPolynomial);
  EXPECT_EQ(s.confidence.alpha(), 0.05);
  EXPECT_EQ(start_point(c, s.problem)[0], -0.6);
}

TEST(Config, RoundTripIsIdempotent) {
  for (json j : {base(), json::parse(R"({"problem": "quadratic", "dim": 1, "mu": [0.5],
        "region": {"kind": "box", "lo": [-2], "hi": [2]}, "oracle": false,
        "noise": {"kind": "bounded_uniform", "nu": 0.3},
        "confidence": {"alpha": 0.1, "sigma2": 20.0}})")}) {
    const json once = to_json(parse_config(j));
    const json twice = to_json(parse_config(once));
    EXPECT_EQ(once.dump(), twice.dump());
  }
}

TEST(Config, UnknownKeysNamePath) {
  json j = base();
  j["schedule"]["gama"] = 0.7;
  EXPECT_NE(error_of(j).find("$.schedule.gama"), std::string::npos);
  j = base();
  j["extra"] = 1;
  EXPECT_NE(error_of(j).find("$.extra"), std::string::npos);
}

TEST(Config, ValidationMessages) {
  json j = base();
  j["confidence"]["alpha"] = 0.9;
  EXPECT_NE(error_of(j).find("(0, 2/e)"), std::string::npos);
  j = base();
  j["schedule"]["gamma"] = 0.5;
  EXPECT_NE(error_of(j).find("$.schedule.gamma"), std::string::npos);
  j = base();
  j["mu"] = {1, 2, 3};
  EXPECT_NE(error_of(j).find("$.mu"), std::string::npos);
  j = base();
  j["run"]["x1"] = {2.0, 0.0};
  EXPECT_NE(error_of(j).find("$.run.x1"), std::string::npos);
  j = base();
  j["anchor"] = {3.0, 0.0};
  EXPECT_NE(error_of(j).find("$.anchor"), std::string::npos);
  j = base();
  j["noise"] = {{"kind", "laplace"}};
  EXPECT_NE(error_of(j).find("$.noise.kind"), std::string::npos);
  j = base();
  j["dim"] = "two";
  EXPECT_NE(error_of(j).find("$.dim"), std::string::npos);
  j = base();
  j.erase("region");
  EXPECT_NE(error_of(j).find("$.region"), std::string::npos);
}

TEST(Config, ZeroNoiseNeedsDeclaredProxy) {
  json j = base();
  j["noise"]["sigma"] = 0.0;
  const auto c = parse_config(j);
  EXPECT_THROW(build_setup(c), ConfigError);
  j["confidence"]["sigma2"] = 1.0;
  EXPECT_NO_THROW(build_setup(parse_config(j)));
}

TEST(Config, DefaultsAndStartPoint) {
  const ExperimentConfig c;
  EXPECT_NO_THROW(validate(c));
  const auto s = build_setup(c);
  EXPECT_EQ(start_point(c, s.problem), Vec::Zero(2));
  EXPECT_EQ(s.problem.r_x, 2.0);
}

TEST(Config, LoadFromFile) {
  const auto path = std::filesystem::temp_directory_path() / "certsgd_config_test.json";
  {
    std::ofstream f(path);
    f << base().dump(2);
  }
  EXPECT_EQ(to_json(load_config(path.string())), to_json(parse_config(base())));
  {
    std::ofstream f(path);
    f << "{ not json";
  }
  EXPECT_THROW(load_config(path.string()), ConfigError);
  std::filesystem::remove(path);
  EXPECT_THROW(load_config(path.string()), ConfigError);
}
