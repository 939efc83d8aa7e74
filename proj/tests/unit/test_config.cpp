#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "flametomo/config.hpp"
#include "flametomo/error.hpp"
#include "test_util.hpp"

using namespace flametomo;

namespace {

std::string error_of(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST(Config, EmptyFileGivesDefaults) {
    for (const char* text : {"", "  \n", "{}"}) {
        const PipelineConfig c = parse_config(text);
        EXPECT_EQ(c.rig.camera_count, 12);
        EXPECT_EQ(c.rig.radius, 60.0);
        EXPECT_EQ(c.rig.angular_spacing_deg, 30.0);
        EXPECT_EQ(c.rig.width, 64);
        EXPECT_EQ(c.rig.fx, 64.0);
        EXPECT_EQ(c.rig.cx, 32.0);
        EXPECT_EQ(c.sampling.count, 45);
        EXPECT_EQ(c.sampling.near, 37.5);
        EXPECT_EQ(c.sampling.far, 82.5);
        EXPECT_EQ(c.sampling.mode, SamplingMode::DeterministicMidpoint);
        EXPECT_EQ(c.encoding.levels, 5);
        EXPECT_TRUE(c.encoding.include_raw);
        EXPECT_EQ(c.network, NetworkShape{});
        EXPECT_EQ(c.network.input_dim, 33);
        EXPECT_EQ(c.train.decay, 0.95);
        EXPECT_EQ(c.train.batch_size, 1024);
        EXPECT_EQ(c.train.epochs, 20);
        EXPECT_EQ(c.train.sampling_mode, SamplingMode::StratifiedRandom);
        EXPECT_EQ(c.train.adam.beta1, 0.9);
        EXPECT_EQ(c.train.adam.beta2, 0.999);
        EXPECT_EQ(c.train.adam.epsilon, 1e-8);
        EXPECT_EQ(c.grid, GridSpec{});
        EXPECT_EQ(c.checkpoint_every, 0);
        EXPECT_EQ(c, PipelineConfig{});
    }
}

TEST(Config, RangeViolationNamesKey) {
    EXPECT_NE(error_of(R"({"train":{"initial_lr":-1}})").find("initial_lr"), std::string::npos);
    EXPECT_NE(error_of(R"({"train":{"decay":0}})").find("train.decay"), std::string::npos);
    EXPECT_NE(error_of(R"({"rig":{"cx":64}})").find("rig.cx"), std::string::npos);
    EXPECT_NE(error_of(R"({"sampling":{"far":10}})").find("sampling.far"), std::string::npos);
    EXPECT_NE(error_of(R"({"network":{"skip_layer":6}})").find("skip_layer"), std::string::npos);
    EXPECT_NE(error_of(R"({"grid":{"dims":[4,0,4]}})").find("grid.dims"), std::string::npos);
    EXPECT_NE(error_of(R"({"train":{"precision":"half"}})").find("train.precision"), std::string::npos);
    EXPECT_NE(error_of(R"({"train":{"epochs":"many"}})").find("train.epochs"), std::string::npos);
}

TEST(Config, UnknownKeysAreFatal) {
    EXPECT_NE(error_of(R"({"train":{"learning_rate":0.1}})").find("train.learning_rate"), std::string::npos);
    EXPECT_NE(error_of(R"({"trian":{}})").find("trian"), std::string::npos);
    EXPECT_NE(error_of(R"({"rig":[]})").find("rig"), std::string::npos);
}

TEST(Config, ParseErrorCarriesLine) {
    const std::string msg = error_of("{\n  \"train\": {\n    \"epochs\": 3,\n  }\n}\n");
    EXPECT_NE(msg.find("line 4"), std::string::npos) << msg;
}

TEST(Config, NearFarFollowTheRig) {
    const PipelineConfig c = parse_config(R"({"rig":{"radius":100}})");
    EXPECT_EQ(c.sampling.near, 77.5);
    EXPECT_EQ(c.sampling.far, 122.5);
    const PipelineConfig d = parse_config(R"({"rig":{"radius":100},"sampling":{"near":70,"far":130,"count":60}})");
    EXPECT_EQ(d.sampling.near, 70.0);
    EXPECT_EQ(d.sampling.count, 60);
}

TEST(Config, InputWidthFollowsEncoding) {
    const PipelineConfig c = parse_config(R"({"encoding":{"levels":3,"include_raw":false}})");
    EXPECT_EQ(c.network.input_dim, 18);
}

TEST(Config, DumpLoadRoundTrip) {
    const std::string text = R"({
      "rig": {"camera_count": 8, "angular_spacing_deg": 45, "height": 2.5},
      "sampling": {"count": 90, "mode": "stratified-random", "seed": 18446744073709551615},
      "encoding": {"levels": 6, "domain_center": [1, 2, 3]},
      "network": {"hidden_width": 128, "reduce_widths": [32]},
      "train": {"initial_lr": 0.002, "epochs": 7, "precision": "float64", "checkpoint_every": 2},
      "grid": {"spacing": 0.5, "dims": [90, 90, 90], "origin": [-22.25, -22.25, -22.25]}
    })";
    const PipelineConfig a = parse_config(text);
    EXPECT_EQ(a.sampling.seed, 18446744073709551615ULL);
    EXPECT_EQ(a.network.input_dim, 39);
    EXPECT_EQ(a.grid.spacing, Vec3::Constant(0.5));
    const PipelineConfig b = parse_config(dump_config(a));
    EXPECT_EQ(a, b);
    EXPECT_EQ(dump_config(a), dump_config(b));
    EXPECT_EQ(config_to_json(b).at("train").at("checkpoint_every"), 2);

    TempDir dir;
    write_text(dir / "c.json", dump_config(a));
    EXPECT_EQ(load_config(dir / "c.json"), a);
    EXPECT_THROW(load_config(dir / "none.json"), IoError);
}
