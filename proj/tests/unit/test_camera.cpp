#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "flametomo/camera.hpp"
#include "flametomo/error.hpp"

using namespace flametomo;

namespace {

CameraModel identity_camera() {
    CameraModel c;
    c.fx = c.fy = 100.0;
    c.cx = c.cy = 32.0;
    return c;
}

}  // namespace

TEST(Projection, OpticalAxisHitsPrincipalPoint) {
    const CameraModel cam = identity_camera();
    for (double z : {0.5, 3.0, 1e4}) {
        const auto p = project_world_to_pixel(Vec3(0, 0, z), cam);
        ASSERT_TRUE(p);
        EXPECT_EQ(p->u, cam.cx);
        EXPECT_EQ(p->v, cam.cy);
        EXPECT_EQ(p->depth, z);
    }
}

TEST(Projection, OffAxisPoint) {
    const auto p = project_world_to_pixel(Vec3(1, 0, 1), identity_camera());
    ASSERT_TRUE(p);
    EXPECT_DOUBLE_EQ(p->u, 132.0);
    EXPECT_DOUBLE_EQ(p->v, 32.0);
}

TEST(Projection, BehindCameraIsNotProjectable) {
    const CameraModel cam = identity_camera();
    EXPECT_FALSE(project_world_to_pixel(Vec3(0, 0, 0), cam));
    EXPECT_FALSE(project_world_to_pixel(Vec3(1, 1, -2), cam));
    EXPECT_FALSE(project_world_to_pixel(Vec3(NAN, 0, 2), cam));
}

TEST(Camera, ValidateRejectsBadModels) {
    CameraModel c = identity_camera();
    EXPECT_NO_THROW(c.validate());
    c.fx = 0;
    EXPECT_THROW(c.validate(), ValidationError);
    c = identity_camera();
    c.cx = 64;
    c.width = 64;
    EXPECT_THROW(c.validate(), ValidationError);
    c = identity_camera();
    c.rotation(0, 0) = -1;  // reflection
    EXPECT_THROW(c.validate(), ValidationError);
    c = identity_camera();
    c.rotation(0, 1) = 1e-6;
    EXPECT_THROW(c.validate(), ValidationError);
}

TEST(Rays, PrincipalPixelFollowsForwardAxis) {
    const CameraModel cam = identity_camera();
    const Ray r = generate_ray(cam, cam.cx, cam.cy, SamplingConfig{});
    EXPECT_NEAR((r.direction - Vec3::UnitZ()).norm(), 0.0, 1e-15);
    EXPECT_EQ(r.origin, Vec3::Zero());
    EXPECT_EQ(r.near, 37.5);
    EXPECT_EQ(r.far, 82.5);
}

TEST(Rays, OppositeCamerasGiveOppositeDirections) {
    const auto rig = build_rig(RigConfig{});
    ASSERT_EQ(rig.size(), 12u);
    const SamplingConfig q;
    for (int k = 0; k < 6; ++k) {
        const CameraModel& a = rig[k];
        const CameraModel& b = rig[k + 6];
        const Vec3 sum = generate_ray(a, a.cx, a.cy, q).direction + generate_ray(b, b.cx, b.cy, q).direction;
        EXPECT_LT(sum.norm(), 1e-9) << "pair " << k;
    }
}

TEST(Rays, OutOfBoundsPixelRejected) {
    const CameraModel cam = identity_camera();
    EXPECT_THROW(generate_ray(cam, -0.5, 3, SamplingConfig{}), ValidationError);
    EXPECT_THROW(generate_ray(cam, 3, 64, SamplingConfig{}), ValidationError);
    EXPECT_NO_THROW(generate_ray(cam, 63.5, 0, SamplingConfig{}));
}

TEST(Rays, EverySampleReprojectsToItsPixel) {
    const auto rig = build_rig(RigConfig{});
    SamplingConfig q = default_sampling_for(RigConfig{});
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> px(0.0, 63.999);
    for (const CameraModel& cam : rig) {
        for (int i = 0; i < 20; ++i) {
            const double u = px(rng), v = px(rng);
            const Ray r = generate_ray(cam, u, v, q);
            EXPECT_NEAR(r.direction.norm(), 1.0, 1e-12);
            for (const Vec3& p : sample_ray(r, q, rng)) {
                const auto back = project_world_to_pixel(p, cam);
                ASSERT_TRUE(back);
                EXPECT_NEAR(back->u, u, 1e-6);
                EXPECT_NEAR(back->v, v, 1e-6);
            }
        }
    }
}

TEST(Rays, ProjectUnprojectRoundTrip1000Points) {
    const CameraModel cam = build_rig(RigConfig{})[5];
    const SamplingConfig q = default_sampling_for(RigConfig{});
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> cube(-20.0, 20.0);
    int checked = 0;
    while (checked < 1000) {
        const Vec3 p(cube(rng), cube(rng), cube(rng));
        const auto px = project_world_to_pixel(p, cam);
        ASSERT_TRUE(px);
        if (px->u < 0 || px->u >= cam.width || px->v < 0 || px->v >= cam.height) continue;
        const Ray r = generate_ray(cam, px->u, px->v, q);
        // Walk the ray to the recorded depth and project again.
        const double t = px->depth / cam.forward().dot(r.direction);
        const auto again = project_world_to_pixel(r.at(t), cam);
        ASSERT_TRUE(again);
        EXPECT_LT(std::hypot(again->u - px->u, again->v - px->v), 1e-6);
        EXPECT_LT((r.at(t) - p).norm(), 1e-9);
        ++checked;
    }
}

TEST(Rig, OpticalAxesPassThroughCenter) {
    RigConfig cfg;
    const auto rig = build_rig(cfg);
    for (std::size_t k = 0; k < rig.size(); ++k) {
        const CameraModel& cam = rig[k];
        EXPECT_NO_THROW(cam.validate());
        EXPECT_EQ(cam.id, static_cast<int>(k));
        const Vec3 c = cam.center();
        const Vec3 f = cam.forward();
        // Distance from the origin to the line c + t f.
        const double miss = (c - c.dot(f) * f).norm();
        EXPECT_LT(miss, 1e-6);
        EXPECT_NEAR(c.norm(), 60.0, 1e-9);
        EXPECT_NEAR(c.z(), 0.0, 1e-12);
        const double angle = std::atan2(c.y(), c.x()) * 180.0 / std::numbers::pi;
        const double expected = std::remainder(30.0 * k, 360.0);
        EXPECT_NEAR(std::remainder(angle - expected, 360.0), 0.0, 1e-9);
    }
}

TEST(Rig, DefaultSamplingCoversTargetCube) {
    const SamplingConfig q = default_sampling_for(RigConfig{});
    EXPECT_EQ(q.count, 45);
    EXPECT_DOUBLE_EQ(q.near, 37.5);
    EXPECT_DOUBLE_EQ(q.far, 82.5);
    EXPECT_DOUBLE_EQ(q.step(), 1.0);
}

TEST(Sampling, MidpointsOfUnitStrata) {
    SamplingConfig q{45, 0.0, 45.0, SamplingMode::DeterministicMidpoint, 0};
    const auto s = sample_distances(q);
    ASSERT_EQ(s.size(), 45u);
    for (int i = 0; i < 45; ++i) EXPECT_DOUBLE_EQ(s[i], i + 0.5);
}

TEST(Sampling, StratifiedIsSeeded) {
    SamplingConfig q{45, 2.0, 47.0, SamplingMode::StratifiedRandom, 99};
    EXPECT_EQ(sample_distances(q), sample_distances(q));
    SamplingConfig other = q;
    other.seed = 100;
    EXPECT_NE(sample_distances(q), sample_distances(other));
}

TEST(Sampling, StratifiedStaysInStrataWithUniformMean) {
    SamplingConfig q{45, 37.5, 82.5, SamplingMode::StratifiedRandom, 5};
    std::mt19937_64 rng(q.seed);
    constexpr int kDraws = 10000;
    std::vector<double> sum(45, 0.0);
    for (int d = 0; d < kDraws; ++d) {
        const auto s = sample_distances(q, rng);
        for (int i = 0; i < 45; ++i) {
            const double lo = q.near + i * q.step();
            ASSERT_GE(s[i], lo);
            ASSERT_LE(s[i], lo + q.step());
            if (i > 0) ASSERT_LT(s[i - 1], s[i]);
            sum[i] += s[i];
        }
    }
    // Uniform on a unit stratum: sigma of the mean = 1 / sqrt(12 n).
    const double sigma = q.step() / std::sqrt(12.0 * kDraws);
    for (int i = 0; i < 45; ++i) {
        const double mid = q.near + (i + 0.5) * q.step();
        EXPECT_NEAR(sum[i] / kDraws, mid, 3.0 * sigma) << "stratum " << i;
    }
}

TEST(Sampling, StrictlyIncreasingForBothModes) {
    for (auto mode : {SamplingMode::StratifiedRandom, SamplingMode::DeterministicMidpoint}) {
        for (int n : {1, 2, 45, 360}) {
            SamplingConfig q{n, 1.0, 3.0, mode, 3};
            const auto s = sample_distances(q);
            for (std::size_t i = 1; i < s.size(); ++i) EXPECT_LT(s[i - 1], s[i]);
        }
    }
}

TEST(Sampling, SamplePositionsLieOnRay) {
    const CameraModel cam = build_rig(RigConfig{})[2];
    SamplingConfig q = default_sampling_for(RigConfig{});
    q.mode = SamplingMode::DeterministicMidpoint;
    const Ray r = generate_ray(cam, 10, 50, q);
    const auto pts = sample_ray(r, q);
    const auto s = sample_distances(q);
    ASSERT_EQ(pts.size(), s.size());
    for (std::size_t i = 0; i < s.size(); ++i) EXPECT_EQ(pts[i], r.at(s[i]));
}

TEST(Sampling, InvalidConfigRejected) {
    EXPECT_THROW((SamplingConfig{0, 0, 1}).validate(), ValidationError);
    EXPECT_THROW((SamplingConfig{4, 2, 2}).validate(), ValidationError);
    EXPECT_THROW((SamplingConfig{4, -1, 2}).validate(), ValidationError);
    EXPECT_EQ(sampling_mode_from_string("deterministic-midpoint"), SamplingMode::DeterministicMidpoint);
    EXPECT_THROW(sampling_mode_from_string("uniform"), ValidationError);
}
