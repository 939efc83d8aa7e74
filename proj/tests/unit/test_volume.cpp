#include <cmath>
#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "flametomo/atomic_file.hpp"
#include "flametomo/error.hpp"
#include "flametomo/phantom.hpp"
#include "flametomo/volume.hpp"
#include "flametomo/volume_io.hpp"
#include "test_util.hpp"

using namespace flametomo;

namespace {

VoxelGrid constant_grid(double value, GridSpec spec = {}) {
    return {spec, std::vector<double>(spec.voxel_count(), value)};
}

NetworkParams constant_net(double c) {
    NetworkParams p = zero_params(NetworkShape{33, 8, 2, 1, {}});
    p.layers.back().bias(0) = c;
    return p;
}

}  // namespace

TEST(Grid, DefaultIsUnitGridCenteredAtOrigin) {
    const GridSpec g;
    EXPECT_EQ(g.voxel_count(), 45u * 45u * 45u);
    EXPECT_EQ(g.center(0, 0, 0), Vec3(-22, -22, -22));
    EXPECT_EQ(g.center(22, 22, 22), Vec3::Zero());
    EXPECT_EQ(g.center(44, 44, 44), Vec3(22, 22, 22));
    EXPECT_EQ(GridSpec::centered(Vec3::Zero(), 1.0, {45, 45, 45}), g);
    GridSpec bad;
    bad.dims[1] = 0;
    EXPECT_THROW(bad.validate(), ValidationError);
    bad = {};
    bad.spacing.x() = -1;
    EXPECT_THROW(bad.validate(), ValidationError);
}

TEST(SampleVolume, ZeroAndConstantNetworks) {
    GridSpec g = GridSpec::centered(Vec3::Zero(), 2.0, {7, 6, 5});
    for (double v : sample_volume(zero_params(NetworkShape{33, 8, 2, 1, {}}), g).values) EXPECT_EQ(v, 0.0);
    for (double v : sample_volume(constant_net(1000.0), {Vec3::Zero(), Vec3::Ones(), {1, 1, 1}}).values) {
        EXPECT_EQ(v, 1000.0);
    }
    const auto phantom = sample_phantom(preset_phantom("single"), {Vec3::Zero(), Vec3::Ones(), {1, 1, 1}});
    EXPECT_EQ(phantom.values.front(), 1000.0);
}

TEST(SampleVolume, DoublingResolutionKeepsCoincidentValues) {
    const NetworkParams p = init_params(5);
    const GridSpec coarse{Vec3(-10, -10, -10), Vec3::Constant(2.0), {11, 11, 11}};
    const GridSpec fine{Vec3(-10, -10, -10), Vec3::Constant(1.0), {21, 21, 21}};
    const VoxelGrid a = sample_volume(p, coarse);
    const VoxelGrid b = sample_volume(p, fine);
    for (int k = 0; k < 11; ++k) {
        for (int j = 0; j < 11; ++j) {
            for (int i = 0; i < 11; ++i) ASSERT_EQ(a.at(i, j, k), b.at(2 * i, 2 * j, 2 * k));
        }
    }
}

TEST(SampleVolume, BoundaryIsFiniteAndNonNegative) {
    const NetworkParams p = init_params(12);
    const GridSpec edge{Vec3::Constant(-22.5), Vec3::Constant(45.0), {2, 2, 2}};
    for (double v : sample_volume(p, edge).values) {
        EXPECT_TRUE(std::isfinite(v));
        EXPECT_GE(v, 0.0);
    }
}

TEST(Rmse, BasicIdentities) {
    const VoxelGrid truth = sample_phantom(preset_phantom("double"), GridSpec{});
    EXPECT_EQ(rmse(truth, truth), 0.0);
    VoxelGrid shifted = truth;
    for (double& v : shifted.values) v += 5.0;
    EXPECT_NEAR(rmse(shifted, truth), 5.0, 1e-12);

    VoxelGrid other = sample_phantom(preset_phantom("triple"), GridSpec{});
    EXPECT_EQ(rmse(truth, other), rmse(other, truth));
    // Scaling the difference scales the error.
    VoxelGrid scaled = truth;
    for (std::size_t i = 0; i < scaled.values.size(); ++i) {
        scaled.values[i] = truth.values[i] + 3.0 * (other.values[i] - truth.values[i]);
    }
    EXPECT_NEAR(rmse(scaled, truth), 3.0 * rmse(other, truth), 1e-9);

    VoxelGrid small = constant_grid(0.0, GridSpec::centered(Vec3::Zero(), 1.0, {3, 3, 3}));
    EXPECT_THROW(rmse(small, truth), ValidationError);
}

TEST(Slice, ShapesAndSnapping) {
    const VoxelGrid g = sample_phantom(preset_phantom("single"), GridSpec{});
    const SliceImage z = extract_slice(g, Axis::Z, 0.0);
    EXPECT_EQ(z.width, 45);
    EXPECT_EQ(z.height, 45);
    EXPECT_EQ(z.plane, 22);
    for (double c : {-14.0, 16.0}) {
        const SliceImage s = extract_slice(g, Axis::Z, c);
        EXPECT_EQ(s.coordinate, c);
        EXPECT_EQ(s.requested, c);
    }
    const SliceImage snapped = extract_slice(g, Axis::Z, 3.4);
    EXPECT_EQ(snapped.coordinate, 3.0);
    EXPECT_EQ(snapped.requested, 3.4);
    EXPECT_NO_THROW(extract_slice(g, Axis::X, 22.4));
    EXPECT_THROW(extract_slice(g, Axis::Y, 22.6), ValidationError);
    EXPECT_THROW(extract_slice(g, Axis::Z, -40), ValidationError);

    const GridSpec rect{Vec3::Zero(), Vec3::Ones(), {4, 5, 6}};
    const VoxelGrid r = constant_grid(1.0, rect);
    const SliceImage sx = extract_slice(r, Axis::X, 1), sy = extract_slice(r, Axis::Y, 1), sz = extract_slice(r, Axis::Z, 1);
    EXPECT_EQ(std::make_pair(sx.width, sx.height), std::make_pair(5, 6));
    EXPECT_EQ(std::make_pair(sy.width, sy.height), std::make_pair(4, 6));
    EXPECT_EQ(std::make_pair(sz.width, sz.height), std::make_pair(4, 5));
}

TEST(Slice, ValuesComeFromTheRightPlane) {
    GridSpec spec{Vec3::Zero(), Vec3::Ones(), {3, 4, 5}};
    VoxelGrid g{spec, {}};
    for (std::size_t i = 0; i < spec.voxel_count(); ++i) g.values.push_back(static_cast<double>(i));
    const SliceImage y = extract_slice(g, Axis::Y, 2);
    for (int k = 0; k < 5; ++k) {
        for (int i = 0; i < 3; ++i) EXPECT_EQ(y.at(i, k), g.at(i, 2, k));
    }
    const SliceImage x = extract_slice(g, Axis::X, 1);
    for (int k = 0; k < 5; ++k) {
        for (int j = 0; j < 4; ++j) EXPECT_EQ(x.at(j, k), g.at(1, j, k));
    }
}

TEST(Slice, ConstantGridConstantImage) {
    const SliceImage s = extract_slice(constant_grid(412.0), Axis::Z, 5);
    for (double v : s.values) EXPECT_EQ(v, 412.0);
}

TEST(Slice, CenteredFireballIsRadiallySymmetric) {
    const SliceImage s = extract_slice(sample_phantom(preset_phantom("single"), GridSpec{}), Axis::Z, 0);
    double best = 0;
    int bi = -1, bj = -1;
    for (int r = 0; r < 45; ++r) {
        for (int c = 0; c < 45; ++c) {
            if (s.at(c, r) > best) best = s.at(c, r), bi = c, bj = r;
            EXPECT_EQ(s.at(c, r), s.at(44 - c, r));
            EXPECT_EQ(s.at(c, r), s.at(c, 44 - r));
            EXPECT_EQ(s.at(c, r), s.at(r, c));
        }
    }
    EXPECT_EQ(bi, 22);
    EXPECT_EQ(bj, 22);
}

TEST(RelativeError, Basics) {
    SliceImage truth;
    truth.width = 2;
    truth.height = 1;
    truth.values = {1000.0, 0.0};
    SliceImage recon = truth;
    const SliceImage zero = relative_error_map(recon, truth);
    EXPECT_EQ(zero.values, (std::vector<double>{0.0, 0.0}));
    EXPECT_EQ(zero.kind, SliceKind::RelativeError);
    recon.values = {950.0, 0.5};
    const SliceImage e = relative_error_map(recon, truth, 1.0);
    EXPECT_NEAR(e.values[0], 0.05, 1e-15);
    EXPECT_EQ(e.values[1], 0.5);
    SliceImage wrong = truth;
    wrong.width = 1;
    wrong.height = 2;
    EXPECT_THROW(relative_error_map(wrong, truth), ValidationError);
}

TEST(ShellCore, ErrorConcentratedOnShellIsDetected) {
    const Fireball f = preset_phantom("single").fireballs[0];
    const VoxelGrid truth = sample_phantom(preset_phantom("single"), GridSpec{});
    VoxelGrid recon = truth;
    for (int k = 0; k < 45; ++k) {
        for (int j = 0; j < 45; ++j) {
            for (int i = 0; i < 45; ++i) {
                const double d = (truth.spec.center(i, j, k) - f.center).norm();
                recon.values[recon.index(i, j, k)] *= d > 0.8 * f.radius ? 1.2 : 1.01;
            }
        }
    }
    const ShellCoreError sc = shell_core_error(recon, truth, f);
    EXPECT_NEAR(sc.shell_mean, 0.2, 1e-9);
    EXPECT_NEAR(sc.core_mean, 0.01, 1e-9);
    EXPECT_GT(sc.ratio(), 1.0);
    EXPECT_GT(sc.shell_voxels, sc.core_voxels);
}

TEST(VolumeFile, RoundTripAndSidecar) {
    TempDir dir;
    const VoxelGrid g = sample_phantom(preset_phantom("triple"), GridSpec::centered(Vec3(1, 2, 3), 1.5, {9, 8, 7}));
    write_volume(g, dir / "v.f64");
    EXPECT_EQ(std::filesystem::file_size(dir / "v.f64"), g.values.size() * 8);
    const VoxelGrid back = read_volume(dir / "v.f64");
    EXPECT_EQ(back.spec, g.spec);
    EXPECT_EQ(back.values, g.values);
    const auto sidecar = nlohmann::json::parse(read_file_text(volume_sidecar_path(dir / "v.f64")));
    EXPECT_EQ(sidecar.at("units"), "K");
    EXPECT_EQ(sidecar.at("dims"), (std::vector<int>{9, 8, 7}));
}

TEST(VolumeFile, SingleBitCorruptionDetected) {
    TempDir dir;
    const VoxelGrid g = sample_phantom(preset_phantom("single"), GridSpec{});
    write_volume(g, dir / "v.f64");
    auto bytes = read_file_bytes(dir / "v.f64");
    bytes[12345] ^= 0x04;
    write_file_atomic(dir / "v.f64", bytes);
    EXPECT_THROW(read_volume(dir / "v.f64"), ChecksumError);
    EXPECT_THROW(read_volume(dir / "absent.f64"), IoError);
}

TEST(SliceFile, GraymapMappingAndRoundTrip) {
    TempDir dir;
    const SliceImage s = extract_slice(sample_phantom(preset_phantom("single"), GridSpec{}), Axis::Z, 0);
    write_slice(s, dir / "z0");
    const GrayImage pgm = read_pgm(dir / "z0.pgm");
    EXPECT_EQ(pgm.maxval, 65535);
    EXPECT_EQ(pgm.width, 45);
    EXPECT_EQ(pgm.at(22, 22), 65535);
    const GrayMapping m = auto_mapping(s);
    for (int r = 0; r < 45; ++r) {
        for (int c = 0; c < 45; ++c) {
            const double expected = std::round(65535.0 * (s.at(c, r) - m.lo) / (m.hi - m.lo));
            ASSERT_EQ(pgm.at(c, r), expected);
        }
    }
    const SliceImage back = read_slice(dir / "z0");
    EXPECT_EQ(back.values, s.values);
    EXPECT_EQ(back.axis, Axis::Z);
    EXPECT_EQ(back.coordinate, 0.0);

    const SliceImage flat = extract_slice(constant_grid(300.0), Axis::X, 0);
    const GrayImage gflat = slice_to_graymap(flat, auto_mapping(flat));
    for (auto v : gflat.pixels) EXPECT_EQ(v, gflat.pixels.front());
    const GrayImage clamped = slice_to_graymap(flat, GrayMapping{0.0, 100.0});
    for (auto v : clamped.pixels) EXPECT_EQ(v, 65535);
}
