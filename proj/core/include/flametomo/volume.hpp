#pragma once

#include <array>
#include <string>
#include <vector>

#include "flametomo/network.hpp"
#include "flametomo/phantom.hpp"
#include "flametomo/types.hpp"

namespace flametomo {

// Regular grid of voxel centres: center(i, j, k) = origin + (i, j, k) * spacing.
struct GridSpec {
    Vec3 origin = Vec3::Constant(-22.0);
    Vec3 spacing = Vec3::Ones();
    std::array<int, 3> dims{45, 45, 45};

    std::size_t voxel_count() const {
        return static_cast<std::size_t>(dims[0]) * dims[1] * dims[2];
    }
    Vec3 center(int i, int j, int k) const {
        return origin + Vec3(i * spacing.x(), j * spacing.y(), k * spacing.z());
    }
    void validate() const;

    bool operator==(const GridSpec&) const = default;

    // Grid with the given dims and isotropic spacing whose middle is `mid`.
    static GridSpec centered(const Vec3& mid, double spacing, std::array<int, 3> dims);
};

// Values in kelvin, x fastest, then y, then z.
struct VoxelGrid {
    GridSpec spec;
    std::vector<double> values;

    std::size_t index(int i, int j, int k) const {
        return (static_cast<std::size_t>(k) * spec.dims[1] + j) * spec.dims[0] + i;
    }
    double at(int i, int j, int k) const { return values[index(i, j, k)]; }
    void validate() const;
};

VoxelGrid sample_volume(const NetworkParams& params, const GridSpec& spec);
VoxelGrid sample_phantom(const PhantomSpec& phantom, const GridSpec& spec);

// sqrt(mean((recon - truth)^2)); throws ValidationError on spec mismatch.
double rmse(const VoxelGrid& recon, const VoxelGrid& truth);

enum class Axis { X = 0, Y = 1, Z = 2 };
enum class SliceKind { Temperature, RelativeError };

const char* to_string(Axis a);
Axis axis_from_string(const std::string& name);
const char* to_string(SliceKind k);

// A plane of a voxel grid. For axis z the image is x (columns) by y (rows);
// axis y: x by z; axis x: y by z.
struct SliceImage {
    Axis axis = Axis::Z;
    double requested = 0.0;  // coordinate asked for
    double coordinate = 0.0;  // world coordinate of the chosen grid plane
    int plane = 0;
    int width = 0;
    int height = 0;
    std::vector<double> values;  // row-major
    SliceKind kind = SliceKind::Temperature;

    double at(int col, int row) const { return values[static_cast<std::size_t>(row) * width + col]; }
};

// Plane nearest to `coordinate`. Throws ValidationError when the coordinate is
// more than half a voxel outside the grid.
SliceImage extract_slice(const VoxelGrid& grid, Axis axis, double coordinate);

// |recon - truth| / max(truth, floor) per pixel.
SliceImage relative_error_map(const SliceImage& recon, const SliceImage& truth,
                              double floor = 1.0);

struct ShellCoreError {
    double shell_mean = 0.0;
    double core_mean = 0.0;
    std::size_t shell_voxels = 0;
    std::size_t core_voxels = 0;
    double ratio() const { return shell_mean / core_mean; }
};

// Mean relative error in the shell {0.8R <= d <= 1.2R} and the core
// {d <= 0.5R} around one fireball, computed from per-plane relative error maps.
ShellCoreError shell_core_error(const VoxelGrid& recon, const VoxelGrid& truth,
                                const Fireball& fireball, double floor = 1.0);

}  // namespace flametomo
