#include "flametomo/volume.hpp"

#include <algorithm>
#include <cmath>

#include "flametomo/error.hpp"

namespace flametomo {

void GridSpec::validate() const {
    if (!origin.allFinite()) throw ValidationError("grid origin must be finite");
    if (!spacing.allFinite() || (spacing.array() <= 0.0).any()) {
        throw ValidationError("grid spacing must be positive");
    }
    for (int d : dims) {
        if (d < 1) throw ValidationError("grid dims must be >= 1");
    }
}

GridSpec GridSpec::centered(const Vec3& mid, double spacing, std::array<int, 3> dims) {
    GridSpec g;
    g.dims = dims;
    g.spacing = Vec3::Constant(spacing);
    for (int a = 0; a < 3; ++a) g.origin[a] = mid[a] - 0.5 * (dims[a] - 1) * spacing;
    return g;
}

void VoxelGrid::validate() const {
    spec.validate();
    if (values.size() != spec.voxel_count()) {
        throw ValidationError("voxel grid holds " + std::to_string(values.size()) +
                              " values, expected " + std::to_string(spec.voxel_count()));
    }
    for (double v : values) {
        if (!std::isfinite(v)) throw ValidationError("voxel grid contains non-finite values");
    }
}

namespace {

std::vector<Vec3> voxel_centers(const GridSpec& spec) {
    std::vector<Vec3> pts;
    pts.reserve(spec.voxel_count());
    for (int k = 0; k < spec.dims[2]; ++k)
        for (int j = 0; j < spec.dims[1]; ++j)
            for (int i = 0; i < spec.dims[0]; ++i) pts.push_back(spec.center(i, j, k));
    return pts;
}

}  // namespace

VoxelGrid sample_volume(const NetworkParams& params, const GridSpec& spec) {
    spec.validate();
    const std::vector<Vec3> pts = voxel_centers(spec);
    return {spec, evaluate_points(params, pts)};
}

VoxelGrid sample_phantom(const PhantomSpec& phantom, const GridSpec& spec) {
    spec.validate();
    phantom.validate();
    VoxelGrid g{spec, {}};
    g.values.reserve(spec.voxel_count());
    for (const Vec3& p : voxel_centers(spec)) g.values.push_back(phantom_temperature(phantom, p));
    return g;
}

double rmse(const VoxelGrid& recon, const VoxelGrid& truth) {
    if (!(recon.spec == truth.spec)) throw ValidationError("rmse: grid specs differ");
    if (recon.values.size() != truth.values.size() || recon.values.empty()) {
        throw ValidationError("rmse: value counts differ");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < recon.values.size(); ++i) {
        const double d = recon.values[i] - truth.values[i];
        sum += d * d;
    }
    return std::sqrt(sum / static_cast<double>(recon.values.size()));
}

const char* to_string(Axis a) {
    switch (a) {
        case Axis::X: return "x";
        case Axis::Y: return "y";
        case Axis::Z: return "z";
    }
    return "?";
}

Axis axis_from_string(const std::string& name) {
    if (name == "x") return Axis::X;
    if (name == "y") return Axis::Y;
    if (name == "z") return Axis::Z;
    throw ValidationError("axis must be x, y or z, got '" + name + "'");
}

const char* to_string(SliceKind k) {
    return k == SliceKind::Temperature ? "temperature" : "relative-error";
}

SliceImage extract_slice(const VoxelGrid& grid, Axis axis, double coordinate) {
    grid.validate();
    const int a = static_cast<int>(axis);
    const GridSpec& g = grid.spec;
    const double pos = (coordinate - g.origin[a]) / g.spacing[a];
    if (!std::isfinite(pos) || pos < -0.5 || pos > g.dims[a] - 0.5) {
        throw ValidationError("slice coordinate " + std::to_string(coordinate) +
                              " lies outside the grid along " + to_string(axis));
    }
    const int plane = std::clamp(static_cast<int>(std::lround(pos)), 0, g.dims[a] - 1);

    SliceImage s;
    s.axis = axis;
    s.requested = coordinate;
    s.plane = plane;
    s.coordinate = g.origin[a] + plane * g.spacing[a];
    const int col_axis = axis == Axis::X ? 1 : 0;
    const int row_axis = axis == Axis::Z ? 1 : 2;
    s.width = g.dims[col_axis];
    s.height = g.dims[row_axis];
    s.values.resize(static_cast<std::size_t>(s.width) * s.height);
    for (int row = 0; row < s.height; ++row) {
        for (int col = 0; col < s.width; ++col) {
            std::array<int, 3> ijk{};
            ijk[a] = plane;
            ijk[col_axis] = col;
            ijk[row_axis] = row;
            s.values[static_cast<std::size_t>(row) * s.width + col] =
                grid.at(ijk[0], ijk[1], ijk[2]);
        }
    }
    return s;
}

SliceImage relative_error_map(const SliceImage& recon, const SliceImage& truth, double floor) {
    if (recon.width != truth.width || recon.height != truth.height ||
        recon.values.size() != truth.values.size()) {
        throw ValidationError("relative_error_map: slice dimensions differ");
    }
    if (!(floor > 0.0)) throw ValidationError("relative_error_map: floor must be positive");
    SliceImage out = truth;
    out.kind = SliceKind::RelativeError;
    for (std::size_t i = 0; i < out.values.size(); ++i) {
        out.values[i] =
            std::abs(recon.values[i] - truth.values[i]) / std::max(truth.values[i], floor);
    }
    return out;
}

ShellCoreError shell_core_error(const VoxelGrid& recon, const VoxelGrid& truth,
                                const Fireball& fireball, double floor) {
    if (!(recon.spec == truth.spec)) throw ValidationError("shell_core_error: grid specs differ");
    const GridSpec& g = truth.spec;
    ShellCoreError out;
    double shell_sum = 0.0;
    double core_sum = 0.0;
    for (int k = 0; k < g.dims[2]; ++k) {
        const double z = g.origin.z() + k * g.spacing.z();
        const SliceImage err = relative_error_map(extract_slice(recon, Axis::Z, z),
                                                  extract_slice(truth, Axis::Z, z), floor);
        for (int j = 0; j < g.dims[1]; ++j) {
            for (int i = 0; i < g.dims[0]; ++i) {
                const double d = (g.center(i, j, k) - fireball.center).norm() / fireball.radius;
                const double e = err.at(i, j);
                if (d >= 0.8 && d <= 1.2) {
                    shell_sum += e;
                    ++out.shell_voxels;
                } else if (d <= 0.5) {
                    core_sum += e;
                    ++out.core_voxels;
                }
            }
        }
    }
    if (out.shell_voxels == 0 || out.core_voxels == 0) {
        throw ValidationError("shell_core_error: grid does not resolve the fireball");
    }
    out.shell_mean = shell_sum / static_cast<double>(out.shell_voxels);
    out.core_mean = core_sum / static_cast<double>(out.core_voxels);
    return out;
}

}  // namespace flametomo
