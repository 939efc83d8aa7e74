#include "cli.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "flametomo/atomic_file.hpp"
#include "flametomo/checkpoint.hpp"
#include "flametomo/config.hpp"
#include "flametomo/dataset_io.hpp"
#include "flametomo/error.hpp"
#include "flametomo/gradcheck.hpp"
#include "flametomo/phantom.hpp"
#include "flametomo/projection.hpp"
#include "flametomo/radiometry.hpp"
#include "flametomo/trainer.hpp"
#include "flametomo/volume.hpp"
#include "flametomo/volume_io.hpp"
#include "manifest.hpp"

namespace flametomo::cli {

namespace {

using nlohmann::json;

#ifndef FLAMETOMO_VERSION
#define FLAMETOMO_VERSION "dev"
#endif

// Options shared by every subcommand.
struct Common {
    std::string config_path;
    std::string manifest_path;
    int workers = 0;  // 0: environment, then config
    bool quiet = false;
};

struct Invocation {
    std::ostream& out;
    std::ostream& err;
    RunManifest manifest;
    std::string default_manifest;

    PipelineConfig load(const Common& c) {
        PipelineConfig cfg;
        if (!c.config_path.empty()) {
            cfg = load_config(c.config_path);
            manifest.add_input("config", c.config_path);
        }
        if (c.workers > 0) {
            cfg.train.workers = c.workers;
        } else if (const char* env = std::getenv(kWorkersEnv); env && *env) {
            char* end = nullptr;
            const long w = std::strtol(env, &end, 10);
            if (*end != '\0' || w < 1 || w > 4096) {
                throw ConfigError(std::string(kWorkersEnv) + " must be a positive integer");
            }
            cfg.train.workers = static_cast<int>(w);
        }
        return cfg;
    }

    void record(const PipelineConfig& cfg) {
        manifest.config = config_to_json(cfg);
        manifest.seeds["sampling.seed"] = cfg.sampling.seed;
        manifest.seeds["train.seed"] = cfg.train.seed;
        manifest.seeds["train.init_seed"] = cfg.train.init_seed;
    }

    void output(const std::string& role, const std::string& path) {
        manifest.outputs[role] = path;
        if (default_manifest.empty()) default_manifest = path + ".manifest.jsonl";
    }
};

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--config", c.config_path, "Pipeline config (JSON); defaults when omitted")
        ->check(CLI::ExistingFile);
    sub->add_option("--manifest", c.manifest_path,
                    "Run manifest log (default: <output>.manifest.jsonl)");
    sub->add_option("--workers", c.workers, std::string("Worker threads (default: $") +
                                                kWorkersEnv + ", then config)")
        ->check(CLI::Range(1, 4096));
    sub->add_flag("-q,--quiet", c.quiet, "Suppress progress output");
}

PhantomSpec phantom_input(const std::string& arg, Invocation& inv) {
    const auto names = preset_phantom_names();
    if (std::find(names.begin(), names.end(), arg) != names.end() &&
        !std::filesystem::exists(arg)) {
        inv.manifest.inputs["phantom"] = "preset:" + arg;
        return preset_phantom(arg);
    }
    inv.manifest.add_input("phantom", arg);
    return load_phantom(arg);
}

// ---- phantom ---------------------------------------------------------------

struct PhantomArgs {
    std::string source;
    std::string output;
};

int cmd_phantom(const PhantomArgs& a, const Common& c, Invocation& inv) {
    inv.record(inv.load(c));
    const PhantomSpec spec = phantom_input(a.source, inv);
    spec.validate();
    save_phantom(spec, a.output);
    inv.output("phantom", a.output);
    if (!c.quiet) inv.out << "wrote " << spec.fireballs.size() << " fireball(s) to " << a.output << "\n";
    return kOk;
}

// ---- project ---------------------------------------------------------------

struct ProjectArgs {
    std::string phantom;
    std::string output;
};

int cmd_project(const ProjectArgs& a, const Common& c, Invocation& inv) {
    const PipelineConfig cfg = inv.load(c);
    inv.record(cfg);
    const PhantomSpec spec = phantom_input(a.phantom, inv);
    spec.validate();
    Dataset ds;
    ds.cameras = build_rig(cfg.rig);
    ds.sample_count = cfg.sampling.count;
    ds.near = cfg.sampling.near;
    ds.far = cfg.sampling.far;
    for (const CameraModel& cam : ds.cameras) ds.images.push_back(forward_project(spec, cam, cfg.sampling));
    write_dataset(ds, a.output);
    inv.output("dataset", a.output);
    if (!c.quiet) {
        inv.out << "projected " << ds.images.size() << " views, max " << dataset_max(ds.images)
                << "\n";
    }
    return kOk;
}

// ---- noise -----------------------------------------------------------------

struct NoiseArgs {
    std::string input;
    std::string output;
    std::string kind;
    double intensity = 0.0;
    std::uint64_t seed = 0;
};

int cmd_noise(const NoiseArgs& a, const Common& c, Invocation& inv) {
    inv.record(inv.load(c));
    inv.manifest.seeds["noise.seed"] = a.seed;
    inv.manifest.add_input("dataset", a.input);
    Dataset ds = read_dataset(a.input);
    if (a.kind == "gaussian") {
        ds.images = add_gaussian_noise(ds.images, a.intensity, a.seed);
    } else {
        ds.images = add_salt_pepper_noise(ds.images, a.intensity, a.seed);
    }
    write_dataset(ds, a.output);
    inv.output("dataset", a.output);
    if (!c.quiet) inv.out << "applied " << describe(ds.images.front().provenance) << "\n";
    return kOk;
}

// ---- train -----------------------------------------------------------------

struct TrainArgs {
    std::string dataset;
    std::string output;
    std::string loss_csv;
    std::string resume;
    std::optional<int> checkpoint_every;
    std::optional<int> epochs;
    std::optional<double> lr;
    std::optional<int> batch_size;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> precision;
};

int cmd_train(const TrainArgs& a, const Common& c, Invocation& inv) {
    PipelineConfig cfg = inv.load(c);
    if (a.checkpoint_every) cfg.checkpoint_every = *a.checkpoint_every;
    if (a.epochs) cfg.train.epochs = *a.epochs;
    if (a.lr) cfg.train.initial_lr = *a.lr;
    if (a.batch_size) cfg.train.batch_size = *a.batch_size;
    if (a.seed) cfg.train.seed = *a.seed;
    if (a.precision) cfg.train.precision = precision_from_string(*a.precision);
    cfg.validate();
    inv.record(cfg);
    inv.manifest.add_input("dataset", a.dataset);
    const Dataset ds = read_dataset(a.dataset);

    const std::string csv = a.loss_csv.empty() ? a.output + ".loss.csv" : a.loss_csv;
    inv.output("checkpoint", a.output);
    inv.output("loss_csv", csv);

    LossHistory partial;
    auto observer = [&](const EpochReport& r, const NetworkParams& params) {
        partial.epoch_mean_loss.push_back(r.mean_loss);
        if (!c.quiet) {
            inv.err << "epoch " << r.epoch << "/" << cfg.train.epochs << " loss " << r.mean_loss
                    << " lr " << r.lr_used << " (" << std::fixed << std::setprecision(1)
                    << r.seconds << " s)" << std::defaultfloat << std::setprecision(6) << "\n";
        }
        if (cfg.checkpoint_every > 0 && r.epoch % cfg.checkpoint_every == 0 &&
            r.epoch != cfg.train.epochs) {
            const std::string path = a.output + ".epoch-" + std::to_string(r.epoch);
            write_checkpoint(params, path);
            write_file_atomic(csv, loss_history_csv(partial));
            inv.manifest.outputs["checkpoint.epoch-" + std::to_string(r.epoch)] = path;
        }
    };

    TrainResult result;
    if (!a.resume.empty()) {
        inv.manifest.add_input("resume", a.resume);
        NetworkParams start = read_checkpoint(a.resume);
        if (start.shape != cfg.network || !(start.encoding == cfg.encoding)) {
            throw ConfigError("resume checkpoint architecture differs from the configuration");
        }
        result = train_from(ds, std::move(start), cfg.train, observer);
    } else {
        result = train(ds, cfg.network, cfg.encoding, cfg.train, observer);
    }
    write_checkpoint(result.params, a.output);
    write_file_atomic(csv, loss_history_csv(result.history));
    if (!c.quiet) {
        inv.out << "final epoch loss " << result.history.epoch_mean_loss.back() << ", checkpoint "
                << a.output << "\n";
    }
    return kOk;
}

// ---- export ----------------------------------------------------------------

struct GridArgs {
    std::vector<double> origin;
    std::vector<double> spacing;
    std::vector<int> dims;

    void add(CLI::App* sub) {
        sub->add_option("--origin", origin, "Grid origin x y z (overrides config)")->expected(3);
        sub->add_option("--spacing", spacing, "Grid spacing s or sx sy sz")->expected(1, 3);
        sub->add_option("--dims", dims, "Grid dims nx ny nz")->expected(3);
    }

    GridSpec apply(GridSpec g) const {
        if (origin.size() == 3) g.origin = Vec3(origin[0], origin[1], origin[2]);
        if (spacing.size() == 1) g.spacing = Vec3::Constant(spacing[0]);
        if (spacing.size() == 3) g.spacing = Vec3(spacing[0], spacing[1], spacing[2]);
        if (spacing.size() == 2) throw ValidationError("--spacing takes 1 or 3 values");
        if (dims.size() == 3) g.dims = {dims[0], dims[1], dims[2]};
        g.validate();
        return g;
    }
};

struct ExportArgs {
    std::string checkpoint;
    std::string output;
    GridArgs grid;
};

int cmd_export(const ExportArgs& a, const Common& c, Invocation& inv) {
    PipelineConfig cfg = inv.load(c);
    cfg.grid = a.grid.apply(cfg.grid);
    inv.record(cfg);
    inv.manifest.add_input("checkpoint", a.checkpoint);
    const VoxelGrid grid = sample_volume(read_checkpoint(a.checkpoint), cfg.grid);
    write_volume(grid, a.output);
    inv.output("volume", a.output);
    inv.manifest.outputs["sidecar"] = volume_sidecar_path(a.output);
    if (!c.quiet) {
        inv.out << "exported " << grid.spec.dims[0] << "x" << grid.spec.dims[1] << "x"
                << grid.spec.dims[2] << " volume to " << a.output << "\n";
    }
    return kOk;
}

// ---- slice -----------------------------------------------------------------

struct SliceArgs {
    std::string volume;
    std::string checkpoint;
    std::string phantom;
    std::string axis = "z";
    double coordinate = 0.0;
    std::string output;
    double floor = 1.0;
    std::vector<double> range;
    GridArgs grid;
};

int cmd_slice(const SliceArgs& a, const Common& c, Invocation& inv) {
    PipelineConfig cfg = inv.load(c);
    cfg.grid = a.grid.apply(cfg.grid);
    inv.record(cfg);
    VoxelGrid grid;
    if (!a.volume.empty()) {
        inv.manifest.add_input("volume", a.volume);
        grid = read_volume(a.volume);
    } else {
        inv.manifest.add_input("checkpoint", a.checkpoint);
        grid = sample_volume(read_checkpoint(a.checkpoint), cfg.grid);
    }
    const Axis axis = axis_from_string(a.axis);
    const SliceImage slice = extract_slice(grid, axis, a.coordinate);
    std::optional<GrayMapping> mapping;
    if (a.range.size() == 2) mapping = GrayMapping{a.range[0], a.range[1]};
    write_slice(slice, a.output, mapping);
    inv.output("slice", a.output + ".pgm");
    inv.manifest.outputs["slice.f64"] = a.output + ".f64";
    inv.manifest.outputs["slice.json"] = a.output + ".json";
    if (!a.phantom.empty()) {
        const PhantomSpec spec = phantom_input(a.phantom, inv);
        const VoxelGrid truth = sample_phantom(spec, grid.spec);
        const SliceImage err = relative_error_map(slice, extract_slice(truth, axis, a.coordinate), a.floor);
        const std::string prefix = a.output + "-relerr";
        write_slice(err, prefix, std::nullopt);
        inv.manifest.outputs["relerr"] = prefix + ".pgm";
    }
    if (!c.quiet) {
        inv.out << to_string(axis) << " = " << slice.coordinate << " (plane " << slice.plane
                << ", requested " << slice.requested << "), " << slice.width << "x" << slice.height
                << "\n";
    }
    return kOk;
}

// ---- evaluate --------------------------------------------------------------

struct EvaluateArgs {
    std::string volume;
    std::string phantom;
    std::string truth;
    std::string report;
    double floor = 1.0;
};

int cmd_evaluate(const EvaluateArgs& a, const Common& c, Invocation& inv) {
    inv.record(inv.load(c));
    inv.manifest.add_input("volume", a.volume);
    const VoxelGrid recon = read_volume(a.volume);
    json report;
    VoxelGrid truth;
    std::optional<PhantomSpec> spec;
    if (!a.truth.empty()) {
        inv.manifest.add_input("truth", a.truth);
        truth = read_volume(a.truth);
    } else {
        spec = phantom_input(a.phantom, inv);
        truth = sample_phantom(*spec, recon.spec);
    }
    const double value = rmse(recon, truth);
    report["rmse"] = value;
    report["voxels"] = recon.values.size();
    if (spec) {
        json balls = json::array();
        for (const Fireball& f : spec->fireballs) {
            const ShellCoreError sc = shell_core_error(recon, truth, f, a.floor);
            balls.push_back({{"shell_mean_relative_error", sc.shell_mean},
                             {"core_mean_relative_error", sc.core_mean},
                             {"shell_voxels", sc.shell_voxels},
                             {"core_voxels", sc.core_voxels},
                             {"ratio", sc.core_voxels && sc.core_mean > 0.0 ? json(sc.ratio()) : json()}});
        }
        report["fireballs"] = balls;
    }
    if (!a.report.empty()) {
        write_file_atomic(a.report, report.dump(2) + "\n");
        inv.output("report", a.report);
    }
    inv.out << "rmse " << std::setprecision(10) << value << std::setprecision(6) << "\n";
    if (!c.quiet && spec) {
        for (const auto& b : report["fireballs"]) {
            inv.out << "shell/core relative error " << b["shell_mean_relative_error"].get<double>()
                    << " / " << b["core_mean_relative_error"].get<double>() << "\n";
        }
    }
    return kOk;
}

// ---- gradcheck -------------------------------------------------------------

struct GradcheckArgs {
    std::uint64_t seed = 0;
    int directions = 100;
    double tolerance = 1e-4;
    std::string report;
};

int cmd_gradcheck(const GradcheckArgs& a, const Common& c, Invocation& inv) {
    inv.record(inv.load(c));
    GradcheckConfig g;
    g.seed = a.seed;
    g.directions = a.directions;
    inv.manifest.seeds["gradcheck.seed"] = a.seed;
    const GradcheckReport r = gradient_check(g);
    json report{{"seed", a.seed},
                {"directions", a.directions},
                {"parameters", r.parameter_count},
                {"rays", r.rays},
                {"loss", r.loss},
                {"max_relative_error", r.max_relative_error},
                {"mean_relative_error", r.mean_relative_error},
                {"reduced_steps", r.reduced_steps},
                {"tolerance", a.tolerance},
                {"pass", r.max_relative_error < a.tolerance}};
    if (!a.report.empty()) {
        write_file_atomic(a.report, report.dump(2) + "\n");
        inv.output("report", a.report);
    }
    inv.out << "gradcheck " << a.directions << " directions, " << r.parameter_count
            << " parameters: max relative error " << r.max_relative_error << " (mean "
            << r.mean_relative_error << ")\n";
    if (!c.quiet && r.reduced_steps > 0) {
        inv.out << r.reduced_steps << " direction(s) needed a smaller step to avoid a kink\n";
    }
    return r.max_relative_error < a.tolerance ? kOk : kCheckFailed;
}

// ---- calibrate-convert -----------------------------------------------------

struct CalibrateArgs {
    std::vector<std::string> inputs;
    std::string curve = "butane";
    std::string output;
    std::string report;
};

int cmd_calibrate(const CalibrateArgs& a, const Common& c, Invocation& inv) {
    const PipelineConfig cfg = inv.load(c);
    inv.record(cfg);
    CalibrationCurve curve = CalibrationCurve::butane();
    if (a.curve != "butane") {
        inv.manifest.add_input("curve", a.curve);
        curve = load_calibration(a.curve);
    } else {
        inv.manifest.inputs["curve"] = "builtin:butane";
    }
    Dataset ds;
    ds.cameras = build_rig(cfg.rig);
    if (a.inputs.size() != ds.cameras.size()) {
        throw ValidationError("calibrate-convert: " + std::to_string(a.inputs.size()) +
                              " graymaps given but the rig has " +
                              std::to_string(ds.cameras.size()) + " cameras");
    }
    ds.sample_count = cfg.sampling.count;
    ds.near = cfg.sampling.near;
    ds.far = cfg.sampling.far;
    json per_image = json::array();
    for (std::size_t i = 0; i < a.inputs.size(); ++i) {
        inv.manifest.add_input("graymap." + std::to_string(i), a.inputs[i]);
        const GrayImage gray = read_pgm(a.inputs[i]);
        const TemperatureImage t = image_to_temperature(gray, curve);
        if (t.width != ds.cameras[i].width || t.height != ds.cameras[i].height) {
            throw ValidationError(a.inputs[i] + ": image size does not match camera " +
                                  std::to_string(ds.cameras[i].id));
        }
        ds.images.push_back(to_projection(t, ds.cameras[i].id));
        per_image.push_back({{"path", a.inputs[i]},
                             {"converted", t.report.converted},
                             {"below_range", t.report.below_range},
                             {"above_range", t.report.above_range}});
    }
    write_dataset(ds, a.output);
    inv.output("dataset", a.output);
    json report{{"curve", to_json(curve)}, {"images", per_image}};
    if (!a.report.empty()) {
        write_file_atomic(a.report, report.dump(2) + "\n");
        inv.manifest.outputs["report"] = a.report;
    }
    if (!c.quiet) {
        for (const auto& im : per_image) {
            inv.out << im["path"].get<std::string>() << ": " << im["converted"] << " converted, "
                    << im["below_range"] << " below range, " << im["above_range"]
                    << " above range\n";
        }
    }
    return kOk;
}

int exit_code_for(const std::exception_ptr& e, std::string& message) {
    try {
        std::rethrow_exception(e);
    } catch (const DivergenceError& x) {
        message = std::string(x.what()) + " (step " + std::to_string(x.step()) + ")";
        return kDivergence;
    } catch (const IoError& x) {
        message = x.what();
        return kIo;
    } catch (const ValidationError& x) {
        message = x.what();
        return kValidation;
    } catch (const FormatError& x) {
        message = x.what();
        return kValidation;
    } catch (const std::exception& x) {
        message = std::string("internal error: ") + x.what();
        return kInternal;
    }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Neural-field flame temperature tomography", "flametomo"};
    app.require_subcommand(1);
    app.set_version_flag("--version", FLAMETOMO_VERSION);

    Common common;
    std::function<int(Invocation&)> action;
    auto bind = [&](CLI::App* sub, auto& args_struct, auto fn) {
        add_common(sub, common);
        sub->callback([&action, &args_struct, &common, fn] {
            action = [&args_struct, &common, fn](Invocation& inv) { return fn(args_struct, common, inv); };
        });
    };

    PhantomArgs phantom;
    auto* sp = app.add_subcommand("phantom", "Validate a phantom spec (or preset) and write it");
    sp->add_option("source", phantom.source, "Phantom JSON file or preset (single, double, triple)")
        ->required();
    sp->add_option("-o,--output", phantom.output, "Output phantom file")->required();
    bind(sp, phantom, cmd_phantom);

    ProjectArgs project;
    auto* pp = app.add_subcommand("project", "Simulate the rig's projections of a phantom");
    pp->add_option("phantom", project.phantom, "Phantom file or preset name")->required();
    pp->add_option("-o,--output", project.output, "Output dataset")->required();
    bind(pp, project, cmd_project);

    NoiseArgs noise;
    auto* np = app.add_subcommand("noise", "Corrupt a dataset with seeded noise");
    np->add_option("input", noise.input, "Input dataset")->required()->check(CLI::ExistingFile);
    np->add_option("-o,--output", noise.output, "Output dataset")->required();
    np->add_option("--kind", noise.kind, "gaussian or salt-pepper")
        ->required()
        ->check(CLI::IsMember({"gaussian", "salt-pepper"}));
    np->add_option("--intensity", noise.intensity, "Fraction of the dataset maximum, e.g. 0.07")
        ->required();
    np->add_option("--seed", noise.seed, "Noise seed")->capture_default_str();
    bind(np, noise, cmd_noise);

    TrainArgs train_args;
    auto* tp = app.add_subcommand("train", "Fit the temperature network to a dataset");
    tp->add_option("dataset", train_args.dataset, "Training dataset")->required()->check(CLI::ExistingFile);
    tp->add_option("-o,--output", train_args.output, "Final checkpoint")->required();
    tp->add_option("--loss-csv", train_args.loss_csv, "Loss history (default: <output>.loss.csv)");
    tp->add_option("--resume", train_args.resume, "Start from this checkpoint")->check(CLI::ExistingFile);
    tp->add_option("--checkpoint-every", train_args.checkpoint_every, "Also checkpoint every k epochs");
    tp->add_option("--epochs", train_args.epochs, "Override train.epochs");
    tp->add_option("--lr", train_args.lr, "Override train.initial_lr");
    tp->add_option("--batch-size", train_args.batch_size, "Override train.batch_size");
    tp->add_option("--seed", train_args.seed, "Override train.seed");
    tp->add_option("--precision", train_args.precision, "float32 or float64");
    bind(tp, train_args, cmd_train);

    ExportArgs export_args;
    auto* ep = app.add_subcommand("export", "Sample a trained network on a voxel grid");
    ep->add_option("checkpoint", export_args.checkpoint, "Checkpoint")->required()->check(CLI::ExistingFile);
    ep->add_option("-o,--output", export_args.output, "Output volume (raw f64 + .json sidecar)")->required();
    export_args.grid.add(ep);
    bind(ep, export_args, cmd_export);

    SliceArgs slice;
    auto* slp = app.add_subcommand("slice", "Extract an axis-aligned slice");
    auto* src = slp->add_option_group("source");
    src->add_option("--volume", slice.volume, "Volume file")->check(CLI::ExistingFile);
    src->add_option("--checkpoint", slice.checkpoint, "Checkpoint (sampled on the grid)")
        ->check(CLI::ExistingFile);
    src->require_option(1);
    slp->add_option("--axis", slice.axis, "x, y or z")->check(CLI::IsMember({"x", "y", "z"}));
    slp->add_option("--coord", slice.coordinate, "World coordinate along the axis")->required();
    slp->add_option("-o,--output", slice.output, "Output prefix (.pgm, .f64, .json)")->required();
    slp->add_option("--phantom", slice.phantom, "Also write the relative error map against this phantom");
    slp->add_option("--floor", slice.floor, "Relative error floor in K")->capture_default_str();
    slp->add_option("--range", slice.range, "Gray mapping lo hi in K (default: slice min/max)")->expected(2);
    slice.grid.add(slp);
    bind(slp, slice, cmd_slice);

    EvaluateArgs evaluate;
    auto* evp = app.add_subcommand("evaluate", "RMSE of a volume against the truth");
    evp->add_option("volume", evaluate.volume, "Reconstructed volume")->required()->check(CLI::ExistingFile);
    auto* truth = evp->add_option_group("truth");
    truth->add_option("--phantom", evaluate.phantom, "Phantom file or preset name");
    truth->add_option("--truth", evaluate.truth, "Reference volume")->check(CLI::ExistingFile);
    truth->require_option(1);
    evp->add_option("--report", evaluate.report, "Write a JSON report");
    evp->add_option("--floor", evaluate.floor, "Relative error floor in K")->capture_default_str();
    bind(evp, evaluate, cmd_evaluate);

    GradcheckArgs gradcheck;
    auto* gp = app.add_subcommand("gradcheck", "Backprop vs central differences on a small network");
    gp->add_option("--seed", gradcheck.seed, "Seed for weights, targets and directions")->capture_default_str();
    gp->add_option("--directions", gradcheck.directions, "Random directions")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    gp->add_option("--tolerance", gradcheck.tolerance, "Maximum relative error")->capture_default_str();
    gp->add_option("--report", gradcheck.report, "Write a JSON report");
    bind(gp, gradcheck, cmd_gradcheck);

    CalibrateArgs calibrate;
    auto* cp = app.add_subcommand("calibrate-convert", "Convert graymaps to temperature projections");
    cp->add_option("inputs", calibrate.inputs, "One PGM per rig camera, in camera order")
        ->required()
        ->check(CLI::ExistingFile);
    cp->add_option("--curve", calibrate.curve, "Calibration JSON file, or 'butane'")->capture_default_str();
    cp->add_option("-o,--output", calibrate.output, "Output dataset")->required();
    cp->add_option("--report", calibrate.report, "Write a JSON conversion report");
    bind(cp, calibrate, cmd_calibrate);

    std::vector<std::string> rev(args.rbegin(), args.rend());
    if (!rev.empty()) rev.pop_back();  // program name
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::CallForVersion&) {
        out << FLAMETOMO_VERSION << "\n";
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n";
        const auto subs = app.get_subcommands();
        err << (subs.empty() ? app.help() : subs.front()->help());
        return kUsage;
    }

    Invocation inv{out, err, {}, {}};
    inv.manifest.command = app.get_subcommands().front()->get_name();
    inv.manifest.tool_version = FLAMETOMO_VERSION;
    inv.manifest.argv = args;
    // Known before the command runs, so early failures land beside the output.
    if (const CLI::Option* o = app.get_subcommands().front()->get_option_no_throw("--output");
        o && o->count() > 0) {
        inv.default_manifest = o->as<std::string>() + ".manifest.jsonl";
    }
    const auto start = std::chrono::steady_clock::now();
    int code = kOk;
    try {
        code = action(inv);
    } catch (...) {
        code = exit_code_for(std::current_exception(), inv.manifest.error);
        err << "error: " << inv.manifest.error << "\n";
    }
    inv.manifest.exit_code = code;
    inv.manifest.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::string path = common.manifest_path;
    if (path.empty()) path = inv.default_manifest.empty() ? "flametomo.manifest.jsonl" : inv.default_manifest;
    try {
        append_manifest(inv.manifest, path);
    } catch (const std::exception& e) {
        err << "error: could not write manifest: " << e.what() << "\n";
        if (code == kOk) code = kIo;
    }
    return code;
}

}  // namespace flametomo::cli
