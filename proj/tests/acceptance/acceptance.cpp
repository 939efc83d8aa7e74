// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any fails.
//
//   flametomo_acceptance [--quick] [--workdir DIR]
//
// --quick runs only the criteria that need no full-scale training (6, 7, 9,
// 10) and reports the others as SKIP. --workdir keeps the per-run loss curves,
// volumes and a results.json summary.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "flametomo/flametomo.hpp"

namespace ft = flametomo;
using nlohmann::json;

namespace {

int failures = 0;

void verdict(int id, const std::string& name, bool pass, const std::string& detail) {
    if (!pass) ++failures;
    std::cout << (pass ? "PASS" : "FAIL") << " [" << id << "] " << name << ": " << detail
              << std::endl;
}

void skip(int id, const std::string& name) {
    std::cout << "SKIP [" << id << "] " << name << ": needs full-scale training" << std::endl;
}

std::string fmt(double v, int digits = 3) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(digits) << v;
    return s.str();
}

std::string sci(double v) {
    std::ostringstream s;
    s << std::scientific << std::setprecision(2) << v;
    return s.str();
}

// ---- criteria that need no training -------------------------------------

void gradient_criterion() {
    ft::GradcheckConfig cfg;
    cfg.directions = 100;
    const auto report = ft::gradient_check(cfg);
    verdict(6, "gradient check", report.max_relative_error < 1e-4,
            "max relative error " + sci(report.max_relative_error) + " over " +
                std::to_string(report.checks.size()) + " directions, " +
                std::to_string(report.parameter_count) + " parameters (< 1e-4)");
}

// Worst relative error over the pixels whose ray passes within one radius of
// the fireball center, so the whole blob lies inside the sampled segment.
double quadrature_error(int samples) {
    const ft::PhantomSpec spec = ft::preset_phantom("single");
    const ft::Fireball& fb = spec.fireballs.front();
    const auto cameras = ft::build_rig(ft::RigConfig{});
    ft::SamplingConfig q = ft::default_sampling_for(ft::RigConfig{});
    q.count = samples;
    q.mode = ft::SamplingMode::DeterministicMidpoint;
    double worst = 0.0;
    for (const auto& cam : {cameras.front(), cameras[cameras.size() / 2]}) {
        const ft::ProjectionImage img = ft::forward_project(spec, cam, q);
        for (int v = 0; v < img.height; ++v) {
            for (int u = 0; u < img.width; ++u) {
                const ft::Ray ray = ft::generate_ray(cam, u, v, q);
                const ft::Vec3 d = fb.center - ray.origin;
                const double rho = (d - d.dot(ray.direction) * ray.direction).norm();
                if (rho > fb.radius) continue;
                const double exact = ft::analytic_line_integral(fb, ray);
                worst = std::max(worst, std::abs(img.at(u, v) - exact) / exact);
            }
        }
    }
    return worst;
}

void quadrature_criterion() {
    const double e45 = quadrature_error(45);
    const double e360 = quadrature_error(360);
    verdict(7, "quadrature vs analytic line integral", e45 < 1e-2 && e360 < 1e-3,
            "N=45 " + sci(e45) + " (< 1e-2), N=360 " + sci(e360) + " (< 1e-3)");
}

void calibration_criterion() {
    const double t255 = ft::butane_gray_to_temp(255.0);
    const double t1e4 = ft::butane_gray_to_temp(1e4);
    // Independent high-precision evaluation of the fitted curve.
    constexpr double kT255 = 1285.6807982838696;
    const bool pass = std::abs(t255 - kT255) <= 0.1 && std::abs(t1e4 - 1326.4) < 0.01;
    verdict(9, "butane calibration", pass,
            "T(255) = " + fmt(t255, 4) + " K (pinned " + fmt(kT255, 4) + ", tol 0.1), T(1e4) = " +
                fmt(t1e4, 4) + " K (1326.4, tol 0.01)");
}

void ingestion_criterion() {
    ft::GrayImage gray;
    gray.width = 64;
    gray.height = 48;
    gray.maxval = 65535;
    gray.pixels.assign(static_cast<std::size_t>(gray.width) * gray.height, 1000);
    const ft::GrayImage back = ft::parse_pgm(ft::encode_pgm(gray));
    const ft::TemperatureImage t = ft::image_to_temperature(back, ft::CalibrationCurve::butane());
    const double expected = ft::butane_gray_to_temp(1000.0);
    bool constant = t.values.size() == gray.pixels.size();
    for (double v : t.values) constant = constant && v == expected;
    verdict(10, "constant graymap ingestion", constant,
            std::to_string(t.values.size()) + " pixels, all exactly " + fmt(expected, 6) + " K");
}

// ---- training runs --------------------------------------------------------

struct RunKey {
    std::string phantom;
    ft::NoiseKind noise = ft::NoiseKind::Clean;
    double intensity = 0.0;
    auto operator<=>(const RunKey&) const = default;

    std::string label() const {
        if (noise == ft::NoiseKind::Clean) return phantom + "/clean";
        return phantom + "/" + (noise == ft::NoiseKind::Gaussian ? "gaussian" : "salt-pepper") +
               "-" + std::to_string(static_cast<int>(std::lround(intensity * 100))) + "%";
    }
};

struct RunResult {
    double rmse = 0.0;
    std::vector<double> epoch_loss;
    std::optional<ft::ShellCoreError> shell_core;  // first fireball
    double seconds = 0.0;
    std::string error;
};

class Runner {
public:
    explicit Runner(std::optional<std::filesystem::path> workdir) : workdir_(std::move(workdir)) {
        if (workdir_) std::filesystem::create_directories(*workdir_);
    }

    const RunResult& get(const RunKey& key) {
        auto it = runs_.find(key);
        if (it == runs_.end()) it = runs_.emplace(key, run(key)).first;
        return it->second;
    }

    void write_summary() const {
        if (!workdir_) return;
        json j = json::array();
        for (const auto& [key, r] : runs_) {
            json e{{"run", key.label()},
                   {"rmse", r.rmse},
                   {"epoch_loss", r.epoch_loss},
                   {"seconds", r.seconds}};
            if (r.shell_core) {
                e["shell_mean"] = r.shell_core->shell_mean;
                e["core_mean"] = r.shell_core->core_mean;
            }
            if (!r.error.empty()) e["error"] = r.error;
            j.push_back(e);
        }
        std::ofstream(*workdir_ / "results.json") << j.dump(2) << "\n";
    }

private:
    // Fixed noise seeds, one per corruption setting.
    static std::uint64_t noise_seed(const RunKey& key) {
        if (key.noise == ft::NoiseKind::SaltPepper) return 7007;
        return key.intensity < 0.1 ? 707 : 1515;
    }

    RunResult run(const RunKey& key) {
        const ft::PipelineConfig cfg;
        const ft::PhantomSpec spec = ft::preset_phantom(key.phantom);
        ft::Dataset ds;
        ds.cameras = ft::build_rig(cfg.rig);
        ds.sample_count = cfg.sampling.count;
        ds.near = cfg.sampling.near;
        ds.far = cfg.sampling.far;
        for (const auto& cam : ds.cameras) ds.images.push_back(ft::forward_project(spec, cam, cfg.sampling));
        if (key.noise == ft::NoiseKind::Gaussian) {
            ds.images = ft::add_gaussian_noise(ds.images, key.intensity, noise_seed(key));
        } else if (key.noise == ft::NoiseKind::SaltPepper) {
            ds.images = ft::add_salt_pepper_noise(ds.images, key.intensity, noise_seed(key));
        }

        std::cerr << "training " << key.label() << std::endl;
        RunResult r;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            const ft::TrainResult tr = ft::train(
                ds, cfg.network, cfg.encoding, cfg.train,
                [&](const ft::EpochReport& e, const ft::NetworkParams&) {
                    std::cerr << "  epoch " << e.epoch << " loss " << e.mean_loss << " ("
                              << fmt(e.seconds, 1) << " s)" << std::endl;
                });
            r.epoch_loss = tr.history.epoch_mean_loss;
            const ft::VoxelGrid recon = ft::sample_volume(tr.params, cfg.grid);
            const ft::VoxelGrid truth = ft::sample_phantom(spec, cfg.grid);
            r.rmse = ft::rmse(recon, truth);
            r.shell_core = ft::shell_core_error(recon, truth, spec.fireballs.front());
            if (workdir_) {
                const std::string stem = (*workdir_ / key.label()).string();
                std::filesystem::create_directories(*workdir_ / key.phantom);
                std::ofstream(stem + ".loss.csv") << ft::loss_history_csv(tr.history);
                ft::write_volume(recon, stem + ".ftv");
            }
        } catch (const std::exception& e) {
            r.error = e.what();
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::cerr << "  " << key.label() << " rmse " << fmt(r.rmse) << " in " << fmt(r.seconds, 0)
                  << " s" << (r.error.empty() ? "" : " error: " + r.error) << std::endl;
        return r;
    }

    std::optional<std::filesystem::path> workdir_;
    std::map<RunKey, RunResult> runs_;
};

const std::vector<std::string> kPhantoms{"single", "double", "triple"};

RunKey clean(const std::string& p) { return {p, ft::NoiseKind::Clean, 0.0}; }
RunKey gaussian(const std::string& p, double i) { return {p, ft::NoiseKind::Gaussian, i}; }
RunKey salt_pepper(const std::string& p, double i) { return {p, ft::NoiseKind::SaltPepper, i}; }

bool ok(const RunResult& r) { return r.error.empty() && std::isfinite(r.rmse); }

std::string rmse_text(const RunResult& r) { return ok(r) ? fmt(r.rmse) : "error (" + r.error + ")"; }

void training_criteria(Runner& runs) {
    const RunResult& single = runs.get(clean("single"));
    verdict(1, "clean single-fireball RMSE", ok(single) && single.rmse <= 10.0,
            "RMSE " + rmse_text(single) + " K on 45^3 grid (<= 10)");

    const RunResult& dbl = runs.get(clean("double"));
    const RunResult& tpl = runs.get(clean("triple"));
    verdict(2, "complexity ordering",
            ok(single) && ok(dbl) && ok(tpl) && single.rmse < dbl.rmse && single.rmse < tpl.rmse &&
                dbl.rmse <= 25.0 && tpl.rmse <= 25.0,
            "single " + rmse_text(single) + " < double " + rmse_text(dbl) + ", triple " +
                rmse_text(tpl) + " (each <= 25)");

    // Criterion 5 only needs the clean runs, so report it before the noisy ones.
    bool converged = true;
    std::string detail;
    for (const auto& p : kPhantoms) {
        const RunResult& r = runs.get(clean(p));
        const bool have = ok(r) && r.epoch_loss.size() >= 20;
        const double ratio = have ? r.epoch_loss[19] / r.epoch_loss[0] : NAN;
        converged = converged && have && ratio < 0.1;
        detail += (detail.empty() ? "" : ", ") + p + " " + (have ? sci(ratio) : "n/a");
    }
    verdict(5, "convergence (epoch-20 / epoch-1 loss)", converged, detail + " (< 0.1)");

    const bool have_sc = ok(single) && single.shell_core.has_value();
    const double ratio = have_sc ? single.shell_core->ratio() : NAN;
    verdict(8, "boundary error concentration", have_sc && ratio > 1.0,
            have_sc ? "shell " + fmt(single.shell_core->shell_mean, 4) + " / core " +
                          fmt(single.shell_core->core_mean, 4) + " = " + fmt(ratio) + " (> 1)"
                    : "no trained single run");

    bool robust = true;
    detail.clear();
    for (const auto& p : kPhantoms) {
        const RunResult& c = runs.get(clean(p));
        const RunResult& g7 = runs.get(gaussian(p, 0.07));
        const RunResult& g15 = runs.get(gaussian(p, 0.15));
        const bool have = ok(c) && ok(g7) && ok(g15);
        robust = robust && have && g7.rmse <= 2.0 * c.rmse &&
                 std::abs(g15.rmse - g7.rmse) <= 0.3 * g7.rmse;
        detail += (detail.empty() ? "" : "; ") + p + " clean " + rmse_text(c) + " 7% " +
                  rmse_text(g7) + " 15% " + rmse_text(g15);
    }
    verdict(3, "gaussian noise robustness", robust,
            detail + " (7% <= 2x clean, |15% - 7%| <= 0.3 x 7%)");

    const RunResult& sp_single = runs.get(salt_pepper("single", 0.07));
    const RunResult& sp_double = runs.get(salt_pepper("double", 0.07));
    const RunResult& sp_triple = runs.get(salt_pepper("triple", 0.07));
    const RunResult& g7_single = runs.get(gaussian("single", 0.07));
    const bool have = ok(sp_single) && ok(sp_double) && ok(sp_triple) && ok(g7_single);
    verdict(4, "salt-and-pepper sensitivity",
            have && sp_single.rmse > g7_single.rmse && sp_single.rmse < sp_double.rmse &&
                sp_double.rmse < sp_triple.rmse,
            "single s&p " + rmse_text(sp_single) + " > gaussian " + rmse_text(g7_single) +
                "; s&p single " + rmse_text(sp_single) + " < double " + rmse_text(sp_double) +
                " < triple " + rmse_text(sp_triple));
}

}  // namespace

int main(int argc, char** argv) {
    bool quick = false;
    std::optional<std::filesystem::path> workdir;
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--quick") {
            quick = true;
        } else if (a == "--workdir" && i + 1 < argc) {
            workdir = argv[++i];
        } else {
            std::cerr << "usage: flametomo_acceptance [--quick] [--workdir DIR]\n";
            return 2;
        }
    }

    try {
        gradient_criterion();
        quadrature_criterion();
        calibration_criterion();
        ingestion_criterion();
        if (quick) {
            skip(1, "clean single-fireball RMSE");
            skip(2, "complexity ordering");
            skip(3, "gaussian noise robustness");
            skip(4, "salt-and-pepper sensitivity");
            skip(5, "convergence (epoch-20 / epoch-1 loss)");
            skip(8, "boundary error concentration");
        } else {
            Runner runs(workdir);
            training_criteria(runs);
            runs.write_summary();
        }
    } catch (const std::exception& e) {
        std::cout << "FAIL [internal] " << e.what() << std::endl;
        return 70;
    }
    std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " failed")
              << std::endl;
    return failures == 0 ? 0 : 1;
}
