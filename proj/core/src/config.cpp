#include "flametomo/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

#include <nlohmann/json.hpp>

#include "flametomo/atomic_file.hpp"
#include "flametomo/error.hpp"

namespace flametomo {

using nlohmann::json;

namespace {

// Reads the keys of one section, remembering which were consumed so the
// leftovers can be reported.
class Section {
public:
    Section(const json& root, std::string name) : name_(std::move(name)) {
        if (!root.contains(name_)) return;
        node_ = &root.at(name_);
        if (!node_->is_object()) throw ConfigError(name_ + ": section must be an object");
    }

    std::string key(const std::string& k) const { return name_ + "." + k; }
    bool has(const std::string& k) const { return node_ && node_->contains(k); }

    template <typename T>
    void read(const std::string& k, T& out) {
        seen_.insert(k);
        if (!has(k)) return;
        try {
            out = node_->at(k).get<T>();
        } catch (const json::exception&) {
            throw ConfigError(key(k) + ": wrong value type");
        }
    }

    void read_vec3(const std::string& k, Vec3& out) {
        std::vector<double> v{out.x(), out.y(), out.z()};
        read(k, v);
        if (v.size() != 3) throw ConfigError(key(k) + ": expected 3 numbers");
        out = Vec3(v[0], v[1], v[2]);
    }

    template <typename Pred>
    void check(const std::string& k, bool ok, Pred&& describe) const {
        if (!ok) throw ConfigError(key(k) + " " + describe());
    }

    void finish() const {
        if (!node_) return;
        for (const auto& [k, _] : node_->items()) {
            if (!seen_.count(k)) throw ConfigError("unknown key '" + key(k) + "'");
        }
    }

private:
    std::string name_;
    const json* node_ = nullptr;
    std::set<std::string> seen_;
};

auto msg(const char* s) {
    return [s] { return std::string(s); };
}

void read_rig(const json& root, RigConfig& r) {
    Section s(root, "rig");
    s.read("camera_count", r.camera_count);
    s.read("radius", r.radius);
    s.read("angular_spacing_deg", r.angular_spacing_deg);
    s.read("start_angle_deg", r.start_angle_deg);
    s.read("height", r.height);
    s.read("width", r.width);
    s.read("image_height", r.image_height);
    s.read("fx", r.fx);
    s.read("fy", r.fy);
    s.read("cx", r.cx);
    s.read("cy", r.cy);
    s.finish();
    s.check("camera_count", r.camera_count >= 1, msg("must be >= 1"));
    s.check("radius", r.radius > 0.0 && std::isfinite(r.radius), msg("must be positive"));
    s.check("angular_spacing_deg", std::isfinite(r.angular_spacing_deg), msg("must be finite"));
    s.check("start_angle_deg", std::isfinite(r.start_angle_deg), msg("must be finite"));
    s.check("height", std::isfinite(r.height), msg("must be finite"));
    s.check("width", r.width >= 1, msg("must be >= 1"));
    s.check("image_height", r.image_height >= 1, msg("must be >= 1"));
    s.check("fx", r.fx > 0.0 && std::isfinite(r.fx), msg("must be positive"));
    s.check("fy", r.fy > 0.0 && std::isfinite(r.fy), msg("must be positive"));
    s.check("cx", r.cx >= 0.0 && r.cx < r.width, msg("must lie in [0, width)"));
    s.check("cy", r.cy >= 0.0 && r.cy < r.image_height, msg("must lie in [0, image_height)"));
}

void read_sampling(const json& root, const RigConfig& rig, SamplingConfig& q) {
    Section s(root, "sampling");
    const SamplingConfig derived = default_sampling_for(rig);
    q.near = derived.near;
    q.far = derived.far;
    std::string mode = to_string(q.mode);
    s.read("count", q.count);
    s.read("near", q.near);
    s.read("far", q.far);
    s.read("mode", mode);
    s.read("seed", q.seed);
    s.finish();
    s.check("count", q.count >= 1, msg("must be >= 1"));
    s.check("near", q.near >= 0.0 && std::isfinite(q.near), msg("must be finite and >= 0"));
    s.check("far", q.far > q.near && std::isfinite(q.far), msg("must be finite and exceed near"));
    try {
        q.mode = sampling_mode_from_string(mode);
    } catch (const ValidationError& e) {
        throw ConfigError(s.key("mode") + ": " + e.what());
    }
}

void read_encoding(const json& root, EncodingConfig& e) {
    Section s(root, "encoding");
    s.read("levels", e.levels);
    s.read("include_raw", e.include_raw);
    s.read_vec3("domain_center", e.domain_center);
    s.read("domain_half_extent", e.domain_half_extent);
    s.finish();
    s.check("levels", e.levels >= 1 && e.levels <= 30, msg("must lie in [1, 30]"));
    s.check("domain_center", e.domain_center.allFinite(), msg("must be finite"));
    s.check("domain_half_extent", e.domain_half_extent > 0.0 && std::isfinite(e.domain_half_extent),
            msg("must be positive"));
}

void read_network(const json& root, NetworkShape& n) {
    Section s(root, "network");
    s.read("hidden_width", n.hidden_width);
    s.read("hidden_layers", n.hidden_layers);
    s.read("skip_layer", n.skip_layer);
    s.read("reduce_widths", n.reduce_widths);
    s.finish();
    s.check("hidden_width", n.hidden_width >= 1, msg("must be >= 1"));
    s.check("hidden_layers", n.hidden_layers >= 2, msg("must be >= 2"));
    s.check("skip_layer", n.skip_layer >= 1 && n.skip_layer < n.hidden_layers,
            msg("must lie in [1, hidden_layers)"));
    s.check("reduce_widths",
            std::all_of(n.reduce_widths.begin(), n.reduce_widths.end(), [](int w) { return w >= 1; }),
            msg("entries must be >= 1"));
}

void read_train(const json& root, TrainConfig& t, int& checkpoint_every) {
    Section s(root, "train");
    std::string mode = to_string(t.sampling_mode);
    std::string precision = to_string(t.precision);
    s.read("initial_lr", t.initial_lr);
    s.read("decay", t.decay);
    s.read("batch_size", t.batch_size);
    s.read("epochs", t.epochs);
    s.read("sampling_mode", mode);
    s.read("seed", t.seed);
    s.read("init_seed", t.init_seed);
    s.read("beta1", t.adam.beta1);
    s.read("beta2", t.adam.beta2);
    s.read("epsilon", t.adam.epsilon);
    s.read("precision", precision);
    s.read("workers", t.workers);
    s.read("chunk_rays", t.chunk_rays);
    s.read("checkpoint_every", checkpoint_every);
    s.finish();
    s.check("initial_lr", t.initial_lr > 0.0 && std::isfinite(t.initial_lr), msg("must be positive"));
    s.check("decay", t.decay > 0.0 && t.decay <= 1.0, msg("must lie in (0, 1]"));
    s.check("batch_size", t.batch_size >= 1, msg("must be >= 1"));
    s.check("epochs", t.epochs >= 1, msg("must be >= 1"));
    s.check("beta1", t.adam.beta1 >= 0.0 && t.adam.beta1 < 1.0, msg("must lie in [0, 1)"));
    s.check("beta2", t.adam.beta2 >= 0.0 && t.adam.beta2 < 1.0, msg("must lie in [0, 1)"));
    s.check("epsilon", t.adam.epsilon > 0.0, msg("must be positive"));
    s.check("workers", t.workers >= 1, msg("must be >= 1"));
    s.check("chunk_rays", t.chunk_rays >= 1, msg("must be >= 1"));
    s.check("checkpoint_every", checkpoint_every >= 0, msg("must be >= 0"));
    try {
        t.sampling_mode = sampling_mode_from_string(mode);
    } catch (const ValidationError& e) {
        throw ConfigError(s.key("sampling_mode") + ": " + e.what());
    }
    try {
        t.precision = precision_from_string(precision);
    } catch (const ValidationError& e) {
        throw ConfigError(s.key("precision") + ": " + e.what());
    }
}

void read_grid(const json& root, GridSpec& g) {
    Section s(root, "grid");
    std::vector<int> dims{g.dims[0], g.dims[1], g.dims[2]};
    s.read_vec3("origin", g.origin);
    if (s.has("spacing") && root.at("grid").at("spacing").is_number()) {
        double sp = 1.0;
        s.read("spacing", sp);
        g.spacing = Vec3::Constant(sp);
    } else {
        s.read_vec3("spacing", g.spacing);
    }
    s.read("dims", dims);
    s.finish();
    s.check("dims", dims.size() == 3 && std::all_of(dims.begin(), dims.end(), [](int d) { return d >= 1; }),
            msg("must be 3 integers >= 1"));
    g.dims = {dims[0], dims[1], dims[2]};
    s.check("origin", g.origin.allFinite(), msg("must be finite"));
    s.check("spacing", g.spacing.allFinite() && (g.spacing.array() > 0.0).all(),
            msg("must be positive"));
}

std::size_t line_of(const std::string& text, std::size_t byte) {
    byte = std::min(byte, text.size());
    return 1 + static_cast<std::size_t>(
                   std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
}

}  // namespace

void PipelineConfig::validate() const {
    try {
        rig.validate();
        sampling.validate();
        encoding.validate();
        network.validate();
        train.validate();
        grid.validate();
    } catch (const ConfigError&) {
        throw;
    } catch (const ValidationError& e) {
        throw ConfigError(e.what());
    }
    if (network.input_dim != encoding.output_dim()) {
        throw ConfigError("network input width does not match the encoding");
    }
    if (checkpoint_every < 0) throw ConfigError("train.checkpoint_every must be >= 0");
}

PipelineConfig config_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    static const std::set<std::string> sections{"rig", "sampling", "encoding", "network", "train", "grid"};
    for (const auto& [k, _] : j.items()) {
        if (!sections.count(k)) throw ConfigError("unknown key '" + k + "'");
    }
    PipelineConfig c;
    read_rig(j, c.rig);
    read_sampling(j, c.rig, c.sampling);
    read_encoding(j, c.encoding);
    read_network(j, c.network);
    c.network.input_dim = c.encoding.output_dim();
    read_train(j, c.train, c.checkpoint_every);
    read_grid(j, c.grid);
    c.validate();
    return c;
}

PipelineConfig parse_config(const std::string& text) {
    const bool blank = std::all_of(text.begin(), text.end(),
                                   [](unsigned char ch) { return std::isspace(ch) != 0; });
    if (blank) return config_from_json(json::object());
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("parse error at line " + std::to_string(line_of(text, e.byte)) + ": " +
                          e.what());
    }
    return config_from_json(j);
}

PipelineConfig load_config(const std::string& path) {
    const std::string text = read_file_text(path);
    try {
        return parse_config(text);
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

json config_to_json(const PipelineConfig& c) {
    auto vec = [](const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); };
    json j;
    j["rig"] = {{"camera_count", c.rig.camera_count},
                {"radius", c.rig.radius},
                {"angular_spacing_deg", c.rig.angular_spacing_deg},
                {"start_angle_deg", c.rig.start_angle_deg},
                {"height", c.rig.height},
                {"width", c.rig.width},
                {"image_height", c.rig.image_height},
                {"fx", c.rig.fx},
                {"fy", c.rig.fy},
                {"cx", c.rig.cx},
                {"cy", c.rig.cy}};
    j["sampling"] = {{"count", c.sampling.count},
                     {"near", c.sampling.near},
                     {"far", c.sampling.far},
                     {"mode", to_string(c.sampling.mode)},
                     {"seed", c.sampling.seed}};
    j["encoding"] = {{"levels", c.encoding.levels},
                     {"include_raw", c.encoding.include_raw},
                     {"domain_center", vec(c.encoding.domain_center)},
                     {"domain_half_extent", c.encoding.domain_half_extent}};
    j["network"] = {{"hidden_width", c.network.hidden_width},
                    {"hidden_layers", c.network.hidden_layers},
                    {"skip_layer", c.network.skip_layer},
                    {"reduce_widths", c.network.reduce_widths}};
    j["train"] = {{"initial_lr", c.train.initial_lr},
                  {"decay", c.train.decay},
                  {"batch_size", c.train.batch_size},
                  {"epochs", c.train.epochs},
                  {"sampling_mode", to_string(c.train.sampling_mode)},
                  {"seed", c.train.seed},
                  {"init_seed", c.train.init_seed},
                  {"beta1", c.train.adam.beta1},
                  {"beta2", c.train.adam.beta2},
                  {"epsilon", c.train.adam.epsilon},
                  {"precision", to_string(c.train.precision)},
                  {"workers", c.train.workers},
                  {"chunk_rays", c.train.chunk_rays},
                  {"checkpoint_every", c.checkpoint_every}};
    j["grid"] = {{"origin", vec(c.grid.origin)},
                 {"spacing", vec(c.grid.spacing)},
                 {"dims", c.grid.dims}};
    return j;
}

std::string dump_config(const PipelineConfig& cfg) { return config_to_json(cfg).dump(2) + "\n"; }

bool operator==(const PipelineConfig& a, const PipelineConfig& b) {
    return config_to_json(a) == config_to_json(b);
}

}  // namespace flametomo
