#pragma once

#include <string>

#include <nlohmann/json_fwd.hpp>

#include "flametomo/camera.hpp"
#include "flametomo/encoding.hpp"
#include "flametomo/network.hpp"
#include "flametomo/trainer.hpp"
#include "flametomo/volume.hpp"

namespace flametomo {

// Everything a pipeline run can be configured with. The file form is a JSON
// object with optional sections
//
//   rig       camera_count radius angular_spacing_deg start_angle_deg height
//             width image_height fx fy cx cy
//   sampling  count near far mode seed
//   encoding  levels include_raw domain_center domain_half_extent
//   network   hidden_width hidden_layers skip_layer reduce_widths
//   train     initial_lr decay batch_size epochs sampling_mode seed init_seed
//             beta1 beta2 epsilon precision workers chunk_rays checkpoint_every
//   grid      origin spacing dims
//
// Missing keys take their defaults; unknown keys are an error. When the
// sampling section gives no near/far they follow the rig (a 45-unit segment
// centred on the rig center). The network input width follows the encoding.
//
// Simulated projections default to midpoint sampling so that clean data carry
// no quadrature jitter; training draws its own samples (train.sampling_mode).
inline SamplingConfig default_projection_sampling() {
    SamplingConfig q = default_sampling_for(RigConfig{});
    q.mode = SamplingMode::DeterministicMidpoint;
    return q;
}

struct PipelineConfig {
    RigConfig rig;
    SamplingConfig sampling = default_projection_sampling();
    EncodingConfig encoding;
    NetworkShape network;
    TrainConfig train;
    int checkpoint_every = 0;  // 0: only the final checkpoint
    GridSpec grid;

    void validate() const;
};

// Parses and range-checks a config document. Throws ConfigError naming the
// offending key (e.g. "train.initial_lr") or the line of a syntax error.
PipelineConfig parse_config(const std::string& text);
PipelineConfig config_from_json(const nlohmann::json& j);
PipelineConfig load_config(const std::string& path);

// Fully resolved form; parse_config(dump_config(c)) reproduces c.
nlohmann::json config_to_json(const PipelineConfig& cfg);
std::string dump_config(const PipelineConfig& cfg);

bool operator==(const PipelineConfig& a, const PipelineConfig& b);

}  // namespace flametomo
