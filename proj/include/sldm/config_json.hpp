#ifndef SLDM_CONFIG_JSON_HPP
#define SLDM_CONFIG_JSON_HPP

#include "json.hpp"
#include "sldm/codec.hpp"
#include "sldm/diffusion.hpp"

namespace sldm {

nlohmann::json codec_config_to_json(const CodecConfig& c);
CodecConfig codec_config_from_json(const nlohmann::json& j);

nlohmann::json diffusion_config_to_json(const DiffusionConfig& c);
DiffusionConfig diffusion_config_from_json(const nlohmann::json& j);

}  // namespace sldm

#endif
