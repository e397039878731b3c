#ifndef SLDM_PATTERN_JSON_HPP
#define SLDM_PATTERN_JSON_HPP

#include <string>

#include "json.hpp"
#include "sldm/body.hpp"
#include "sldm/pattern.hpp"
#include "sldm/vectorize.hpp"

namespace sldm {

nlohmann::json pattern_to_json(const SewingPattern& p);
SewingPattern pattern_from_json(const nlohmann::json& j);

void save_pattern(const SewingPattern& p, const std::string& path);
SewingPattern load_pattern(const std::string& path);

nlohmann::json stats_to_json(const ChannelStats& s);
ChannelStats stats_from_json(const nlohmann::json& j);
void save_stats(const ChannelStats& s, const std::string& path);
ChannelStats load_stats(const std::string& path);

nlohmann::json body_to_json(const BodyShape& b);
BodyShape body_from_json(const nlohmann::json& j);

nlohmann::json load_json_file(const std::string& path);
void save_json_file(const nlohmann::json& j, const std::string& path);

}  // namespace sldm

#endif
