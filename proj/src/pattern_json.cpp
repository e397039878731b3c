#include "sldm/pattern_json.hpp"

#include <fstream>

#include "sldm/errors.hpp"

namespace sldm {

using nlohmann::json;

json pattern_to_json(const SewingPattern& p) {
    json j;
    j["panels"] = json::array();
    for (const Panel& panel : p.panels) {
        json jp;
        jp["name"] = panel.name;
        jp["rotation"] = {panel.qw, panel.qx, panel.qy, panel.qz};
        jp["translation"] = {panel.tx, panel.ty, panel.tz};
        jp["edges"] = json::array();
        for (const Edge& e : panel.edges) {
            json je;
            je["type"] = to_string(e.type);
            je["vector"] = {e.vx, e.vy};
            switch (e.type) {
                case EdgeType::Straight: break;
                case EdgeType::Quadratic: je["ctrl"] = {e.qx, e.qy}; break;
                case EdgeType::Cubic: je["ctrl"] = {e.b1x, e.b1y, e.b2x, e.b2y}; break;
                case EdgeType::Circle:
                    je["ctrl"] = {e.radius, e.arc_reflex ? 1 : 0, e.arc_clockwise ? 1 : 0};
                    break;
            }
            je["attachment"] = to_string(e.attachment);
            je["stitch_tag"] = {e.tag0, e.tag1, e.tag2};
            je["stitch_present"] = e.stitch_present;
            je["stitch_reversed"] = e.stitch_reversed;
            jp["edges"].push_back(std::move(je));
        }
        j["panels"].push_back(std::move(jp));
    }
    j["stitches"] = json::array();
    for (const Stitch& s : p.stitches) {
        j["stitches"].push_back({{"first", {s.first.panel, s.first.edge}},
                                 {"second", {s.second.panel, s.second.edge}},
                                 {"reversed", s.reversed}});
    }
    if (p.body_ref) j["body_ref"] = *p.body_ref;
    return j;
}

SewingPattern pattern_from_json(const json& j) {
    SewingPattern p;
    for (const json& jp : j.at("panels")) {
        Panel panel;
        panel.name = jp.at("name").get<std::string>();
        const auto& rot = jp.at("rotation");
        panel.qw = rot.at(0);
        panel.qx = rot.at(1);
        panel.qy = rot.at(2);
        panel.qz = rot.at(3);
        const auto& tr = jp.at("translation");
        panel.tx = tr.at(0);
        panel.ty = tr.at(1);
        panel.tz = tr.at(2);
        for (const json& je : jp.at("edges")) {
            Edge e;
            e.type = edge_type_from_string(je.at("type").get<std::string>());
            e.vx = je.at("vector").at(0);
            e.vy = je.at("vector").at(1);
            if (je.contains("ctrl")) {
                const auto& c = je.at("ctrl");
                switch (e.type) {
                    case EdgeType::Straight: break;
                    case EdgeType::Quadratic:
                        e.qx = c.at(0);
                        e.qy = c.at(1);
                        break;
                    case EdgeType::Cubic:
                        e.b1x = c.at(0);
                        e.b1y = c.at(1);
                        e.b2x = c.at(2);
                        e.b2y = c.at(3);
                        break;
                    case EdgeType::Circle:
                        e.radius = c.at(0);
                        e.arc_reflex = c.at(1).get<double>() != 0.0;
                        e.arc_clockwise = c.at(2).get<double>() != 0.0;
                        break;
                }
            }
            e.attachment = attachment_from_string(je.at("attachment").get<std::string>());
            if (je.contains("stitch_tag")) {
                e.tag0 = je.at("stitch_tag").at(0);
                e.tag1 = je.at("stitch_tag").at(1);
                e.tag2 = je.at("stitch_tag").at(2);
            }
            e.stitch_present = je.value("stitch_present", false);
            e.stitch_reversed = je.value("stitch_reversed", false);
            panel.edges.push_back(e);
        }
        p.panels.push_back(std::move(panel));
    }
    for (const json& js : j.at("stitches")) {
        Stitch s;
        s.first = {js.at("first").at(0).get<int>(), js.at("first").at(1).get<int>()};
        s.second = {js.at("second").at(0).get<int>(), js.at("second").at(1).get<int>()};
        s.reversed = js.value("reversed", false);
        p.stitches.push_back(s);
    }
    if (j.contains("body_ref")) p.body_ref = j.at("body_ref").get<std::string>();
    return p;
}

json body_to_json(const BodyShape& b) {
    return {{"height", b.height},
            {"chest", b.chest},
            {"waist", b.waist},
            {"hips", b.hips},
            {"shoulder_width", b.shoulder_width},
            {"arm_length", b.arm_length},
            {"leg_length", b.leg_length},
            {"torso_length", b.torso_length}};
}

BodyShape body_from_json(const json& j) {
    BodyShape b;
    b.height = j.at("height").get<double>();
    b.chest = j.at("chest").get<double>();
    b.waist = j.at("waist").get<double>();
    b.hips = j.at("hips").get<double>();
    b.shoulder_width = j.at("shoulder_width").get<double>();
    b.arm_length = j.at("arm_length").get<double>();
    b.leg_length = j.at("leg_length").get<double>();
    b.torso_length = j.at("torso_length").get<double>();
    return b;
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    json j;
    in >> j;
    return j;
}

void save_json_file(const json& j, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << j.dump(2) << "\n";
}

void save_pattern(const SewingPattern& p, const std::string& path) {
    save_json_file(pattern_to_json(p), path);
}

SewingPattern load_pattern(const std::string& path) {
    return pattern_from_json(load_json_file(path));
}

json stats_to_json(const ChannelStats& s) {
    json j;
    j["mean"] = s.mean;
    j["stddev"] = s.stddev;
    return j;
}

ChannelStats stats_from_json(const json& j) {
    ChannelStats s;
    for (int c = 0; c < ch::kCount; ++c) {
        s.mean[c] = j.at("mean").at(c);
        s.stddev[c] = j.at("stddev").at(c);
    }
    return s;
}

void save_stats(const ChannelStats& s, const std::string& path) {
    save_json_file(stats_to_json(s), path);
}

ChannelStats load_stats(const std::string& path) {
    return stats_from_json(load_json_file(path));
}

}  // namespace sldm
