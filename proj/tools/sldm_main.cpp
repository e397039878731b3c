#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "sldm/checkpoint.hpp"
#include "sldm/codec.hpp"
#include "sldm/config_json.hpp"
#include "sldm/diffusion.hpp"
#include "sldm/errors.hpp"
#include "sldm/metrics.hpp"
#include "sldm/pattern_json.hpp"
#include "sldm/raster_io.hpp"
#include "sldm/svg_export.hpp"
#include "sldm/synthgen.hpp"
#include "sldm/text_tokenizer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace sldm;

namespace {

constexpr const char* kVersion = "0.1.0";

std::string config_hash(const std::string& config) {
    // FNV-1a; stable across platforms, good enough for run identification
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : config) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    std::ostringstream os;
    os << std::hex << h;
    return os.str();
}

void print_run_header(std::uint64_t seed, const std::string& config) {
    json hdr = {{"seed", seed}, {"config_hash", config_hash(config)}, {"version", kVersion}};
    std::cout << hdr.dump() << "\n";
}

std::string read_text_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot read " + path);
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

TensorLayout layout_for(const std::string& profile) {
    if (profile == "full") return TensorLayout::full_profile();
    if (profile == "default") return TensorLayout::default_profile();
    throw ConfigError("unknown layout profile: " + profile);
}

struct Dataset {
    DatasetManifest manifest;
    std::vector<SewingPattern> patterns;
    std::vector<std::string> texts;
    std::vector<RasterImage> sketches;
    std::vector<BodyShape> bodies;
};

Dataset load_dataset(const std::string& dir, bool with_conditions) {
    Dataset d;
    d.manifest = load_manifest(dir);
    for (const auto& item : d.manifest.items) {
        d.patterns.push_back(load_pattern((fs::path(dir) / item.pattern_path).string()));
        if (with_conditions) {
            d.texts.push_back(read_text_file((fs::path(dir) / item.text_path).string()));
            d.sketches.push_back(load_pgm((fs::path(dir) / item.sketch_path).string()));
            d.bodies.push_back(
                body_from_json(load_json_file((fs::path(dir) / item.body_path).string())));
        }
    }
    return d;
}

CodecConfig codec_config_of(const Checkpoint& ck) {
    return codec_config_from_json(json::parse(ck.config_json).at("codec"));
}

std::vector<Tensor> encode_corpus(ParamStore& ps, const CodecConfig& cc,
                                  const std::vector<SewingPattern>& patterns,
                                  const ChannelStats& stats) {
    std::vector<Tensor> latents;
    for (const auto& p : patterns)
        latents.push_back(codec_encode(ps, cc, pattern_to_tensor(p, cc.layout, stats)).grid);
    return latents;
}

int run(int argc, char** argv) {
    CLI::App app{"sewing pattern latent diffusion toolkit"};
    app.require_subcommand(1);

    std::uint64_t seed = 0;
    int count = 100;
    std::string data_dir, out_path, profile = "default", ckpt_path, codec_path, init_path;
    std::string pattern_path, code_path, stats_path, text, sketch_path, body_path;
    std::string pred_dir, gt_dir, tune = "both", config_path;
    int epochs = 10, steps = 200, stage = 1, inject_after = -1, sketch_res = 64;
    double lr = 1e-3, cfg_scale = 1.0;
    int usage_n = 2, usage_nf = 6;

    auto* gen = app.add_subcommand("gen-data", "generate a synthetic dataset");
    gen->add_option("--count", count)->required();
    gen->add_option("--seed", seed)->required();
    gen->add_option("--out", out_path)->required();
    gen->add_option("--profile", profile);
    gen->add_option("--sketch-res", sketch_res);

    auto* fit = app.add_subcommand("fit-stats", "fit channel statistics over a dataset");
    fit->add_option("--data", data_dir)->required();
    fit->add_option("--out", out_path);
    fit->add_option("--profile", profile);

    auto* tae = app.add_subcommand("train-ae", "train the pattern autoencoder");
    tae->add_option("--data", data_dir)->required();
    tae->add_option("--out", out_path)->required();
    tae->add_option("--seed", seed)->required();
    tae->add_option("--epochs", epochs);
    tae->add_option("--lr", lr);
    tae->add_option("--config", config_path);

    auto* enc = app.add_subcommand("encode", "encode a pattern to a latent code");
    enc->add_option("--ckpt", ckpt_path)->required();
    enc->add_option("--pattern", pattern_path)->required();
    enc->add_option("--stats", stats_path)->required();
    enc->add_option("--out", out_path)->required();

    auto* dec = app.add_subcommand("decode", "decode a latent code to a pattern");
    dec->add_option("--ckpt", ckpt_path)->required();
    dec->add_option("--code", code_path)->required();
    dec->add_option("--stats", stats_path)->required();
    dec->add_option("--out", out_path)->required();

    auto* tld = app.add_subcommand("train-ldm", "train the latent diffusion model");
    tld->add_option("--stage", stage)->check(CLI::Range(1, 2))->required();
    tld->add_option("--data", data_dir)->required();
    tld->add_option("--codec", codec_path)->required();
    tld->add_option("--out", out_path)->required();
    tld->add_option("--seed", seed)->required();
    tld->add_option("--init", init_path);
    tld->add_option("--tune", tune)->check(CLI::IsMember({"both", "self", "cross"}));
    tld->add_option("--inject-after", inject_after);
    tld->add_option("--steps", steps);
    tld->add_option("--lr", lr);
    tld->add_option("--config", config_path);

    auto* smp = app.add_subcommand("sample", "sample a pattern from the trained model");
    smp->add_option("--ckpt", ckpt_path)->required();
    smp->add_option("--codec", codec_path)->required();
    smp->add_option("--stats", stats_path)->required();
    smp->add_option("--seed", seed)->required();
    smp->add_option("--out", out_path)->required();
    smp->add_option("--text", text);
    smp->add_option("--sketch", sketch_path);
    smp->add_option("--body", body_path);
    smp->add_option("--cfg-scale", cfg_scale);

    auto* evl = app.add_subcommand("eval", "compare predicted patterns against ground truth");
    evl->add_option("--pred-dir", pred_dir)->required();
    evl->add_option("--gt-dir", gt_dir)->required();

    auto* val = app.add_subcommand("validate", "structural validation of a pattern file");
    val->add_option("--pattern", pattern_path)->required();

    auto* svg = app.add_subcommand("export-svg", "render a pattern as SVG");
    svg->add_option("--pattern", pattern_path)->required();
    svg->add_option("--out", out_path)->required();

    auto* usg = app.add_subcommand("usage", "codebook usage of a latent dump");
    usg->add_option("--latents", code_path)->required();
    usg->add_option("--n", usage_n);
    usg->add_option("--nf", usage_nf);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() != 0) {
            json err = {{"error", "bad_arguments"}, {"message", e.what()}};
            std::cerr << err.dump() << "\n";
        }
        return app.exit(e);
    }

    if (gen->parsed()) {
        const TensorLayout layout = layout_for(profile);
        json cfg = {{"count", count}, {"profile", profile}, {"sketch_res", sketch_res}};
        print_run_header(seed, cfg.dump());
        const DatasetManifest m = build_dataset(count, seed, out_path, layout, sketch_res);
        std::cout << json{{"written", m.count}, {"out", out_path}}.dump() << "\n";
        return 0;
    }

    if (fit->parsed()) {
        const Dataset d = load_dataset(data_dir, false);
        const TensorLayout layout = layout_for(d.manifest.layout_profile);
        print_run_header(d.manifest.seed, d.manifest.layout_profile);
        const ChannelStats stats = fit_channel_stats(d.patterns, layout);
        const std::string dest =
            out_path.empty() ? (fs::path(data_dir) / "stats.json").string() : out_path;
        save_stats(stats, dest);
        std::cout << json{{"stats", dest}}.dump() << "\n";
        return 0;
    }

    if (tae->parsed()) {
        const Dataset d = load_dataset(data_dir, false);
        CodecConfig cc;
        cc.layout = layout_for(d.manifest.layout_profile);
        if (!config_path.empty())
            cc = codec_config_from_json(load_json_file(config_path).value("codec", json::object()));
        const json cfg = {{"codec", codec_config_to_json(cc)}};
        print_run_header(seed, cfg.dump());
        const ChannelStats stats = load_stats((fs::path(data_dir) / "stats.json").string());
        std::vector<PatternTensor> tensors;
        for (const auto& p : d.patterns) tensors.push_back(pattern_to_tensor(p, cc.layout, stats));
        ParamStore ps;
        Rng rng(seed);
        init_codec_params(ps, cc, rng);
        const auto log = train_codec(ps, cc, tensors, stats, epochs, lr, seed);
        for (const auto& e : log)
            std::cout << json{{"epoch", e.epoch},
                              {"total", e.loss.total},
                              {"rec", e.loss.rec},
                              {"panel", e.loss.panel},
                              {"stitch", e.loss.stitch},
                              {"bce", e.loss.bce},
                              {"usage", e.usage}}
                             .dump()
                      << "\n";
        save_checkpoint(checkpoint_from_store(ps, "codec", cfg.dump(), seed), out_path);
        return 0;
    }

    if (enc->parsed()) {
        const Checkpoint ck = load_checkpoint(ckpt_path);
        const CodecConfig cc = codec_config_of(ck);
        print_run_header(ck.seed, ck.config_json);
        ParamStore ps = store_from_checkpoint(ck);
        const ChannelStats stats = load_stats(stats_path);
        const SewingPattern p = load_pattern(pattern_path);
        const LatentCode z = codec_encode(ps, cc, pattern_to_tensor(p, cc.layout, stats));
        Checkpoint out;
        out.component = "data";
        out.config_json = ck.config_json;
        out.seed = ck.seed;
        out.tensors.emplace_back("z", z.grid);
        save_checkpoint(out, out_path);
        return 0;
    }

    if (dec->parsed()) {
        const Checkpoint ck = load_checkpoint(ckpt_path);
        const CodecConfig cc = codec_config_of(ck);
        print_run_header(ck.seed, ck.config_json);
        ParamStore ps = store_from_checkpoint(ck);
        const ChannelStats stats = load_stats(stats_path);
        const Checkpoint code = load_checkpoint(code_path);
        if (code.tensors.empty()) throw InvalidCheckpoint("latent dump holds no tensors");
        const PatternTensor rec = codec_decode(ps, cc, LatentCode{code.tensors.front().second});
        save_pattern(tensor_to_pattern(rec, stats), out_path);
        return 0;
    }

    if (tld->parsed()) {
        const Dataset d = load_dataset(data_dir, true);
        const Checkpoint codec_ck = load_checkpoint(codec_path);
        const CodecConfig cc = codec_config_of(codec_ck);
        ParamStore codec_ps = store_from_checkpoint(codec_ck);
        const ChannelStats stats = load_stats((fs::path(data_dir) / "stats.json").string());

        TextTokenizer tok;
        DiffusionConfig dc;
        dc.latent_rows = cc.latent_rows;
        dc.latent_dim = cc.latent_dim;
        dc.quant_n = cc.quant_n;
        dc.text_vocab = tok.vocab_size();
        if (!config_path.empty()) {
            dc = diffusion_config_from_json(
                load_json_file(config_path).value("diffusion", json::object()));
            dc.latent_rows = cc.latent_rows;
            dc.latent_dim = cc.latent_dim;
            dc.quant_n = cc.quant_n;
            dc.text_vocab = tok.vocab_size();
        }
        if (inject_after >= 0) dc.inject_after_block = inject_after;
        const json cfg = {{"diffusion", diffusion_config_to_json(dc)},
                          {"codec", codec_config_to_json(cc)}};
        print_run_header(seed, cfg.dump());

        const std::vector<Tensor> latents = encode_corpus(codec_ps, cc, d.patterns, stats);
        const NoiseSchedule sched = cosine_schedule(dc.T);

        ParamStore ps;
        std::vector<TrainLogEntry> log;
        if (stage == 1) {
            Rng rng(seed);
            init_stage1_params(ps, dc, rng);
            std::vector<std::vector<int>> texts;
            for (const auto& t : d.texts) texts.push_back(tok.encode(t));
            log = train_stage1(ps, dc, sched, latents, texts, steps, lr, seed);
            save_checkpoint(checkpoint_from_store(ps, "ldm1", cfg.dump(), seed), out_path);
        } else {
            if (init_path.empty()) throw MissingStage1("stage 2 requires --init with a stage-1 checkpoint");
            const Checkpoint ck1 = load_checkpoint(init_path);
            if (ck1.component != "ldm1" && ck1.component != "ldm2")
                throw InvalidCheckpoint("--init is not a diffusion checkpoint");
            ps = store_from_checkpoint(ck1);
            if (!ps.has("cond.q")) {
                Rng rng(seed ^ 0x5f2d);
                init_stage2_params(ps, dc, rng);
            }
            std::vector<ConditionBundle> conds;
            for (size_t i = 0; i < d.patterns.size(); ++i) {
                ConditionBundle c;
                c.text = tok.encode(d.texts[i]);
                c.sketch = d.sketches[i];
                c.body = d.bodies[i];
                conds.push_back(std::move(c));
            }
            const TuneSet ts = tune == "self" ? TuneSet::SelfOnly
                               : tune == "cross" ? TuneSet::CrossOnly
                                                 : TuneSet::Both;
            log = train_stage2(ps, dc, sched, latents, conds, ts, steps, lr, seed);
            save_checkpoint(checkpoint_from_store(ps, "ldm2", cfg.dump(), seed), out_path);
        }
        for (size_t i = 0; i < log.size(); i += std::max<size_t>(1, log.size() / 20))
            std::cout << json{{"step", log[i].step},
                              {"loss", log[i].loss},
                              {"simple", log[i].simple},
                              {"vlb", log[i].vlb}}
                             .dump()
                      << "\n";
        return 0;
    }

    if (smp->parsed()) {
        const Checkpoint ck = load_checkpoint(ckpt_path);
        const Checkpoint codec_ck = load_checkpoint(codec_path);
        const CodecConfig cc = codec_config_of(codec_ck);
        const DiffusionConfig dc =
            diffusion_config_from_json(json::parse(ck.config_json).at("diffusion"));
        print_run_header(seed, ck.config_json);
        ParamStore ps = store_from_checkpoint(ck);
        ParamStore codec_ps = store_from_checkpoint(codec_ck);
        const ChannelStats stats = load_stats(stats_path);

        TextTokenizer tok;
        ConditionBundle cond;
        if (!text.empty()) cond.text = tok.encode(text);
        if (!sketch_path.empty()) cond.sketch = load_pgm(sketch_path);
        if (!body_path.empty()) cond.body = body_from_json(load_json_file(body_path));
        if (cond.text.empty() && !cond.sketch && !cond.body)
            throw ConfigError("sampling needs at least one of --text, --sketch, --body");

        const NoiseSchedule sched = cosine_schedule(dc.T);
        const Tensor z = sample_latent(ps, dc, sched, cond, cfg_scale, seed);
        const PatternTensor rec = codec_decode(codec_ps, cc, LatentCode{z});
        const SewingPattern p = tensor_to_pattern(rec, stats);
        save_pattern(p, out_path);
        const ValidationReport rep = validate_pattern(p);
        std::cout << json{{"out", out_path}, {"valid", rep.ok}, {"issues", rep.issues.size()}}.dump()
                  << "\n";
        return 0;
    }

    if (evl->parsed()) {
        std::vector<std::pair<SewingPattern, SewingPattern>> pairs;
        std::vector<fs::path> files;
        for (const auto& e : fs::directory_iterator(gt_dir))
            if (e.path().extension() == ".json") files.push_back(e.path().filename());
        std::sort(files.begin(), files.end());
        for (const auto& f : files)
            pairs.emplace_back(load_pattern((fs::path(pred_dir) / f).string()),
                               load_pattern((fs::path(gt_dir) / f).string()));
        print_run_header(0, pred_dir + "|" + gt_dir);
        const MetricsReport rep = eval_corpus(pairs);
        std::cout << report_to_table(rep) << "\n";
        std::cout << json{{"panel_l2", rep.panel_l2},       {"rot_l2", rep.rot_l2},
                          {"transl_l2", rep.transl_l2},     {"panel_acc", rep.panel_acc},
                          {"edge_acc", rep.edge_acc},       {"stitch_acc", rep.stitch_acc},
                          {"failure_rate", rep.failure_rate}}
                         .dump()
                  << "\n";
        return 0;
    }

    if (val->parsed()) {
        const SewingPattern p = load_pattern(pattern_path);
        print_run_header(0, pattern_path);
        const ValidationReport rep = validate_pattern(p);
        json issues = json::array();
        for (const auto& i : rep.issues)
            issues.push_back({{"code", i.code}, {"location", i.location}, {"message", i.message}});
        std::cout << json{{"valid", rep.ok}, {"issues", issues}}.dump() << "\n";
        return rep.ok ? 0 : 1;
    }

    if (svg->parsed()) {
        const SewingPattern p = load_pattern(pattern_path);
        print_run_header(0, pattern_path);
        export_svg_file(p, out_path);
        std::cout << json{{"out", out_path}}.dump() << "\n";
        return 0;
    }

    if (usg->parsed()) {
        const Checkpoint ck = load_checkpoint(code_path);
        print_run_header(ck.seed, ck.config_json);
        std::vector<LatentCode> codes;
        for (const auto& [name, t] : ck.tensors) codes.push_back({t});
        std::cout << json{{"usage", codebook_usage(codes, usage_n, usage_nf)}}.dump() << "\n";
        return 0;
    }

    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const MissingCheckpoint& e) {
        std::cerr << json{{"error", e.code()}, {"message", e.what()}}.dump() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << json{{"error", e.code()}, {"message", e.what()}}.dump() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << json{{"error", "internal"}, {"message", e.what()}}.dump() << "\n";
        return 1;
    }
}
