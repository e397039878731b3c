#include "sldm/config_json.hpp"

#include "sldm/errors.hpp"

using nlohmann::json;

namespace sldm {

json codec_config_to_json(const CodecConfig& c) {
    return {{"max_panels", c.layout.max_panels},
            {"max_edges", c.layout.max_edges},
            {"latent_rows", c.latent_rows},
            {"latent_dim", c.latent_dim},
            {"quant_n", c.quant_n},
            {"width", c.width},
            {"heads", c.heads},
            {"enc_depth", c.enc_depth},
            {"dec_depth", c.dec_depth},
            {"lambda_rec", c.lambda_rec},
            {"lambda_panel", c.lambda_panel},
            {"lambda_stitch", c.lambda_stitch},
            {"lambda_bce", c.lambda_bce},
            {"stitch_margin", c.stitch_margin}};
}

CodecConfig codec_config_from_json(const json& j) {
    CodecConfig c;
    try {
        c.layout.max_panels = j.value("max_panels", c.layout.max_panels);
        c.layout.max_edges = j.value("max_edges", c.layout.max_edges);
        c.latent_rows = j.value("latent_rows", c.latent_rows);
        c.latent_dim = j.value("latent_dim", c.latent_dim);
        c.quant_n = j.value("quant_n", c.quant_n);
        c.width = j.value("width", c.width);
        c.heads = j.value("heads", c.heads);
        c.enc_depth = j.value("enc_depth", c.enc_depth);
        c.dec_depth = j.value("dec_depth", c.dec_depth);
        c.lambda_rec = j.value("lambda_rec", c.lambda_rec);
        c.lambda_panel = j.value("lambda_panel", c.lambda_panel);
        c.lambda_stitch = j.value("lambda_stitch", c.lambda_stitch);
        c.lambda_bce = j.value("lambda_bce", c.lambda_bce);
        c.stitch_margin = j.value("stitch_margin", c.stitch_margin);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad codec config: ") + e.what());
    }
    if (c.quant_n < 1 || c.latent_rows < 1 || c.latent_dim < 1 || c.width < 1 ||
        c.width % c.heads != 0)
        throw ConfigError("codec config out of range");
    return c;
}

json diffusion_config_to_json(const DiffusionConfig& c) {
    return {{"latent_rows", c.latent_rows},
            {"latent_dim", c.latent_dim},
            {"quant_n", c.quant_n},
            {"T", c.T},
            {"sample_steps", c.sample_steps},
            {"depth", c.depth},
            {"width", c.width},
            {"heads", c.heads},
            {"inject_after_block", c.inject_after_block},
            {"cond_dropout_p", c.cond_dropout_p},
            {"eps_inject", c.eps_inject},
            {"cfg_scale", c.cfg_scale},
            {"lambda_vlb", c.lambda_vlb},
            {"text_len", c.text_len},
            {"text_vocab", c.text_vocab},
            {"sketch_res", c.sketch_res},
            {"patch", c.patch},
            {"body_dim", c.body_dim},
            {"printed_injection", c.printed_injection}};
}

DiffusionConfig diffusion_config_from_json(const json& j) {
    DiffusionConfig c;
    try {
        c.latent_rows = j.value("latent_rows", c.latent_rows);
        c.latent_dim = j.value("latent_dim", c.latent_dim);
        c.quant_n = j.value("quant_n", c.quant_n);
        c.T = j.value("T", c.T);
        c.sample_steps = j.value("sample_steps", c.sample_steps);
        c.depth = j.value("depth", c.depth);
        c.width = j.value("width", c.width);
        c.heads = j.value("heads", c.heads);
        c.inject_after_block = j.value("inject_after_block", c.inject_after_block);
        c.cond_dropout_p = j.value("cond_dropout_p", c.cond_dropout_p);
        c.eps_inject = j.value("eps_inject", c.eps_inject);
        c.cfg_scale = j.value("cfg_scale", c.cfg_scale);
        c.lambda_vlb = j.value("lambda_vlb", c.lambda_vlb);
        c.text_len = j.value("text_len", c.text_len);
        c.text_vocab = j.value("text_vocab", c.text_vocab);
        c.sketch_res = j.value("sketch_res", c.sketch_res);
        c.patch = j.value("patch", c.patch);
        c.body_dim = j.value("body_dim", c.body_dim);
        c.printed_injection = j.value("printed_injection", c.printed_injection);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad diffusion config: ") + e.what());
    }
    if (c.T < 1 || c.sample_steps < 1 || c.sample_steps > c.T || c.depth < 1 || c.width < 1 ||
        c.width % c.heads != 0 || c.inject_after_block < 0 || c.inject_after_block >= c.depth ||
        c.sketch_res % c.patch != 0)
        throw ConfigError("diffusion config out of range");
    return c;
}

}  // namespace sldm
