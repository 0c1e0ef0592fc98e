#include "loadgen/cvae/checkpoint.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "loadgen/errors.hpp"

namespace loadgen::cvae {

using nlohmann::json;

namespace {

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double number_from(const json& j) {
    return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

json layer_to_json(const NamedLayer& l) {
    const auto& layer = *l.layer;
    return json{{"name", l.name},
                {"in", layer.in_dim()},
                {"out", layer.out_dim()},
                {"activation", nn::to_string(layer.activation)},
                {"weights", std::vector<double>(layer.weights.values().begin(), layer.weights.values().end())},
                {"bias", layer.bias}};
}

nn::DenseLayer layer_from_json(const json& j, const std::string& expected_name) {
    const auto name = j.at("name").get<std::string>();
    if (name != expected_name)
        throw FormatError("checkpoint: expected layer '" + expected_name + "', found '" + name + "'");
    const auto in = j.at("in").get<std::size_t>();
    const auto out = j.at("out").get<std::size_t>();
    const auto w = j.at("weights").get<std::vector<double>>();
    if (w.size() != in * out) throw FormatError("checkpoint: layer '" + name + "' weight count mismatch");
    return nn::DenseLayer(nn::Matrix::from_values(out, in, w), j.at("bias").get<std::vector<double>>(),
                          nn::activation_from_string(j.at("activation").get<std::string>()));
}

GaussianNet net_from_json(const json& layers, std::size_t& pos, const std::string& prefix,
                          std::size_t hidden_count) {
    auto next = [&](const std::string& name) {
        if (pos >= layers.size()) throw FormatError("checkpoint: missing layer '" + name + "'");
        return layer_from_json(layers[pos++], name);
    };
    GaussianNet net;
    for (std::size_t i = 0; i < hidden_count; ++i)
        net.hidden.push_back(next(prefix + ".hidden." + std::to_string(i)));
    net.mean_head = next(prefix + ".mean");
    net.log_var_head = next(prefix + ".log_var");
    return net;
}

}  // namespace

json config_to_json(const CvaeConfig& c) {
    return json{{"data_dim", c.data_dim},
                {"latent_dim", c.latent_dim},
                {"condition_dim", c.condition_dim},
                {"encoder_hidden", c.encoder_hidden},
                {"decoder_hidden", c.decoder_hidden},
                {"beta", c.beta},
                {"learning_rate", c.learning_rate},
                {"batch_size", c.batch_size},
                {"epochs", c.epochs},
                {"seed", c.seed}};
}

CvaeConfig config_from_json(const json& j, CvaeConfig c) {
    if (!j.is_object()) throw FormatError("model config must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        if (key == "data_dim") c.data_dim = value.get<std::size_t>();
        else if (key == "latent_dim") c.latent_dim = value.get<std::size_t>();
        else if (key == "condition_dim") c.condition_dim = value.get<std::size_t>();
        else if (key == "encoder_hidden") c.encoder_hidden = value.get<std::vector<std::size_t>>();
        else if (key == "decoder_hidden") c.decoder_hidden = value.get<std::vector<std::size_t>>();
        else if (key == "beta") c.beta = value.get<double>();
        else if (key == "learning_rate") c.learning_rate = value.get<double>();
        else if (key == "batch_size") c.batch_size = value.get<std::size_t>();
        else if (key == "epochs") c.epochs = value.get<std::size_t>();
        else if (key == "seed") c.seed = value.get<std::uint64_t>();
        else throw FormatError("unknown model config key '" + key + "'");
    }
    return c;
}

std::string checkpoint_to_string(const Checkpoint& ckpt) {
    json layers = json::array();
    for (const auto& l : ckpt.model.layers()) layers.push_back(layer_to_json(l));
    json history = json::array();
    for (const auto& h : ckpt.history) {
        history.push_back(json{{"epoch", h.epoch},
                               {"train_beta_kl", number_or_null(h.train_beta_kl)},
                               {"train_recon", number_or_null(h.train_recon)},
                               {"test_beta_kl", number_or_null(h.test_beta_kl)},
                               {"test_recon", number_or_null(h.test_recon)}});
    }
    json doc{{"format", kCheckpointFormat},
             {"version", kCheckpointVersion},
             {"config", config_to_json(ckpt.model.config())},
             {"scale_kw", ckpt.scale_kw},
             {"layers", std::move(layers)},
             {"history", std::move(history)}};
    return doc.dump();
}

Checkpoint checkpoint_from_string(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw FormatError(std::string("checkpoint: not valid JSON: ") + e.what());
    }
    if (!doc.is_object() || doc.value("format", "") != kCheckpointFormat)
        throw FormatError("checkpoint: not a loadgen CVAE checkpoint");
    const int version = doc.at("version").get<int>();
    if (version != kCheckpointVersion)
        throw FormatError("checkpoint: unsupported version " + std::to_string(version) +
                          " (expected " + std::to_string(kCheckpointVersion) + ")");
    try {
        const auto cfg = config_from_json(doc.at("config"));
        const auto& layers = doc.at("layers");
        std::size_t pos = 0;
        auto enc = net_from_json(layers, pos, "encoder", cfg.encoder_hidden.size());
        auto dec = net_from_json(layers, pos, "decoder", cfg.decoder_hidden.size());
        if (pos != layers.size()) throw FormatError("checkpoint: unexpected extra layers");
        Checkpoint ckpt{Cvae(cfg, std::move(enc), std::move(dec)), doc.at("scale_kw").get<double>(), {}};
        for (const auto& h : doc.at("history")) {
            ckpt.history.push_back({h.at("epoch").get<std::size_t>(), number_from(h.at("train_beta_kl")),
                                    number_from(h.at("train_recon")), number_from(h.at("test_beta_kl")),
                                    number_from(h.at("test_recon"))});
        }
        return ckpt;
    } catch (const json::exception& e) {
        throw FormatError(std::string("checkpoint: malformed document: ") + e.what());
    } catch (const ShapeError& e) {
        throw FormatError(std::string("checkpoint: inconsistent shapes: ") + e.what());
    }
}

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write checkpoint " + path.string());
    out << checkpoint_to_string(ckpt);
    if (!out) throw DataError("failed writing checkpoint " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot read checkpoint " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return checkpoint_from_string(ss.str());
}

}  // namespace loadgen::cvae
