#include <fstream>
#include <json.hpp>

#include "topogcn/neural.hpp"

namespace topogcn {

using nlohmann::json;

namespace {

constexpr const char *format_tag = "topogcn-model";
constexpr int format_version = 1;

json spec_to_json(const ModelSpec &s) {
    return {
        {"architecture", to_string(s.architecture)},
        {"hidden", s.hidden},
        {"external_width", s.external_width},
        {"dropout", s.dropout},
        {"l2", s.l2},
        {"learning_rate", s.learning_rate},
        {"epochs", s.epochs},
        {"seed", s.seed},
    };
}

ModelSpec spec_from_json(const json &j) {
    ModelSpec s;
    s.architecture = architecture_from_string(j.at("architecture").get<std::string>());
    s.hidden = j.at("hidden").get<std::vector<std::size_t>>();
    s.external_width = j.at("external_width").get<std::size_t>();
    s.dropout = j.at("dropout").get<std::vector<double>>();
    s.l2 = j.at("l2").get<std::vector<double>>();
    s.learning_rate = j.at("learning_rate").get<double>();
    s.epochs = j.at("epochs").get<int>();
    s.seed = j.at("seed").get<std::uint64_t>();
    return s;
}

} // namespace

void save_model(const TrainedModel &model, const std::filesystem::path &path) {
    json layers = json::array();
    for (std::size_t l = 0; l < model.weights.size(); ++l) {
        layers.push_back({
            {"in", model.shapes[l].in},
            {"out", model.shapes[l].out},
            {"bias", model.shapes[l].bias},
            {"weights", model.weights[l].data()},
            {"bias_values", model.biases[l]},
        });
    }
    const json doc = {
        {"format", format_tag},
        {"version", format_version},
        {"spec", spec_to_json(model.spec)},
        {"n_classes", model.n_classes},
        {"input_width", model.input_width},
        {"external_input_width", model.external_input_width},
        {"layers", layers},
        {"loss_trace", model.loss_trace},
    };
    std::ofstream out(path);
    if (!out) {
        throw DataError("cannot write " + path.string());
    }
    out << doc.dump(1) << '\n';
}

TrainedModel load_model(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open " + path.string());
    }
    json doc;
    try {
        doc = json::parse(in);
        if (doc.at("format") != format_tag || doc.at("version") != format_version) {
            throw DataError(path.string() + ": not a topogcn model file");
        }
        TrainedModel model;
        model.spec = spec_from_json(doc.at("spec"));
        model.spec.validate();
        model.n_classes = doc.at("n_classes").get<std::size_t>();
        model.input_width = doc.at("input_width").get<std::size_t>();
        model.external_input_width = doc.at("external_input_width").get<std::size_t>();
        for (const auto &layer : doc.at("layers")) {
            LayerShape shape{layer.at("in").get<std::size_t>(), layer.at("out").get<std::size_t>(),
                             layer.at("bias").get<bool>()};
            model.shapes.push_back(shape);
            model.weights.emplace_back(shape.in, shape.out, layer.at("weights").get<std::vector<double>>());
            model.biases.push_back(layer.at("bias_values").get<std::vector<double>>());
        }
        model.loss_trace = doc.at("loss_trace").get<std::vector<double>>();
        // Shapes must match what the spec would build.
        const auto fresh = init_model(model.spec, model.input_width, model.external_input_width, model.n_classes);
        if (fresh.shapes.size() != model.shapes.size()) {
            throw DataError(path.string() + ": layer count does not match the spec");
        }
        for (std::size_t l = 0; l < fresh.shapes.size(); ++l) {
            const auto &a = fresh.shapes[l];
            const auto &b = model.shapes[l];
            if (a.in != b.in || a.out != b.out || a.bias != b.bias ||
                model.biases[l].size() != (b.bias ? b.out : 0)) {
                throw DataError(path.string() + ": layer " + std::to_string(l) + " shape does not match the spec");
            }
        }
        return model;
    } catch (const json::exception &e) {
        throw DataError(path.string() + ": " + e.what());
    } catch (const ShapeError &e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

} // namespace topogcn
