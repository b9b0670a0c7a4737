#include "signglove/blocks.hpp"

#include <json.hpp>

#include "signglove/container.hpp"

namespace signglove {

void save_windows(const std::vector<SequenceWindow>& windows,
                  const std::filesystem::path& path, const std::string& extra_meta_json) {
    if (windows.empty()) throw EmptyFile("refusing to write an empty window block");
    const std::size_t n = windows.size(), w = windows.front().w;

    TensorContainer c;
    c.magic = kWindowBlockMagic;
    c.fingerprint = fingerprint_of("windows w=" + std::to_string(w));

    nn::Tensor data({n, w, kNumChannels});
    nn::Tensor labels({n});
    nlohmann::json sources = nlohmann::json::array();
    for (std::size_t i = 0; i < n; ++i) {
        if (windows[i].w != w) throw ShapeMismatch("window block: mixed window sizes");
        std::copy(windows[i].data.begin(), windows[i].data.end(),
                  data.data() + i * w * kNumChannels);
        labels[i] = windows[i].label.index();
        sources.push_back(windows[i].source_id);
    }
    c.tensors.emplace_back("data", std::move(data));
    c.tensors.emplace_back("labels", std::move(labels));

    nlohmann::json meta = extra_meta_json.empty()
                              ? nlohmann::json::object()
                              : nlohmann::json::parse(extra_meta_json);
    meta["window_size"] = w;
    meta["count"] = n;
    meta["sources"] = sources;
    c.metadata_json = meta.dump();
    write_container(c, path);
}

std::vector<SequenceWindow> load_windows(const std::filesystem::path& path,
                                         std::string* meta_out) {
    const TensorContainer c = read_container(path, kWindowBlockMagic);
    const nn::Tensor* data = c.find("data");
    const nn::Tensor* labels = c.find("labels");
    if (!data || !labels || data->rank() != 3 || data->dim(2) != kNumChannels)
        throw BadFile("window block missing data/labels tensors: " + path.string());
    const auto meta = nlohmann::json::parse(c.metadata_json);
    const std::size_t n = data->dim(0), w = data->dim(1);

    std::vector<SequenceWindow> windows(n);
    for (std::size_t i = 0; i < n; ++i) {
        SequenceWindow& win = windows[i];
        win.w = w;
        win.label = ClassLabel::from_index(static_cast<int>((*labels)[i]));
        win.data.assign(data->data() + i * w * kNumChannels,
                        data->data() + (i + 1) * w * kNumChannels);
        if (meta.contains("sources") && i < meta["sources"].size())
            win.source_id = meta["sources"][i].get<std::string>();
    }
    if (meta_out) *meta_out = c.metadata_json;
    return windows;
}

void save_labeled_set(const LabeledTensorSet& set, const std::filesystem::path& path,
                      const std::string& magic, const std::string& extra_meta_json) {
    if (set.size() == 0) throw EmptyFile("refusing to write an empty feature block");
    TensorContainer c;
    c.magic = magic;
    c.fingerprint = fingerprint_of("labeled set n=" + std::to_string(set.size()));
    c.tensors.emplace_back("features", set.features);
    nn::Tensor labels({set.labels.size()});
    for (std::size_t i = 0; i < set.labels.size(); ++i)
        labels[i] = static_cast<double>(set.labels[i]);
    c.tensors.emplace_back("labels", std::move(labels));
    c.metadata_json = extra_meta_json.empty() ? "{}" : extra_meta_json;
    write_container(c, path);
}

LabeledTensorSet load_labeled_set(const std::filesystem::path& path,
                                  const std::string& magic, std::string* meta_out) {
    const TensorContainer c = read_container(path, magic);
    const nn::Tensor* features = c.find("features");
    const nn::Tensor* labels = c.find("labels");
    if (!features || !labels)
        throw BadFile("feature block missing tensors: " + path.string());
    LabeledTensorSet set;
    set.features = *features;
    set.labels.resize(labels->numel());
    for (std::size_t i = 0; i < set.labels.size(); ++i)
        set.labels[i] = static_cast<int>((*labels)[i]);
    if (meta_out) *meta_out = c.metadata_json;
    return set;
}

}  // namespace signglove
