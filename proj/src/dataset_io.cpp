#include "modfl/dataset_io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include "json.hpp"

namespace mdfl {

using nlohmann::json;

namespace {

std::string instance_name(int i) {
    std::ostringstream ss;
    ss << "instance_" << std::setw(5) << std::setfill('0') << i << ".json";
    return ss.str();
}

}  // namespace

void write_dataset(const Dataset& dataset, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    json manifest;
    manifest["version"] = kVersion;
    manifest["benchmark"] = dataset.meta.benchmark;
    manifest["seed"] = dataset.meta.seed;
    manifest["costs_are_probabilities"] = dataset.meta.costs_are_probabilities;
    manifest["count"] = dataset.instances.size();
    manifest["splits"] = {{"train", dataset.train_idx},
                          {"val", dataset.val_idx},
                          {"test", dataset.test_idx}};
    std::ofstream mf(dir / "manifest.json");
    if (!mf) throw parse_error("cannot write manifest in " + dir.string());
    mf << manifest.dump(1) << "\n";

    for (std::size_t i = 0; i < dataset.instances.size(); ++i)
        write_instance(dataset.instances[i], dir / instance_name(static_cast<int>(i)));
}

Dataset load_dataset(const std::filesystem::path& dir) {
    std::ifstream mf(dir / "manifest.json");
    if (!mf) throw parse_error("cannot open manifest in " + dir.string());
    json manifest;
    try {
        mf >> manifest;
    } catch (const json::parse_error& e) {
        throw parse_error("manifest.json: " + std::string(e.what()));
    }

    Dataset ds;
    ds.meta.benchmark = manifest.at("benchmark").get<std::string>();
    ds.meta.seed = manifest.at("seed").get<std::uint64_t>();
    ds.meta.costs_are_probabilities = manifest.at("costs_are_probabilities").get<bool>();
    const int count = manifest.at("count").get<int>();
    ds.train_idx = manifest.at("splits").at("train").get<std::vector<int>>();
    ds.val_idx = manifest.at("splits").at("val").get<std::vector<int>>();
    ds.test_idx = manifest.at("splits").at("test").get<std::vector<int>>();
    for (int i = 0; i < count; ++i) {
        ds.instances.push_back(read_instance(dir / instance_name(i)));
        validate_instance(ds.instances.back());
    }
    validate_dataset(ds);
    return ds;
}

}  // namespace mdfl
