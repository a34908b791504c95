#include "iris/dataset.hpp"

#include "iris/error.hpp"

#include <algorithm>
#include <fstream>

namespace iris {

std::vector<DatasetEntry> DatasetIndex::split(Split s) const {
    std::vector<DatasetEntry> out;
    std::copy_if(entries.begin(), entries.end(), std::back_inserter(out),
                 [s](const DatasetEntry& e) { return e.split == s; });
    return out;
}

DatasetIndex index_dataset(const std::filesystem::path& root, int train_per_class) {
    namespace fs = std::filesystem;
    if (train_per_class <= 0) throw ArgumentError("train_per_class must be positive");
    std::error_code ec;
    if (!fs::is_directory(root, ec)) {
        throw DatasetError("dataset root is not a directory: " + root.string());
    }

    std::vector<fs::path> class_dirs;
    for (const auto& e : fs::directory_iterator(root, ec)) {
        if (e.is_directory()) class_dirs.push_back(e.path());
    }
    if (ec) throw IoError("cannot list " + root.string() + ": " + ec.message());
    std::sort(class_dirs.begin(), class_dirs.end());

    DatasetIndex index;
    for (const auto& dir : class_dirs) {
        std::vector<fs::path> images;
        for (const auto& e : fs::directory_iterator(dir, ec)) {
            if (e.is_regular_file() && e.path().extension() == ".pgm") images.push_back(e.path());
        }
        if (ec) throw IoError("cannot list " + dir.string() + ": " + ec.message());
        std::sort(images.begin(), images.end());
        if (static_cast<int>(images.size()) <= train_per_class) {
            index.warnings.push_back("skipping " + dir.filename().string() + ": " +
                                     std::to_string(images.size()) + " images, need more than " +
                                     std::to_string(train_per_class));
            continue;
        }
        const int class_id = index.num_classes();
        index.class_names.push_back(dir.filename().string());
        for (std::size_t i = 0; i < images.size(); ++i) {
            if (!std::ifstream(images[i], std::ios::binary)) {
                throw IoError("cannot read " + images[i].string());
            }
            index.entries.push_back({images[i], class_id,
                                     static_cast<int>(i) < train_per_class ? Split::Train
                                                                           : Split::Test});
        }
    }
    if (index.class_names.empty()) {
        throw DatasetError("no class folder under " + root.string() + " has more than " +
                           std::to_string(train_per_class) + " images");
    }
    return index;
}

}  // namespace iris
