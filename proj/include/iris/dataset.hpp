#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace iris {

enum class Split { Train, Test };

struct DatasetEntry {
    std::filesystem::path image;
    int class_id = 0;
    Split split = Split::Train;
};

/// `<root>/<class_name>/<image>.pgm`, classes numbered in sorted name order.
struct DatasetIndex {
    std::vector<DatasetEntry> entries;
    std::vector<std::string> class_names;  // indexed by class_id
    std::vector<std::string> warnings;     // skipped folders

    int num_classes() const { return static_cast<int>(class_names.size()); }
    std::vector<DatasetEntry> split(Split s) const;
};

/// The first `train_per_class` images (lexicographic) of each class train,
/// the remainder test. Folders with no test remainder are skipped with a warning.
DatasetIndex index_dataset(const std::filesystem::path& root, int train_per_class);

}  // namespace iris
