#pragma once

#include <stdexcept>
#include <string>

namespace iris {

/// Invalid caller-supplied argument (bad sigma, threshold order, resolution...).
class ArgumentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A file could not be opened, read or written.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A file was readable but its contents do not follow the expected format.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Boundary detection failed or produced implausible geometry.
class LocalizationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Dataset layout problems: no usable classes, class without training images.
class DatasetError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Inconsistent configuration, e.g. model and template dimensions disagree.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace iris
