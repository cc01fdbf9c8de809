#pragma once

#include <cmath>
#include <string>

#include "magscatter/error.hpp"

namespace magscatter {

template <typename T>
Field<T>::Field(Grid g, std::vector<T> values) : grid_(g), data_(std::move(values)) {
    if (data_.size() != grid_.size())
        throw ValidationError("field size " + std::to_string(data_.size()) +
                              " does not match grid size " + std::to_string(grid_.size()));
}

}  // namespace magscatter
