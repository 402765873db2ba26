#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

namespace gtd {

// Flat named-parameter representation every fitted model can dump to and
// restore from; the model file stores these blocks bit-exactly.
struct NamedBlock {
    std::vector<std::size_t> shape;
    std::vector<double> data;
};

// std::map keeps serialization order deterministic.
using NamedTensorMap = std::map<std::string, NamedBlock>;

} // namespace gtd
