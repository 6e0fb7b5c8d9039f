#pragma once

#include <cstddef>
#include <vector>

namespace corder {

/// One labelled token-index sequence.
struct Sample {
  std::vector<std::size_t> tokens;
  std::size_t label = 0;

  bool operator==(const Sample&) const = default;
};

}  // namespace corder
