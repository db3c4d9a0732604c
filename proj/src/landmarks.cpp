#include "anys/landmarks.hpp"

#include <stdexcept>

namespace anys {

LandmarkSet landmarks_from_indices(const Dataset& ds, std::vector<Index> indices, std::string method,
                                   Index m_requested) {
  LandmarkSet lm;
  lm.coords.resize(static_cast<Index>(indices.size()), ds.d());
  for (std::size_t j = 0; j < indices.size(); ++j) {
    if (indices[j] < 0 || indices[j] >= ds.n()) throw std::out_of_range("landmark index out of range");
    lm.coords.row(static_cast<Index>(j)) = ds.points.row(indices[j]);
  }
  lm.indices = std::move(indices);
  lm.method = std::move(method);
  lm.m_requested = m_requested;
  return lm;
}

void require_rank(Index m, Index n, const char* who) {
  if (m < 1) throw std::invalid_argument(std::string(who) + ": rank must be >= 1");
  if (m > n)
    throw std::invalid_argument(std::string(who) + ": rank " + std::to_string(m) + " exceeds dataset size " +
                                std::to_string(n));
}

}  // namespace anys
